"""``rankscope`` command line."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction

from .errors import BudgetExceeded, ConsistencyFailure, NumericalGuard, RankscopeError

log = logging.getLogger("rankscope")

EXIT_USAGE, EXIT_BUDGET, EXIT_CONSISTENCY = 2, 3, 4


class _Usage(Exception):
    pass


def _json_default(o):
    if isinstance(o, Fraction):
        return {"num": o.numerator, "den": o.denominator, "value": float(o)}
    if isinstance(o, complex):
        return {"re": o.real, "im": o.imag}
    if hasattr(o, "item"):
        return o.item()
    if isinstance(o, (set, tuple)):
        return sorted(o) if isinstance(o, set) else list(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _emit(obj, out: str | None, name: str) -> None:
    text = json.dumps(obj, indent=1, default=_json_default) + "\n"
    if out is None:
        sys.stdout.write(text)
        return
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, name)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    log.info("wrote %s", path)


def _group(text: str):
    from .atlas import parse_group

    try:
        return parse_group(text)
    except ValueError as e:
        raise _Usage(str(e)) from e


def _table_for(text: str):
    from .atlas import get_atlas
    from .chartable import get_table

    return get_table(get_atlas(*_group(text)))


def cmd_table(a) -> int:
    from .chartable import write_table

    T = _table_for(a.group)
    if a.out is None:
        sys.stdout.write(T.to_csv() if a.format == "csv" else json.dumps(T.to_json(), indent=1) + "\n")
    else:
        os.makedirs(a.out, exist_ok=True)
        write_table(T, os.path.join(a.out, f"table.{a.format}"), a.format)
    return 0


def cmd_ranks(a) -> int:
    from dataclasses import asdict

    from .ranks import get_profiles, profiles_to_csv

    T = _table_for(a.group)
    P = get_profiles(T)
    if a.partition is not None:
        from .eta import parse_partition, sps_constituent

        try:
            D = parse_partition(a.partition)
        except ValueError as e:
            raise _Usage(str(e)) from e
        if sum(D) != T.atlas.n:
            raise _Usage(f"{list(D)} is not a partition of {T.atlas.n}")
        P = [P[sps_constituent(T, D)]]
    if a.format == "csv":
        text = profiles_to_csv(P)
        if a.out is None:
            sys.stdout.write(text)
        else:
            os.makedirs(a.out, exist_ok=True)
            with open(os.path.join(a.out, "ranks.csv"), "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
    else:
        _emit({"group": T.atlas.name, "profiles": [asdict(p) for p in P]}, a.out, "ranks.json")
    return 0


def cmd_ft(a) -> int:
    from .matrix_ft import ft_report

    if not 1 <= a.k <= a.m <= a.n:
        raise _Usage("need 1 <= k <= m <= n")
    _emit(ft_report(a.m, a.n, a.k, a.q, brute=a.brute).to_json(), a.out, "ft.json")
    return 0


def cmd_count(a) -> int:
    from .gencount import auto_regular_class, sts_deviation_table

    T = _table_for(a.group)
    A = T.atlas
    if a.g_class is not None:
        if not 0 <= a.g_class < A.K:
            raise _Usage(f"class id out of range 0..{A.K - 1}")
        g = a.g_class
    else:
        g = auto_regular_class(A)
    tab = sts_deviation_table(T, g, a.ell, oracle=a.oracle)
    _emit(tab.to_json(), a.out, "count.json")
    return 0


def cmd_figures(a) -> int:
    from .figures import write_all

    if a.out is None:
        raise _Usage("figures needs --out")
    for p in write_all(_table_for(a.group), a.out, a.ell):
        log.info("wrote %s", p)
    return 0


def cmd_verify(a) -> int:
    from .verify import verify_group

    rep = verify_group(*_group(a.group), ell_max=a.ell)
    for c in rep.checks:
        tag = "finding" if c.finding else ("ok" if c.ok else "FAIL")
        print(f"{tag:8s} {c.name}: {c.detail}")
    if a.out is not None:
        _emit(rep.to_json(), a.out, "verify.json")
    if not rep.ok:
        names = ", ".join(c.name for c in rep.failures)
        raise ConsistencyFailure(f"{rep.group}: failed checks {names}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rankscope", description="Ranks and character ratios of GL_n/SL_n over small fields.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def grp(sp, ell=False):
        sp.add_argument("--group", required=True, help="GL(n,q) or SL(n,q)")
        sp.add_argument("--out", default=None, help="output directory (stdout if omitted)")
        if ell:
            sp.add_argument("--ell", type=int, default=8)

    s = sub.add_parser("table", help="character table")
    grp(s)
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.set_defaults(fn=cmd_table)

    s = sub.add_parser("ranks", help="U-rank / tensor rank profile of every irrep")
    grp(s)
    s.add_argument("--format", choices=("json", "csv"), default="csv")
    s.add_argument("--partition", default=None, help="only the SPS constituent rho_D, D given as [d1,d2,...]")
    s.set_defaults(fn=cmd_ranks)

    s = sub.add_parser("ft", help="Fourier transform of a rank set at a rank-one matrix")
    for name in ("m", "n", "k", "q"):
        s.add_argument(f"--{name}", type=int, required=True)
    s.add_argument("--brute", action="store_true", help="cross-check by exhaustive summation")
    s.add_argument("--out", default=None)
    s.set_defaults(fn=cmd_ft)

    s = sub.add_parser("count", help="words in the transvection class hitting g")
    grp(s, ell=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--g-class", type=int, default=None)
    g.add_argument("--g-auto-regss", action="store_true",
                   help="first regular semisimple class without eigenvalue 1 (default)")
    s.add_argument("--oracle", action="store_true", help="also run the convolution oracle")
    s.set_defaults(fn=cmd_count)

    s = sub.add_parser("figures", help="CSV data for every figure kind")
    grp(s, ell=True)
    s.set_defaults(fn=cmd_figures)

    s = sub.add_parser("verify", help="full invariant suite for a group")
    grp(s, ell=True)
    s.set_defaults(fn=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.fn(args)
    except _Usage as e:
        print(f"rankscope: {e}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as e:
        print(f"rankscope: budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (ConsistencyFailure, NumericalGuard) as e:
        print(f"rankscope: consistency failure: {e}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except (RankscopeError, ValueError) as e:
        print(f"rankscope: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
