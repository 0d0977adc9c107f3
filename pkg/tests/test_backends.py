import json
import os
import subprocess
import sys

import pytest

from rankscope import _accel

SCRIPT = r"""
import json
import numpy as np
from rankscope import backend
from rankscope.atlas import get_atlas
from rankscope.chartable import get_table
from rankscope.gencount import convolution_oracle
from rankscope.matrix_ft import census, e11

out = {"backend": backend()}
for key in [("GL", 3, 2), ("SL", 2, 5), ("GL", 2, 4), ("SL", 3, 3)]:
    A = get_atlas(*key)
    T = get_table(A)
    out[A.name] = {
        "reps": A.reps.tolist(), "sizes": A.sizes.tolist(),
        "re": np.round(T.values.real, 9).tolist(), "im": np.round(T.values.imag, 9).tolist(),
    }
out["conv"] = [f.tolist() for f in convolution_oracle(get_atlas("GL", 3, 2), 4)]
hist, cats = census(2, 3, 3, e11(2, 3))
out["census"] = [hist.tolist(), cats.tolist()]
print(json.dumps(out))
"""


def _run(flag: str) -> dict:
    env = dict(os.environ, RANKSCOPE_NUMBA=flag)
    res = subprocess.run([sys.executable, "-c", SCRIPT], env=env, capture_output=True, text=True,
                         timeout=900, check=True)
    return json.loads(res.stdout)


@pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")
def test_backends_agree():
    a, b = _run("1"), _run("0")
    assert a.pop("backend") == "numba" and b.pop("backend") == "numpy"
    assert a.keys() == b.keys()
    for k in a:
        assert a[k] == b[k], k
