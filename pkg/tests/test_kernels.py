import os
import subprocess
import sys

import numpy as np
import pytest

from hitlab import kernels
from hitlab.flow import Reparametrization

compiled_only = pytest.mark.skipif("compiled" not in kernels.BACKENDS, reason="compiled kernels not built")


def test_default_backend_recorded():
    assert kernels.DEFAULT in kernels.BACKENDS
    assert kernels.get() is kernels.BACKENDS[kernels.DEFAULT]
    with pytest.raises(ValueError):
        kernels.get("fortran")


def test_pure_fallback_selected_by_environment():
    env = {**os.environ, "HITLAB_PURE": "1"}
    out = subprocess.run([sys.executable, "-c", "from hitlab import kernels; print(kernels.DEFAULT)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def _phi():
    return Reparametrization((((0, 0), 1.0, 0.0), ((1, 0), 0.5, 0.0), ((1, 1), 0.1, 0.2)))


@compiled_only
def test_rk4_kernels_agree():
    coef, freqs = _phi().arrays()
    dirn = np.array([1.0, 0.6180339887])
    py, cy = kernels.get("python"), kernels.get("compiled")
    x = [0.1, 0.7]
    a = py.rk4_step(coef, freqs, dirn, x, 1e-3)
    b = cy.rk4_step(coef, freqs, dirn, x, 1e-3)
    assert np.allclose(a, b, rtol=0, atol=1e-15)
    ia, xa = py.rk4_first_entry(coef, freqs, dirn, x, [0.5, 0.5], 0.05, 1e-3, 10**5)
    ib, xb = cy.rk4_first_entry(coef, freqs, dirn, x, [0.5, 0.5], 0.05, 1e-3, 10**5)
    assert ia == ib
    assert np.allclose(xa, xb, rtol=0, atol=1e-12)


@pytest.mark.parametrize("v,err,expect", [(5, 1, 0), (200, 1, 1), (99, 2, 2)])
def test_classify(v, err, expect):
    assert kernels.get("python").classify(v, err, 100, 150) == expect
