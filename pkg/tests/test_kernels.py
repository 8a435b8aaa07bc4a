"""The numba kernels and the plain-numpy fallback must agree.

The flag is read at import time, so the fallback runs in a subprocess.
"""
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from trionlambda import kernels
from trionlambda._accel import NUMBA_ENABLED

SCRIPT = r"""
import json, numpy as np
from trionlambda import kernels
from trionlambda._accel import NUMBA_ENABLED
from trionlambda.trion import TrionParams, liouvillian, TWO_PI
from trionlambda.lindblad import vec

rng = np.random.default_rng(0)
a = rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9)) + 4 * np.eye(9)
b = rng.normal(size=9) + 1j * rng.normal(size=9)
x, ok = kernels.gauss_solve(a, b, 1e-14)
lm = liouvillian(TrionParams(omega1_rabi=TWO_PI, omega2_rabi=TWO_PI * 2, delta1=1.0)).matrix
y0 = vec(np.diag([1.0, 0, 0]).astype(complex))
t = np.linspace(0, 2, 21)
proj = np.ascontiguousarray(np.eye(9, dtype=complex)[[0, 4, 8]])
out, status, _ = kernels.dopri5_linear(lm, y0, t, proj, 1e-10, 1e-12, 1e-3, 10**6)
print(json.dumps({"numba": NUMBA_ENABLED, "ok": bool(ok), "status": int(status),
                  "x": [[v.real, v.imag] for v in x],
                  "out": [[v.real, v.imag] for v in out.ravel()]}))
"""


def run_with_flag(flag):
    env = dict(os.environ, TRIONLAMBDA_NUMBA=flag)
    res = subprocess.run([sys.executable, "-c", SCRIPT], env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


@pytest.mark.skipif(not NUMBA_ENABLED, reason="numba not available")
def test_numba_and_fallback_agree():
    fast, slow = run_with_flag("1"), run_with_flag("0")
    assert fast["numba"] is True and slow["numba"] is False
    assert fast["ok"] and slow["ok"]
    assert fast["status"] == slow["status"] == kernels.STEP_OK
    np.testing.assert_allclose(fast["x"], slow["x"], rtol=0, atol=1e-12)
    np.testing.assert_allclose(fast["out"], slow["out"], rtol=0, atol=1e-12)


def test_gauss_solve_reports_singular():
    a = np.zeros((2, 2), dtype=complex)
    _, ok = kernels.gauss_solve(a, np.ones(2, dtype=complex), 0.0)
    assert not ok


def test_batch_matches_single():
    rng = np.random.default_rng(1)
    a = rng.normal(size=(5, 4, 4)) + 1j * rng.normal(size=(5, 4, 4)) + 3 * np.eye(4)
    b = rng.normal(size=(5, 4)) + 0j
    xb, ok = kernels.gauss_solve_batch(a, b, np.full(5, 1e-14))
    assert ok.all()
    for i in range(5):
        xi, _ = kernels.gauss_solve(a[i], b[i], 1e-14)
        np.testing.assert_array_equal(xb[i], xi)


def test_dopri5_scalar_exponential():
    lm = np.array([[-1.0 + 2.0j]])
    t = np.linspace(0, 3, 7)
    out, status, t_end = kernels.dopri5_linear(lm, np.ones(1, complex), t, np.eye(1, dtype=complex), 1e-12, 1e-14, 1e-3, 10**6)
    assert status == kernels.STEP_OK and t_end == 3.0
    np.testing.assert_allclose(out[:, 0], np.exp((-1 + 2j) * t), atol=1e-10)


def test_dopri5_budget_status():
    lm = np.array([[-1.0 + 50.0j]])
    _, status, t_end = kernels.dopri5_linear(
        lm, np.ones(1, complex), np.array([10.0]), np.eye(1, dtype=complex), 1e-12, 1e-14, 1e-3, 3
    )
    assert status == kernels.STEP_BUDGET and 0 < t_end < 10
