"""Time the hot paths with numba on and off.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each mode runs in its own interpreter because TRIONLAMBDA_NUMBA is read at
import. Compile time is excluded by a warm-up call.
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from trionlambda._accel import NUMBA_ENABLED
from trionlambda.correlations import g2
from trionlambda.sweeps import sweep
from trionlambda.trion import TWO_PI, TrionParams

repeat = int(sys.argv[1])
p = TrionParams(omega1_rabi=TWO_PI * 0.08, omega2_rabi=TWO_PI * 3.2)
grid = [("delta2", TWO_PI * np.linspace(-400, 400, 1601))]
q = TrionParams(omega1_rabi=TWO_PI * 1.5)
taus = np.linspace(0, 10, 2001)

cases = {
    "sweep_1601": lambda: sweep(p, grid),
    "g2_2001": lambda: g2(q, "fundamental", "fundamental", taus),
}
out = {"numba": NUMBA_ENABLED}
for name, fn in cases.items():
    fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    out[name] = best
print(json.dumps(out))
"""


def run(flag, repeat):
    env = dict(os.environ, TRIONLAMBDA_NUMBA=flag)
    res = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    fast, slow = run("1", args.repeat), run("0", args.repeat)
    if not fast["numba"]:
        print("numba unavailable; both runs used the numpy path")
    print(f"{'case':<12}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for key in ("sweep_1601", "g2_2001"):
        print(f"{key:<12}{fast[key]:>12.4f}{slow[key]:>12.4f}{slow[key] / fast[key]:>9.1f}x")


if __name__ == "__main__":
    main()
