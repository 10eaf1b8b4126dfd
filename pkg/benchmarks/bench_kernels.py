"""Time the hot loops with numba and with the pure-numpy fallback.

Each path runs in its own interpreter because the switch is read at import:

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json, sys, time
from slidingheat import _jit
from slidingheat.disturbance import DisturbanceSpec
from slidingheat.heat_sim import SimConfig, simulate
from slidingheat.reduced_ode import simulate_smc_reduced, simulate_st_reduced

repeat = int(sys.argv[1])
d = DisturbanceSpec.sinusoid(2.0, 1.0)
b = -1.01146636562
cases = {
    "pde smc, 11 nodes, 3e4 steps": lambda: simulate(SimConfig(law="smc")),
    "pde st, 41 nodes, 1.2e5 steps": lambda: simulate(SimConfig(law="st", nx=41, dt=2.5e-5)),
    "pde smc implicit scheme, 51 nodes, 1e4 steps":
        lambda: simulate(SimConfig(nx=51, scheme="implicit", horizon=1.0)),
    "reduced smc, 3e5 steps": lambda: simulate_smc_reduced(-1.0, 2.5, b, d, dt=1e-5, horizon=3.0),
    "reduced st, 5e5 steps": lambda: simulate_st_reduced(1.0, 0.0, 2.2, 2.5, b, d, dt=1e-5),
}
start = time.perf_counter()
for f in cases.values():
    f()
out = {"numba": _jit.USE_NUMBA, "warmup": time.perf_counter() - start, "cases": {}}
for name, f in cases.items():
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        f()
        best = min(best, time.perf_counter() - t0)
    out["cases"][name] = best
print(json.dumps(out))
"""


def run(disable: bool, repeat: int) -> dict:
    env = os.environ.copy()
    env.pop("SLIDINGHEAT_DISABLE_NUMBA", None)
    if disable:
        env["SLIDINGHEAT_DISABLE_NUMBA"] = "1"
    proc = subprocess.run([sys.executable, "-c", WORKLOAD, str(repeat)], env=env,
                          capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    fast, slow = run(False, args.repeat), run(True, args.repeat)
    print(f"warm-up (first call incl. compile/cache load): numba {fast['warmup']:.2f} s, "
          f"numpy {slow['warmup']:.2f} s")
    print(f"{'case':46s} {'numba [s]':>11s} {'numpy [s]':>11s} {'speedup':>9s}")
    for name, t_fast in fast["cases"].items():
        t_slow = slow["cases"][name]
        print(f"{name:46s} {t_fast:11.4f} {t_slow:11.4f} {t_slow / t_fast:8.1f}x")


if __name__ == "__main__":
    main()
