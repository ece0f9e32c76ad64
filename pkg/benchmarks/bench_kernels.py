"""Compare the compiled and pure-Python RK4 kernels.

    python benchmarks/bench_kernels.py [--horizon 200] [--repeat 3]

Runs the constant-C1 convergence case (n = 4, max_step 1e-3) and a random
n = 5 doubly stochastic schedule through both backends and checks that the
final states agree bitwise.
"""
import argparse
import time

import numpy as np

from selfappraisal import _kernels
from selfappraisal.integrator import IntegratorConfig, integrate
from selfappraisal.scenarios import C1, doubly_stochastic_scenario
from selfappraisal.switching import SwitchingSchedule


def timed(kernel, schedule, x0, cfg, repeat):
    saved = _kernels.rk4_segment
    _kernels.rk4_segment = kernel
    try:
        best = np.inf
        for _ in range(repeat):
            start = time.perf_counter()
            traj = integrate(schedule, x0, cfg)
            best = min(best, time.perf_counter() - start)
    finally:
        _kernels.rk4_segment = saved
    return best, traj.states[-1]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--horizon", type=float, default=200.0)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    if _kernels.BACKEND != "cython":
        print("compiled kernel unavailable; only the Python fallback can be timed")
    cases = {
        "C1 constant, n=4": (SwitchingSchedule.constant(C1, 0.4), (0.4, 0.3, 0.2, 0.1)),
    }
    s = doubly_stochastic_scenario(n=5, period_len=3, seed=1)
    cases["random doubly stochastic, n=5"] = (s.schedule, s.x0)
    cfg = IntegratorConfig(horizon=args.horizon)

    print(f"{'case':32s} {'backend':>8s} {'seconds':>9s} {'steps/s':>12s}")
    for name, (schedule, x0) in cases.items():
        steps = sum(
            max(1, round((end - start) / cfg.max_step))
            for _, start, end, _ in schedule.iter_segments(cfg.horizon)
        )
        finals = {}
        backends = {"python": _kernels.python_rk4_segment}
        if _kernels.BACKEND == "cython":
            backends["cython"] = _kernels.rk4_segment
        for label, kernel in backends.items():
            secs, finals[label] = timed(kernel, schedule, x0, cfg, args.repeat)
            print(f"{name:32s} {label:>8s} {secs:9.4f} {steps / secs:12.3e}")
        if len(finals) == 2:
            same = np.array_equal(finals["python"], finals["cython"])
            print(f"{'':32s} final states identical: {same}")


if __name__ == "__main__":
    main()
