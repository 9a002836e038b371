"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--n 1000] [--repeat 3]

Times the raw forbidden-offset kernel on snapshots recorded from a
pseudo-random run, then a full engine run with each backend swapped in.
"""

import argparse
import time

from cfs import _core
from cfs.engine import run, snapshot_for
from cfs.resolver import DEFAULT_SAMPLES, intruder_row, mover_tuple
from cfs.scenario import ScenarioSpec


def use(backend):
    _core.forbidden_raw = backend.forbidden_raw
    _core.conflicting_rows = backend.conflicting_rows
    _core.BACKEND = backend.BACKEND


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1000, help="aircraft per flow")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = _core.available_backends()
    if "compiled" not in backends:
        print("compiled kernel not built; run `pip install -e . --no-build-isolation`")
    spec = ScenarioSpec(kind="pseudo_random", L0=10.0, n_aircraft=args.n, seed=1)
    trace = run(spec)
    cases = []
    for k in range(0, len(trace.records), max(1, len(trace.records) // 400)):
        mover, intruders = snapshot_for(trace, k)
        cases.append((mover_tuple(mover),
                      [intruder_row(i, spec.area, spec.horizon) for i in intruders]))
    c = spec.area.center

    def kernel_pass(backend):
        for mv, rows in cases:
            backend.forbidden_raw(mv, rows, spec.sep, c.x, c.y, spec.area.radius, True,
                                  DEFAULT_SAMPLES)

    results = {}
    for name, backend in backends.items():
        k = best_of(lambda: kernel_pass(backend), args.repeat)
        use(backend)
        e = best_of(lambda: run(spec), args.repeat)
        results[name] = (k, e)
    print(f"{len(cases)} snapshots (mean {sum(len(r) for _, r in cases) / len(cases):.1f} "
          f"intruders); engine run of {args.n} aircraft per flow")
    print(f"{'backend':>10} {'kernel s':>10} {'engine s':>10}")
    for name, (k, e) in results.items():
        print(f"{name:>10} {k:10.4f} {e:10.4f}")
    if len(results) == 2:
        (kp, ep), (kc, ec) = results["python"], results["compiled"]
        print(f"{'speedup':>10} {kp / kc:9.1f}x {ep / ec:9.1f}x")


if __name__ == "__main__":
    main()
