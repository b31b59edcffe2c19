"""Time the compiled integer kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Both backends are called directly so the environment switch is not needed.
Each row reports the median over the repeats and checks the two results agree.
"""
import argparse
import random
import statistics
import sys
import time

from capkernel.fixtures import BuildOptions, build_covering, bundled_fixture, parse_file
from capkernel.kernels import _pure

try:
    from capkernel.kernels import _ckernels
except ImportError:
    _ckernels = None


def median_time(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), out


def matrices(seed, count, size, bound):
    rng = random.Random(seed)
    return [[[rng.randint(-bound, bound) for _ in range(size)] for _ in range(size)]
            for _ in range(count)]


def batch(fn, mats, ncols):
    def run():
        out = []
        for M in mats:
            try:
                out.append(fn([r[:] for r in M], ncols))
            except OverflowError:
                out.append(None)
        return out
    return run


def cases():
    small = matrices(1, 200, 4, 20)
    medium = matrices(2, 40, 6, 9)
    fb = build_covering(parse_file(bundled_fixture("fixture_b")), BuildOptions())
    regrep = fb.F.regrep
    yield "hnf 200 x (4x4)", lambda k: batch(k.hnf, small, 4)
    yield "snf 200 x (4x4)", lambda k: batch(k.snf, small, 4)
    yield "snf 40 x (6x6)", lambda k: batch(k.snf, medium, 6)
    yield "smooth norms, Q(sqrt-23), H=40", \
        lambda k: (lambda: k.smooth_norms_in_box(regrep, 40, [2, 3, 5, 7]))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels are not built; run pip install --no-build-isolation -e .")
        return 1
    print(f"{'case':34} {'pure':>10} {'compiled':>10} {'speedup':>8}  agree")
    for label, make in cases():
        tp, rp = median_time(make(_pure), args.repeat)
        tc, rc = median_time(make(_ckernels), args.repeat)
        if isinstance(rc, list):
            # compiled overflow entries are None; compare only where it finished
            agree = all(c is None or c == p for c, p in zip(rc, rp))
        else:
            agree = rc == rp
        print(f"{label:34} {tp * 1e3:8.2f}ms {tc * 1e3:8.2f}ms {tp / tc:7.1f}x  {agree}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
