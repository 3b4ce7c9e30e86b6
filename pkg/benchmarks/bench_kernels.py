"""Compare the compiled and pure-Python search kernels.

    python3 benchmarks/bench_kernels.py [--p 3] [--k 1] [--repeat 3]

Each row times one question over the canonical pairs (plus the
infinity-line pairs) on both backends and checks that the verdicts agree.
"""

import argparse
import statistics
import time

from hallplanes import configs, hall_plane, kernels

QUESTIONS = ("3p3", "3p2", "3p1", "3p0", "2p0", "count")


def timed(fn, repeat):
    runs = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        runs.append(time.perf_counter() - t0)
    return statistics.median(runs), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--k", type=int, default=1)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--questions", nargs="+", choices=QUESTIONS, default=list(QUESTIONS))
    args = ap.parse_args(argv)

    backends = kernels.available()
    plane = hall_plane(args.p, args.k)
    pairs = configs.select_pairs(plane, "canonical+infinity")
    print(f"Hall plane of order {plane.n}, {len(pairs)} pairs, backends {backends}")
    print(f"{'question':<9}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}  agree")
    for q in args.questions:
        times, verdicts = {}, {}
        for b in backends:
            t, vs = timed(lambda: configs.run_question(plane, q, pairs, backend=b), args.repeat)
            times[b] = t
            verdicts[b] = [_strip(v.to_dict()) for v in vs]
        agree = all(verdicts[b] == verdicts[backends[0]] for b in backends)
        speedup = times["python"] / times["cython"] if "cython" in times and times["cython"] > 0 else float("nan")
        print(f"{q:<9}" + "".join(f"{times[b]:>11.3f}s" for b in backends) + f"{speedup:>9.1f}x  {agree}")


def _strip(d):
    d.pop("elapsed", None)
    return d


if __name__ == "__main__":
    main()
