"""Compare the numpy and numba intervention kernels.

    python benchmarks/bench_kernels.py [--vars 7] [--range 3] [--models 20] [--specs 40]

Both backends are called directly on the same packed inputs, so the choice
made by RCT_NUMBA does not matter here.  Masks are checked for equality
before timing.
"""

from __future__ import annotations

import argparse
import random
import time

import numpy as np

from rcteams import _kernels
from rcteams.enumeration import ModelClass, sample_models
from rcteams.model import Signature


def kernel_args(model, xcols, xvals):
    sig = model.signature
    p = model.packed
    active = np.array([law.var not in xcols for law in model.laws], dtype=np.bool_)
    nondesc = sorted(set(range(sig.n_vars)) - model.descendant_indices(xcols))
    return (
        sig.table, p.var, p.card, p.par, p.npar, p.stride, p.off, p.rel, active,
        np.array(xcols, dtype=np.int64), np.array(xvals, dtype=np.int64),
        np.array(nondesc, dtype=np.int64), np.array([sig.sizes[i] for i in nondesc], dtype=np.int64),
        model.team_indices,
    )


def workload(sig, n_models, n_specs, seed):
    rng = random.Random(seed)
    jobs = []
    for model in sample_models(sig, n_models, ModelClass.parse("recursive"), seed=seed, include_empty=False):
        for _ in range(n_specs):
            cols = tuple(sorted(rng.sample(range(sig.n_vars), rng.randint(1, 2))))
            vals = tuple(rng.randrange(sig.sizes[c]) for c in cols)
            jobs.append(kernel_args(model, cols, vals))
    return jobs


def run(fn, jobs, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        for args in jobs:
            fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--vars", type=int, default=7)
    ap.add_argument("--range", type=int, default=3)
    ap.add_argument("--models", type=int, default=20)
    ap.add_argument("--specs", type=int, default=40)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    sig = Signature.uniform(args.vars, args.range)
    jobs = workload(sig, args.models, args.specs, args.seed)
    print(f"signature {args.vars} x {args.range}: {sig.n_assignments} assignments, {len(jobs)} kernel calls")
    if not _kernels.HAVE_NUMBA:
        print("numba not importable; numpy only")
    for a in jobs:
        if _kernels.HAVE_NUMBA and not np.array_equal(_kernels.np_intervened_mask(*a), _kernels.nb_intervened_mask(*a)):
            raise SystemExit("backends disagree")

    t_np = run(_kernels.np_intervened_mask, jobs, args.repeat)
    print(f"numpy  {t_np * 1e3:9.1f} ms  ({t_np / len(jobs) * 1e6:.1f} us/call)")
    if _kernels.HAVE_NUMBA:
        t_nb = run(_kernels.nb_intervened_mask, jobs, args.repeat)  # compiled during the equality check
        print(f"numba  {t_nb * 1e3:9.1f} ms  ({t_nb / len(jobs) * 1e6:.1f} us/call)  speedup {t_np / t_nb:.1f}x")


if __name__ == "__main__":
    main()
