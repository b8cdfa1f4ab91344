"""Compare the compiled and pure-Python kernels.

Runs each checker kernel on a fixed batch of placements, then times two
end-to-end workloads (oracle search and ILP solving) with each backend
swapped in.  Usage: python benchmarks/bench_kernels.py [--repeat N] [--seed S]
"""

import argparse
import contextlib
import random
import time

import numpy as np

from roomdiv import fpt, generators, kernels, oracle
from roomdiv.model import Outcome, placement

KERNELS = ("first_blocking", "first_exchange", "first_envy", "propagate")


@contextlib.contextmanager
def use_backend(mod):
    saved = {name: getattr(kernels, name) for name in KERNELS}
    for name in KERNELS:
        setattr(kernels, name, getattr(mod, name))
    try:
        yield
    finally:
        for name, fn in saved.items():
            setattr(kernels, name, fn)


def checker_batch(seed, size):
    rng = random.Random(seed)
    batch = []
    while len(batch) < size:
        s = rng.randint(3, 6)
        inst = generators.random_instance(s, rng.randint(4, 8), "unrestricted", rng.randint(0, 4 * s), rng.randrange(10**9))
        ids = [a.id for a in inst.agents]
        rng.shuffle(ids)
        pl = placement(inst, Outcome(tuple(tuple(ids[i:i + s]) for i in range(0, len(ids), s))))
        dim = np.zeros(inst.n, dtype=np.int32)
        batch.append((inst, pl, pl.theta[pl.room].astype(np.int32), dim))
    return batch


def time_checkers(mod, batch, repeat):
    t = time.perf_counter()
    for _ in range(repeat):
        for inst, pl, cur, dim in batch:
            for strong in (0, 1):
                mod.first_blocking(inst.color_array, inst.rank_array, cur, inst.s, strong)
                mod.first_exchange(inst.color_array, inst.rank_array, pl.room, pl.theta, dim, 0, strong)
            mod.first_envy(inst.color_array, inst.rank_array, pl.room, pl.theta, 0)
    return time.perf_counter() - t


def corpus(seed, size):
    rng = random.Random(seed)
    return [generators.random_instance(3, 3, rng.choice(generators.PREF_CLASSES), rng.randint(0, 9), rng.randrange(10**9))
            for _ in range(size)]


def time_oracle(mod, instances):
    with use_backend(mod):
        t = time.perf_counter()
        for inst in instances:
            oracle.oracle_exists(inst, "exchange")
        return time.perf_counter() - t


def time_ilp(mod, instances):
    with use_backend(mod):
        t = time.perf_counter()
        for inst in instances:
            fpt.solve_existence(inst, "strong-core")
        return time.perf_counter() - t


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    found = kernels.backends()
    if "cython" not in found:
        print("compiled extension not built; only the Python backend is available")
    batch = checker_batch(args.seed, 200)
    instances = corpus(args.seed, 40)
    rows = []
    for name, mod in found.items():
        rows.append((name, time_checkers(mod, batch, args.repeat), time_oracle(mod, instances), time_ilp(mod, instances)))

    print(f"{'backend':<8} {'checkers':>10} {'oracle':>10} {'ilp':>10}")
    for name, *secs in rows:
        print(f"{name:<8} " + " ".join(f"{x:>9.3f}s" for x in secs))
    if len(rows) == 2:
        speed = [p / c for p, c in zip(rows[0][1:], rows[1][1:])]
        print(f"{'speedup':<8} " + " ".join(f"{x:>9.1f}x" for x in speed))


if __name__ == "__main__":
    main()
