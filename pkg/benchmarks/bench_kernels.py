"""Time the numba and numpy kernel paths on identical inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Each kernel is run once untimed (numba compiles on first call), then
``--repeat`` times; the table reports the best wall time per path and checks
that both paths returned identical results.
"""
from __future__ import annotations

import argparse
import json
import time

import numpy as np

from kcsp import csp_core, dictator_test, games, kernels
from kcsp._rng import rng_for


def _cases():
    inst = csp_core.generate_random_instance(12, 3, 3, 40, seed=1)
    packed = inst._packed
    rng = rng_for(7)
    assign = rng.integers(0, 3, size=(20000, inst.n))
    yield "csp_values_batch", (assign, inst.R, *packed)
    yield "csp_values_range", (0, 3**11, inst.n, inst.R, *packed)
    yield "fwht", (rng.standard_normal(1 << 18),)

    n, R, k, trials = 4, 5, 3, 200000
    f = dictator_test.RFunction.random(n, R, 3)
    yield "dictator_accepts", (
        f.table, n, R,
        rng.integers(0, R, size=(trials, n)),
        rng.random((trials, k, n)) < 0.6,
        rng.integers(0, R, size=(trials, k, n)),
        rng.integers(0, R, size=(trials, k)),
    )

    game = games.generate_unique_game(4, 4, 4, 8, seed=2)
    proof = games.Proof.random(game.W, game.N, 3, seed=4)
    folded = np.stack([games.folded_table(proof, w) for w in range(game.W)])
    inv = games._inverse_maps(game)
    inc = np.array(game.incident())
    v = rng.integers(0, game.V, size=trials)
    picks = inc[v[:, None], rng.integers(0, inc.shape[1], size=(trials, 2))]
    yield "verifier_accepts", (
        folded, game.N, 3, game.edge_w, inv, picks,
        rng.integers(0, 3, size=(trials, game.N)),
        rng.random((trials, 2, game.N)) < 0.6,
        rng.integers(0, 3, size=(trials, 2, game.N)),
    )


def _best(fn, args, repeat):
    out = fn(*args)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", default=None)
    args = ap.parse_args(argv)
    if kernels.numba_impl is None:
        raise SystemExit("numba is not installed; nothing to compare")
    rows = []
    print(f"{'kernel':<20}{'numpy s':>12}{'numba s':>12}{'speedup':>10}  same")
    for name, case in _cases():
        t_np, r_np = _best(kernels.numpy_impl[name], case, args.repeat)
        t_nb, r_nb = _best(kernels.numba_impl[name], case, args.repeat)
        same = bool(np.array_equal(r_np, r_nb))
        rows.append({"kernel": name, "numpy_s": t_np, "numba_s": t_nb, "speedup": t_np / t_nb, "identical": same})
        print(f"{name:<20}{t_np:>12.5f}{t_nb:>12.5f}{t_np / t_nb:>10.1f}  {same}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
