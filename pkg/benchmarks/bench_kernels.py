"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 3] [--n 2000]

Each kernel is run on identical inputs through both backends; outputs are
checked for equality before timings are reported.
"""

import argparse
import time

import numpy as np

from aitest import _fallback

try:
    from aitest import _core
except ImportError:
    _core = None


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _cases(n, rng):
    """(name, description, backend -> zero-argument call) for each kernel."""
    q = 3
    X = np.ascontiguousarray(rng.normal(size=(n, q)))
    y = X[:, 0] ** 2 + rng.normal(size=n)
    rows = np.sort(rng.integers(0, n, n)).astype(np.int64)

    # a 20-tree forest packed back to back, grown once and fed to both backends
    trees = [_fallback.build_tree(X, y, np.sort(rng.integers(0, n, n)).astype(np.int64), 2, 5, -1, s)
             for s in range(20)]
    sizes = np.array([len(t[0]) for t in trees])
    offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(np.int64)
    packed = [np.ascontiguousarray(np.concatenate([t[i] for t in trees])) for i in range(5)]

    m = min(n, 500)
    K = rng.normal(size=(m, m))
    K = np.ascontiguousarray(K + K.T)
    L = np.ascontiguousarray(K.T @ K / m)
    perms = np.array([rng.permutation(m) for _ in range(100)], dtype=np.int64)
    return [
        ("build_tree", f"n={n}, q={q}",
         lambda mod: lambda: mod.build_tree(X, y, rows, 2, 5, -1, 12345)),
        ("predict_trees", f"20 trees, n={n}",
         lambda mod: lambda: mod.predict_trees(X, *packed, offsets)),
        ("permuted_hsic_sums", f"n={m}, 100 permutations",
         lambda mod: lambda: mod.permuted_hsic_sums(K, L, perms)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--n", type=int, default=2000)
    args = ap.parse_args()
    if _core is None:
        raise SystemExit("compiled extension not built; run `pip install --no-build-isolation -e .`")

    print(f"{'kernel':<20} {'input':<24} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for name, desc, call in _cases(args.n, np.random.default_rng(0)):
        t_py, out_py = _best(call(_fallback), args.repeat)
        t_cy, out_cy = _best(call(_core), args.repeat)
        for a, b in zip(out_py if isinstance(out_py, tuple) else (out_py,),
                        out_cy if isinstance(out_cy, tuple) else (out_cy,)):
            np.testing.assert_allclose(a, b, rtol=1e-10)
        print(f"{name:<20} {desc:<24} {t_py:>10.4f} {t_cy:>10.4f} {t_py / t_cy:>7.1f}x")


if __name__ == "__main__":
    main()
