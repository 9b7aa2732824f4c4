"""Time the compiled kernel lane against the numpy fallback.

Both lanes are imported directly, so no environment tricks are needed; the
HASHINFER_PURE_PYTHON switch only matters for the installed package. Each
kernel runs on the same frozen inputs in both lanes and the outputs are
cross-checked before timing, so a reported speedup is a speedup on
identical work.
"""

import argparse
import time

import numpy as np

from hashinfer.kernels import _purepy

try:
    from hashinfer.kernels import _fastpath
except ImportError:
    _fastpath = None


def _time(fn, args, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def _bench(name, args, check, repeats):
    pure_fn = getattr(_purepy, name)
    if _fastpath is None:
        print(f"{name:24s} compiled lane unavailable, pure only: "
              f"{_time(pure_fn, args, repeats) * 1e3:8.2f} ms")
        return
    fast_fn = getattr(_fastpath, name)
    check(pure_fn(*args), fast_fn(*args))
    tp = _time(pure_fn, args, repeats)
    tf = _time(fast_fn, args, repeats)
    print(f"{name:24s} pure {tp * 1e3:8.2f} ms   compiled {tf * 1e3:8.2f} ms"
          f"   speedup {tp / tf:5.1f}x")


def _check_eigh(p, f):
    dp, vp, _, _ = p
    df, vf, _, _ = f
    np.testing.assert_allclose(np.sort(dp), np.sort(df), rtol=1e-8, atol=1e-10)
    # eigenvectors may differ by sign and ordering; compare the spectral
    # reconstructions instead
    np.testing.assert_allclose(vp @ np.diag(dp) @ vp.T,
                               vf @ np.diag(df) @ vf.T, rtol=1e-8, atol=1e-8)


def _check_scan(p, f):
    np.testing.assert_allclose(p[1], f[1], rtol=1e-12)
    np.testing.assert_array_equal(p[0], f[0])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--repeats", type=int, default=5, help="best-of timing repeats")
    ap.add_argument("--eig-n", type=int, default=200, help="Jacobi matrix size")
    ap.add_argument("--ham-n", type=int, default=2000, help="codes per side")
    ap.add_argument("--ham-bits", type=int, default=128)
    ap.add_argument("--scan-n", type=int, default=20, help="brute force bits")
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)

    m = rng.standard_normal((args.eig_n, args.eig_n))
    sym = (m + m.T) / 2
    _bench("jacobi_eigh", (sym, 1e-10, 100), _check_eigh, args.repeats)

    words = (args.ham_bits + 63) // 64
    packed = rng.integers(0, 2**63, size=(args.ham_n, words), dtype=np.int64)
    packed = packed.astype(np.uint64)
    _bench("hamming_distance_matrix", (packed, packed),
           np.testing.assert_array_equal, args.repeats)

    m = rng.standard_normal((args.scan_n, args.scan_n))
    _bench("brute_force_scan", ((m + m.T) / 2,), _check_scan, args.repeats)


if __name__ == "__main__":
    main()
