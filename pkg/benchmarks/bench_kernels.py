"""Time the compiled kernels against the numpy fallback.

Run ``python benchmarks/bench_kernels.py [--repeat R]``.  Each kernel is
first checked for agreement between the two implementations, then timed
with :mod:`timeit` (best of ``R``).
"""

from __future__ import annotations

import argparse
import json
import sys
import timeit

import numpy as np

from sizewinding import _fallback

try:
    from sizewinding import _kernels as _compiled
except ImportError:
    _compiled = None


def _jump_inputs(n: int, trials: int, proposals: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    totals = rng.poisson(proposals, size=trials)
    offsets = np.concatenate([[0], np.cumsum(totals)]).astype(np.int64)
    choices = rng.integers(0, 9 * n * (n - 1) // 2, size=int(offsets[-1]), dtype=np.int64)
    checkpoints = np.stack([totals // 4, totals // 2, totals], axis=1).astype(np.int64)
    return 0, 1 << (n - 1), n, choices, offsets, checkpoints


def cases():
    rng = np.random.default_rng(1)
    n_pauli = 8
    d = 1 << n_pauli
    x = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    n_master = 400
    q0 = np.zeros(n_master + 1)
    q0[1] = 1.0
    return {
        "fwht (256 x 256)": ("fwht", (x,)),
        "pauli_coefficients (n=8)": ("pauli_coefficients", (x, n_pauli)),
        "rk4_integrate (n=400, 4000 steps)": (
            "rk4_integrate",
            (q0, n_master, np.array([4000]), np.array([0.25 / n_master])),
        ),
        "pauli_jump_sizes (n=10, 4096 trials)": ("pauli_jump_sizes", _jump_inputs(10, 4096, 200)),
    }


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--json", default=None, help="write timings to this file")
    args = parser.parse_args(argv)
    if _compiled is None:
        print("compiled extension not available; nothing to compare", file=sys.stderr)
        return 1
    results = {}
    print(f"{'kernel':40s} {'python [s]':>12s} {'compiled [s]':>13s} {'speedup':>8s}")
    for label, (name, inputs) in cases().items():
        py_fn, c_fn = getattr(_fallback, name), getattr(_compiled, name)
        ref, got = py_fn(*inputs), c_fn(*inputs)
        if not np.allclose(ref, got, rtol=1e-12, atol=1e-12):
            print(f"{label}: implementations disagree", file=sys.stderr)
            return 1
        t_py = min(timeit.repeat(lambda: py_fn(*inputs), number=1, repeat=args.repeat))
        t_c = min(timeit.repeat(lambda: c_fn(*inputs), number=1, repeat=args.repeat))
        results[label] = {"python": t_py, "compiled": t_c, "speedup": t_py / t_c}
        print(f"{label:40s} {t_py:12.4f} {t_c:13.4f} {t_py / t_c:8.1f}")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(results, fh, indent=1)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
