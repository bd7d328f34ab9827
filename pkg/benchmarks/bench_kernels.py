"""Time the numba-jitted kernels against the pure-numpy fallback.

Run: python3 benchmarks/bench_kernels.py [--pairs N] [--points N]

Both backends are importable side by side, so this compares them within
one process and also asserts their outputs stay bitwise identical.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from boxlab import kernels


def _random_boxes(rng: np.random.Generator, n: int) -> np.ndarray:
    out = np.empty((n, 7))
    out[:, 0:2] = rng.uniform(-30.0, 30.0, (n, 2))
    out[:, 2] = rng.uniform(-1.0, 2.0, n)
    out[:, 3] = rng.uniform(0.5, 5.0, n)
    out[:, 4] = rng.uniform(0.5, 2.5, n)
    out[:, 5] = rng.uniform(0.8, 2.2, n)
    out[:, 6] = rng.uniform(-np.pi, np.pi, n)
    return out


def _bench(label: str, fn, *args, repeats: int = 3):
    fn(*args)  # warm (JIT compile on the numba side)
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    print(f"  {label:<24s} {best * 1e3:10.2f} ms")
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pairs", type=int, default=200, help="boxes per side of the IoU matrix")
    parser.add_argument("--points", type=int, default=200_000, help="point cloud size for plane scoring")
    args = parser.parse_args()

    backends = kernels.available_backends()
    if "numba" not in backends:
        print("numba not installed; benchmarking the numpy backend only")

    rng = np.random.default_rng(42)
    boxes_a = _random_boxes(rng, args.pairs)
    boxes_b = _random_boxes(rng, args.pairs)
    points = rng.uniform(-40.0, 40.0, (args.points, 3))
    planes = np.column_stack(
        [rng.normal(size=(200, 3)), rng.uniform(-1.0, 1.0, 200)]
    )
    planes[:, :3] /= np.linalg.norm(planes[:, :3], axis=1, keepdims=True)

    results = {}
    print(f"iou3d_matrix {args.pairs}x{args.pairs}:")
    for name, backend in backends.items():
        results[name] = backend.iou3d_matrix(boxes_a, boxes_b)
        _bench(name, backend.iou3d_matrix, boxes_a, boxes_b)
    if len(results) == 2:
        assert np.array_equal(results["numpy"], results["numba"]), "backends disagree"
        print("  outputs bitwise identical")

    counts = {}
    print(f"plane_inlier_counts {args.points} pts x 200 planes:")
    for name, backend in backends.items():
        counts[name] = backend.plane_inlier_counts(points, planes, 0.15)
        _bench(name, backend.plane_inlier_counts, points, planes, 0.15)
    if len(counts) == 2:
        assert np.array_equal(counts["numpy"], counts["numba"]), "backends disagree"
        print("  outputs bitwise identical")


if __name__ == "__main__":
    main()
