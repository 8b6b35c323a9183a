#!/usr/bin/env python3
"""Benchmark the compiled amplitude kernels against the pure-Python fallback.

Measures the waveform hot loop (per-frame amplitude evaluation) and the
scalar falloff.  Run after building the extension:

    python benchmarks/bench_kernels.py [--frames 200000]
"""

from __future__ import annotations

import argparse
import time

from tactorbelt._kernels import _pure

try:
    from tactorbelt._kernels import _native
except ImportError:
    _native = None

ANGLES = (30.0, 90.0, 150.0, 210.0, 270.0, 330.0)
SPAN = 60.0
DECAY = 15.0


def bench_render(mod, sources, repeats: int = 3) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        mod.render_frames(sources, ANGLES, SPAN, DECAY)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_scalar(mod, n: int, repeats: int = 3) -> float:
    best = float("inf")
    fn = mod.falloff_value
    for _ in range(repeats):
        t0 = time.perf_counter()
        for k in range(n):
            fn(k * 0.01, 90.0, SPAN, DECAY)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--frames", type=int, default=200_000)
    args = parser.parse_args()

    sources = [(k * 0.009) % 360.0 for k in range(args.frames)]
    backends = [("pure", _pure)]
    if _native is not None:
        backends.append(("native", _native))
    else:
        print("native kernel not built; benchmarking pure only")

    print(f"render_frames: {args.frames} frames x {len(ANGLES)} tactors")
    results = {}
    for name, mod in backends:
        dt = bench_render(mod, sources)
        results[name] = dt
        rate = args.frames / dt
        print(f"  {name:>6}: {dt * 1000:8.2f} ms  ({rate / 1e6:.2f} M frames/s)")
    if len(results) == 2:
        print(f"  speedup: {results['pure'] / results['native']:.1f}x")

    n = args.frames
    print(f"falloff_value: {n} scalar calls")
    scalar = {}
    for name, mod in backends:
        dt = bench_scalar(mod, n)
        scalar[name] = dt
        print(f"  {name:>6}: {dt * 1000:8.2f} ms  ({n / dt / 1e6:.2f} M calls/s)")
    if len(scalar) == 2:
        print(f"  speedup: {scalar['pure'] / scalar['native']:.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
