#!/usr/bin/env python3
"""Timing comparison of the compiled kernels against the numpy fallback.

Runs each hot kernel on a representative workload from the 16-state-code /
16-state-channel configuration and prints per-kernel throughput for every
available backend.  Decisions are also cross-checked while we are at it.

Usage: python benchmarks/bench_kernels.py [--steps N] [--repeats R]
"""

import argparse
import time

import numpy as np

from mdlink import _backend
from mdlink.channel import add_awgn, convolve, example_channel
from mdlink.convcode import parse_generators
from mdlink.detect import (
    RssePartition,
    bcjr_equalize,
    dfse_equalize,
    md_rsse_decode,
    viterbi_mlse,
)
from mdlink.modem import noise_sigma
from mdlink.oracles import reference_waveform
from mdlink.trellis import (
    build_channel_trellis,
    build_matched_trellis,
    build_super_trellis,
)


def make_workload(steps: int, seed: int = 1):
    gen = parse_generators(["23", "04"])
    taps = example_channel(2)
    rng = np.random.default_rng(seed)
    info = rng.integers(0, 2, steps, dtype=np.uint8)
    wave = reference_waveform(gen, taps, "natural", 4, info)
    sigma = noise_sigma(8.0, 5.0, 1)
    obs = add_awgn(wave, sigma, rng)
    return gen, taps, obs, sigma


def bench(fn, repeats: int) -> tuple[float, object]:
    fn()  # warm-up (and first-call table builds)
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=20_000)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    gen, taps, obs, sigma = make_workload(args.steps)
    matched = build_matched_trellis(gen, taps)
    super_t = build_super_trellis(gen, taps)
    channel_t = build_channel_trellis(taps, 4)

    cases = {
        "viterbi matched (64 st)": lambda: viterbi_mlse(matched, obs, terminated=False),
        "viterbi super (256 st)": lambda: viterbi_mlse(super_t, obs, terminated=False),
        "rsse r=2 (4 st)": lambda: md_rsse_decode(
            matched, RssePartition(2), obs, terminated=False
        ),
        "dfse q=1 (4 st)": lambda: dfse_equalize(taps, 4, 1, obs),
        "bcjr (16 st)": lambda: bcjr_equalize(channel_t, obs, sigma),
    }

    backends = _backend.available_backends()
    print(f"steps per call: {args.steps}, best of {args.repeats}")
    header = f"{'kernel':<26}" + "".join(f"{b:>14}" for b in backends)
    if len(backends) > 1:
        header += f"{'speedup':>10}"
    print(header)
    saved = _backend.get_backend()
    try:
        for name, fn in cases.items():
            times = {}
            outputs = {}
            for b in backends:
                _backend.set_backend(b)
                times[b], outputs[b] = bench(fn, args.repeats)
            row = f"{name:<26}" + "".join(
                f"{args.steps / times[b] / 1e6:>11.2f} M/s" for b in backends
            )
            if len(backends) > 1:
                row += f"{times['python'] / times['cython']:>9.1f}x"
                a, b = outputs["python"], outputs["cython"]
                if not np.allclose(np.asarray(a, float), np.asarray(b, float), atol=1e-9):
                    row += "  MISMATCH"
            print(row)
    finally:
        _backend.set_backend(saved)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
