"""Command-line front end: BER sweeps, state-count reports, self-checks."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import detect, oracles, sim
from ._backend import available_backends, get_backend
from .channel import convolve, parse_channel
from .convcode import encode_block, parse_generators
from .trellis import (
    build_channel_trellis,
    build_code_trellis,
    build_matched_trellis,
    build_super_trellis,
    complexity_report,
)


def _parse_grid(text: str) -> tuple[float, ...]:
    """``start:step:stop`` (inclusive) or a comma-separated list of dB values."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid must be start:step:stop, got {text!r}")
        start, step, stop = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("grid step must be > 0")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        if count < 1:
            raise ValueError(f"empty grid {text!r}")
        return tuple(start + i * step for i in range(count))
    return tuple(float(p) for p in text.split(",") if p.strip())


def _parse_generators_arg(text: str) -> tuple[str, ...] | None:
    if text.strip().lower() == "uncoded":
        return None
    return tuple(tok.strip() for tok in text.split(",") if tok.strip())


def _cmd_complexity(args) -> int:
    generators = _parse_generators_arg(args.gen)
    if generators is None:
        raise ValueError("complexity report requires a code; got 'uncoded'")
    gen = parse_generators(list(generators))
    taps = parse_channel(args.channel)
    rep = complexity_report(gen, taps, args.M)
    cols = ("nu", "L", "M", "Z_sep", "Z_STD", "Z_MD", "gain")
    vals = (
        rep.nu,
        rep.memory,
        rep.m,
        rep.z_separate,
        rep.z_std,
        rep.z_md,
        rep.gain_md,
    )
    width = max(len(c) for c in cols) + 2
    print("".join(c.rjust(width) for c in cols))
    print("".join(str(v).rjust(width) for v in vals))
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(",".join(cols) + "\n")
            fh.write(",".join(str(v) for v in vals) + "\n")
        print(f"wrote {args.csv}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = sim.SimConfig(
        generators=_parse_generators_arg(args.gen),
        channel=args.channel,
        receiver=args.receiver,
        ebn0_grid=_parse_grid(args.ebn0),
        labeling=args.labeling,
        m=args.M,
        block_len=args.block_len,
        min_errors=args.min_errors,
        max_bits=int(args.max_bits),
        base_seed=args.seed,
        force_sigma=args.force_sigma,
    )
    cfg.validate()
    result = sim.run_sweep(cfg, jobs=args.jobs)
    for rec in result.records:
        print(
            f"{rec.ebn0_db:6.2f} dB  {rec.receiver:>14s}  states={rec.receiver_states:<6d}"
            f" bits={rec.info_bits:<10d} errors={rec.bit_errors:<8d} ber={rec.ber:.4e}"
        )
    if args.target_ber is not None:
        snr = sim.required_snr_at_ber(result, args.target_ber)
        print(f"required Eb/N0 for BER {args.target_ber:g}: {snr:.3f} dB")
    if args.out:
        sim.emit_csv(result, args.out)
        print(f"wrote {args.out}")
    return 0


def _check(name: str, ok: bool, failures: list[str]) -> None:
    print(f"  [{'ok' if ok else 'FAIL'}] {name}")
    if not ok:
        failures.append(name)


def _cmd_verify(args) -> int:
    """Cross-check the trellis searches against exhaustive enumeration."""
    rng = np.random.default_rng(args.seed)
    failures: list[str] = []
    gen = parse_generators(["23", "04"])
    taps = parse_channel("example:2")
    m, labeling = 4, "natural"
    matched = build_matched_trellis(gen, taps, labeling)
    super_t = build_super_trellis(gen, taps, labeling)
    channel_t = build_channel_trellis(taps, m)
    code_t = build_code_trellis(gen)
    depth = gen.nu + taps.memory
    print(f"backend: {get_backend()} (available: {', '.join(available_backends())})")

    ref = oracles.reference_hypotheses(gen, taps, labeling, m)
    _check(
        "matched-register hypotheses == encode->map->convolve reference",
        bool(np.max(np.abs(matched.hyp - ref)) <= 1e-12),
        failures,
    )

    n_free = 8
    tail = [0] * (taps.memory + gen.nu)
    ok_mlse = ok_rsse = True
    for _ in range(args.trials):
        info = rng.integers(0, 2, n_free, dtype=np.uint8)
        wave = oracles.reference_waveform(
            gen, taps, labeling, m, list(info) + tail
        )
        obs = wave + rng.normal(0.0, 0.8, wave.size)
        best = oracles.exhaustive_mlse(gen, taps, labeling, m, obs, n_free, tail)
        for trellis in (matched, super_t):
            dec = detect.viterbi_mlse(trellis, obs, terminated=True)
            ok_mlse &= bool(np.array_equal(dec, best))
        dec = detect.md_rsse_decode(matched, detect.RssePartition(depth), obs)
        ok_rsse &= bool(np.array_equal(dec, best))
    _check("viterbi (matched & super) == exhaustive search", ok_mlse, failures)
    _check("reduced-state search at full depth == exhaustive search", ok_rsse, failures)

    ok_dfse = True
    for _ in range(args.trials):
        levels = 2.0 * rng.integers(0, m, 40) - (m - 1)
        obs = convolve(levels, taps, history=-(m - 1))
        obs = obs + rng.normal(0.0, 0.5, obs.size)
        full = detect.viterbi_mlse(channel_t, obs, terminated=False)
        via_dfse = detect.demap_hard(
            detect.dfse_equalize(taps, m, taps.memory, obs), "natural", m
        ).ravel()
        ok_dfse &= bool(np.array_equal(full, via_dfse))
    _check("decision-feedback search at q_h=L == full-state search", ok_dfse, failures)

    ok_bcjr = True
    for _ in range(args.trials):
        levels = 2.0 * rng.integers(0, m, 6) - (m - 1)
        obs = convolve(levels, taps, history=-(m - 1))
        obs = obs + rng.normal(0.0, 0.7, obs.size)
        llr = detect.bcjr_equalize(channel_t, obs, 0.7, labeling)
        ref_llr = oracles.exhaustive_bit_llrs(taps, m, labeling, obs, 0.7)
        ok_bcjr &= bool(np.max(np.abs(llr - ref_llr)) <= 1e-9)
    _check("forward-backward LLRs == exhaustive marginalization", ok_bcjr, failures)

    ok_hard = ok_soft = True
    for _ in range(args.trials):
        info = rng.integers(0, 2, n_free, dtype=np.uint8)
        coded = encode_block(gen, info, terminate=True)
        noisy = (coded ^ (rng.random(coded.shape) < 0.08)).astype(np.uint8)
        cost = oracles.hamming_cost(noisy)
        dec = detect.decode_code_hard(code_t, noisy)
        ref_dec, ref_metric, unique = oracles.exhaustive_code_search(gen, cost, n_free)
        # Hamming optima tie routinely; require the same minimum cost, and
        # the same sequence whenever the optimum is unique
        ok_hard &= oracles.code_cost(gen, dec[:n_free], cost) == ref_metric
        if unique:
            ok_hard &= bool(np.array_equal(dec[:n_free], ref_dec))
        llrs = (1.0 - 2.0 * coded) * 4.0 + rng.normal(0.0, 2.0, coded.shape)
        dec = detect.decode_code_soft(code_t, llrs)
        ref_dec, _, _ = oracles.exhaustive_code_search(gen, oracles.llr_cost(llrs), n_free)
        ok_soft &= bool(np.array_equal(dec[:n_free], ref_dec))
    _check("hard code decoding == exhaustive minimum-distance search", ok_hard, failures)
    _check("soft code decoding == exhaustive max-likelihood search", ok_soft, failures)

    if failures:
        print(f"{len(failures)} check(s) failed")
        return 1
    print("all checks passed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mdlink",
        description="Coded ASK over ISI channels: joint-trellis and separated receivers",
    )
    sub = p.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="Monte-Carlo BER sweep over an Eb/N0 grid")
    sw.add_argument("--gen", default="23,04", help="octal generators, or 'uncoded'")
    sw.add_argument("--channel", default="example:2", help="'example:L' or tap list")
    sw.add_argument("--labeling", default="natural", choices=["natural", "gray"])
    sw.add_argument("--receiver", default="md",
                    help="std | md | md-rsse:<r> | dfse:<q_h>+va | bcjr+va | mlse")
    sw.add_argument("--ebn0", required=True, help="start:step:stop or comma list (dB)")
    sw.add_argument("--M", type=int, default=4)
    sw.add_argument("--block-len", dest="block_len", type=int, default=10_000)
    sw.add_argument("--min-errors", dest="min_errors", type=int, default=200)
    sw.add_argument("--max-bits", dest="max_bits", type=float, default=2e7)
    sw.add_argument("--seed", type=int, default=2024)
    sw.add_argument("--target-ber", dest="target_ber", type=float, default=None)
    sw.add_argument("--force-sigma", dest="force_sigma", type=float, default=None,
                    help="diagnostic override of the noise std-dev (0 disables noise)")
    sw.add_argument("--out", default=None, help="CSV destination")
    sw.add_argument("--jobs", type=int, default=1)
    sw.set_defaults(func=_cmd_sweep)

    cx = sub.add_parser("complexity", help="receiver state counts for a configuration")
    cx.add_argument("--gen", default="23,04")
    cx.add_argument("--channel", default="example:2")
    cx.add_argument("--M", type=int, default=4)
    cx.add_argument("--csv", default=None, help="also write the row as CSV")
    cx.set_defaults(func=_cmd_complexity)

    vf = sub.add_parser("verify", help="run the oracle-equivalence self checks")
    vf.add_argument("--trials", type=int, default=3)
    vf.add_argument("--seed", type=int, default=7)
    vf.set_defaults(func=_cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
