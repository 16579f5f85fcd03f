"""Monte-Carlo BER harness: blockwise link simulation, SNR sweeps,
required-SNR extraction, and CSV emission.

Per block the chain is: draw random info bits, append L zero inputs so the
channel history is flushed, encode with nu-bit termination, map, convolve,
add calibrated AWGN, run the configured receiver, and count errors over the
info bits only (the L + nu tail is excluded from both the error count and
the energy-per-bit accounting).

Reproducibility: each (grid point, block) pair owns a counter-keyed RNG
stream derived from the base seed, so results are bit-identical regardless
of execution order or the number of worker processes, and all receivers see
identical noise for a given seed (paired-run comparisons rely on this).
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import detect
from .channel import add_awgn, convolve, parse_channel
from .convcode import GeneratorSet, encode_block, parse_generators
from .modem import constellation, label_value, noise_sigma, _check_alphabet
from .trellis import (
    build_channel_trellis,
    build_code_trellis,
    build_matched_trellis,
    build_super_trellis,
)

CSV_HEADER = ("ebn0_db", "receiver", "states", "bits", "errors", "ber", "seed")


@dataclass(frozen=True)
class SimConfig:
    """One simulation scenario; see module docstring for the chain."""

    generators: tuple[str, ...] | None
    channel: str | tuple[float, ...]
    receiver: str
    ebn0_grid: tuple[float, ...]
    labeling: str = "natural"
    m: int = 4
    block_len: int = 10_000
    min_errors: int = 200
    max_bits: int = 20_000_000
    base_seed: int = 2024
    force_sigma: float | None = None

    def validate(self) -> None:
        if self.block_len < 1:
            raise ValueError("block_len must be >= 1")
        if self.min_errors < 1:
            raise ValueError("min_errors must be >= 1")
        if self.max_bits < 1:
            raise ValueError("max_bits must be >= 1")
        if not self.ebn0_grid:
            raise ValueError("ebn0_grid must not be empty")
        n = _check_alphabet(self.m)
        if self.labeling not in ("natural", "gray"):
            raise ValueError("simulation chain requires a natural or gray labeling")
        if self.generators is None:
            if self.block_len % n:
                raise ValueError("uncoded block_len must be a multiple of log2(M)")
        parse_receiver(self.receiver)


@dataclass(frozen=True)
class BerRecord:
    ebn0_db: float
    receiver: str
    receiver_states: int
    info_bits: int
    bit_errors: int
    ber: float
    seed: int


@dataclass(frozen=True)
class SweepResult:
    records: tuple[BerRecord, ...]


@dataclass(frozen=True)
class ReceiverSpec:
    kind: str  # std | md | md-rsse | dfse | bcjr | mlse
    param: int | None = None

    @property
    def label(self) -> str:
        if self.kind == "md-rsse":
            return f"md-rsse:{self.param}"
        if self.kind == "dfse":
            return f"dfse:{self.param}+va"
        if self.kind == "bcjr":
            return "bcjr+va"
        return self.kind


def parse_receiver(token: str) -> ReceiverSpec:
    """Parse a receiver token: std | md | md-rsse:<r> | dfse:<q_h>+va | bcjr+va | mlse."""
    t = token.strip().lower()
    if t in ("std", "md", "mlse"):
        return ReceiverSpec(t)
    if t.startswith("md-rsse:"):
        return ReceiverSpec("md-rsse", int(t.split(":", 1)[1]))
    if t.startswith("dfse:"):
        rest = t.split(":", 1)[1]
        if not rest.endswith("+va"):
            raise ValueError(f"malformed receiver token {token!r}")
        return ReceiverSpec("dfse", int(rest[: -len("+va")]))
    if t == "bcjr+va":
        return ReceiverSpec("bcjr")
    raise ValueError(f"unknown receiver {token!r}")


class _Link:
    """Built once per config: code, trellises, receiver closure."""

    def __init__(self, cfg: SimConfig):
        cfg.validate()
        self.cfg = cfg
        self.m = cfg.m
        self.n = _check_alphabet(cfg.m)
        self.taps = parse_channel(cfg.channel)
        self.const = constellation(cfg.m)
        self.spec = parse_receiver(cfg.receiver)
        self.gen: GeneratorSet | None = None
        if cfg.generators is not None:
            self.gen = parse_generators(list(cfg.generators))
            if (1 << self.gen.n) != cfg.m:
                raise ValueError(
                    f"code with n={self.gen.n} outputs requires M={1 << self.gen.n}"
                )
            self.bits_per_symbol = self.gen.k
        else:
            self.bits_per_symbol = self.n
        self._level_lut = np.array(
            [
                2.0 * label_value(self._natural_bits(c), cfg.labeling, cfg.m)
                - (cfg.m - 1)
                for c in range(cfg.m)
            ]
        )
        self._build_receiver()

    def _natural_bits(self, c: int) -> tuple[int, ...]:
        return tuple((c >> (self.n - 1 - i)) & 1 for i in range(self.n))

    def _build_receiver(self) -> None:
        cfg, spec = self.cfg, self.spec
        L, nu = self.taps.memory, (self.gen.nu if self.gen else 0)
        if spec.kind == "mlse":
            if self.gen is not None:
                raise ValueError("receiver 'mlse' is for uncoded transmission")
            self.channel_trellis = build_channel_trellis(self.taps, self.m)
            self.receiver_states = self.channel_trellis.num_states
            return
        if self.gen is None:
            raise ValueError(f"receiver {spec.label!r} requires a code")
        if spec.kind == "std":
            self.trellis = build_super_trellis(self.gen, self.taps, cfg.labeling)
            self.receiver_states = self.trellis.num_states
        elif spec.kind == "md":
            self.trellis = build_matched_trellis(self.gen, self.taps, cfg.labeling)
            self.receiver_states = self.trellis.num_states
        elif spec.kind == "md-rsse":
            self.trellis = build_matched_trellis(self.gen, self.taps, cfg.labeling)
            self.partition = detect.RssePartition(spec.param)
            if not 1 <= spec.param <= nu + L:
                raise ValueError(f"md-rsse partition r={spec.param} outside 1..{nu + L}")
            self.receiver_states = self.partition.hyperstates
        elif spec.kind == "dfse":
            if not 0 <= spec.param <= L:
                raise ValueError(f"dfse q_h={spec.param} outside 0..{L}")
            self.channel_trellis = build_channel_trellis(self.taps, self.m)
            self.code_trellis = build_code_trellis(self.gen)
            self.receiver_states = self.m**spec.param + self.code_trellis.num_states
        elif spec.kind == "bcjr":
            self.channel_trellis = build_channel_trellis(self.taps, self.m)
            self.code_trellis = build_code_trellis(self.gen)
            self.receiver_states = (
                self.channel_trellis.num_states + self.code_trellis.num_states
            )
        else:  # pragma: no cover
            raise AssertionError(spec.kind)

    # --- per-block chain ---

    def transmit(self, info: np.ndarray) -> np.ndarray:
        """Info bits -> bipolar symbol sequence (tail included)."""
        L = self.taps.memory
        if self.gen is not None:
            padded = np.concatenate([info, np.zeros(L, dtype=np.uint8)])
            coded = encode_block(self.gen, padded, terminate=True)
            packed = np.zeros(coded.shape[0], dtype=np.int64)
            for i in range(self.n):
                packed = (packed << 1) | coded[:, i]
            return self._level_lut[packed]
        padded = np.concatenate([info, np.zeros(L * self.n, dtype=np.uint8)])
        packed = np.zeros(padded.size // self.n, dtype=np.int64)
        for i in range(self.n):
            packed = (packed << 1) | padded[i :: self.n]
        return self._level_lut[packed]

    def receive(self, obs: np.ndarray, sigma: float) -> np.ndarray:
        """Observed samples -> decoded info bit stream (tail still attached)."""
        spec, cfg = self.spec, self.cfg
        if spec.kind in ("std", "md"):
            return detect.viterbi_mlse(self.trellis, obs, terminated=True)
        if spec.kind == "md-rsse":
            return detect.md_rsse_decode(self.trellis, self.partition, obs, terminated=True)
        if spec.kind == "dfse":
            idx = detect._dfse_indices(self.channel_trellis, self.m, spec.param, obs)
            levels = 2.0 * idx - (self.m - 1)
            hard = detect.demap_hard(levels, cfg.labeling, self.m)
            return detect.decode_code_hard(self.code_trellis, hard)
        if spec.kind == "bcjr":
            # the equalizer needs a positive noise scale; under the noiseless
            # diagnostic override any scale gives the same hard decisions
            sigma_rx = sigma if sigma > 0 else 1.0
            llrs = detect.bcjr_equalize(self.channel_trellis, obs, sigma_rx, cfg.labeling)
            return detect.decode_code_soft(self.code_trellis, llrs)
        # uncoded full-state MLSE of the channel, then hard demapping
        idx = detect._dfse_indices(self.channel_trellis, self.m, self.taps.memory, obs)
        levels = 2.0 * idx - (self.m - 1)
        return detect.demap_hard(levels, cfg.labeling, self.m).ravel()

    def sigma_for(self, ebn0_db: float) -> float:
        if self.cfg.force_sigma is not None:
            return self.cfg.force_sigma
        return noise_sigma(ebn0_db, self.const.es, self.bits_per_symbol)


def _point_index(cfg: SimConfig, ebn0_db: float) -> int:
    for i, value in enumerate(cfg.ebn0_grid):
        if math.isclose(value, ebn0_db, rel_tol=0.0, abs_tol=1e-12):
            return i
    raise ValueError(f"{ebn0_db} dB is not on the configured grid")


def _run_point(link: _Link, ebn0_db: float, point_index: int) -> BerRecord:
    cfg = link.cfg
    sigma = link.sigma_for(ebn0_db)
    N = cfg.block_len
    errors = 0
    bits = 0
    block = 0
    while errors < cfg.min_errors and bits < cfg.max_bits:
        rng = np.random.default_rng([cfg.base_seed, point_index, block])
        info = rng.integers(0, 2, N, dtype=np.uint8)
        symbols = link.transmit(info)
        clean = convolve(symbols, link.taps, history=-(link.m - 1))
        obs = add_awgn(clean, sigma, rng)
        decoded = link.receive(obs, sigma)
        errors += int(np.sum(decoded[:N] != info))
        bits += N
        block += 1
    return BerRecord(
        ebn0_db=float(ebn0_db),
        receiver=link.spec.label,
        receiver_states=link.receiver_states,
        info_bits=bits,
        bit_errors=errors,
        ber=errors / bits,
        seed=cfg.base_seed,
    )


def run_ber_point(cfg: SimConfig, ebn0_db: float) -> BerRecord:
    """Monte-Carlo BER at one grid point (must be a member of cfg.ebn0_grid)."""
    link = _Link(cfg)
    return _run_point(link, ebn0_db, _point_index(cfg, ebn0_db))


def _sweep_worker(args: tuple[SimConfig, float, int]) -> BerRecord:
    cfg, ebn0_db, index = args
    return _run_point(_Link(cfg), ebn0_db, index)


def run_sweep(cfg: SimConfig, jobs: int = 1) -> SweepResult:
    """Run every grid point; records come back in grid order.

    Points are independent; with jobs > 1 they run in worker processes.
    Results are identical either way thanks to the keyed RNG streams.
    """
    cfg.validate()
    tasks = [(cfg, e, i) for i, e in enumerate(cfg.ebn0_grid)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_sweep_worker, tasks))
    else:
        link = _Link(cfg)
        records = [_run_point(link, e, i) for _, e, i in tasks]
    return SweepResult(records=tuple(records))


def required_snr_at_ber(sweep: SweepResult | Sequence[BerRecord], target: float) -> float:
    """Eb/N0 where the measured curve crosses the target BER.

    Log-linear interpolation of log10(BER) against dB between the two grid
    points bracketing the target; an exact hit returns that point's dB.
    """
    records = sweep.records if isinstance(sweep, SweepResult) else tuple(sweep)
    if target <= 0:
        raise ValueError("target BER must be > 0")
    pts = sorted(records, key=lambda rec: rec.ebn0_db)
    for rec in pts:
        if math.isclose(rec.ber, target, rel_tol=1e-12):
            return rec.ebn0_db
    for lo, hi in zip(pts, pts[1:]):
        if lo.ber >= target >= hi.ber and hi.ber > 0 and lo.ber > 0:
            la, lb = math.log10(lo.ber), math.log10(hi.ber)
            if la == lb:
                return lo.ebn0_db
            f = (math.log10(target) - la) / (lb - la)
            return lo.ebn0_db + f * (hi.ebn0_db - lo.ebn0_db)
    raise ValueError(f"target BER {target} is not bracketed by the sweep")


def emit_csv(result: SweepResult | Sequence[BerRecord], destination) -> None:
    """Write records as CSV (header + one row per record, grid order)."""
    records = result.records if isinstance(result, SweepResult) else tuple(result)

    def _write(fh):
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for rec in records:
            # repr round-trips doubles exactly (and never below 9 digits)
            w.writerow(
                [
                    repr(rec.ebn0_db),
                    rec.receiver,
                    rec.receiver_states,
                    rec.info_bits,
                    rec.bit_errors,
                    repr(rec.ber),
                    rec.seed,
                ]
            )

    if hasattr(destination, "write"):
        _write(destination)
    else:
        with open(destination, "w", newline="") as fh:
            _write(fh)


def read_csv(source) -> tuple[BerRecord, ...]:
    """Parse a file produced by emit_csv back into records."""

    def _read(fh):
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header}")
        return tuple(
            BerRecord(
                ebn0_db=float(row[0]),
                receiver=row[1],
                receiver_states=int(row[2]),
                info_bits=int(row[3]),
                bit_errors=int(row[4]),
                ber=float(row[5]),
                seed=int(row[6]),
            )
            for row in reader
        )

    if hasattr(source, "read"):
        return _read(source)
    with open(source, newline="") as fh:
        return _read(fh)
