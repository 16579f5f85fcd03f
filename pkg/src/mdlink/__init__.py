"""Coded M-ASK over ISI channels: joint-trellis (matched) decoding and
separated equalization/decoding baselines, with a Monte-Carlo BER harness.

The hot search kernels live in a compiled extension with a pure-numpy
fallback chosen at import time; see :mod:`mdlink._backend`.
"""

from ._backend import available_backends, get_backend, set_backend
from .channel import (
    ChannelTaps,
    add_awgn,
    convolve,
    example_channel,
    is_minimum_phase,
    make_taps,
    parse_channel,
)
from .convcode import GeneratorSet, encode_block, encode_step, parse_generators
from .detect import (
    RssePartition,
    bcjr_equalize,
    decode_code_hard,
    decode_code_soft,
    demap_hard,
    dfse_equalize,
    md_rsse_decode,
    viterbi_mlse,
)
from .modem import (
    Constellation,
    constellation,
    map_symbol,
    mod2_via_floor,
    noise_sigma,
)
from .sim import (
    BerRecord,
    SimConfig,
    SweepResult,
    emit_csv,
    read_csv,
    required_snr_at_ber,
    run_ber_point,
    run_sweep,
)
from .trellis import (
    ComplexityReport,
    Trellis,
    build_channel_trellis,
    build_code_trellis,
    build_matched_trellis,
    build_super_trellis,
    complexity_from_orders,
    complexity_report,
    reachable_states,
)

__version__ = "0.1.0"
