"""Quantized indexing: enumerative coding over sliding-window integer tables."""

from __future__ import annotations

from .ac import ac_decode, ac_encode
from .bench import BenchReport, BenchRow, run_bench
from .codec import BlockCode, Tip, class_size, decode_block, encode_block, merge_tip, split_tip
from .container import (
    EncodedStream,
    StreamHeader,
    compress,
    decompress,
    encode,
    layout,
    read_stream,
    write_stream,
)
from .errors import *  # noqa: F401,F403
from .multialpha import CodeTree, build_tree, decode_multi, encode_multi
from .oracle import binom, log2_multinomial, multinomial, rank_exact, unrank_exact
from .qtable import (
    QuantTable,
    RedundancyReport,
    build_table,
    dump_table,
    excess_profile,
    get_table,
    load_table,
    lookup,
    min_precision,
)
from .radix import (
    RadixTable,
    build_perm_table,
    build_radix_table,
    perm_rank,
    perm_unrank,
    radix_decode,
    radix_encode,
)
from .swi import SWInt, sw_ceil, sw_mul_ceil, sw_sum_ceil, sw_value

__version__ = "0.1.0"
