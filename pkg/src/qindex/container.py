"""The QIX1 stream format.

Layout (all multi-byte header integers little-endian, bit fields MSB-first)::

    header     19 bytes  magic "QIX1", version, g, block_size (u32),
                         total_symbols (u64), flags
    classes    binary: one k field per block, width bit_length(n_b)
               bytes:  256 symbol counts per block, same width
    bodies     per coded block (bytes mode: per internal tree node, pre-order),
               max(bit_length(L) - 16, 0) raw low index bits
    tips       mixed-radix number of every block's leading index digit,
               ceil(log2 L_B) bits, L_B the quantized radix product
    padding    zero bits to the byte boundary
    crc32      4 bytes LE over every preceding byte (absent when empty)

Every field width follows from the header and the class fields, so nothing
carries a length prefix.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .bitio import BitReader, BitWriter
from .codec import BlockCode, as_bits, decode_block, encode_block, merge_tip, split_tip, tip_shape
from .errors import (
    BadMagicError,
    BadVersionError,
    CapacityError,
    CorruptStreamError,
    InconsistentParametersError,
    TruncatedStreamError,
)
from .multialpha import build_tree, decode_multi, encode_multi, one_branch, symbol_counts
from .qtable import QuantTable, get_table, table_covering
from .radix import build_radix_table, radix_decode, radix_encode
from .swi import MAX_PRECISION, MIN_PRECISION

MAGIC = b"QIX1"
VERSION = 1
FLAG_INVERTED = 0x01
FLAG_MULTI = 0x02
BYTE_ALPHABET = 256
DEFAULT_BLOCK_SIZE = 4096

_HEADER = struct.Struct("<4sBBIQB")
HEADER_SIZE = _HEADER.size
_CRC = struct.Struct("<I")


@dataclass(frozen=True)
class StreamHeader:
    g: int
    block_size: int
    total_symbols: int
    flags: int = 0
    version: int = VERSION

    @property
    def inverted(self) -> bool:
        return bool(self.flags & FLAG_INVERTED)

    @property
    def multi(self) -> bool:
        return bool(self.flags & FLAG_MULTI)

    def pack(self) -> bytes:
        return _HEADER.pack(MAGIC, self.version, self.g, self.block_size, self.total_symbols, self.flags)

    @classmethod
    def unpack(cls, data: bytes) -> StreamHeader:
        if len(data) < 4:
            raise TruncatedStreamError("stream shorter than its magic")
        if data[:4] != MAGIC:
            raise BadMagicError(f"bad magic {data[:4]!r}")
        if len(data) < HEADER_SIZE:
            raise TruncatedStreamError("stream shorter than its header")
        _, version, g, block_size, total, flags = _HEADER.unpack_from(data)
        if version != VERSION:
            raise BadVersionError(f"unsupported version {version}")
        if not MIN_PRECISION <= g <= MAX_PRECISION:
            raise CorruptStreamError(f"precision {g} out of range")
        if block_size < 1:
            raise CorruptStreamError("zero block size")
        if flags & ~(FLAG_INVERTED | FLAG_MULTI) or flags == FLAG_INVERTED | FLAG_MULTI:
            raise CorruptStreamError(f"unknown flags {flags:#x}")
        return cls(g, block_size, total, flags, version)


@dataclass
class EncodedStream:
    """Coded blocks ready for serialization.

    ``blocks`` holds one BlockCode per block in binary mode, and one
    ``(counts, node_codes)`` pair per block in byte mode.
    """

    header: StreamHeader
    blocks: list
    table: QuantTable | None = field(default=None, repr=False)


class Layout(NamedTuple):
    class_bits: int
    body_bits: int
    tip_bits: int

    @property
    def payload_bits(self) -> int:
        """Index payload: bodies plus tip stream (class fields excluded)."""
        return self.body_bits + self.tip_bits


def block_lengths(total: int, block_size: int) -> list[int]:
    full, rest = divmod(total, block_size)
    return [block_size] * full + ([rest] if rest else [])


def prepare_bits(bits) -> tuple[np.ndarray, bool]:
    """Invert the whole input if ones outnumber zeros; ties keep the original."""
    a = as_bits(bits)
    ones = int(np.count_nonzero(a))
    if 2 * ones > a.size:
        return (1 - a).astype(np.uint8), True
    return a, False


def encode(data, block_size: int = DEFAULT_BLOCK_SIZE, g: int = 32, alphabet: str = "bin") -> EncodedStream:
    """Code a bit sequence (alphabet "bin") or a byte sequence (alphabet "byte")."""
    t = get_table(block_size, g)
    if alphabet == "bin":
        bits, inverted = prepare_bits(data)
        header = StreamHeader(g, block_size, int(bits.size), FLAG_INVERTED if inverted else 0)
        blocks = []
        for start in range(0, bits.size, block_size):
            blocks.append(encode_block(bits[start:start + block_size], t))
        return EncodedStream(header, blocks, t)
    if alphabet == "byte":
        if isinstance(data, (bytes, bytearray, memoryview)):
            symbols = np.frombuffer(bytes(data), dtype=np.uint8)
        else:
            symbols = np.asarray(data)
            if symbols.size and (symbols.min() < 0 or symbols.max() >= BYTE_ALPHABET):
                raise InconsistentParametersError("byte alphabet symbols must lie in 0..255")
            symbols = symbols.astype(np.uint8)
        header = StreamHeader(g, block_size, int(symbols.size), FLAG_MULTI)
        blocks = []
        for start in range(0, symbols.size, block_size):
            chunk = symbols[start:start + block_size]
            counts = symbol_counts(chunk, BYTE_ALPHABET)
            blocks.append((tuple(counts), encode_multi(chunk, build_tree(counts), t)))
        return EncodedStream(header, blocks, t)
    raise InconsistentParametersError(f"unknown alphabet {alphabet!r}")


def _codes_in_order(stream: EncodedStream) -> list[BlockCode]:
    if stream.header.multi:
        return [c for _, codes in stream.blocks for c in codes]
    return list(stream.blocks)


def _check(stream: EncodedStream) -> QuantTable:
    h = stream.header
    t = stream.table or get_table(h.block_size, h.g)
    if t.g != h.g or t.n_max < h.block_size:
        raise InconsistentParametersError("table does not match the stream header")
    lengths = block_lengths(h.total_symbols, h.block_size)
    if len(lengths) != len(stream.blocks):
        raise InconsistentParametersError("block count does not match total_symbols")
    for n_b, blk in zip(lengths, stream.blocks):
        m = sum(blk[0]) if h.multi else blk.m
        if m != n_b:
            raise InconsistentParametersError("block length does not match the header")
    return t


def layout(stream: EncodedStream) -> Layout:
    h = stream.header
    t = _check(stream)
    lengths = block_lengths(h.total_symbols, h.block_size)
    per_block = BYTE_ALPHABET if h.multi else 1
    class_bits = sum(per_block * n_b.bit_length() for n_b in lengths)
    tips = [split_tip(c, t) for c in _codes_in_order(stream)]
    rt = build_radix_table([tp.radix for tp in tips], h.g)
    return Layout(class_bits, sum(tp.body_bits for tp in tips), (rt.total - 1).bit_length())


def write_stream(stream: EncodedStream) -> bytes:
    h = stream.header
    t = _check(stream)
    out = BitWriter()
    lengths = block_lengths(h.total_symbols, h.block_size)
    for n_b, blk in zip(lengths, stream.blocks):
        width = n_b.bit_length()
        if h.multi:
            for c in blk[0]:
                out.write(c, width)
        else:
            out.write(blk.k, width)
    tips = [split_tip(c, t) for c in _codes_in_order(stream)]
    for tp in tips:
        out.write(tp.body, tp.body_bits)
    rt = build_radix_table([tp.radix for tp in tips], h.g)
    out.write(radix_encode([tp.digit for tp in tips], rt), (rt.total - 1).bit_length())
    body = out.getvalue()
    if h.total_symbols == 0:
        return h.pack()
    framed = h.pack() + body
    return framed + _CRC.pack(zlib.crc32(framed))


def read_stream(data: bytes) -> tuple[StreamHeader, np.ndarray]:
    """Decode a QIX1 stream into bits (binary mode) or byte symbols (byte mode)."""
    data = bytes(data)
    h = StreamHeader.unpack(data)
    if h.total_symbols == 0:
        if len(data) != HEADER_SIZE:
            raise CorruptStreamError("trailing bytes after an empty stream")
        return h, np.zeros(0, dtype=np.uint8)
    if len(data) < HEADER_SIZE + _CRC.size:
        raise TruncatedStreamError("stream shorter than header and checksum")
    (crc,) = _CRC.unpack_from(data, len(data) - _CRC.size)
    if zlib.crc32(data[:-_CRC.size]) != crc:
        raise CorruptStreamError("checksum mismatch")

    per_block = BYTE_ALPHABET if h.multi else 1
    payload_end = (len(data) - _CRC.size) * 8
    n_blocks = -(-h.total_symbols // h.block_size)
    # every class field is at least one bit wide
    if HEADER_SIZE * 8 + n_blocks * per_block > payload_end:
        raise TruncatedStreamError("stream too short for its class fields")
    lengths = block_lengths(h.total_symbols, h.block_size)
    class_bits = sum(per_block * n_b.bit_length() for n_b in lengths)
    if HEADER_SIZE * 8 + class_bits > payload_end:
        raise TruncatedStreamError("stream too short for its class fields")
    try:
        # the longest block bounds the table, not the header's block size
        t = table_covering(max(lengths), h.g)
    except CapacityError as exc:
        raise CorruptStreamError(f"block size {h.block_size} not decodable: {exc}") from None

    rd = BitReader(data, HEADER_SIZE * 8, payload_end)
    classes: list = []
    for n_b in lengths:
        width = n_b.bit_length()
        if h.multi:
            counts = [rd.read(width) for _ in range(BYTE_ALPHABET)]
            if sum(counts) != n_b:
                raise CorruptStreamError("symbol counts do not add up to the block length")
            tree = build_tree(counts)
            classes.append((counts, [(v.count, one_branch(v).count) for v in tree.internal_nodes()]))
        else:
            k = rd.read(width)
            if k > n_b:
                raise CorruptStreamError(f"k={k} exceeds block length {n_b}")
            classes.append((None, [(n_b, k)]))

    mk = [pair for _, pairs in classes for pair in pairs]
    radices, low_bits = zip(*(tip_shape(t, m, k) for m, k in mk))
    bodies = [rd.read(low) for low in low_bits]
    rt = build_radix_table(radices, h.g)
    tip_value = rd.read((rt.total - 1).bit_length())
    if tip_value >= rt.total:
        raise CorruptStreamError("tip stream value out of range")
    digits = radix_decode(tip_value, rt)
    if rd.remaining >= 8 or rd.read(rd.remaining) != 0:
        raise CorruptStreamError("stream length or padding does not match its fields")

    codes = iter(
        merge_tip(d, r, body, m, k, t)
        for d, r, body, (m, k) in zip(digits, radices, bodies, mk)
    )
    parts = []
    for counts, pairs in classes:
        if h.multi:
            node_codes = [next(codes) for _ in pairs]
            parts.append(decode_multi(node_codes, counts, t).astype(np.uint8))
        else:
            parts.append(decode_block(next(codes), t))
    out = np.concatenate(parts)

    if h.inverted:
        out = (1 - out).astype(np.uint8)
    return h, out


def compress(data: bytes, block_size: int = DEFAULT_BLOCK_SIZE, g: int = 32, alphabet: str = "bin") -> bytes:
    """Compress a byte string; "bin" codes its bits MSB-first, "byte" its octets."""
    if alphabet == "bin":
        payload = np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8))
    else:
        payload = bytes(data)
    return write_stream(encode(payload, block_size, g, alphabet))


def decompress(data: bytes) -> bytes:
    h, out = read_stream(data)
    if h.multi:
        return out.tobytes()
    if h.total_symbols % 8:
        raise InconsistentParametersError("bit stream length is not a whole number of bytes")
    return np.packbits(out).tobytes()
