"""MSB-first bit packing into bytes."""

from __future__ import annotations

from .errors import TruncatedStreamError


class BitWriter:
    def __init__(self) -> None:
        self._out = bytearray()
        self._acc = 0
        self._nacc = 0
        self.bits_written = 0

    def write(self, value: int, nbits: int) -> None:
        if nbits == 0:
            return
        if value >> nbits:
            raise ValueError(f"value does not fit in {nbits} bits")
        self._acc = (self._acc << nbits) | value
        self._nacc += nbits
        self.bits_written += nbits
        if self._nacc >= 8:
            keep = self._nacc & 7
            self._out += (self._acc >> keep).to_bytes(self._nacc >> 3, "big")
            self._acc &= (1 << keep) - 1
            self._nacc = keep

    def write_bit(self, bit: int) -> None:
        self.write(bit & 1, 1)

    def getvalue(self) -> bytes:
        """Bytes written so far, the last one zero-padded."""
        if self._nacc:
            return bytes(self._out) + bytes([(self._acc << (8 - self._nacc)) & 0xFF])
        return bytes(self._out)


class BitReader:
    def __init__(self, data: bytes, start_bit: int = 0, end_bit: int | None = None) -> None:
        self._data = data
        self.pos = start_bit
        self.end = len(data) * 8 if end_bit is None else end_bit

    @property
    def remaining(self) -> int:
        return self.end - self.pos

    def read(self, nbits: int) -> int:
        if nbits == 0:
            return 0
        if self.pos + nbits > self.end:
            raise TruncatedStreamError(f"need {nbits} bits, {self.remaining} left")
        lo, hi = self.pos, self.pos + nbits
        b0, b1 = lo >> 3, (hi + 7) >> 3
        v = int.from_bytes(self._data[b0:b1], "big")
        v >>= (b1 << 3) - hi
        self.pos = hi
        return v & ((1 << nbits) - 1)

    def read_bit(self) -> int:
        if self.pos >= self.end:
            raise TruncatedStreamError("read past end of stream")
        b = (self._data[self.pos >> 3] >> (7 - (self.pos & 7))) & 1
        self.pos += 1
        return b
