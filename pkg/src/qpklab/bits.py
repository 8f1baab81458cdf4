"""Bitstring helpers shared across the package.

Bitstrings are plain ``str`` over ``'0'``/``'1'``. The integer value of a
bitstring is its big-endian reading, ``int(s, 2)``. When a register holds a
bitstring inside a statevector, the register's least significant bit sits at
the register's wire offset; qubit 0 is the least significant bit of the basis
index (little-endian, normative across the package).
"""

from __future__ import annotations

import numpy as np

_BIT_CHARS = frozenset("01")


def check_bits(s: str, width: int | None = None) -> str:
    if not isinstance(s, str) or not set(s) <= _BIT_CHARS:
        raise ValueError(f"not a bitstring: {s!r}")
    if width is not None and len(s) != width:
        raise ValueError(f"bitstring {s!r} has length {len(s)}, expected {width}")
    return s


def bits_to_int(s: str) -> int:
    check_bits(s)
    return int(s, 2) if s else 0


def int_to_bits(v: int, width: int) -> str:
    if v < 0 or v >= (1 << width):
        raise ValueError(f"value {v} does not fit in {width} bits")
    return format(v, f"0{width}b") if width else ""


def xor_bits(a: str, b: str) -> str:
    if len(a) != len(b):
        raise ValueError("xor of bitstrings with different lengths")
    return "".join("1" if x != y else "0" for x, y in zip(a, b))


def random_bits(width: int, rng: np.random.Generator) -> str:
    return "".join("1" if b else "0" for b in rng.integers(0, 2, size=width))


def pack_bits(s: str) -> bytes:
    """Pack a bitstring MSB-first into bytes, zero-padded at the tail."""
    check_bits(s)
    padded = s + "0" * (-len(s) % 8)
    return bytes(int(padded[i : i + 8], 2) for i in range(0, len(padded), 8))


def unpack_bits(data: bytes, width: int) -> str:
    s = "".join(format(byte, "08b") for byte in data)
    if len(s) < width:
        raise ValueError("not enough bytes for requested bit width")
    return s[:width]
