"""Bitstring helpers and the canonical wire encoding.

Bitstrings are plain str of '0'/'1' characters, most significant bit first.
The integer value of a bitstring is int(s, 2); index 0 is the leftmost bit.

Wire encoding of a bitstring: u32 little-endian bit length, then the bits
packed big-endian within each byte (bit i lands in byte i//8 at position
7 - i%8), zero-padded. All protocol payload equality checks compare these
bytes, so the encoding must stay stable.
"""

import struct


def xor_bits(a: str, b: str) -> str:
    if len(a) != len(b):
        raise ValueError(f"xor of unequal lengths {len(a)} and {len(b)}")
    return format(int(a, 2) ^ int(b, 2), f"0{len(a)}b") if a else ""


def dot_bits(a: str, b: str) -> int:
    """Inner product mod 2."""
    if len(a) != len(b):
        raise ValueError(f"dot of unequal lengths {len(a)} and {len(b)}")
    return (int(a, 2) & int(b, 2)).bit_count() & 1


def int_to_bits(value: int, width: int) -> str:
    if value < 0 or value >= (1 << width):
        raise ValueError(f"value {value} does not fit in {width} bits")
    return format(value, f"0{width}b") if width else ""


def bits_to_int(s: str) -> int:
    return int(s, 2) if s else 0


def is_zero(s: str) -> bool:
    return "1" not in s


def pack_bits(s: str) -> bytes:
    """Length-prefixed packed form of a bitstring."""
    nbytes = (len(s) + 7) // 8
    value = int(s, 2) << (8 * nbytes - len(s)) if s else 0
    return struct.pack("<I", len(s)) + value.to_bytes(nbytes, "big")


def unpack_bits(data: bytes, offset: int = 0) -> tuple[str, int]:
    """Decode one packed bitstring; returns (bits, next offset)."""
    (nbits,) = struct.unpack_from("<I", data, offset)
    offset += 4
    nbytes = (nbits + 7) // 8
    chunk = data[offset : offset + nbytes]
    if len(chunk) != nbytes:
        raise ValueError("truncated bitstring")
    value = int.from_bytes(chunk, "big") >> (8 * nbytes - nbits) if nbits else 0
    return int_to_bits(value, nbits), offset + nbytes


def encode_parts(*parts: bytes) -> bytes:
    """Concatenate byte strings, each with a u32 length prefix."""
    return b"".join(struct.pack("<I", len(p)) + p for p in parts)


def decode_parts(data: bytes) -> list[bytes]:
    parts = []
    offset = 0
    while offset < len(data):
        (length,) = struct.unpack_from("<I", data, offset)
        offset += 4
        chunk = data[offset : offset + length]
        if len(chunk) != length:
            raise ValueError("truncated part")
        parts.append(chunk)
        offset += length
    return parts
