"""Canonical byte encoding and the package-wide hash.

Every hashed or signed structure is encoded field by field, in a fixed
order, with these rules:

* non-negative integer: minimal big-endian bytes (``0`` is empty),
  prefixed by a 4-byte big-endian length;
* bytes: raw, prefixed by a 4-byte big-endian length;
* str: its UTF-8 bytes, encoded as bytes;
* list or tuple: 4-byte big-endian item count, then each item encoded.

The hash is SHA-256 throughout (``HASH_NAME``).
"""

from __future__ import annotations

import hashlib
from typing import Iterator, Union

HASH_NAME = "sha256"
DIGEST_SIZE = 32

Field = Union[int, bytes, str, list, tuple]


def int_to_bytes(n: int) -> bytes:
    if n < 0:
        raise ValueError(f"canonical encoding covers non-negative integers only, got {n}")
    return n.to_bytes((n.bit_length() + 7) // 8, "big")


def _length(n: int) -> bytes:
    return n.to_bytes(4, "big")


def encode_field(value: Field) -> bytes:
    if isinstance(value, bool):
        value = int(value)
    if isinstance(value, int):
        raw = int_to_bytes(value)
        return _length(len(raw)) + raw
    if isinstance(value, str):
        value = value.encode("utf-8")
    if isinstance(value, (bytes, bytearray)):
        return _length(len(value)) + bytes(value)
    if isinstance(value, (list, tuple)):
        return _length(len(value)) + b"".join(encode_field(v) for v in value)
    raise TypeError(f"cannot canonically encode {type(value).__name__}")


def encode(*fields: Field) -> bytes:
    return b"".join(encode_field(f) for f in fields)


def digest(data: bytes) -> bytes:
    return hashlib.new(HASH_NAME, data).digest()


def hash_fields(*fields: Field) -> bytes:
    return digest(encode(*fields))


def hash_to_int(*fields: Field) -> int:
    return int.from_bytes(hash_fields(*fields), "big")


def hash_stream(*fields: Field) -> Iterator[int]:
    """Unbounded stream of 256-bit integers derived from ``fields``."""
    counter = 0
    prefix = encode(*fields)
    while True:
        yield int.from_bytes(digest(prefix + encode_field(counter)), "big")
        counter += 1


def hash_to_bits(bits: int, *fields: Field) -> Iterator[int]:
    """Stream of ``bits``-bit integers derived from ``fields``."""
    words = (bits + 255) // 256
    stream = hash_stream(*fields)
    while True:
        n = 0
        for _ in range(words):
            n = (n << 256) | next(stream)
        yield n >> (words * 256 - bits)
