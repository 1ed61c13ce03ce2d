"""Hash commitments: ``c = H(len(s) || s || r)`` with a 32-byte nonce ``r``."""

from __future__ import annotations

import hmac
from dataclasses import dataclass

from .encoding import DIGEST_SIZE, digest
from .errors import InvalidParameters

NONCE_SIZE = 32


@dataclass(frozen=True)
class Commitment:
    digest: bytes

    def __post_init__(self) -> None:
        if len(self.digest) != DIGEST_SIZE:
            raise InvalidParameters(f"commitment digest must be {DIGEST_SIZE} bytes")

    def hex(self) -> str:
        return self.digest.hex()


def _check_nonce(r: bytes) -> None:
    if len(r) != NONCE_SIZE:
        raise InvalidParameters(f"nonce must be {NONCE_SIZE} bytes, got {len(r)}")


def commit(s: bytes, r: bytes) -> Commitment:
    _check_nonce(r)
    return Commitment(digest(len(s).to_bytes(8, "big") + s + r))


def open_commitment(c: Commitment, s: bytes, r: bytes) -> bool:
    """Accept iff ``(s, r)`` opens ``c``. A nonce of the wrong length raises."""
    return hmac.compare_digest(commit(s, r).digest, c.digest)


open = open_commitment  # noqa: A001
