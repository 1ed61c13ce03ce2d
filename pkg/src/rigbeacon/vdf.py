"""Sloth-style verifiable delay function over a prime ``p = 3 (mod 4)``.

One round permutes its input and takes a canonical modular square root:
the even root of a quadratic residue, or the odd root of ``-z`` when ``z``
is a non-residue. A root costs one exponentiation by ``(p + 1) / 4``; the
inverse costs a single squaring, which is what makes verification cheap.

``vdf_eval`` returns the output together with checkpoints (every
``checkpoint_interval``-th intermediate state, the last one being the final
state). ``vdf_verify`` walks every segment backwards by squaring.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import ceil

import sympy

from .encoding import hash_to_bits
from .errors import InvalidParameters

DEFAULT_SEED = b"rigbeacon/vdf"


@dataclass(frozen=True)
class VdfParams:
    modulus: int
    difficulty: int
    security: int
    checkpoint_interval: int = 0
    _exponent: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        p = self.modulus
        if p % 4 != 3 or not sympy.isprime(p):
            raise InvalidParameters(f"VDF modulus must be a prime = 3 mod 4, got {p}")
        if self.difficulty < 1:
            raise InvalidParameters(f"VDF difficulty must be >= 1, got {self.difficulty}")
        if self.checkpoint_interval <= 0:
            object.__setattr__(self, "checkpoint_interval", max(1, ceil(self.difficulty / 10)))
        object.__setattr__(self, "_exponent", (p + 1) // 4)

    def checkpoint_count(self, steps: int | None = None) -> int:
        steps = self.difficulty if steps is None else steps
        return ceil(steps / self.checkpoint_interval)


@dataclass(frozen=True)
class VdfOutput:
    y: int
    proof: tuple[int, ...]


def vdf_setup(
    security: int,
    difficulty: int,
    seed: bytes = DEFAULT_SEED,
    checkpoint_interval: int = 0,
) -> VdfParams:
    """Deterministically derive a ``security``-bit prime ``p = 3 mod 4`` from ``seed``."""
    if security < 64:
        raise InvalidParameters(f"VDF security parameter must be >= 64 bits, got {security}")
    if difficulty < 1:
        raise InvalidParameters(f"VDF difficulty must be >= 1, got {difficulty}")
    return VdfParams(_prime_3_mod_4(security, seed), difficulty, security, checkpoint_interval)


@lru_cache(maxsize=32)
def _prime_3_mod_4(bits: int, seed: bytes) -> int:
    for candidate in hash_to_bits(bits, "vdf-modulus", seed, bits):
        candidate |= (1 << (bits - 1)) | 3
        if sympy.isprime(candidate):
            return candidate
    raise AssertionError("unreachable")


def permute(x: int, p: int) -> int:
    """Swap ``x`` with its neighbour ``x ^ 1``; ``p - 1`` (no in-range neighbour) is fixed."""
    z = x ^ 1
    return z if z < p else x


def _root(z: int, p: int, e: int) -> int:
    r = pow(z, e, p)
    if r * r % p == z:
        return r if r % 2 == 0 else p - r
    # z is a non-residue: r is a square root of -z, tagged by odd parity
    return r if r % 2 == 1 else p - r


def _unroot(r: int, p: int) -> int:
    sq = r * r % p
    return sq if r % 2 == 0 else (p - sq) % p


def vdf_eval(params: VdfParams, x: int, steps: int | None = None) -> VdfOutput:
    """Evaluate ``steps`` (default: the difficulty) rounds on ``x``; slow direction."""
    p, e = params.modulus, params._exponent
    steps = params.difficulty if steps is None else steps
    if not 0 <= x < p:
        raise InvalidParameters(f"VDF input must lie in [0, {p})")
    interval = params.checkpoint_interval
    u = x
    proof = []
    for k in range(1, steps + 1):
        u = _root(permute(u, p), p, e)
        if k % interval == 0 or k == steps:
            proof.append(u)
    return VdfOutput(permute(u, p), tuple(proof))


@lru_cache(maxsize=4096)
def vdf_eval_cached(params: VdfParams, x: int) -> VdfOutput:
    return vdf_eval(params, x)


def _walk_back(u: int, p: int, steps: int) -> int:
    for _ in range(steps):
        u = permute(_unroot(u, p), p)
    return u


def vdf_verify(params: VdfParams, x: int, out: VdfOutput, steps: int | None = None) -> bool:
    """Accept iff every checkpoint segment squares back onto its predecessor."""
    p = params.modulus
    steps = params.difficulty if steps is None else steps
    if len(out.proof) != params.checkpoint_count(steps):
        raise InvalidParameters(
            f"proof has {len(out.proof)} checkpoints, expected {params.checkpoint_count(steps)}"
        )
    if not (0 <= x < p and 0 <= out.y < p) or any(not 0 <= c < p for c in out.proof):
        return False
    last = out.proof[-1] if out.proof else x
    if permute(last, p) != out.y:
        return False
    interval = params.checkpoint_interval
    previous, done = x, 0
    for c in out.proof:
        seg = min(interval, steps - done)
        if _walk_back(c, p, seg) != previous:
            return False
        previous, done = c, done + seg
    return True


def vdf_invert(params: VdfParams, y: int, steps: int | None = None) -> int:
    """The unique input that evaluates to ``y``, computed in the fast direction.

    A committer uses this to build a delay puzzle whose evaluation yields a
    chosen value.
    """
    p = params.modulus
    steps = params.difficulty if steps is None else steps
    if not 0 <= y < p:
        raise InvalidParameters(f"VDF output must lie in [0, {p})")
    return _walk_back(permute(y, p), p, steps)


def vdf_check_pair(params: VdfParams, x: int, y: int) -> bool:
    """Check ``eval(x) == y`` without a proof, by squaring all the way back."""
    return 0 <= y < params.modulus and vdf_invert(params, y) == x
