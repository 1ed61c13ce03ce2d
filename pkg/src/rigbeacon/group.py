"""Prime-order subgroup arithmetic, key pairs, signatures and DLEQ proofs.

The group is the order-``q`` subgroup of quadratic residues in ``Z_p^*``
for a safe prime ``p = 2q + 1``. Both generators are obtained by hashing a
domain-separation tag into ``Z_p`` and squaring, so nobody knows
``log_g G``.

Nonces for proofs and signatures are derived deterministically from the
secret and the statement, so every transcript is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import sympy

from .encoding import Field, encode, hash_to_bits, hash_to_int
from .errors import InvalidParameters

DEFAULT_SEED = b"rigbeacon/group"

# group_setup(512, DEFAULT_SEED) modulus; tests regenerate and compare
_PINNED: dict[tuple[int, bytes], int] = {
    (512, DEFAULT_SEED): int(
        "87823706541259097034876885900443944615807245152505927178874097957306"
        "86957259989040254973419688429273176451841923395661012910090073265275"
        "238089034304177787"
    ),
}


@dataclass(frozen=True)
class GroupParams:
    p: int
    q: int
    g: int
    G: int

    def __post_init__(self) -> None:
        if self.p != 2 * self.q + 1:
            raise InvalidParameters("p must equal 2q + 1")
        for name in ("g", "G"):
            if not self.contains(getattr(self, name)) or getattr(self, name) == 1:
                raise InvalidParameters(f"generator {name} is not a non-trivial subgroup element")

    @classmethod
    def from_safe_prime(cls, p: int, g: int | None = None, G: int | None = None) -> "GroupParams":
        q = (p - 1) // 2
        if not (sympy.isprime(p) and sympy.isprime(q)):
            raise InvalidParameters(f"{p} is not a safe prime")
        if g is None:
            g = hash_to_group(p, "generator-g")
        if G is None:
            G = hash_to_group(p, "generator-G")
        return cls(p, q, g, G)

    @property
    def bits(self) -> int:
        return self.p.bit_length()

    def contains(self, h: int) -> bool:
        return 0 < h < self.p and pow(h, self.q, self.p) == 1

    def exp(self, base: int, e: int) -> int:
        return pow(base, e % self.q, self.p)

    def random_scalar(self, *fields: Field) -> int:
        """A deterministic scalar in ``[1, q)`` derived from ``fields``."""
        return hash_to_int("scalar", self.p, *fields) % (self.q - 1) + 1


def hash_to_group(p: int, tag: str) -> int:
    for h in hash_to_bits(p.bit_length() + 64, "hash-to-group", p, tag):
        e = pow(h % p, 2, p)
        if e not in (0, 1):
            return e
    raise AssertionError("unreachable")


_SMALL_PRIMES = list(sympy.primerange(3, 2000))


def _sieve_ok(n: int) -> bool:
    return all(n % sp for sp in _SMALL_PRIMES if sp < n)


@lru_cache(maxsize=16)
def _safe_prime(bits: int, seed: bytes) -> int:
    if (bits, seed) in _PINNED:
        return _PINNED[(bits, seed)]
    for c in hash_to_bits(bits - 1, "safe-prime", seed, bits):
        q = c | (1 << (bits - 2)) | 1
        # q = 2 mod 3 is necessary for 3 not to divide 2q + 1 when q > 3
        if q % 3 != 2 and q > 3:
            continue
        p = 2 * q + 1
        if _sieve_ok(q) and _sieve_ok(p) and sympy.isprime(q) and sympy.isprime(p):
            return p
    raise AssertionError("unreachable")


def group_setup(bits: int = 512, seed: bytes = DEFAULT_SEED) -> GroupParams:
    """Safe-prime group of ``bits`` bits, deterministic in ``seed``."""
    if bits < 32:
        raise InvalidParameters(f"group bit length must be >= 32, got {bits}")
    return GroupParams.from_safe_prime(_safe_prime(bits, seed))


#: Tiny fixture group for hand-checkable tests: p = 23, q = 11, g = 4.
def toy_group() -> GroupParams:
    return GroupParams.from_safe_prime(23, g=4)


@dataclass(frozen=True)
class KeyPair:
    secret: int
    public: int

    @property
    def x(self) -> int:
        return self.secret

    @property
    def y(self) -> int:
        return self.public


def keygen(group: GroupParams, seed: Field) -> KeyPair:
    x = group.random_scalar("keygen", seed)
    return KeyPair(x, group.exp(group.G, x))


def keypair_matches(group: GroupParams, kp: KeyPair) -> bool:
    return kp.secret % group.q != 0 and group.exp(group.G, kp.secret) == kp.public


@dataclass(frozen=True)
class DleqProof:
    """Non-interactive Chaum-Pedersen proof: challenge ``e`` and response ``z``."""

    e: int
    z: int


def _dleq_challenge(group: GroupParams, g1: int, h1: int, g2: int, h2: int, a1: int, a2: int) -> int:
    return hash_to_int("dleq", group.p, g1, h1, g2, h2, a1, a2) % group.q


def dleq_prove(
    group: GroupParams, g1: int, h1: int, g2: int, h2: int, x: int, context: Field = b""
) -> DleqProof:
    """Prove ``log_g1 h1 == log_g2 h2 == x``."""
    for el in (g1, h1, g2, h2):
        if not group.contains(el):
            raise InvalidParameters(f"{el} is not in the order-q subgroup")
    w = group.random_scalar("dleq-nonce", x, g1, h1, g2, h2, context)
    a1, a2 = group.exp(g1, w), group.exp(g2, w)
    e = _dleq_challenge(group, g1, h1, g2, h2, a1, a2)
    return DleqProof(e, (w - e * x) % group.q)


def dleq_verify(group: GroupParams, g1: int, h1: int, g2: int, h2: int, proof: DleqProof) -> bool:
    if not all(group.contains(el) for el in (g1, h1, g2, h2)):
        return False
    if not (0 <= proof.e < group.q and 0 <= proof.z < group.q):
        return False
    p = group.p
    a1 = pow(g1, proof.z, p) * pow(h1, proof.e, p) % p
    a2 = pow(g2, proof.z, p) * pow(h2, proof.e, p) % p
    return _dleq_challenge(group, g1, h1, g2, h2, a1, a2) == proof.e


@dataclass(frozen=True)
class Signature:
    e: int
    z: int


def sign(group: GroupParams, kp: KeyPair, message: bytes) -> Signature:
    """Schnorr signature with base ``G``."""
    w = group.random_scalar("sign-nonce", kp.secret, message)
    a = group.exp(group.G, w)
    e = hash_to_int("schnorr", group.p, kp.public, a, message) % group.q
    return Signature(e, (w + e * kp.secret) % group.q)


def verify_signature(group: GroupParams, public: int, message: bytes, sig: Signature) -> bool:
    if not group.contains(public):
        return False
    if not (0 <= sig.e < group.q and 0 <= sig.z < group.q):
        return False
    p = group.p
    a = pow(group.G, sig.z, p) * pow(public, group.q - sig.e, p) % p
    return hash_to_int("schnorr", group.p, public, a, message) % group.q == sig.e


def signed_payload(*fields: Field) -> bytes:
    return encode(*fields)
