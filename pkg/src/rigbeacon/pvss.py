"""Publicly verifiable (t, n)-threshold secret sharing with a masked secret.

The dealer hides ``s in [0, m)`` as ``U = s + h(G^r) mod m`` and shares
``G^r`` with a random polynomial ``p`` of degree ``t - 1`` whose constant
term is the exponent ``r``:

* commitments ``C_j = g^{a_j}``;
* encrypted shares ``Y_i = y_i^{p(i)}`` under each participant's public key;
* one DLEQ proof per share that ``log_g X_i == log_{y_i} Y_i`` where
  ``X_i = prod_j C_j^{i^j}`` is recomputable by anyone.

Participant ``i`` decrypts ``S_i = Y_i^{1/x_i} = G^{p(i)}`` and proves it with
a DLEQ proof of ``log_G y_i == log_{S_i} Y_i``. Any ``t`` decrypted shares
give ``G^r`` by Lagrange interpolation in the exponent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .encoding import Field, encode, hash_to_int
from .errors import InsufficientShares, InvalidParameters, VerificationError
from .group import DleqProof, GroupParams, KeyPair, dleq_prove, dleq_verify


@dataclass(frozen=True)
class DealerBundle:
    session_id: bytes
    dealer: int
    m: int
    U: int
    commitments: tuple[int, ...]
    shares: tuple[int, ...]
    proofs: tuple[DleqProof, ...]

    @property
    def n(self) -> int:
        return len(self.shares)

    @property
    def t(self) -> int:
        return len(self.commitments)

    def fields(self) -> tuple[Field, ...]:
        return (
            "bundle",
            self.session_id,
            self.dealer,
            self.m,
            self.U,
            list(self.commitments),
            list(self.shares),
            [[p.e, p.z] for p in self.proofs],
        )

    def encode(self) -> bytes:
        return encode(*self.fields())


@dataclass(frozen=True)
class DecryptedShare:
    dealer: int
    index: int
    S: int
    proof: DleqProof

    def fields(self) -> tuple[Field, ...]:
        return ("share", self.dealer, self.index, self.S, [self.proof.e, self.proof.z])


def mask(group: GroupParams, secret_point: int, m: int) -> int:
    """``h(G^r) mod m`` for the pooled group element ``G^r``."""
    return hash_to_int("pvss-mask", group.p, secret_point) % m


def share_commitment(group: GroupParams, commitments: Sequence[int], i: int) -> int:
    """``X_i = prod_j C_j^(i^j)`` with exponents reduced mod ``q``."""
    p, q = group.p, group.q
    x, power = 1, 1
    for c in commitments:
        x = x * pow(c, power, p) % p
        power = power * i % q
    return x


def deal(
    group: GroupParams,
    s: int,
    n: int,
    t: int,
    pubkeys: Sequence[int],
    seed: Field,
    m: int,
    session_id: bytes = b"",
    dealer: int = 0,
) -> DealerBundle:
    if m < 2 or not 0 <= s < m:
        raise InvalidParameters(f"secret must lie in [0, m) with m >= 2, got s={s}, m={m}")
    if not 1 <= t <= n:
        raise InvalidParameters(f"threshold must satisfy 1 <= t <= n, got t={t}, n={n}")
    if len(pubkeys) != n:
        raise InvalidParameters(f"expected {n} public keys, got {len(pubkeys)}")
    if n >= group.q:
        raise InvalidParameters("share indices must stay below q")
    for y in pubkeys:
        if not group.contains(y) or y == 1:
            raise InvalidParameters(f"public key {y} is not a valid group element")

    q = group.q
    r = group.random_scalar("pvss-r", seed, session_id, dealer)
    coeffs = [r] + [
        hash_to_int("pvss-coeff", group.p, seed, session_id, dealer, j) % q for j in range(1, t)
    ]
    secret_point = group.exp(group.G, r)
    U = (s + mask(group, secret_point, m)) % m
    commitments = tuple(group.exp(group.g, a) for a in coeffs)

    shares, proofs = [], []
    for i in range(1, n + 1):
        p_i = sum(a * pow(i, j, q) for j, a in enumerate(coeffs)) % q
        X_i = group.exp(group.g, p_i)
        Y_i = group.exp(pubkeys[i - 1], p_i)
        shares.append(Y_i)
        proofs.append(dleq_prove(group, group.g, X_i, pubkeys[i - 1], Y_i, p_i, (session_id, dealer, i)))
    return DealerBundle(session_id, dealer, m, U, commitments, tuple(shares), tuple(proofs))


def verify_deal(group: GroupParams, bundle: DealerBundle, pubkeys: Sequence[int]) -> bool:
    if len(pubkeys) != bundle.n or len(bundle.proofs) != bundle.n or bundle.t < 1:
        return False
    if bundle.t > bundle.n or not 0 <= bundle.U < bundle.m:
        return False
    if not all(group.contains(c) for c in bundle.commitments):
        return False
    for i in range(1, bundle.n + 1):
        X_i = share_commitment(group, bundle.commitments, i)
        if not dleq_verify(group, group.g, X_i, pubkeys[i - 1], bundle.shares[i - 1], bundle.proofs[i - 1]):
            return False
    return True


def decrypt_share(
    group: GroupParams, bundle: DealerBundle, i: int, keypair: KeyPair, pubkeys: Sequence[int]
) -> DecryptedShare:
    if not 1 <= i <= bundle.n:
        raise InvalidParameters(f"share index {i} outside [1, {bundle.n}]")
    if pubkeys[i - 1] != keypair.public or group.exp(group.G, keypair.secret) != keypair.public:
        raise InvalidParameters(f"key pair does not match public key {i}")
    Y_i = bundle.shares[i - 1]
    S = group.exp(Y_i, pow(keypair.secret, -1, group.q))
    proof = dleq_prove(group, group.G, keypair.public, S, Y_i, keypair.secret, (bundle.session_id, bundle.dealer, i))
    return DecryptedShare(bundle.dealer, i, S, proof)


def verify_share(
    group: GroupParams, bundle: DealerBundle, share: DecryptedShare, pubkeys: Sequence[int]
) -> bool:
    if share.dealer != bundle.dealer or not 1 <= share.index <= bundle.n:
        return False
    i = share.index
    return dleq_verify(group, group.G, pubkeys[i - 1], share.S, bundle.shares[i - 1], share.proof)


def lagrange_at_zero(indices: Sequence[int], q: int) -> list[int]:
    coeffs = []
    for j, ij in enumerate(indices):
        num, den = 1, 1
        for k, ik in enumerate(indices):
            if k != j:
                num = num * ik % q
                den = den * (ik - ij) % q
        coeffs.append(num * pow(den, -1, q) % q)
    return coeffs


def pool(group: GroupParams, shares: Sequence[DecryptedShare]) -> int:
    """``G^r`` from decrypted shares; no verification."""
    indices = [s.index for s in shares]
    lambdas = lagrange_at_zero(indices, group.q)
    out = 1
    for share, lam in zip(shares, lambdas):
        out = out * pow(share.S, lam, group.p) % group.p
    return out


def reconstruct(
    group: GroupParams,
    shares: Iterable[DecryptedShare],
    bundle: DealerBundle,
    t: int,
    pubkeys: Sequence[int],
) -> int:
    """Recover the dealt secret from at least ``t`` verified, distinct shares."""
    shares = list(shares)
    indices = [s.index for s in shares]
    if len(set(indices)) != len(indices):
        raise InvalidParameters(f"duplicate share indices in {sorted(indices)}")
    for s in shares:
        if not verify_share(group, bundle, s, pubkeys):
            raise VerificationError(f"share {s.index} for dealer {s.dealer} fails verification")
    if len(shares) < t:
        raise InsufficientShares(f"{len(shares)} shares supplied, threshold is {t}")
    return (bundle.U - mask(group, pool(group, shares), bundle.m)) % bundle.m
