from __future__ import annotations

import itertools
import random
from dataclasses import replace

import pytest

from rigbeacon.errors import InsufficientShares, InvalidParameters, VerificationError
from rigbeacon.group import DleqProof, dleq_prove, group_setup, keygen, toy_group
from rigbeacon.pvss import (
    DecryptedShare,
    deal,
    decrypt_share,
    lagrange_at_zero,
    mask,
    pool,
    reconstruct,
    verify_deal,
    verify_share,
)


def _dlog(base, h, p):
    return next(k for k in range(p) if pow(base, k, p) == h)


def _setup(group, n, tag="k"):
    kps = [keygen(group, (tag, i)) for i in range(1, n + 1)]
    return kps, [kp.public for kp in kps]


def test_toy_deal_matches_brute_force_polynomial():
    grp = toy_group()
    kps, pubs = _setup(grp, 3)
    b = deal(grp, 9, 3, 2, pubs, seed="pinned", m=16)
    coeffs = [_dlog(grp.g, c, grp.p) for c in b.commitments]
    assert len(coeffs) == 2

    def poly(i):
        return sum(a * i**j for j, a in enumerate(coeffs)) % grp.q

    for i in range(1, 4):
        assert b.shares[i - 1] == pow(pubs[i - 1], poly(i), grp.p)
        s = decrypt_share(grp, b, i, kps[i - 1], pubs)
        assert s.S == pow(grp.G, poly(i), grp.p)
    secret_point = pow(grp.G, coeffs[0], grp.p)
    assert (b.U - mask(grp, secret_point, 16)) % 16 == 9
    assert verify_deal(grp, b, pubs)


def test_toy_every_pair_reconstructs():
    grp = toy_group()
    kps, pubs = _setup(grp, 3)
    b = deal(grp, 3, 3, 2, pubs, seed="pinned", m=16)
    shares = [decrypt_share(grp, b, i, kps[i - 1], pubs) for i in range(1, 4)]
    for pair in itertools.combinations(shares, 2):
        assert reconstruct(grp, pair, b, 2, pubs) == 3


def test_lagrange_coefficients_interpolate_constant_term():
    q = 1009
    rng = random.Random(3)
    for _ in range(20):
        coeffs = [rng.randrange(q) for _ in range(rng.randint(1, 5))]
        idx = rng.sample(range(1, 50), len(coeffs))
        lam = lagrange_at_zero(idx, q)
        vals = [sum(a * pow(i, j, q) for j, a in enumerate(coeffs)) % q for i in idx]
        assert sum(l * v for l, v in zip(lam, vals)) % q == coeffs[0]


@pytest.fixture(scope="module")
def grp64():
    return group_setup(64)


@pytest.mark.parametrize("n", range(1, 6))
def test_threshold_exhaustive(grp64, n):
    kps, pubs = _setup(grp64, n)
    for t in range(1, n + 1):
        s = (7 * n + t) % 16
        b = deal(grp64, s, n, t, pubs, seed=("exh", n, t), m=16)
        assert verify_deal(grp64, b, pubs)
        shares = [decrypt_share(grp64, b, i, kps[i - 1], pubs) for i in range(1, n + 1)]
        for sub in itertools.combinations(shares, t):
            assert reconstruct(grp64, sub, b, t, pubs) == s
        for sub in itertools.combinations(shares, t - 1):
            with pytest.raises(InsufficientShares):
                reconstruct(grp64, sub, b, t, pubs)


def test_verify_deal_rejects_tampering(grp64):
    kps, pubs = _setup(grp64, 4)
    b = deal(grp64, 5, 4, 2, pubs, seed="t", m=16)
    p0 = b.proofs[0]
    assert not verify_deal(grp64, replace(b, proofs=(DleqProof(p0.e, (p0.z + 1) % grp64.q),) + b.proofs[1:]), pubs)
    assert not verify_deal(grp64, replace(b, shares=(b.shares[0] * grp64.g % grp64.p,) + b.shares[1:]), pubs)
    assert not verify_deal(grp64, replace(b, commitments=(grp64.g,) + b.commitments[1:]), pubs)
    assert not verify_deal(grp64, b, list(reversed(pubs)))
    assert not verify_deal(grp64, replace(b, U=16), pubs)


def test_wrong_decryption_rejected_with_any_proof(grp64):
    kps, pubs = _setup(grp64, 3)
    b = deal(grp64, 5, 3, 2, pubs, seed="w", m=16)
    good = decrypt_share(grp64, b, 1, kps[0], pubs)
    wrong_S = good.S * grp64.G % grp64.p
    assert not verify_share(grp64, b, replace(good, S=wrong_S), pubs)
    # a proof generated for the false statement does not help either
    forged = dleq_prove(grp64, grp64.G, pubs[0], wrong_S, b.shares[0], kps[0].secret)
    assert not verify_share(grp64, b, DecryptedShare(b.dealer, 1, wrong_S, forged), pubs)
    rng = random.Random(5)
    for _ in range(200):
        p = DleqProof(rng.randrange(grp64.q), rng.randrange(grp64.q))
        assert not verify_share(grp64, b, DecryptedShare(b.dealer, 1, wrong_S, p), pubs)


def test_reconstruct_errors(grp64):
    kps, pubs = _setup(grp64, 4)
    b = deal(grp64, 11, 4, 2, pubs, seed="e", m=16)
    shares = [decrypt_share(grp64, b, i, kps[i - 1], pubs) for i in range(1, 5)]
    with pytest.raises(InvalidParameters):
        reconstruct(grp64, [shares[0], shares[0]], b, 2, pubs)
    with pytest.raises(VerificationError):
        reconstruct(grp64, [shares[0], replace(shares[1], S=shares[0].S)], b, 2, pubs)
    with pytest.raises(InsufficientShares):
        reconstruct(grp64, shares[:1], b, 2, pubs)
    assert reconstruct(grp64, shares, b, 2, pubs) == 11
    assert pool(grp64, shares[:2]) == pool(grp64, shares[2:])


def test_deal_parameter_checks(grp64):
    _, pubs = _setup(grp64, 3)
    with pytest.raises(InvalidParameters):
        deal(grp64, 16, 3, 2, pubs, seed="x", m=16)
    with pytest.raises(InvalidParameters):
        deal(grp64, 1, 3, 4, pubs, seed="x", m=16)
    with pytest.raises(InvalidParameters):
        deal(grp64, 1, 3, 2, pubs[:2], seed="x", m=16)
    with pytest.raises(InvalidParameters):
        deal(toy_group(), 1, 11, 2, [4] * 11, seed="x", m=16)


def test_decrypt_rejects_wrong_key(grp64):
    kps, pubs = _setup(grp64, 3)
    b = deal(grp64, 1, 3, 2, pubs, seed="x", m=16)
    with pytest.raises(InvalidParameters):
        decrypt_share(grp64, b, 1, kps[1], pubs)
