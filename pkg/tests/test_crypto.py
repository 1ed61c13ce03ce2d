from __future__ import annotations

import hashlib
import json
import random
import time
from importlib import resources

import pytest
from hypothesis import given, settings, strategies as st

from rigbeacon import group as group_mod
from rigbeacon.commitment import Commitment, commit, open_commitment
from rigbeacon.encoding import encode, encode_field, hash_to_bits, int_to_bytes
from rigbeacon.errors import InvalidParameters
from rigbeacon.group import (
    DleqProof,
    GroupParams,
    Signature,
    dleq_prove,
    dleq_verify,
    group_setup,
    keygen,
    keypair_matches,
    sign,
    toy_group,
    verify_signature,
)
from rigbeacon.vdf import (
    VdfOutput,
    VdfParams,
    permute,
    vdf_check_pair,
    vdf_eval,
    vdf_invert,
    vdf_setup,
    vdf_verify,
)

GOLDEN = json.loads(resources.files("rigbeacon").joinpath("data/golden_vectors.json").read_text())


# -- encoding --------------------------------------------------------------


def test_int_encoding_is_minimal_big_endian_with_length():
    assert encode_field(0) == b"\x00\x00\x00\x00"
    assert encode_field(1) == b"\x00\x00\x00\x01\x01"
    assert encode_field(256) == b"\x00\x00\x00\x02\x01\x00"
    assert int_to_bytes(0) == b""


def test_bytes_str_and_list_encoding():
    assert encode_field(b"ab") == b"\x00\x00\x00\x02ab"
    assert encode_field("ab") == encode_field(b"ab")
    assert encode_field([1, b""]) == b"\x00\x00\x00\x02" + encode_field(1) + encode_field(b"")


def test_encoding_rejects_negative_and_unknown():
    with pytest.raises(ValueError):
        encode(-1)
    with pytest.raises(TypeError):
        encode(1.5)


def test_hash_to_bits_width():
    gen = hash_to_bits(300, "x")
    for _ in range(5):
        assert next(gen) < 1 << 300


# -- commitments ----------------------------------------------------------


def test_commit_golden_vector():
    g = GOLDEN["commitment"]
    c = commit(bytes.fromhex(g["value_hex"]), bytes.fromhex(g["nonce_hex"]))
    assert c.hex() == g["digest_hex"]


def test_commit_layout_matches_reference_hash():
    s, r = b"hello", bytes(range(32))
    want = hashlib.sha256(len(s).to_bytes(8, "big") + s + r).digest()
    assert commit(s, r).digest == want


def test_open_round_trip_and_binding():
    r = bytes(32)
    c = commit(b"\x05", r)
    assert open_commitment(c, b"\x05", r)
    assert not open_commitment(c, b"\x06", r)
    assert not open_commitment(c, b"\x05", b"\x01" * 32)


def test_nonce_length_enforced():
    with pytest.raises(InvalidParameters):
        commit(b"x", bytes(31))
    c = commit(b"x", bytes(32))
    with pytest.raises(InvalidParameters):
        open_commitment(c, b"x", bytes(16))
    with pytest.raises(InvalidParameters):
        Commitment(b"short")


@settings(max_examples=50)
@given(st.binary(min_size=0, max_size=40), st.binary(min_size=32, max_size=32), st.data())
def test_single_bit_flip_changes_digest(s, r, data):
    c = commit(s, r)
    which = data.draw(st.sampled_from(["s", "r"] if s else ["r"]))
    buf = bytearray(s if which == "s" else r)
    bit = data.draw(st.integers(0, 8 * len(buf) - 1))
    buf[bit // 8] ^= 1 << (bit % 8)
    flipped = commit(bytes(buf), r) if which == "s" else commit(s, bytes(buf))
    assert flipped != c


# -- VDF --------------------------------------------------------------------

TOY_VDF = VdfParams(23, 3, 64, checkpoint_interval=1)


def _brute_root(z: int, p: int) -> int:
    roots = [r for r in range(p) if r * r % p == z]
    if roots:
        return next(r for r in roots if r % 2 == 0)
    return next(r for r in range(p) if r * r % p == (-z) % p and r % 2 == 1)


def test_vdf_golden_vector_mod_23():
    g = GOLDEN["vdf"]
    out = vdf_eval(TOY_VDF, g["x"])
    assert out.y == g["y"]
    assert list(out.proof) == g["states"][1:]


def test_vdf_matches_brute_force_roots_for_every_input():
    p = 23
    for x in range(p):
        u = x
        for _ in range(3):
            u = _brute_root(permute(u, p), p)
        assert vdf_eval(TOY_VDF, x).y == permute(u, p)
    assert [vdf_eval(TOY_VDF, x).y for x in range(23)] == GOLDEN["vdf"]["outputs_all_inputs"]


def test_vdf_zero_steps_is_permutation():
    out = vdf_eval(TOY_VDF, 6, steps=0)
    assert out == VdfOutput(7, ())
    assert vdf_verify(TOY_VDF, 6, out, steps=0)


def test_vdf_setup_properties():
    params = vdf_setup(64, 1000)
    assert params.modulus.bit_length() == 64
    assert params.modulus % 4 == 3
    assert vdf_setup(64, 1000) == params
    assert vdf_setup(64, 1000, seed=b"other").modulus != params.modulus
    with pytest.raises(InvalidParameters):
        vdf_setup(16, 10)
    with pytest.raises(InvalidParameters):
        vdf_setup(64, 0)
    with pytest.raises(InvalidParameters):
        VdfParams(29, 10, 64)  # 29 = 1 mod 4


def test_vdf_round_trip_and_checkpoint_count():
    params = vdf_setup(128, 95, checkpoint_interval=10)
    out = vdf_eval(params, 12345)
    assert len(out.proof) == 10 == params.checkpoint_count()
    assert out.proof[-1] == permute(out.y, params.modulus)
    assert vdf_verify(params, 12345, out)


def test_vdf_tampers_rejected():
    params = vdf_setup(128, 200)
    out = vdf_eval(params, 99)
    assert not vdf_verify(params, 99, VdfOutput(out.y + 1, out.proof))
    proof = list(out.proof)
    proof[3] ^= 1
    assert not vdf_verify(params, 99, VdfOutput(out.y, tuple(proof)))
    assert not vdf_verify(params, 100, out)
    with pytest.raises(InvalidParameters):
        vdf_verify(params, 99, VdfOutput(out.y, out.proof[:-1]))


def test_vdf_inversion_is_exact_inverse():
    params = vdf_setup(64, 50)
    rng = random.Random(1)
    for _ in range(20):
        y = rng.randrange(params.modulus)
        x = vdf_invert(params, y)
        assert vdf_eval(params, x).y == y
        assert vdf_check_pair(params, x, y)
        assert not vdf_check_pair(params, x, (y + 1) % params.modulus)


@pytest.mark.slow
def test_vdf_eval_slower_than_verify():
    params = vdf_setup(256, 2000)
    t0 = time.perf_counter()
    out = vdf_eval(params, 7)
    t1 = time.perf_counter()
    assert vdf_verify(params, 7, out)
    t2 = time.perf_counter()
    assert (t1 - t0) / (t2 - t1) >= 10


# -- group, DLEQ, signatures ------------------------------------------------


def test_toy_group_generator_in_subgroup():
    grp = toy_group()
    assert (grp.p, grp.q, grp.g) == (23, 11, 4)
    assert pow(4, 11, 23) == 1
    subgroup = {pow(x, 2, 23) for x in range(1, 23)}
    assert grp.g in subgroup and grp.G in subgroup
    assert grp.G != 1


def test_group_rejects_bad_parameters():
    with pytest.raises(InvalidParameters):
        GroupParams(23, 11, 5, 4)  # 5 is a non-residue mod 23
    with pytest.raises(InvalidParameters):
        GroupParams.from_safe_prime(29)
    with pytest.raises(InvalidParameters):
        group_setup(16)


def test_group_setup_deterministic_and_safe():
    a = group_setup(64, seed=b"t")
    assert a == group_setup(64, seed=b"t")
    assert a.p == 2 * a.q + 1 and a.bits == 64
    assert pow(a.g, a.q, a.p) == 1 and pow(a.G, a.q, a.p) == 1


def test_pinned_512_bit_prime_regenerates(monkeypatch):
    monkeypatch.setattr(group_mod, "_PINNED", {})
    fresh = group_mod._safe_prime.__wrapped__(512, group_mod.DEFAULT_SEED)
    assert fresh == group_setup(512).p


def test_keygen():
    grp = group_setup(64)
    kp = keygen(grp, "a")
    assert kp.public == pow(grp.G, kp.secret, grp.p)
    assert keypair_matches(grp, kp)
    assert keygen(grp, "b") != kp


def _dlog(base: int, h: int, p: int) -> int:
    return next(k for k in range(p) if pow(base, k, p) == h)


def test_dleq_hand_check_mod_23():
    grp = toy_group()
    g1, g2, x = grp.g, grp.G, 5
    h1, h2 = pow(g1, x, 23), pow(g2, x, 23)
    proof = dleq_prove(grp, g1, h1, g2, h2, x)
    assert dleq_verify(grp, g1, h1, g2, h2, proof)
    # the prover's commitments share one exponent w, and z = w - e x mod q
    a1 = pow(g1, proof.z, 23) * pow(h1, proof.e, 23) % 23
    a2 = pow(g2, proof.z, 23) * pow(h2, proof.e, 23) % 23
    w = _dlog(g1, a1, 23)
    assert pow(g2, w, 23) == a2
    assert proof.z == (w - proof.e * x) % 11


def test_dleq_rejects_false_statement_and_perturbation():
    grp = group_setup(64)
    g1, g2 = grp.g, grp.G
    h1, h2 = grp.exp(g1, 5), grp.exp(g2, 5)
    proof = dleq_prove(grp, g1, h1, g2, h2, 5)
    assert not dleq_verify(grp, g1, h1, g2, grp.exp(g2, 6), proof)
    assert not dleq_verify(grp, g1, h1, g2, h2, DleqProof(proof.e, (proof.z + 1) % grp.q))
    assert not dleq_verify(grp, g1, h1, g2, h2, DleqProof((proof.e + 1) % grp.q, proof.z))
    with pytest.raises(InvalidParameters):
        dleq_prove(grp, g1, h1, g2, grp.p - 1, 5)


def test_dleq_soundness_smoke():
    grp = group_setup(64)
    rng = random.Random(7)
    for _ in range(1000):
        x, y = rng.randrange(1, grp.q), rng.randrange(1, grp.q)
        if x == y:
            continue
        g1, g2 = grp.exp(grp.g, rng.randrange(1, grp.q)), grp.exp(grp.G, rng.randrange(1, grp.q))
        honest = dleq_prove(grp, g1, grp.exp(g1, x), g2, grp.exp(g2, x), x)
        assert dleq_verify(grp, g1, grp.exp(g1, x), g2, grp.exp(g2, x), honest)
        assert not dleq_verify(grp, g1, grp.exp(g1, x), g2, grp.exp(g2, y), honest)


def test_signatures():
    grp = group_setup(64)
    kp = keygen(grp, "signer")
    sig = sign(grp, kp, b"msg")
    assert verify_signature(grp, kp.public, b"msg", sig)
    assert not verify_signature(grp, kp.public, b"msh", sig)
    assert not verify_signature(grp, keygen(grp, "other").public, b"msg", sig)
    assert not verify_signature(grp, kp.public, b"msg", Signature(sig.e, (sig.z + 1) % grp.q))
    assert sign(grp, kp, b"msg") == sig
