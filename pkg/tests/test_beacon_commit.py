from __future__ import annotations

import hashlib
from dataclasses import replace

import pytest

from rigbeacon.beacon import commit as cb
from rigbeacon.beacon.common import BeaconResult, SessionAborted, bitwise_cut, half_bits, sort_participants, trim_to_even
from rigbeacon.beacon.messages import CommitMessage, RevealMessage, record_from_json
from rigbeacon.encoding import encode, hash_fields
from rigbeacon.errors import InvalidParameters, PhaseError, TimingViolation
from rigbeacon.group import group_setup, keygen
from rigbeacon.vdf import VdfParams, vdf_invert, vdf_setup

GROUP = group_setup(64)
VDF = vdf_setup(64, 40)
KPS = {i: keygen(GROUP, ("beacon-test", i)) for i in range(6)}


def config(n=4, m=16, **kw):
    kw.setdefault("sort_rule", "ledger-order")
    return cb.SessionConfig(b"sess", m, {i: KPS[i].public for i in range(n)}, GROUP, VDF, **kw)


def nonce(i, tag=""):
    return hash_fields("nonce", i, tag)


def commit_msg(cfg, i, s, slot=1, tag=""):
    return cb.make_commit(cfg, i, KPS[i], s, nonce(i, tag)).at(slot)


def reveal_msg(cfg, i, s, slot=None, tag=""):
    slot = cfg.reveal_start + 1 if slot is None else slot
    return cb.make_reveal(cfg, i, KPS[i], s, nonce(i, tag)).at(slot)


def run(cfg, values, withhold=()):
    sess = cb.CommitSession(cfg)
    for i, s in values.items():
        assert sess.submit(commit_msg(cfg, i, s))
    for i, s in values.items():
        if i not in withhold:
            assert sess.submit(reveal_msg(cfg, i, s))
    return sess


def test_well_formed_commit_and_reveal_accepted():
    cfg = config()
    sess = cb.CommitSession(cfg)
    assert sess.submit_commit(commit_msg(cfg, 0, 3)).accepted
    assert sess.submit_reveal(reveal_msg(cfg, 0, 3)).accepted


@pytest.mark.parametrize("slot,reason", [(3, cb.LATE), (4, cb.LATE), (2, None), (0, None)])
def test_commit_window_is_exclusive_of_end(slot, reason):
    cfg = config(T_commit=3)
    v = cb.CommitSession(cfg).submit_commit(commit_msg(cfg, 0, 3, slot=slot))
    assert v.reason == reason


def test_reveal_window():
    cfg = config()
    sess = cb.CommitSession(cfg)
    sess.submit(commit_msg(cfg, 0, 3))
    assert sess.submit(reveal_msg(cfg, 0, 3, slot=cfg.reveal_start - 1)).reason == cb.EARLY
    assert sess.submit(reveal_msg(cfg, 0, 3, slot=cfg.reveal_end)).reason == cb.LATE
    assert sess.submit(reveal_msg(cfg, 0, 3, slot=cfg.reveal_end - 1)).accepted


def test_conflicting_commit_marks_equivocation():
    cfg = config()
    sess = cb.CommitSession(cfg)
    first = commit_msg(cfg, 1, 3)
    second = commit_msg(cfg, 1, 4, tag="x")
    assert sess.submit(first)
    assert sess.submit(second).reason == cb.EQUIVOCATION
    assert sess.evidence[1] == [first, second]
    assert sess.excluded[1] == cb.EXCLUDED_EQUIVOCATION
    assert sess.submit(reveal_msg(cfg, 1, 3)).reason == cb.NO_VALID_COMMIT


def test_identical_resubmission_is_duplicate_not_equivocation():
    cfg = config()
    sess = cb.CommitSession(cfg)
    msg = commit_msg(cfg, 1, 3)
    sess.submit(msg)
    assert sess.submit(msg.at(2)).reason == cb.DUPLICATE
    assert 1 not in sess.excluded


def test_each_commit_rule_has_its_own_reason():
    cfg = config()
    sess = cb.CommitSession(cfg)
    good = commit_msg(cfg, 0, 3)
    assert sess.submit(replace(good, session_id=b"other")).reason == cb.WRONG_SESSION
    assert sess.submit(replace(good, sender=5).signed(GROUP, KPS[5])).reason == cb.UNKNOWN_SENDER
    assert sess.submit(replace(good, commitment=bytes(32))).reason == cb.BAD_SIGNATURE
    stolen = cb.participation_proof(cfg, KPS[1], 0)
    assert sess.submit(replace(good, participation_proof=stolen).signed(GROUP, KPS[0])).reason == cb.BAD_PARTICIPATION_PROOF
    assert sess.submit(replace(good, vdf_difficulty=41).signed(GROUP, KPS[0])).reason == cb.BAD_VDF_PARAMS
    assert sess.submit(replace(good, vdf_input=VDF.modulus).signed(GROUP, KPS[0])).reason == cb.BAD_VDF_PARAMS
    assert [r[3] for r in sess.rejected] == [
        cb.WRONG_SESSION,
        cb.UNKNOWN_SENDER,
        cb.BAD_SIGNATURE,
        cb.BAD_PARTICIPATION_PROOF,
        cb.BAD_VDF_PARAMS,
        cb.BAD_VDF_PARAMS,
    ]
    assert sess.submit(good).accepted


def test_reveal_rules():
    cfg = config()
    sess = cb.CommitSession(cfg)
    sess.submit(commit_msg(cfg, 0, 3))
    assert sess.submit(reveal_msg(cfg, 0, 4)).reason == cb.COMMITMENT_MISMATCH
    assert sess.submit(reveal_msg(cfg, 2, 4)).reason == cb.NO_VALID_COMMIT
    assert sess.submit(replace(reveal_msg(cfg, 0, 3), nonce=bytes(32))).reason == cb.BAD_SIGNATURE
    assert sess.submit(reveal_msg(cfg, 0, 3)).accepted
    assert sess.submit(reveal_msg(cfg, 0, 3)).reason == cb.DUPLICATE


def test_two_player_settlement():
    cfg = config(n=2, m=4, reward=1, deposit=5)
    res = run(cfg, {0: 1, 1: 1}).finalize(cfg.finalize_slot)
    assert res.v == 2
    assert res.ordering == [0, 1]
    assert res.payoffs == {0: 1, 1: -1}
    assert res.rewards == {0: 2, 1: 0}
    assert res.confiscated == {}


def test_withholder_recovered_and_confiscated():
    cfg = config()
    values = {0: 5, 1: 9, 2: 14, 3: 2}
    honest = run(cfg, values).finalize()
    withheld = run(cfg, values, withhold={2}).finalize()
    assert withheld.v == honest.v == sum(values.values()) % 16
    assert withheld.values == honest.values
    assert withheld.confiscated == {2: cfg.deposit}
    assert withheld.rewards[2] == withheld.payoffs[2]
    assert honest.rewards[2] == honest.payoffs[2] + cfg.reward


def test_reveal_contradicting_puzzle_excludes_sender():
    cfg = config()
    sess = cb.CommitSession(cfg)
    for i, s in {0: 1, 1: 2, 2: 3}.items():
        sess.submit(commit_msg(cfg, i, s))
    # participant 3 commits to 7 but its puzzle encodes 8
    good = cb.make_commit(cfg, 3, KPS[3], 7, nonce(3))
    bad_x = vdf_invert(VDF, cb.vdf_target(cfg, 3, 8, nonce(3)))
    sess.submit(replace(good, vdf_input=bad_x).signed(GROUP, KPS[3]).at(1))
    for i, s in {0: 1, 1: 2, 2: 3, 3: 7}.items():
        assert sess.submit(reveal_msg(cfg, i, s))
    res = sess.finalize()
    assert (3, cb.EXCLUDED_VDF_MISMATCH) in res.exclusions
    assert res.confiscated == {3: cfg.deposit}
    assert 3 not in res.values


def test_odd_count_trims_largest_digest_without_penalty():
    cfg = config(n=3)
    sess = run(cfg, {0: 1, 1: 2, 2: 3})
    digests = {i: sess.commits[i].digest() for i in range(3)}
    victim = max(digests, key=digests.get)
    res = sess.finalize()
    assert res.trimmed == victim
    assert victim not in res.values and victim not in res.rewards
    assert res.confiscated == {}
    assert res.v == sum(s for i, s in {0: 1, 1: 2, 2: 3}.items() if i != victim) % 16


def test_trim_even_count_unchanged():
    assert trim_to_even({1: b"\x01", 2: b"\x02"}) is None
    assert trim_to_even({1: b"\x01", 2: b"\x02", 3: b"\x00"}) == 2


def test_single_committer_aborts():
    cfg = config(n=1)
    with pytest.raises(SessionAborted):
        run(cfg, {0: 1}).finalize()


def test_finalize_too_early():
    cfg = config()
    with pytest.raises(PhaseError):
        run(cfg, {0: 1, 1: 1}).finalize(cfg.finalize_slot - 1)


def test_key_hash_ordering_by_digest_bytes():
    pks = {0: KPS[0].public, 1: KPS[1].public}
    d = {i: hashlib.sha256(encode(b"sess", pk)).digest() for i, pk in pks.items()}
    assert sort_participants("key-hash", b"sess", pks) == sorted(pks, key=d.get)


def test_other_sort_rules():
    pks = {i: KPS[i].public for i in range(4)}
    assert sort_participants("ledger-order", b"s", pks, ledger_order=[2, 0, 3, 1]) == [2, 0, 3, 1]
    a = sort_participants("previous-round", b"s", pks, previous_output=5)
    assert a == sort_participants("previous-round", b"s", pks, previous_output=5)
    assert sorted(a) == [0, 1, 2, 3]
    with pytest.raises(InvalidParameters):
        sort_participants("alphabetical", b"s", pks)
    with pytest.raises(InvalidParameters):
        sort_participants("previous-round", b"s", pks)


def test_bitwise_cut_decomposition():
    toy = VdfParams(23, 3, 64, checkpoint_interval=1)
    assert half_bits(16) == 2
    assert bitwise_cut(0b1101, 16, toy) == (1, 3, 3)


def test_config_invariants():
    with pytest.raises(InvalidParameters):
        config(m=8)
    with pytest.raises(InvalidParameters):
        config(deposit=2, reward=1)
    with pytest.raises(InvalidParameters):
        config(sort_rule="previous-round")
    with pytest.raises(TimingViolation, match="T_commit > Δ"):
        cb.CommitSession(config(T_commit=2, delta=2))


def test_t_eval_from_rate():
    assert config(vdf_steps_per_slot=10).T_eval == 4
    assert config(vdf_steps_per_slot=10, T_wait=4).timing_violations() == ["T_wait > T_Eval"]
    assert config(vdf_steps_per_slot=10, T_wait=5).timing_violations() == []


def test_result_round_trip_and_replay_determinism():
    cfg = config()
    values = {0: 5, 1: 9, 2: 14, 3: 2}
    a = run(cfg, values, withhold={1})
    res = a.finalize()
    assert BeaconResult.loads(res.dumps()) == res
    again = cb.CommitSession(cfg).replay(a.transcript).finalize()
    assert again.dumps() == res.dumps()
    assert sum(res.payoffs.values()) == 0


def test_records_round_trip_through_json():
    cfg = config()
    for msg in (commit_msg(cfg, 0, 3), reveal_msg(cfg, 0, 3)):
        back = record_from_json(msg.to_json(), msg.slot)
        assert back == msg
        assert back.encode() == msg.encode()
        assert isinstance(back, (CommitMessage, RevealMessage))
