"""Commit/reveal beacon with delay-function recovery of withheld values.

Each participant commits to ``s_i`` with ``H(s_i | r_i)`` and additionally
publishes a delay puzzle ``x_i`` whose evaluation yields
``y_i = s_i + m * k(r_i)``. Whoever withholds the reveal has their value
recovered by evaluating the puzzle during ``T_wait``; a reveal contradicting
the puzzle marks the sender as cheating.

Phase windows, relative to ``start_slot`` and exclusive of the end slot:
commit ``[0, T_commit)``, reveal ``[T_commit, T_commit + T_reveal)``;
finalization needs a further ``T_wait`` slots.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil
from typing import Iterable, Mapping

from ..commitment import Commitment, commit, open_commitment
from ..encoding import encode, hash_to_int, int_to_bytes
from ..errors import InvalidParameters, PhaseError, TimingViolation
from ..group import GroupParams, KeyPair, Signature, sign, verify_signature
from ..vdf import VdfParams, vdf_check_pair, vdf_eval, vdf_invert, vdf_verify
from .common import (
    BeaconResult,
    SessionAborted,
    SortRule,
    check_beacon_game,
    parse_sort_rule,
    settle,
    sort_participants,
)
from .messages import CommitMessage, Record, RevealMessage

# rejection reason codes
WRONG_SESSION = "wrong-session"
EARLY = "early"
LATE = "late"
UNKNOWN_SENDER = "unknown-sender"
BAD_SIGNATURE = "bad-signature"
BAD_PARTICIPATION_PROOF = "bad-participation-proof"
BAD_VDF_PARAMS = "bad-vdf-params"
EQUIVOCATION = "equivocation"
DUPLICATE = "duplicate"
NO_VALID_COMMIT = "no-valid-commit"
COMMITMENT_MISMATCH = "commitment-mismatch"
UNKNOWN_RECORD = "unknown-record"

# exclusion reasons
EXCLUDED_EQUIVOCATION = "equivocation"
EXCLUDED_VDF_MISMATCH = "vdf-mismatch"
EXCLUDED_VDF_INVALID = "vdf-invalid"
WITHHELD = "withheld"


@dataclass(frozen=True)
class SessionConfig:
    session_id: bytes
    m: int
    roster: Mapping[int, int]
    group: GroupParams
    vdf: VdfParams
    f: int = 1
    deposit: int = 10
    reward: int = 1
    T_commit: int = 3
    T_reveal: int = 3
    T_wait: int = 2
    delta: int = 2
    vdf_steps_per_slot: int = 0
    sort_rule: SortRule | str = SortRule.KEY_HASH
    previous_output: int | None = None
    start_slot: int = 0

    def __post_init__(self) -> None:
        check_beacon_game(self.m, self.f, self.deposit, self.reward)
        object.__setattr__(self, "sort_rule", parse_sort_rule(self.sort_rule))
        object.__setattr__(self, "roster", dict(sorted(self.roster.items())))
        if not self.roster:
            raise InvalidParameters("roster is empty")
        for i, pk in self.roster.items():
            if not self.group.contains(pk) or pk == 1:
                raise InvalidParameters(f"public key of participant {i} is not a group element")
        if self.vdf.modulus < 4 * self.m:
            raise InvalidParameters("VDF modulus must be at least 4m to embed values")
        if self.delta < 1:
            raise InvalidParameters(f"delta must be >= 1, got {self.delta}")
        if self.sort_rule is SortRule.PREVIOUS_ROUND and self.previous_output is None:
            raise InvalidParameters("previous-round ordering needs previous_output")

    @property
    def T_eval(self) -> int:
        """Slots needed for one delay evaluation; one slot evaluates ``vdf_steps_per_slot`` rounds."""
        rate = self.vdf_steps_per_slot or self.vdf.difficulty
        return ceil(self.vdf.difficulty / rate)

    def timing_violations(self) -> list[str]:
        out = []
        if self.T_commit <= self.delta:
            out.append("T_commit > Δ")
        if self.T_reveal <= self.delta:
            out.append("T_reveal > Δ")
        if self.T_wait <= self.T_eval:
            out.append("T_wait > T_Eval")
        return out

    @property
    def reveal_start(self) -> int:
        return self.start_slot + self.T_commit

    @property
    def reveal_end(self) -> int:
        return self.reveal_start + self.T_reveal

    @property
    def finalize_slot(self) -> int:
        return self.reveal_end + self.T_wait

    @property
    def pad_range(self) -> int:
        return self.vdf.modulus // self.m - 1


def value_bytes(s: int) -> bytes:
    return int_to_bytes(s)


def vdf_pad(config: SessionConfig, sender: int, nonce: bytes) -> int:
    return hash_to_int("vdf-pad", config.session_id, sender, nonce) % config.pad_range


def vdf_target(config: SessionConfig, sender: int, s: int, nonce: bytes) -> int:
    """The delay output ``y = s + m * k(r)`` a committer binds to; ``y mod m`` recovers ``s``."""
    return s + config.m * vdf_pad(config, sender, nonce)


def participation_proof(config: SessionConfig, kp: KeyPair, sender: int) -> Signature:
    return sign(config.group, kp, _participation_statement(config, sender))


def _participation_statement(config: SessionConfig, sender: int) -> bytes:
    return encode("participate", config.session_id, sender)


def make_commit(
    config: SessionConfig, sender: int, kp: KeyPair, s: int, nonce: bytes
) -> CommitMessage:
    """A signed commit for value ``s`` with nonce ``nonce`` (puzzle built by fast inversion)."""
    if not 0 <= s < config.m:
        raise InvalidParameters(f"value must lie in [0, {config.m}), got {s}")
    c = commit(value_bytes(s), nonce)
    x = vdf_invert(config.vdf, vdf_target(config, sender, s, nonce))
    msg = CommitMessage(
        config.session_id,
        sender,
        c.digest,
        participation_proof(config, kp, sender),
        config.vdf.modulus,
        config.vdf.difficulty,
        x,
    )
    return msg.signed(config.group, kp)


def make_reveal(
    config: SessionConfig, sender: int, kp: KeyPair, s: int, nonce: bytes
) -> RevealMessage:
    return RevealMessage(config.session_id, sender, s, nonce).signed(config.group, kp)


@dataclass
class Verdict:
    accepted: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.accepted


ACCEPTED = Verdict(True)


@dataclass
class CommitSession:
    """Single-writer state machine for one commit/reveal session.

    Submissions must arrive in ledger order with their receive slots set.
    ``finalize`` is a pure function of the accepted transcript.
    """

    config: SessionConfig
    commits: dict[int, CommitMessage] = field(default_factory=dict)
    evidence: dict[int, list[CommitMessage]] = field(default_factory=dict)
    reveals: dict[int, RevealMessage] = field(default_factory=dict)
    commit_order: list[int] = field(default_factory=list)
    excluded: dict[int, str] = field(default_factory=dict)
    rejected: list[tuple[int, str, int, str]] = field(default_factory=list)
    transcript: list[Record] = field(default_factory=list)

    def __post_init__(self) -> None:
        violations = self.config.timing_violations()
        if violations:
            raise TimingViolation(violations)

    def _reject(self, msg: Record, reason: str) -> Verdict:
        self.rejected.append((msg.sender, msg.kind, msg.slot, reason))
        return Verdict(False, reason)

    def _window(self, slot: int | None, start: int, end: int) -> str | None:
        if slot is None:
            raise PhaseError("record has no receive slot")
        if slot < start:
            return EARLY
        if slot >= end:
            return LATE
        return None

    def _signed_by_roster(self, msg: Record) -> str | None:
        pk = self.config.roster.get(msg.sender)
        if pk is None:
            return UNKNOWN_SENDER
        if not msg.verify(self.config.group, pk):
            return BAD_SIGNATURE
        return None

    def submit(self, msg: Record) -> Verdict:
        if isinstance(msg, CommitMessage):
            return self.submit_commit(msg)
        if isinstance(msg, RevealMessage):
            return self.submit_reveal(msg)
        self.transcript.append(msg)
        return self._reject(msg, UNKNOWN_RECORD)

    def submit_commit(self, msg: CommitMessage) -> Verdict:
        cfg = self.config
        self.transcript.append(msg)
        if msg.session_id != cfg.session_id:
            return self._reject(msg, WRONG_SESSION)
        reason = self._window(msg.slot, cfg.start_slot, cfg.reveal_start) or self._signed_by_roster(msg)
        if reason:
            return self._reject(msg, reason)
        if not verify_signature(
            cfg.group,
            cfg.roster[msg.sender],
            _participation_statement(cfg, msg.sender),
            msg.participation_proof,
        ):
            return self._reject(msg, BAD_PARTICIPATION_PROOF)
        if (
            msg.vdf_modulus != cfg.vdf.modulus
            or msg.vdf_difficulty != cfg.vdf.difficulty
            or not 0 <= msg.vdf_input < cfg.vdf.modulus
        ):
            return self._reject(msg, BAD_VDF_PARAMS)
        prior = self.commits.get(msg.sender)
        if prior is not None:
            if prior.payload() == msg.payload():
                return self._reject(msg, DUPLICATE)
            self.evidence.setdefault(msg.sender, [prior]).append(msg)
            self.excluded[msg.sender] = EXCLUDED_EQUIVOCATION
            return self._reject(msg, EQUIVOCATION)
        self.commits[msg.sender] = msg
        self.commit_order.append(msg.sender)
        return ACCEPTED

    def submit_reveal(self, msg: RevealMessage) -> Verdict:
        cfg = self.config
        self.transcript.append(msg)
        if msg.session_id != cfg.session_id:
            return self._reject(msg, WRONG_SESSION)
        reason = self._window(msg.slot, cfg.reveal_start, cfg.reveal_end) or self._signed_by_roster(msg)
        if reason:
            return self._reject(msg, reason)
        if msg.sender not in self.commits or msg.sender in self.evidence:
            return self._reject(msg, NO_VALID_COMMIT)
        if msg.sender in self.reveals:
            return self._reject(msg, DUPLICATE)
        c = Commitment(self.commits[msg.sender].commitment)
        if (
            not 0 <= msg.value < cfg.m
            or len(msg.nonce) != 32
            or not open_commitment(c, value_bytes(msg.value), msg.nonce)
        ):
            return self._reject(msg, COMMITMENT_MISMATCH)
        self.reveals[msg.sender] = msg
        return ACCEPTED

    def replay(self, records: Iterable[Record]) -> "CommitSession":
        for r in records:
            self.submit(r)
        return self

    def ordering(self) -> list[int]:
        return sort_participants(
            self.config.sort_rule,
            self.config.session_id,
            {i: self.config.roster[i] for i in self.commit_order},
            ledger_order=self.commit_order,
            previous_output=self.config.previous_output,
        )

    def recover(self, sender: int) -> int | None:
        """Evaluate a withholder's puzzle; ``None`` if the output is unusable."""
        cfg = self.config
        x = self.commits[sender].vdf_input
        out = vdf_eval(cfg.vdf, x)
        if not vdf_verify(cfg.vdf, x, out):
            return None
        return out.y % cfg.m

    def finalize(self, slot: int | None = None) -> BeaconResult:
        cfg = self.config
        if slot is not None and slot < cfg.finalize_slot:
            raise PhaseError(f"finalize needs slot >= {cfg.finalize_slot}, got {slot}")
        excluded = dict(self.excluded)
        confiscate = dict(excluded)
        values: dict[int, int] = {}
        for i in self.commit_order:
            if i in excluded:
                continue
            x = self.commits[i].vdf_input
            reveal = self.reveals.get(i)
            if reveal is not None:
                y = vdf_target(cfg, i, reveal.value, reveal.nonce)
                if not vdf_check_pair(cfg.vdf, x, y):
                    excluded[i] = confiscate[i] = EXCLUDED_VDF_MISMATCH
                    continue
                values[i] = reveal.value
            else:
                s = self.recover(i)
                if s is None:
                    excluded[i] = confiscate[i] = EXCLUDED_VDF_INVALID
                    continue
                values[i] = s
                confiscate[i] = WITHHELD
        if not values:
            raise SessionAborted("no committed value survives")
        ordering = [i for i in self.ordering() if i in values]
        return settle(
            variant="commit",
            session_id=cfg.session_id,
            m=cfg.m,
            f=cfg.f,
            vdf=cfg.vdf,
            values=values,
            ordering=ordering,
            digests={i: self.commits[i].digest() for i in values},
            paid=set(self.reveals) & set(values),
            deposit=cfg.deposit,
            reward=cfg.reward,
            confiscate=confiscate,
            exclusions=sorted(excluded.items()),
            rejected=self.rejected,
        )
