"""PVSS beacon: prepare, distribute and reconstruct phases.

Every participant deals its value ``s_i`` to all ``n`` participants with a
``(t, n)`` PVSS bundle, ``t = ceil(n / 2)``. In the reconstruct phase each
participant posts one record holding its decrypted share of every
dealer's bundle, its own included. Any ``t`` verified shares open a
dealer's value, so silence in the reconstruct phase cannot hide or bias
anything.

Phase windows, relative to ``start_slot`` and exclusive of the end slot:
prepare ``[0, T_prepare)``, distribute ``[T_prepare, +T_distribute)``,
reconstruct ``[.., +T_reconstruct)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil
from typing import Iterable, Mapping

from ..encoding import encode
from ..errors import AvailabilityFailure, InvalidParameters, PhaseError, TimingViolation
from ..group import GroupParams, KeyPair, sign, verify_signature
from ..pvss import DealerBundle, DecryptedShare, deal, decrypt_share, reconstruct, verify_deal, verify_share
from ..vdf import VdfParams
from .commit import (
    ACCEPTED,
    BAD_SIGNATURE,
    DUPLICATE,
    EARLY,
    LATE,
    UNKNOWN_RECORD,
    UNKNOWN_SENDER,
    WRONG_SESSION,
    Verdict,
)
from .common import (
    BeaconResult,
    SessionAborted,
    SortRule,
    check_beacon_game,
    parse_sort_rule,
    settle,
    sort_participants,
)
from .messages import BundleMessage, PrepareMessage, ReconstructMessage, Record

BAD_ELIGIBILITY_PROOF = "bad-eligibility-proof"
NOT_PARTICIPANT = "not-participant"
INVALID_BUNDLE = "invalid-bundle"
MISSING_BUNDLE = "missing-bundle"
BAD_SHARE = "bad-share"


@dataclass(frozen=True)
class PvssSessionConfig:
    session_id: bytes
    m: int
    roster: Mapping[int, int]
    group: GroupParams
    vdf: VdfParams
    f: int = 1
    deposit: int = 10
    reward: int = 1
    T_prepare: int = 3
    T_distribute: int = 3
    T_reconstruct: int = 3
    delta: int = 2
    sort_rule: SortRule | str = SortRule.KEY_HASH
    previous_output: int | None = None
    start_slot: int = 0

    def __post_init__(self) -> None:
        check_beacon_game(self.m, self.f, self.deposit, self.reward)
        object.__setattr__(self, "sort_rule", parse_sort_rule(self.sort_rule))
        object.__setattr__(self, "roster", dict(sorted(self.roster.items())))
        if len(self.roster) < 2:
            raise InvalidParameters(f"roster needs at least 2 members, got {len(self.roster)}")
        for i, pk in self.roster.items():
            if not self.group.contains(pk) or pk == 1:
                raise InvalidParameters(f"public key of participant {i} is not a group element")
        if self.delta < 1:
            raise InvalidParameters(f"delta must be >= 1, got {self.delta}")
        if self.sort_rule is SortRule.PREVIOUS_ROUND and self.previous_output is None:
            raise InvalidParameters("previous-round ordering needs previous_output")

    def timing_violations(self) -> list[str]:
        return [
            f"{name} > Δ"
            for name in ("T_prepare", "T_distribute", "T_reconstruct")
            if getattr(self, name) <= self.delta
        ]

    @property
    def distribute_start(self) -> int:
        return self.start_slot + self.T_prepare

    @property
    def reconstruct_start(self) -> int:
        return self.distribute_start + self.T_distribute

    @property
    def finalize_slot(self) -> int:
        return self.reconstruct_start + self.T_reconstruct


def threshold(n: int) -> int:
    return ceil(n / 2)


def _eligibility_statement(config: PvssSessionConfig, sender: int) -> bytes:
    return encode("participate", config.session_id, sender)


def make_prepare(config: PvssSessionConfig, sender: int, kp: KeyPair) -> PrepareMessage:
    proof = sign(config.group, kp, _eligibility_statement(config, sender))
    return PrepareMessage(config.session_id, sender, proof).signed(config.group, kp)


@dataclass(frozen=True)
class Participants:
    """Outcome of the prepare phase: share index ``k + 1`` belongs to ``order[k]``."""

    order: tuple[int, ...]
    t: int

    @property
    def n(self) -> int:
        return len(self.order)

    def index_of(self, member: int) -> int:
        return self.order.index(member) + 1


def make_bundle(
    config: PvssSessionConfig,
    participants: Participants,
    sender: int,
    kp: KeyPair,
    s: int,
    seed,
) -> BundleMessage:
    pubkeys = [config.roster[i] for i in participants.order]
    b = deal(
        config.group,
        s,
        participants.n,
        participants.t,
        pubkeys,
        seed,
        config.m,
        session_id=config.session_id,
        dealer=sender,
    )
    return BundleMessage(config.session_id, sender, b).signed(config.group, kp)


def make_reconstruction(
    config: PvssSessionConfig,
    participants: Participants,
    sender: int,
    kp: KeyPair,
    bundles: Iterable[DealerBundle],
) -> ReconstructMessage:
    """Decrypt this participant's share of every dealer's bundle, in one record.

    The own share is included: otherwise a dealer's secret would need ``t``
    shares from the other ``n - 1`` participants and ``n - t`` silent
    parties could block it.
    """
    pubkeys = [config.roster[i] for i in participants.order]
    i = participants.index_of(sender)
    shares = tuple(
        decrypt_share(config.group, b, i, kp, pubkeys)
        for b in sorted(bundles, key=lambda b: b.dealer)
    )
    return ReconstructMessage(config.session_id, sender, shares).signed(config.group, kp)


@dataclass
class PvssSession:
    config: PvssSessionConfig
    prepares: dict[int, PrepareMessage] = field(default_factory=dict)
    prepare_order: list[int] = field(default_factory=list)
    participants: Participants | None = None
    bundles: dict[int, BundleMessage] = field(default_factory=dict)
    excluded: dict[int, str] = field(default_factory=dict)
    shares: dict[int, dict[int, DecryptedShare]] = field(default_factory=dict)
    reconstructors: set[int] = field(default_factory=set)
    flagged: set[int] = field(default_factory=set)
    rejected: list[tuple[int, str, int, str]] = field(default_factory=list)
    transcript: list[Record] = field(default_factory=list)
    _distribution_closed: bool = False

    def __post_init__(self) -> None:
        violations = self.config.timing_violations()
        if violations:
            raise TimingViolation(violations)

    def _reject(self, msg: Record, reason: str) -> Verdict:
        self.rejected.append((msg.sender, msg.kind, msg.slot, reason))
        return Verdict(False, reason)

    def _check(self, msg: Record, start: int, end: int) -> str | None:
        if msg.session_id != self.config.session_id:
            return WRONG_SESSION
        if msg.slot is None:
            raise PhaseError("record has no receive slot")
        if msg.slot < start:
            return EARLY
        if msg.slot >= end:
            return LATE
        pk = self.config.roster.get(msg.sender)
        if pk is None:
            return UNKNOWN_SENDER
        if not msg.verify(self.config.group, pk):
            return BAD_SIGNATURE
        return None

    @property
    def pubkeys(self) -> list[int]:
        assert self.participants is not None
        return [self.config.roster[i] for i in self.participants.order]

    def submit(self, msg: Record) -> Verdict:
        if isinstance(msg, PrepareMessage):
            return self.submit_prepare(msg)
        if isinstance(msg, BundleMessage):
            return self.submit_bundle(msg)
        if isinstance(msg, ReconstructMessage):
            return self.submit_reconstruction(msg)
        self.transcript.append(msg)
        return self._reject(msg, UNKNOWN_RECORD)

    def submit_prepare(self, msg: PrepareMessage) -> Verdict:
        cfg = self.config
        self.transcript.append(msg)
        reason = self._check(msg, cfg.start_slot, cfg.distribute_start)
        if reason:
            return self._reject(msg, reason)
        if not verify_signature(
            cfg.group, cfg.roster[msg.sender], _eligibility_statement(cfg, msg.sender), msg.eligibility_proof
        ):
            return self._reject(msg, BAD_ELIGIBILITY_PROOF)
        if msg.sender in self.prepares:
            return self._reject(msg, DUPLICATE)
        self.prepares[msg.sender] = msg
        self.prepare_order.append(msg.sender)
        return ACCEPTED

    def close_prepare(self) -> Participants:
        if self.participants is None:
            cfg = self.config
            if len(self.prepares) < 2:
                raise SessionAborted(f"{len(self.prepares)} valid prepare messages; at least 2 needed")
            order = sort_participants(
                cfg.sort_rule,
                cfg.session_id,
                {i: cfg.roster[i] for i in self.prepare_order},
                ledger_order=self.prepare_order,
                previous_output=cfg.previous_output,
            )
            self.participants = Participants(tuple(order), threshold(len(order)))
        return self.participants

    def submit_bundle(self, msg: BundleMessage) -> Verdict:
        cfg = self.config
        self.transcript.append(msg)
        reason = self._check(msg, cfg.distribute_start, cfg.reconstruct_start)
        if reason:
            return self._reject(msg, reason)
        parts = self.close_prepare()
        if msg.sender not in parts.order:
            return self._reject(msg, NOT_PARTICIPANT)
        if msg.sender in self.bundles or msg.sender in self.excluded:
            return self._reject(msg, DUPLICATE)
        b = msg.bundle
        if (
            b.session_id != cfg.session_id
            or b.dealer != msg.sender
            or b.m != cfg.m
            or b.n != parts.n
            or b.t != parts.t
            or not verify_deal(cfg.group, b, self.pubkeys)
        ):
            self.excluded[msg.sender] = INVALID_BUNDLE
            return self._reject(msg, INVALID_BUNDLE)
        self.bundles[msg.sender] = msg
        return ACCEPTED

    def close_distribution(self) -> None:
        """Exclude every participant without a valid bundle by the deadline."""
        if self._distribution_closed:
            return
        parts = self.close_prepare()
        for i in parts.order:
            if i not in self.bundles and i not in self.excluded:
                self.excluded[i] = MISSING_BUNDLE
        self._distribution_closed = True

    def submit_reconstruction(self, msg: ReconstructMessage) -> Verdict:
        cfg = self.config
        self.transcript.append(msg)
        reason = self._check(msg, cfg.reconstruct_start, cfg.finalize_slot)
        if reason:
            return self._reject(msg, reason)
        parts = self.close_prepare()
        self.close_distribution()
        if msg.sender not in parts.order:
            return self._reject(msg, NOT_PARTICIPANT)
        if msg.sender in self.reconstructors:
            return self._reject(msg, DUPLICATE)
        self.reconstructors.add(msg.sender)
        index = parts.index_of(msg.sender)
        bad = False
        for share in msg.shares:
            if share.dealer in self.excluded:
                continue
            bundle = self.bundles.get(share.dealer)
            if (
                bundle is None
                or share.index != index
                or not verify_share(cfg.group, bundle.bundle, share, self.pubkeys)
            ):
                bad = True
                continue
            self.shares.setdefault(share.dealer, {}).setdefault(index, share)
        if bad:
            self.flagged.add(msg.sender)
            self.rejected.append((msg.sender, msg.kind, msg.slot, BAD_SHARE))
            return Verdict(False, BAD_SHARE)
        return ACCEPTED

    def replay(self, records: Iterable[Record]) -> "PvssSession":
        for r in records:
            self.submit(r)
        return self

    def finalize(self, slot: int | None = None) -> BeaconResult:
        cfg = self.config
        if slot is not None and slot < cfg.finalize_slot:
            raise PhaseError(f"finalize needs slot >= {cfg.finalize_slot}, got {slot}")
        parts = self.close_prepare()
        self.close_distribution()
        values: dict[int, int] = {}
        for dealer in parts.order:
            if dealer in self.excluded:
                continue
            got = [self.shares.get(dealer, {})[k] for k in sorted(self.shares.get(dealer, {}))]
            if len(got) < parts.t:
                raise AvailabilityFailure(dealer, len(got), parts.t)
            values[dealer] = reconstruct(cfg.group, got[: parts.t], self.bundles[dealer].bundle, parts.t, self.pubkeys)
        if not values:
            raise SessionAborted("every dealer was excluded")
        ordering = [i for i in parts.order if i in values]
        return settle(
            variant="pvss",
            session_id=cfg.session_id,
            m=cfg.m,
            f=cfg.f,
            vdf=cfg.vdf,
            values=values,
            ordering=ordering,
            digests={i: self.bundles[i].digest() for i in values},
            paid=(self.reconstructors - self.flagged) & set(values),
            deposit=cfg.deposit,
            reward=cfg.reward,
            confiscate=dict(self.excluded),
            exclusions=sorted(self.excluded.items()),
            rejected=self.rejected,
        )
