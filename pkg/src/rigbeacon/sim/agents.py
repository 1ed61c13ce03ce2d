"""Participant behaviours for simulated sessions.

Every choice an agent makes is a hash of the run seed, the session id and
the agent's roster index, so runs replay exactly and paired runs (say, one
where participant 0 withholds and one where it does not) pick the same
values.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Mapping, Sequence

from ..encoding import Field, hash_fields, hash_to_int
from ..errors import InvalidParameters, ScenarioError
from ..group import DleqProof, KeyPair
from ..beacon.commit import SessionConfig, make_commit, make_reveal
from ..beacon.messages import Record
from ..beacon.pvss_beacon import (
    Participants,
    PvssSessionConfig,
    make_bundle,
    make_prepare,
    make_reconstruction,
)
from ..pvss import DealerBundle

HONEST = "honest-uniform"
CONSTANT = "constant"
WITHHOLD = "withhold-after-commit"
EQUIVOCATE = "equivocate"
ALLIANCE = "alliance"
KINDS = (HONEST, CONSTANT, WITHHOLD, EQUIVOCATE, ALLIANCE)
ALLIANCE_RULES = ("fixed-sum", "copy")


@dataclass(frozen=True)
class AgentStrategy:
    """``constant`` uses ``value``; ``alliance`` uses ``members``, ``rule`` and ``target``.

    Alliance rules: ``fixed-sum`` makes the members' values add up to
    ``target`` mod ``m``; ``copy`` makes every member play the value of the
    lowest-indexed member.
    """

    kind: str = HONEST
    value: int = 0
    members: tuple[int, ...] = ()
    rule: str = "fixed-sum"
    target: int = 0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise InvalidParameters(f"unknown agent kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == ALLIANCE:
            if not self.members:
                raise InvalidParameters("alliance needs at least one member")
            if self.rule not in ALLIANCE_RULES:
                raise InvalidParameters(f"unknown alliance rule {self.rule!r}")
        object.__setattr__(self, "members", tuple(sorted(self.members)))

    @classmethod
    def from_json(cls, d: Mapping[str, Any], where: str = "agents") -> "AgentStrategy":
        if not isinstance(d, Mapping) or "kind" not in d:
            raise ScenarioError(where, "agent entries need a 'kind'")
        unknown = set(d) - {"kind", "value", "members", "rule", "target"}
        if unknown:
            raise ScenarioError(f"{where}.{sorted(unknown)[0]}", "unknown agent field")
        try:
            return cls(
                kind=str(d["kind"]),
                value=int(d.get("value", 0)),
                members=tuple(int(x) for x in d.get("members", ())),
                rule=str(d.get("rule", "fixed-sum")),
                target=int(d.get("target", 0)),
            )
        except (InvalidParameters, TypeError, ValueError) as exc:
            raise ScenarioError(where, str(exc)) from None

    def to_json(self) -> dict[str, Any]:
        d: dict[str, Any] = {"kind": self.kind}
        if self.kind == CONSTANT:
            d["value"] = self.value
        if self.kind == ALLIANCE:
            d.update(members=list(self.members), rule=self.rule, target=self.target)
        return d


@dataclass(frozen=True)
class Agent:
    index: int
    keypair: KeyPair
    strategy: AgentStrategy = AgentStrategy()


def _uniform(seed: Field, session_id: bytes, index: int, m: int) -> int:
    return hash_to_int("agent-value", seed, session_id, index) % m


def choose_value(agent: Agent, session_id: bytes, m: int, seed: Field) -> int:
    st = agent.strategy
    if st.kind == CONSTANT:
        return st.value % m
    if st.kind == ALLIANCE:
        if agent.index not in st.members:
            raise InvalidParameters(f"agent {agent.index} is not a member of its alliance")
        if st.rule == "copy":
            return _uniform(seed, session_id, st.members[0], m)
        if agent.index != st.members[-1]:
            return _uniform(seed, session_id, agent.index, m)
        others = sum(_uniform(seed, session_id, j, m) for j in st.members[:-1])
        return (st.target - others) % m
    return _uniform(seed, session_id, agent.index, m)


def choose_nonce(agent: Agent, session_id: bytes, seed: Field, tag: str = "") -> bytes:
    return hash_fields("agent-nonce", seed, session_id, agent.index, tag)


def commit_phase_records(agent: Agent, config: SessionConfig, seed: Field) -> list[Record]:
    s = choose_value(agent, config.session_id, config.m, seed)
    r = choose_nonce(agent, config.session_id, seed)
    out: list[Record] = [make_commit(config, agent.index, agent.keypair, s, r)]
    if agent.strategy.kind == EQUIVOCATE:
        r2 = choose_nonce(agent, config.session_id, seed, "second")
        out.append(make_commit(config, agent.index, agent.keypair, (s + 1) % config.m, r2))
    return out


def reveal_phase_records(agent: Agent, config: SessionConfig, seed: Field) -> list[Record]:
    if agent.strategy.kind == WITHHOLD:
        return []
    s = choose_value(agent, config.session_id, config.m, seed)
    r = choose_nonce(agent, config.session_id, seed)
    return [make_reveal(config, agent.index, agent.keypair, s, r)]


def prepare_phase_records(agent: Agent, config: PvssSessionConfig, seed: Field) -> list[Record]:
    return [make_prepare(config, agent.index, agent.keypair)]


def distribute_phase_records(
    agent: Agent, config: PvssSessionConfig, participants: Participants, seed: Field
) -> list[Record]:
    if agent.index not in participants.order:
        return []
    s = choose_value(agent, config.session_id, config.m, seed)
    msg = make_bundle(config, participants, agent.index, agent.keypair, s, ("deal", seed, agent.index))
    if agent.strategy.kind == EQUIVOCATE:
        # a dealer who cheats on distribution: the first share's proof is broken
        b = msg.bundle
        bad = DleqProof(b.proofs[0].e, (b.proofs[0].z + 1) % config.group.q)
        tampered = replace(b, proofs=(bad,) + b.proofs[1:])
        msg = replace(msg, bundle=tampered).signed(config.group, agent.keypair)
    return [msg]


def reconstruct_phase_records(
    agent: Agent,
    config: PvssSessionConfig,
    participants: Participants,
    bundles: Sequence[DealerBundle],
    seed: Field,
) -> list[Record]:
    if agent.strategy.kind == WITHHOLD or agent.index not in participants.order:
        return []
    return [make_reconstruction(config, participants, agent.index, agent.keypair, bundles)]
