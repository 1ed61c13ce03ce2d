"""Drive agents through one beacon session over the simulated ledger."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from ..beacon.commit import CommitSession, SessionConfig
from ..beacon.common import BeaconResult
from ..beacon.messages import Record, record_from_json
from ..beacon.pvss_beacon import PvssSession, PvssSessionConfig
from ..encoding import Field, encode
from ..errors import InvalidParameters, TimingViolation
from ..group import GroupParams, KeyPair, keygen
from . import agents as ag
from .ledger import SimLedger

AnyConfig = Union[SessionConfig, PvssSessionConfig]


def validate_timing(config: AnyConfig) -> list[str]:
    """Every violated synchrony constraint, by name; empty when the timing is sound."""
    return config.timing_violations()


def make_keypairs(group: GroupParams, n: int, seed: Field) -> dict[int, KeyPair]:
    return {i: keygen(group, ("roster", seed, i)) for i in range(n)}


@dataclass
class SessionRun:
    transcript: list[Record]
    result: BeaconResult
    session: CommitSession | PvssSession

    def transcript_text(self) -> str:
        return dump_transcript(self.transcript)


def dump_transcript(records: Iterable[Record]) -> str:
    """One JSON object per line: ``{"slot": ..., "record": {...}}`` with sorted keys."""
    lines = [
        json.dumps({"slot": r.slot, "record": r.to_json()}, sort_keys=True, separators=(",", ":"))
        for r in records
    ]
    return "".join(line + "\n" for line in lines)


def load_transcript(text: str) -> list[Record]:
    out = []
    for line in text.splitlines():
        if line.strip():
            d = json.loads(line)
            out.append(record_from_json(d["record"], d["slot"]))
    return out


def _check_agents(config: AnyConfig, agents: Sequence[ag.Agent]) -> None:
    by_index = {a.index: a for a in agents}
    if len(by_index) != len(agents) or set(by_index) != set(config.roster):
        raise InvalidParameters("need exactly one agent per roster entry")
    for a in agents:
        if a.keypair.public != config.roster[a.index]:
            raise InvalidParameters(f"agent {a.index} key does not match the roster")


def _ledger_seed(config: AnyConfig, seed: Field) -> bytes:
    return encode("ledger", seed, config.session_id)


def run_session(config: AnyConfig, agents: Sequence[ag.Agent], seed: Field) -> SessionRun:
    violations = validate_timing(config)
    if violations:
        raise TimingViolation(violations)
    _check_agents(config, agents)
    agents = sorted(agents, key=lambda a: a.index)
    if isinstance(config, SessionConfig):
        return _run_commit(config, agents, seed)
    return _run_pvss(config, agents, seed)


def _step(ledger: SimLedger, session, slot: int) -> None:
    for record in ledger.advance(slot):
        session.submit(record)


def _run_commit(config: SessionConfig, agents: Sequence[ag.Agent], seed: Field) -> SessionRun:
    ledger = SimLedger(config.delta, _ledger_seed(config, seed), config.start_slot)
    session = CommitSession(config)
    for slot in range(config.start_slot, config.finalize_slot):
        _step(ledger, session, slot)
        if slot == config.start_slot:
            for a in agents:
                for r in ag.commit_phase_records(a, config, seed):
                    ledger.broadcast(r, slot)
        elif slot == config.reveal_start:
            for a in agents:
                for r in ag.reveal_phase_records(a, config, seed):
                    ledger.broadcast(r, slot)
    _step(ledger, session, config.finalize_slot)
    for record in ledger.drain():
        session.submit(record)
    result = session.finalize(ledger.slot)
    return SessionRun(list(ledger.finalized), result, session)


def _run_pvss(config: PvssSessionConfig, agents: Sequence[ag.Agent], seed: Field) -> SessionRun:
    ledger = SimLedger(config.delta, _ledger_seed(config, seed), config.start_slot)
    session = PvssSession(config)
    for slot in range(config.start_slot, config.finalize_slot):
        _step(ledger, session, slot)
        if slot == config.start_slot:
            for a in agents:
                for r in ag.prepare_phase_records(a, config, seed):
                    ledger.broadcast(r, slot)
        elif slot == config.distribute_start:
            parts = session.close_prepare()
            for a in agents:
                for r in ag.distribute_phase_records(a, config, parts, seed):
                    ledger.broadcast(r, slot)
        elif slot == config.reconstruct_start:
            session.close_distribution()
            parts = session.close_prepare()
            bundles = [m.bundle for m in session.bundles.values()]
            for a in agents:
                for r in ag.reconstruct_phase_records(a, config, parts, bundles, seed):
                    ledger.broadcast(r, slot)
    _step(ledger, session, config.finalize_slot)
    for record in ledger.drain():
        session.submit(record)
    result = session.finalize(ledger.slot)
    return SessionRun(list(ledger.finalized), result, session)


def replay(config: AnyConfig, records: Iterable[Record]) -> BeaconResult:
    """Recompute the result of a transcript from the records alone."""
    session = CommitSession(config) if isinstance(config, SessionConfig) else PvssSession(config)
    session.replay(records)
    last = max((r.slot for r in session.transcript if r.slot is not None), default=0)
    return session.finalize(max(last, config.finalize_slot))
