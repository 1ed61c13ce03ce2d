"""Run every session a scenario describes."""

from __future__ import annotations

from typing import Iterator

from ..encoding import Field
from ..errors import TimingViolation
from .agents import Agent
from .runner import SessionRun, make_keypairs, run_session, validate_timing
from .scenario import Scenario


def scenario_agents(scenario: Scenario, seed: Field) -> list[Agent]:
    kps = make_keypairs(scenario.group(), scenario.n, seed)
    return [Agent(i, kps[i], st) for i, st in enumerate(scenario.strategies())]


def iter_scenario(scenario: Scenario, seed: int | None = None) -> Iterator[SessionRun]:
    """Sessions ``0 .. sessions - 1``; under ``previous-round`` ordering each session keys on the last output."""
    seed = scenario.seed if seed is None else seed
    agents = scenario_agents(scenario, seed)
    roster = {a.index: a.keypair.public for a in agents}
    previous = 0
    for k in range(scenario.sessions):
        config = scenario.config(scenario.session_name(k), roster, previous_output=previous)
        if k == 0:
            violations = validate_timing(config)
            if violations:
                raise TimingViolation(violations)
        run = run_session(config, agents, (seed, k))
        previous = run.result.v_tilde
        yield run


def run_scenario(scenario: Scenario, seed: int | None = None) -> list[SessionRun]:
    return list(iter_scenario(scenario, seed))
