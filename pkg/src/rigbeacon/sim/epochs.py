"""Proof-of-stake epoch loop: each beacon output seeds the next roster draw."""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import accumulate
from typing import Any, Callable, Sequence

from ..beacon.common import BeaconResult, half_bits
from ..encoding import Field, hash_to_int
from ..errors import EpochAborted, InvalidParameters, RigError
from ..group import keygen
from .agents import Agent, AgentStrategy
from .runner import run_session
from .scenario import Scenario

AgentsFactory = Callable[[int, int], AgentStrategy]


def keyed_selector(key: Field, x: int) -> int:
    """Keyed deterministic stand-in for a VRF output on ``x``."""
    return hash_to_int("vrf", key, x)


def selection_offset(seed: int, b: int, key: Field) -> Fraction:
    """Offset in ``[0, 1)``: ``((v1 + F(v2)) mod 2^b) / 2^b`` for the bitwise split of ``seed``."""
    if not 0 <= seed < 1 << b:
        raise InvalidParameters(f"seed must lie in [0, 2^{b})")
    lo = b - b // 2
    v1, v2 = seed & ((1 << lo) - 1), seed >> lo
    return Fraction((v1 + keyed_selector(key, v2)) % (1 << b), 1 << b)


def select_roster(
    seed: int, b: int, stakes: Sequence[int], size: int, key: Field = b""
) -> list[int]:
    """Systematic sampling of ``size`` roster slots over the cumulative stake line.

    Slot ``j`` goes to the party whose stake interval holds
    ``(offset + j) * total / size``. A party holding more than
    ``total / size`` may fill several slots.
    """
    if size < 1:
        raise InvalidParameters(f"roster size must be >= 1, got {size}")
    if not stakes or any(s < 0 for s in stakes) or sum(stakes) == 0:
        raise InvalidParameters("stake table must be nonempty with positive total")
    total = sum(stakes)
    edges = list(accumulate(stakes))
    offset = selection_offset(seed, b, key)
    step = Fraction(total, size)
    return [bisect_right(edges, (offset + j) * step) for j in range(size)]


@dataclass(frozen=True)
class EpochState:
    epoch: int
    seed: int
    stakes: tuple[int, ...]
    roster: tuple[int, ...]

    def to_json(self) -> dict[str, Any]:
        return {"epoch": self.epoch, "seed": self.seed, "roster": list(self.roster)}


@dataclass
class EpochRun:
    states: list[EpochState] = field(default_factory=list)
    results: list[BeaconResult] = field(default_factory=list)

    @property
    def seeds(self) -> list[int]:
        """``v_0, v_1, ..., v_k``: the initial seed followed by every beacon output."""
        return [s.seed for s in self.states] + ([self.results[-1].v_tilde] if self.results else [])

    def selection_counts(self, parties: int) -> list[int]:
        counts = [0] * parties
        for s in self.states:
            for p in s.roster:
                counts[p] += 1
        return counts


def honest_factory(party: int, slot: int) -> AgentStrategy:
    return AgentStrategy()


def run_epochs(
    initial_seed: int,
    stakes: Sequence[int],
    epochs: int,
    scenario: Scenario,
    agents_factory: AgentsFactory = honest_factory,
    roster_size: int = 4,
    seed: Field = 0,
) -> EpochRun:
    """Run ``epochs`` beacon sessions, each on a roster drawn from the previous output.

    ``scenario`` supplies the beacon variant and every session parameter
    except the roster. Roster slot ``j`` of epoch ``k`` gets a fresh key pair
    derived from ``(seed, k, j)``, so a party drawn twice acts twice.
    """
    if epochs < 1:
        raise InvalidParameters(f"need at least one epoch, got {epochs}")
    b = half_bits(scenario.m)
    group = scenario.group()
    run = EpochRun()
    current = initial_seed % (1 << b)
    key = ("epoch-selector", seed)
    for k in range(epochs):
        roster = select_roster(current, b, stakes, roster_size, key)
        run.states.append(EpochState(k, current, tuple(stakes), tuple(roster)))
        kps = {j: keygen(group, ("epoch-key", seed, k, j)) for j in range(roster_size)}
        agents = [Agent(j, kps[j], agents_factory(roster[j], j)) for j in range(roster_size)]
        config = scenario.config(
            f"{scenario.session_id}/epoch-{k}".encode(),
            {j: kp.public for j, kp in kps.items()},
            previous_output=current,
        )
        try:
            result = run_session(config, agents, (seed, k)).result
        except RigError as exc:
            raise EpochAborted(k, exc) from exc
        run.results.append(result)
        current = result.v_tilde
    return run


def stake_shares(stakes: Sequence[int]) -> list[Fraction]:
    total = sum(stakes)
    return [Fraction(s, total) for s in stakes]


def frequency_table(run: EpochRun, stakes: Sequence[int]) -> list[dict[str, Any]]:
    counts = run.selection_counts(len(stakes))
    slots = sum(counts)
    return [
        {
            "party": p,
            "stake": stakes[p],
            "share": float(share),
            "selections": counts[p],
            "frequency": counts[p] / slots if slots else 0.0,
        }
        for p, share in enumerate(stake_shares(stakes))
    ]

