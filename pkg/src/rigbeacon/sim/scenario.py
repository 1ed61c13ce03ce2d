"""Scenario documents: everything needed to reproduce a batch of sessions.

A scenario is a JSON object::

    {
      "name": "honest-commit",
      "variant": "commit",              # or "pvss"
      "n": 4, "m": 16, "f": 1,
      "deposit": 10, "reward": 1,
      "delta": 2,
      "timing": {"T_commit": 3, "T_reveal": 3, "T_wait": 2},
      "vdf": {"security": 64, "difficulty": 64, "steps_per_slot": 64},
      "group_bits": 64,
      "sort_rule": "key-hash",          # "previous-round" | "ledger-order"
      "agents": [{"kind": "honest-uniform"}, ...],
      "sessions": 1,
      "seed": 7,
      "session_id": "demo",
      "epochs": {"count": 10, "stakes": [1, 1, 2], "roster_size": 4, "initial_seed": 0}
    }

PVSS timing keys are ``T_prepare``, ``T_distribute`` and ``T_reconstruct``.
``agents`` may be shorter than ``n``; missing entries are honest. Every key
except ``variant``, ``n`` and ``m`` has a default (see ``DEFAULTS``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from ..beacon.commit import SessionConfig
from ..beacon.common import check_beacon_game, half_bits, parse_sort_rule
from ..beacon.pvss_beacon import PvssSessionConfig
from ..errors import InvalidParameters, ScenarioError
from ..game import check_dense_params
from ..group import GroupParams, group_setup
from ..vdf import VdfParams, vdf_setup
from .agents import AgentStrategy

VARIANTS = ("commit", "pvss")
TIMING_KEYS = {
    "commit": ("T_commit", "T_reveal", "T_wait"),
    "pvss": ("T_prepare", "T_distribute", "T_reconstruct"),
}
DEFAULTS: dict[str, Any] = {
    "name": "scenario",
    "f": 1,
    "deposit": 10,
    "reward": 1,
    "delta": 2,
    "group_bits": 64,
    "sort_rule": "key-hash",
    "sessions": 1,
    "seed": 0,
    "session_id": "session",
}
TOP_LEVEL_KEYS = set(DEFAULTS) | {"variant", "n", "m", "timing", "vdf", "agents", "epochs"}


def _int(d: Mapping[str, Any], key: str, where: str, minimum: int | None = None) -> int:
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ScenarioError(where, f"expected an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise ScenarioError(where, f"must be >= {minimum}, got {v}")
    return v


@dataclass(frozen=True)
class EpochSpec:
    count: int
    stakes: tuple[int, ...]
    roster_size: int
    initial_seed: int = 0

    @classmethod
    def from_json(cls, d: Any) -> "EpochSpec":
        if not isinstance(d, Mapping):
            raise ScenarioError("epochs", "expected an object")
        for key in ("count", "stakes", "roster_size"):
            if key not in d:
                raise ScenarioError(f"epochs.{key}", "missing")
        stakes = d["stakes"]
        if not isinstance(stakes, list) or not stakes:
            raise ScenarioError("epochs.stakes", "expected a nonempty list of stake units")
        for k, s in enumerate(stakes):
            if isinstance(s, bool) or not isinstance(s, int) or s < 0:
                raise ScenarioError(f"epochs.stakes[{k}]", f"expected a non-negative integer, got {s!r}")
        if sum(stakes) == 0:
            raise ScenarioError("epochs.stakes", "total stake is zero")
        return cls(
            count=_int(d, "count", "epochs.count", 1),
            stakes=tuple(stakes),
            roster_size=_int(d, "roster_size", "epochs.roster_size", 2),
            initial_seed=_int(d, "initial_seed", "epochs.initial_seed", 0) if "initial_seed" in d else 0,
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "count": self.count,
            "stakes": list(self.stakes),
            "roster_size": self.roster_size,
            "initial_seed": self.initial_seed,
        }


@dataclass(frozen=True)
class Scenario:
    variant: str
    n: int
    m: int
    timing: Mapping[str, int]
    vdf_security: int = 64
    vdf_difficulty: int = 64
    vdf_steps_per_slot: int = 64
    agents: tuple[AgentStrategy, ...] = ()
    epochs: EpochSpec | None = None
    name: str = DEFAULTS["name"]
    f: int = DEFAULTS["f"]
    deposit: int = DEFAULTS["deposit"]
    reward: int = DEFAULTS["reward"]
    delta: int = DEFAULTS["delta"]
    group_bits: int = DEFAULTS["group_bits"]
    sort_rule: str = DEFAULTS["sort_rule"]
    sessions: int = DEFAULTS["sessions"]
    seed: int = DEFAULTS["seed"]
    session_id: str = DEFAULTS["session_id"]
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    @classmethod
    def from_json(cls, d: Any) -> "Scenario":
        if not isinstance(d, Mapping):
            raise ScenarioError("<root>", "scenario must be a JSON object")
        unknown = set(d) - TOP_LEVEL_KEYS
        if unknown:
            raise ScenarioError(sorted(unknown)[0], "unknown field")
        for key in ("variant", "n", "m", "timing"):
            if key not in d:
                raise ScenarioError(key, "missing")
        variant = d["variant"]
        if variant not in VARIANTS:
            raise ScenarioError("variant", f"expected one of {VARIANTS}, got {variant!r}")
        kw: dict[str, Any] = {"variant": variant}
        kw["n"] = _int(d, "n", "n", 1)
        kw["m"] = _int(d, "m", "m", 2)
        for key in ("f", "deposit", "reward", "delta", "group_bits", "sessions", "seed"):
            if key in d:
                kw[key] = _int(d, key, key, 0)
        for key in ("name", "sort_rule", "session_id"):
            if key in d:
                if not isinstance(d[key], str):
                    raise ScenarioError(key, f"expected a string, got {d[key]!r}")
                kw[key] = d[key]

        timing = d["timing"]
        if not isinstance(timing, Mapping):
            raise ScenarioError("timing", "expected an object")
        expected = TIMING_KEYS[variant]
        for key in set(timing) - set(expected):
            raise ScenarioError(f"timing.{key}", f"not a {variant} phase; expected {expected}")
        for key in expected:
            if key not in timing:
                raise ScenarioError(f"timing.{key}", "missing")
        kw["timing"] = {key: _int(timing, key, f"timing.{key}", 1) for key in expected}

        vdf = d.get("vdf", {})
        if not isinstance(vdf, Mapping):
            raise ScenarioError("vdf", "expected an object")
        for key in set(vdf) - {"security", "difficulty", "steps_per_slot"}:
            raise ScenarioError(f"vdf.{key}", "unknown field")
        if "security" in vdf:
            kw["vdf_security"] = _int(vdf, "security", "vdf.security", 64)
        if "difficulty" in vdf:
            kw["vdf_difficulty"] = _int(vdf, "difficulty", "vdf.difficulty", 1)
        if "steps_per_slot" in vdf:
            kw["vdf_steps_per_slot"] = _int(vdf, "steps_per_slot", "vdf.steps_per_slot", 1)

        agents = d.get("agents", [])
        if not isinstance(agents, list):
            raise ScenarioError("agents", "expected a list")
        kw["agents"] = tuple(AgentStrategy.from_json(a, f"agents[{k}]") for k, a in enumerate(agents))
        if "epochs" in d:
            kw["epochs"] = EpochSpec.from_json(d["epochs"])
        scenario = cls(**kw)
        scenario.check()
        return scenario

    def check(self) -> None:
        """Validate game and deposit parameters now, naming the field at fault."""
        if len(self.agents) > self.n:
            raise ScenarioError("agents", f"{len(self.agents)} agents for n = {self.n}")
        if self.group_bits < 32:
            raise ScenarioError("group_bits", f"must be >= 32, got {self.group_bits}")
        checks = (
            ("m", lambda: half_bits(self.m)),
            ("f", lambda: check_dense_params(self.m, self.f)),
            ("deposit", lambda: check_beacon_game(self.m, self.f, self.deposit, self.reward)),
            ("sort_rule", lambda: parse_sort_rule(self.sort_rule)),
        )
        for key, check in checks:
            try:
                check()
            except InvalidParameters as exc:
                raise ScenarioError(key, str(exc)) from None
        if self.vdf_security < 64:
            raise ScenarioError("vdf.security", "must be >= 64")

    def to_json(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "name": self.name,
            "variant": self.variant,
            "n": self.n,
            "m": self.m,
            "f": self.f,
            "deposit": self.deposit,
            "reward": self.reward,
            "delta": self.delta,
            "timing": dict(self.timing),
            "vdf": {
                "security": self.vdf_security,
                "difficulty": self.vdf_difficulty,
                "steps_per_slot": self.vdf_steps_per_slot,
            },
            "group_bits": self.group_bits,
            "sort_rule": self.sort_rule,
            "agents": [a.to_json() for a in self.agents],
            "sessions": self.sessions,
            "seed": self.seed,
            "session_id": self.session_id,
        }
        if self.epochs is not None:
            d["epochs"] = self.epochs.to_json()
        return d

    def with_overrides(self, **kw: Any) -> "Scenario":
        d = self.to_json()
        d.update(kw)
        return Scenario.from_json(d)

    def strategies(self) -> list[AgentStrategy]:
        return list(self.agents) + [AgentStrategy()] * (self.n - len(self.agents))

    def group(self) -> GroupParams:
        if "group" not in self._cache:
            self._cache["group"] = group_setup(self.group_bits)
        return self._cache["group"]

    def vdf(self) -> VdfParams:
        if "vdf" not in self._cache:
            self._cache["vdf"] = vdf_setup(self.vdf_security, self.vdf_difficulty)
        return self._cache["vdf"]

    def session_name(self, k: int) -> bytes:
        return f"{self.session_id}/{k}".encode()

    def config(
        self,
        session_id: bytes,
        roster: Mapping[int, int],
        previous_output: int | None = None,
        start_slot: int = 0,
    ) -> SessionConfig | PvssSessionConfig:
        common = dict(
            session_id=session_id,
            m=self.m,
            roster=roster,
            group=self.group(),
            vdf=self.vdf(),
            f=self.f,
            deposit=self.deposit,
            reward=self.reward,
            delta=self.delta,
            sort_rule=self.sort_rule,
            previous_output=previous_output,
            start_slot=start_slot,
        )
        if self.variant == "commit":
            return SessionConfig(vdf_steps_per_slot=self.vdf_steps_per_slot, **self.timing, **common)
        return PvssSessionConfig(**self.timing, **common)


def load_scenario(path: str | Path) -> Scenario:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError("<file>", f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError("<file>", f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return Scenario.from_json(data)
