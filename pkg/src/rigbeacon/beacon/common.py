"""Rules shared by both beacon variants: ordering, even-trimming, settlement, output."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Mapping, Sequence

from ..encoding import hash_fields
from ..errors import InvalidParameters, RigError
from ..game import check_dense_params, matrix_entry
from ..vdf import VdfParams, vdf_eval_cached


class SessionAborted(RigError):
    """The session cannot produce an output."""


class SortRule(str, Enum):
    PREVIOUS_ROUND = "previous-round"
    KEY_HASH = "key-hash"
    LEDGER_ORDER = "ledger-order"


def parse_sort_rule(rule: str | SortRule) -> SortRule:
    try:
        return SortRule(rule)
    except ValueError:
        raise InvalidParameters(
            f"unknown sorting rule {rule!r}; expected one of {[r.value for r in SortRule]}"
        ) from None


def half_bits(m: int) -> int:
    """``b`` such that ``m == 2**(2*b)``; raises unless ``m`` is a power of 4."""
    b = (m.bit_length() - 1) // 2
    if m < 4 or m != 1 << (2 * b):
        raise InvalidParameters(f"m must be a power of 4 (m = 2^(2b), b >= 1), got {m}")
    return b


def check_beacon_game(m: int, f: int, deposit: int, reward: int) -> None:
    half_bits(m)
    check_dense_params(m, f)
    if deposit <= 1 + reward:
        raise InvalidParameters(
            f"deposit must exceed max payoff plus reward (1 + {reward}), got {deposit}"
        )


def sort_participants(
    rule: SortRule | str,
    session_id: bytes,
    public_keys: Mapping[int, int],
    ledger_order: Sequence[int] = (),
    previous_output: int | None = None,
) -> list[int]:
    """Deterministic ordering of participant ids.

    ``previous-round`` sorts by ``H(previous output, pk)`` (a shuffle keyed by
    the last beacon value); ``key-hash`` by ``H(session id, pk)``, comparing
    digests as bytes; ``ledger-order`` keeps ``ledger_order``.
    """
    rule = parse_sort_rule(rule)
    ids = list(public_keys)
    if rule is SortRule.LEDGER_ORDER:
        missing = set(ids) - set(ledger_order)
        if missing:
            raise InvalidParameters(f"ledger order lacks participants {sorted(missing)}")
        return [i for i in ledger_order if i in public_keys]
    if rule is SortRule.KEY_HASH:
        return sorted(ids, key=lambda i: hash_fields(session_id, public_keys[i]))
    if previous_output is None:
        raise InvalidParameters("previous-round ordering needs the previous beacon output")
    return sorted(ids, key=lambda i: hash_fields("previous-round", previous_output, public_keys[i]))


def trim_to_even(digests: Mapping[int, bytes]) -> int | None:
    """Participant to drop when the count is odd: the one with the largest record digest."""
    if len(digests) % 2 == 0:
        return None
    return max(digests, key=lambda i: (digests[i], i))


def pair_payoffs(
    ordering: Sequence[int], values: Mapping[int, int], m: int, f: int
) -> dict[int, int]:
    """Payoffs of the pair games, pairing consecutive entries of ``ordering``."""
    if len(ordering) % 2:
        raise InvalidParameters("pairing needs an even number of participants")
    payoffs = {}
    for a, b in zip(ordering[::2], ordering[1::2]):
        u = matrix_entry(values[a], values[b], m, f, check=False)
        payoffs[a], payoffs[b] = u, -u
    return payoffs


def bitwise_cut(v: int, m: int, vdf: VdfParams) -> tuple[int, int, int]:
    """Split ``v`` into low half ``v1`` and high half ``v2``; return ``(v1, v2, (v1 + VDF(v2)) mod 2^b)``."""
    b = half_bits(m)
    v1, v2 = v & ((1 << b) - 1), v >> b
    return v1, v2, (v1 + vdf_eval_cached(vdf, v2).y) % (1 << b)


@dataclass
class BeaconResult:
    variant: str
    session_id: str
    m: int
    b: int
    ordering: list[int]
    valid: list[int]
    values: dict[int, int]
    v: int
    v1: int
    v2: int
    v_tilde: int
    payoffs: dict[int, int]
    rewards: dict[int, int]
    confiscated: dict[int, int]
    exclusions: list[tuple[int, str]] = field(default_factory=list)
    trimmed: int | None = None
    rejected: list[tuple[int, str, int, str]] = field(default_factory=list)

    def to_json(self) -> dict[str, Any]:
        d = asdict(self)
        for key in ("values", "payoffs", "rewards", "confiscated"):
            d[key] = {str(k): v for k, v in sorted(d[key].items())}
        d["exclusions"] = [list(e) for e in self.exclusions]
        d["rejected"] = [list(r) for r in self.rejected]
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, d: Mapping[str, Any]) -> "BeaconResult":
        kw = dict(d)
        for key in ("values", "payoffs", "rewards", "confiscated"):
            kw[key] = {int(k): int(v) for k, v in d[key].items()}
        kw["exclusions"] = [(int(a), str(b)) for a, b in d["exclusions"]]
        kw["rejected"] = [(int(a), str(b), int(c), str(e)) for a, b, c, e in d["rejected"]]
        return cls(**kw)

    @classmethod
    def loads(cls, text: str) -> "BeaconResult":
        return cls.from_json(json.loads(text))


def settle(
    *,
    variant: str,
    session_id: bytes,
    m: int,
    f: int,
    vdf: VdfParams,
    values: Mapping[int, int],
    ordering: Sequence[int],
    digests: Mapping[int, bytes],
    paid: set[int],
    deposit: int,
    reward: int,
    confiscate: Mapping[int, str],
    exclusions: Sequence[tuple[int, str]],
    rejected: Sequence[tuple[int, str, int, str]] = (),
) -> BeaconResult:
    """Trim to even, play the pair games, compute ``v`` and ``v~``, pay rewards.

    ``values`` holds every participant whose value is known and who was not
    excluded; ``ordering`` orders them. Participants in ``paid`` receive
    ``u_i + c``, the other valid ones only ``u_i``.
    """
    b = half_bits(m)
    trimmed = trim_to_even({i: digests[i] for i in values})
    valid = [i for i in ordering if i != trimmed]
    if not valid:
        raise SessionAborted("no valid participants remain")
    kept = {i: values[i] for i in valid}
    payoffs = pair_payoffs(valid, kept, m, f)
    v = sum(kept.values()) % m
    v1, v2, v_tilde = bitwise_cut(v, m, vdf)
    rewards = {i: payoffs[i] + (reward if i in paid else 0) for i in valid}
    exclusions = list(exclusions)
    if trimmed is not None:
        exclusions.append((trimmed, "even-trim"))
    return BeaconResult(
        variant=variant,
        session_id=session_id.hex(),
        m=m,
        b=b,
        ordering=list(valid),
        valid=sorted(valid),
        values=dict(sorted(kept.items())),
        v=v,
        v1=v1,
        v2=v2,
        v_tilde=v_tilde,
        payoffs=dict(sorted(payoffs.items())),
        rewards=dict(sorted(rewards.items())),
        confiscated={i: deposit for i in sorted(confiscate)},
        exclusions=sorted(exclusions),
        trimmed=trimmed,
        rejected=list(rejected),
    )
