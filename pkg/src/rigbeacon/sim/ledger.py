"""Discrete-slot ledger with a Δ-bounded, seeded inclusion delay."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..encoding import hash_to_int
from ..errors import InvalidParameters
from ..beacon.messages import Record


@dataclass
class SimLedger:
    """Every record broadcast at slot ``τ`` is included at a slot in ``(τ, τ + Δ]``.

    The delay is a hash of the ledger seed and the record bytes, so replays
    and counterfactual runs that share a record also share its inclusion
    slot. Records included at the same slot are ordered by digest.
    """

    delta: int
    seed: bytes = b""
    slot: int = 0
    pending: list[tuple[int, bytes, Record]] = field(default_factory=list)
    finalized: list[Record] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.delta < 1:
            raise InvalidParameters(f"delta must be >= 1, got {self.delta}")

    def inclusion_slot(self, record: Record, slot: int) -> int:
        return slot + 1 + hash_to_int("inclusion", self.seed, record.encode()) % self.delta

    def broadcast(self, record: Record, slot: int | None = None) -> int:
        slot = self.slot if slot is None else slot
        if slot < self.slot:
            raise InvalidParameters(f"cannot broadcast at slot {slot} < current slot {self.slot}")
        at = self.inclusion_slot(record, slot)
        self.pending.append((at, record.digest(), record))
        return at

    def advance(self, slot: int) -> list[Record]:
        """Move to ``slot`` and return the records included at slots up to it, stamped."""
        if slot < self.slot:
            raise InvalidParameters(f"ledger cannot move back from {self.slot} to {slot}")
        self.slot = slot
        due = sorted((p for p in self.pending if p[0] <= slot), key=lambda p: (p[0], p[1]))
        self.pending = [p for p in self.pending if p[0] > slot]
        out = [record.at(at) for at, _, record in due]
        self.finalized.extend(out)
        return out

    def view(self) -> tuple[Record, ...]:
        """The finalized prefix every observer agrees on."""
        return tuple(self.finalized)

    def drain(self) -> list[Record]:
        if not self.pending:
            return []
        return self.advance(max(p[0] for p in self.pending))
