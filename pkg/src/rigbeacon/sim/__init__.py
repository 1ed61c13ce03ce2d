"""Slot-level ledger simulation, participant agents, epochs and statistics."""
