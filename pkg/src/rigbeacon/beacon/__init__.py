"""Beacon protocols: commit/reveal with delay recovery, and PVSS."""
