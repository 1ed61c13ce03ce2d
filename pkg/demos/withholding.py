"""Commit beacon with and without a withholding participant.

The withholder's value is recovered from its delay puzzle, so the output
does not move; only the withholder pays.

Run: python3 demos/withholding.py
"""

from __future__ import annotations

from pathlib import Path

from rigbeacon.sim.batch import iter_scenario
from rigbeacon.sim.scenario import load_scenario

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def main() -> None:
    honest = load_scenario(SCENARIOS / "honest_commit.json").with_overrides(sessions=5)
    withheld = load_scenario(SCENARIOS / "withholder_commit.json").with_overrides(sessions=5)
    print("session  v(honest)  v(withheld)  confiscated  withholder reward")
    for k, (h, w) in enumerate(zip(iter_scenario(honest), iter_scenario(withheld))):
        print(
            f"{k:7d}  {h.result.v:9d}  {w.result.v:11d}  {str(w.result.confiscated):11s}"
            f"  {w.result.rewards.get(0, 'trimmed')}"
        )


if __name__ == "__main__":
    main()
