"""Stake-weighted roster draws chained through beacon outputs.

Run: python3 demos/epochs.py
"""

from __future__ import annotations

from pathlib import Path

from rigbeacon.sim.epochs import frequency_table, run_epochs
from rigbeacon.sim.scenario import load_scenario

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def main() -> None:
    scenario = load_scenario(SCENARIOS / "epochs.json")
    stakes = [1, 2, 5]
    run = run_epochs(0, stakes, 20, scenario, roster_size=4, seed=1)
    for state, result in zip(run.states[:5], run.results):
        print(f"epoch {state.epoch}: seed {state.seed:2d} roster {list(state.roster)} -> next seed {result.v_tilde}")
    print("party  stake share  selection frequency")
    for row in frequency_table(run, stakes):
        print(f"{row['party']:5d}  {row['share']:11.3f}  {row['frequency']:19.3f}")


if __name__ == "__main__":
    main()
