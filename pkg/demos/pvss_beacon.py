"""PVSS beacon: a silent participant changes nothing but its own reward.

Run: python3 demos/pvss_beacon.py
"""

from __future__ import annotations

from pathlib import Path

from rigbeacon.errors import AvailabilityFailure
from rigbeacon.sim.batch import run_scenario
from rigbeacon.sim.scenario import load_scenario

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def main() -> None:
    honest = load_scenario(SCENARIOS / "honest_pvss.json").with_overrides(sessions=1)
    silent = load_scenario(SCENARIOS / "silent_pvss.json").with_overrides(sessions=1)
    (h,) = run_scenario(honest)
    (s,) = run_scenario(silent)
    print(f"records per kind: {sorted({r.kind for r in h.transcript})}, total {len(h.transcript)} for n = {honest.n}")
    print(f"honest run: v = {h.result.v}, rewards {h.result.rewards}")
    print(f"one silent: v = {s.result.v}, rewards {s.result.rewards}")

    majority_silent = honest.with_overrides(n=5, agents=[{"kind": "withhold-after-commit"}] * 3)
    try:
        run_scenario(majority_silent)
    except AvailabilityFailure as exc:
        print(f"three of five silent: {exc}")


if __name__ == "__main__":
    main()
