"""Build the dense payoff matrix, check the uniform equilibrium and show why parallel games fail.

Run: python3 demos/game_walkthrough.py
"""

from __future__ import annotations

from rigbeacon.equilibria import kernel_uniqueness_check, parallel_counterexample, verify_uniform_is_ne
from rigbeacon.game import build_matrix, valid_densities


def main() -> None:
    matrix = build_matrix((8, 3))
    print("B^(8,3):")
    print(matrix)
    report = verify_uniform_is_ne(matrix)
    kernel = kernel_uniqueness_check(matrix)
    print(f"payoff of every pure row against uniform: {sorted(set(report.row_values))}")
    print(f"kernel rank {kernel.rank}, unique uniform equilibrium: {kernel.unique}")
    print(f"valid densities for m = 12: {valid_densities(12)}")

    ce = parallel_counterexample(3)
    print("three parallel bit games, both players copying one bit:")
    print(f"  output distribution {ce.distribution}, equilibrium: {ce.is_equilibrium}, uniform: {ce.is_uniform}")


if __name__ == "__main__":
    main()
