"""Computational checks of the uniform-equilibrium theorem for RIG games.

Two independent routes establish that uniform play is the unique Nash
equilibrium of a pair game:

* :func:`kernel_uniqueness_check` follows the proof. At any equilibrium the
  opponent's strategy must be annihilated by the payoff matrix, so a
  one-dimensional kernel spanned by the all-ones vector pins it to uniform.
* :func:`support_enumeration_ne` is a brute-force oracle that enumerates
  every extreme equilibrium of the bimatrix game.

Everything is exact; no floats appear in this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping

from . import exact
from .errors import InvalidParameters, OracleTooLarge
from .game import (
    GameParams,
    MixedStrategy,
    PayoffMatrix,
    build_matrix,
    expected_utility,
    pair_of,
    rig_matrix,
    uniform_profile,
)

#: Support enumeration is exponential in ``m``; refuse beyond this.
MAX_ORACLE_DIM = 6

Profile = tuple[tuple[Fraction, ...], tuple[Fraction, ...]]


@dataclass(frozen=True)
class UniformNEReport:
    """Deviation analysis of the uniform profile for one pair game.

    ``row_values[i]`` is the odd player's payoff for pure ``i`` against a
    uniform opponent; ``column_values[j]`` the even player's payoff for pure
    ``j`` against a uniform odd player. Uniform play yields ``value``.
    """

    row_values: tuple[Fraction, ...]
    column_values: tuple[Fraction, ...]
    value: Fraction

    @property
    def max_row_gain(self) -> Fraction:
        return max(self.row_values) - self.value

    @property
    def max_column_gain(self) -> Fraction:
        return max(self.column_values) + self.value

    @property
    def product_is_zero(self) -> bool:
        return all(v == 0 for v in self.row_values)

    @property
    def is_equilibrium(self) -> bool:
        return self.max_row_gain <= 0 and self.max_column_gain <= 0

    @property
    def ok(self) -> bool:
        """Every pure deviation of either player gains exactly nothing."""
        return self.product_is_zero and all(v == 0 for v in self.column_values)


def verify_uniform_is_ne(matrix: PayoffMatrix) -> UniformNEReport:
    uniform = uniform_profile(matrix.m).probs
    rows = matrix.rows()
    row_values = tuple(exact.matvec(rows, uniform))
    column_values = tuple(-v for v in exact.vecmat(uniform, rows))
    value = sum((p * v for p, v in zip(uniform, row_values)), Fraction(0))
    return UniformNEReport(row_values, column_values, value)


@dataclass(frozen=True)
class KernelReport:
    unique: bool
    rank: int
    kernel: tuple[tuple[Fraction, ...], ...]

    @property
    def kernel_dimension(self) -> int:
        return len(self.kernel)


def kernel_uniqueness_check(matrix: PayoffMatrix) -> KernelReport:
    """True iff the rational kernel is exactly the span of the uniform vector.

    Checked for the matrix and its transpose, covering both players.
    """
    rows = matrix.rows()
    m = matrix.m
    ones = [Fraction(1)] * m
    unique = True
    for a in (rows, [list(c) for c in zip(*rows)]):
        basis = exact.nullspace(a)
        if len(basis) != 1 or exact.rank([basis[0], ones]) != 1:
            unique = False
    basis = exact.nullspace(rows)
    return KernelReport(unique, exact.rank(rows), tuple(tuple(v) for v in basis))


def _best_response_vertices(payoff: list[list[Fraction]]) -> list[tuple[Fraction, ...]]:
    """Vertices of ``{(x, w): x in simplex, x^T payoff <= w}``.

    ``payoff`` is indexed ``[own strategy][opponent strategy]`` from the
    opponent's point of view (the quantity the opponent maximizes). A vertex
    is pinned by a support ``I`` and ``|I|`` opponent strategies made
    indifferent; every such square system with a unique solution is tried.
    """
    n_own, n_opp = len(payoff), len(payoff[0])
    found: list[tuple[Fraction, ...]] = []
    for size in range(1, n_own + 1):
        for support in combinations(range(n_own), size):
            for tight in combinations(range(n_opp), size):
                # unknowns: x_i for i in support, then w
                a = [[payoff[i][j] for i in support] + [Fraction(-1)] for j in tight]
                a.append([Fraction(1)] * size + [Fraction(0)])
                rhs = [Fraction(0)] * size + [Fraction(1)]
                sol = exact.solve_unique(a, rhs)
                if sol is None or any(v <= 0 for v in sol[:size]):
                    continue
                x = [Fraction(0)] * n_own
                for i, v in zip(support, sol):
                    x[i] = v
                w = sol[size]
                opp_values = [sum(x[i] * payoff[i][j] for i in range(n_own)) for j in range(n_opp)]
                if max(opp_values) != w:
                    continue
                vec = tuple(x)
                if vec not in found:
                    found.append(vec)
    return found


def _is_equilibrium(
    x: Iterable[Fraction], y: Iterable[Fraction], a: list[list[Fraction]]
) -> bool:
    x, y = list(x), list(y)
    row_vals = exact.matvec(a, y)
    col_vals = [-v for v in exact.vecmat(x, a)]
    best_row, best_col = max(row_vals), max(col_vals)
    return all(row_vals[i] == best_row for i, p in enumerate(x) if p) and all(
        col_vals[j] == best_col for j, q in enumerate(y) if q
    )


def support_enumeration_ne(matrix: PayoffMatrix) -> set[Profile]:
    """All extreme Nash equilibria of the zero-sum game ``(A, -A)``.

    Candidate strategies for each player are the vertices of their
    best-response polyhedron (found by exhaustive support enumeration over
    exact rationals); every candidate pair passing the complementarity test
    is an equilibrium. The full equilibrium set is the union of polytopes
    spanned by these extreme points, so a singleton result means the
    equilibrium is unique. Exponential in ``m``.
    """
    m = matrix.m
    if m > MAX_ORACLE_DIM:
        raise OracleTooLarge(f"support enumeration limited to m <= {MAX_ORACLE_DIM}, got {m}")
    a = exact.to_fractions(matrix.rows())
    # row player's x is judged by the column player's payoff -A[i][j]
    xs = _best_response_vertices([[-v for v in row] for row in a])
    # column player's y is judged by the row player's payoff A[i][j]
    ys = _best_response_vertices([list(col) for col in zip(*a)])
    return {(x, y) for x in xs for y in ys if _is_equilibrium(x, y, a)}


def alliance_total_utility(
    alliance: Iterable[int],
    alliance_profile: Mapping[int, MixedStrategy],
    params: GameParams,
    matrix: PayoffMatrix | None = None,
) -> Fraction:
    """Summed expected utility of an alliance when everyone else plays uniform.

    ``alliance`` holds 1-based player indices; ``alliance_profile`` maps each
    member to its mixed strategy. Each member only meets its pair partner.
    """
    members = set(alliance)
    if not members:
        raise InvalidParameters("alliance must be non-empty")
    if set(alliance_profile) != members:
        raise InvalidParameters("alliance_profile must cover exactly the alliance members")
    if matrix is None:
        matrix = build_matrix(params)
    uniform = uniform_profile(params.m)
    total = Fraction(0)
    for i in sorted(members):
        j = pair_of(i, params.n)
        own = alliance_profile[i]
        other = alliance_profile[j] if j in members else uniform
        if own.m != params.m or other.m != params.m:
            raise InvalidParameters(f"profile of player {i} has wrong dimension")
        if i % 2:
            total += expected_utility(own, other, matrix)
        else:
            total -= expected_utility(other, own, matrix)
    return total


@dataclass(frozen=True)
class ParallelCounterexample:
    """Copy-bit profile for ``k`` parallel two-strategy games."""

    k: int
    strategy: tuple[Fraction, ...]
    distribution: dict[int, Fraction]
    equilibrium_payoff: Fraction
    deviation_gains: tuple[Fraction, Fraction]

    @property
    def is_equilibrium(self) -> bool:
        return all(g <= 0 for g in self.deviation_gains)

    @property
    def is_uniform(self) -> bool:
        size = 2**self.k
        return len(self.distribution) == size and all(
            p == Fraction(1, size) for p in self.distribution.values()
        )


def parallel_counterexample(k: int) -> ParallelCounterexample:
    """Equilibrium of ``k`` parallel bit games whose output is not uniform.

    Both players draw one uniform bit and copy it to all ``k`` positions.
    Each bit game uses the ``m = 2`` base matrix; the joint payoff is the
    sum over bits and the output is the bitwise sum (xor) of the two picks.
    Equilibrium is confirmed by checking every pure ``k``-bit deviation.
    """
    if k < 1:
        raise InvalidParameters(f"k must be >= 1, got {k}")
    size = 2**k
    bit_game = rig_matrix(2)

    def payoff(a: int, b: int) -> int:
        return sum(bit_game[(a >> t) & 1, (b >> t) & 1] for t in range(k))

    strategy = [Fraction(0)] * size
    strategy[0] += Fraction(1, 2)
    strategy[size - 1] += Fraction(1, 2)
    support = [(s, p) for s, p in enumerate(strategy) if p]

    distribution: dict[int, Fraction] = {}
    value = Fraction(0)
    for a, pa in support:
        for b, pb in support:
            distribution[a ^ b] = distribution.get(a ^ b, Fraction(0)) + pa * pb
            value += pa * pb * payoff(a, b)

    best_first = max(sum(pb * payoff(d, b) for b, pb in support) for d in range(size))
    best_second = max(sum(pa * -payoff(a, d) for a, pa in support) for d in range(size))
    return ParallelCounterexample(
        k=k,
        strategy=tuple(strategy),
        distribution=dict(sorted(distribution.items())),
        equilibrium_payoff=value,
        deviation_gains=(best_first - value, best_second + value),
    )
