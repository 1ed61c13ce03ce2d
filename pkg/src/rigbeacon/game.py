"""The Random Integer Generation (RIG) game.

``n`` players (``n`` even) each pick an integer in ``[0, m)``. Players are
paired ``(1, 2), (3, 4), ...`` and every pair plays the same zero-sum
matrix game; the game's output is the sum of all picks modulo ``m``.

Player indices are **1-based** everywhere in this module, so that
``pair_of(2k - 1) == 2k``. Strategies are 0-based integers.

Two payoff families are provided:

* the base game, ``payoff_f``: the odd player wins a unit when both picks
  agree and loses one when the even player's pick is one more (mod ``m``);
* the dense family ``dense_g``: ``2f`` nonzero entries per row, for large
  ``m`` where the base matrix would almost always pay zero.

All arithmetic on mixed strategies is exact (``fractions.Fraction``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

from .errors import InvalidParameters

#: Largest ``m`` for which a dense matrix is materialized.
MAX_MATRIX_DIM = 2**20


@dataclass(frozen=True)
class GameParams:
    """Player count ``n``, strategy count ``m`` and density parameter ``f``."""

    n: int
    m: int
    f: int = 1

    def __post_init__(self) -> None:
        if self.n < 2 or self.n % 2:
            raise InvalidParameters(f"n must be even and >= 2, got {self.n}")
        check_dense_params(self.m, self.f)

    @classmethod
    def unchecked(cls, n: int, m: int, f: int = 1) -> "GameParams":
        """Build parameters without validation. For negative-control tests only."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "n", n)
        object.__setattr__(obj, "m", m)
        object.__setattr__(obj, "f", f)
        return obj


def check_dense_params(m: int, f: int) -> None:
    if m < 2:
        raise InvalidParameters(f"m must be >= 2, got {m}")
    if not 1 <= f <= m // 2:
        raise InvalidParameters(f"f must satisfy 1 <= f <= m/2, got f={f}, m={m}")
    if gcd(f, m) != 1:
        raise InvalidParameters(f"gcd(f,m) must be 1, got gcd({f},{m})={gcd(f, m)}")


def valid_densities(m: int) -> list[int]:
    """Every ``f`` accepted for strategy count ``m``."""
    return [f for f in range(1, m // 2 + 1) if gcd(f, m) == 1]


def pair_of(i: int, n: int) -> int:
    """Partner of 1-based player ``i`` among ``n`` players."""
    if n < 2 or n % 2:
        raise InvalidParameters(f"n must be even and >= 2, got {n}")
    if not 1 <= i <= n:
        raise InvalidParameters(f"player index {i} outside [1, {n}]")
    return i + 1 if i % 2 else i - 1


def _check_strategy(s: int, m: int) -> None:
    if not 0 <= s < m:
        raise InvalidParameters(f"strategy {s} outside [0, {m})")


def payoff_f(a: int, b: int, m: int) -> int:
    """Base-game payoff of the odd player picking ``a`` against ``b``."""
    if m < 2:
        raise InvalidParameters(f"m must be >= 2, got {m}")
    _check_strategy(a, m)
    _check_strategy(b, m)
    d = (a - b) % m
    if d == 0:
        return 1
    if d == m - 1:
        return -1
    return 0


def dense_g(l: int, m: int, f: int, *, check: bool = True) -> int:
    """Dense payoff as a function of the column-minus-row offset ``l``."""
    if check:
        check_dense_params(m, f)
    l %= m
    if l <= f - 1:
        return 1
    if l >= m - f:
        return -1
    return 0


def matrix_entry(i: int, j: int, m: int, f: int = 1, *, check: bool = True) -> int:
    """Payoff to the odd player for row ``i`` against column ``j``.

    ``f == 1`` is the base game (``payoff_f``); ``f >= 2`` is ``dense_g(j - i)``.
    The two agree up to relabelling every strategy ``s -> -s``; the base game
    is kept verbatim so that ``m``-by-``m`` base matrices are reproduced
    exactly. Usable for any ``m``, without materializing a matrix.
    """
    if check:
        check_dense_params(m, f)
    if f == 1:
        d = (i - j) % m
        return 1 if d == 0 else (-1 if d == m - 1 else 0)
    return dense_g(j - i, m, f, check=False)


@dataclass(frozen=True)
class PayoffMatrix:
    """Square integer payoff matrix for the odd (row) player."""

    entries: tuple[tuple[int, ...], ...]
    m: int = field(init=False)

    def __post_init__(self) -> None:
        rows = tuple(tuple(int(v) for v in row) for row in self.entries)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise InvalidParameters("payoff matrix must be square and non-empty")
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "m", len(rows))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def rows(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def is_circulant(self) -> bool:
        m = self.m
        return all(
            self.entries[(i + 1) % m][(j + 1) % m] == self.entries[i][j]
            for i in range(m)
            for j in range(m)
        )

    def nonzeros_per_row(self) -> list[int]:
        return [sum(1 for v in row if v) for row in self.entries]

    def invariant_violations(self, f: int | None = None) -> list[str]:
        """Names of violated structural invariants (empty when all hold)."""
        problems = []
        if any(v not in (-1, 0, 1) for row in self.entries for v in row):
            problems.append("entries in {-1,0,1}")
        if not self.is_circulant():
            problems.append("circulant")
        if any(sum(row) for row in self.entries):
            problems.append("row sums zero")
        if any(sum(col) for col in zip(*self.entries)):
            problems.append("column sums zero")
        if f is not None and any(c != 2 * f for c in self.nonzeros_per_row()):
            problems.append(f"{2 * f} nonzeros per row")
        return problems

    def with_entry(self, i: int, j: int, value: int) -> "PayoffMatrix":
        rows = self.rows()
        rows[i][j] = value
        return PayoffMatrix(tuple(map(tuple, rows)))

    def __str__(self) -> str:
        return "\n".join(" ".join(f"{v:2d}" for v in row) for row in self.entries)


def build_matrix(params: GameParams | tuple[int, int], *, check: bool = True) -> PayoffMatrix:
    """Materialize the ``m``-by-``m`` payoff matrix for ``(m, f)``.

    Accepts ``GameParams`` or a bare ``(m, f)`` pair. ``check=False``
    skips the ``gcd(f, m) == 1`` validation; tests use it to build
    deliberately invalid matrices.
    """
    if isinstance(params, GameParams):
        m, f = params.m, params.f
    else:
        m, f = params
    if check:
        check_dense_params(m, f)
    if m > MAX_MATRIX_DIM:
        raise InvalidParameters(f"m={m} exceeds {MAX_MATRIX_DIM}; use matrix_entry")
    return PayoffMatrix(
        tuple(tuple(matrix_entry(i, j, m, f, check=False) for j in range(m)) for i in range(m))
    )


def rig_matrix(m: int) -> PayoffMatrix:
    """The base-game matrix: ``1`` on the diagonal, ``-1`` one step right (cyclically)."""
    if m < 2:
        raise InvalidParameters(f"m must be >= 2, got {m}")
    return PayoffMatrix(tuple(tuple(payoff_f(i, j, m) for j in range(m)) for i in range(m)))


def _check_outcome(outcome: Sequence[int], m: int) -> None:
    if len(outcome) < 2 or len(outcome) % 2:
        raise InvalidParameters(f"outcome length must be even and >= 2, got {len(outcome)}")
    for s in outcome:
        _check_strategy(s, m)


def outcome_payoffs(outcome: Sequence[int], matrix: PayoffMatrix) -> tuple[int, ...]:
    """Per-player payoffs (1-based order) of a pure outcome."""
    _check_outcome(outcome, matrix.m)
    utilities: list[int] = []
    for k in range(0, len(outcome), 2):
        u = matrix[outcome[k], outcome[k + 1]]
        utilities.extend((u, -u))
    return tuple(utilities)


def game_output(outcome: Sequence[int], m: int) -> int:
    """The random integer produced by an outcome: sum of picks mod ``m``."""
    _check_outcome(outcome, m)
    return sum(outcome) % m


@dataclass(frozen=True)
class MixedStrategy:
    """Probability vector over ``[0, m)`` with exact rational entries."""

    probs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        probs = tuple(Fraction(p) for p in self.probs)
        if len(probs) < 2:
            raise InvalidParameters("a mixed strategy needs at least 2 entries")
        if any(p < 0 or p > 1 for p in probs):
            raise InvalidParameters("probabilities must lie in [0, 1]")
        if sum(probs) != 1:
            raise InvalidParameters(f"probabilities sum to {sum(probs)}, not 1")
        object.__setattr__(self, "probs", probs)

    @property
    def m(self) -> int:
        return len(self.probs)

    @classmethod
    def pure(cls, s: int, m: int) -> "MixedStrategy":
        _check_strategy(s, m)
        return cls(tuple(Fraction(int(k == s)) for k in range(m)))

    def support(self) -> tuple[int, ...]:
        return tuple(k for k, p in enumerate(self.probs) if p)


def uniform_profile(m: int) -> MixedStrategy:
    if m < 2:
        raise InvalidParameters(f"m must be >= 2, got {m}")
    return MixedStrategy(tuple(Fraction(1, m) for _ in range(m)))


def expected_utility(row: MixedStrategy, col: MixedStrategy, matrix: PayoffMatrix) -> Fraction:
    """``row^T . matrix . col`` in exact arithmetic."""
    if row.m != matrix.m or col.m != matrix.m:
        raise InvalidParameters(
            f"dimension mismatch: row {row.m}, column {col.m}, matrix {matrix.m}"
        )
    total = Fraction(0)
    for i, p in enumerate(row.probs):
        if not p:
            continue
        r = matrix.entries[i]
        total += p * sum((q * r[j] for j, q in enumerate(col.probs) if q), Fraction(0))
    return total
