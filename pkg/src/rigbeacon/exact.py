"""Exact linear algebra over the rationals.

Small dense routines on lists of :class:`fractions.Fraction`. Used by the
equilibrium checks, where tolerance-based comparisons would turn exact
statements (a product is the zero vector, a kernel is one-dimensional)
into approximate ones.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list[list[Fraction]]


def to_fractions(rows: Sequence[Sequence[int | Fraction]]) -> Matrix:
    return [[Fraction(v) for v in row] for row in rows]


def rref(rows: Sequence[Sequence[int | Fraction]]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    a = to_fractions(rows)
    if not a:
        return a, []
    n_rows, n_cols = len(a), len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        pivot = next((i for i in range(r, n_rows) if a[i][c] != 0), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        lead = a[r][c]
        a[r] = [v / lead for v in a[r]]
        for i in range(n_rows):
            if i != r and a[i][c] != 0:
                factor = a[i][c]
                a[i] = [vi - factor * vr for vi, vr in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(rows: Sequence[Sequence[int | Fraction]]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence[int | Fraction]]) -> Matrix:
    """Basis of the right null space, one vector per free column."""
    reduced, pivots = rref(rows)
    n_cols = len(rows[0])
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * n_cols
        vec[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -reduced[i][fc]
        basis.append(vec)
    return basis


def solve_unique(
    rows: Sequence[Sequence[int | Fraction]], rhs: Sequence[int | Fraction]
) -> list[Fraction] | None:
    """Solve ``rows @ x = rhs``; ``None`` unless the solution exists and is unique."""
    aug = [list(row) + [b] for row, b in zip(rows, rhs)]
    n_unknowns = len(rows[0])
    reduced, pivots = rref(aug)
    if n_unknowns in pivots:
        return None  # inconsistent
    if len(pivots) != n_unknowns:
        return None  # underdetermined
    return [reduced[i][n_unknowns] for i in range(n_unknowns)]


def matvec(rows: Sequence[Sequence[int | Fraction]], vec: Sequence[Fraction]) -> list[Fraction]:
    return [sum((Fraction(a) * b for a, b in zip(row, vec)), Fraction(0)) for row in rows]


def vecmat(vec: Sequence[Fraction], rows: Sequence[Sequence[int | Fraction]]) -> list[Fraction]:
    n_cols = len(rows[0])
    return [
        sum((vec[i] * Fraction(rows[i][j]) for i in range(len(rows))), Fraction(0))
        for j in range(n_cols)
    ]
