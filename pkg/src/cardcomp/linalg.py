"""Exact Gaussian elimination over the rationals.

Rows are stored as ``{column: Fraction}`` dicts so the sparse transition
matrices of the level chain stay cheap to reduce.
"""
from __future__ import annotations

from collections.abc import Sequence
from fractions import Fraction

Row = dict[int, Fraction]


def _to_rows(matrix: Sequence[Sequence]) -> list[Row]:
    return [{j: Fraction(x) for j, x in enumerate(r) if x} for r in matrix]


def rref(matrix: Sequence[Sequence] | list[Row], ncols: int | None = None) -> tuple[list[Row], list[int]]:
    """Reduced row echelon form; returns ``(rows, pivot_columns)``."""
    if matrix and isinstance(matrix[0], dict):
        rows = [dict(r) for r in matrix]
        if ncols is None:
            ncols = 1 + max((max(r) for r in rows if r), default=-1)
    else:
        ncols = len(matrix[0]) if matrix else 0 if ncols is None else ncols
        rows = _to_rows(matrix)
    pivots: list[int] = []
    done: list[Row] = []
    pending = [r for r in rows if r]
    for col in range(ncols):
        # pick the sparsest row holding this column
        best = None
        for idx, r in enumerate(pending):
            if col in r and (best is None or len(r) < len(pending[best])):
                best = idx
        if best is None:
            continue
        piv = pending.pop(best)
        inv = 1 / piv[col]
        piv = {j: v * inv for j, v in piv.items()}
        for r in pending + done:
            f = r.get(col)
            if f:
                for j, v in piv.items():
                    nv = r.get(j, 0) - f * v
                    if nv:
                        r[j] = nv
                    else:
                        r.pop(j, None)
        pending = [r for r in pending if r]
        done.append(piv)
        pivots.append(col)
    return done, pivots


def nullspace(matrix: Sequence[Sequence] | list[Row], ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of ``{x : A x = 0}`` with one free variable set to 1 per vector."""
    if matrix and not isinstance(matrix[0], dict):
        ncols = len(matrix[0])
    rows, pivots = rref(matrix, ncols)
    assert ncols is not None
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for r, p in zip(rows, pivots):
            x[p] = -r.get(f, Fraction(0))
        basis.append(x)
    return basis
