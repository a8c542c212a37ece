"""Sparse Gauss-Jordan elimination over the Gaussian rationals.

Rows are ``{column: coefficient}`` dicts.  Pivoting is deterministic: columns
are eliminated in increasing order and the pivot for a column is the first
remaining row (in input order) with a nonzero entry there.  Every reduced row
remembers which input rows it is a combination of, so an inconsistent system
comes back with a left-kernel certificate ``y`` (``y^T A = 0``,
``y^T b != 0``) rather than just a flag.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Sequence

from .errors import NoSolutionError
from .scalars import ONE, ZERO, GaussianRational

__all__ = ["LinearSolution", "solve_exact", "determinant"]


@dataclass(frozen=True)
class LinearSolution:
    particular: list[GaussianRational]
    kernel: list[list[GaussianRational]]
    pivots: dict[int, int] = field(default_factory=dict)  # column -> pivot index

    @property
    def kernel_dim(self) -> int:
        return len(self.kernel)


def _axpy(target: dict, factor: GaussianRational, source: dict) -> None:
    """``target -= factor * source`` in place, dropping zeros."""
    for k, v in source.items():
        nv = target.get(k, ZERO) - factor * v
        if nv:
            target[k] = nv
        else:
            target.pop(k, None)


def solve_exact(
    rows: Sequence[dict[int, GaussianRational]],
    rhs: Sequence[GaussianRational],
    ncols: int,
    labels: Sequence[Hashable] | None = None,
) -> LinearSolution:
    """Solve ``A u = b`` exactly; free variables are set to zero in ``particular``.

    Raises :class:`NoSolutionError` carrying the certificate when the system
    is inconsistent.
    """
    if len(rows) != len(rhs):
        raise ValueError("row/rhs length mismatch")
    labels = list(labels) if labels is not None else list(range(len(rows)))
    b_col = ncols  # augmented column
    remaining = []
    for i, (r, b) in enumerate(zip(rows, rhs)):
        aug = {k: v for k, v in r.items() if v}
        if b:
            aug[b_col] = b
        remaining.append((aug, {i: ONE}))

    pivots: list[tuple[int, dict]] = []
    for col in range(ncols):
        pick = next((k for k, (r, _) in enumerate(remaining) if col in r), None)
        if pick is None:
            continue
        prow, pcombo = remaining.pop(pick)
        inv = prow[col].inverse()
        prow = {k: v * inv for k, v in prow.items()}
        pcombo = {k: v * inv for k, v in pcombo.items()}
        for r, combo in remaining:
            f = r.get(col)
            if f:
                _axpy(r, f, prow)
                _axpy(combo, f, pcombo)
        pivots.append((col, prow))

    for r, combo in remaining:
        if r:  # only the augmented entry can survive
            first = min(combo)
            raise NoSolutionError(
                "linear system is inconsistent",
                first_row=labels[first],
                certificate={labels[i]: v for i, v in sorted(combo.items())},
                residual=r[b_col],
            )

    for i in range(len(pivots) - 1, -1, -1):
        col, prow = pivots[i]
        for j in range(i):
            f = pivots[j][1].get(col)
            if f:
                _axpy(pivots[j][1], f, prow)

    pivot_cols = {col: k for k, (col, _) in enumerate(pivots)}
    particular = [ZERO] * ncols
    for col, prow in pivots:
        particular[col] = prow.get(b_col, ZERO)
    kernel = []
    for free in range(ncols):
        if free in pivot_cols:
            continue
        vec = [ZERO] * ncols
        vec[free] = ONE
        for col, prow in pivots:
            v = prow.get(free)
            if v:
                vec[col] = -v
        kernel.append(vec)
    return LinearSolution(particular, kernel, pivot_cols)


def determinant(matrix: Sequence[Sequence[GaussianRational]]) -> GaussianRational:
    """Exact determinant by fraction-exact elimination."""
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("determinant needs a square matrix")
    a = [list(row) for row in matrix]
    det = ONE
    for col in range(n):
        pick = next((r for r in range(col, n) if a[r][col]), None)
        if pick is None:
            return ZERO
        if pick != col:
            a[col], a[pick] = a[pick], a[col]
            det = -det
        piv = a[col][col]
        det = det * piv
        inv = piv.inverse()
        for r in range(col + 1, n):
            f = a[r][col] * inv
            if f:
                for c in range(col, n):
                    a[r][c] = a[r][c] - f * a[col][c]
    return det
