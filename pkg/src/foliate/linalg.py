"""Exact sparse linear algebra over the coefficient ring.

Systems are lists of sparse rows ``{column: Poly}`` with a Poly right-hand
side.  Unknowns range over the fraction field of the coefficient ring, so a
system is inconsistent exactly when some Poly combination of rows has zero
left-hand side and nonzero right-hand side.  Elimination is fraction-free:
unit pivots are normalized, other pivots are cross-multiplied, so every row
(and every certificate multiplier) stays a Poly.

Rows are split into connected blocks by shared columns before elimination.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .coeffs import ONE_POLY, ZERO, Poly


class SolveError(ArithmeticError):
    """A consistent system whose solution is not representable with Poly entries."""


@dataclass
class Certificate:
    """``sum_r multipliers[r] * row_r`` has zero left side and nonzero right side."""

    multipliers: dict  # original row index -> Poly
    labels: list = field(default_factory=list)
    residual: Poly = ZERO

    def items(self):
        return sorted(self.multipliers.items())


@dataclass
class Solution:
    values: dict  # column -> Poly (columns absent are zero)
    rank: int
    n_unknowns: int


def verify_certificate(rows, rhs, cert: Certificate) -> bool:
    """Recompute the combination directly from the rows."""
    lhs: dict = {}
    total = ZERO
    for r, m in cert.multipliers.items():
        for col, c in rows[r].items():
            v = lhs.get(col, ZERO) + m * c
            if v.is_zero():
                lhs.pop(col, None)
            else:
                lhs[col] = v
        total = total + m * rhs[r]
    return not lhs and not total.is_zero() and total == cert.residual


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        p = self.parent.setdefault(x, x)
        while p != x:
            self.parent[x] = self.parent.setdefault(p, p)
            x, p = p, self.parent[p]
        return p

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def _blocks(rows):
    uf = _UnionFind()
    for r, row in enumerate(rows):
        cols = list(row)
        if not cols:
            continue
        first = cols[0]
        uf.find(first)
        for c in cols[1:]:
            uf.union(first, c)
    groups: dict = {}
    empty = []
    for r, row in enumerate(rows):
        if not row:
            empty.append(r)
            continue
        root = uf.find(next(iter(row)))
        groups.setdefault(root, []).append(r)
    return list(groups.values()), empty


def _axpy(row, scale_row, other, scale_other):
    """``scale_row * row - scale_other * other`` on sparse dicts."""
    out = {}
    if scale_row is ONE_POLY:
        out = dict(row)
    else:
        for c, v in row.items():
            out[c] = v * scale_row
    for c, v in other.items():
        w = out.get(c, ZERO) - v * scale_other
        if w.is_zero():
            out.pop(c, None)
        else:
            out[c] = w
    return out


def _pivot_order(item):
    col, coeff = item
    return (0 if coeff.is_unit() else 1, len(coeff.terms), col)


def _eliminate(rows, rhs, order, track):
    """Echelonize the rows listed in ``order``.

    Returns ``(pivots, inconsistent)`` where ``pivots`` is a list of
    ``(col, row, rhs, combo)`` and ``inconsistent`` is ``(combo, rhs)`` or None.
    """
    pivots = []
    pivot_index = {}
    for r in order:
        row = dict(rows[r])
        b = rhs[r] if rhs is not None else ZERO
        combo = {r: ONE_POLY} if track else None
        for k, (pcol, prow, pb, pcombo) in enumerate(pivots):
            a = row.get(pcol)
            if a is None:
                continue
            p = prow[pcol]
            if p is ONE_POLY or p == ONE_POLY:
                row = _axpy(row, ONE_POLY, prow, a)
                b = b - a * pb
                if track:
                    combo = _axpy(combo, ONE_POLY, pcombo, a)
            else:
                row = _axpy(row, p, prow, a)
                b = b * p - a * pb
                if track:
                    combo = _axpy(combo, p, pcombo, a)
        if not row:
            if not b.is_zero():
                return pivots, (combo, b)
            continue
        pcol, pc = min(row.items(), key=_pivot_order)
        if pc.is_unit() and pc != ONE_POLY:
            inv = pc.unit_inverse()
            row = {c: v * inv for c, v in row.items()}
            row[pcol] = ONE_POLY
            b = b * inv
            if track:
                combo = {c: v * inv for c, v in combo.items()}
        pivot_index[pcol] = len(pivots)
        pivots.append((pcol, row, b, combo))
    return pivots, None


def _sparse_first(rows, block):
    return sorted(block, key=lambda r: (len(rows[r]), r))


def rank(rows) -> int:
    """Rank over the fraction field of the coefficient ring."""
    blocks, _ = _blocks(rows)
    total = 0
    for block in blocks:
        pivots, _ = _eliminate(rows, None, _sparse_first(rows, block), track=False)
        total += len(pivots)
    return total


def solve(rows, rhs, labels=None):
    """Return a :class:`Solution` (free unknowns set to zero) or a :class:`Certificate`."""
    if len(rows) != len(rhs):
        raise ValueError("rows and right-hand sides differ in length")
    rhs = [Poly.const(b) for b in rhs]
    blocks, empty = _blocks(rows)
    for r in empty:
        if not rhs[r].is_zero():
            return _certificate({r: ONE_POLY}, rhs[r], labels)
    values = {}
    total_rank = 0
    columns = set()
    for row in rows:
        columns.update(row)
    for block in blocks:
        order = _sparse_first(rows, block)
        pivots, bad = _eliminate(rows, rhs, order, track=False)
        if bad is not None:
            # redo this block only, now recording the row combinations
            _, bad = _eliminate(rows, rhs, order, track=True)
            return _certificate(bad[0], bad[1], labels)
        total_rank += len(pivots)
        for pcol, prow, b, _ in reversed(pivots):
            num = b
            for c, v in prow.items():
                if c != pcol and c in values:
                    num = num - v * values[c]
            piv = prow[pcol]
            try:
                x = num / piv
            except ArithmeticError as exc:
                raise SolveError(f"pivot {piv} does not divide {num}") from exc
            if not x.is_zero():
                values[pcol] = x
    return Solution(values=values, rank=total_rank, n_unknowns=len(columns))


def _certificate(combo, residual, labels):
    combo = {r: m for r, m in combo.items() if not m.is_zero()}
    names = [labels[r] for r in sorted(combo)] if labels is not None else []
    return Certificate(multipliers=combo, labels=names, residual=residual)
