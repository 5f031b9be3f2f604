"""Foliations of tori given by generating vector fields."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .coeffs import I, ONE_POLY, QI, Poly, ZERO
from .exterior import (
    Form,
    VectorField,
    bracket,
    exterior_derivative,
    interior_product,
)
from .scalar import Scalar


class CutoffTooSmall(ValueError):
    """The requested Fourier cutoff is below the generators' bandwidth."""


_QUARTER = (ONE_POLY, Poly.const(I), Poly.const(-1), Poly.const(-I))


def value_at_quarter_point(s: Scalar, point) -> Poly:
    """Exact value at ``theta_j = point[j] * pi / 2`` (integer ``point``)."""
    total = ZERO
    for k, c in s.terms.items():
        total = total + c * _QUARTER[sum(a * b for a, b in zip(k, point)) % 4]
    return total


def _rank_at(fields, point) -> int:
    rows = []
    for V in fields:
        row = {}
        for axis, c in enumerate(V.comps):
            v = value_at_quarter_point(c, point)
            if v:
                row[axis] = v
        rows.append(row)
    return linalg.rank(rows)


def _quarter_grid(n):
    return itertools.product(range(4), repeat=n)


@dataclass(frozen=True)
class Foliation:
    generators: tuple
    declared_rank: int | None = None

    def __post_init__(self):
        gens = tuple(self.generators)
        if not gens:
            raise ValueError("a foliation needs at least one generator")
        n = gens[0].n
        if any(g.n != n for g in gens):
            raise ValueError("generators live on different tori")
        object.__setattr__(self, "generators", gens)
        rank = len(gens) if self.declared_rank is None else self.declared_rank
        if rank != len(gens):
            raise ValueError(f"declared rank {rank} differs from {len(gens)} generators")
        object.__setattr__(self, "declared_rank", rank)
        const_rows = [
            {a: c.constant_part() for a, c in enumerate(g.comps) if c.constant_part()} for g in gens
        ]
        if linalg.rank(const_rows) != rank and all(g.is_constant() for g in gens):
            raise ValueError("constant generators are linearly dependent")
        for point in _quarter_grid(n):
            if _rank_at(gens, point) != rank:
                raise ValueError(f"generators are dependent at quarter-grid point {point}")

    @property
    def n(self) -> int:
        return self.generators[0].n

    @property
    def rank(self) -> int:
        return self.declared_rank

    def bandwidth(self) -> int:
        return max(g.bandwidth() for g in self.generators)

    def is_linear(self) -> bool:
        return all(g.is_constant() for g in self.generators)

    def substitute(self, values: dict) -> Foliation:
        return Foliation(tuple(g.substitute(values) for g in self.generators), self.declared_rank)


# ---------------------------------------------------------------- span membership


def _unit_pivot_frame(F: Foliation):
    """Row-reduce the generators using constant unit pivots.

    Returns ``(axes, frame)`` with ``frame[k].comps[axes[l]] == delta_kl`` or None
    when no such exact normalization exists.
    """
    frame = list(F.generators)
    axes = []
    for k in range(len(frame)):
        pivot = None
        for axis in range(F.n):
            if axis in axes:
                continue
            c = frame[k].comps[axis]
            if c.is_constant() and c.constant_part().is_unit():
                pivot = axis
                break
        if pivot is None:
            return None
        inv = frame[k].comps[pivot].constant_part().unit_inverse()
        frame[k] = frame[k] * inv
        for j in range(len(frame)):
            if j != k and frame[j].comps[pivot]:
                frame[j] = frame[j] - frame[k] * frame[j].comps[pivot]
        axes.append(pivot)
    return tuple(axes), tuple(frame)


def reduce_mod_foliation(F: Foliation, W: VectorField):
    """Canonical representative of ``W`` modulo the generators.

    Returns ``(residual, coefficients)`` with ``W = residual + sum c_k Z'_k``,
    the residual vanishing on the pivot axes.  Raises ``ValueError`` when the
    generators admit no exact unit-pivot normalization.
    """
    pf = _unit_pivot_frame(F)
    if pf is None:
        raise ValueError("generators admit no exact unit-pivot normalization")
    axes, frame = pf
    coeffs = [W.comps[a] for a in axes]
    residual = W
    for c, Z in zip(coeffs, frame):
        if c:
            residual = residual - Z * c
    return residual, coeffs


def in_span(F: Foliation, W: VectorField) -> bool:
    residual, _ = reduce_mod_foliation(F, W)
    return residual.is_zero()


def _frequency_box(n, K):
    return list(itertools.product(range(-K, K + 1), repeat=n))


def solve_span(F: Foliation, W: VectorField, cutoff: int):
    """Scalars ``a_k`` of bandwidth <= cutoff with ``W = sum a_k Z_k``, or None."""
    n = F.n
    rows: dict = {}
    for j, Z in enumerate(F.generators):
        for k in _frequency_box(n, cutoff):
            e = Scalar._from_clean(n, {k: ONE_POLY})
            for axis, comp in enumerate(Z.comps):
                if not comp:
                    continue
                for kk, c in (comp * e).terms.items():
                    rows.setdefault((axis, kk), {})[(j, k)] = c
    rhs_map = {}
    for axis, comp in enumerate(W.comps):
        for kk, c in comp.terms.items():
            rhs_map[(axis, kk)] = c
            rows.setdefault((axis, kk), {})
    keys = sorted(rows)
    result = linalg.solve([rows[r] for r in keys], [rhs_map.get(r, ZERO) for r in keys])
    if isinstance(result, linalg.Certificate):
        return None
    out = []
    for j in range(len(F.generators)):
        out.append(
            Scalar(n, {k: v for (jj, k), v in result.values.items() if jj == j})
        )
    return out


@dataclass
class InvolutivityResult:
    status: str  # "true", "false" or "inconclusive"
    witness: dict = field(default_factory=dict)  # (i, j) -> coefficient Scalars
    offending: tuple | None = None  # (i, j, bracket)

    def __bool__(self):
        return self.status == "true"


def _not_in_span_proof(F: Foliation, W: VectorField) -> bool:
    try:
        if not in_span(F, W):
            return True
    except ValueError:
        pass
    gens = list(F.generators)
    return any(_rank_at(gens + [W], p) > F.rank for p in _quarter_grid(F.n))


def check_involutive(F: Foliation, cutoff: int) -> InvolutivityResult:
    if cutoff < F.bandwidth():
        raise CutoffTooSmall(f"cutoff {cutoff} below generator bandwidth {F.bandwidth()}")
    witness = {}
    gens = F.generators
    undecided = None
    for i, j in itertools.combinations(range(len(gens)), 2):
        B = bracket(gens[i], gens[j])
        if B.is_zero():
            witness[(i, j)] = [Scalar.zero(F.n)] * len(gens)
            continue
        coeffs = solve_span(F, B, cutoff)
        if coeffs is not None:
            witness[(i, j)] = coeffs
            continue
        if _not_in_span_proof(F, B):
            return InvolutivityResult("false", witness, (i, j, B))
        undecided = undecided or (i, j, B)
    if undecided is not None:
        return InvolutivityResult("inconclusive", witness, undecided)
    return InvolutivityResult("true", witness)


# ---------------------------------------------------------------- basic forms


def is_basic_form(F: Foliation, a: Form) -> bool:
    if a.n != F.n:
        raise ValueError("dimension mismatch")
    da = exterior_derivative(a)
    return all(
        interior_product(Z, a).is_zero() and interior_product(Z, da).is_zero()
        for Z in F.generators
    )


def is_basic_function(F: Foliation, f: Scalar) -> bool:
    return all(Z(f).is_zero() for Z in F.generators)


def bott_derivative(F: Foliation, Z: VectorField, s: VectorField) -> VectorField:
    """Canonical representative of ``[Z, s]`` modulo the foliation."""
    if not in_span(F, Z):
        raise ValueError("Z is not tangent to the foliation")
    residual, _ = reduce_mod_foliation(F, bracket(Z, s))
    return residual


def normal_class(F: Foliation, s: VectorField) -> VectorField:
    residual, _ = reduce_mod_foliation(F, s)
    return residual


# ---------------------------------------------------------------- leaf closures


def closure_rank(F: Foliation) -> int:
    """Dimension of the leaf-closure distribution of a linear foliation.

    Integer vectors ``k`` with ``k . v = 0`` for every generator form the
    annihilator lattice; with parameters transcendental each parameter
    monomial of ``k . v`` must vanish separately, giving a rational system
    whose rank is the closure dimension.
    """
    if not F.is_linear():
        raise ValueError("closure_rank needs constant-coefficient generators")
    rows = []
    for Z in F.generators:
        per_mono: dict = {}
        for axis, comp in enumerate(Z.comps):
            for mono, q in comp.constant_part().terms.items():
                per_mono.setdefault(mono, {})[axis] = q
        for mono in sorted(per_mono, key=lambda m: (m[0], m[1].key if m[1] else ())):
            entries = per_mono[mono]
            re = {a: Poly.const(q.real) for a, q in entries.items() if q.real}
            im = {a: Poly.const(q.imag) for a, q in entries.items() if q.imag}
            if re:
                rows.append(re)
            if im:
                rows.append(im)
    return linalg.rank(rows)


# ---------------------------------------------------------------- basic cohomology


def _constraint_rows(F: Foliation, degree: int, cutoff: int, with_d: bool):
    n = F.n
    cols = []
    rows: dict = {}
    for mono in itertools.combinations(range(n), degree):
        for k in _frequency_box(n, cutoff):
            col = (mono, k)
            cols.append(col)
            a = Form._from_clean(n, {mono: Scalar._from_clean(n, {k: ONE_POLY})})
            da = exterior_derivative(a)
            images = []
            for j, Z in enumerate(F.generators):
                images.append((("i", j), interior_product(Z, a)))
                images.append((("id", j), interior_product(Z, da)))
            if with_d:
                images.append((("d",), da))
            for tag, img in images:
                for m, c in img.terms.items():
                    for kk, v in c.terms.items():
                        rows.setdefault((tag, m, kk), {})[col] = v
    return [rows[r] for r in sorted(rows)], len(cols)


def basic_cohomology_dims(F: Foliation, cutoff: int) -> list[int]:
    """Dimensions of basic cohomology in degrees ``0..n`` on the truncated complex."""
    if cutoff < 1:
        raise ValueError("cutoff must be at least 1")
    n = F.n
    dims = []
    prev = None  # (rank C, rank [C; D]) in the previous degree
    for p in range(n + 1):
        c_rows, N = _constraint_rows(F, p, cutoff, with_d=False)
        cd_rows, _ = _constraint_rows(F, p, cutoff, with_d=True)
        rc = linalg.rank(c_rows)
        rcd = linalg.rank(cd_rows)
        kernel = N - rcd
        image = 0 if prev is None else prev[1] - prev[0]
        dims.append(kernel - image)
        prev = (rc, rcd)
    return dims


# ---------------------------------------------------------------- transverse metrics


@dataclass(frozen=True)
class TransverseMetric:
    """Symmetric Scalar matrix over a transverse coframe of 1-forms."""

    coframe: tuple
    matrix: tuple

    def __post_init__(self):
        coframe = tuple(self.coframe)
        if not coframe:
            raise ValueError("empty coframe")
        n = coframe[0].n
        m = tuple(
            tuple(x if isinstance(x, Scalar) else Scalar.const(n, x) for x in row) for row in self.matrix
        )
        q = len(coframe)
        if len(m) != q or any(len(r) != q for r in m):
            raise ValueError("metric matrix must be square of coframe size")
        for a in range(q):
            for b in range(a + 1, q):
                if m[a][b] != m[b][a]:
                    raise ValueError("metric matrix must be symmetric")
        if any(e.n != n or e.degrees() not in ([1], []) for e in coframe):
            raise ValueError("coframe entries must be 1-forms on one torus")
        object.__setattr__(self, "coframe", coframe)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.coframe[0].n

    def tensor(self):
        """Coordinate components ``T_ij = sum g_ab e^a_i e^b_j``."""
        n = self.n
        comps = [[e.coefficient((i,)) for i in range(n)] for e in self.coframe]
        q = len(self.coframe)
        T = [[Scalar.zero(n) for _ in range(n)] for _ in range(n)]
        for a in range(q):
            for b in range(q):
                g = self.matrix[a][b]
                if not g:
                    continue
                for i in range(n):
                    if not comps[a][i]:
                        continue
                    for j in range(n):
                        if comps[b][j]:
                            T[i][j] = T[i][j] + g * comps[a][i] * comps[b][j]
        return T


def lie_derivative_tensor(Z: VectorField, T):
    n = Z.n
    dZ = [[Z.comps[k].partial(i) for k in range(n)] for i in range(n)]  # dZ[i][k] = d_i Z^k
    out = [[Z(T[i][j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            acc = out[i][j]
            for k in range(n):
                if dZ[i][k]:
                    acc = acc + T[k][j] * dZ[i][k]
                if dZ[j][k]:
                    acc = acc + T[i][k] * dZ[j][k]
            out[i][j] = acc
    return out


def check_transverse_metric(F: Foliation, g: TransverseMetric) -> bool:
    if g.n != F.n:
        raise ValueError("dimension mismatch")
    for e in g.coframe:
        for Z in F.generators:
            if interior_product(Z, e):
                raise ValueError("coframe does not annihilate the foliation")
    T = g.tensor()
    for Z in F.generators:
        L = lie_derivative_tensor(Z, T)
        if any(x for row in L for x in row):
            return False
    return True
