"""Connections on trivial torus bundles ``T^base x T^fiber``.

Base angles come first, fiber angles last.  The structure group is the fiber
torus acting by translation, so a connection is one 1-form per fiber
direction.  Matrix-valued forms (diagonal ``u(N)``-style) are handled as
:class:`~foliate.exterior.Mat` objects of Forms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb, factorial

from . import linalg
from .coeffs import ONE_POLY, QI, ZERO
from .exterior import (
    Form,
    Mat,
    VectorField,
    exterior_derivative,
    interior_product,
    lie_derivative,
)
from .foliation import CutoffTooSmall, Foliation, TransverseMetric, check_transverse_metric
from .scalar import Scalar


@dataclass(frozen=True)
class Bundle:
    base_angles: int
    fiber_angles: int

    def __post_init__(self):
        if self.base_angles < 0 or self.fiber_angles < 1:
            raise ValueError("need a nonnegative base and at least one fiber angle")

    @property
    def n(self) -> int:
        return self.base_angles + self.fiber_angles

    @property
    def fiber_axes(self):
        return tuple(range(self.base_angles, self.n))

    @property
    def base_axes(self):
        return tuple(range(self.base_angles))

    def fundamental_field(self, j: int) -> VectorField:
        return VectorField.coord(self.n, self.base_angles + j)


@dataclass(frozen=True)
class Connection:
    """One 1-form per fiber direction on the total torus."""

    bundle: Bundle
    omega: tuple

    def __post_init__(self):
        omega = tuple(self.omega)
        if len(omega) != self.bundle.fiber_angles:
            raise ValueError("need one connection form per fiber direction")
        for w in omega:
            if w.n != self.bundle.n:
                raise ValueError("connection form lives on the wrong torus")
            if any(d != 1 for d in w.degrees()):
                raise ValueError("connection forms must be 1-forms")
        object.__setattr__(self, "omega", omega)

    @property
    def n(self) -> int:
        return self.bundle.n

    def as_matrix(self) -> Mat:
        return Mat.diag(self.omega, Form.zero(self.n))

    def substitute(self, values) -> Connection:
        return Connection(self.bundle, tuple(w.substitute(values) for w in self.omega))


def _as_mat(c) -> Mat:
    if isinstance(c, Connection):
        return c.as_matrix()
    if isinstance(c, Form):
        return Mat([[c]])
    if isinstance(c, Mat):
        return c
    raise TypeError(f"expected a Connection, Form or Mat, got {type(c).__name__}")


def _entries(c):
    return [x for row in _as_mat(c).rows for x in row]


def check_connection(c: Connection) -> bool:
    b = c.bundle
    for j, w in enumerate(c.omega):
        for l in range(b.fiber_angles):
            Y = b.fundamental_field(l)
            target = Form.const(b.n, 1 if j == l else 0)
            if interior_product(Y, w) != target:
                return False
            if lie_derivative(Y, w):
                return False
    return True


def is_adapted(c, F: Foliation) -> bool:
    return all(not interior_product(Z, w) for w in _entries(c) for Z in F.generators)


def is_basic(c, F: Foliation) -> bool:
    entries = _entries(c)
    return is_adapted(c, F) and all(
        not interior_product(Z, exterior_derivative(w)) for w in entries for Z in F.generators
    )


def check_basic_connection(c, F: Foliation) -> str:
    """``"basic"``, ``"adapted"`` or ``"neither"``."""
    if F.n != _entries(c)[0].n:
        raise ValueError("foliation must live on the total torus")
    if not is_adapted(c, F):
        return "neither"
    return "basic" if is_basic(c, F) else "adapted"


def curvature(c) -> Mat:
    """``d omega + omega ^ omega`` entrywise over the matrix product."""
    A = _as_mat(c)
    return A.map(exterior_derivative) + (A @ A)


# ---------------------------------------------------------------- feasibility


def _box(n, K):
    return itertools.product(range(-K, K + 1), repeat=n)


def _mode_name(k):
    return "(" + ",".join(str(x) for x in k) + ")"


@dataclass
class Feasible:
    connection: Connection
    rank: int
    n_unknowns: int
    status: str = "feasible"


@dataclass
class Infeasible:
    certificate: linalg.Certificate
    rows: list = field(repr=False)
    rhs: list = field(repr=False)
    labels: list = field(repr=False)
    status: str = "infeasible"

    def verify(self) -> bool:
        return linalg.verify_certificate(self.rows, self.rhs, self.certificate)


def basic_connection_system(bundle: Bundle, F_P: Foliation, cutoff: int, names=None):
    """Rows, right-hand sides, labels and columns of the basic-connection system.

    Unknown ``(j, i, k)`` is the ``exp(i k.theta) dtheta^i`` coefficient of
    the ``j``-th connection form.
    """
    n = bundle.n
    if F_P.n != n:
        raise ValueError("foliation must live on the total torus")
    if cutoff < F_P.bandwidth():
        raise CutoffTooSmall(f"cutoff {cutoff} below generator bandwidth {F_P.bandwidth()}")
    names = names or tuple(f"t{j}" for j in range(n))
    rows: dict = {}
    rhs: dict = {}
    cols = []
    for j in range(bundle.fiber_angles):
        for i in range(n):
            for k in _box(n, cutoff):
                col = (j, i, k)
                cols.append(col)
                basis = Form._from_clean(n, {(i,): Scalar._from_clean(n, {k: ONE_POLY})})
                d_basis = exterior_derivative(basis)
                images = []
                for l in range(bundle.fiber_angles):
                    Y = bundle.fundamental_field(l)
                    images.append((("norm", j, l), interior_product(Y, basis)))
                    images.append((("inv", j, l), lie_derivative(Y, basis)))
                for g, Z in enumerate(F_P.generators):
                    images.append((("adapt", j, g), interior_product(Z, basis)))
                    images.append((("basic", j, g), interior_product(Z, d_basis)))
                for tag, img in images:
                    for mono, c in img.terms.items():
                        for kk, v in c.terms.items():
                            rows.setdefault((tag, mono, kk), {})[col] = v
    zero_mode = (0,) * n
    for j in range(bundle.fiber_angles):
        key = (("norm", j, j), (), zero_mode)
        rows.setdefault(key, {})
        rhs[key] = ONE_POLY
    keys = sorted(rows)
    labels = [_row_label(key, names) for key in keys]
    return [rows[k] for k in keys], [rhs.get(k, ZERO) for k in keys], labels, cols


def _row_label(key, names):
    (kind, j, x), mono, k = key
    w = f"w{j + 1}"
    legs = "^".join("d" + names[a] for a in mono) or "1"
    if kind == "norm":
        what = f"i(Y{x + 1}){w}"
    elif kind == "inv":
        what = f"L(Y{x + 1}){w}"
    elif kind == "adapt":
        what = f"i(Z{x + 1}){w}"
    else:
        what = f"i(Z{x + 1})d{w}"
    return f"{what} [{legs}] mode {_mode_name(k)}"


def basic_connection_solve(bundle: Bundle, F_P: Foliation, cutoff: int, names=None):
    """Exact search for a basic connection with coefficients of bandwidth <= cutoff."""
    rows, rhs, labels, cols = basic_connection_system(bundle, F_P, cutoff, names)
    result = linalg.solve(rows, rhs, labels)
    if isinstance(result, linalg.Certificate):
        out = Infeasible(result, rows, rhs, labels)
        if not out.verify():
            raise RuntimeError("internal error: infeasibility certificate failed verification")
        return out
    n = bundle.n
    forms = []
    for j in range(bundle.fiber_angles):
        terms: dict = {}
        for (jj, i, k), v in result.values.items():
            if jj == j:
                terms.setdefault((i,), {})[k] = v
        forms.append(Form(n, {m: Scalar(n, t) for m, t in terms.items()}))
    c = Connection(bundle, tuple(forms))
    if not (check_connection(c) and check_basic_connection(c, F_P) == "basic"):
        raise RuntimeError("internal error: solver output is not a basic connection")
    return Feasible(c, result.rank, len(cols))


# ---------------------------------------------------------------- metrics


def base_foliation(bundle: Bundle, F_P: Foliation) -> Foliation:
    """Push the generators of ``F_P`` down to the base by dropping fiber components."""
    gens = []
    for Z in F_P.generators:
        for c in Z.comps:
            if any(c.depends_on(a) for a in bundle.fiber_axes):
                raise ValueError("generators depend on fiber angles")
        comps = [Z.comps[a].restrict(bundle.base_axes) for a in bundle.base_axes]
        gens.append(VectorField(comps))
    return Foliation(tuple(gens))


def metric_from_connection(c: Connection, F_P: Foliation, g_base: TransverseMetric) -> TransverseMetric:
    """``pi^* g_base + sum_j omega^j (x) omega^j``."""
    b = c.bundle
    if check_basic_connection(c, F_P) != "basic":
        raise ValueError("connection is not basic for the foliation")
    if g_base.n != b.base_angles:
        raise ValueError("base metric lives on the wrong torus")
    if not check_transverse_metric(base_foliation(b, F_P), g_base):
        raise ValueError("base metric is not invariant along the base foliation")
    q = len(g_base.coframe)
    coframe = tuple(e.embed(b.n, b.base_axes) for e in g_base.coframe) + c.omega
    size = q + b.fiber_angles
    zero = Scalar.zero(b.n)
    one = Scalar.const(b.n, 1)
    matrix = []
    for a in range(size):
        row = []
        for bb in range(size):
            if a < q and bb < q:
                row.append(g_base.matrix[a][bb].embed(b.n, b.base_axes))
            else:
                row.append(one if a == bb else zero)
        matrix.append(tuple(row))
    g = TransverseMetric(coframe, tuple(matrix))
    if not check_transverse_metric(F_P, g):
        raise RuntimeError("internal error: assembled metric is not invariant")
    return g


# ---------------------------------------------------------------- reduction


def check_duality(frame) -> None:
    for k, (theta, _) in enumerate(frame):
        for l, (_, Y) in enumerate(frame):
            val = interior_product(Y, theta)
            if val != Form.const(theta.n, 1 if k == l else 0):
                raise ValueError(f"frame duality fails: theta^{k + 1}(Y_{l + 1}) = {val.format()}")


def _reduce_form(w: Form, frame) -> Form:
    out = w
    for theta, Y in frame:
        out = out - theta * interior_product(Y, w).scalar_part()
    return out


@dataclass
class Reduction:
    omega: object  # Connection or Mat, like the input
    horizontal: bool
    basic_along_frame: bool


def reduce_connection(c, frame) -> Reduction:
    """``omega - sum_k theta^k (x) omega(Y_k)`` for a dual frame ``(theta^k, Y_k)``."""
    frame = [(t, Y) for t, Y in frame]
    check_duality(frame)
    if isinstance(c, Connection):
        omega = Connection(c.bundle, tuple(_reduce_form(w, frame) for w in c.omega))
        entries = list(omega.omega)
    else:
        omega = _as_mat(c).map(lambda w: _reduce_form(w, frame))
        entries = [x for row in omega.rows for x in row]
    horizontal = all(not interior_product(Y, w) for w in entries for _, Y in frame)
    if not horizontal:
        raise RuntimeError("internal error: reduced form is not horizontal")
    basic = all(
        not interior_product(Y, exterior_derivative(w)) for w in entries for _, Y in frame
    )
    return Reduction(omega, horizontal, basic)


# ---------------------------------------------------------------- transgression


def _power(R: Form, m: int) -> Form:
    out = Form.const(R.n, 1)
    for _ in range(m):
        out = out * R
    return out


def transgression_form(c0, c1, F: Foliation | None = None) -> Form:
    """``int_0^1 Tr(-(A1 - A0) exp(-R_t)) dt`` along the straight line of connections.

    Diagonal (commuting) inputs only.  ``R_t = R0 + t dD`` with ``D = A1 - A0``,
    so every power of ``R_t`` is a polynomial in ``t`` integrated exactly.
    """
    A0, A1 = _as_mat(c0), _as_mat(c1)
    if A0.size != A1.size:
        raise ValueError("connections have different ranks")
    if not (A0.is_diagonal() and A1.is_diagonal()):
        raise ValueError("transgression is only available for commuting (diagonal) connections")
    if F is not None:
        for A in (A0, A1):
            if not is_basic(A, F):
                raise ValueError("connection is not basic for the foliation")
    n = A0.diagonal()[0].n
    total = Form.zero(n)
    for a0, a1 in zip(A0.diagonal(), A1.diagonal()):
        D = a1 - a0
        if not D:
            continue
        R0 = exterior_derivative(a0)
        dD = exterior_derivative(D)
        series = Form.zero(n)
        for m in range(n // 2 + 1):
            # (-1)^m / m! * sum_j C(m, j) R0^(m-j) dD^j / (j + 1)
            acc = Form.zero(n)
            for j in range(m + 1):
                acc = acc + _power(R0, m - j) * _power(dD, j) * QI(comb(m, j)) / (j + 1)
            series = series + acc * (QI((-1) ** m) / factorial(m))
        total = total - D * series
    return total
