"""The Kronecker holonomy groupoid on the transversal circle and Haar averaging.

Arrows of the holonomy groupoid are rotations of the transversal by
``2 pi n alpha``; for a formal (transcendental) slope its closure is the full
rotation family, i.e. the pair groupoid of the circle.  Averaging over the
closure with the normalized Haar measure is a fiber mean over a rotation
angle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .bundle import Connection, check_connection
from .coeffs import QI, Poly, ZERO, format_poly
from .exterior import AffineMap, Form, VectorField, pullback_affine
from .foliation import Foliation, closure_rank
from .scalar import Scalar


class Angle:
    """An angle ``pi * h`` with ``h`` an exp-free real Poly, rational part taken mod 2."""

    __slots__ = ("half_turns",)

    def __init__(self, half_turns=0):
        h = Poly.const(half_turns)
        if h.has_exp():
            raise ValueError("angles must be exp-free")
        for q in h.terms.values():
            if q.b:
                raise ValueError("angles must be real")
        const = h.terms.get(((), None))
        if const is not None:
            r = Fraction(const.a, const.d) % 2
            h = h - Poly.const(const) + Poly.const(QI(r))
        self.half_turns = h

    def __add__(self, other):
        return Angle(self.half_turns + Angle._of(other).half_turns)

    def __neg__(self):
        return Angle(-self.half_turns)

    def __sub__(self, other):
        return self + (-Angle._of(other))

    @staticmethod
    def _of(x):
        return x if isinstance(x, Angle) else Angle(x)

    def __eq__(self, other):
        return isinstance(other, Angle) and self.half_turns == other.half_turns

    def __hash__(self):
        return hash(self.half_turns)

    def is_zero(self) -> bool:
        return self.half_turns.is_zero()

    def radians_poly(self) -> Poly:
        """Translation amount for affine maps, in units where the period is ``2 pi``."""
        return self.half_turns

    def format(self) -> str:
        h = self.half_turns
        if h.is_zero():
            return "0"
        if h == Poly.const(1):
            return "pi"
        if len(h.terms) == 1:
            return f"{format_poly(h)}*pi"
        return f"({format_poly(h)})*pi"

    def __repr__(self):
        return f"Angle({self.format()})"


def _slope_poly(slope) -> Poly:
    if isinstance(slope, str):
        return Poly.param(slope)
    if isinstance(slope, (int, Fraction)):
        return Poly.const(QI(slope))
    return Poly.const(slope)


@dataclass(frozen=True)
class KroneckerGroupoid:
    """Holonomy of the Kronecker flow ``d/dx + slope d/dy`` on the transversal ``{x = 0}``."""

    slope: object

    def __post_init__(self):
        s = _slope_poly(self.slope)
        if s.has_exp() or any(q.b for q in s.terms.values()):
            raise ValueError("slope must be real and exp-free")
        object.__setattr__(self, "slope", s)

    @property
    def is_formal(self) -> bool:
        return bool(self.slope.parameters())

    @property
    def rational_slope(self) -> Fraction | None:
        if self.is_formal:
            return None
        q = self.slope.constant_value()
        return Fraction(q.a, q.d)

    def arrow(self, k: int) -> Angle:
        """Rotation by ``2 pi k slope``."""
        return Angle(self.slope * (2 * k))

    def compose(self, a: Angle, b: Angle) -> Angle:
        return a + b

    def inverse(self, a: Angle) -> Angle:
        return -a

    def foliation(self) -> Foliation:
        return Foliation((VectorField([Scalar.const(2, 1), Scalar.const(2, self.slope)]),))


@dataclass
class Orbit:
    angles: list
    distinct: bool
    period: int | None


def return_map_orbit(g: KroneckerGroupoid, start=0, steps: int = 0) -> Orbit:
    """``start + 2 pi k slope`` for ``k = 0..steps``, with an exact distinctness verdict."""
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    start = Angle._of(start)
    angles = [start + g.arrow(k) for k in range(steps + 1)]
    distinct = len(set(angles)) == len(angles)
    period = None
    for k in range(1, steps + 1):
        if angles[k] == angles[0]:
            period = k
            break
    return Orbit(angles, distinct, period)


@dataclass
class ClosureReport:
    kind: str  # "pair groupoid", "cyclic" or "trivial"
    order: int | None
    closure_rank: int

    def describe(self) -> str:
        if self.kind == "pair groupoid":
            head = "pair groupoid"
        elif self.kind == "cyclic":
            head = f"Z/{self.order} rotations"
        else:
            head = "trivial groupoid"
        return f"{head}, closure rank {self.closure_rank}"


def closure_description(g: KroneckerGroupoid) -> ClosureReport:
    rank = closure_rank(g.foliation())
    if g.is_formal:
        return ClosureReport("pair groupoid", None, rank)
    q = g.rational_slope.denominator
    if q == 1:
        return ClosureReport("trivial", 1, rank)
    return ClosureReport("cyclic", q, rank)


@dataclass(frozen=True)
class HaarData:
    """Normalized rotation-invariant measure on the closure's source fibers; cut-off 1."""

    def cutoff(self, n: int = 1) -> Scalar:
        return Scalar.const(n, 1)

    def total_mass(self) -> Fraction:
        # integral of the cut-off against the normalized measure on the rotation circle
        m = Scalar.const(1, 1).fiber_mean([0]).constant_part().constant_value()
        return Fraction(m.a, m.d)


def rotation(n: int, angle) -> AffineMap:
    """Rotate the base angle (axis 0) of ``T^n`` by ``angle`` (a Poly in radians)."""
    shift = [Poly.const(angle)] + [ZERO] * (n - 1)
    return AffineMap.translation_by(shift)


def _average_form(w: Form) -> Form:
    n = w.n
    # (theta, z..., t) -> (theta + t, z...)
    matrix = []
    for i in range(n):
        row = [int(i == j) for j in range(n)] + [int(i == 0)]
        matrix.append(row)
    phi = AffineMap(tuple(tuple(r) for r in matrix), (0,) * n)
    pulled = pullback_affine(phi, w)
    t = n
    fixed_t = Form(n + 1, {m: c.fiber_mean([t]) for m, c in pulled.terms.items() if t not in m})
    return fixed_t.restrict(tuple(range(n)))


def fresh_parameter(objs, base: str = "s") -> str:
    used = set()
    for o in objs:
        used |= o.parameters()
    k = 0
    while f"{base}{k}" in used:
        k += 1
    return f"{base}{k}"


def is_rotation_invariant(c: Connection) -> bool:
    """Certify invariance under rotation by a fresh formal angle."""
    s = fresh_parameter(c.omega)
    phi = rotation(c.n, Poly.param(s))
    return all(pullback_affine(phi, w) == w for w in c.omega)


@dataclass
class Averaged:
    connection: Connection
    invariant: bool
    is_connection: bool
    idempotent: bool


def haar_average_connection(c: Connection, g: KroneckerGroupoid, h: HaarData | None = None) -> Averaged:
    """``omega_hat = int gamma^* omega d mu(gamma)`` over the closure of the holonomy."""
    h = h or HaarData()
    if c.bundle.base_angles != 1:
        raise ValueError("averaging acts on bundles over the transversal circle (one base angle)")
    if closure_description(g).kind != "pair groupoid":
        raise ValueError("averaging needs a dense closure (formal slope)")
    if h.total_mass() != 1:
        raise ValueError("Haar system is not normalized")
    out = Connection(c.bundle, tuple(_average_form(w) for w in c.omega))
    again = Connection(c.bundle, tuple(_average_form(w) for w in out.omega))
    return Averaged(
        connection=out,
        invariant=is_rotation_invariant(out),
        is_connection=check_connection(out),
        idempotent=again == out,
    )
