"""Finite Fourier sums on the torus with :class:`~foliate.coeffs.Poly` coefficients."""

from __future__ import annotations

import cmath
from numbers import Integral, Rational

from .coeffs import I, QI, Poly, ZERO, format_poly, join_signed


class Scalar:
    """``sum_k c_k(params) * exp(i k.theta)`` on ``T^n``.

    ``terms`` maps integer frequency tuples of length ``n`` to nonzero Polys.
    Instances are immutable; arithmetic returns new objects.
    """

    __slots__ = ("n", "_terms", "_hash")

    def __init__(self, n: int, terms=None):
        self.n = n
        clean = {}
        if terms:
            for k, c in terms.items():
                k = tuple(k)
                if len(k) != n:
                    raise ValueError(f"frequency {k} has wrong length for T^{n}")
                c = Poly.const(c)
                if not c.is_zero():
                    clean[k] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _from_clean(cls, n, terms):
        obj = object.__new__(cls)
        obj.n = n
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def const(cls, n: int, value) -> Scalar:
        c = Poly.const(value)
        return cls._from_clean(n, {(0,) * n: c} if c else {})

    @classmethod
    def zero(cls, n: int) -> Scalar:
        return cls._from_clean(n, {})

    @classmethod
    def mode(cls, k, coeff=1) -> Scalar:
        k = tuple(k)
        return cls(len(k), {k: coeff})

    @classmethod
    def cos(cls, n: int, axis: int) -> Scalar:
        kp = [0] * n
        kp[axis] = 1
        km = [0] * n
        km[axis] = -1
        return cls(n, {tuple(kp): QI(1, 0) / 2, tuple(km): QI(1, 0) / 2})

    @classmethod
    def sin(cls, n: int, axis: int) -> Scalar:
        kp = [0] * n
        kp[axis] = 1
        km = [0] * n
        km[axis] = -1
        # sin t = (e^{it} - e^{-it}) / (2i)
        return cls(n, {tuple(kp): QI(0, -1) / 2, tuple(km): QI(0, 1) / 2})

    @property
    def terms(self):
        return self._terms

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.n == other.n and self._terms == other._terms
        if isinstance(other, (Poly, QI, Integral, Rational)):
            return self == Scalar.const(self.n, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, tuple(sorted((k, c.key) for k, c in self._terms.items()))))
        return self._hash

    def _coerce(self, other) -> Scalar:
        if isinstance(other, Scalar):
            if other.n != self.n:
                raise ValueError(f"dimension mismatch: T^{self.n} vs T^{other.n}")
            return other
        return Scalar.const(self.n, other)

    def __neg__(self):
        return Scalar._from_clean(self.n, {k: -c for k, c in self._terms.items()})

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if not other._terms:
            return self
        out = dict(self._terms)
        for k, c in other._terms.items():
            v = out.get(k)
            if v is None:
                out[k] = c
            else:
                v = v + c
                if v.is_zero():
                    del out[k]
                else:
                    out[k] = v
        return Scalar._from_clean(self.n, out)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (Poly, QI, Integral, Rational)):
            c = Poly.const(other)
            if c.is_zero():
                return Scalar.zero(self.n)
            return Scalar._from_clean(self.n, {k: v * c for k, v in self._terms.items()})
        if not isinstance(other, Scalar):
            return NotImplemented
        other = self._coerce(other)
        out = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                c = c1 * c2
                v = out.get(k)
                if v is None:
                    out[k] = c
                else:
                    v = v + c
                    if v.is_zero():
                        del out[k]
                    else:
                        out[k] = v
        out = {k: v for k, v in out.items() if not v.is_zero()}
        return Scalar._from_clean(self.n, out)

    def __rmul__(self, other):
        if isinstance(other, (Poly, QI, Integral, Rational)):
            return self * other
        return NotImplemented

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers of Scalars are not supported")
        out = Scalar.const(self.n, 1)
        for _ in range(e):
            out = out * self
        return out

    def __truediv__(self, other):
        c = Poly.const(other)
        if not c.is_unit():
            raise ZeroDivisionError("Scalars may only be divided by units of the coefficient ring")
        return self * c.unit_inverse()

    # calculus --------------------------------------------------------
    def partial(self, axis: int) -> Scalar:
        if not 0 <= axis < self.n:
            raise IndexError(f"axis {axis} out of range for T^{self.n}")
        out = {}
        for k, c in self._terms.items():
            if k[axis]:
                out[k] = c * (I * k[axis])
        return Scalar._from_clean(self.n, out)

    def fiber_mean(self, axes) -> Scalar:
        """Normalized integral over the angles in ``axes``: keep modes vanishing there."""
        axes = tuple(axes)
        for a in axes:
            if not 0 <= a < self.n:
                raise IndexError(f"axis {a} out of range for T^{self.n}")
        return Scalar._from_clean(
            self.n, {k: c for k, c in self._terms.items() if all(k[a] == 0 for a in axes)}
        )

    def bandwidth(self) -> int:
        return max((max(abs(x) for x in k) for k in self._terms), default=0)

    def depends_on(self, axis: int) -> bool:
        return any(k[axis] for k in self._terms)

    def is_constant(self) -> bool:
        return all(not any(k) for k in self._terms)

    def constant_part(self) -> Poly:
        return self._terms.get((0,) * self.n, ZERO)

    def conjugate(self) -> Scalar:
        return Scalar._from_clean(
            self.n, {tuple(-x for x in k): c.conjugate() for k, c in self._terms.items()}
        )

    def embed(self, n_total: int, positions) -> Scalar:
        """View as a function on ``T^n_total`` whose axis ``j`` sits at ``positions[j]``."""
        out = {}
        for k, c in self._terms.items():
            kk = [0] * n_total
            for j, p in enumerate(positions):
                kk[p] = k[j]
            out[tuple(kk)] = c
        return Scalar._from_clean(n_total, out)

    def restrict(self, keep) -> Scalar:
        """Drop axes not in ``keep``; the Scalar must not depend on them."""
        keep = tuple(keep)
        dropped = [a for a in range(self.n) if a not in keep]
        if any(self.depends_on(a) for a in dropped):
            raise ValueError("Scalar depends on a dropped axis")
        return Scalar._from_clean(
            len(keep), {tuple(k[a] for a in keep): c for k, c in self._terms.items()}
        )

    def substitute(self, values: dict) -> Scalar:
        return Scalar(self.n, {k: c.substitute(values) for k, c in self._terms.items()})

    def parameters(self) -> set[str]:
        out = set()
        for c in self._terms.values():
            out |= c.parameters()
        return out

    def evaluate(self, point, values=None) -> complex:
        """Floating-point sample at ``point`` (diagnostics only)."""
        values = values or {}
        total = 0j
        for k, c in self._terms.items():
            phase = sum(kk * float(t) for kk, t in zip(k, point))
            total += c.evaluate(values) * cmath.exp(1j * phase)
        return total

    def sorted_terms(self):
        return sorted(self._terms.items())

    def format(self, names) -> str:
        return format_scalar(self, names)

    def __repr__(self):
        return f"Scalar({format_scalar(self, default_names(self.n))})"


def default_names(n: int):
    return tuple(f"t{j}" for j in range(n))


def zero_test(s: Scalar) -> bool:
    return s.is_zero()


def partial_derivative(s: Scalar, axis: int) -> Scalar:
    return s.partial(axis)


def fiber_mean(s: Scalar, axes) -> Scalar:
    return s.fiber_mean(axes)


def is_zero(s: Scalar) -> bool:
    return s.is_zero()


def format_phase(k, names) -> str:
    pieces = []
    for kk, name in zip(k, names):
        if kk == 0:
            continue
        mag = abs(kk)
        pieces.append((kk < 0, name if mag == 1 else f"{mag}*{name}"))
    return join_signed(pieces)


def format_mode(k, names) -> str:
    nz = [x for x in k if x]
    if len(nz) == 1 and abs(nz[0]) == 1:
        j = next(idx for idx, x in enumerate(k) if x)
        return f"exp(i*{names[j]})" if nz[0] == 1 else f"exp(-i*{names[j]})"
    return f"exp(i*({format_phase(k, names)}))"


def poly_needs_parens(c: Poly) -> bool:
    if len(c.terms) != 1:
        return True
    q = c.constant_value()
    return q is not None and q.a != 0 and q.b != 0


def format_scalar(s: Scalar, names) -> str:
    if s.is_zero():
        return "0"
    pieces = []
    for k, c in s.sorted_terms():
        if not any(k):
            text = format_poly(c)
            if poly_needs_parens(c):
                pieces.append((False, f"({text})"))
            elif text.startswith("-"):
                pieces.append((True, text[1:]))
            else:
                pieces.append((False, text))
            continue
        mode = format_mode(k, names)
        if poly_needs_parens(c):
            pieces.append((False, f"({format_poly(c)})*{mode}"))
            continue
        text = format_poly(c)
        neg = text.startswith("-")
        if neg:
            text = text[1:]
        pieces.append((neg, mode if text == "1" else f"{text}*{mode}"))
    return join_signed(pieces)
