"""Scenario files: header, declarations and directives.

Line-oriented; ``#`` starts a comment.  Expressions use ``+ - * / ^``, the
functions ``cos``, ``sin`` and ``exp``, the imaginary unit ``i``, coordinate
differentials ``dx`` and derivations ``d/dx``.  Function arguments are affine
phases such as ``x - 2*y + alpha`` (inside ``exp`` the coordinate part carries
an explicit ``i``).  ``^`` is a power when its right operand is an integer
and a wedge otherwise.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .bundle import Bundle, Connection
from .cartan import EquivForm, format_equiv
from .coeffs import I, QI, Poly, format_poly
from .exterior import Form, Mat, VectorField, format_form, format_vector_field
from .foliation import Foliation, TransverseMetric
from .groupoid import KroneckerGroupoid
from .scalar import Scalar, format_scalar


class ScenarioError(ValueError):
    def __init__(self, message, line=0, col=0, source="<scenario>"):
        self.message = message
        self.line = line
        self.col = col
        self.source = source
        super().__init__(f"{source}:{line}:{col}: {message}")


KEYWORDS = {
    "coords", "params", "duals", "cutoff", "suite", "scalar", "form", "field", "foliation",
    "bundle", "connection", "matrix", "equivform", "frame", "actions", "metric", "slope", "run",
}
RESERVED = {"i", "cos", "sin", "exp", "on", "base", "fiber", "diag", "irr"}

_TOKEN = re.compile(
    r"\s*(?:(?P<vec>d/d[A-Za-z_][A-Za-z_0-9]*)|(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),]))"
)


@dataclass
class Token:
    kind: str
    text: str
    col: int


def tokenize(text, line, col0, source):
    out = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ScenarioError(f"unexpected character {text[bad]!r}", line, col0 + bad + 1, source)
        kind = m.lastgroup
        start = m.start(kind)
        out.append(Token(kind, m.group(kind), col0 + start + 1))
        pos = m.end()
    out.append(Token("end", "", col0 + len(text) + 1))
    return out


# ---------------------------------------------------------------- values


class Lin:
    """Affine phase ``sum_j c_j theta_j + const`` used inside function arguments."""

    def __init__(self, coords=None, const=None):
        self.coords = {a: QI.coerce(c) for a, c in (coords or {}).items() if c}
        self.const = Poly.const(const if const is not None else 0)

    def __add__(self, o):
        o = _lin(o)
        c = dict(self.coords)
        for a, v in o.coords.items():
            c[a] = c.get(a, QI(0)) + v
        return Lin(c, self.const + o.const)

    def __neg__(self):
        return Lin({a: -v for a, v in self.coords.items()}, -self.const)

    def scale(self, p: Poly):
        if self.coords:
            q = p.constant_value()
            if q is None:
                raise TypeError("coordinates may only be scaled by numbers")
            return Lin({a: v * q for a, v in self.coords.items()}, self.const * p)
        return Lin({}, self.const * p)


def _lin(x):
    if isinstance(x, Lin):
        return x
    if isinstance(x, Poly):
        return Lin({}, x)
    raise TypeError("only numbers, parameters and coordinates may appear in a phase")


@dataclass
class Context:
    coords: tuple = ()
    params: tuple = ()
    duals: tuple = ()
    objects: dict = field(default_factory=dict)

    @property
    def n(self):
        return len(self.coords)


_RANK = {Poly: 0, Scalar: 1, Form: 2, EquivForm: 3}


class ExprParser:
    def __init__(self, tokens, ctx: Context, line, source):
        self.toks = tokens
        self.k = 0
        self.ctx = ctx
        self.line = line
        self.source = source

    # helpers ----------------------------------------------------------
    def peek(self):
        return self.toks[self.k]

    def take(self):
        t = self.toks[self.k]
        self.k += 1
        return t

    def expect(self, text):
        t = self.take()
        if t.text != text:
            self.fail(f"expected {text!r}, found {t.text or 'end of input'!r}", t)
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ScenarioError(msg, self.line, tok.col, self.source)

    def at_end(self):
        return self.peek().kind == "end"

    # grammar ----------------------------------------------------------
    def parse(self, linear=False):
        v = self.expr(linear)
        if not self.at_end():
            self.fail(f"unexpected {self.peek().text!r}")
        return v

    def expr(self, linear):
        tok = self.peek()
        if tok.text in "+-" and tok.kind == "op":
            self.take()
            v = self.term(linear)
            if tok.text == "-":
                v = self.apply("neg", v, None, tok)
        else:
            v = self.term(linear)
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.take()
            w = self.term(linear)
            v = self.apply(op.text, v, w, op)
        return v

    def term(self, linear):
        v = self.power(linear)
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.take()
            w = self.power(linear)
            v = self.apply(op.text, v, w, op)
        return v

    def power(self, linear):
        v = self.atom(linear)
        while self.peek().kind == "op" and self.peek().text == "^":
            op = self.take()
            w = self.atom(linear)
            v = self.apply("^", v, w, op)
        return v

    def atom(self, linear):
        tok = self.take()
        if tok.kind == "num":
            return Poly.const(int(tok.text))
        if tok.kind == "op" and tok.text == "(":
            v = self.expr(linear)
            self.expect(")")
            return v
        if tok.kind == "op" and tok.text == "-":
            return self.apply("neg", self.atom(linear), None, tok)
        if tok.kind == "vec":
            name = tok.text[3:]
            if linear:
                self.fail("derivations are not allowed in a phase", tok)
            if name not in self.ctx.coords:
                self.fail(f"undeclared coordinate {name!r}", tok)
            return VectorField.coord(self.ctx.n, self.ctx.coords.index(name))
        if tok.kind == "name":
            return self.name(tok, linear)
        self.fail(f"unexpected {tok.text or 'end of input'!r}", tok)

    def name(self, tok, linear):
        t = tok.text
        ctx = self.ctx
        if t in ("cos", "sin", "exp"):
            if linear:
                self.fail("nested functions are not supported in a phase", tok)
            self.expect("(")
            arg = self.expr(True)
            self.expect(")")
            return self.function(t, _lin_or_fail(self, arg, tok), tok)
        if t == "i":
            return Poly.const(I)
        if t in ctx.coords:
            if not linear:
                self.fail(f"coordinate {t!r} may only appear inside cos, sin or exp", tok)
            return Lin({ctx.coords.index(t): QI(1)})
        if t in ctx.params:
            return Poly.param(t)
        if t in ctx.duals:
            if linear:
                self.fail("dual variables are not allowed in a phase", tok)
            return EquivForm.var(ctx.n, ctx.duals, ctx.duals.index(t))
        if t.startswith("d") and t[1:] in ctx.coords:
            if linear:
                self.fail("differentials are not allowed in a phase", tok)
            return Form.d_coord(ctx.n, ctx.coords.index(t[1:]))
        if t in ctx.objects:
            obj = ctx.objects[t]
            if linear or not isinstance(obj, (Poly, Scalar, Form, VectorField, EquivForm)):
                self.fail(f"{t!r} cannot be used inside an expression", tok)
            return obj
        self.fail(f"undeclared name {t!r}", tok)

    def function(self, fn, arg: Lin, tok):
        n = self.ctx.n
        c = arg.const
        if c.has_exp():
            self.fail("phase constants must be exp-free", tok)
        if fn == "exp":
            k = [0] * n
            for a, v in arg.coords.items():
                if v.a != 0 or v.d != 1:
                    self.fail("exp needs i times an integer combination of coordinates", tok)
                k[a] = v.b
            atom = Poly.exp(c)
            return Scalar(n, {tuple(k): atom}) if any(k) else atom
        k = [0] * n
        for a, v in arg.coords.items():
            if v.b != 0 or v.d != 1:
                self.fail(f"{fn} needs an integer combination of coordinates", tok)
            k[a] = v.a
        kp = tuple(k)
        km = tuple(-x for x in k)
        ep, em = Poly.exp(c * I), Poly.exp(-(c * I))
        half = QI(1) / 2
        if fn == "cos":
            pp, pm = ep * half, em * half
        else:
            pp, pm = ep * (QI(0, -1) / 2), em * (QI(0, 1) / 2)
        if not any(k):
            return pp + pm
        return Scalar(n, {kp: pp}) + Scalar(n, {km: pm})

    # arithmetic -------------------------------------------------------
    def apply(self, op, a, b, tok):
        try:
            return _apply(op, a, b, self.ctx)
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            self.fail(str(exc) or f"invalid operands for {op!r}", tok)


def _lin_or_fail(parser, arg, tok):
    try:
        return _lin(arg)
    except TypeError as exc:
        parser.fail(str(exc), tok)


def _promote(v, rank, ctx):
    r = _RANK[type(v)]
    if r < 1 <= rank:
        v = Scalar.const(ctx.n, v)
    if r < 2 <= rank:
        v = Form.scalar(v)
    if r < 3 <= rank:
        v = EquivForm.from_form(v, ctx.duals)
    return v


def _apply(op, a, b, ctx):
    if isinstance(a, Lin) or isinstance(b, Lin):
        if op == "neg":
            return -a
        if op == "+":
            return _lin(a) + _lin(b)
        if op == "-":
            return _lin(a) + (-_lin(b))
        if op == "*":
            if isinstance(a, Lin) and isinstance(b, Lin):
                raise TypeError("phases must be affine in the coordinates")
            lin, p = (a, b) if isinstance(a, Lin) else (b, a)
            if not isinstance(p, Poly):
                raise TypeError("phases must be affine in the coordinates")
            return lin.scale(p)
        if op == "/":
            if not isinstance(b, Poly) or b.constant_value() is None or not b:
                raise TypeError("phases may only be divided by nonzero numbers")
            return _lin(a).scale(Poly.const(b.constant_value().inverse()))
        raise TypeError(f"{op!r} is not allowed in a phase")
    if op == "neg":
        return -a
    if isinstance(a, VectorField) or isinstance(b, VectorField):
        return _apply_vf(op, a, b, ctx)
    if op == "/":
        q = b.constant_value() if isinstance(b, Poly) else None
        if q is None or q.is_zero():
            raise ZeroDivisionError("division is only by nonzero numbers")
        return a * Poly.const(q.inverse()) if isinstance(a, Poly) else a * q.inverse()
    if op == "^":
        q = b.constant_value() if isinstance(b, Poly) else None
        if q is not None and q.b == 0 and q.d == 1 and q.a >= 0:
            e = q.a
            out = _promote(Poly.const(1), _RANK[type(a)], ctx)
            for _ in range(e):
                out = out * a
            return out
        if _RANK[type(a)] >= 2 and _RANK[type(b)] >= 2:
            op = "*"
        else:
            raise TypeError("'^' needs an integer exponent or two forms")
    rank = max(_RANK[type(a)], _RANK[type(b)])
    a, b = _promote(a, rank, ctx), _promote(b, rank, ctx)
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    raise TypeError(f"unknown operator {op!r}")


def _apply_vf(op, a, b, ctx):
    if op in "+-":
        if not (isinstance(a, VectorField) and isinstance(b, VectorField)):
            raise TypeError("vector fields can only be added to vector fields")
        return a + b if op == "+" else a - b
    if op == "*":
        v, s = (a, b) if isinstance(a, VectorField) else (b, a)
        if isinstance(s, VectorField):
            raise TypeError("vector fields cannot be multiplied together")
        if isinstance(s, Poly):
            s = Scalar.const(ctx.n, s)
        if not isinstance(s, Scalar):
            raise TypeError("vector fields can only be scaled by functions")
        return v * s
    if op == "/" and isinstance(a, VectorField) and isinstance(b, Poly):
        q = b.constant_value()
        if q is None or q.is_zero():
            raise ZeroDivisionError("division is only by nonzero numbers")
        return a * Scalar.const(ctx.n, q.inverse())
    raise TypeError(f"invalid operands for {op!r}")


# ---------------------------------------------------------------- scenario


@dataclass
class Declaration:
    kind: str
    name: str
    value: object
    line: int
    extra: dict = field(default_factory=dict)


@dataclass
class Directive:
    op: str
    args: tuple
    options: dict
    line: int
    arg_cols: tuple = ()


@dataclass
class ScenarioFile:
    coords: tuple
    params: tuple
    duals: tuple
    cutoff: int | None
    suites: tuple
    declarations: list
    directives: list

    @property
    def objects(self) -> dict:
        return {d.name: d.value for d in self.declarations}

    def get(self, name, kinds, line=0, source="<scenario>", col=1):
        for d in self.declarations:
            if d.name == name:
                if kinds and d.kind not in kinds:
                    raise ScenarioError(f"{name!r} is a {d.kind}, expected {' or '.join(kinds)}", line, col, source)
                return d
        raise ScenarioError(f"undeclared name {name!r}", line, col, source)


class _Lines:
    def __init__(self, text, source):
        self.source = source
        self.items = []
        for num, raw in enumerate(text.splitlines(), start=1):
            body = raw.split("#", 1)[0].rstrip()
            if body.strip():
                self.items.append((num, body))


def _split_top(text, sep, col0):
    """Split on ``sep`` outside parentheses, yielding ``(piece, column offset)``."""
    out = []
    depth = 0
    start = 0
    for j, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == sep and depth == 0:
            out.append((text[start:j], col0 + start))
            start = j + 1
    out.append((text[start:], col0 + start))
    return out


def parse_scenario(text: str, source: str = "<scenario>") -> ScenarioFile:
    ctx = Context()
    cutoff = None
    suites = ()
    decls: list = []
    directives: list = []
    header_done = False

    def err(msg, line, col=1):
        raise ScenarioError(msg, line, col, source)

    def evaluate(piece, line, col, want=None):
        if not piece.strip():
            err("empty expression", line, col + 1)
        toks = tokenize(piece, line, col, source)
        v = ExprParser(toks, ctx, line, source).parse()
        if want == "form":
            if isinstance(v, (Poly, Scalar)):
                v = _promote(v, 2, ctx)
            if not isinstance(v, Form):
                err("expected a form", line, col + 1)
        elif want == "field":
            if not isinstance(v, VectorField):
                err("expected a vector field", line, col + 1)
        elif want == "scalar":
            if isinstance(v, Poly):
                v = Scalar.const(ctx.n, v)
            if not isinstance(v, Scalar):
                err("expected a function", line, col + 1)
        elif want == "equiv":
            if not ctx.duals:
                err("equivariant forms need a 'duals' header", line, col + 1)
            if isinstance(v, (Poly, Scalar, Form)):
                v = _promote(v, 3, ctx)
            if not isinstance(v, EquivForm):
                err("expected an equivariant form", line, col + 1)
        return v

    def new_name(name, line, col):
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name):
            err(f"invalid name {name!r}", line, col)
        taken = set(ctx.coords) | set(ctx.params) | set(ctx.duals) | set(ctx.objects)
        taken |= {"d" + c for c in ctx.coords}
        if name in taken or name in RESERVED or name in KEYWORDS:
            err(f"name {name!r} is already in use", line, col)

    for line, body in _Lines(text, source).items:
        m = re.match(r"\s*(\S+)", body)
        kw = m.group(1)
        rest_col = m.end()
        rest = body[rest_col:]
        words = rest.split()
        if kw in ("coords", "params", "duals"):
            if header_done:
                err(f"'{kw}' must precede all declarations", line)
            if getattr(ctx, kw):
                err(f"duplicate '{kw}' line", line)
            for w in words:
                if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", w) or w in RESERVED or w in KEYWORDS:
                    err(f"invalid name {w!r}", line, body.index(w) + 1)
            names = tuple(words)
            if len(set(names)) != len(names):
                err("duplicate names", line)
            taken = set(ctx.coords) | set(ctx.params) | set(ctx.duals)
            if kw == "coords" and not names:
                err("need at least one coordinate", line)
            for w in names:
                if w in taken or (kw != "coords" and ("d" + w in taken or (w.startswith("d") and w[1:] in ctx.coords))):
                    err(f"name {w!r} is already in use", line, body.index(w) + 1)
            setattr(ctx, kw, names)
            continue
        if kw == "cutoff":
            if len(words) != 1 or not words[0].isdigit() or int(words[0]) < 1:
                err("cutoff must be a positive integer", line, rest_col + 1)
            cutoff = int(words[0])
            continue
        if kw == "suite":
            suites = tuple(words)
            continue
        if not ctx.coords:
            err("'coords' must be declared first", line)
        header_done = True
        if kw == "run":
            if not words:
                err("missing operation", line, rest_col + 1)
            spans = [(m_.group(0), rest_col + m_.start() + 1) for m_ in re.finditer(r"\S+", rest)]
            op = spans.pop(0)[0]
            if op == "kronecker":
                if not spans:
                    err("kronecker needs orbit, closure or average", line)
                op = "kronecker-" + spans.pop(0)[0]
            pos, cols, opts = [], [], {}
            for a, c in spans:
                if "=" in a:
                    k, v = a.split("=", 1)
                    opts[k] = v
                else:
                    pos.append(a)
                    cols.append(c)
            directives.append(Directive(op, tuple(pos), opts, line, tuple(cols)))
            continue
        hm = re.match(r"\s*([A-Za-z_][A-Za-z_0-9]*)\s*(.*?)\s*=\s*", rest)
        if kw not in KEYWORDS:
            err(f"unknown keyword {kw!r}", line)
        if kw == "bundle":
            bm = re.fullmatch(r"\s*(\w+)\s+base\s*(.*?)\s+fiber\s+(.+?)\s*", rest)
            if not bm:
                err("expected 'bundle NAME base ... fiber ...'", line, rest_col + 1)
            name = bm.group(1)
            new_name(name, line, rest_col + 2)
            base, fiber = bm.group(2).split(), bm.group(3).split()
            for w in base + fiber:
                if w not in ctx.coords:
                    err(f"undeclared coordinate {w!r}", line, body.index(w, rest_col) + 1)
            if tuple(base + fiber) != ctx.coords:
                err("bundle must list every coordinate, base first then fiber, in declared order", line)
            value = Bundle(len(base), len(fiber))
            decls.append(Declaration("bundle", name, value, line))
            ctx.objects[name] = value
            continue
        if not hm:
            err(f"expected '{kw} NAME ... = ...'", line, rest_col + 1)
        name, mid = hm.group(1), hm.group(2)
        new_name(name, line, rest_col + hm.start(1) + 1)
        expr_col = rest_col + hm.end()
        rhs = rest[hm.end():]
        extra = {}
        if kw in ("scalar", "form", "field", "equivform"):
            if mid:
                err(f"unexpected {mid!r}", line, rest_col + hm.start(2) + 1)
            want = {"scalar": "scalar", "form": "form", "field": "field", "equivform": "equiv"}[kw]
            value = evaluate(rhs, line, expr_col, want)
        elif kw == "foliation":
            rank = None
            if mid:
                rm = re.fullmatch(r"rank\s+(\d+)", mid)
                if not rm:
                    err(f"unexpected {mid!r}", line, rest_col + hm.start(2) + 1)
                rank = int(rm.group(1))
            gens = tuple(evaluate(p, line, c, "field") for p, c in _split_top(rhs, ";", expr_col))
            try:
                value = Foliation(gens, rank)
            except ValueError as exc:
                err(str(exc), line, expr_col + 1)
            extra["rank_given"] = rank is not None
        elif kw == "connection":
            cm = re.fullmatch(r"on\s+(\w+)", mid)
            if not cm:
                err("expected 'connection NAME on BUNDLE = ...'", line, rest_col + 1)
            bname = cm.group(1)
            if not isinstance(ctx.objects.get(bname), Bundle):
                err(f"undeclared bundle {bname!r}", line, rest_col + hm.start(2) + 4)
            forms = tuple(evaluate(p, line, c, "form") for p, c in _split_top(rhs, ";", expr_col))
            try:
                value = Connection(ctx.objects[bname], forms)
            except ValueError as exc:
                err(str(exc), line, expr_col + 1)
            extra["bundle"] = bname
        elif kw == "matrix":
            if mid not in ("", "diag"):
                err(f"unexpected {mid!r}", line, rest_col + hm.start(2) + 1)
            if mid == "diag":
                entries = [evaluate(p, line, c, "form") for p, c in _split_top(rhs, ",", expr_col)]
                value = Mat.diag(entries, Form.zero(ctx.n))
            else:
                rows = []
                for rp, rc in _split_top(rhs, ";", expr_col):
                    rows.append([evaluate(p, line, c, "form") for p, c in _split_top(rp, ",", rc)])
                try:
                    value = Mat(rows)
                except ValueError as exc:
                    err(str(exc), line, expr_col + 1)
        elif kw == "frame":
            if mid:
                err(f"unexpected {mid!r}", line, rest_col + hm.start(2) + 1)
            pairs = []
            for p, c in _split_top(rhs, ";", expr_col):
                parts = _split_top(p, ":", c)
                if len(parts) != 2:
                    err("frame entries are 'form : field'", line, c + 1)
                (tp, tc), (xp, xc) = parts
                pairs.append((evaluate(tp, line, tc, "form"), evaluate(xp, line, xc, "field")))
            value = tuple(pairs)
        elif kw == "actions":
            if mid:
                err(f"unexpected {mid!r}", line, rest_col + hm.start(2) + 1)
            value = tuple(evaluate(p, line, c, "field") for p, c in _split_top(rhs, ";", expr_col))
        elif kw == "metric":
            if mid:
                err(f"unexpected {mid!r}", line, rest_col + hm.start(2) + 1)
            parts = _split_top(rhs, ":", expr_col)
            if len(parts) != 2:
                err("metric is 'coframe : matrix rows'", line, expr_col + 1)
            coframe = tuple(
                evaluate(p, line, c, "form") for p, c in _split_top(parts[0][0], ",", parts[0][1])
            )
            rows = []
            for rp, rc in _split_top(parts[1][0], ";", parts[1][1]):
                rows.append(tuple(evaluate(p, line, c, "scalar") for p, c in _split_top(rp, ",", rc)))
            try:
                value = TransverseMetric(coframe, tuple(rows))
            except ValueError as exc:
                err(str(exc), line, expr_col + 1)
        elif kw == "slope":
            if mid:
                err(f"unexpected {mid!r}", line, rest_col + hm.start(2) + 1)
            value = _parse_slope(rhs.strip(), ctx, line, expr_col, source)
        else:
            err(f"unexpected keyword {kw!r}", line)
        decls.append(Declaration(kw, name, value, line, extra))
        ctx.objects[name] = value
    return ScenarioFile(ctx.coords, ctx.params, ctx.duals, cutoff, suites, decls, directives)


def _parse_slope(text, ctx, line, col, source):
    if text.startswith("irr:"):
        name = text[4:]
        if name not in ctx.params:
            raise ScenarioError(f"undeclared parameter {name!r}", line, col + 5, source)
        return KroneckerGroupoid(name)
    m = re.fullmatch(r"(-?\d+)(?:/(\d+))?", text)
    if not m:
        raise ScenarioError("slope is 'irr:NAME' or a rational 'p/q'", line, col + 1, source)
    den = int(m.group(2) or 1)
    if den == 0:
        raise ScenarioError("zero denominator", line, col + 1, source)
    return KroneckerGroupoid(Fraction(int(m.group(1)), den))


# ---------------------------------------------------------------- serialization


def format_value(v, names) -> str:
    if isinstance(v, Poly):
        return format_poly(v)
    if isinstance(v, Scalar):
        return format_scalar(v, names)
    if isinstance(v, Form):
        return format_form(v, names)
    if isinstance(v, VectorField):
        return format_vector_field(v, names)
    if isinstance(v, EquivForm):
        return format_equiv(v, names)
    raise TypeError(f"cannot format {type(v).__name__}")


def format_slope(g: KroneckerGroupoid) -> str:
    if g.is_formal:
        (name,) = sorted(g.slope.parameters())
        return f"irr:{name}"
    r = g.rational_slope
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


def serialize(s: ScenarioFile) -> str:
    names = s.coords
    out = [f"coords {' '.join(s.coords)}"]
    if s.params:
        out.append(f"params {' '.join(s.params)}")
    if s.duals:
        out.append(f"duals {' '.join(s.duals)}")
    if s.cutoff is not None:
        out.append(f"cutoff {s.cutoff}")
    if s.suites:
        out.append(f"suite {' '.join(s.suites)}")
    fv = lambda v: format_value(v, names)  # noqa: E731
    for d in s.declarations:
        v = d.value
        if d.kind in ("scalar", "form", "field", "equivform"):
            out.append(f"{d.kind} {d.name} = {fv(v)}")
        elif d.kind == "foliation":
            rank = f" rank {v.rank}" if d.extra.get("rank_given") else ""
            out.append(f"foliation {d.name}{rank} = " + " ; ".join(fv(g) for g in v.generators))
        elif d.kind == "bundle":
            base = " ".join(names[: v.base_angles])
            fiber = " ".join(names[v.base_angles:])
            out.append(f"bundle {d.name} base {base} fiber {fiber}".replace("base  fiber", "base fiber"))
        elif d.kind == "connection":
            out.append(f"connection {d.name} on {d.extra['bundle']} = " + " ; ".join(fv(w) for w in v.omega))
        elif d.kind == "matrix":
            if v.is_diagonal():
                out.append(f"matrix {d.name} diag = " + ", ".join(fv(x) for x in v.diagonal()))
            else:
                out.append(f"matrix {d.name} = " + " ; ".join(", ".join(fv(x) for x in r) for r in v.rows))
        elif d.kind == "frame":
            out.append(f"frame {d.name} = " + " ; ".join(f"{fv(t)} : {fv(X)}" for t, X in v))
        elif d.kind == "actions":
            out.append(f"actions {d.name} = " + " ; ".join(fv(Y) for Y in v))
        elif d.kind == "metric":
            rows = " ; ".join(", ".join(fv(x) for x in r) for r in v.matrix)
            out.append(f"metric {d.name} = " + ", ".join(fv(e) for e in v.coframe) + f" : {rows}")
        elif d.kind == "slope":
            out.append(f"slope {d.name} = {format_slope(v)}")
    for r in s.directives:
        op = r.op.replace("kronecker-", "kronecker ", 1) if r.op.startswith("kronecker-") else r.op
        parts = [op, *r.args, *(f"{k}={v}" for k, v in sorted(r.options.items()))]
        out.append("run " + " ".join(parts))
    return "\n".join(out) + "\n"
