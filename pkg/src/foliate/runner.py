"""Execute scenario directives and render result records."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import bundle as bd
from . import cartan as ct
from . import foliation as fo
from . import groupoid as gr
from .coeffs import format_poly
from .exterior import Form, Mat, VectorField
from .parsing import Directive, ScenarioError, ScenarioFile, format_slope, format_value, parse_scenario


class OperationError(Exception):
    """An operation rejected its (well-formed) input."""


@dataclass
class Record:
    directive: Directive
    status: str
    fields: list = field(default_factory=list)  # (key, str | list[str])

    @property
    def header(self) -> str:
        d = self.directive
        op = d.op.replace("kronecker-", "kronecker ", 1)
        parts = [op, *d.args, *(f"{k}={v}" for k, v in sorted(d.options.items()))]
        return "run " + " ".join(parts)

    def as_dict(self) -> dict:
        d = self.directive
        return {
            "op": d.op,
            "args": list(d.args),
            "options": dict(sorted(d.options.items())),
            "status": self.status,
            "fields": {k: v for k, v in self.fields},
        }


def _bool(x) -> str:
    return "true" if x else "false"


class Executor:
    def __init__(self, scenario: ScenarioFile, source="<scenario>", cutoff_override=None):
        self.s = scenario
        self.source = source
        self.names = scenario.coords
        self.cutoff_override = cutoff_override

    # helpers ----------------------------------------------------------
    def fmt(self, v) -> str:
        return format_value(v, self.names)

    def fmt_mat(self, M: Mat):
        if M.size == 1:
            return self.fmt(M[0, 0])
        return [", ".join(self.fmt(x) for x in row) for row in M.rows]

    def obj(self, d: Directive, idx: int, kinds):
        if idx >= len(d.args):
            raise ScenarioError(f"'{d.op}' expects a {' or '.join(kinds)} as argument {idx + 1}", d.line, 1, self.source)
        col = d.arg_cols[idx] if idx < len(d.arg_cols) else 1
        return self.s.get(d.args[idx], kinds, d.line, self.source, col).value

    def opt_obj(self, d, idx, kinds):
        return self.obj(d, idx, kinds) if idx < len(d.args) else None

    def arity(self, d, lo, hi=None):
        hi = lo if hi is None else hi
        if not lo <= len(d.args) <= hi:
            want = str(lo) if lo == hi else f"{lo} to {hi}"
            raise ScenarioError(f"'{d.op}' takes {want} arguments, got {len(d.args)}", d.line, 1, self.source)

    def int_opt(self, d, key, default=None):
        if key not in d.options:
            return default
        v = d.options[key]
        try:
            return int(v)
        except ValueError:
            raise ScenarioError(f"option {key}= needs an integer", d.line, 1, self.source) from None

    def cutoff(self, d):
        k = self.int_opt(d, "cutoff")
        if k is None:
            k = self.cutoff_override if self.cutoff_override is not None else self.s.cutoff
        if k is None:
            raise ScenarioError(f"'{d.op}' needs a cutoff", d.line, 1, self.source)
        return k

    def connection_like(self, d, idx):
        return self.obj(d, idx, ("connection", "matrix", "form"))

    # dispatch ---------------------------------------------------------
    def run(self, d: Directive) -> Record:
        handler = getattr(self, "op_" + d.op.replace("-", "_"), None)
        if handler is None:
            raise ScenarioError(f"unknown operation {d.op!r}", d.line, 1, self.source)
        for k in d.options:
            if k not in ("cutoff", "steps", "start", "at", "order"):
                raise ScenarioError(f"unknown option {k!r}", d.line, 1, self.source)
        try:
            status, fields = handler(d)
        except ScenarioError:
            raise
        except (ValueError, ZeroDivisionError) as exc:
            return Record(d, "error", [("message", str(exc))])
        return Record(d, status, fields)

    def run_all(self):
        return [self.run(d) for d in self.s.directives]

    # foliation --------------------------------------------------------
    def op_involutive(self, d):
        self.arity(d, 1)
        F = self.obj(d, 0, ("foliation",))
        r = fo.check_involutive(F, self.cutoff(d))
        fields = []
        if r.offending is not None:
            i, j, B = r.offending
            fields.append(("bracket", f"[Z{i + 1}, Z{j + 1}] = {self.fmt(B)}"))
        if r.status == "true":
            lines = [
                f"[Z{i + 1}, Z{j + 1}] = " + " ; ".join(self.fmt(a) for a in coeffs)
                for (i, j), coeffs in sorted(r.witness.items())
            ]
            fields.append(("witness", lines or "none"))
        return r.status, fields

    def op_basic_form(self, d):
        self.arity(d, 2)
        F = self.obj(d, 0, ("foliation",))
        a = self.obj(d, 1, ("form", "scalar"))
        a = a if isinstance(a, Form) else Form.scalar(a)
        return _bool(fo.is_basic_form(F, a)), [("form", self.fmt(a))]

    def op_bott(self, d):
        self.arity(d, 3)
        F = self.obj(d, 0, ("foliation",))
        Z = self.obj(d, 1, ("field",))
        s = self.obj(d, 2, ("field",))
        out = fo.bott_derivative(F, Z, s)
        return "ok", [("value", self.fmt(out))]

    def op_closure_rank(self, d):
        self.arity(d, 1)
        F = self.obj(d, 0, ("foliation",))
        r = fo.closure_rank(F)
        return "ok", [("closure_rank", str(r)), ("leaf_rank", str(F.rank)), ("closed_leaves", _bool(r == F.rank))]

    def op_cohomology(self, d):
        self.arity(d, 1)
        F = self.obj(d, 0, ("foliation",))
        K = self.cutoff(d)
        dims = fo.basic_cohomology_dims(F, K)
        return "ok", [("cutoff", str(K)), ("dims", " ".join(str(x) for x in dims))]

    def op_transverse(self, d):
        self.arity(d, 2)
        F = self.obj(d, 0, ("foliation",))
        g = self.obj(d, 1, ("metric",))
        return _bool(fo.check_transverse_metric(F, g)), []

    # bundle -----------------------------------------------------------
    def op_check_connection(self, d):
        self.arity(d, 1)
        return _bool(bd.check_connection(self.obj(d, 0, ("connection",)))), []

    def op_check_basic(self, d):
        self.arity(d, 2)
        c = self.connection_like(d, 0)
        F = self.obj(d, 1, ("foliation",))
        return bd.check_basic_connection(c, F), []

    def op_curvature(self, d):
        self.arity(d, 1)
        M = bd.curvature(self.connection_like(d, 0))
        return "ok", [("curvature", self.fmt_mat(M))]

    def op_solve_basic(self, d):
        self.arity(d, 2)
        P = self.obj(d, 0, ("bundle",))
        F = self.obj(d, 1, ("foliation",))
        K = self.cutoff(d)
        r = bd.basic_connection_solve(P, F, K, names=self.names)
        if isinstance(r, bd.Feasible):
            c = r.connection
            return "feasible", [
                ("cutoff", str(K)),
                ("connection", " ; ".join(self.fmt(w) for w in c.omega)),
                ("check_basic", bd.check_basic_connection(c, F)),
                ("unknowns", str(r.n_unknowns)),
                ("rank", str(r.rank)),
            ]
        cert = r.certificate
        lines = [f"({format_poly(m)}) * {r.labels[k]}" for k, m in cert.items()]
        return "infeasible", [
            ("cutoff", str(K)),
            ("rows", str(len(r.rows))),
            ("certificate", lines),
            ("residual", format_poly(cert.residual)),
            ("verified", _bool(r.verify())),
        ]

    def op_metric(self, d):
        self.arity(d, 3)
        c = self.obj(d, 0, ("connection",))
        F = self.obj(d, 1, ("foliation",))
        g = self.obj(d, 2, ("metric",))
        base = c.bundle.base_axes
        try:
            g_base = fo.TransverseMetric(
                tuple(e.restrict(base) for e in g.coframe),
                tuple(tuple(x.restrict(base) for x in row) for row in g.matrix),
            )
        except ValueError as exc:
            raise ValueError(f"base metric must only involve base angles ({exc})") from None
        out = bd.metric_from_connection(c, F, g_base)
        return "ok", [
            ("coframe", [self.fmt(e) for e in out.coframe]),
            ("matrix", [", ".join(self.fmt(x) for x in row) for row in out.matrix]),
            ("invariant", _bool(fo.check_transverse_metric(F, out))),
        ]

    def op_reduce(self, d):
        self.arity(d, 2)
        c = self.connection_like(d, 0)
        frame = self.obj(d, 1, ("frame",))
        r = bd.reduce_connection(c, frame)
        value = " ; ".join(self.fmt(w) for w in r.omega.omega) if isinstance(r.omega, bd.Connection) else self.fmt_mat(r.omega)
        return "ok", [
            ("reduced", value),
            ("horizontal", _bool(r.horizontal)),
            ("basic_along_frame", _bool(r.basic_along_frame)),
        ]

    def op_transgression(self, d):
        self.arity(d, 2, 3)
        c0 = self.connection_like(d, 0)
        c1 = self.connection_like(d, 1)
        F = self.opt_obj(d, 2, ("foliation",))
        T = bd.transgression_form(c0, c1, F)
        ch0, ch1 = ct.chern_character(c0), ct.chern_character(c1)
        fields = [
            ("transgression", self.fmt(T)),
            ("dT", self.fmt(T.d())),
            ("ch1_minus_ch0", self.fmt(ch1 - ch0)),
            ("identity", _bool(T.d() == ch1 - ch0)),
        ]
        if F is not None:
            fields.append(("basic", _bool(fo.is_basic_form(F, T))))
        return "ok", fields

    # cartan -----------------------------------------------------------
    def equiv(self, d, idx):
        a = self.obj(d, idx, ("equivform", "form"))
        if isinstance(a, Form):
            a = ct.EquivForm.from_form(a, self.s.duals)
        return a

    def bundle_data(self, d):
        c = self.connection_like(d, 0)
        Ys = self.obj(d, 1, ("actions",))
        return ct.EquivariantBundleData(c, Ys, self.s.duals[: len(Ys)] if len(self.s.duals) >= len(Ys) else ())

    def op_equiv_d(self, d):
        self.arity(d, 2)
        a = self.equiv(d, 0)
        Ys = self.obj(d, 1, ("actions",))
        out = ct.equivariant_d(a, Ys)
        dd = ct.equivariant_d(out, Ys)
        lie = ct.EquivForm.zero(a.n, a.dual_vars)
        for j, Y in enumerate(Ys):
            lie = lie - ct.EquivForm.var(a.n, a.dual_vars, j) * ct.equivariant_lie(a, Y)
        return "ok", [
            ("value", self.fmt(out)),
            ("square", self.fmt(dd)),
            ("square_identity", _bool(dd == lie)),
        ]

    def op_moment(self, d):
        self.arity(d, 2)
        mu = ct.moment(self.bundle_data(d))
        return "ok", [(f"mu({x})", self.fmt_mat(M)) for x, M in mu.items()]

    def op_equiv_curvature(self, d):
        self.arity(d, 2)
        data = self.bundle_data(d)
        F = ct.equivariant_curvature(data)
        return "ok", [("value", self.fmt_mat(F)), ("bianchi", _bool(ct.equivariant_bianchi(data)))]

    def op_chern(self, d):
        self.arity(d, 1, 2)
        c = self.connection_like(d, 0)
        F = self.opt_obj(d, 1, ("foliation",))
        ch = ct.chern_character(c)
        fields = [("value", self.fmt(ch)), ("closed", _bool(not ch.d()))]
        if F is not None:
            fields.append(("connection_basic", _bool(bd.is_basic(c, F))))
            fields.append(("basic", _bool(fo.is_basic_form(F, ch))))
        return "ok", fields

    def op_equiv_chern(self, d):
        self.arity(d, 2)
        data = self.bundle_data(d)
        if "at" in d.options:
            try:
                point = [Fraction(v) for v in d.options["at"].split(",")]
            except ValueError:
                raise ScenarioError("at= needs comma-separated rationals", d.line, 1, self.source) from None
            r = ct.equivariant_chern_character(data, eval_at=point)
            where = ("at", ", ".join(str(p) for p in point))
        else:
            order = self.int_opt(d, "order")
            r = ct.equivariant_chern_character(data, order=order)
            where = ("order", str(order))
        return "ok", [where, ("value", self.fmt(r.value)), ("closed", _bool(r.closed))]

    def op_horizontal(self, d):
        self.arity(d, 2)
        a = self.obj(d, 0, ("equivform", "form"))
        frame = self.obj(d, 1, ("frame",))
        return "ok", [("value", self.fmt(ct.horizontal_projection(a, frame)))]

    def op_chern_weil(self, d):
        self.arity(d, 2, 3)
        a = self.equiv(d, 0)
        frame = self.obj(d, 1, ("frame",))
        Ys = self.opt_obj(d, 2, ("actions",)) or ()
        X = tuple(X for _, X in frame)
        out = ct.chern_weil(a, frame, k_actions=Ys)
        fields = [("value", self.fmt(out))]
        if ct.is_invariant(a, X + tuple(Ys)):
            lhs = ct.chern_weil(ct.equivariant_d(a, X + tuple(Ys)), frame, k_actions=Ys)
            rhs = out.d() if not Ys else ct.equivariant_d(out, Ys)
            fields.append(("chain_map", _bool(lhs == rhs)))
        return "ok", fields

    # groupoid ---------------------------------------------------------
    def op_kronecker_orbit(self, d):
        self.arity(d, 1)
        g = self.obj(d, 0, ("slope",))
        start = d.options.get("start", "0")
        try:
            start = Fraction(start)
        except ValueError:
            raise ScenarioError("start= is a rational multiple of pi", d.line, 1, self.source) from None
        o = gr.return_map_orbit(g, gr.Angle(start), self.int_opt(d, "steps", 0))
        return "ok", [
            ("slope", format_slope(g)),
            ("angles", ", ".join(a.format() for a in o.angles)),
            ("distinct", _bool(o.distinct)),
            ("period", "none" if o.period is None else str(o.period)),
        ]

    def op_kronecker_closure(self, d):
        self.arity(d, 1)
        g = self.obj(d, 0, ("slope",))
        return "ok", [("slope", format_slope(g)), ("closure", gr.closure_description(g).describe())]

    def op_kronecker_average(self, d):
        self.arity(d, 2)
        c = self.obj(d, 0, ("connection",))
        g = self.obj(d, 1, ("slope",))
        r = gr.haar_average_connection(c, g)
        return "ok", [
            ("averaged", " ; ".join(self.fmt(w) for w in r.connection.omega)),
            ("rotation_invariant", _bool(r.invariant)),
            ("idempotent", _bool(r.idempotent)),
            ("connection", _bool(r.is_connection)),
        ]


# ---------------------------------------------------------------- rendering


def render_text(records) -> str:
    out = []
    for r in records:
        out.append(r.header)
        out.append(f"  status: {r.status}")
        for k, v in r.fields:
            if isinstance(v, list):
                out.append(f"  {k}:")
                out.extend(f"    {x}" for x in v)
            else:
                out.append(f"  {k}: {v}")
    return "\n".join(out) + "\n"


def render_json(records, name=None) -> str:
    doc = {"scenario": name, "results": [r.as_dict() for r in records]}
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def run_text(text: str, source="<scenario>", cutoff=None):
    s = parse_scenario(text, source)
    return Executor(s, source, cutoff).run_all()


# ---------------------------------------------------------------- suite


MODULES = ("scalar", "exterior", "foliation", "bundle", "cartan", "groupoid", "cli")


def scenario_dir() -> Path:
    return Path(str(resources.files("foliate") / "scenarios"))


def bundled_scenarios() -> dict:
    return {p.stem: p for p in sorted(scenario_dir().glob("*.scn"))}


@dataclass
class SuiteEntry:
    name: str
    passed: bool
    detail: str = ""


def select_scenarios(name: str):
    all_ = bundled_scenarios()
    if name in ("all", "paper-all"):
        return list(all_)
    if name in all_:
        return [name]
    if name in MODULES:
        picked = []
        for stem, path in all_.items():
            s = parse_scenario(path.read_text(), path.name)
            if name in s.suites:
                picked.append(stem)
        return picked
    raise KeyError(f"unknown suite {name!r}; use all, a module name or a scenario name")


def run_suite(name: str = "all"):
    entries = []
    all_ = bundled_scenarios()
    for stem in select_scenarios(name):
        path = all_[stem]
        expected_path = path.with_suffix(".out")
        if not expected_path.exists():
            entries.append(SuiteEntry(stem, False, "missing expected output"))
            continue
        try:
            got = render_text(run_text(path.read_text(), path.name))
        except ScenarioError as exc:
            entries.append(SuiteEntry(stem, False, str(exc)))
            continue
        ok = got == expected_path.read_text()
        entries.append(SuiteEntry(stem, ok, "" if ok else "output differs from expected"))
    return entries


def render_suite(entries) -> str:
    lines = [f"{'PASS' if e.passed else 'FAIL'} {e.name}" + (f" ({e.detail})" if e.detail else "") for e in entries]
    passed = sum(e.passed for e in entries)
    lines.append(f"{passed}/{len(entries)} scenarios passed")
    return "\n".join(lines) + "\n"
