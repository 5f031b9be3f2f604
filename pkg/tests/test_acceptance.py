"""Acceptance criteria, one PASS/FAIL line each (run with ``pytest -s`` to see them)."""

import time

from hypothesis import given, settings
from hypothesis import strategies as st

import strategies as S
from test_cartan import equiv_forms, principal_frames, z_free_forms
from foliate import (
    Bundle, Connection, EquivariantBundleData, Foliation, Form, Poly, Scalar, TransverseMetric,
    VectorField, basic_connection_solve, basic_cohomology_dims, bracket, check_basic_connection,
    check_connection, check_transverse_metric, chern_character, chern_weil, equivariant_d,
    exterior_derivative, haar_average_connection, horizontal_projection, interior_product,
    is_basic_form, lie_derivative, metric_from_connection, parse_scenario, pullback_affine,
    curvature, reduce_connection, transgression_form,
)
from foliate.bundle import Feasible, Infeasible
from foliate.cartan import EquivForm, equivariant_bianchi, equivariant_lie, is_invariant
from foliate.runner import bundled_scenarios, render_suite, render_text, run_suite, run_text


def report(n, title, ok, detail=""):
    print(f"{'PASS' if ok else 'FAIL'} criterion {n}: {title}" + (f" ({detail})" if detail else ""))
    assert ok, detail


def scenario(name):
    return parse_scenario(bundled_scenarios()[name].read_text(), name)


def all_scenarios():
    return {name: parse_scenario(p.read_text(), name) for name, p in bundled_scenarios().items()}


def decls(s, *kinds):
    return [d for d in s.declarations if d.kind in kinds]


def as_matrix(v):
    return v.as_matrix() if isinstance(v, Connection) else v


def counted(n_min, strategy_args, body, max_examples):
    """Run ``body`` under hypothesis and return how many examples executed."""
    calls = [0]

    @settings(max_examples=max_examples, database=None)
    @given(st.tuples(*strategy_args))
    def prop(args):
        calls[0] += 1
        body(*args)

    prop()
    return calls[0]


# ---------------------------------------------------------------- 1

def test_criterion_1_suspension_counterexample():
    P = Bundle(2, 1)
    F = Foliation((VectorField([Scalar.const(3, 1), Scalar.zero(3), Scalar.cos(3, 1)]),))
    c = Poly.param("c")
    Fc = Foliation((VectorField([Scalar.const(3, 1), Scalar.zero(3), Scalar.const(3, c)]),))
    t0 = time.perf_counter()
    results = {K: basic_connection_solve(P, F, K) for K in (1, 2, 3, 4)}
    feasible = basic_connection_solve(P, Fc, 2)
    elapsed = time.perf_counter() - t0
    ok = all(isinstance(r, Infeasible) and r.verify() for r in results.values())
    ok = ok and isinstance(feasible, Feasible)
    ok = ok and check_basic_connection(feasible.connection, Fc) == "basic"
    ok = ok and elapsed < 10
    report(1, "d/dx + cos y d/dz over T^3 infeasible at K=1..4, constant speed feasible",
           ok, f"{elapsed:.2f} s of 10 s")


# ---------------------------------------------------------------- 2

def test_criterion_2_t4_counterexample():
    P = Bundle(3, 1)
    alpha = Poly.param("alpha")
    F = Foliation((VectorField([Scalar.const(4, 1), Scalar.const(4, alpha), Scalar.zero(4), Scalar.cos(4, 2)]),))
    t0 = time.perf_counter()
    results = {K: basic_connection_solve(P, F, K) for K in (1, 2, 3)}
    elapsed = time.perf_counter() - t0
    ok = all(isinstance(r, Infeasible) and r.verify() for r in results.values()) and elapsed < 30
    report(2, "d/dx + alpha d/dy + cos z d/dw over T^4 infeasible at K=1..3", ok, f"{elapsed:.2f} s of 30 s")


# ---------------------------------------------------------------- 3

def test_criterion_3_basic_cohomology():
    alpha = Poly.param("alpha")
    K = Foliation((VectorField([Scalar.const(2, 1), Scalar.const(2, alpha)]),))
    Pr = Foliation((VectorField.coord(2, 0),))
    kron = {k: basic_cohomology_dims(K, k) for k in (2, 3, 4)}
    prod = basic_cohomology_dims(Pr, 3)
    ok = all(v[:2] == [1, 1] and v[2] == 0 for v in kron.values()) and prod[:2] == [1, 1]
    report(3, "Kronecker (1,1) at cutoffs 2,3,4 and span{d/dx} (1,1)", ok,
           f"kronecker {kron}, product {prod}")


# ---------------------------------------------------------------- 4

def test_criterion_4_calculus_suite():
    d, i, L = exterior_derivative, interior_product, lie_derivative
    counts = {}

    def d2(a):
        assert d(d(a)).is_zero()

    def magic(V, a):
        assert L(V, a) == d(i(V, a)) + i(V, d(a))

    def ibracket(V, W, a):
        assert i(bracket(V, W), a) == L(V, i(W, a)) - i(W, L(V, a))

    def functorial(phi, psi, a):
        assert pullback_affine(psi.compose(phi), a) == pullback_affine(phi, pullback_affine(psi, a))

    counts["d^2=0"] = counted(100, (S.forms(3),), d2, 110)
    counts["Cartan"] = counted(100, (S.vector_fields(3), S.forms(3)), magic, 110)
    counts["i([V,W])"] = counted(100, (S.vector_fields(3), S.vector_fields(3), S.forms(3)), ibracket, 110)
    counts["pullback"] = counted(100, (S.affine_maps(2, 3), S.affine_maps(3, 3), S.forms(3)), functorial, 110)
    ok = all(n >= 100 for n in counts.values())
    report(4, "calculus identities exact on >= 100 random inputs each", ok,
           ", ".join(f"{k}: {v}" for k, v in counts.items()))


# ---------------------------------------------------------------- 5

def test_criterion_5_cartan_model():
    duals = ("x1", "x2")

    def dg2(a, Y1, Y2):
        acts = (Y1, Y2)
        lhs = equivariant_d(equivariant_d(a, acts), acts)
        rhs = -(EquivForm.var(3, duals, 0) * equivariant_lie(a, Y1) + EquivForm.var(3, duals, 1) * equivariant_lie(a, Y2))
        assert lhs == rhs

    def dg2_invariant(a):
        acts = (VectorField.coord(3, 2), VectorField.coord(3, 2) * Scalar.const(3, 2))
        assert is_invariant(a, acts)
        assert equivariant_d(equivariant_d(a, acts), acts).is_zero()

    n1 = counted(50, (equiv_forms(), S.vector_fields(3), S.vector_fields(3)), dg2, 60)
    n2 = counted(50, (equiv_forms(form_strategy=z_free_forms()),), dg2_invariant, 60)

    checked, failed = 0, []
    for name, s in all_scenarios().items():
        actions = [()] + [tuple(d.value) for d in decls(s, "actions")]
        for d in decls(s, "connection", "matrix"):
            for acts in actions:
                try:
                    data = EquivariantBundleData(d.value, acts)
                except ValueError:
                    continue  # connection not invariant under these fields
                checked += 1
                if not equivariant_bianchi(data):
                    failed.append(f"{name}:{d.name}")
    ok = n1 >= 50 and n2 >= 50 and checked > 0 and not failed
    report(5, "d_g^2 = -sum x^j L_j, zero on invariants, equivariant Bianchi on bundled scenarios", ok,
           f"{n1} + {n2} random elements, {checked} Bianchi checks, failures {failed}")


# ---------------------------------------------------------------- 6

def test_criterion_6_chern_layer():
    basic_pairs, failures = 0, []
    for name, s in all_scenarios().items():
        for d in decls(s, "connection", "matrix"):
            A = as_matrix(d.value)
            for f in decls(s, "foliation"):
                if f.value.n != A[0, 0].n or check_basic_connection(A, f.value) != "basic":
                    continue
                if not (A.is_diagonal() and curvature_is_diagonal(A)):
                    continue
                basic_pairs += 1
                ch = chern_character(A)
                if exterior_derivative(ch) or not is_basic_form(f.value, ch):
                    failures.append(f"{name}:{d.name}/{f.name}")

    s = scenario("transgression_t3")
    transgressions = 0
    for rec in run_text(bundled_scenarios()["transgression_t3"].read_text()):
        if rec.directive.op != "transgression":
            continue
        a0, a1, F = (s.get(x, ()).value for x in rec.directive.args)
        T = transgression_form(a0, a1, F)
        transgressions += 1
        if exterior_derivative(T) != chern_character(a1) - chern_character(a0):
            failures.append(f"transgression {rec.directive.args}")

    def chain(a, frame):
        X = (frame[0][1],)
        assert chern_weil(equivariant_d(a, X), frame) == exterior_derivative(chern_weil(a, frame))

    def identity(f, frame):
        b = horizontal_projection(f, frame)
        assert chern_weil(b, frame) == b

    n_chain = counted(50, (equiv_forms(duals=("x1",), form_strategy=z_free_forms()), principal_frames()), chain, 60)
    n_id = counted(50, (z_free_forms(), principal_frames()), identity, 60)
    ok = basic_pairs > 0 and transgressions == 3 and not failures and n_chain >= 50 and n_id >= 50
    report(6, "Chern forms closed and basic, transgression identity, Chern-Weil chain map", ok,
           f"{basic_pairs} basic pairs, {transgressions} transgressions, {n_chain} chain-map and "
           f"{n_id} identity samples, failures {failures}")


def curvature_is_diagonal(A):
    return curvature(A).is_diagonal()


# ---------------------------------------------------------------- 7

def test_criterion_7_haar_averaging():
    s = scenario("kronecker")
    g = s.get("s", ("slope",)).value
    results = []
    for d in decls(s, "connection"):
        w = d.value
        h = w.omega[0].coefficient((0,))
        expected = Form.d_coord(2, 1) + Form.d_coord(2, 0) * h.fiber_mean([0])
        out = haar_average_connection(w, g)
        again = haar_average_connection(out.connection, g).connection
        results.append(
            out.connection.omega == (expected,) and again == out.connection
            and out.invariant and check_connection(out.connection)
        )
    ok = len(results) == 3 and all(results)
    report(7, "averaged connection is dz + mean(h) dtheta, idempotent, invariant, a connection", ok,
           f"{sum(results)}/{len(results)} connections")


# ---------------------------------------------------------------- 8

def test_criterion_8_reduction():
    s = scenario("frame_reduction")
    checks = []
    for d in s.directives:
        if d.op != "reduce":
            continue
        c = s.get(d.args[0], ()).value
        frame = s.get(d.args[1], ()).value
        red = reduce_connection(c, frame).omega
        for w in red.omega:
            for _, Y in frame:
                checks.append(interior_product(Y, w).is_zero() and interior_product(Y, exterior_derivative(w)).is_zero())
    ok = len(checks) > 0 and all(checks)
    report(8, "reduced connection satisfies i(Y_k) w = i(Y_k) dw = 0", ok, f"{sum(checks)}/{len(checks)} contractions")


# ---------------------------------------------------------------- 9

def test_criterion_9_metric_from_connection():
    s = scenario("transverse_metric")
    P = s.get("P", ("bundle",)).value
    passed, attempted = 0, 0
    for d in s.directives:
        c, F, g = (s.get(x, ()).value for x in d.args)
        if check_basic_connection(c, F) != "basic":
            continue  # the deliberate non-basic record
        attempted += 1
        g_base = TransverseMetric(
            tuple(e.restrict(P.base_axes) for e in g.coframe),
            tuple(tuple(x.restrict(P.base_axes) for x in row) for row in g.matrix),
        )
        out = metric_from_connection(c, F, g_base)
        passed += check_transverse_metric(F, out)
    ok = attempted == 2 and passed == 2
    report(9, "metric_from_connection passes check_transverse_metric", ok, f"{passed}/{attempted} instances")


# ---------------------------------------------------------------- 10

def test_criterion_10_determinism():
    t0 = time.perf_counter()
    first = run_suite("all")
    second = run_suite("all")
    elapsed = time.perf_counter() - t0
    texts = [
        [render_text(run_text(p.read_text(), p.name)) for p in bundled_scenarios().values()]
        for _ in range(2)
    ]
    ok = (
        render_suite(first) == render_suite(second)
        and texts[0] == texts[1]
        and all(e.passed for e in first)
        and elapsed / 2 < 120
    )
    report(10, "full suite byte-identical across runs and under 2 minutes", ok,
           f"{len(first)} scenarios, {elapsed / 2:.1f} s per run")
