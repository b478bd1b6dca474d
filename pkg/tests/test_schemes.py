import cmath

import pytest
from hypothesis import given, strategies as st

from multipoint.analysis import trace_coc
from multipoint.bigreal import PrecisionContext, format_sci
from multipoint.problems import get_problem, linear_problem
from multipoint.schemes import (
    METHODS, DegenerateGeometryError, MethodParameterError, UnknownMethodError,
    ZeroDerivativeError, declared_orders, get_method, method_labels, newton_step,
    proposed_weight_sets, run, step, weighted_method,
)

LABELS = method_labels()


def test_registry():
    assert len(LABELS) == 13
    assert declared_orders()["d9"] == 16 and declared_orders()["dd2"] == 8
    assert get_method("four_point_W2") is METHODS["d4"]
    assert get_method("kung_traub16").label == "KT"
    with pytest.raises(UnknownMethodError):
        get_method("bogus")


def test_newton_hand_oracle():
    ctx = PrecisionContext(50)
    out = newton_step(lambda x: x * x - 2, lambda x: 2 * x, ctx.mpf("1.5"))
    assert abs(out.next_iterate - ctx.mpf(17) / 12) < ctx.mpf("1e-48")
    trace = run("newton", (lambda x: x * x - 2, lambda x: 2 * x), x0=ctx.mpf("1.5"),
                iterations=1, precision=ctx)
    assert trace.iterates[0] == ctx.mpf("1.5")
    assert abs(trace.iterates[1] - ctx.mpf(17) / 12) < ctx.mpf("1e-48")


@pytest.mark.parametrize("label", LABELS)
def test_integer_root_linear_exact(label):
    ctx = PrecisionContext(100)
    trace = run(label, linear_problem("7", "-21"), iterations=1, precision=ctx)
    assert trace.iterates[1] == 3
    assert trace.errors[1] == 0


@given(st.sampled_from(LABELS), st.integers(-50, 50).filter(bool), st.integers(-50, 50),
       st.integers(-20, 20))
def test_linear_one_step(label, a, b, x0):
    ctx = PrecisionContext(100)
    p = linear_problem(str(a), str(b), x0=str(x0))
    trace = run(label, p, iterations=1, precision=ctx)
    root = p.root_value(ctx)
    assert not trace.failed
    assert abs(trace.iterates[-1] - root) <= ctx.mpf("1e-97") * max(1, abs(root))


@pytest.mark.parametrize("label", LABELS)
def test_evaluation_budget(label):
    ctx = PrecisionContext(100)
    f, df = get_problem("f4").bind(ctx)
    out = step(label, f, df, ctx.mpf("-0.3"))
    assert out.early_exit is None
    assert out.evaluations == get_method(label).budget
    assert len(out.points) == len(get_method(label).stages) + 1


def test_early_exit_on_exact_zero():
    ctx = PrecisionContext(50)
    out = step("d2", lambda x: x - 1, lambda x: ctx.mpf(1), ctx.mpf("1"))
    assert out.early_exit == 1 and out.evaluations == 1
    trace = run("d2", linear_problem("2", "-2", x0="5"), iterations=3, precision=ctx)
    assert trace.termination == "early_exit" and len(trace.iterates) == 2


def test_zero_derivative():
    ctx = PrecisionContext(50)
    with pytest.raises(ZeroDerivativeError):
        step("newton", lambda x: x * x - 1, lambda x: 2 * x, ctx.mpf(0))
    trace = run("d4", (lambda x: x * x - 1, lambda x: 2 * x), x0=ctx.mpf(0), precision=ctx)
    assert trace.failed and trace.error_kind and trace.error_iteration == 1


def test_degenerate_geometry_is_reported():
    ctx = PrecisionContext(50)
    const = (lambda x: ctx.mpf(1), lambda x: ctx.mpf(1))
    with pytest.raises(DegenerateGeometryError):
        step("KT0", *const, ctx.mpf(0))
    trace = run("KT0", const, x0=ctx.mpf(0), precision=ctx)
    assert trace.failed and "stage" in trace.message


def test_alpha_zero_rejected():
    ctx = PrecisionContext(50)
    f, df = get_problem("f1").bind(ctx)
    with pytest.raises(MethodParameterError):
        step("kh1", f, df, ctx.mpf("0.03"), param=0)


def test_weighted_method_matches_registry():
    ctx = PrecisionContext(200)
    f, df = get_problem("f3").bind(ctx)
    x = ctx.mpf("0.01")
    for name, label in (("W1", "d2"), ("W2", "d4"), ("W3", "d6")):
        custom = weighted_method(proposed_weight_sets()[name])
        assert step(custom, f, df, x).next_iterate == step(label, f, df, x).next_iterate
    with pytest.raises(ValueError):
        weighted_method(proposed_weight_sets()["W1"], points=5)


# published first-step errors at 7000 digits; Neta A = 1, Khattri-Steihaug alpha = 1
FIRST_STEP = [
    ("d2", "f1", "0.03", "0.380e-20"),
    ("d2", "table5", "1.1", "0.844e-25"),
    ("KT", "table6", "0.03", "0.883e-18"),
    ("KT0", "table5", "1.1", "0.316e-11"),
    ("NNN", "table7", "0.35", "0.349e-12"),
    ("NNNN", "table6", "0.03", "0.183e-17"),
    ("d7", "table6", "0.1", "0.274e-10"),
    ("d9", "table7", "0.35", "0.454e-22"),
]


@pytest.mark.parametrize("label, problem, x0, expected", FIRST_STEP)
def test_published_first_steps(label, problem, x0, expected, ctx7000):
    trace = run(label, get_problem(problem), x0=x0, iterations=1, precision=ctx7000)
    assert format_sci(trace.errors[1]) == expected


@pytest.mark.parametrize("label, expected", [
    ("d2", ["0.380e-20", "0.126e-319", "0.276e-5111"]),
    ("d6", ["0.389e-20", "0.931e-321", "0.107e-5130"]),
])
def test_published_traces(label, expected, ctx7000):
    trace = run(label, get_problem("f1"), iterations=3, precision=ctx7000)
    assert [format_sci(e) for e in trace.errors[1:]] == expected


@pytest.mark.parametrize("label", LABELS)
def test_measured_order(label, ctx7000):
    spec = get_method(label)
    # low orders need more steps before the asymptotic regime
    iters = 5 if spec.order <= 4 else 3
    trace = run(label, get_problem("f4"), iterations=iters, precision=ctx7000)
    assert not trace.failed
    assert abs(trace_coc(trace).value - spec.order) < 0.1


def test_d2_f4_coc(ctx7000):
    assert abs(trace_coc(run("d2", get_problem("f4"), precision=ctx7000)).value - 16) < 0.01


_p3 = get_problem("p3")


@given(st.sampled_from(LABELS),
       st.complex_numbers(min_magnitude=0.1, max_magnitude=3, allow_nan=False,
                          allow_infinity=False))
def test_complex_step_is_conjugation_symmetric(label, z):
    f, df = _p3.bind(None)
    try:
        a = step(label, f, df, z).next_iterate
    except (ArithmeticError, ValueError):
        with pytest.raises((ArithmeticError, ValueError)):
            step(label, f, df, z.conjugate())
        return
    b = step(label, f, df, z.conjugate()).next_iterate
    assert b == a.conjugate() or (cmath.isnan(a) and cmath.isnan(b))


@pytest.mark.parametrize("label", ["NNN", "d4", "KT"])
def test_rounding_level_stall_ends_the_step(label):
    # the Newton point is within an ulp of the root; later divided differences
    # of pure rounding noise would be 0/0, so the step stops at the stalled stage
    ctx = PrecisionContext(300)
    cases = {"NNN": ("-3.790214", "-0.420691", "-2.586"),
             "d4": ("-2.645738", "-6.305369", "-3.061"),
             "KT": ("-2.645738", "-6.305369", "-3.061")}
    a, b, x0 = cases[label]
    p = linear_problem(a, b, x0=x0)
    f, df = p.bind(ctx)
    out = step(label, f, df, ctx.mpf(x0))
    assert out.stalled and out.early_exit is None
    assert out.evaluations < get_method(label).budget
    trace = run(label, p, iterations=3, precision=ctx)
    assert trace.termination == "stalled" and len(trace.iterates) == 2
    assert abs(trace.errors[1]) < ctx.mpf("1e-298")


def test_stall_does_not_trigger_on_ordinary_steps():
    trace = run("d6", get_problem("table5"), iterations=3, precision=PrecisionContext(8600))
    assert trace.termination == "completed"
