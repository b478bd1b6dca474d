from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from multipoint import analysis
from multipoint.analysis import (
    FAILED, RowSpec, ShapeMismatchError, UndefinedCocError, build_table, cells_agree, coc,
    compare_to_golden, error_table, golden_ids, load_golden, regenerate, trace_coc,
)
from multipoint.bigreal import PrecisionContext
from multipoint.problems import get_problem
from multipoint.schemes import run

CTX = PrecisionContext(200)


def synthetic(p, c, e0="1e-2"):
    e1 = CTX.mpf(e0)
    e2 = c * e1 ** p
    return [e1, e2, c * e2 ** p]


@pytest.mark.parametrize("p", [2, 4, 8, 16])
@pytest.mark.parametrize("c", ["0.1", "1", "10"])
def test_coc_synthetic(p, c):
    # e_{n+1} = C e_n^p; the start is small enough that C does not dominate
    assert abs(coc(synthetic(p, CTX.mpf(c))) - p) < 1e-6


@given(st.integers(-30, 30), st.sampled_from([2, 4, 8, 16]))
def test_coc_scale_invariance(k, p):
    errs = synthetic(p, CTX.mpf(3))
    scale = CTX.mpf(2) ** k
    assert coc([e * scale for e in errs]) == coc(errs)


@given(st.fractions(min_value=Fraction(1, 10**6), max_value=1),
       st.fractions(min_value=Fraction(1, 10**6), max_value=1),
       st.fractions(min_value=Fraction(1, 10**6), max_value=1))
def test_coc_matches_float_formula(a, b, c):
    import math

    if len({a, b, c}) < 3 or a == b or b == c:
        return
    ref = math.log(c / b) / math.log(b / a)
    assert coc([a, b, c]) == pytest.approx(ref, rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("errs", [[1, 1, 0.5], [1, 0, 0], [-1, 0.1, 0.01], [1, 2]])
def test_coc_undefined(errs):
    with pytest.raises(UndefinedCocError):
        coc(errs)


def test_trace_coc_window(ctx7000):
    est = trace_coc(run("d2", get_problem("f4"), precision=ctx7000))
    assert est.window == (1, 2, 3)
    assert est.render() == "16.0000"
    with pytest.raises(UndefinedCocError):
        trace_coc(run("d2", get_problem("f4"), iterations=1, precision=CTX))


def test_table_rendering():
    table = error_table(["newton", "d2"], "f4", iterations=2, precision=300)
    md = table.to_markdown().splitlines()
    assert md[0] == "| method | problem | x0 | |x1-x*| | |x2-x*| | coc |"
    assert md[2].startswith("| newton | f4 | -0.3 | 0.")
    assert table.to_csv().splitlines()[0] == "method,problem,x0,|x1-x*|,|x2-x*|,coc"
    assert [r.coc_text for r in table.rows] == [f"{table.rows[0].coc.value:.4f}",
                                                f"{table.rows[1].coc.value:.4f}"]


def test_failed_and_early_exit_cells():
    table = build_table([RowSpec("newton", "f5", "0"), RowSpec("d2", "f1", "0")], 3, CTX)
    failed, exact = table.rows
    assert failed.termination == "error" and failed.cells == [FAILED] * 3
    assert failed.coc_text == FAILED
    assert exact.termination == "early_exit" and exact.cells == ["0", "0", "0"]


def test_parallel_rows_keep_order():
    specs = [RowSpec(m, p) for p in ("f3", "f6") for m in ("d2", "KT0", "newton")]
    one = build_table(specs, 2, 400)
    two = build_table(specs, 2, 400, workers=2)
    assert one.to_csv() == two.to_csv()


def test_load_golden_metadata():
    assert golden_ids() == [f"table{n}" for n in range(2, 8)]
    g = load_golden("table5")
    assert g.digits == 8600 and g.iterations == 3 and len(g.rows) == 11
    assert g.title.startswith("table5:")
    assert {r.check for r in load_golden("table2").rows} == {"full", "coc_min"}
    assert any("x0" in n for n in load_golden("table6").notes)


def test_cells_agree():
    assert cells_agree("0.659e-435", "0.650e-435")
    assert not cells_agree("0.659e-435", "0.695e-435")
    assert not cells_agree("0.380e-20", "0.380e-21")
    assert not cells_agree("0.380e-20", FAILED)
    assert cells_agree("0", "0")


def _golden_file(tmp_path, body_edit=None):
    text = (analysis.resources.files("multipoint.golden") / "table3.csv").read_text()
    if body_edit:
        text = text.replace(*body_edit)
    path = tmp_path / "t.csv"
    path.write_text(text)
    return load_golden(path)


def test_corrupted_golden_is_caught(tmp_path, ctx7000):
    golden = _golden_file(tmp_path, ("0.405e-28", "0.415e-28"))
    diff = compare_to_golden(regenerate(golden), golden)
    assert not diff.ok
    assert [(m.problem, m.column) for m in diff.mismatches] == [("f3", "e1")]
    assert "expected 0.415e-28" in "\n".join(diff.lines())


def test_shape_mismatch(tmp_path):
    golden = load_golden("table3")
    table = build_table(golden.row_specs()[:2], 3, 300)
    with pytest.raises(ShapeMismatchError):
        compare_to_golden(table, golden)


def test_table3_f3_row(ctx7000):
    table = build_table([RowSpec("d4", "f3")], 3, ctx7000)
    assert table.rows[0].cells == ["0.405e-28", "0.515e-450", "0.239e-7200"]
    assert table.rows[0].coc_text == "16.0000"


@pytest.mark.slow
@pytest.mark.parametrize("table_id", ["table2", "table3", "table4", "table6", "table7"])
def test_golden_tables_reproduce(table_id):
    golden = load_golden(table_id)
    diff = compare_to_golden(regenerate(golden), golden)
    assert diff.ok, "\n".join(diff.lines())


@pytest.mark.slow
def test_table5_reproduces_up_to_the_transposed_cell():
    golden = load_golden("table5")
    diff = compare_to_golden(regenerate(golden), golden)
    # the printed d2 e2 cell reads 0.659e-435; the computed value is 0.695e-435
    assert [(m.method, m.column, m.expected, m.computed) for m in diff.mismatches] == [
        ("d2", "e2", "0.659e-435", "0.695e-435")]
