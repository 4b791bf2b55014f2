import math
from fractions import Fraction

import pytest

from radpoincare import coefficients as co
from radpoincare.harness import (
    SPEC_IDS,
    HarnessConfig,
    InequalitySpec,
    check_inequality,
    load_config,
    run_suite,
    suite_specs,
    zero_function,
)
from radpoincare.quadrature import QuadratureConfig
from radpoincare.radial import piecewise, smooth_bump


def test_main_poincare_example():
    rep = check_inequality(InequalitySpec("main_poincare", 4, k=1, l=0), [smooth_bump(1.0, 3.0)])
    assert rep.verdict == "pass" and rep.rows[0].deficit > 0


def test_th1_reduces_to_first_order_bound_in_three_dimensions(library):
    spec = InequalitySpec("th1", 3, alpha=0)
    big, small = spec.sides()
    assert [t.coef for t in small] == [Fraction(1, 4), 1, 0]
    rep = check_inequality(spec, library)
    assert rep.verdict == "pass" and all(r.deficit >= 0 for r in rep.rows)


def test_zero_function_passes():
    rep = check_inequality(InequalitySpec("th4", 9, alpha=0), [zero_function()])
    assert rep.verdict == "pass"
    assert all(r.lhs == r.rhs == r.deficit == r.rel_deficit == 0.0 for r in rep.rows)


def test_spec_errors():
    assert check_inequality(InequalitySpec("th4", 9, alpha=0), []).verdict == "spec_error"
    rep = check_inequality(InequalitySpec("th4", 9, alpha=5), [smooth_bump(1, 2)])
    assert rep.verdict == "spec_error" and "alpha" in rep.message
    assert check_inequality(InequalitySpec("lemma3", 2), [smooth_bump(1, 2)]).verdict == "spec_error"
    with pytest.raises(co.HypothesisError):
        InequalitySpec("th1", 9)
    with pytest.raises(co.HypothesisError):
        InequalitySpec("unknown", 9)


def test_rough_functions_are_skipped():
    rep = check_inequality(InequalitySpec("main_poincare", 9, k=2, l=0), [piecewise(0.5, 1.0), smooth_bump(1, 2)])
    assert rep.skipped == ("piecewise(0.5,1)",)
    assert len(rep.rows) == 1
    only_rough = check_inequality(InequalitySpec("main_poincare", 9, k=2, l=0), [piecewise(0.5, 1.0)])
    assert only_rough.verdict == "spec_error"


def test_suite_with_violated_hypothesis_keeps_others():
    specs = [
        InequalitySpec("th4", 9, alpha=0),
        InequalitySpec("th4", 9, alpha=5),
        InequalitySpec("lemma3", 9),
    ]
    rep = run_suite(specs)
    assert [r.verdict for r in rep.reports] == ["pass", "spec_error", "pass"]
    assert rep.verdict == "spec_error"
    with pytest.raises(co.HypothesisError):
        run_suite([])


def test_suite_grid_partition():
    ok, bad = suite_specs("all", 9)
    labels = {s.label for s in ok}
    assert "C_family(k=4,l=3)" in labels and "lemma6(alpha=0,beta=2)" in labels
    assert {s.label for s in bad} >= {"th2(alpha=0)", "D_family(k=3,l=0)"}
    assert {s.id for s in ok} == set(SPEC_IDS)
    with pytest.raises(co.HypothesisError):
        suite_specs("nope", 9)


def test_section3_suite_passes_at_n9():
    rep = run_suite("all_section3", 9)
    assert rep.verdict == "pass"
    assert rep.min_rel_deficit >= 0


def test_detects_a_violated_inequality(monkeypatch, library):
    # inflate the sharp constant: the check must turn red
    monkeypatch.setattr(co, "sharp_constant", lambda n, k, l: Fraction(n - 1, 2) ** (2 * (k - l)) * 2)
    rep = check_inequality(InequalitySpec("main_poincare", 9, k=1, l=0), library)
    assert rep.verdict == "fail"
    assert rep.min_rel_deficit < -1e-9


def test_determinism(library):
    spec = InequalitySpec("lemma5", 9, alpha=1)
    a = check_inequality(spec, library).to_dict()
    b = check_inequality(spec, library).to_dict()
    assert a == b


def test_report_meta_and_provenance(library):
    rep = check_inequality(InequalitySpec("C_family", 9, k=3, l=1), library[:2])
    d = rep.to_dict()
    assert d["meta"]["table_version"] == co.TABLE_VERSION
    assert d["meta"]["spec"] == "C_family(k=3,l=1)"
    assert d["meta"]["tolerance"] == 1e-9
    assert set(d["rows"][0]) == {"func", "lhs", "rhs", "deficit", "rel_deficit"}


def test_config_file(tmp_path):
    path = tmp_path / "cfg.txt"
    path.write_text("# overrides\nrel_tol = 1e-8\nlibrary_seed=7\n\ntolerance = 1e-6\n")
    cfg = load_config(path)
    assert cfg.quadrature.rel_tol == 1e-8 and cfg.library_seed == 7 and cfg.tolerance == 1e-6
    assert cfg.fingerprint() != HarnessConfig().fingerprint()
    assert HarnessConfig().fingerprint() == HarnessConfig(QuadratureConfig()).fingerprint()
    (tmp_path / "bad.txt").write_text("nonsense\n")
    with pytest.raises(ValueError):
        load_config(tmp_path / "bad.txt")
    (tmp_path / "bad2.txt").write_text("colour = red\n")
    with pytest.raises(ValueError):
        load_config(tmp_path / "bad2.txt")


def test_relative_deficit_scale():
    rep = check_inequality(InequalitySpec("mu_bound", 5), [smooth_bump(1, 2)])
    r = rep.rows[0]
    assert math.isclose(r.rel_deficit, r.deficit / max(abs(r.lhs), abs(r.rhs)))
