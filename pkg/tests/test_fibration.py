from fractions import Fraction

import pytest

from hilali.catalog import fibration_catalog, make_cpn, make_product, make_sphere
from hilali.fibration import (
    Check,
    Decomposition,
    FibrationError,
    analyze_fibration,
    build_fibration,
    transgression_analysis,
    validate_decomposition,
)

CAT = fibration_catalog()


def report(key):
    cf = CAT[key]
    return analyze_fibration(cf.fibration, cf.fiber_dec, cf.base_dec)


def s(n, prefix):
    return make_sphere(n).renamed(prefix=prefix)


def test_product_fibration_is_tensor_product():
    f = build_fibration(s(4, "b_"), s(3, "f_"))
    assert len(f.total.gens) == 3
    assert f.projected_fiber().same_as(f.fiber)


def test_hopf_model_builds():
    f = build_fibration(s(4, "b_"), s(3, "f_"), {"f_y": "b_x"})
    assert str(f.total.d[2]) == "b_x"


def test_perturbation_outside_base_ideal_rejected():
    fiber = make_product_fiber()
    with pytest.raises(FibrationError):
        build_fibration(s(6, "b_"), fiber, {"f_z": "f_x^2"})


def make_product_fiber():
    return make_product([make_sphere(2), make_sphere(5)]).renamed(prefix="f_")


def test_bad_perturbation_rejected_with_residue():
    # d f_y = b_x on S3 -> S5-sphere base: degrees clash
    with pytest.raises(FibrationError):
        build_fibration(s(5, "b_"), s(3, "f_"), {"f_y": "b_y"})
    # d f_x = b_x*b_y is not a cocycle over S2, so d^2 f_x = b_x^3
    with pytest.raises(FibrationError) as err:
        build_fibration(s(2, "b_"), s(4, "f_"), {"f_x": "b_x*b_y"})
    assert err.value.residue is not None


def test_name_clash_rejected():
    with pytest.raises(FibrationError):
        build_fibration(make_sphere(4), make_sphere(3))


def test_unknown_fiber_generator_rejected():
    with pytest.raises(FibrationError):
        build_fibration(s(4, "b_"), s(3, "f_"), {"f_q": "b_x"})


def test_s3_over_cp2_total_space():
    r = report("bundle:s3-cp2")
    assert (r.X.dim_pi_odd, r.X.dim_H_total, r.X.formal_dimension) == (2, 4, 7)
    assert r.flags.pi_trivial
    assert r.passed


def test_hopf_transgression():
    tr = transgression_analysis(CAT["hopf:s3-s7-s4"].fibration)
    assert tr.contracted_pairs == (("f_y", "b_x"),)
    assert tr.dim_pi == 1 and tr.consistent and tr.shape_ok


def test_octonionic_hopf_has_one_homotopy_generator():
    tr = transgression_analysis(CAT["hopf:s7-s15-s8"].fibration)
    assert tr.dim_pi == 1 and tr.c == 1


def test_twistor_transgression():
    r = report("twistor:s2-cp3-s4")
    assert (r.F.dim_pi, r.B.dim_pi, r.X.dim_pi) == (2, 2, 2)
    assert len(r.transgression.contracted_pairs) == 1
    assert r.F.dim_H_total == 2 and r.X.dim_H_total == 4


def test_hopf_homotopy_counts_are_sharp():
    r = report("hopf:s3-s7-s4")
    c = r.check("homotopy_counts.summed")
    assert (c.lhs, c.rhs, c.slack) == (3, 3, 0)


def test_hopf_pi_doubling_fails_but_is_not_asserted():
    c = report("hopf:s3-s7-s4").check("pi_doubling")
    assert (c.lhs, c.rhs) == (2, 3)
    assert not c.holds and not c.asserted and not c.failed


def test_hopf_product_comparisons():
    r = report("hopf:s3-s7-s4")
    assert (r.X.hilali, r.F.hilali, r.B.hilali, r.h_product) == (Fraction(1, 2), Fraction(1, 2), 1, Fraction(3, 4))
    lo, hi, three = r.check("product_half_lower"), r.check("sum_quarter_upper"), r.check("product_3h")
    assert (lo.lhs, lo.rhs) == (Fraction(3, 8), Fraction(1, 2))
    assert (hi.lhs, hi.rhs) == (Fraction(1, 2), Fraction(7, 4))
    assert (three.lhs, three.rhs) == (Fraction(3, 4), Fraction(3, 2))
    assert lo.holds and hi.holds and three.holds


def test_twistor_two_h_bound_is_an_equality():
    c = report("twistor:s2-cp3-s4").check("product_2h")
    assert c.asserted and c.lhs == 1 and c.rhs == 1 and c.slack == 0


def test_flags():
    for key in ("product:s3-s4", "product:cp2-s5", "product:s2-s3", "product:w6-s7"):
        r = report(key)
        assert r.flags.tnhz and r.flags.pi_trivial
        assert r.check("tnhz.h_X<=h_F+h_B").asserted and r.check("tnhz.h_X<=h_F+h_B").holds
        assert r.check("pi_trivial.h_FxB<=h_X").asserted and r.check("pi_trivial.h_FxB<=h_X").holds
    hopf = report("hopf:s3-s7-s4")
    assert not hopf.flags.tnhz and not hopf.flags.pi_trivial
    tw = report("twistor:s2-cp3-s4")
    assert tw.flags.tnhz and not tw.flags.pi_trivial
    c = tw.check("tnhz.h_X<=h_F+h_B")
    assert c.asserted and (c.lhs, c.rhs) == (Fraction(1, 2), 2)


def test_odd_sphere_split_on_hopf():
    c = report("hopf:s3-s7-s4").check("odd_sphere_split")
    assert (c.lhs, c.rhs, c.slack) == (2, 2, 0) and c.asserted


def test_base_doubling_diagnostic_never_fails_a_run():
    r = report("hopf:s3-s7-s4")
    c = r.check("base_doubling_diagnostic")
    assert (c.lhs, c.rhs) == (2, 4)
    assert c.diagnostic and not c.holds and not c.failed
    assert r.passed


def test_invalid_decomposition_rejected():
    m = make_cpn(2)
    with pytest.raises(FibrationError):
        validate_decomposition(m, Decomposition(("x",), ("y",)))
    with pytest.raises(FibrationError):
        validate_decomposition(m, Decomposition((), ("x",)))


def test_every_catalog_fibration_passes():
    for key in CAT:
        r = report(key)
        assert r.passed, (key, [c.name for c in r.failures])
        assert r.transgression.consistent and r.transgression.shape_ok


def test_check_slack_semantics():
    assert Check("a", Fraction(1), "<", Fraction(1)).holds is False
    assert Check("a", Fraction(1), "<=", Fraction(1)).holds
    assert Check("a", Fraction(2), "==", Fraction(3)).slack == -1
    assert Check("a", Fraction(1), ">=", Fraction(2), asserted=False).failed is False
