from fractions import Fraction

import pytest

from hilali import catalog
from hilali.catalog import (
    CatalogError,
    GenerationError,
    cohomology_bound_and_fibration,
    degree_scale,
    fibration_catalog,
    lookup,
    make_cpn,
    make_hpn,
    make_product,
    make_sphere,
    make_star_type,
    model_catalog,
    random_pure,
    random_two_stage,
    retry_budget,
)
from hilali.cohomology import betti_table
from hilali.dsl import format_model
from hilali.elliptic import class_predicates, ellipticity_check, invariants


def test_catalog_size_and_keys_unique():
    entries = model_catalog()
    assert len(entries) >= 15
    assert len({e.key for e in entries}) == len(entries)


@pytest.mark.parametrize("entry", model_catalog(), ids=lambda e: e.key)
def test_catalog_matches_closed_forms(entry):
    assert invariants(entry.model) == entry.known


def test_sphere_and_projective_values():
    assert invariants(make_sphere(7)).hilali == Fraction(1, 2)
    inv = invariants(make_cpn(3))
    assert (inv.dim_H_total, inv.hilali) == (4, Fraction(1, 2))
    inv = invariants(make_product([make_sphere(3), make_sphere(5)]))
    assert (inv.dim_pi, inv.dim_H_total, inv.hilali) == (2, 4, Fraction(1, 2))
    assert invariants(make_hpn(2)).dim_H_total == 3


def test_star_type_values():
    inv = invariants(make_star_type(2, 2, 7))
    assert [g.degree for g in make_star_type(2, 2, 7).gens] == [2, 3, 7]
    assert (inv.dim_H_total, inv.hilali) == (4, Fraction(3, 4))
    assert invariants(make_star_type(2, 3, 5)).dim_H_total == 6
    assert invariants(make_star_type(2, 3, 5)).hilali == Fraction(1, 2)
    with pytest.raises(CatalogError):
        make_star_type(2, 1, 5)


def test_bad_sphere_degree():
    with pytest.raises(Exception):
        make_sphere(1)


def test_lookup_forms():
    assert lookup("catalog:cpn:3").model.same_as(make_cpn(3))
    assert lookup("sphere:3*sphere:5").known.dim_H_total == 4
    assert lookup("hopf:s3-s7-s4").fibration.total.name == "hopf:s3-s7-s4"
    for bad in ("nothing", "cpn:x", "star:1,2"):
        with pytest.raises(CatalogError):
            lookup(bad)


def test_catalog_fibrations_valid():
    cat = fibration_catalog()
    assert {"hopf:s3-s7-s4", "hopf:s7-s15-s8", "bundle:s3-cp2", "twistor:s2-cp3-s4"} <= set(cat)
    for cf in cat.values():
        assert ellipticity_check(cf.fibration.total)


# -- degree scaling ---------------------------------------------------------


def test_scaling_by_zero_is_identity():
    m = make_cpn(2)
    assert degree_scale(m, 0) is m


def test_scaling_degrees():
    m = degree_scale(make_product([make_sphere(3), make_sphere(5)]), 2)
    assert [g.degree for g in m.gens] == [27, 45]
    cp2 = degree_scale(make_cpn(2), 1)
    assert [g.degree for g in cp2.gens] == [6, 17]


@pytest.mark.parametrize("i", [1, 2, 3])
def test_scaling_preserves_h(i):
    for m in (make_cpn(2), make_star_type(2, 3, 5), random_two_stage(3, 1, 1, 1)):
        a, b = invariants(m), invariants(degree_scale(m, i))
        assert (a.hilali, a.dim_pi_even, a.dim_pi_odd) == (b.hilali, b.dim_pi_even, b.dim_pi_odd)


def test_scaling_rejects_non_two_stage():
    m = lookup("hopf:s3-s7-s4").fibration.total  # not minimal
    with pytest.raises(CatalogError):
        degree_scale(m, 1)
    with pytest.raises(CatalogError):
        degree_scale(make_cpn(2), -1)


# -- cohomology bound for pure models ---------------------------------------


def test_bound_values():
    cases = {"cpn:3": (3, 4, 4), "sphere:4": (1, 2, 2), "sphere:3*sphere:5": (4, 4, 4), "w6": (9, 16, 6)}
    for key, (lit, cor, h) in cases.items():
        res = cohomology_bound_and_fibration(lookup(key).model)
        assert (res.literal_bound, res.corrected_bound, res.dim_H) == (lit, cor, h), key
        assert res.holds


def test_literal_bound_fails_on_projective_spaces():
    for n in range(1, 6):
        res = cohomology_bound_and_fibration(make_cpn(n))
        assert (res.literal_bound, res.dim_H) == (n, n + 1)
        assert not res.literal_holds


def test_auxiliary_fibration_cohomology():
    res = cohomology_bound_and_fibration(make_cpn(2))
    total = res.fibration.total
    # H(total) = H(CP2) (x) Lambda(v): dimension doubles
    assert invariants(total).dim_H_total == 2 * res.dim_H


def test_bound_rejects_non_pure():
    from hilali.dsl import parse_model

    m = parse_model("model np\ngen x 2\ngen u 3\ngen w 3\ngen v 7\nd v = x^4 + x*u*w\n")
    with pytest.raises(CatalogError):
        cohomology_bound_and_fibration(m)


# -- random generation ------------------------------------------------------


def test_odd_sphere_from_minimal_params():
    m = random_two_stage(1, 0, 1, 0)
    assert len(m.gens) == 1 and m.gens[0].odd


def test_one_even_generator_gives_projective_type():
    for seed in range(5):
        inv = invariants(random_two_stage(seed, 1, 0, 0))
        assert inv.dim_pi == 2 and inv.hilali == Fraction(2, inv.dim_H_total)
        # r counts second-stage generators beyond n, so r = 1 adds one more
        inv = invariants(random_two_stage(seed, 1, 0, 1))
        assert (inv.dim_pi_even, inv.dim_pi_odd) == (1, 2)


def test_reproducible():
    a = random_two_stage(42, 2, 1, 2)
    b = random_two_stage(42, 2, 1, 2)
    assert format_model(a) == format_model(b)
    assert format_model(a) != format_model(random_two_stage(43, 2, 1, 2))


@pytest.mark.parametrize("params", [(2, 3, 1), (3, 2, 3), (0, 4, 2), (4, 1, 0), (1, 5, 4)])
def test_generated_shape(params):
    n, m, r = params
    model = random_two_stage(11, n, m, r)
    cp = class_predicates(model)
    assert cp.is_two_stage and model.is_minimal()
    assert (len(model.even_gens), len(cp.w0), len(cp.w1)) == (n, m, n + r)
    inv = invariants(model)
    table = betti_table(model, inv.formal_dimension)
    assert table[inv.formal_dimension] == 1


def test_pure_generation():
    m = random_pure(5, 2, 2, 1)
    assert class_predicates(m).is_pure


def test_impossible_parameters():
    with pytest.raises(GenerationError):
        random_two_stage(0, 0, 1, 1)
    with pytest.raises(GenerationError):
        random_two_stage(0, -1, 1, 1)


def test_retry_budget_exhaustion(monkeypatch):
    monkeypatch.setattr(catalog, "_draw", lambda *a, **k: None)
    with pytest.raises(GenerationError, match="retry budget"):
        random_two_stage(0, 1, 1, 1, retries=3)


def test_retry_budget_from_environment(monkeypatch):
    monkeypatch.setenv("HILALI_RETRY_BUDGET", "5")
    assert retry_budget() == 5
    monkeypatch.setenv("HILALI_RETRY_BUDGET", "zero")
    with pytest.raises(GenerationError):
        retry_budget()
    monkeypatch.delenv("HILALI_RETRY_BUDGET")
    assert retry_budget() == 32
