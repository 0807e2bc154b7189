from fractions import Fraction

import pytest

from noethera import CONDITIONAL, VARIATIONAL, check_pde_symmetry, euler_operator
from noethera.heisenberg import (
    build,
    catalog_suite,
    critical_exponent,
    homogeneous_dimension,
    theorem1_suite,
    theorem2_suite,
    variables,
)


@pytest.mark.parametrize("n,expect", [(1, 3), (2, 2), (3, Fraction(5, 3)), (4, Fraction(3, 2))])
def test_critical_exponent(n, expect):
    assert critical_exponent(n) == expect
    q = homogeneous_dimension(n)
    assert q == 2 * n + 2
    assert Fraction(q + 2, q - 2) == expect


def test_variables():
    assert variables(1) == ("x", "y", "t")
    assert variables(2) == ("x_1", "x_2", "y_1", "y_2", "t")


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_equation_is_minus_euler_lagrange(n):
    prob = build(n, "p")
    assert prob.equation == -euler_operator(prob.lagrangian)


def test_n1_catalogs():
    assert {w.name for w in build(1, "p").catalog} == {"T", "R", "Xt", "Yt", "Z"}
    assert {w.name for w in build(1, 3).catalog} == {"T", "R", "Xt", "Yt", "Z", "V1", "V2", "V3"}
    assert {w.name for w in build(1, 5).catalog} == {"T", "R", "Xt", "Yt", "Z"}


def test_critical_equation_text():
    prob = build(1, 3)
    assert prob.equation == prob.ctx.parse("u_xx + u_yy + 4*(x^2+y^2)*u_tt + 4*y*u_xt - 4*x*u_yt + u^3")


def test_n2_equation_shape():
    prob = build(2, "p")
    e = prob.ctx.parse(
        "d(u,x_1,x_1) + d(u,x_2,x_2) + d(u,y_1,y_1) + d(u,y_2,y_2)"
        " + 4*(x_1^2+x_2^2+y_1^2+y_2^2)*d(u,t,t)"
        " + 4*y_1*d(u,x_1,t) - 4*x_1*d(u,y_1,t) + 4*y_2*d(u,x_2,t) - 4*x_2*d(u,y_2,t) + u^p"
    )
    assert prob.equation == e
    assert {w.name for w in prob.catalog} == {"T", "Xt_1", "Xt_2", "Yt_1", "Yt_2", "Z"}


@pytest.mark.parametrize("n", [2, 3])
def test_higher_n_catalog_admitted(n):
    prob = build(n, "p")
    for w in prob.catalog:
        assert check_pde_symmetry(prob.equation, w)


def test_excluded_exponents():
    for bad in (1, -1):
        with pytest.raises(ValueError):
            build(1, bad)
    with pytest.raises(ValueError):
        build(0, "p")


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_theorem1_suite(n):
    rep = theorem1_suite(n)
    assert rep.passed, [c for c in rep.checks if not c.passed]
    z = rep.verdict("Z")
    assert z.status == CONDITIONAL and z.conditions.roots == (critical_exponent(n),)
    for v in rep.verdicts:
        if v.generator != "Z":
            assert v.status == VARIATIONAL


def test_theorem1_n1_rotation():
    assert theorem1_suite(1).verdict("R").residual == 0


def test_theorem2_suite():
    rep = theorem2_suite()
    assert rep.passed, [c for c in rep.checks if not c.passed]
    assert len(rep.verdicts) == 8


def test_catalog_suite_fixed_exponent():
    rep = catalog_suite(1, 5)
    assert not rep.passed
    assert rep.verdict("Z").status == "neither"
    rep3 = catalog_suite(2, 2)
    assert rep3.passed


def test_problem_spec_round_trip():
    from noethera import dump_problem, load_problem

    spec = build(1, 3).problem_spec()
    again = load_problem(dump_problem(spec))
    assert again.generators == spec.generators
    assert again.lagrangian == spec.lagrangian
