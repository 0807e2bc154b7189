import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import CTX, eval_tree, evaluate_expr, random_env, to_expr, trees
from noethera import (
    Context,
    ContextMismatchError,
    Expr,
    UnsupportedPowerError,
    pdiff,
    pow_expr,
    substitute,
)
from noethera.coefficients import AffineExponent

E = CTX.parse
ATOMS = ("x", "y", "t", "u", "u_x", "u_y", "u_t", "p")


def test_additive_inverse():
    x = CTX.var("x")
    assert (x + -x).is_zero()
    assert x - x == CTX.zero() == 0


def test_symbolic_exponent_addition():
    u = CTX.var("u")
    assert E("u^p") * u == pow_expr(u, AffineExponent.make(1, {"p": 1}))
    assert str(E("u^p") * u) == "u^(p+1)"


def test_like_terms_merge():
    y, ux, ut = CTX.var("y"), CTX.var("u_x"), CTX.var("u_t")
    got = (2 * y * ux) * ut + (2 * y * ut) * ux
    assert got == 4 * y * ux * ut
    assert len(got) == 1


def test_like_terms_merge_numeric_oracle():
    rng = random.Random(7)
    got = E("2*y*u_x*u_t + 2*y*u_t*u_x")
    for pv in (2, 3, 5):
        for _ in range(5):
            env = random_env(rng, ("x", "y", "t", "u", "u_x", "u_y", "u_t"))
            env["p"] = pv
            assert evaluate_expr(got, env) == 4 * env["y"] * env["u_x"] * env["u_t"]


def test_binomial_expansion():
    assert E("(x^2+y^2)^2") == E("x^4 + 2*x^2*y^2 + y^4")


def test_symbolic_power_of_sum_rejected():
    with pytest.raises(UnsupportedPowerError):
        pow_expr(E("u_x + u_y"), AffineExponent.make(0, {"p": 1}))
    with pytest.raises(UnsupportedPowerError):
        pow_expr(E("u_x + u_y"), -1)


def test_negative_integer_power_of_variable():
    x = CTX.var("x")
    assert pow_expr(x, -2) * x**2 == 1


def test_context_mismatch():
    other = Context(("x", "y", "t"), "u")
    with pytest.raises(ContextMismatchError):
        CTX.var("x") + other.var("x")


def test_context_validation():
    with pytest.raises(ValueError):
        Context(("x", "x"), "u")
    with pytest.raises(ValueError):
        Context(("x",), "x")
    with pytest.raises(ValueError):
        Context(("x", "d"), "u")


def test_pdiff_examples():
    assert pdiff(E("u^(p+1)"), CTX.resolve("u")) == E("(p+1)*u^p")
    assert pdiff(E("2*y*u_x*u_t"), CTX.resolve("u_x")) == E("2*y*u_t")
    assert pdiff(E("4*(x^2+y^2)*u_t^2"), CTX.resolve("u_t")) == E("8*(x^2+y^2)*u_t")


def test_pdiff_difference_quotient_oracle():
    # f is quadratic in u_t, so the central difference quotient is exact
    f = E("4*(x^2+y^2)*u_t^2")
    df = pdiff(f, CTX.resolve("u_t"))
    rng = random.Random(3)
    for _ in range(10):
        env = random_env(rng, ("x", "y", "u_t"))
        h = Fraction(1, 7)
        hi, lo = dict(env), dict(env)
        hi["u_t"] += h
        lo["u_t"] -= h
        q = (evaluate_expr(f, hi) - evaluate_expr(f, lo)) / (2 * h)
        assert q == evaluate_expr(df, env)


def test_substitute_examples():
    lam_ctx = Context(("x", "y", "t"), "u", ("p", "lam"))
    u, lam = lam_ctx.var("u"), lam_ctx.var("lam")
    assert str(substitute(lam_ctx.parse("u^p"), "u", lam * u)) == "lam^p*u^p"
    assert substitute(E("u_xx + u^3"), "u_xx", E("-u^3")) == 0
    assert substitute(E("x^2 + u_x^2"), "u_x", E("u_y")) == E("x^2 + u_y^2")


def test_substitute_unrepresentable():
    with pytest.raises(UnsupportedPowerError):
        substitute(E("u^p"), "u", E("u + x"))


def test_evaluate_with_parameter_power():
    assert E("u^(p+1)").evaluate({"u": 2}, {"p": 2}) == 8


# -- properties ---------------------------------------------------------------

expr_trees = trees(ATOMS, max_leaves=7, pow_max=3)


@settings(max_examples=80, deadline=None)
@given(expr_trees, expr_trees, st.booleans(), st.randoms(use_true_random=False))
def test_canonical_equality_iff_numeric_agreement(t1, t2, rewrite, rng):
    """Structural equality of canonical forms <=> agreement at 20 random exact points."""
    if rewrite:
        # an equivalent tree built differently: t1 + t2 - t2, expanded by distributivity
        t2 = ("sub", ("add", t1, ("mul", ("const", Fraction(2)), t2)), ("add", t2, t2))
    a, b = to_expr(t1), to_expr(t2)
    pvals = [rng.randint(-5, 5) for _ in range(3)]
    agree = True
    for k in range(20):
        env = random_env(rng, ("x", "y", "t", "u", "u_x", "u_y", "u_t"))
        env["p"] = pvals[k % 3]
        if eval_tree(t1, env) != eval_tree(t2, env):
            agree = False
            break
    assert (a == b) == agree
    # the canonical form reproduces the tree's value
    env = random_env(rng, ("x", "y", "t", "u", "u_x", "u_y", "u_t"))
    env["p"] = pvals[0]
    assert evaluate_expr(a, env) == eval_tree(t1, env)


@settings(max_examples=50, deadline=None)
@given(expr_trees, expr_trees, expr_trees)
def test_ring_laws(t1, t2, t3):
    a, b, c = to_expr(t1), to_expr(t2), to_expr(t3)
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a + b == b + a
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert (a + b) - b == a
    assert (a - a).is_zero()


@settings(max_examples=50, deadline=None)
@given(expr_trees, st.sampled_from(ATOMS[:-1]), st.sampled_from(ATOMS[:-1]))
def test_pdiff_commutes(t, v, w):
    a = to_expr(t)
    vv, ww = CTX.resolve(v), CTX.resolve(w)
    assert pdiff(pdiff(a, vv), ww) == pdiff(pdiff(a, ww), vv)


@settings(max_examples=40, deadline=None)
@given(expr_trees, expr_trees, st.sampled_from(ATOMS[:-1]))
def test_pdiff_leibniz(t1, t2, v):
    a, b = to_expr(t1), to_expr(t2)
    var = CTX.resolve(v)
    assert pdiff(a * b, var) == pdiff(a, var) * b + a * pdiff(b, var)


def test_expr_is_hashable_value():
    assert len({E("x*y"), E("y*x"), E("x*y + 0")}) == 1
    assert isinstance(E("1"), Expr) and E("1") == 1
