"""Shared strategies and independent oracles for the test suite.

Expression trees are generated as plain tuples so they can be evaluated
exactly without going through the canonical form (the oracle for canonical
equality), rendered as text without the printer (the oracle for the parser),
and converted to sympy (the oracle for the jet calculus).
"""

from __future__ import annotations

import random
from fractions import Fraction

import sympy
from hypothesis import strategies as st

from noethera import Context, Expr

CTX = Context(("x", "y", "t"), "u", ("p",))
SPACE = ("x", "y", "t")
JETS1 = ("u", "u_x", "u_y", "u_t")
JETS2 = ("u_xx", "u_xy", "u_xt", "u_yy", "u_yt", "u_tt")

small_q = st.fractions(min_value=-3, max_value=3, max_denominator=3)


def trees(atoms=SPACE + JETS1 + ("p",), max_leaves=8, pow_max=3):
    leaf = st.one_of(
        st.builds(lambda q: ("const", q), small_q),
        st.sampled_from(atoms).map(lambda n: ("var", n)),
    )

    def extend(children):
        return st.one_of(
            st.tuples(st.just("add"), children, children),
            st.tuples(st.just("sub"), children, children),
            st.tuples(st.just("mul"), children, children),
            st.tuples(st.just("neg"), children),
            st.tuples(st.just("pow"), children, st.integers(0, pow_max)),
        )

    return st.recursive(leaf, extend, max_leaves=max_leaves)


def to_expr(tree, ctx: Context = CTX) -> Expr:
    op = tree[0]
    if op == "const":
        return ctx.const(tree[1])
    if op == "var":
        return ctx.var(tree[1])
    if op == "neg":
        return -to_expr(tree[1], ctx)
    if op == "pow":
        return to_expr(tree[1], ctx) ** tree[2]
    a, b = to_expr(tree[1], ctx), to_expr(tree[2], ctx)
    return {"add": a + b, "sub": a - b, "mul": a * b}[op]


def eval_tree(tree, env) -> Fraction:
    op = tree[0]
    if op == "const":
        return Fraction(tree[1])
    if op == "var":
        return Fraction(env[tree[1]])
    if op == "neg":
        return -eval_tree(tree[1], env)
    if op == "pow":
        return eval_tree(tree[1], env) ** tree[2]
    a, b = eval_tree(tree[1], env), eval_tree(tree[2], env)
    return {"add": a + b, "sub": a - b, "mul": a * b}[op]


def tree_text(tree) -> str:
    """Fully parenthesized text, written without the package's printer."""
    op = tree[0]
    if op == "const":
        q = tree[1]
        return f"({q.numerator}/{q.denominator})"
    if op == "var":
        return tree[1]
    if op == "neg":
        return f"(-{tree_text(tree[1])})"
    if op == "pow":
        return f"({tree_text(tree[1])})^{tree[2]}"
    sym = {"add": "+", "sub": "-", "mul": "*"}[op]
    return f"({tree_text(tree[1])}{sym}{tree_text(tree[2])})"


def random_env(rng: random.Random, names) -> dict:
    return {n: Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for n in names}


def evaluate_expr(e: Expr, env) -> Fraction:
    params = {k: v for k, v in env.items() if k in e.ctx.parameters}
    point = {k: v for k, v in env.items() if k not in e.ctx.parameters}
    return e.evaluate(point, params)


# -- sympy jet-calculus oracle -------------------------------------------------

class SympyJet:
    """Textbook jet calculus on sympy symbols, independent of the package."""

    def __init__(self, names=SPACE, dep="u"):
        self.names = tuple(names)
        self.X = {n: sympy.Symbol(n) for n in names}
        self.dep = dep
        self.p = sympy.Symbol("p")
        self.U = {}
        self._idx = {}
        for a in ((),) + tuple((n,) for n in names):
            self.u(a)
        for i, a in enumerate(names):
            for b in names[i:]:
                self.u((a, b))

    def u(self, idx):
        idx = tuple(sorted(idx, key=self.names.index))
        if idx not in self.U:
            s = sympy.Symbol(self.dep + ("_" + "".join(idx) if idx else ""))
            self.U[idx] = s
            self._idx[s] = idx
        return self.U[idx]

    def D(self, f, v):
        f = sympy.sympify(f)
        out = sympy.diff(f, self.X[v])
        for s in f.free_symbols:
            if s in self._idx:
                out += self.u(self._idx[s] + (v,)) * sympy.diff(f, s)
        return out

    def namespace(self):
        ns = {str(s): s for s in self.X.values()}
        ns.update({str(s): s for s in self.U.values()})
        ns["p"] = self.p
        return ns

    def sym(self, e: Expr):
        """Convert via the printed text (shorthand contexts only)."""
        return sympy.sympify(str(e).replace("^", "**"), locals=self.namespace())

    def text(self, s: str):
        return sympy.sympify(s.replace("^", "**"), locals=self.namespace())

    def prolong_coeffs(self, xi: dict, eta, order: int):
        """eta^J from the characteristic Q = eta - sum xi^i u_i: D_J Q + sum xi^i u_{J,i}."""
        Q = eta - sum(xi.get(n, 0) * self.U[(n,)] for n in self.names)
        out = {}
        for idx in [k for k in self.U if 0 < len(k) <= order]:
            dq = Q
            for v in idx:
                dq = self.D(dq, v)
            out[idx] = sympy.expand(dq + sum(xi.get(n, 0) * self.u(idx + (n,)) for n in self.names))
        return out

    def apply(self, xi: dict, eta, f, order: int):
        coeffs = self.prolong_coeffs(xi, eta, order)
        out = sum(xi.get(n, 0) * sympy.diff(f, self.X[n]) for n in self.names)
        out += eta * sympy.diff(f, self.u(()))
        for idx, c in coeffs.items():
            out += c * sympy.diff(f, self.U[idx])
        return out

    def variational_residual(self, xi: dict, eta, L):
        div_xi = sum(self.D(xi.get(n, 0), n) for n in self.names)
        return self.apply(xi, eta, L, 1) + L * div_xi

    def euler(self, L):
        out = sympy.diff(L, self.U[()])
        for idx, s in list(self.U.items()):
            if len(idx) == 0 or len(idx) > 2:
                continue
            d = sympy.diff(L, s)
            for v in idx:
                d = self.D(d, v)
            out += (-1) ** len(idx) * d
        return out


def is_zero_sym(e) -> bool:
    return sympy.simplify(sympy.together(sympy.expand(e))) == 0


def random_tree(rng: random.Random, atoms, depth: int = 3, pow_max: int = 3):
    """Seeded counterpart of :func:`trees` for fixed-count acceptance runs."""
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.3:
            return ("const", Fraction(rng.randint(-3, 3), rng.randint(1, 3)))
        return ("var", rng.choice(atoms))
    op = rng.choice(("add", "sub", "mul", "mul", "neg", "pow"))
    if op == "neg":
        return ("neg", random_tree(rng, atoms, depth - 1, pow_max))
    if op == "pow":
        return ("pow", random_tree(rng, atoms, depth - 1, pow_max), rng.randint(0, pow_max))
    return (op, random_tree(rng, atoms, depth - 1, pow_max), random_tree(rng, atoms, depth - 1, pow_max))
