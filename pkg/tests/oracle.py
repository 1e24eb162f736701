"""Independent sympy oracle: ambient polynomials reduced modulo ``xy - p``."""

import sympy as sp

X, Y = sp.symbols("x y")


def zsyms(n):
    return sp.symbols("z") if n == 1 else sp.symbols(f"z1:{n + 1}")


def gens(ring):
    zs = zsyms(ring.N)
    zs = (zs,) if ring.N == 1 else tuple(zs)
    return X, Y, zs


def p_expr(ring):
    _, _, zs = gens(ring)
    out = 0
    for exps, c in ring.p.coeffs.items():
        term = sp.Rational(int(c.numerator), int(c.denominator))
        for z, e in zip(zs, exps):
            term *= z ** e
        out += term
    return sp.expand(out)


def to_sympy(f):
    ring = f.ring
    _, _, zs = gens(ring)
    params = sp.symbols(" ".join(ring.params)) if len(ring.params) > 1 else (sp.Symbol(ring.params[0]),)
    out = 0
    for m, c in f.monomials():
        term = sp.Rational(int(c.numerator), int(c.denominator)) * X ** m.i * Y ** m.j
        for z, e in zip(zs, m.k):
            term *= z ** e
        for s, e in zip(params, m.q):
            term *= s ** e
        out += term
    return sp.expand(out)


def normal_form(expr, ring):
    """Remainder of ``expr`` modulo ``xy - p`` (lex, x > y > z): no monomial has both x and y."""
    _, _, zs = gens(ring)
    params = [sp.Symbol(n) for n in ring.params]
    poly_gens = (X, Y) + tuple(zs) + tuple(params)
    _, rem = sp.reduced(sp.expand(expr), [X * Y - p_expr(ring)], *poly_gens, order="lex")
    return sp.expand(rem)


def same(f, expr):
    """Ring element ``f`` equals the ambient polynomial ``expr`` on the surface."""
    return sp.expand(to_sympy(f) - normal_form(expr, f.ring)) == 0


def derive(field_exprs, g, ring):
    """Ambient derivation ``sum comps * d/dvar`` applied to ``g``."""
    _, _, zs = gens(ring)
    variables = (X, Y) + tuple(zs)
    return sp.expand(sum(c * sp.diff(g, v) for c, v in zip(field_exprs, variables)))
