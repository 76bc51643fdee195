"""Independent reference computations (sympy), kept apart from the package code."""

from __future__ import annotations

import sympy as sp

X, Y, Z = sp.symbols("x y z")


def sphere_laplacian(f):
    """Laplace-Beltrami operator on the unit sphere via the ambient formula.

    For the restriction of ``f`` to ``r = 1``:
    ``Lap_S f = Lap_R3 f - d^2f/dr^2 - 2 df/dr``, reduced modulo ``x^2+y^2+z^2-1``.
    """
    f = sp.sympify(f)
    t = sp.Symbol("t")
    radial = f.subs({X: t * X, Y: t * Y, Z: t * Z}, simultaneous=True)
    d1 = sp.diff(radial, t).subs(t, 1)
    d2 = sp.diff(radial, t, 2).subs(t, 1)
    flat = sp.diff(f, X, 2) + sp.diff(f, Y, 2) + sp.diff(f, Z, 2)
    return reduce_mod(sp.expand(flat - d2 - 2 * d1), [X**2 + Y**2 + Z**2 - 1])


def reduce_mod(expr, relations, gens=(X, Y, Z), order="grevlex"):
    G = sp.groebner(relations, *gens, order=order)
    return sp.expand(G.reduce(sp.expand(expr))[1])


def jacobiator(table, gens=(X, Y, Z)):
    """Cyclic sum on generator triples for an upper-triangular bracket table dict."""
    m = len(gens)
    P = sp.zeros(m, m)
    for (i, j), v in table.items():
        P[i, j] = sp.sympify(v)
        P[j, i] = -P[i, j]

    def br(a, b):
        return sp.expand(sum(sp.diff(a, gens[i]) * sp.diff(b, gens[j]) * P[i, j]
                             for i in range(m) for j in range(m)))

    out = {}
    for i in range(m):
        for j in range(i + 1, m):
            for k in range(j + 1, m):
                a, b, c = gens[i], gens[j], gens[k]
                out[(i, j, k)] = sp.expand(br(br(a, b), c) + br(br(b, c), a) + br(br(c, a), b))
    return out


def groebner_reduced(polys, gens, order):
    """Reduced monic Groebner basis as a sorted list of expanded sympy expressions."""
    G = sp.groebner([sp.sympify(p) for p in polys], *gens, order=order)
    return sorted((sp.expand(g / sp.Poly(g, *gens).LC(order=order)) for g in G.exprs),
                  key=sp.default_sort_key)


def to_sympy(elem):
    """Convert a ring element to a sympy rational function."""
    ctx = elem.ctx
    syms = sp.symbols(" ".join(ctx.gens))
    syms = syms if isinstance(syms, tuple) else (syms,)

    def poly(p):
        return sum(sp.Rational(c.numerator, c.denominator)
                   * sp.Mul(*[s**e for s, e in zip(syms, m)]) for m, c in p.terms.items())

    den = sp.Mul(*[poly(d) ** e for d, e in zip(ctx.denoms, elem.exps)])
    return poly(elem.num) / den


def bounded_membership(f, generators, gens, degree):
    """Is ``f = sum h_i g_i`` solvable with every ``h_i`` of degree <= ``degree``?

    Brute-force linear algebra over the rationals on the degree-bounded slice.
    A ``False`` answer only rules out certificates up to that degree.
    """
    from itertools import combinations_with_replacement

    monos = [sp.Integer(1)]
    for d in range(1, degree + 1):
        for combo in combinations_with_replacement(gens, d):
            monos.append(sp.Mul(*combo))
    unknowns = []
    total = sp.Integer(0)
    for gi, g in enumerate(generators):
        for mi, m in enumerate(monos):
            c = sp.Symbol(f"c_{gi}_{mi}")
            unknowns.append(c)
            total += c * m * sp.sympify(g)
    eqs = sp.Poly(sp.expand(total - sp.sympify(f)), *gens).coeffs()
    return bool(sp.linsolve(eqs, unknowns) != sp.S.EmptySet)


def sphere_d_apply(i, f):
    """``D^i(f) = eta {x^k, f} g_kl {x^l, x^i}`` on the unit sphere with g = Id, reduced mod C."""
    gens = (X, Y, Z)
    C = (X**2 + Y**2 + Z**2 - 1) / 2
    grad = [sp.diff(C, v) for v in gens]
    eps = sp.LeviCivita

    def br(a, b):
        return sp.expand(sum(sp.diff(a, gens[p]) * sp.diff(b, gens[q]) * eps(p, q, r) * grad[r]
                             for p in range(3) for q in range(3) for r in range(3)))

    eta = 1 / (X**2 + Y**2 + Z**2)
    raw = eta * sum(br(gens[k], sp.sympify(f)) * br(gens[k], gens[i]) for k in range(3))
    num, den = sp.fraction(sp.together(raw))
    rel = [X**2 + Y**2 + Z**2 - 1]
    # the denominator reduces to a constant on the sphere
    return sp.expand(reduce_mod(num, rel) / reduce_mod(den, rel))


def to_sympy_poly(p):
    syms = sp.symbols(" ".join(p.gens))
    syms = syms if isinstance(syms, tuple) else (syms,)
    return sp.expand(sum((sp.Rational(c.numerator, c.denominator)
                          * sp.Mul(*[s**e for s, e in zip(syms, m)]) for m, c in p.terms.items()),
                         sp.Integer(0)))
