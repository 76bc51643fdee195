"""Levi-Civita connection, curvature and the Laplacian of a KP algebra.

Everything is computed on the generators ``D^i`` and extended by
A-multilinearity.  :class:`Geometry` caches the generator arrays for one
:class:`~kpalg.kp.KPCtx`; the module-level functions share one cached
instance per context.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Sequence

from .kp import Deriv, KPCtx, coeffs_from_values, g_form, trace
from .ring import Elem

__all__ = ["Geometry", "Riemann", "IdentityResult", "PropertyReport", "christoffel",
           "nabla", "lie_bracket", "riemann", "ricci", "scalar", "gradient", "divergence",
           "laplacian", "verify_properties", "geometry"]


@dataclass
class Riemann:
    """``R3[k][l][j]``: coefficients of ``R(D^k, D^l) D^j``.
    ``Rlow[i][j][k][l] = g(D^i, R(D^k, D^l) D^j)``."""

    R3: list
    Rlow: list


@dataclass
class IdentityResult:
    name: str
    ok: bool
    checked: int
    failures: int = 0
    witness: tuple | None = None
    worst: Elem | None = None

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        tail = f"{self.checked} tuples"
        if not self.ok:
            tail += f", {self.failures} failing, e.g. {self.witness}: residual {self.worst}"
        else:
            tail += ", residual 0"
        return f"{status}  {self.name:<22} {tail}"


@dataclass
class PropertyReport:
    results: list[IdentityResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def __bool__(self):
        return self.ok

    def __getitem__(self, name: str) -> IdentityResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def lines(self) -> list[str]:
        return [r.line() for r in self.results]


class _Tally:
    def __init__(self, name: str):
        self.res = IdentityResult(name, True, 0)
        self._worst_size = -1

    def check(self, witness: tuple, residuals: Sequence[Elem]):
        self.res.checked += 1
        bad = [r for r in residuals if not r.is_zero()]
        if not bad:
            return
        self.res.ok = False
        self.res.failures += 1
        r = max(bad, key=lambda e: len(e.num.terms))
        if len(r.num.terms) > self._worst_size:
            self._worst_size = len(r.num.terms)
            self.res.witness = witness
            self.res.worst = r


class Geometry:
    """Cached generator-level geometry of a KP context.

    ``gamma`` overrides the Christoffel array (used to exercise the
    property checks on a deliberately wrong connection).
    """

    def __init__(self, kp: KPCtx, gamma=None):
        self.kp = kp
        self.m = kp.m
        self._gamma_override = gamma
        self._dgamma: dict = {}

    # -- first derivatives of the D-matrix ---------------------------------
    @cached_property
    def dD(self) -> list:
        """``dD[i][j][l] = D^i(D^{jl})``."""
        kp, m = self.kp, self.m
        out = [[[None] * m for _ in range(m)] for _ in range(m)]
        for i in range(m):
            for j in range(m):
                for l in range(j, m):
                    v = kp.d(i, kp.D[j][l])
                    out[i][j][l] = out[i][l][j] = v
        return out

    @cached_property
    def gamma(self) -> list:
        """``gamma[i][j][k] = Gamma^{ij}_k``."""
        if self._gamma_override is not None:
            return [[[self.kp.elem(v) for v in row] for row in plane]
                    for plane in self._gamma_override]
        kp, m, dD = self.kp, self.m, self.dD
        zero = kp.ring.zero
        half = kp.ring.const(1) / 2
        out = [[[zero] * m for _ in range(m)] for _ in range(m)]
        for i, j, k in product(range(m), repeat=3):
            acc = zero
            for l in range(m):
                if kp.Dlow[l][k]:
                    diff = dD[i][j][l] - dD[j][i][l]
                    if diff:
                        acc = acc + diff * kp.Dlow[l][k]
                if kp.g[k][l] and dD[l][i][j]:
                    acc = acc + kp.g[k][l] * dD[l][i][j]
            out[i][j][k] = acc * half
        return out

    # -- connection and bracket --------------------------------------------
    def nabla(self, alpha: Deriv, beta: Deriv) -> Deriv:
        kp, m, G = self.kp, self.m, self.gamma
        coeffs = []
        for k in range(m):
            acc = alpha(beta.coeffs[k])
            for i in range(m):
                a = alpha.coeffs[i]
                if not a:
                    continue
                for j in range(m):
                    b = beta.coeffs[j]
                    if b and G[i][j][k]:
                        acc = acc + G[i][j][k] * a * b
            coeffs.append(acc)
        return Deriv(kp, coeffs)

    def nabla_gen(self, i: int, j: int) -> Deriv:
        """``nabla_{D^i} D^j = Gamma^{ij}_k D^k``."""
        return Deriv(self.kp, self.gamma[i][j])

    def lie(self, alpha: Deriv, beta: Deriv) -> Deriv:
        """Commutator computed from actions on the generators."""
        kp = self.kp
        va, vb = alpha.values(), beta.values()
        vals = [alpha(vb[k]) - beta(va[k]) for k in range(self.m)]
        return coeffs_from_values(vals, kp)

    @cached_property
    def gen_lie(self) -> list:
        m, kp = self.m, self.kp
        gens = kp.generators()
        out = [[None] * m for _ in range(m)]
        for k in range(m):
            out[k][k] = Deriv(kp, [kp.ring.zero] * m)
            for l in range(k + 1, m):
                b = self.lie(gens[k], gens[l])
                out[k][l] = b
                out[l][k] = -b
        return out

    # -- curvature ---------------------------------------------------------
    def _d_gamma(self, k: int, l: int, j: int) -> list:
        key = (k, l, j)
        hit = self._dgamma.get(key)
        if hit is None:
            hit = [self.kp.d(k, v) for v in self.gamma[l][j]]
            self._dgamma[key] = hit
        return hit

    def _nabla_gen_of(self, k: int, coeffs: Sequence[Elem], dcoeffs: Sequence[Elem]) -> list:
        """Coefficients of ``nabla_{D^k}(c_n D^n)`` given ``D^k(c_n)``."""
        m, G, zero = self.m, self.gamma, self.kp.ring.zero
        out = []
        for n in range(m):
            acc = dcoeffs[n]
            for p in range(m):
                if coeffs[p] and G[k][p][n]:
                    acc = acc + coeffs[p] * G[k][p][n]
            out.append(acc)
        return out

    @cached_property
    def R3(self) -> list:
        m, kp, G = self.m, self.kp, self.gamma
        zero = kp.ring.zero
        out = [[[None] * m for _ in range(m)] for _ in range(m)]
        for k in range(m):
            for j in range(m):
                out[k][k][j] = [zero] * m
        for k in range(m):
            for l in range(k + 1, m):
                br = self.gen_lie[k][l].coeffs
                for j in range(m):
                    a = self._nabla_gen_of(k, G[l][j], self._d_gamma(k, l, j))
                    b = self._nabla_gen_of(l, G[k][j], self._d_gamma(l, k, j))
                    coeffs = []
                    for n in range(m):
                        acc = a[n] - b[n]
                        for p in range(m):
                            if br[p] and G[p][j][n]:
                                acc = acc - br[p] * G[p][j][n]
                        coeffs.append(acc)
                    out[k][l][j] = coeffs
                    out[l][k][j] = [-c for c in coeffs]
        return out

    @cached_property
    def Rlow(self) -> list:
        m, kp = self.m, self.kp
        gens = kp.generators()
        R3 = self.R3
        zero = kp.ring.zero
        out = [[[[zero] * m for _ in range(m)] for _ in range(m)] for _ in range(m)]
        for k in range(m):
            for l in range(k + 1, m):
                for j in range(m):
                    dv = Deriv(kp, R3[k][l][j])
                    for i in range(m):
                        v = g_form(gens[i], dv, kp)
                        out[i][j][k][l] = v
                        out[i][j][l][k] = -v
        return out

    def riemann(self) -> Riemann:
        return Riemann(self.R3, self.Rlow)

    def curvature(self, alpha: Deriv, beta: Deriv, gam: Deriv) -> Deriv:
        """``R(alpha, beta) gamma`` by multilinearity over the generator array."""
        m, kp, R3 = self.m, self.kp, self.R3
        coeffs = [kp.ring.zero] * m
        for k, l, j in product(range(m), repeat=3):
            if k == l:
                continue
            c = alpha.coeffs[k] * beta.coeffs[l] * gam.coeffs[j]
            if not c:
                continue
            for n in range(m):
                if R3[k][l][j][n]:
                    coeffs[n] = coeffs[n] + c * R3[k][l][j][n]
        return Deriv(kp, coeffs)

    @cached_property
    def ricci_matrix(self) -> list:
        """``Ric(D^k, D^l) = g(R(D^i, D^k) D^l, D^j) D_ij``."""
        m, kp, Rl = self.m, self.kp, self.Rlow
        zero = kp.ring.zero
        out = [[zero] * m for _ in range(m)]
        for k, l in product(range(m), repeat=2):
            acc = zero
            for i, j in product(range(m), repeat=2):
                if Rl[j][l][i][k] and kp.Dlow[i][j]:
                    acc = acc + Rl[j][l][i][k] * kp.Dlow[i][j]
            out[k][l] = acc
        return out

    def ricci(self, alpha: Deriv, beta: Deriv) -> Elem:
        Ric = self.ricci_matrix
        acc = self.kp.ring.zero
        for k, l in product(range(self.m), repeat=2):
            c = alpha.coeffs[k] * beta.coeffs[l]
            if c and Ric[k][l]:
                acc = acc + c * Ric[k][l]
        return acc

    @cached_property
    def scalar(self) -> Elem:
        kp, Ric = self.kp, self.ricci_matrix
        acc = kp.ring.zero
        for k, l in product(range(self.m), repeat=2):
            if Ric[k][l] and kp.Dlow[k][l]:
                acc = acc + Ric[k][l] * kp.Dlow[k][l]
        return acc

    # -- calculus ----------------------------------------------------------
    def gradient(self, f) -> Deriv:
        f = self.kp.elem(f)
        return Deriv(self.kp, [self.kp.d_low(i, f) for i in range(self.m)])

    def divergence(self, alpha: Deriv) -> Elem:
        gens = self.kp.generators()
        L = [self.nabla(gens[i], alpha).coeffs for i in range(self.m)]
        return trace(L, self.kp)

    def laplacian(self, f) -> Elem:
        return self.divergence(self.gradient(f))

    # -- property suite ----------------------------------------------------
    def verify(self) -> PropertyReport:
        kp, m = self.kp, self.m
        gens = kp.generators()
        rng = range(m)
        report = PropertyReport()
        gram = [[g_form(gens[i], gens[j], kp) for j in rng] for i in rng]
        nab = [[self.nabla_gen(i, j) for j in rng] for i in rng]
        lie = self.gen_lie

        koszul = _Tally("koszul")
        for i, j, k in product(rng, repeat=3):
            lhs = g_form(nab[i][j], gens[k], kp) * 2
            rhs = (kp.d(i, gram[j][k]) + kp.d(j, gram[k][i]) - kp.d(k, gram[i][j])
                   - g_form(lie[j][k], gens[i], kp) + g_form(lie[k][i], gens[j], kp)
                   + g_form(lie[i][j], gens[k], kp))
            koszul.check((i, j, k), [lhs - rhs])
        report.results.append(koszul.res)

        torsion = _Tally("torsion-free")
        for i, j in product(rng, repeat=2):
            t = nab[i][j] - nab[j][i] - lie[i][j]
            torsion.check((i, j), list(t.values()))
        report.results.append(torsion.res)

        metric = _Tally("metricity")
        for i, j, k in product(rng, repeat=3):
            lhs = kp.d(i, gram[j][k])
            rhs = g_form(nab[i][j], gens[k], kp) + g_form(gens[j], nab[i][k], kp)
            metric.check((i, j, k), [lhs - rhs])
        report.results.append(metric.res)

        R3 = self.R3

        def Rgen(a, b, c):
            return Deriv(kp, R3[a][b][c])

        bianchi1 = _Tally("first-bianchi")
        for a, b, c in product(rng, repeat=3):
            s = Rgen(a, b, c) + Rgen(c, a, b) + Rgen(b, c, a)
            bianchi1.check((a, b, c), list(s.values()))
        report.results.append(bianchi1.res)

        bianchi2 = _Tally("second-bianchi")
        nabla_R = {}

        def cov_R(a, b, c, d):
            """``(nabla_{D^a} R)(D^b, D^c, D^d)`` as a coefficient vector."""
            key = (a, b, c, d)
            if key not in nabla_R:
                inner = R3[b][c][d]
                first = self._nabla_gen_of(a, inner, [kp.d(a, v) for v in inner])
                acc = list(first)
                for p in rng:
                    for term in (
                        (self.gamma[a][b][p], R3[p][c][d]),
                        (self.gamma[a][c][p], R3[b][p][d]),
                        (self.gamma[a][d][p], R3[b][c][p]),
                    ):
                        coef, vec = term
                        if coef:
                            acc = [x - coef * y for x, y in zip(acc, vec)]
                nabla_R[key] = acc
            return nabla_R[key]

        for a, b, c, d in product(rng, repeat=4):
            s = [x + y + z for x, y, z in zip(cov_R(a, b, c, d), cov_R(b, c, a, d),
                                               cov_R(c, a, b, d))]
            bianchi2.check((a, b, c, d), list(Deriv(kp, s).values()))
        report.results.append(bianchi2.res)

        Rl = self.Rlow
        anti12 = _Tally("antisymmetry-12")
        anti34 = _Tally("antisymmetry-34")
        pair = _Tally("pair-symmetry")
        for i, j, k, l in product(rng, repeat=4):
            anti12.check((i, j, k, l), [Rl[i][j][k][l] + Rl[j][i][k][l]])
            anti34.check((i, j, k, l), [Rl[i][j][k][l] + Rl[i][j][l][k]])
            pair.check((i, j, k, l), [Rl[i][j][k][l] - Rl[k][l][i][j]])
        report.results += [anti12.res, anti34.res, pair.res]
        return report


def geometry(ctx: KPCtx) -> Geometry:
    if ctx._geometry is None:
        ctx._geometry = Geometry(ctx)
    return ctx._geometry


def christoffel(ctx: KPCtx) -> list:
    return geometry(ctx).gamma


def nabla(alpha: Deriv, beta: Deriv, ctx: KPCtx | None = None) -> Deriv:
    return geometry(ctx or alpha.kp).nabla(alpha, beta)


def lie_bracket(alpha: Deriv, beta: Deriv, ctx: KPCtx | None = None) -> Deriv:
    return geometry(ctx or alpha.kp).lie(alpha, beta)


def riemann(ctx: KPCtx) -> Riemann:
    return geometry(ctx).riemann()


def ricci(alpha: Deriv, beta: Deriv, ctx: KPCtx | None = None) -> Elem:
    return geometry(ctx or alpha.kp).ricci(alpha, beta)


def scalar(ctx: KPCtx) -> Elem:
    return geometry(ctx).scalar


def gradient(f, ctx: KPCtx) -> Deriv:
    return geometry(ctx).gradient(f)


def divergence(alpha: Deriv, ctx: KPCtx | None = None) -> Elem:
    return geometry(ctx or alpha.kp).divergence(alpha)


def laplacian(f, ctx: KPCtx) -> Elem:
    return geometry(ctx).laplacian(f)


def verify_properties(ctx: KPCtx, gamma=None) -> PropertyReport:
    geo = geometry(ctx) if gamma is None else Geometry(ctx, gamma)
    return geo.verify()
