"""Exact enumerative cross-checks on Grassmannians.

Line counts integrate the top Chern class of symmetric powers of the dual
tautological bundle over G(2, n+1); conic counts push a class down from the
projectivized rank-6 quadric bundle over G(3, n+1) and integrate there.  All
arithmetic is exact big-integer; integrals extract the point-class Schur
coefficient through the bialternant (multiply by the Vandermonde, read one
monomial).

Conventions: x_i / y_i are Chern roots of the dual tautological subbundle;
zeta is the hyperplane class of the bundle of conics, with the tautological
line spanning the conic's equation, so the multiplication map twists by
-zeta and pushforward sends zeta^(5+j) to the degree-j part of 1/c(E).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .incidence import CIType


class IntPoly:
    """Multivariate polynomial with exact integer coefficients."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        self.terms = {}
        if terms:
            for e, c in terms.items():
                if c:
                    self.terms[tuple(e)] = c

    @classmethod
    def constant(cls, nvars, c):
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def linear(cls, nvars, coeffs):
        terms = {}
        for i, c in enumerate(coeffs):
            if c:
                e = [0] * nvars
                e[i] = 1
                terms[tuple(e)] = c
        return cls(nvars, terms)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, IntPoly) and other.nvars == self.nvars and other.terms == self.terms

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return IntPoly(self.nvars, out)

    def __sub__(self, other):
        return self + (-1) * other

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPoly(self.nvars, {e: c * other for e, c in self.terms.items()})
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return IntPoly(self.nvars, out)

    __rmul__ = __mul__

    def mul_truncated(self, other, maxdeg):
        out = {}
        for e1, c1 in self.terms.items():
            d1 = sum(e1)
            for e2, c2 in other.terms.items():
                if d1 + sum(e2) > maxdeg:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return IntPoly(self.nvars, out)

    def homogeneous_part(self, d):
        return IntPoly(self.nvars, {e: c for e, c in self.terms.items() if sum(e) == d})

    def total_degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def coefficient(self, exponent):
        return self.terms.get(tuple(exponent), 0)

    def permute_vars(self, perm):
        return IntPoly(self.nvars, {tuple(e[perm[i]] for i in range(self.nvars)): c for e, c in self.terms.items()})

    def series_inverse(self, maxdeg):
        one = (0,) * self.nvars
        if self.terms.get(one) != 1:
            raise ValueError("series inverse needs constant term 1")
        rest = IntPoly(self.nvars, {e: -c for e, c in self.terms.items() if e != one})
        inv = IntPoly.constant(self.nvars, 1)
        term = IntPoly.constant(self.nvars, 1)
        for _ in range(maxdeg):
            term = term.mul_truncated(rest, maxdeg)
            if term.is_zero():
                break
            inv = inv + term
        return inv


class ChernRootPolynomial:
    """Symmetric integer polynomial in 2 or 3 formal Chern roots."""

    def __init__(self, roots: int, poly: IntPoly):
        if roots not in (2, 3):
            raise ValueError("only 2 or 3 roots supported")
        if poly.nvars != roots:
            raise ValueError("variable count does not match the root count")
        self.roots = roots
        self.poly = poly
        for perm in itertools.permutations(range(roots)):
            if poly.permute_vars(list(perm)) != poly:
                raise ValueError("polynomial is not symmetric in the roots")
        self.symmetric = True

    def __mul__(self, other):
        if isinstance(other, ChernRootPolynomial):
            return ChernRootPolynomial(self.roots, self.poly * other.poly)
        return ChernRootPolynomial(self.roots, self.poly * other)

    def degree(self):
        return self.poly.total_degree()


def sym_power_top_chern(d: int) -> ChernRootPolynomial:
    """Top Chern class of Sym^d of a rank-2 dual tautological bundle:
    the product of (i x1 + (d-i) x2) over i = 0..d."""
    if d < 1:
        raise ValueError("degree must be positive")
    acc = IntPoly.constant(2, 1)
    for i in range(d + 1):
        acc = acc * IntPoly.linear(2, (i, d - i))
    return ChernRootPolynomial(2, acc)


def schur_polynomial_2(a: int, b: int) -> IntPoly:
    """s_(a,b)(x1, x2) = sum of x1^i x2^(a+b-i) for b <= i <= a."""
    if a < b:
        raise ValueError("partition must be weakly decreasing")
    return IntPoly(2, {(i, a + b - i): 1 for i in range(b, a + 1)})


def partitions_in_rectangle(parts: int, width: int):
    def gen(remaining, maxpart):
        if remaining == 0:
            yield ()
            return
        for first in range(min(maxpart, width), -1, -1):
            for rest in gen(remaining - 1, first):
                yield (first,) + rest

    yield from gen(parts, width)


def schur_expansion_2(f: IntPoly):
    """Schur coefficients of a homogeneous symmetric 2-variable polynomial,
    checked by reconstructing the polynomial from them.  Classes outside the
    Grassmannian's rectangle are kept: they integrate to zero but belong in
    the audit trail."""
    d = f.total_degree()
    if d < 0:
        return {}
    vdm = IntPoly(2, {(1, 0): 1, (0, 1): -1})
    fv = f * vdm
    out = {}
    recon = IntPoly(2, {})
    for a in range(d, -1, -1):
        b = d - a
        if a < b:
            continue
        c = fv.coefficient((a + 1, b))
        if c:
            out[(a, b)] = c
            recon = recon + c * schur_polynomial_2(a, b)
    if recon != f:
        raise ArithmeticError("Schur expansion failed to reconstruct the polynomial")
    return out


def integrate_grass2(f: ChernRootPolynomial, n: int) -> int:
    """Pairing with the point class of G(2, n+1): the coefficient of
    x1^n x2^(n-1) in f * (x1 - x2).  Off-degree input integrates to 0."""
    part = f.poly.homogeneous_part(2 * (n - 1))
    vdm = IntPoly(2, {(1, 0): 1, (0, 1): -1})
    return (part * vdm).coefficient((n, n - 1))


def integrate_grass3(poly: IntPoly, n: int) -> int:
    """Pairing with the point class of G(3, n+1) via the 3-variable bialternant."""
    part = poly.homogeneous_part(3 * (n - 2))
    vdm = IntPoly.constant(3, 1)
    for a, b in ((0, 1), (0, 2), (1, 2)):
        ea = [0, 0, 0]
        eb = [0, 0, 0]
        ea[a] = 1
        eb[b] = 1
        vdm = vdm * (IntPoly(3, {tuple(ea): 1}) - IntPoly(3, {tuple(eb): 1}))
    return (part * vdm).coefficient((n, n - 1, n - 2))


def line_count(t: CIType) -> int:
    """The number of lines on a general complete intersection of the type,
    in the zero-dimensional case."""
    if t.expected_dim_lines() != 0:
        raise ValueError("line count needs expected dimension 0")
    acc = ChernRootPolynomial(2, IntPoly.constant(2, 1))
    for d in t.degrees:
        acc = acc * sym_power_top_chern(d)
    return integrate_grass2(acc, t.n)


def line_count_report(t: CIType):
    """Count plus the Schur expansion of the integrand, for report audits."""
    acc = ChernRootPolynomial(2, IntPoly.constant(2, 1))
    for d in t.degrees:
        acc = acc * sym_power_top_chern(d)
    expansion = schur_expansion_2(acc.poly)
    return integrate_grass2(acc, t.n), expansion


# ---------------------------------------------------------------------------
# conics: the rank-6 quadric bundle over G(3, n+1)
# ---------------------------------------------------------------------------

QUADRIC_ROOT_COEFFS = ((2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2))


def quadric_bundle_chern(maxdeg: int) -> IntPoly:
    """Total Chern class of Sym^2 of the rank-3 dual tautological bundle."""
    acc = IntPoly.constant(3, 1)
    for coeffs in QUADRIC_ROOT_COEFFS:
        acc = acc.mul_truncated(IntPoly.constant(3, 1) + IntPoly.linear(3, coeffs), maxdeg)
    return acc


def quadric_bundle_segre(maxdeg: int) -> IntPoly:
    return quadric_bundle_chern(maxdeg).series_inverse(maxdeg)


def section_bundle_top_chern(d: int, maxdeg: int) -> IntPoly:
    """Top Chern class (degree 2d+1 part) of the bundle with fibers
    H^0(C, O(d)): Sym^d of the dual 3-plane bundle modulo the twisted
    Sym^(d-2) image of multiplication by the universal conic.

    Variables: (y1, y2, y3, zeta)."""
    top = 2 * d + 1
    num = IntPoly.constant(4, 1)
    for a in range(d + 1):
        for b in range(d + 1 - a):
            num = num.mul_truncated(
                IntPoly.constant(4, 1) + IntPoly.linear(4, (a, b, d - a - b, 0)), maxdeg
            )
    den = IntPoly.constant(4, 1)
    for a in range(max(d - 1, 0)):
        for b in range(d - 1 - a):
            den = den.mul_truncated(
                IntPoly.constant(4, 1) + IntPoly.linear(4, (a, b, d - 2 - a - b, -1)), maxdeg
            )
    cF = num.mul_truncated(den.series_inverse(maxdeg), maxdeg)
    return cF.homogeneous_part(top)


def _zeta_coefficients(poly: IntPoly):
    """Split a 4-variable class into {zeta power: 3-variable class}."""
    out: dict[int, IntPoly] = {}
    for e, c in poly.terms.items():
        m = e[3]
        got = out.setdefault(m, IntPoly(3, {}))
        got.terms[(e[0], e[1], e[2])] = got.terms.get((e[0], e[1], e[2]), 0) + c
    return {m: IntPoly(3, g.terms) for m, g in out.items()}


def _conic_integrand(t: CIType):
    if t.expected_dim_conics() != 0:
        raise ValueError("conic count needs expected dimension 0")
    dim_g = 3 * (t.n - 2)
    maxdeg = dim_g + 5
    ctot = IntPoly.constant(4, 1)
    for d in t.degrees:
        ctot = ctot.mul_truncated(section_bundle_top_chern(d, maxdeg), maxdeg)
    return ctot, dim_g


def conic_count_segre(t: CIType) -> int:
    """Pushforward by Segre classes, one zeta power at a time."""
    ctot, dim_g = _conic_integrand(t)
    segre = quadric_bundle_segre(dim_g)
    pushed = IntPoly(3, {})
    for m, alpha in _zeta_coefficients(ctot).items():
        if m < 5:
            continue
        sj = segre.homogeneous_part(m - 5)
        pushed = pushed + alpha * sj
    return integrate_grass3(pushed, t.n)


def conic_count_reduce(t: CIType) -> int:
    """Reduce zeta powers with the rank-6 relation first, then read the
    zeta^5 coefficient and integrate."""
    ctot, dim_g = _conic_integrand(t)
    cE = quadric_bundle_chern(dim_g)
    c_parts = [cE.homogeneous_part(i) for i in range(7)]
    by_zeta = _zeta_coefficients(ctot)
    top = max(by_zeta) if by_zeta else 0
    coeffs = [by_zeta.get(m, IntPoly(3, {})) for m in range(top + 1)]
    # zeta^6 = -(c1 zeta^5 + c2 zeta^4 + ... + c6)
    for m in range(top, 5, -1):
        alpha = coeffs[m]
        if alpha.is_zero():
            continue
        coeffs[m] = IntPoly(3, {})
        for i in range(1, 7):
            coeffs[m - i] = coeffs[m - i] - alpha * c_parts[i]
    return integrate_grass3(coeffs[5], t.n)


def conic_count(t: CIType) -> int:
    """Conic count with the two evaluation orders cross-checked."""
    a = conic_count_segre(t)
    b = conic_count_reduce(t)
    if a != b:
        raise ArithmeticError(f"conic count evaluation paths disagree: {a} vs {b}")
    return a


def fiber_point_pushforward() -> int:
    """Segre normalization: the fiber point class zeta^5 pushes to 1."""
    return quadric_bundle_segre(0).coefficient((0, 0, 0))


def _alternant_3(exponents) -> IntPoly:
    out = IntPoly(3, {})
    for perm, sign in (((0, 1, 2), 1), ((0, 2, 1), -1), ((1, 0, 2), -1),
                       ((1, 2, 0), 1), ((2, 0, 1), 1), ((2, 1, 0), -1)):
        e = tuple(exponents[perm[i]] for i in range(3))
        out = out + IntPoly(3, {e: sign})
    return out


def schur_expansion_3(f: IntPoly):
    """Schur coefficients of a homogeneous symmetric 3-variable polynomial.

    Fraction-free reconstruction check: sum of c_lambda * a_(lambda+delta)
    must equal f times the Vandermonde."""
    d = f.total_degree()
    if d < 0:
        return {}
    vdm = IntPoly.constant(3, 1)
    for a, b in ((0, 1), (0, 2), (1, 2)):
        ea = [0, 0, 0]
        eb = [0, 0, 0]
        ea[a] = 1
        eb[b] = 1
        vdm = vdm * (IntPoly(3, {tuple(ea): 1}) - IntPoly(3, {tuple(eb): 1}))
    fv = f * vdm
    out = {}
    recon = IntPoly(3, {})
    for l1 in range(d, -1, -1):
        for l2 in range(min(l1, d - l1), -1, -1):
            l3 = d - l1 - l2
            if l3 > l2:
                continue
            c = fv.coefficient((l1 + 2, l2 + 1, l3))
            if c:
                out[(l1, l2, l3)] = c
                recon = recon + c * _alternant_3((l1 + 2, l2 + 1, l3))
    if recon != fv:
        raise ArithmeticError("Schur expansion failed to reconstruct the class")
    return out


def conic_count_report(t: CIType):
    """Both evaluation paths plus the pushed class's Schur expansion."""
    ctot, dim_g = _conic_integrand(t)
    segre = quadric_bundle_segre(dim_g)
    pushed = IntPoly(3, {})
    for m, alpha in _zeta_coefficients(ctot).items():
        if m >= 5:
            pushed = pushed + alpha * segre.homogeneous_part(m - 5)
    via_segre = integrate_grass3(pushed, t.n)
    via_reduce = conic_count_reduce(t)
    if via_segre != via_reduce:
        raise ArithmeticError(f"conic count evaluation paths disagree: {via_segre} vs {via_reduce}")
    return via_segre, via_reduce, schur_expansion_3(pushed)


def grassmannian_degree(k: int, m: int) -> int:
    """Degree of G(k, m) under Pluecker, as an integration sanity anchor."""
    if k == 2:
        n = m - 1
        e1 = IntPoly(2, {(1, 0): 1, (0, 1): 1})
        acc = IntPoly.constant(2, 1)
        for _ in range(2 * (n - 1)):
            acc = acc * e1
        return integrate_grass2(ChernRootPolynomial(2, acc), n)
    if k == 3:
        n = m - 1
        e1 = IntPoly(3, {(1, 0, 0): 1, (0, 1, 0): 1, (0, 0, 1): 1})
        acc = IntPoly.constant(3, 1)
        for _ in range(3 * (n - 2)):
            acc = acc * e1
        return integrate_grass3(acc, n)
    raise ValueError("only G(2, m) and G(3, m) are modeled")
