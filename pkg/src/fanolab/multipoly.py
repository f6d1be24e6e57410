"""Sparse multivariate polynomials over a prime field.

Terms live in a dict mapping exponent tuples to nonzero int residues; all
the geometry code keeps its forms homogeneous.  Serialization and coefficient
vectors use degree-lex order with the first variable largest; restrictions to
a parametrized line use the (s, t) convention where index j holds the
coefficient of s^j t^(d-j).
"""

from __future__ import annotations

import random
from functools import lru_cache

from . import unipoly
from .fields import PrimeField


class PlaneContained(Exception):
    """Every supplied restriction vanished identically: the plane lies on X."""


class MultiPoly:
    __slots__ = ("field", "nvars", "terms")

    def __init__(self, field: PrimeField, nvars: int, terms=None):
        self.field = field
        self.nvars = nvars
        clean = {}
        if terms:
            p = field.p
            for e, c in terms.items():
                c %= p
                if c:
                    if len(e) != nvars:
                        raise ValueError("exponent arity mismatch")
                    clean[tuple(e)] = c
        self.terms = clean

    @classmethod
    def zero(cls, field, nvars):
        return cls(field, nvars)

    @classmethod
    def constant(cls, field, nvars, c):
        return cls(field, nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, field, nvars, i, c=1):
        e = [0] * nvars
        e[i] = 1
        return cls(field, nvars, {tuple(e): c})

    @classmethod
    def from_coeffs(cls, field, nvars, degree, coeffs):
        """Inverse of coeff_vector: rebuild from deglex coefficients."""
        monoms = monomials_of_degree(nvars, degree)
        if len(coeffs) != len(monoms):
            raise ValueError("coefficient count mismatch")
        return cls(field, nvars, dict(zip(monoms, coeffs)))

    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self, d: int | None = None) -> bool:
        degs = {sum(e) for e in self.terms}
        if not degs:
            return True
        if len(degs) > 1:
            return False
        return d is None or degs == {d}

    def __eq__(self, other):
        return (
            isinstance(other, MultiPoly)
            and other.nvars == self.nvars
            and other.field.p == self.field.p
            and other.terms == self.terms
        )

    def __hash__(self):
        return hash((self.field.p, self.nvars, frozenset(self.terms.items())))

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        p = self.field.p
        for e, c in other.terms.items():
            v = (out.get(e, 0) + c) % p
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return MultiPoly(self.field, self.nvars, out)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __neg__(self):
        p = self.field.p
        return MultiPoly(self.field, self.nvars, {e: p - c for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            c = other % self.field.p
            return MultiPoly(self.field, self.nvars, {e: v * c for e, v in self.terms.items()})
        other = self._coerce(other)
        out: dict[tuple, int] = {}
        get = out.get
        # modular reduction happens once, in the constructor
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = get(e, 0) + c1 * c2
        return MultiPoly(self.field, self.nvars, out)

    __rmul__ = __mul__

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise ValueError("variable count mismatch")
            return other
        if isinstance(other, int):
            return MultiPoly.constant(self.field, self.nvars, other)
        raise TypeError(f"cannot combine MultiPoly with {type(other)!r}")

    def partial(self, i: int) -> "MultiPoly":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        return MultiPoly(self.field, self.nvars, out)

    def evaluate(self, point, field=None):
        """Value at a point; field may be an extension of the coefficient field."""
        F = field if field is not None else self.field
        emb = F.embed if hasattr(F, "embed") else (lambda a: a)
        acc = F.zero
        powers = [{0: F.one} for _ in range(self.nvars)]
        for e, c in self.terms.items():
            term = emb(c)
            for i, ei in enumerate(e):
                if ei:
                    cache = powers[i]
                    if ei not in cache:
                        base = point[i]
                        cur = max(k for k in cache if k <= ei)
                        val = cache[cur]
                        while cur < ei:
                            val = F.mul(val, base)
                            cur += 1
                            cache[cur] = val
                    term = F.mul(term, cache[ei])
            acc = F.add(acc, term)
        return acc

    def leading_monomial(self, key=None):
        if not self.terms:
            return None
        key = key or deglex_key
        return max(self.terms, key=key)

    def __repr__(self):
        if not self.terms:
            return "0"
        names = "xyzabcdefgh"
        bits = []
        for e in sorted(self.terms, key=deglex_key, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                f"{names[i] if self.nvars <= len(names) else 'x%d' % i}^{k}" if k > 1 else (names[i] if self.nvars <= len(names) else "x%d" % i)
                for i, k in enumerate(e)
                if k
            )
            bits.append(f"{c}" + (f"*{mono}" if mono else ""))
        return " + ".join(bits)


def deglex_key(e):
    return (sum(e), e)


def wfirst_key(e):
    # grade by the last variable's exponent first; still a monomial order
    return (e[-1], sum(e), e)


@lru_cache(maxsize=None)
def monomials_of_degree(nvars: int, d: int) -> tuple[tuple, ...]:
    """All exponent tuples of total degree d, deglex descending."""
    if d < 0:
        return ()

    def gen(rem, vars_left):
        if vars_left == 1:
            yield (rem,)
            return
        for first in range(rem, -1, -1):
            for rest in gen(rem - first, vars_left - 1):
                yield (first,) + rest

    return tuple(gen(d, nvars))


def coeff_vector(f: MultiPoly, d: int) -> list[int]:
    if not f.is_homogeneous(d) and not f.is_zero():
        raise ValueError("not homogeneous of the requested degree")
    return [f.terms.get(m, 0) for m in monomials_of_degree(f.nvars, d)]


def substitute_forms(f: MultiPoly, forms: list[MultiPoly], cache: dict | None = None) -> MultiPoly:
    """Substitute x_i -> forms[i] for arbitrary forms in a common variable set.

    Passing a per-substitution cache dict shares expanded monomial products
    across calls with the same forms (contexts reuse one transform many times).
    """
    if len(forms) != f.nvars:
        raise ValueError(f"expected {f.nvars} substitution forms, got {len(forms)}")
    if not forms:
        raise ValueError("cannot substitute into a polynomial with no variables")
    k = forms[0].nvars
    for g in forms:
        if g.nvars != k:
            raise ValueError("substitution forms disagree on variable count")
    field = f.field
    memo = cache if cache is not None else {}
    one = MultiPoly.constant(field, k, 1)

    def expand(e):
        got = memo.get(e)
        if got is None:
            i = next((idx for idx, x in enumerate(e) if x), None)
            if i is None:
                got = one
            else:
                prev = list(e)
                prev[i] -= 1
                got = expand(tuple(prev)) * forms[i]
            memo[e] = got
        return got

    acc: dict[tuple, int] = {}
    get = acc.get
    for exps, c in f.terms.items():
        for e2, c2 in expand(exps).terms.items():
            acc[e2] = get(e2, 0) + c * c2
    return MultiPoly(field, k, acc)


def substitute_linear_forms(f: MultiPoly, forms: list[MultiPoly], cache: dict | None = None) -> MultiPoly:
    """Substitute x_i -> forms[i]; forms are linear (or zero) in a common variable set."""
    for g in forms:
        if not g.is_zero() and not g.is_homogeneous(1):
            raise ValueError("substitution forms must be linear and homogeneous")
    return substitute_forms(f, forms, cache=cache)


def change_forms(field, matrix):
    forms = []
    for row in matrix:
        terms = {}
        for j, c in enumerate(row):
            if c % field.p:
                e = [0] * len(row)
                e[j] = 1
                terms[tuple(e)] = c
        forms.append(MultiPoly(field, len(row), terms))
    return forms


def linear_change(f: MultiPoly, matrix, cache: dict | None = None) -> MultiPoly:
    """Substitute x_i -> sum_j matrix[i][j] * y_j (square change of coordinates)."""
    return substitute_linear_forms(f, change_forms(f.field, matrix), cache=cache)


def split_variable(f: MultiPoly, i: int):
    """Write f = q * x_i + r with r free of x_i; exact, no order choices."""
    q, r = {}, {}
    for e, c in f.terms.items():
        if e[i]:
            ne = list(e)
            ne[i] -= 1
            q[tuple(ne)] = c
        else:
            r[e] = c
    return MultiPoly(f.field, f.nvars, q), MultiPoly(f.field, f.nvars, r)


def project_to_vars(f: MultiPoly, keep: list[int]) -> MultiPoly:
    """Set every variable outside `keep` to zero and reindex onto keep."""
    keep = list(keep)
    pos = {v: i for i, v in enumerate(keep)}
    out = {}
    for e, c in f.terms.items():
        if any(x and i not in pos for i, x in enumerate(e)):
            continue
        ne = [0] * len(keep)
        for i, x in enumerate(e):
            if x:
                ne[pos[i]] = x
        out[tuple(ne)] = c
    return MultiPoly(f.field, len(keep), out)


def embed_vars(f: MultiPoly, nvars: int, positions: list[int]) -> MultiPoly:
    """View an m-variable form inside a larger variable set at given slots."""
    out = {}
    for e, c in f.terms.items():
        ne = [0] * nvars
        for i, x in enumerate(e):
            ne[positions[i]] = x
        out[tuple(ne)] = c
    return MultiPoly(f.field, nvars, out)


def divide_single(f: MultiPoly, g: MultiPoly, key=deglex_key):
    """Division by one polynomial: f = q*g + r, no term of r divisible by lt(g)."""
    if g.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    field = f.field
    lead = g.leading_monomial(key)
    clead = g.terms[lead]
    clead_inv = field.inv(clead)
    work = dict(f.terms)
    q: dict[tuple, int] = {}
    r: dict[tuple, int] = {}
    p = field.p
    while work:
        e = max(work, key=key)
        c = work.pop(e)
        if all(a >= b for a, b in zip(e, lead)):
            shift = tuple(a - b for a, b in zip(e, lead))
            factor = c * clead_inv % p
            q[shift] = (q.get(shift, 0) + factor) % p
            for ge, gc in g.terms.items():
                if ge == lead:
                    continue
                ne = tuple(a + b for a, b in zip(shift, ge))
                v = (work.get(ne, 0) - factor * gc) % p
                if v:
                    work[ne] = v
                else:
                    work.pop(ne, None)
        else:
            r[e] = c
    return MultiPoly(field, f.nvars, q), MultiPoly(field, f.nvars, r)


def divides(g: MultiPoly, f: MultiPoly) -> bool:
    return divide_single(f, g)[1].is_zero()


def exact_div(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    q, r = divide_single(f, g)
    if not r.is_zero():
        raise ArithmeticError("division is not exact")
    return q


def reduce_mod_quadric(f: MultiPoly, quadric: MultiPoly):
    """(quotient, normal form) of a plane form modulo a quadric with w^2 present.

    The normal form has w-exponent <= 1, so its coefficients sit in the
    standard section basis of the conic.
    """
    if quadric.terms.get((0, 0, 2), 0) == 0:
        raise ValueError("quadric has no w^2 term; change coordinates first")
    return divide_single(f, quadric, key=wfirst_key)


def random_homogeneous(field, nvars, d, rng: random.Random, nonzero=True) -> MultiPoly:
    monoms = monomials_of_degree(nvars, d)
    for _ in range(64):
        terms = {m: rng.randrange(field.p) for m in monoms}
        f = MultiPoly(field, nvars, terms)
        if not nonzero or not f.is_zero():
            return f
    raise RuntimeError("could not draw a nonzero form")


def restrict_to_parametrized_line(f: MultiPoly, row_s, row_t, field=None):
    """Coefficients of f(s*row_s + t*row_t) in the s^j t^(d-j) basis.

    Runs over any field with embed(), so chart rows may have extension
    coordinates; returns a list of d+1 field elements.
    """
    F = field if field is not None else f.field
    d = f.total_degree()
    if d < 0:
        return [F.zero]
    out = [F.zero] * (d + 1)
    pow_cache: dict[tuple[int, int], list] = {}

    def linear_power(i, e):
        got = pow_cache.get((i, e))
        if got is None:
            if e == 0:
                got = [F.one]
            else:
                prev = linear_power(i, e - 1)
                # multiply by (row_s[i] * s + row_t[i] * t): index j <-> s^j
                a, b = row_s[i], row_t[i]
                if isinstance(a, int):
                    a = F.embed(a)
                if isinstance(b, int):
                    b = F.embed(b)
                got = [F.zero] * (len(prev) + 1)
                for j, c in enumerate(prev):
                    if not F.is_zero(c):
                        got[j + 1] = F.add(got[j + 1], F.mul(c, a))
                        got[j] = F.add(got[j], F.mul(c, b))
            pow_cache[(i, e)] = got
        return got

    for exps, c in f.terms.items():
        conv = [F.embed(c)]
        for i, e in enumerate(exps):
            if e:
                fac = linear_power(i, e)
                nxt = [F.zero] * (len(conv) + len(fac) - 1)
                for j, x in enumerate(conv):
                    if F.is_zero(x):
                        continue
                    for jj, y in enumerate(fac):
                        nxt[j + jj] = F.add(nxt[j + jj], F.mul(x, y))
                conv = nxt
        for j, x in enumerate(conv):
            out[j] = F.add(out[j], x)
    return out


# ---------------------------------------------------------------------------
# gcd of homogeneous forms on a plane
# ---------------------------------------------------------------------------


def _biv_to_uni(h: MultiPoly):
    """Homogeneous h(u, v) as (power of v, dehomogenized int list in x = u/v)."""
    d = h.total_degree()
    out = [0] * (d + 1)
    for (a, b), c in h.terms.items():
        out[a] = c
    coeffs = unipoly.trim(out, h.field)
    return d - unipoly.degree(coeffs), coeffs


def _uni_to_biv(field, vpow: int, coeffs) -> MultiPoly:
    terms = {}
    d = unipoly.degree(coeffs)
    for a, c in enumerate(coeffs):
        if c:
            terms[(a, d - a + vpow)] = c
    return MultiPoly(field, 2, terms)


def bivariate_homogeneous_gcd(h1: MultiPoly, h2: MultiPoly) -> MultiPoly:
    field = h1.field
    v1, c1 = _biv_to_uni(h1)
    v2, c2 = _biv_to_uni(h2)
    g = unipoly.gcd(c1, c2, field)
    return _uni_to_biv(field, min(v1, v2), g)


def _w_coefficients(f: MultiPoly) -> list[MultiPoly]:
    d = max((e[2] for e in f.terms), default=0)
    out = [dict() for _ in range(d + 1)]
    for (a, b, w), c in f.terms.items():
        out[w][(a, b)] = c
    return [MultiPoly(f.field, 2, t) for t in out]


def _from_w_coefficients(field, coeffs: list[MultiPoly]) -> MultiPoly:
    terms = {}
    for w, h in enumerate(coeffs):
        for (a, b), c in h.terms.items():
            terms[(a, b, w)] = c
    return MultiPoly(field, 3, terms)


def _content_w(f: MultiPoly) -> MultiPoly:
    coeffs = [h for h in _w_coefficients(f) if not h.is_zero()]
    g = coeffs[0]
    for h in coeffs[1:]:
        g = bivariate_homogeneous_gcd(g, h)
        if g.total_degree() == 0:
            break
    return g


def _lift_biv(h: MultiPoly) -> MultiPoly:
    return MultiPoly(h.field, 3, {(a, b, 0): c for (a, b), c in h.terms.items()})


def _pseudo_rem_w(A: MultiPoly, B: MultiPoly) -> MultiPoly:
    """Pseudo-remainder of A by B as polynomials in w over F_p[u,v]."""
    field = A.field
    ca = _w_coefficients(A)
    cb = _w_coefficients(B)
    db = len(cb) - 1
    lead = cb[-1]
    work = list(ca)
    while len(work) - 1 >= db and any(not h.is_zero() for h in work):
        while work and work[-1].is_zero():
            work.pop()
        if len(work) - 1 < db:
            break
        top = work[-1]
        # multiply through by lead, then cancel the top coefficient
        work = [h * lead for h in work]
        shift = len(work) - 1 - db
        for i, bh in enumerate(cb):
            work[shift + i] = work[shift + i] - top * bh
        work.pop()
    return _from_w_coefficients(field, work) if work else MultiPoly.zero(field, 3)


def normalize_form(f: MultiPoly) -> MultiPoly:
    """Scale so the deglex-leading coefficient is 1."""
    if f.is_zero():
        return f
    lead = f.leading_monomial()
    return f * f.field.inv(f.terms[lead])


def _gcd_pair_plane(F: MultiPoly, G: MultiPoly) -> MultiPoly:
    field = F.field
    if F.is_zero():
        return normalize_form(G)
    if G.is_zero():
        return normalize_form(F)
    contF, contG = _content_w(F), _content_w(G)
    cont = bivariate_homogeneous_gcd(contF, contG)
    A = exact_div(F, _lift_biv(contF))
    B = exact_div(G, _lift_biv(contG))
    # keep the higher w-degree on the left
    if max((e[2] for e in A.terms), default=0) < max((e[2] for e in B.terms), default=0):
        A, B = B, A
    while True:
        degB = max((e[2] for e in B.terms), default=0)
        if degB == 0:
            prim = MultiPoly.constant(field, 3, 1)
            break
        R = _pseudo_rem_w(A, B)
        if R.is_zero():
            prim = exact_div(B, _lift_biv(_content_w(B)))
            break
        A, B = B, exact_div(R, _lift_biv(_content_w(R)))
    return normalize_form(_lift_biv(cont) * prim)


def plane_gcd(forms: list[MultiPoly]) -> MultiPoly:
    """gcd, up to scalar, of homogeneous forms in three variables.

    Raises PlaneContained when every input is identically zero, which in the
    conic census means the plane lies inside the complete intersection.
    """
    live = [f for f in forms if not f.is_zero()]
    if not live:
        raise PlaneContained()
    g = normalize_form(live[0])
    for f in live[1:]:
        if g.total_degree() == 0:
            break
        g = _gcd_pair_plane(g, f)
    return normalize_form(g)
