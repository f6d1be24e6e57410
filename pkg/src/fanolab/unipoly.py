"""Univariate polynomials over any field object from fanolab.fields.

Polynomials are plain lists of field elements, lowest degree first, with no
trailing zeros ([] is the zero polynomial).  Everything here is generic over
the field protocol so the same code runs over F_p and over F_{p^k}.
"""

from __future__ import annotations

import random

from .fields import ExtensionField, PrimeField, field_for_degree


def trim(cs, field):
    n = len(cs)
    while n and field.is_zero(cs[n - 1]):
        n -= 1
    return list(cs[:n])


def degree(cs) -> int:
    return len(cs) - 1


def add(a, b, field):
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else field.zero
        y = b[i] if i < len(b) else field.zero
        out.append(field.add(x, y))
    return trim(out, field)


def sub(a, b, field):
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else field.zero
        y = b[i] if i < len(b) else field.zero
        out.append(field.sub(x, y))
    return trim(out, field)


def scale(a, c, field):
    if field.is_zero(c):
        return []
    return [field.mul(x, c) for x in a]


def mul(a, b, field):
    if not a or not b:
        return []
    out = [field.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if field.is_zero(x):
            continue
        for j, y in enumerate(b):
            out[i + j] = field.add(out[i + j], field.mul(x, y))
    return trim(out, field)


def divmod_poly(a, b, field):
    b = trim(b, field)
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    a = trim(a, field)
    inv_lead = field.inv(b[-1])
    q = [field.zero] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    while len(r) >= len(b):
        c = field.mul(r[-1], inv_lead)
        k = len(r) - len(b)
        q[k] = c
        for i, y in enumerate(b):
            r[k + i] = field.sub(r[k + i], field.mul(c, y))
        r = trim(r, field)
        if not r:
            break
    return trim(q, field), r


def mod(a, b, field):
    return divmod_poly(a, b, field)[1]


def monic(a, field):
    a = trim(a, field)
    if not a:
        return a
    return scale(a, field.inv(a[-1]), field)


def gcd(a, b, field):
    a, b = trim(a, field), trim(b, field)
    while b:
        a, b = b, mod(a, b, field)
    return monic(a, field)


def evaluate(a, x, field):
    acc = field.zero
    for c in reversed(a):
        acc = field.add(field.mul(acc, x), c)
    return acc


def eval_projective(a, deg: int, s, t, field):
    """Value of the degree-deg form with affine coefficients a at [s : t].

    Coefficient a[j] sits on the monomial s^j t^(deg-j), so [alpha : 1] gives
    the usual affine value and [1 : 0] picks out the top coefficient.
    """
    acc = field.zero
    spow = field.one
    tpows = [field.one]
    for _ in range(deg):
        tpows.append(field.mul(tpows[-1], t))
    for j in range(deg + 1):
        c = a[j] if j < len(a) else field.zero
        if not field.is_zero(c):
            acc = field.add(acc, field.mul(field.mul(c, spow), tpows[deg - j]))
        spow = field.mul(spow, s)
    return acc


def pow_mod(a, e: int, m, field):
    result = [field.one]
    base = mod(a, m, field)
    while e:
        if e & 1:
            result = mod(mul(result, base, field), m, field)
        base = mod(mul(base, base, field), m, field)
        e >>= 1
    return result


def x_order_power_mod(m, order: int, field):
    """x^order mod m, by square-and-multiply on the exponent."""
    return pow_mod([field.zero, field.one], order, m, field)


def is_irreducible(m, field: PrimeField) -> bool:
    """Irreducibility over F_p via the Frobenius criterion."""
    m = trim(m, field)
    k = degree(m)
    if k <= 0:
        return False
    if k == 1:
        return True
    x = [field.zero, field.one]
    # x^(p^k) == x mod m, and gcd(x^(p^(k/q)) - x, m) == 1 for prime q | k
    if sub(x_order_power_mod(m, field.p**k, field), x, field):
        return False
    kk = k
    primes = set()
    d = 2
    while d * d <= kk:
        while kk % d == 0:
            primes.add(d)
            kk //= d
        d += 1
    if kk > 1:
        primes.add(kk)
    for q in primes:
        g = gcd(sub(x_order_power_mod(m, field.p ** (k // q), field), x, field), m, field)
        if degree(g) != 0:
            return False
    return True


def _distinct_roots(g, field, rng: random.Random):
    """Distinct roots of g in the given field (Cantor-Zassenhaus splitting)."""
    g = monic(g, field)
    if degree(g) <= 0:
        return []
    x = [field.zero, field.one]
    h = gcd(sub(x_order_power_mod(g, field.order, field), x, field), g, field)
    roots = []
    stack = [h]
    while stack:
        f = stack.pop()
        d = degree(f)
        if d <= 0:
            continue
        if d == 1:
            roots.append(field.neg(f[0]))
            continue
        while True:
            c = field.rand(rng)
            trial = pow_mod([c, field.one], (field.order - 1) // 2, f, field)
            trial = sub(trial, [field.one], field)
            fac = gcd(trial, f, field)
            if 0 < degree(fac) < d:
                stack.append(fac)
                stack.append(divmod_poly(f, fac, field)[0])
                break
    return roots


def roots_with_multiplicity(g, field, rng: random.Random | None = None):
    """All roots of g in the field, as (root, multiplicity) pairs."""
    g = trim(g, field)
    if not g:
        raise ValueError("zero polynomial")
    if rng is None:
        rng = random.Random("roots:" + repr((getattr(field, "p", 0), field.order, tuple(map(repr, g)))))
    out = []
    for r in sorted(_distinct_roots(g, field, rng), key=repr):
        m = 0
        rem = g
        while True:
            q, s = divmod_poly(rem, [field.neg(r), field.one], field)
            if s:
                break
            m += 1
            rem = q
        out.append((r, m))
    return out


def roots_in_extensions(g, p: int, max_extension_degree: int):
    """Roots of g (coefficients: ints mod p) in F_{p^k}, k <= max_extension_degree.

    Returns (root, k, multiplicity) triples where k is the exact degree of the
    root over F_p and root is an element of field_for_degree(p, k).  Conjugate
    roots are all listed.
    """
    base = PrimeField(p)
    g = trim([c % p for c in g], base)
    if not g:
        raise ValueError("zero polynomial")
    found = []
    for k in range(1, max_extension_degree + 1):
        field = field_for_degree(p, k)
        gk = [field.embed(c) for c in g] if k > 1 else list(g)
        for r, m in roots_with_multiplicity(gk, field):
            if k == 1 or field.minimal_degree(r) == k:
                found.append((r, k, m))
    return found


def minimal_polynomial(r, field) -> list[int]:
    """Minimal polynomial over F_p of an extension element, coefficients as ints."""
    if isinstance(field, PrimeField):
        return [(-r) % field.p, 1]
    orbit = []
    cur = r
    while cur not in orbit:
        orbit.append(cur)
        cur = field.frobenius(cur)
    poly = [field.one]
    for root in orbit:
        poly = mul(poly, [field.neg(root), field.one], field)
    out = []
    for c in poly:
        if any(x != 0 for x in c[1:]):
            raise ArithmeticError("minimal polynomial has coefficients outside F_p")
        out.append(c[0])
    return out
