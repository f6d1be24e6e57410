"""Prime fields and their small extensions, with exact arithmetic.

Elements of F_p are plain ints in [0, p); elements of F_{p^k} are tuples of
k ints (coefficients of the residue class modulo a fixed irreducible, lowest
degree first).  Both field classes expose the same method protocol (zero,
one, add, sub, mul, neg, inv, ...) so linear algebra and univariate
polynomial code can run over either.

Characteristic 2 is rejected everywhere: conic classification via symmetric
Gram matrices needs 2 to be invertible.
"""

from __future__ import annotations

import random
from typing import Iterator


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    # deterministic Miller-Rabin, valid far beyond the desk-scale moduli used here
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class PrimeField:
    """F_p for an odd prime p.  Elements are ints reduced into [0, p)."""

    degree = 1

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if p == 2:
            raise ValueError("characteristic 2 is not supported")
        self.p = p
        self.order = p

    def __repr__(self):
        return f"PrimeField({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1

    def embed(self, a: int) -> int:
        return a % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return -a % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(a, self.p - 2, self.p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e: int):
        if e < 0:
            return pow(self.inv(a), -e, self.p)
        return pow(a, e, self.p)

    def is_zero(self, a) -> bool:
        return a % self.p == 0

    def frobenius(self, a):
        return a

    def elements(self) -> Iterator[int]:
        return iter(range(self.p))

    def rand(self, rng: random.Random):
        return rng.randrange(self.p)

    def sqrt(self, a):
        """A square root of a in F_p, or None if a is a non-residue (Tonelli-Shanks)."""
        p = self.p
        a %= p
        if a == 0:
            return 0
        if pow(a, (p - 1) // 2, p) != 1:
            return None
        if p % 4 == 3:
            return pow(a, (p + 1) // 4, p)
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while pow(z, (p - 1) // 2, p) != p - 1:
            z += 1
        m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
        while t != 1:
            t2, i = t, 0
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t, r = t * c % p, r * b % p
        return r


_MODULUS_CACHE: dict[tuple[int, int], tuple[int, ...]] = {}


def irreducible_modulus(p: int, k: int) -> tuple[int, ...]:
    """The fixed degree-k irreducible over F_p used for F_{p^k}.

    First monic irreducible in lexicographic order of the low coefficient
    tuple, so every run of every build picks the same modulus.
    """
    key = (p, k)
    if key in _MODULUS_CACHE:
        return _MODULUS_CACHE[key]
    base = PrimeField(p)
    from . import unipoly

    for lowidx in range(p**k):
        low = []
        rem = lowidx
        for _ in range(k):
            low.append(rem % p)
            rem //= p
        mod = low + [1]
        if unipoly.is_irreducible(mod, base):
            result = tuple(mod)
            _MODULUS_CACHE[key] = result
            return result
    raise RuntimeError("no irreducible polynomial found")  # unreachable


class ExtensionField:
    """F_{p^k} = F_p[y]/(m(y)) with the tabulated modulus for (p, k).

    Elements are k-tuples of ints, coefficients of 1, y, ..., y^(k-1).
    """

    def __init__(self, p: int, k: int, modulus: tuple[int, ...] | None = None):
        if k < 2:
            raise ValueError("use PrimeField for degree 1")
        self.base = PrimeField(p)
        self.p = p
        self.degree = k
        self.order = p**k
        self.modulus = tuple(modulus) if modulus is not None else irreducible_modulus(p, k)
        if len(self.modulus) != k + 1 or self.modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree k")
        self.zero = (0,) * k
        self.one = (1,) + (0,) * (k - 1)
        # y^d mod m for the overflow degrees d = k .. 2k-2
        self._reductions: dict[int, tuple[int, ...]] = {}
        cur = [(-c) % p for c in self.modulus[:-1]]
        self._reductions[k] = tuple(cur)
        for d in range(k + 1, 2 * k - 1):
            cur = [0] + cur
            lead = cur.pop()
            if lead:
                red = self._reductions[k]
                cur = [(c + lead * r) % p for c, r in zip(cur, red)]
            self._reductions[d] = tuple(cur)

    def __repr__(self):
        return f"ExtensionField({self.p}, {self.degree})"

    def __eq__(self, other):
        return (
            isinstance(other, ExtensionField)
            and other.p == self.p
            and other.degree == self.degree
            and other.modulus == self.modulus
        )

    def __hash__(self):
        return hash(("ExtensionField", self.p, self.degree, self.modulus))

    def embed(self, a: int) -> tuple:
        return (a % self.p,) + (0,) * (self.degree - 1)

    def lift(self, a) -> tuple:
        """Embed an element of the base field (or an int) into this field."""
        if isinstance(a, int):
            return self.embed(a)
        return a

    def add(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def sub(self, a, b):
        p = self.p
        return tuple((x - y) % p for x, y in zip(a, b))

    def neg(self, a):
        p = self.p
        return tuple(-x % p for x in a)

    def mul(self, a, b):
        p, k = self.p, self.degree
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        for d in range(2 * k - 2, k - 1, -1):
            c = prod[d] % p
            prod[d] = 0
            if c:
                red = self._reductions[d]
                for j in range(k):
                    prod[j] += c * red[j]
        return tuple(c % p for c in prod[:k])

    def inv(self, a):
        if all(c == 0 for c in a):
            raise ZeroDivisionError("inverse of 0")
        return self.pow(a, self.order - 2)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e: int):
        if e < 0:
            return self.pow(self.inv(a), -e)
        result = self.one
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def is_zero(self, a) -> bool:
        return all(c == 0 for c in a)

    def frobenius(self, a):
        return self.pow(a, self.p)

    def minimal_degree(self, a) -> int:
        """Smallest j dividing k with a fixed by the j-th Frobenius power."""
        for j in range(1, self.degree + 1):
            if self.degree % j == 0 and self.pow(a, self.p**j) == a:
                return j
        return self.degree

    def elements(self) -> Iterator[tuple]:
        k, p = self.degree, self.p
        for idx in range(self.order):
            coeffs = []
            rem = idx
            for _ in range(k):
                coeffs.append(rem % p)
                rem //= p
            yield tuple(coeffs)

    def rand(self, rng: random.Random):
        return tuple(rng.randrange(self.p) for _ in range(self.degree))


def field_for_degree(p: int, k: int):
    return PrimeField(p) if k == 1 else ExtensionField(p, k)
