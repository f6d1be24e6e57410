import random

import pytest

from fanolab.fields import ExtensionField, PrimeField, field_for_degree, irreducible_modulus, is_prime
from fanolab import unipoly


def test_prime_validation():
    with pytest.raises(ValueError):
        PrimeField(6)
    with pytest.raises(ValueError):
        PrimeField(2)
    assert PrimeField(32003).p == 32003


def test_prime_field_arithmetic():
    F = PrimeField(7)
    assert F.add(5, 4) == 2
    assert F.mul(3, 5) == 1
    assert F.inv(3) == 5
    assert F.neg(0) == 0
    with pytest.raises(ZeroDivisionError):
        F.inv(0)


def test_inverse_property_random():
    rng = random.Random(0)
    for p in (3, 5, 7, 32003):
        F = PrimeField(p)
        for _ in range(50):
            a = rng.randrange(1, p)
            assert F.mul(a, F.inv(a)) == 1


@pytest.mark.parametrize("p", [7, 13, 32003])
def test_sqrt(p):
    F = PrimeField(p)
    rng = random.Random(p)
    found = 0
    for _ in range(40):
        a = rng.randrange(p)
        r = F.sqrt(a)
        if r is not None:
            assert F.mul(r, r) == a % p
            found += 1
    assert found > 0


def test_modulus_is_deterministic_and_irreducible():
    m1 = irreducible_modulus(3, 2)
    m2 = irreducible_modulus(3, 2)
    assert m1 == m2 == (1, 0, 1)  # x^2 + 1, the first irreducible over F_3
    base = PrimeField(5)
    for k in (2, 3, 4):
        assert unipoly.is_irreducible(list(irreducible_modulus(5, k)), base)


@pytest.mark.parametrize("p,k", [(3, 2), (3, 3), (5, 2), (7, 4)])
def test_extension_field_axioms(p, k):
    E = ExtensionField(p, k)
    rng = random.Random(f"{p}:{k}")
    for _ in range(30):
        a, b = E.rand(rng), E.rand(rng)
        assert E.mul(a, b) == E.mul(b, a)
        if not E.is_zero(a):
            assert E.mul(a, E.inv(a)) == E.one
            assert E.pow(a, E.order - 1) == E.one
        # frobenius is additive and multiplicative
        assert E.frobenius(E.add(a, b)) == E.add(E.frobenius(a), E.frobenius(b))
        assert E.frobenius(E.mul(a, b)) == E.mul(E.frobenius(a), E.frobenius(b))


def test_frobenius_order_and_minimal_degree():
    E = ExtensionField(3, 4)
    for a in [E.embed(2), (1, 2, 0, 1), (0, 1, 0, 0)]:
        cur = a
        for _ in range(4):
            cur = E.frobenius(cur)
        assert cur == a
    assert E.minimal_degree(E.embed(2)) == 1
    # a generator-level element of F_81 should have degree 4 or 2
    assert E.minimal_degree((0, 1, 0, 0)) in (2, 4)


def test_field_for_degree():
    assert isinstance(field_for_degree(5, 1), PrimeField)
    assert isinstance(field_for_degree(5, 3), ExtensionField)


def test_is_prime_small():
    assert [n for n in range(2, 30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
