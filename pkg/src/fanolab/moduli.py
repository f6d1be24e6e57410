"""Chart models for the parameter spaces of lines and conics.

Lines live on G(2, n+1), conics on the rank-6 quadric bundle over G(3, n+1):
a conic chart point is a plane chart point together with six projectively
normalized quadric coefficients in the plane frame.  Enumeration walks the
reduced-row-echelon cells, so every subspace appears exactly once, emitted by
its lexicographically first valid pivot set.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from enum import Enum

from .errors import BudgetExceeded
from .fields import PrimeField
from .linalg import ExactMatrix, invert
from .multipoly import MultiPoly, linear_change, reduce_mod_quadric

# coefficient order for a quadric on the plane: u^2, uv, uw, v^2, vw, w^2
QUADRIC_MONOMIALS = ((2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2))


class ConicKind(Enum):
    SMOOTH_CONIC = "smooth"
    LINE_PAIR = "pair"
    DOUBLE_LINE = "double"


def quadric_poly(field: PrimeField, q) -> MultiPoly:
    return MultiPoly(field, 3, dict(zip(QUADRIC_MONOMIALS, q)))


def poly_to_quadric(f: MultiPoly):
    if not f.is_homogeneous(2):
        raise ValueError("not a quadric")
    return tuple(f.terms.get(m, 0) for m in QUADRIC_MONOMIALS)


def normalize_quadric(field: PrimeField, q):
    q = [c % field.p for c in q]
    for c in q:
        if c:
            inv = field.inv(c)
            return tuple(x * inv % field.p for x in q)
    raise ValueError("zero quadric")


def gram_matrix(field: PrimeField, q) -> ExactMatrix:
    """Symmetric matrix of the quadric, doubled to stay integral (odd char)."""
    a, b, c, d, e, f = (x % field.p for x in q)
    return ExactMatrix(
        field,
        [
            [2 * a % field.p, b, c],
            [b, 2 * d % field.p, e],
            [c, e, 2 * f % field.p],
        ],
    )


def classify_conic(field: PrimeField, q) -> ConicKind:
    if all(c % field.p == 0 for c in q):
        raise ValueError("zero quadric")
    r = gram_matrix(field, q).rank()
    return {3: ConicKind.SMOOTH_CONIC, 2: ConicKind.LINE_PAIR, 1: ConicKind.DOUBLE_LINE}[r]


@dataclass(frozen=True)
class LineChartPoint:
    n: int
    pivots: tuple[int, int]
    coords: tuple[tuple[int, ...], tuple[int, ...]]  # non-pivot entries, 2 x (n-1)

    def rows(self):
        """The 2 x (n+1) reduced basis of the spanning plane of the line."""
        i, j = self.pivots
        nonpivot = [c for c in range(self.n + 1) if c not in (i, j)]
        rows = []
        for r in range(2):
            row = [0] * (self.n + 1)
            row[(i, j)[r]] = 1
            for c, v in zip(nonpivot, self.coords[r]):
                row[c] = v
            rows.append(row)
        return rows

    def to_json(self):
        return {"n": self.n, "pivots": list(self.pivots), "coords": [list(r) for r in self.coords]}

    @classmethod
    def from_json(cls, data):
        return cls(data["n"], tuple(data["pivots"]), tuple(tuple(r) for r in data["coords"]))


@dataclass(frozen=True)
class ConicChartPoint:
    n: int
    pivots: tuple[int, int, int]
    plane_coords: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]  # 3 x (n-2)
    quadric: tuple[int, int, int, int, int, int]  # normalized, order QUADRIC_MONOMIALS

    def plane_rows(self):
        nonpivot = [c for c in range(self.n + 1) if c not in self.pivots]
        rows = []
        for r in range(3):
            row = [0] * (self.n + 1)
            row[self.pivots[r]] = 1
            for c, v in zip(nonpivot, self.plane_coords[r]):
                row[c] = v
            rows.append(row)
        return rows

    def kind(self, field: PrimeField) -> ConicKind:
        return classify_conic(field, self.quadric)

    def to_json(self):
        return {
            "n": self.n,
            "pivots": list(self.pivots),
            "plane_coords": [list(r) for r in self.plane_coords],
            "quadric": list(self.quadric),
        }

    @classmethod
    def from_json(cls, data):
        return cls(
            data["n"],
            tuple(data["pivots"]),
            tuple(tuple(r) for r in data["plane_coords"]),
            tuple(data["quadric"]),
        )


# ---------------------------------------------------------------------------
# section spaces on a conic
# ---------------------------------------------------------------------------

_NONISOTROPIC_TRIALS = (
    (0, 0, 1), (0, 1, 0), (1, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0), (1, 1, 1),
    (0, 1, 2), (1, 0, 2), (1, 2, 0), (2, 1, 0), (1, 1, 2), (1, 2, 1), (2, 1, 1), (1, 2, 2),
)


def _nonisotropic_point(field: PrimeField, qpoly: MultiPoly):
    for pt in _NONISOTROPIC_TRIALS:
        if not field.is_zero(qpoly.evaluate(pt)):
            return pt
    rng = random.Random(f"nonisotropic:{field.p}:{sorted(qpoly.terms.items())!r}")
    while True:
        pt = tuple(rng.randrange(field.p) for _ in range(3))
        if any(pt) and not field.is_zero(qpoly.evaluate(pt)):
            return pt


def _complete_to_basis(field: PrimeField, point):
    """Unimodular 3x3 matrix whose last column is `point` (first valid pair of axes)."""
    for a, b in ((0, 1), (0, 2), (1, 2)):
        other = 3 - a - b
        if point[other] % field.p:
            cols = [[0, 0, 0], [0, 0, 0], [0, 0, 0]]
            cols[0][a] = 1
            cols[1][b] = 1
            for i in range(3):
                cols[2][i] = point[i]
            return [[cols[j][i] for j in range(3)] for i in range(3)]  # rows of T
    raise ValueError("zero point")


class SectionBasis:
    """Normal forms for sections of O(d) on the conic {quadric = 0}.

    Internally changes plane coordinates so the quadric has a unit w^2
    coefficient; normal forms then carry w-exponent at most 1 and the
    monomials u^a v^b w^e with a+b+e = d, e <= 1 are a basis of dimension
    2d+1 for every conic kind.
    """

    def __init__(self, field: PrimeField, quadric):
        self.field = field
        self.quadric = normalize_quadric(field, quadric)
        qpoly = quadric_poly(field, self.quadric)
        point = _nonisotropic_point(field, qpoly)
        self.transform = _complete_to_basis(field, point)  # x = T * adapted
        self.inverse_transform = invert(ExactMatrix(field, self.transform)).rows
        adapted = linear_change(qpoly, self.transform)
        w2 = adapted.terms[(0, 0, 2)]
        self.adapted_quadric = adapted * field.inv(w2)

    def monomials(self, d: int):
        out = [(a, d - a, 0) for a in range(d, -1, -1)]
        out += [(a, d - 1 - a, 1) for a in range(d - 1, -1, -1)]
        return out

    def dim(self, d: int) -> int:
        return 2 * d + 1 if d >= 1 else 1

    def to_adapted(self, plane_form: MultiPoly) -> MultiPoly:
        return linear_change(plane_form, self.transform)

    def to_plane(self, adapted_form: MultiPoly) -> MultiPoly:
        return linear_change(adapted_form, self.inverse_transform)

    def reduce(self, adapted_form: MultiPoly) -> MultiPoly:
        return reduce_mod_quadric(adapted_form, self.adapted_quadric)[1]

    def reduce_with_quotient(self, adapted_form: MultiPoly):
        return reduce_mod_quadric(adapted_form, self.adapted_quadric)

    def restrict(self, plane_form: MultiPoly) -> MultiPoly:
        """Normal form of a plane form as a section on the conic."""
        return self.reduce(self.to_adapted(plane_form))

    def coords(self, nf: MultiPoly, d: int) -> list[int]:
        monoms = self.monomials(d)
        allowed = set(monoms)
        if any(m not in allowed for m in nf.terms):
            raise ValueError("form is not in normal form of the requested degree")
        return [nf.terms.get(m, 0) for m in monoms]

    def from_coords(self, coords, d: int) -> MultiPoly:
        return MultiPoly(self.field, 3, dict(zip(self.monomials(d), coords)))

    def multiply(self, nf1: MultiPoly, nf2: MultiPoly) -> MultiPoly:
        return self.reduce(nf1 * nf2)

    def adapted_point(self, plane_point):
        F = self.field
        return tuple(
            sum(self.inverse_transform[i][j] * plane_point[j] for j in range(3)) % F.p
            for i in range(3)
        )

    def plane_point(self, adapted_point):
        F = self.field
        return tuple(
            sum(self.transform[i][j] * adapted_point[j] for j in range(3)) % F.p for i in range(3)
        )


# ---------------------------------------------------------------------------
# structural section descriptions for the degenerate kinds
# ---------------------------------------------------------------------------


@dataclass
class LinePairStructure:
    """Sections on a line pair as glued pairs of P^1 sections.

    Branch b is parametrized by [s:t] -> s * direction_b + t * node, so the
    node sits at [0:1] on both branches and a section of O(d) corresponds to
    a pair (g1, g2) of degree-d coefficient vectors with g1[0] == g2[0].
    """

    field: object  # PrimeField or ExtensionField when the branches are conjugate
    node: tuple
    directions: tuple
    linear_factors: tuple

    def pair_dim(self, d: int) -> int:
        return 2 * (d + 1) - 1


@dataclass
class DoubleLineStructure:
    """Sections on a double line as s1 + t*s2 with t^2 = 0.

    In the adapted frame (columns: two points of the reduced line, then a
    point off it) the quadric becomes w^2; the w^0 part of a normal form is
    s1 (degree d) and the w^1 part is s2 (degree d-1).
    """

    field: PrimeField
    transform: list  # x = U * adapted, reduced line = {w = 0}
    inverse_transform: list
    line_form: tuple  # the repeated linear factor

    def split(self, nf_in_adapted: MultiPoly, d: int):
        s1 = [0] * (d + 1)
        s2 = [0] * d if d >= 1 else []
        for (a, b, e), c in nf_in_adapted.terms.items():
            if e == 0:
                s1[a] = c
            elif e == 1:
                s2[a] = c
            else:
                raise ValueError("not a normal form")
        return s1, s2

    def join(self, s1, s2, d: int) -> MultiPoly:
        terms = {}
        for a, c in enumerate(s1):
            if c:
                terms[(a, d - a, 0)] = c
        for a, c in enumerate(s2):
            if c:
                terms[(a, d - 1 - a, 1)] = c
        return MultiPoly(self.field, 3, terms)


class LinePairSplitError(ValueError):
    """Raised when a rank-2 quadric does not factor over the base field."""


def split_line_pair(field: PrimeField, q, allow_extension=True):
    """Factor a rank-2 quadric into two lines through its node.

    Returns (split_field, node, branch directions, linear factors); everything
    is expressed over split_field, which is F_p when the pair is split and
    F_{p^2} when the branches are conjugate.
    """
    from .fields import ExtensionField

    G = gram_matrix(field, q)
    ker = G.kernel_basis()
    if len(ker) != 1:
        raise ValueError("not a rank-2 quadric")
    node = tuple(ker[0])
    p1, p2 = _complete_pair(field, node)
    qpoly = quadric_poly(field, normalize_quadric(field, q))
    A = qpoly.evaluate(p1)
    C = qpoly.evaluate(p2)
    both = tuple((a + b) % field.p for a, b in zip(p1, p2))
    B = (qpoly.evaluate(both) - A - C) % field.p
    # roots (s : t) of the nondegenerate binary form A s^2 + B s t + C t^2;
    # rank 2 forces its discriminant to be nonzero
    if A == 0:
        root_pairs = [(1, 0), ((-C) % field.p, B)]
        split_field = field
    else:
        disc = (B * B - 4 * A * C) % field.p
        s = field.sqrt(disc)
        if s is not None:
            split_field = field
            inv2A = field.inv(2 * A % field.p)
            root_pairs = [((s - B) * inv2A % field.p, 1), ((-s - B) * inv2A % field.p, 1)]
        else:
            if not allow_extension:
                raise LinePairSplitError("conjugate branches need a quadratic extension")
            split_field = ExtensionField(field.p, 2)
            sd = _ext_sqrt(split_field, split_field.embed(disc))
            inv2A = split_field.inv(split_field.embed(2 * A % field.p))
            r1 = split_field.mul(split_field.sub(sd, split_field.embed(B)), inv2A)
            r2 = split_field.mul(split_field.sub(split_field.neg(sd), split_field.embed(B)), inv2A)
            root_pairs = [(r1, split_field.one), (r2, split_field.one)]
    SF = split_field

    def lift(x):
        return SF.embed(x) if isinstance(x, int) else x

    dirs = []
    for alpha, beta in root_pairs:
        alpha, beta = lift(alpha), lift(beta)
        dirs.append(
            tuple(SF.add(SF.mul(lift(p1[i]), alpha), SF.mul(lift(p2[i]), beta)) for i in range(3))
        )
    node_sf = tuple(lift(c) for c in node)
    factors = tuple(_dual_form(SF, node_sf, d) for d in dirs)
    _check_pair_factorization(field, SF, q, factors)
    return split_field, node_sf, tuple(dirs), factors


def _check_pair_factorization(field, SF, q, factors):
    l1, l2 = factors
    prod = (
        SF.mul(l1[0], l2[0]),
        SF.add(SF.mul(l1[0], l2[1]), SF.mul(l1[1], l2[0])),
        SF.add(SF.mul(l1[0], l2[2]), SF.mul(l1[2], l2[0])),
        SF.mul(l1[1], l2[1]),
        SF.add(SF.mul(l1[1], l2[2]), SF.mul(l1[2], l2[1])),
        SF.mul(l1[2], l2[2]),
    )
    qe = [SF.embed(c) if isinstance(c, int) else c for c in normalize_quadric(field, q)]
    scale = None
    for a, b in zip(prod, qe):
        if not SF.is_zero(b):
            scale = SF.div(a, b)
            break
    ok = scale is not None and not SF.is_zero(scale)
    if ok:
        for a, b in zip(prod, qe):
            if SF.sub(a, SF.mul(scale, b)) != SF.zero:
                ok = False
                break
    if not ok:
        raise AssertionError("line pair factorization failed to reproduce the quadric")


def _ext_sqrt(E, a):
    """Square root in F_{p^2} by exponentiation (order is p^2, odd)."""
    # a^((q+1)/2) squares to a^(q+1); a^q = a for base-field elements embedded,
    # and every base-field element is a square in F_{p^2}
    r = E.pow(a, (E.order + 1) // 4) if E.order % 4 == 3 else None
    if r is not None and E.mul(r, r) == a:
        return r
    # Tonelli-Shanks over the extension
    q, s = E.order - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    rng = random.Random(f"extsqrt:{E.p}:{E.degree}:{a!r}")
    while True:
        z = E.rand(rng)
        if E.is_zero(z):
            continue
        if E.pow(z, (E.order - 1) // 2) != E.one:
            break
    m, c, t, r = s, E.pow(z, q), E.pow(a, q), E.pow(a, (q + 1) // 2)
    while t != E.one:
        t2, i = t, 0
        while t2 != E.one:
            t2 = E.mul(t2, t2)
            i += 1
        b = c
        for _ in range(m - i - 1):
            b = E.mul(b, b)
        m, c = i, E.mul(b, b)
        t, r = E.mul(t, c), E.mul(r, b)
    return r


def _complete_pair(field: PrimeField, node):
    """Two standard basis vectors completing `node` to a basis of the plane."""
    for a, b in ((0, 1), (0, 2), (1, 2)):
        other = 3 - a - b
        if node[other] % field.p:
            e1 = tuple(1 if i == a else 0 for i in range(3))
            e2 = tuple(1 if i == b else 0 for i in range(3))
            return e1, e2
    raise ValueError("zero node")


def _dual_form(field, point_a, point_b):
    """Linear form vanishing on two independent points (cross product)."""
    x = field.sub(field.mul(point_a[1], point_b[2]), field.mul(point_a[2], point_b[1]))
    y = field.sub(field.mul(point_a[2], point_b[0]), field.mul(point_a[0], point_b[2]))
    z = field.sub(field.mul(point_a[0], point_b[1]), field.mul(point_a[1], point_b[0]))
    return (x, y, z)


def double_line_structure(field: PrimeField, q) -> DoubleLineStructure:
    qn = normalize_quadric(field, q)
    G = gram_matrix(field, qn)
    rows = [r for r in G.rows if any(c % field.p for c in r)]
    if G.rank() != 1:
        raise ValueError("not a double line")
    line = tuple(c % field.p for c in rows[0])
    # normalize leading coefficient of the repeated factor
    for c in line:
        if c:
            inv = field.inv(c)
            line = tuple(x * inv % field.p for x in line)
            break
    # reduced line = kernel of the functional `line`
    ker = ExactMatrix(field, [list(line)]).kernel_basis()
    r1, r2 = (tuple(v) for v in ker)
    off = next(pt for pt in _NONISOTROPIC_TRIALS if sum(a * b for a, b in zip(line, pt)) % field.p)
    U = [[r1[i], r2[i], off[i]] for i in range(3)]
    Uinv = invert(ExactMatrix(field, U)).rows
    # sanity: the quadric becomes a multiple of w^2 in the adapted frame
    adapted = linear_change(quadric_poly(field, qn), U)
    if set(adapted.terms) != {(0, 0, 2)}:
        raise AssertionError("double line did not reduce to w^2")
    return DoubleLineStructure(field, U, Uinv, line)


def line_pair_structure(field: PrimeField, q) -> LinePairStructure:
    split_field, node, dirs, factors = split_line_pair(field, q)
    return LinePairStructure(split_field, node, dirs, factors)


def dual_section_bases(field: PrimeField, q):
    """Structural section description for a degenerate conic.

    Line pairs get the glued-pair model, double lines the s1 + t*s2 model;
    calling this on a smooth conic is an error.
    """
    kind = classify_conic(field, q)
    if kind is ConicKind.SMOOTH_CONIC:
        raise ValueError("dual section bases exist only for degenerate conics")
    if kind is ConicKind.LINE_PAIR:
        return line_pair_structure(field, q)
    return double_line_structure(field, q)


# ---------------------------------------------------------------------------
# chart enumeration
# ---------------------------------------------------------------------------


def gaussian_binomial(m: int, k: int, q: int) -> int:
    num = den = 1
    for i in range(k):
        num *= q ** (m - i) - 1
        den *= q ** (i + 1) - 1
    assert num % den == 0
    return num // den


def rref_cells(k: int, m: int):
    """(pivots, free positions) for each Schubert cell of k-subspaces of F^m."""
    for pivots in itertools.combinations(range(m), k):
        free = []
        for r in range(k):
            for c in range(pivots[r] + 1, m):
                if c not in pivots:
                    free.append((r, c))
        yield pivots, free


def _cell_points(field, k, m, pivots, free):
    nonpivot = [c for c in range(m) if c not in pivots]
    col_slot = {c: idx for idx, c in enumerate(nonpivot)}
    for values in itertools.product(range(field.p), repeat=len(free)):
        coords = [[0] * len(nonpivot) for _ in range(k)]
        for (r, c), v in zip(free, values):
            coords[r][col_slot[c]] = v
        yield pivots, tuple(tuple(row) for row in coords)


def count_lines(n: int, q: int) -> int:
    return gaussian_binomial(n + 1, 2, q)


def count_planes(n: int, q: int) -> int:
    return gaussian_binomial(n + 1, 3, q)


def count_conics(n: int, q: int) -> int:
    return count_planes(n, q) * ((q**6 - 1) // (q - 1))


def enumerate_line_charts(field: PrimeField, n: int, budget: int | None = None):
    total = count_lines(n, field.p)
    if budget is not None and total > budget:
        raise BudgetExceeded(f"{total} lines exceeds budget {budget}")
    for pivots, free in rref_cells(2, n + 1):
        for piv, coords in _cell_points(field, 2, n + 1, pivots, free):
            yield LineChartPoint(n, piv, coords)


def enumerate_plane_charts(field: PrimeField, n: int, budget: int | None = None):
    total = count_planes(n, field.p)
    if budget is not None and total > budget:
        raise BudgetExceeded(f"{total} planes exceeds budget {budget}")
    for pivots, free in rref_cells(3, n + 1):
        for piv, coords in _cell_points(field, 3, n + 1, pivots, free):
            yield piv, coords


def normalized_quadrics(field: PrimeField):
    """All nonzero quadrics on the plane with first nonzero coefficient 1."""
    p = field.p
    for lead in range(6):
        for tail in itertools.product(range(p), repeat=5 - lead):
            yield (0,) * lead + (1,) + tail


def enumerate_conic_charts(field: PrimeField, n: int, budget: int | None = None):
    total = count_conics(n, field.p)
    if budget is not None and total > budget:
        raise BudgetExceeded(f"{total} conics exceeds budget {budget}")
    quadrics = list(normalized_quadrics(field))
    for pivots, coords in enumerate_plane_charts(field, n):
        for q in quadrics:
            yield ConicChartPoint(n, pivots, coords, q)
