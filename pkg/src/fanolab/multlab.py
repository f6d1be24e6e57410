"""Multiplication maps on degree-2 curves and their hyperplane-preimage dichotomy.

Seven map kinds: multiplication by sections of O(1) on a line, by O(2)/O(4)
on a smooth conic, and by O(1)/O(2) on a nodal pair of lines and on a double
line.  For a hyperplane functional a on the target, the preimage of the
hyperplane inside the source either has full expected codimension (equal to
the multiplier-space dimension) or the preimage's basis drops rank at a
certified point of the curve.  The exhaustive scan checks that no functional
over F_q escapes both branches.

Coordinate conventions:
  line / smooth-conic sections of degree D: coefficients of 1, x, ..., x^D
    (index j is the coefficient of s^j t^(D-j));
  nodal curve: (node value, branch-1 coefficients of x..x^D, branch-2 same),
    the node sitting at [0:1] on both branches;
  double line: (s1 coefficients 0..D, s2 coefficients 0..D-1) for s1 + t*s2
    with t^2 = 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from enum import Enum

from . import unipoly
from .errors import BudgetExceeded
from .fields import PrimeField, field_for_degree
from .linalg import ExactMatrix, rank_mod_p


class MultMapKind(Enum):
    LINE_M = "line-m"
    SMOOTH_M2 = "smooth-m2"
    SMOOTH_M4 = "smooth-m4"
    NODAL_M1 = "nodal-m1"
    NODAL_M2 = "nodal-m2"
    DOUBLE_M1 = "double-m1"
    DOUBLE_M2 = "double-m2"

    @property
    def family(self) -> str:
        return {"line-m": "p1", "smooth-m2": "p1", "smooth-m4": "p1",
                "nodal-m1": "nodal", "nodal-m2": "nodal",
                "double-m1": "double", "double-m2": "double"}[self.value]

    @property
    def multiplier_degree(self) -> int:
        return {"line-m": 1, "smooth-m2": 2, "smooth-m4": 4,
                "nodal-m1": 1, "nodal-m2": 2, "double-m1": 1, "double-m2": 2}[self.value]

    @property
    def degree_scale(self) -> int:
        # smooth-conic kinds see the curve as P^1 with O(1) of degree 2
        return 2 if self.value in ("smooth-m2", "smooth-m4") else 1

    @property
    def multiplier_dim(self) -> int:
        m = self.multiplier_degree
        return m + 1 if self.family == "p1" else 2 * m + 1

    @property
    def expected_codim(self) -> int:
        return self.multiplier_dim


KIND_BY_NAME = {k.value: k for k in MultMapKind}


# ---------------------------------------------------------------------------
# curve section models
# ---------------------------------------------------------------------------


class P1Model:
    family = "p1"

    @staticmethod
    def dim(delta: int) -> int:
        return delta + 1

    @staticmethod
    def mult(da, ca, db, cb, p: int):
        out = [0] * (da + db + 1)
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    out[i + j] = (out[i + j] + x * y) % p
        return out

    @staticmethod
    def points(fieldobj, extra=()):
        for alpha in fieldobj.elements():
            yield ("p1", (alpha, fieldobj.one))
        yield ("p1", (fieldobj.one, fieldobj.zero))

    @staticmethod
    def eval_section(delta, coords, point, fieldobj):
        _, (s, t) = point
        lifted = [fieldobj.embed(c) if isinstance(c, int) else c for c in coords]
        return unipoly.eval_projective(lifted, delta, s, t, fieldobj)


class NodalModel:
    family = "nodal"

    @staticmethod
    def dim(delta: int) -> int:
        return 2 * delta + 1

    @staticmethod
    def split(delta, coords):
        node = coords[0]
        b1 = [node] + list(coords[1 : 1 + delta])
        b2 = [node] + list(coords[1 + delta : 1 + 2 * delta])
        return b1, b2

    @classmethod
    def mult(cls, da, ca, db, cb, p: int):
        a1, a2 = cls.split(da, ca)
        b1, b2 = cls.split(db, cb)
        c1 = P1Model.mult(da, a1, db, b1, p)
        c2 = P1Model.mult(da, a2, db, b2, p)
        assert c1[0] == c2[0]
        return [c1[0]] + c1[1:] + c2[1:]

    @staticmethod
    def points(fieldobj, extra=()):
        # the node [0:1] is shared; emit it once, on branch 1
        for alpha in fieldobj.elements():
            yield ("b1", (alpha, fieldobj.one))
        yield ("b1", (fieldobj.one, fieldobj.zero))
        for alpha in fieldobj.elements():
            if not fieldobj.is_zero(alpha):
                yield ("b2", (alpha, fieldobj.one))
        yield ("b2", (fieldobj.one, fieldobj.zero))

    @classmethod
    def eval_section(cls, delta, coords, point, fieldobj):
        branch, (s, t) = point
        b1, b2 = cls.split(delta, coords)
        use = b1 if branch in ("b1", "node", "p1") else b2
        lifted = [fieldobj.embed(c) if isinstance(c, int) else c for c in use]
        return unipoly.eval_projective(lifted, delta, s, t, fieldobj)


class DoubleModel:
    family = "double"

    @staticmethod
    def dim(delta: int) -> int:
        return 2 * delta + 1

    @staticmethod
    def split(delta, coords):
        return list(coords[: delta + 1]), list(coords[delta + 1 :])

    @classmethod
    def mult(cls, da, ca, db, cb, p: int):
        a1, a2 = cls.split(da, ca)
        b1, b2 = cls.split(db, cb)
        s1 = P1Model.mult(da, a1, db, b1, p)
        cross1 = P1Model.mult(da - 1 if da else 0, a2, db, b1, p) if a2 else [0] * (da + db)
        cross2 = P1Model.mult(da, a1, db - 1 if db else 0, b2, p) if b2 else [0] * (da + db)
        s2 = [0] * (da + db)
        for i, v in enumerate(cross1):
            s2[i] = (s2[i] + v) % p
        for i, v in enumerate(cross2):
            s2[i] = (s2[i] + v) % p
        return s1 + s2

    @staticmethod
    def points(fieldobj, extra=()):
        for alpha in fieldobj.elements():
            yield ("line", (alpha, fieldobj.one))
        yield ("line", (fieldobj.one, fieldobj.zero))

    @classmethod
    def eval_section(cls, delta, coords, point, fieldobj):
        # closed points of the double line are points of the reduced line,
        # where only the s1 part survives
        _, (s, t) = point
        s1, _ = cls.split(delta, coords)
        lifted = [fieldobj.embed(c) if isinstance(c, int) else c for c in s1]
        return unipoly.eval_projective(lifted, delta, s, t, fieldobj)


MODELS = {"p1": P1Model, "nodal": NodalModel, "double": DoubleModel}


def model_for(kind: MultMapKind):
    return MODELS[kind.family]


def kind_degrees(kind: MultMapKind, degrees):
    """(target degrees D_i, source degrees D_i - m) in the kind's own grading."""
    m = kind.multiplier_degree
    targets = [kind.degree_scale * d for d in degrees]
    sources = [D - m for D in targets]
    if any(s < 0 for s in sources):
        raise ValueError(f"degrees {tuple(degrees)} too small for {kind.value}")
    return targets, sources


def functional_layout(kind: MultMapKind, degrees):
    model = model_for(kind)
    targets, _ = kind_degrees(kind, degrees)
    return [model.dim(D) for D in targets]


def source_layout(kind: MultMapKind, degrees):
    model = model_for(kind)
    _, sources = kind_degrees(kind, degrees)
    return [model.dim(s) for s in sources]


def random_functional(kind: MultMapKind, degrees, field: PrimeField, rng):
    dims = functional_layout(kind, degrees)
    while True:
        a = tuple(tuple(rng.randrange(field.p) for _ in range(d)) for d in dims)
        if any(any(block) for block in a):
            return a


def build_stacked_functionals(kind: MultMapKind, degrees, a, field: PrimeField) -> ExactMatrix:
    """Matrix whose row r is the functional f -> a(g_r * f) on the source space."""
    model = model_for(kind)
    m = kind.multiplier_degree
    targets, sources = kind_degrees(kind, degrees)
    dims_t = [model.dim(D) for D in targets]
    if [len(block) for block in a] != dims_t:
        raise ValueError("functional does not match the target layout")
    k = model.dim(m)
    rows = []
    for r in range(k):
        g = [0] * k
        g[r] = 1
        row = []
        for i, (D, s) in enumerate(zip(targets, sources)):
            sdim = model.dim(s)
            for beta in range(sdim):
                e = [0] * sdim
                e[beta] = 1
                prod = model.mult(m, g, s, e, field.p)
                row.append(sum(ai * pi for ai, pi in zip(a[i], prod)) % field.p)
        rows.append(row)
    return ExactMatrix(field, rows)


def preimage_codim(kind: MultMapKind, degrees, a, field: PrimeField) -> int:
    return build_stacked_functionals(kind, degrees, a, field).rank()


# ---------------------------------------------------------------------------
# witnesses
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    point: tuple  # (tag, (s, t)) with coordinates in F_{p^ext}
    ext_degree: int
    multiplicity: int

    def to_json(self):
        return {"point": [self.point[0], [repr(c) for c in self.point[1]]],
                "ext_degree": self.ext_degree, "multiplicity": self.multiplicity}


class Verdict(Enum):
    FULL_CODIM = "full-codim"
    WITNESSED_DROP = "witnessed-drop"
    COUNTEREXAMPLE = "counterexample"


@dataclass
class DichotomyReport:
    kind: MultMapKind
    degrees: tuple
    actual_codim: int
    expected_codim: int
    witnesses: list
    verdict: Verdict


def _kernel_sections(kind, degrees, a, field, matrix=None):
    model = model_for(kind)
    _, sources = kind_degrees(kind, degrees)
    dims_s = [model.dim(s) for s in sources]
    M = matrix if matrix is not None else build_stacked_functionals(kind, degrees, a, field)
    kernel = M.kernel_basis()
    sections = []
    for vec in kernel:
        parts = []
        off = 0
        for d in dims_s:
            parts.append(vec[off : off + d])
            off += d
        sections.append(parts)
    return M, kernel, sections


def _certify(kind, degrees, sections, point, fieldobj, c: int) -> bool:
    """True when the kernel-basis evaluation matrix at the point has rank < c."""
    model = model_for(kind)
    _, sources = kind_degrees(kind, degrees)
    if not sections:
        return True  # empty basis: the zero matrix has rank 0 < c
    rows = []
    for parts in sections:
        rows.append([model.eval_section(s, part, point, fieldobj) for s, part in zip(sources, parts)])
    return ExactMatrix(fieldobj, rows).rank() < c


def _candidate_points(kind, degrees, dependencies, field, max_ext):
    """Candidate witness points read off the shift-recurrence of a row dependence."""
    model = model_for(kind)
    m = kind.multiplier_degree
    cands = []  # (tag, (s, t) over ext field, ext_degree, multiplicity)

    def from_char_poly(lams, tag):
        chi = unipoly.trim(list(lams), field)
        if not chi:
            return
        for root, kdeg, mult in unipoly.roots_in_extensions(chi, field.p, max_ext):
            E = field_for_degree(field.p, kdeg)
            pt = (root, E.one) if kdeg > 1 else (root, 1)
            cands.append((tag, pt, kdeg, mult))
        deficit = m - unipoly.degree(chi)
        if deficit > 0:
            cands.append((tag, (field.one, field.zero), 1, deficit))

    for lam in dependencies:
        if kind.family == "p1":
            from_char_poly(lam, "p1")
        elif kind.family == "nodal":
            lam_node = lam[0]
            lam_b1 = lam[1 : 1 + m]
            lam_b2 = lam[1 + m : 1 + 2 * m]
            from_char_poly([lam_node] + list(lam_b1), "b1")
            from_char_poly([lam_node] + list(lam_b2), "b2")
            cands.append(("b1", (field.zero, field.one), 1, 1))  # the node
        else:  # double
            lam_s = lam[: m + 1]
            from_char_poly(lam_s, "line")
    return cands


def _branch_components(kind, sources, parts):
    """Per-branch affine coefficient lists of one kernel element's components."""
    if kind.family == "p1":
        return {"p1": [list(c) for c in parts]}
    if kind.family == "nodal":
        out = {"b1": [], "b2": []}
        for s, coords in zip(sources, parts):
            b1, b2 = NodalModel.split(s, coords)
            out["b1"].append(b1)
            out["b2"].append(b2)
        return out
    out = {"line": []}
    for s, coords in zip(sources, parts):
        s1, _ = DoubleModel.split(s, coords)
        out["line"].append(s1)
    return out


def _poly_det(rows, field):
    """Determinant of a small square matrix of univariate polynomials."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return unipoly.sub(
            unipoly.mul(rows[0][0], rows[1][1], field),
            unipoly.mul(rows[0][1], rows[1][0], field),
            field,
        )
    acc = []
    for j in range(n):
        minor = [[r[jj] for jj in range(n) if jj != j] for r in rows[1:]]
        term = unipoly.mul(rows[0][j], _poly_det(minor, field), field)
        acc = unipoly.add(acc, term, field) if j % 2 == 0 else unipoly.sub(acc, term, field)
    return acc


def _drop_locus_candidates(kind, degrees, sections, field, cap=None):
    """Exact rank-drop locus of the kernel sections: roots of the per-branch
    gcd of all c x c minors.  Complete: a drop point in the algebraic closure
    is a root of that gcd, so every witness lives in extension degree at most
    deg(gcd)."""
    _, sources = kind_degrees(kind, degrees)
    c = len(degrees)
    per_branch: dict[str, list] = {}
    for parts in sections:
        for tag, comps in _branch_components(kind, sources, parts).items():
            per_branch.setdefault(tag, []).append(comps)
    cands = []
    for tag, rows in per_branch.items():
        minors = []
        if len(rows) >= c:
            for combo in itertools.combinations(range(len(rows)), c):
                det = _poly_det([rows[i] for i in combo], field)
                minors.append(unipoly.trim(det, field))
        live = [mnr for mnr in minors if mnr]
        if not live:
            # rank < c along the whole branch: any point of it certifies
            cands.append((tag, (field.zero, field.one), 1, 1))
            cands.append((tag, (field.one, field.zero), 1, 1))
            continue
        g = live[0]
        for mnr in live[1:]:
            g = unipoly.gcd(g, mnr, field)
            if unipoly.degree(g) == 0:
                break
        gdeg = unipoly.degree(g)
        if gdeg > 0:
            bound = gdeg if cap is None else min(gdeg, cap)
            for root, kdeg, mult in unipoly.roots_in_extensions(g, field.p, bound):
                E = field_for_degree(field.p, kdeg)
                pt = (root, E.one) if kdeg > 1 else (root, 1)
                cands.append((tag, pt, kdeg, mult))
        # the point at infinity is a drop point when every minor loses degree
        cands.append((tag, (field.one, field.zero), 1, 1))
    return cands


def find_witnesses(kind: MultMapKind, degrees, a, field: PrimeField,
                   mode: str = "auto", max_ext: int | None = None,
                   _matrix=None, _first_only=False):
    """Certified points where the preimage basis drops rank below c.

    The algebraic search turns each dependence among the stacked rows into a
    characteristic polynomial and takes its roots in bounded extensions, then
    adds the roots of the gcd of the kernel-basis minors (the exact drop
    locus, which can need deeper extensions than the shift recurrence when
    c > 1).  Every candidate is certified by evaluating an explicitly
    computed kernel basis, so a solver bug cannot confirm itself.
    mode="exhaustive" scans all curve points over F_{q^j} instead; "auto"
    falls back to that scan when the algebraic candidates all fail (small
    fields only).
    """
    c = len(degrees)
    if max_ext is None:
        max_ext = max(kind.multiplier_degree, 1)
    M, kernel, sections = _kernel_sections(kind, degrees, a, field, matrix=_matrix)
    deficit = kind.expected_codim - M.rank()
    if deficit <= 0:
        raise ValueError("no dependence: the preimage already has full codimension")
    model = model_for(kind)

    def certified_from(cands):
        found = {}
        for tag, pt, kdeg, mult in cands:
            point = (tag, pt)
            key = (tag, pt, kdeg)
            if key in found:
                prev = found[key]
                found[key] = Witness(point, kdeg, max(prev.multiplicity, mult))
                continue
            E = field_for_degree(field.p, kdeg)
            if _certify(kind, degrees, sections, point, E, c):
                found[key] = Witness(point, kdeg, mult)
                if _first_only:
                    break
        return sorted(found.values(), key=lambda w: (w.ext_degree, repr(w.point)))

    if not kernel:
        # m^{-1}(V) = 0: the evaluation matrix is empty and every point works
        return [Witness(("p1" if kind.family == "p1" else ("b1" if kind.family == "nodal" else "line"),
                         (field.zero, field.one)), 1, deficit)]

    witnesses = []
    if mode in ("auto", "algebraic"):
        cands = _drop_locus_candidates(kind, degrees, sections, field)
        if not _first_only:
            deps = M.left_kernel_basis()
            cands += _candidate_points(kind, degrees, deps, field, max_ext)
        witnesses = certified_from(cands)
    if not witnesses and mode in ("auto", "exhaustive"):
        scan_ext = max(max_ext, 2)
        if field.p**scan_ext > 20000:
            return witnesses
        cands = []
        for kdeg in range(1, scan_ext + 1):
            E = field_for_degree(field.p, kdeg)
            for point in model.points(E):
                cands.append((point[0], point[1], kdeg, 1))
        witnesses = certified_from(cands)
    return witnesses


def dichotomy_report(kind: MultMapKind, degrees, a, field: PrimeField,
                     mode: str = "auto") -> DichotomyReport:
    actual = preimage_codim(kind, degrees, a, field)
    e = kind.expected_codim
    if actual == e:
        return DichotomyReport(kind, tuple(degrees), actual, e, [], Verdict.FULL_CODIM)
    wits = find_witnesses(kind, degrees, a, field, mode=mode)
    verdict = Verdict.WITNESSED_DROP if wits else Verdict.COUNTEREXAMPLE
    return DichotomyReport(kind, tuple(degrees), actual, e, wits, verdict)


# ---------------------------------------------------------------------------
# exhaustive scan
# ---------------------------------------------------------------------------


@dataclass
class ScanReport:
    kind: MultMapKind
    degrees: tuple
    q: int
    total_hyperplanes: int
    full_codim: int
    witnessed_drop: int
    counterexamples: list = dc_field(default_factory=list)

    def to_json(self):
        return {
            "kind": self.kind.value,
            "degrees": list(self.degrees),
            "q": self.q,
            "totals": {
                "hyperplanes": self.total_hyperplanes,
                "full_codim": self.full_codim,
                "witnessed_drop": self.witnessed_drop,
            },
            "counterexamples": [list(map(list, ce)) for ce in self.counterexamples],
        }


def projective_functional_count(kind: MultMapKind, degrees, q: int) -> int:
    D = sum(functional_layout(kind, degrees))
    return (q**D - 1) // (q - 1)


def _gather_table(kind: MultMapKind, degrees, field: PrimeField):
    """Flat index of the single target coordinate hit by g_r * e_(i,beta), or -1."""
    model = model_for(kind)
    m = kind.multiplier_degree
    targets, sources = kind_degrees(kind, degrees)
    dims_t = [model.dim(D) for D in targets]
    offsets = [0]
    for d in dims_t[:-1]:
        offsets.append(offsets[-1] + d)
    k = model.dim(m)
    table = []
    for r in range(k):
        g = [0] * k
        g[r] = 1
        row = []
        for i, (D, s) in enumerate(zip(targets, sources)):
            for beta in range(model.dim(s)):
                e = [0] * model.dim(s)
                e[beta] = 1
                prod = model.mult(m, g, s, e, field.p)
                hits = [(gamma, v) for gamma, v in enumerate(prod) if v]
                if not hits:
                    row.append(-1)
                elif len(hits) == 1 and hits[0][1] == 1:
                    row.append(offsets[i] + hits[0][0])
                else:
                    raise AssertionError("structural product is not a unit basis vector")
            # end beta
        table.append(row)
    return table


def _projective_vectors(D: int, q: int):
    for lead in range(D):
        for tail in itertools.product(range(q), repeat=D - lead - 1):
            yield (0,) * lead + (1,) + tail


def exhaustive_dichotomy_scan(kind: MultMapKind, degrees, q: int,
                              budget: int | None = 300_000,
                              witness_mode: str = "auto") -> ScanReport:
    """Run the dichotomy over every hyperplane functional over F_q.

    Counterexamples (rank deficit but no certifiable witness point) must come
    out empty; they are collected rather than raised so the report can show
    them.
    """
    field = PrimeField(q)
    dims_t = functional_layout(kind, degrees)
    D = sum(dims_t)
    total = (q**D - 1) // (q - 1)
    if budget is not None and total > budget:
        raise BudgetExceeded(f"{total} hyperplanes exceeds budget {budget}")
    table = _gather_table(kind, degrees, field)
    e = kind.expected_codim
    ncols = len(table[0])
    full = witnessed = 0
    counterexamples = []
    for flat in _projective_vectors(D, q):
        rows = [[(flat[t] if t >= 0 else 0) for t in trow] for trow in table]
        r = rank_mod_p(rows, q)
        if r == e:
            full += 1
            continue
        if r == ncols:
            # the preimage is zero-dimensional: the evaluation matrix at any
            # point has no rows, so rank 0 < c certifies every point
            witnessed += 1
            continue
        blocks = []
        off = 0
        for d in dims_t:
            blocks.append(tuple(flat[off : off + d]))
            off += d
        M = ExactMatrix(field, rows)
        wits = find_witnesses(kind, degrees, tuple(blocks), field, mode=witness_mode,
                              _matrix=M, _first_only=True)
        if wits:
            witnessed += 1
        else:
            counterexamples.append(tuple(blocks))
    return ScanReport(kind, tuple(degrees), q, total, full, witnessed, counterexamples)
