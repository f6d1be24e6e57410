"""Dense exact linear algebra over a field object: rank, kernel, RREF.

Matrices are small throughout the package (tens of rows at most), so plain
row reduction over the field protocol is the right tool; no floating point
anywhere.
"""

from __future__ import annotations


class ExactMatrix:
    def __init__(self, field, rows):
        self.field = field
        self.rows = [list(r) for r in rows]
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0
        for r in self.rows:
            if len(r) != self.ncols:
                raise ValueError("ragged rows")

    @classmethod
    def zeros(cls, field, nrows, ncols):
        return cls(field, [[field.zero] * ncols for _ in range(nrows)])

    def __repr__(self):
        return f"ExactMatrix({self.nrows}x{self.ncols})"

    def copy_rows(self):
        return [list(r) for r in self.rows]

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.field, [[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)])

    def rref(self):
        """Reduced row echelon form: (rows, pivot column indices)."""
        F = self.field
        rows = self.copy_rows()
        pivots = []
        r = 0
        for c in range(self.ncols):
            sel = None
            for i in range(r, len(rows)):
                if not F.is_zero(rows[i][c]):
                    sel = i
                    break
            if sel is None:
                continue
            rows[r], rows[sel] = rows[sel], rows[r]
            inv = F.inv(rows[r][c])
            rows[r] = [F.mul(x, inv) for x in rows[r]]
            for i in range(len(rows)):
                if i != r and not F.is_zero(rows[i][c]):
                    f = rows[i][c]
                    rows[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(rows[i], rows[r])]
            pivots.append(c)
            r += 1
            if r == len(rows):
                break
        return rows, pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel_basis(self):
        """Basis of the right kernel {v : M v = 0}, one vector per free column."""
        F = self.field
        rows, pivots = self.rref()
        pivot_set = set(pivots)
        free = [c for c in range(self.ncols) if c not in pivot_set]
        basis = []
        for fc in free:
            v = [F.zero] * self.ncols
            v[fc] = F.one
            for r, pc in enumerate(pivots):
                v[pc] = F.neg(rows[r][fc])
            basis.append(v)
        return basis

    def left_kernel_basis(self):
        return self.transpose().kernel_basis()

    def mul_vector(self, v):
        F = self.field
        out = []
        for row in self.rows:
            acc = F.zero
            for x, y in zip(row, v):
                acc = F.add(acc, F.mul(x, y))
            out.append(acc)
        return out


def rank(matrix: ExactMatrix) -> int:
    return matrix.rank()


def kernel_basis(matrix: ExactMatrix):
    return matrix.kernel_basis()


def rank_mod_p(rows, p: int) -> int:
    """Fast in-place integer row reduction mod p for hot scan loops."""
    rows = [list(r) for r in rows]
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    r = 0
    for c in range(ncols):
        sel = None
        for i in range(r, nrows):
            if rows[i][c] % p:
                sel = i
                break
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        inv = pow(rows[r][c], p - 2, p)
        rows[r] = [x * inv % p for x in rows[r]]
        for i in range(r + 1, nrows):
            f = rows[i][c] % p
            if f:
                rowr = rows[r]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rowr)]
        r += 1
        if r == nrows:
            break
    return r


def invert(matrix: ExactMatrix) -> ExactMatrix:
    if matrix.nrows != matrix.ncols:
        raise ValueError("only square matrices can be inverted")
    F = matrix.field
    n = matrix.nrows
    aug = ExactMatrix(F, [row + [F.one if i == j else F.zero for j in range(n)] for i, row in enumerate(matrix.rows)])
    rows, pivots = aug.rref()
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    return ExactMatrix(F, [r[n:] for r in rows])
