"""Sparse matrices over exact rationals or 64-bit floats.

Everything downstream (automata, composition, deadlock analysis) is built
on these matrices.  A matrix carries a scalar mode: "exact" entries are
``fractions.Fraction`` values, "float" entries are Python floats.  The two
modes are never mixed inside one computation.
"""
from __future__ import annotations

from fractions import Fraction

EXACT = "exact"
FLOAT = "float"

#: absolute tolerance for float-mode comparisons
FLOAT_TOL = 1e-12


class ModeMismatchError(ValueError):
    """Raised when exact and float matrices meet in one operation."""


class DimensionError(ValueError):
    """Raised when matrix dimensions do not conform."""


class SingularMatrixError(ValueError):
    """Raised by solve() when elimination hits an all-zero pivot column."""

    def __init__(self, column):
        super().__init__("singular matrix: zero pivot in column %d" % column)
        self.column = column


def coerce(value, mode):
    """Coerce a number (int, Fraction, float, 'p/q' string) to the mode's scalar type."""
    if mode == EXACT:
        if isinstance(value, float):
            raise ModeMismatchError("float value %r in exact matrix" % value)
        return Fraction(value)
    return float(value)


def scalar_str(value):
    """Serialize a scalar: 'p/q' for rationals, shortest round-trip for floats."""
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return "%d" % value.numerator
        return "%d/%d" % (value.numerator, value.denominator)
    return repr(value)


class Matrix:
    """Immutable sparse matrix.  Zero entries are never stored."""

    __slots__ = ("rows", "cols", "mode", "entries")

    def __init__(self, rows, cols, entries=None, mode=EXACT):
        if mode not in (EXACT, FLOAT):
            raise ValueError("unknown scalar mode %r" % mode)
        data = {}
        if entries:
            for (i, j), v in entries.items():
                if not (0 <= i < rows and 0 <= j < cols):
                    raise DimensionError("entry (%d, %d) outside %dx%d" % (i, j, rows, cols))
                v = coerce(v, mode)
                if v != 0:
                    data[i, j] = v
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "entries", data)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    # -- construction helpers -------------------------------------------

    @classmethod
    def from_rows(cls, rows, mode=EXACT):
        """Build from a dense list of row lists; 'p/q' strings allowed in exact mode."""
        n = len(rows)
        m = len(rows[0]) if rows else 0
        entries = {}
        for i, row in enumerate(rows):
            if len(row) != m:
                raise DimensionError("ragged row %d" % i)
            for j, v in enumerate(row):
                entries[i, j] = v
        return cls(n, m, entries, mode)

    @classmethod
    def identity(cls, n, mode=EXACT):
        one = Fraction(1) if mode == EXACT else 1.0
        return cls(n, n, {(i, i): one for i in range(n)}, mode)

    @classmethod
    def zero(cls, rows, cols, mode=EXACT):
        return cls(rows, cols, {}, mode)

    # -- access ---------------------------------------------------------

    def __getitem__(self, key):
        i, j = key
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(key)
        v = self.entries.get((i, j))
        if v is None:
            return Fraction(0) if self.mode == EXACT else 0.0
        return v

    def row(self, i):
        """Yield (col, value) pairs of row i, sorted by column."""
        for j in sorted(j for (r, j) in self.entries if r == i):
            yield j, self.entries[i, j]

    def row_sums(self):
        zero = Fraction(0) if self.mode == EXACT else 0.0
        sums = [zero] * self.rows
        for (i, _), v in self.entries.items():
            sums[i] += v
        return sums

    def to_rows(self):
        zero = Fraction(0) if self.mode == EXACT else 0.0
        dense = [[zero] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            dense[i][j] = v
        return dense

    def nnz(self):
        return len(self.entries)

    def is_zero(self):
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.rows, self.cols, self.mode, self.entries) == (
            other.rows, other.cols, other.mode, other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, self.mode, frozenset(self.entries.items())))

    def __repr__(self):
        return "Matrix(%dx%d %s, %d nonzeros)" % (self.rows, self.cols, self.mode, len(self.entries))

    def close_to(self, other, tol=FLOAT_TOL):
        """Entrywise comparison with absolute tolerance (for float mode)."""
        if (self.rows, self.cols) != (other.rows, other.cols):
            return False
        keys = set(self.entries) | set(other.entries)
        return all(abs(self[k] - other[k]) <= tol for k in keys)

    # -- arithmetic -----------------------------------------------------

    def _check_mode(self, other):
        if self.mode != other.mode:
            raise ModeMismatchError("cannot mix %s and %s matrices" % (self.mode, other.mode))

    def __add__(self, other):
        self._check_mode(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionError("add: %dx%d vs %dx%d" % (self.rows, self.cols, other.rows, other.cols))
        entries = dict(self.entries)
        for k, v in other.entries.items():
            entries[k] = entries.get(k, 0) + v
        return Matrix(self.rows, self.cols, entries, self.mode)

    def __sub__(self, other):
        return self + other.scaled(-1)

    def scaled(self, c):
        c = coerce(c, self.mode)
        return Matrix(self.rows, self.cols,
                      {k: v * c for k, v in self.entries.items()}, self.mode)

    def scale_rows(self, factors):
        """Multiply row i by factors[i]."""
        if len(factors) != self.rows:
            raise DimensionError("need %d row factors" % self.rows)
        return Matrix(self.rows, self.cols,
                      {(i, j): v * factors[i] for (i, j), v in self.entries.items()},
                      self.mode)

    def __matmul__(self, other):
        self._check_mode(other)
        if self.cols != other.rows:
            raise DimensionError("matmul: %dx%d vs %dx%d" % (self.rows, self.cols, other.rows, other.cols))
        by_row = {}
        for (i, j), v in other.entries.items():
            by_row.setdefault(i, []).append((j, v))
        out = {}
        for (i, k), a in self.entries.items():
            for j, b in by_row.get(k, ()):
                out[i, j] = out.get((i, j), 0) + a * b
        return Matrix(self.rows, other.cols, out, self.mode)

    def kron(self, other):
        """Kronecker product; composite index (i,k) -> i*other.rows + k (row-major)."""
        self._check_mode(other)
        p, q = other.rows, other.cols
        out = {}
        for (i, j), a in self.entries.items():
            for (k, l), b in other.entries.items():
                out[i * p + k, j * q + l] = a * b
        return Matrix(self.rows * p, self.cols * q, out, self.mode)

    def pow(self, k):
        """Matrix power by repeated squaring; pow(0) is the identity."""
        if self.rows != self.cols:
            raise DimensionError("pow of non-square %dx%d matrix" % (self.rows, self.cols))
        if k < 0:
            raise ValueError("negative exponent")
        result = Matrix.identity(self.rows, self.mode)
        base = self
        while k:
            if k & 1:
                result = result @ base
            k >>= 1
            if k:
                base = base @ base
        return result

    def permuted(self, perm):
        """Apply a symmetric row/column permutation: new[i,j] = old[perm[i], perm[j]]."""
        if self.rows != self.cols or len(perm) != self.rows:
            raise DimensionError("permutation size mismatch")
        inv = [0] * len(perm)
        for new, old in enumerate(perm):
            inv[old] = new
        return Matrix(self.rows, self.cols,
                      {(inv[i], inv[j]): v for (i, j), v in self.entries.items()},
                      self.mode)

    def submatrix(self, row_idx, col_idx):
        rmap = {old: new for new, old in enumerate(row_idx)}
        cmap = {old: new for new, old in enumerate(col_idx)}
        out = {}
        for (i, j), v in self.entries.items():
            if i in rmap and j in cmap:
                out[rmap[i], cmap[j]] = v
        return Matrix(len(row_idx), len(col_idx), out, self.mode)

    def to_float(self):
        if self.mode == FLOAT:
            return self
        return Matrix(self.rows, self.cols,
                      {k: float(v) for k, v in self.entries.items()}, FLOAT)

    def solve(self, b):
        """Solve self @ x = b by Gaussian elimination (dense, pivoted).

        Exact mode picks the first nonzero pivot; float mode pivots on the
        largest magnitude.  Raises SingularMatrixError on a zero pivot column.
        """
        self._check_mode(b)
        if self.rows != self.cols:
            raise DimensionError("solve needs a square matrix")
        if b.rows != self.rows:
            raise DimensionError("rhs has %d rows, expected %d" % (b.rows, self.rows))
        n, m = self.rows, b.cols
        a = [row + rhs for row, rhs in zip(self.to_rows(), b.to_rows())]
        for col in range(n):
            if self.mode == EXACT:
                pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
            else:
                pivot = max(range(col, n), key=lambda r: abs(a[r][col]))
                if a[pivot][col] == 0:
                    pivot = None
            if pivot is None:
                raise SingularMatrixError(col)
            a[col], a[pivot] = a[pivot], a[col]
            pv = a[col][col]
            a[col] = [v / pv for v in a[col]]
            for r in range(n):
                if r != col and a[r][col] != 0:
                    f = a[r][col]
                    a[r] = [v - f * w for v, w in zip(a[r], a[col])]
        return Matrix.from_rows([row[n:] for row in a], self.mode)


def row_vector_product(x, m):
    """Multiply a row vector (sequence) by a sparse matrix: (x @ m) as a tuple."""
    if len(x) != m.rows:
        raise DimensionError("vector length %d vs %d rows" % (len(x), m.rows))
    zero = Fraction(0) if m.mode == EXACT else 0.0
    out = [zero] * m.cols
    for (i, j), v in m.entries.items():
        if x[i]:
            out[j] += x[i] * v
    return tuple(out)
