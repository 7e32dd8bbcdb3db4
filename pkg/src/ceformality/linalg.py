"""Exact rational linear algebra: echelon forms, solving, subspaces, quotients.

All arithmetic uses fractions.Fraction; nothing here ever rounds.  The pivot
rule is fixed (leftmost nonzero column, topmost nonzero entry, full reduction)
so every derived basis and representative is reproducible across runs.
"""

from __future__ import annotations

from fractions import Fraction

Q0 = Fraction(0)
Q1 = Fraction(1)


def frac(x) -> Fraction:
    """Coerce ints, strings like '2/3', and Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def zero_vec(n):
    return [Q0] * n


def zeros(rows, cols):
    return [[Q0] * cols for _ in range(rows)]


def identity(n):
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = Q1
    return m


def mat_copy(a):
    return [row[:] for row in a]


def transpose(a):
    if not a:
        return []
    return [list(col) for col in zip(*a)]


def mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(c, a):
    return [[c * x for x in row] for row in a]


def mat_mul(a, b):
    if a and b and len(a[0]) != len(b):
        raise ValueError("dimension mismatch in mat_mul")
    ncols = len(b[0]) if b else 0
    out = []
    for row in a:
        orow = [Q0] * ncols
        for k, x in enumerate(row):
            if x:
                brow = b[k]
                for j, y in enumerate(brow):
                    if y:
                        orow[j] += x * y
        out.append(orow)
    return out


def mat_vec(a, v):
    if a and len(a[0]) != len(v):
        raise ValueError("dimension mismatch in mat_vec")
    support = [j for j, y in enumerate(v) if y]
    out = []
    for row in a:
        s = Q0
        for j in support:
            x = row[j]
            if x:
                s += x * v[j]
        out.append(s)
    return out


def vec_add(u, v):
    return [x + y for x, y in zip(u, v)]


def vec_sub(u, v):
    return [x - y for x, y in zip(u, v)]


def vec_scale(c, v):
    return [c * x for x in v]


def is_zero_vec(v):
    return all(x == 0 for x in v)


def is_zero_mat(a):
    return all(is_zero_vec(row) for row in a)


def rref(a):
    """Reduced row echelon form.

    Returns (R, pivots) where pivots is the list of pivot column indices.
    Deterministic: leftmost nonzero column, topmost nonzero entry, pivots
    normalized to 1, full reduction above and below.
    """
    m = mat_copy(a)
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        pr = None
        for i in range(r, rows):
            if m[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        if pr != r:
            m[r], m[pr] = m[pr], m[r]
        pv = m[r][c]
        if pv != 1:
            m[r] = [x / pv if x else x for x in m[r]]
        prow = m[r]
        nz = [j for j, y in enumerate(prow) if y]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                mi = m[i]
                for j in nz:
                    mi[j] -= f * prow[j]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a):
    return len(rref(a)[1])


def solve(a, b):
    """One exact solution of A x = b, or None if inconsistent.

    Free variables are set to zero (the echelon-least solution for the fixed
    pivot rule).
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    if len(b) != rows:
        raise ValueError("dimension mismatch in solve")
    aug = [row[:] + [b[i]] for i, row in enumerate(a)]
    r, pivots = rref(aug)
    if cols in pivots:
        return None
    x = zero_vec(cols)
    for i, c in enumerate(pivots):
        x[c] = r[i][cols]
    return x


def solve_matrix(a, y):
    """Solve A X = Y column by column; None if any column is inconsistent."""
    yt = transpose(y)
    cols = []
    for col in yt:
        x = solve(a, col)
        if x is None:
            return None
        cols.append(x)
    if not cols:
        return zeros(len(a[0]) if a else 0, 0)
    return transpose(cols)


def solve_right(a, y):
    """Solve X A = Y (matrix unknown on the left); None if inconsistent."""
    xt = solve_matrix(transpose(a), transpose(y))
    return None if xt is None else transpose(xt)


def nullspace(a):
    """Basis of ker A as a list of vectors, from the echelon form."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    if rows == 0:
        return [e for e in identity(cols)]
    r, pivots = rref(a)
    pivot_set = set(pivots)
    basis = []
    for c in range(cols):
        if c in pivot_set:
            continue
        v = zero_vec(cols)
        v[c] = Q1
        for i, pc in enumerate(pivots):
            v[pc] = -r[i][c]
        basis.append(v)
    return basis


class Subspace:
    """A subspace of Q^n, stored with a cached reduced echelon basis."""

    def __init__(self, ambient, vectors=()):
        self.ambient = ambient
        vecs = [list(v) for v in vectors]
        for v in vecs:
            if len(v) != ambient:
                raise ValueError("vector length does not match ambient dimension")
        if vecs:
            r, pivots = rref(vecs)
            self.basis = [r[i] for i in range(len(pivots))]
            self.pivots = list(pivots)
        else:
            self.basis = []
            self.pivots = []

    @property
    def dim(self):
        return len(self.basis)

    def reduce(self, v):
        """Residual of v after reduction against the echelon basis."""
        w = list(v)
        for row, pc in zip(self.basis, self.pivots):
            if w[pc] != 0:
                f = w[pc]
                w = [x - f * y for x, y in zip(w, row)]
        return w

    def contains(self, v):
        return is_zero_vec(self.reduce(v))

    def coordinates(self, v):
        """Coefficients of v on the echelon basis, or None if v is outside."""
        w = list(v)
        coeffs = []
        for row, pc in zip(self.basis, self.pivots):
            f = w[pc]
            coeffs.append(f)
            if f != 0:
                w = [x - f * y for x, y in zip(w, row)]
        return coeffs if is_zero_vec(w) else None

    def sum(self, other):
        return Subspace(self.ambient, self.basis + other.basis)

    def intersect(self, other):
        """Z ∩ B via the kernel of the stacked coefficient system."""
        if not self.basis or not other.basis:
            return Subspace(self.ambient)
        # columns: coefficients on self.basis then on other.basis
        a = []
        for i in range(self.ambient):
            a.append([v[i] for v in self.basis] + [-v[i] for v in other.basis])
        vecs = []
        for k in nullspace(a):
            v = zero_vec(self.ambient)
            for c, bv in zip(k[: len(self.basis)], self.basis):
                if c:
                    v = vec_add(v, vec_scale(c, bv))
            vecs.append(v)
        return Subspace(self.ambient, vecs)


class Quotient:
    """Basis data for Z/(Z ∩ B) with a coordinate map on Z."""

    def __init__(self, z: Subspace, b: Subspace):
        if z.ambient != b.ambient:
            raise ValueError("ambient dimensions differ")
        self.z = z
        self.bz = b.intersect(z)
        reps = []
        span = Subspace(z.ambient, self.bz.basis)
        for v in z.basis:
            grown = Subspace(z.ambient, span.basis + [v])
            if grown.dim > span.dim:
                reps.append(v)
                span = grown
        self.reps = reps
        # columns of the coordinate system: bz basis then representatives
        self._cols = self.bz.basis + reps

    @property
    def dim(self):
        return len(self.reps)

    def coordinates(self, v):
        """Quotient coordinates of v ∈ Z; raises if v lies outside Z."""
        if not self.z.contains(v):
            raise ValueError("vector outside the subspace being quotiented")
        if not self._cols:
            return []
        a = transpose(self._cols)
        x = solve(a, list(v))
        assert x is not None
        return x[len(self.bz.basis):]

    def is_zero_class(self, v):
        return all(c == 0 for c in self.coordinates(v))
