"""Spectral sequence of a finite filtered complex: pages, differentials,
degeneration checks, abutment comparison, and quotient-filtration comparison."""

from __future__ import annotations

from .dgla import cohomology
from .linalg import (
    Q0, Q1, Quotient, Subspace, is_zero_vec, mat_vec, nullspace, rank,
    zero_vec, zeros,
)


def cycle_space(ftc, p, n, r):
    """Z_r^{p,n-p} = {x in F^p of degree n with dx in F^{p+r}} (r ≥ -1).

    Results are memoized on the complex: page constructions across r and
    quotient comparisons revisit the same (p, n, r) triples many times.
    """
    cache = ftc.__dict__.setdefault("_cycle_cache", {})
    key = (p, n, r)
    hit = cache.get(key)
    if hit is not None:
        return hit
    dim = ftc.space.dim
    p_eff = max(0, p)
    idx = [i for i in range(dim)
           if ftc.levels[i] >= p_eff and ftc.space.degrees[i] == n]
    if p >= ftc.length or not idx:
        cache[key] = Subspace(dim, [])
        return cache[key]
    target_level = p + r
    d = ftc.differential.matrix
    # d is degree-homogeneous, so only degree n+1 rows can constrain
    rows = [i for i in range(dim) if ftc.levels[i] < target_level
            and ftc.space.degrees[i] == n + 1]
    constraint = [[d[rr][c] for c in idx] for rr in rows] or [[Q0] * len(idx)]
    vecs = []
    for ker in nullspace(constraint):
        full = zero_vec(dim)
        for pos, c in zip(idx, ker):
            full[pos] = c
        vecs.append(full)
    cache[key] = Subspace(dim, vecs)
    return cache[key]


def boundary_space(ftc, p, n, r):
    """B_r at (p, n-p): d(Z_{r-1} one column left) plus Z_{r-1} one level
    deeper.  Memoized alongside the cycle spaces."""
    cache = ftc.__dict__.setdefault("_boundary_cache", {})
    key = (p, n, r)
    hit = cache.get(key)
    if hit is not None:
        return hit
    below = cycle_space(ftc, p + 1, n, r - 1)
    dz_src = cycle_space(ftc, p - r + 1, n - 1, r - 1)
    d_images = [ftc.differential.apply(v) for v in dz_src.basis]
    cache[key] = below.sum(Subspace(ftc.space.dim, d_images))
    return cache[key]


class SpectralPage:
    """Page r of the spectral sequence of a filtered complex.

    Each populated cell (p, q) carries the cycle space Z_r, the boundary part
    B_r, the quotient E_r = Z_r/B_r with canonical representatives, and the
    matrix of d_r into cell (p+r, q-r+1).
    """

    def __init__(self, ftc, r):
        self.ftc = ftc
        self.r = r
        self.cells = {}
        self._build()

    def _build(self):
        ftc = self.ftc
        r = self.r
        for p in range(ftc.length):
            for n in ftc.space.degree_support():
                q = n - p
                z = cycle_space(ftc, p, n, r)
                if z.dim == 0:
                    continue
                b = boundary_space(ftc, p, n, r)
                quot = Quotient(z, b.intersect(z))
                if quot.dim == 0:
                    continue
                self.cells[(p, q)] = {"z": z, "b": b, "quot": quot}
        for (p, q), cell in self.cells.items():
            tgt = self.cells.get((p + r, q - r + 1))
            mat = zeros(tgt["quot"].dim if tgt else 0, cell["quot"].dim)
            for c, rep in enumerate(cell["quot"].reps):
                dv = self.ftc.differential.apply(rep)
                if tgt is None:
                    if not tgt_free_is_zero(self, p + r, q - r + 1, dv):
                        raise AssertionError(
                            "differential leaves the computed page support")
                    continue
                coords = tgt["quot"].coordinates(dv)
                for rr, val in enumerate(coords):
                    mat[rr][c] = val
            cell["d"] = mat

    def dim(self, p, q):
        cell = self.cells.get((p, q))
        return cell["quot"].dim if cell else 0

    def differential(self, p, q):
        cell = self.cells.get((p, q))
        return cell["d"] if cell else []

    def representatives(self, p, q):
        cell = self.cells.get((p, q))
        return cell["quot"].reps if cell else []

    def coordinates(self, p, q, vec):
        """Coordinates of the class of ``vec`` in E_r^{p,q}."""
        cell = self.cells.get((p, q))
        if cell is None:
            z = cycle_space(self.ftc, p, q + p, self.r)
            if not z.contains(vec):
                raise ValueError("vector is not an r-cycle at this cell")
            return []
        if not cell["z"].contains(vec):
            raise ValueError("vector is not an r-cycle at this cell")
        return cell["quot"].coordinates(vec)

    def is_zero_class(self, p, q, vec):
        coords = self.coordinates(p, q, vec)
        return all(c == 0 for c in coords)

    def differential_is_zero(self, p, q):
        cell = self.cells.get((p, q))
        if cell is None:
            return True
        return all(all(x == 0 for x in row) for row in cell["d"])


def tgt_free_is_zero(page_obj, p, q, vec):
    """When the target cell collapsed to zero, the class of ``vec`` there
    must vanish; check membership in the boundary subspace."""
    b = boundary_space(page_obj.ftc, p, q + p, page_obj.r)
    return b.contains(vec)


def page(ftc, r):
    cache = ftc.__dict__.setdefault("_page_cache", {})
    if r not in cache:
        cache[r] = SpectralPage(ftc, r)
    return cache[r]


def r_max(ftc):
    return ftc.length + 1


def degenerates_at(ftc, k, cell=None):
    """True when d_r vanishes for all k ≤ r ≤ r_max (at one cell or all).

    Returns (flag, first violating (r, p, q) or None).
    """
    for r in range(k, r_max(ftc) + 1):
        pg = page(ftc, r)
        if cell is not None:
            if not pg.differential_is_zero(*cell):
                return False, (r, cell[0], cell[1])
            continue
        for (p, q) in sorted(pg.cells):
            if not pg.differential_is_zero(p, q):
                return False, (r, p, q)
    return True, None


def abutment_check(ftc):
    """Assert dim E_∞^{p,q} equals the graded dimension of the filtration
    induced on the cohomology of the total complex."""
    einf = page(ftc, r_max(ftc))
    dim = ftc.space.dim
    d = ftc.differential.matrix
    report = {"ok": True, "cells": []}
    for n in ftc.space.degree_support():
        idx = [i for i in range(dim) if ftc.space.degrees[i] == n]
        below = [i for i in range(dim) if ftc.space.degrees[i] == n - 1]
        sub = [[d[r][c] for c in idx]
               for r in range(dim)] or [[Q0] * len(idx)]
        zvecs = []
        for ker in nullspace(sub):
            full = zero_vec(dim)
            for pos, c in zip(idx, ker):
                full[pos] = c
            zvecs.append(full)
        z = Subspace(dim, zvecs)
        bvecs = []
        for i in below:
            e = zero_vec(dim)
            e[i] = Q1
            bvecs.append(ftc.differential.apply(e))
        b = Subspace(dim, bvecs)

        def filt_h_dim(p):
            zp = z.intersect(ftc.filtration_subspace(p))
            bp = b.intersect(ftc.filtration_subspace(p))
            return zp.dim - bp.dim

        for p in range(ftc.length):
            gr = filt_h_dim(p) - filt_h_dim(p + 1)
            got = einf.dim(p, n - p)
            report["cells"].append(
                {"p": p, "q": n - p, "e_inf": got, "gr_h": gr,
                 "ok": got == gr})
            if got != gr:
                report["ok"] = False
    return report


def quotient_compare(ftc, lev):
    """Compare pages of the complex with pages of its quotient by F^lev.

    The projection induces maps E_r^{p,q} → E(lev)_r^{p,q}; they must be
    injective for p < lev and surjective when additionally p + r ≤ lev.
    """
    qftc, index_map = ftc.quotient_by_level(lev)
    proj = zeros(qftc.space.dim, ftc.space.dim)
    for old, new in index_map.items():
        proj[new][old] = Q1
    report = {"ok": True, "cells": []}
    for r in range(0, r_max(ftc) + 1):
        src_pg = page(ftc, r)
        dst_pg = page(qftc, r)
        cells = {(p, q) for (p, q) in src_pg.cells if p < lev}
        cells |= {(p, q) for (p, q) in dst_pg.cells if p < lev}
        for (p, q) in sorted(cells):
            sdim = src_pg.dim(p, q)
            ddim = dst_pg.dim(p, q)
            mat = zeros(ddim, sdim)
            for c, rep in enumerate(src_pg.representatives(p, q)):
                coords = dst_pg.coordinates(p, q, mat_vec(proj, rep)) \
                    if ddim else []
                for rr, val in enumerate(coords):
                    mat[rr][c] = val
            rk = rank(mat) if sdim and ddim else 0
            inj = rk == sdim
            surj = rk == ddim
            entry = {"r": r, "p": p, "q": q, "injective": inj,
                     "surjective": surj}
            ok = inj and (surj or p + r > lev)
            entry["ok"] = ok
            report["cells"].append(entry)
            if not ok:
                report["ok"] = False
    return report


def page_map(src_ftc, dst_ftc, fmat, r):
    """Matrices induced on page r by a filtered chain map given as a matrix
    on the flat bases.  Returns {(p, q): matrix}."""
    src_pg = page(src_ftc, r)
    dst_pg = page(dst_ftc, r)
    out = {}
    cells = set(src_pg.cells) | set(dst_pg.cells)
    for (p, q) in sorted(cells):
        sdim = src_pg.dim(p, q)
        ddim = dst_pg.dim(p, q)
        mat = zeros(ddim, sdim)
        for c, rep in enumerate(src_pg.representatives(p, q)):
            img = mat_vec(fmat, rep)
            if ddim:
                coords = dst_pg.coordinates(p, q, img)
                for rr, val in enumerate(coords):
                    mat[rr][c] = val
            elif not is_zero_vec(img):
                # target cell collapsed; the image class must vanish there
                if not tgt_free_is_zero(dst_pg, p, q, img):
                    raise ValueError("map does not respect cycle spaces")
        out[(p, q)] = mat
    return out
