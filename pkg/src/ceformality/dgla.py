"""Differential graded Lie algebras, modules over them, cochain complexes,
and cohomology with explicit contraction data."""

from __future__ import annotations

from fractions import Fraction

from .graded import EXTERIOR, GradedMap, GradedVectorSpace, PowerBasis, PowerMap
from .linalg import (
    Q0, Q1, Subspace, is_zero_mat, is_zero_vec, mat_mul, mat_vec, solve,
    vec_add, vec_scale, vec_sub, zero_vec, zeros,
)


class CochainComplex:
    """A graded space with a square-zero degree +1 differential."""

    def __init__(self, space, differential, check=True):
        if differential.degree != 1:
            raise ValueError("differential must have degree +1")
        if check and not is_zero_mat(mat_mul(differential.matrix,
                                             differential.matrix)):
            raise ValueError("differential does not square to zero")
        self.space = space
        self.differential = differential

    def d(self, v):
        return self.differential.apply(v)


class DgLieAlgebra:
    """(L, d, [-,-]) with exact structure constants.

    The bracket is stored on the canonical exterior-square basis; evaluation
    on arbitrary pairs goes through normalization signs, which encodes graded
    antisymmetry once and for all.
    """

    def __init__(self, space, differential, bracket):
        self.space = space
        self.differential = differential
        self.bracket = bracket  # PowerMap on PowerBasis(space, EXTERIOR, 2)

    @classmethod
    def from_data(cls, components, d_images, bracket_images, check=True):
        """Build from label data.

        ``d_images``: {label: [(label, coeff), ...]}.
        ``bracket_images``: {(label1, label2): [(label, coeff), ...]} given on
        any pairs; they are normalized onto the canonical exterior basis.
        With ``check=False`` non-homogeneous differentials are accepted so
        that validation can report them instead.
        """
        v = GradedVectorSpace(components)
        d = GradedMap.from_images(v, v, 1, d_images, check=check)
        pb = PowerBasis(v, EXTERIOR, 2)
        m = zeros(v.dim, len(pb))
        for (la, lb), terms in bracket_images.items():
            i, j = v.index(la), v.index(lb)
            sign, canon = pb.normalize((i, j))
            if sign == 0:
                if terms:
                    raise ValueError(f"bracket [{la},{lb}] must vanish")
                continue
            c = pb.index(canon)
            for tlab, coeff in terms:
                m[v.index(tlab)][c] += sign * Fraction(coeff)
        bracket = PowerMap(pb, v, 0, m)
        return cls(v, d, bracket)

    def bracket_basis(self, i, j):
        """[e_i, e_j] as a vector."""
        return self.bracket.eval_tuple((i, j))

    def bracket_vec(self, x, y):
        out = zero_vec(self.space.dim)
        for i, xi in enumerate(x):
            if not xi:
                continue
            for j, yj in enumerate(y):
                if not yj:
                    continue
                out = vec_add(out, vec_scale(xi * yj, self.bracket_basis(i, j)))
        return out

    def complex(self):
        return CochainComplex(self.space, self.differential, check=False)

    def is_abelian(self):
        return self.bracket.is_zero()


def validate_dgla(cand):
    """Check d²=0, graded Leibniz, and graded Jacobi on a basis.

    Returns a list of axiom reports; an empty failure list means valid.
    """
    v = cand.space
    d = cand.differential
    report = []

    hom_wit = d.homogeneity_violation()
    report.append({"axiom": "degree_homogeneity", "ok": hom_wit is None,
                   "witness": hom_wit})

    dd = mat_mul(d.matrix, d.matrix)
    report.append({
        "axiom": "d_squared_zero",
        "ok": is_zero_mat(dd),
        "witness": None if is_zero_mat(dd) else "d∘d has a nonzero entry",
    })

    leib_ok, leib_wit = True, None
    for i in range(v.dim):
        for j in range(v.dim):
            lhs = d.apply(cand.bracket_basis(i, j))
            ei = [Q1 if k == i else Q0 for k in range(v.dim)]
            ej = [Q1 if k == j else Q0 for k in range(v.dim)]
            rhs = vec_add(
                cand.bracket_vec(d.apply(ei), ej),
                vec_scale((-1) ** v.degrees[i], cand.bracket_vec(ei, d.apply(ej))),
            )
            if lhs != rhs:
                leib_ok, leib_wit = False, (v.labels[i], v.labels[j])
                break
        if not leib_ok:
            break
    report.append({"axiom": "leibniz", "ok": leib_ok, "witness": leib_wit})

    jac_ok, jac_wit = True, None
    for i in range(v.dim):
        for j in range(v.dim):
            for k in range(v.dim):
                di, dj, dk = v.degrees[i], v.degrees[j], v.degrees[k]
                ei = [Q1 if t == i else Q0 for t in range(v.dim)]
                ej = [Q1 if t == j else Q0 for t in range(v.dim)]
                ek = [Q1 if t == k else Q0 for t in range(v.dim)]
                total = zero_vec(v.dim)
                for (a, da), (b, _db), (c, dc) in (
                    ((ei, di), (ej, dj), (ek, dk)),
                    ((ej, dj), (ek, dk), (ei, di)),
                    ((ek, dk), (ei, di), (ej, dj)),
                ):
                    term = cand.bracket_vec(cand.bracket_vec(a, b), c)
                    total = vec_add(total, vec_scale((-1) ** (da * dc), term))
                if not is_zero_vec(total):
                    jac_ok, jac_wit = False, (v.labels[i], v.labels[j], v.labels[k])
                    break
            if not jac_ok:
                break
        if not jac_ok:
            break
    report.append({"axiom": "jacobi", "ok": jac_ok, "witness": jac_wit})
    return report


def dgla_is_valid(cand):
    return all(entry["ok"] for entry in validate_dgla(cand))


class DgModule:
    """A right module (M, d, [-,-]: M⊗L → M) over a dg-Lie algebra."""

    def __init__(self, base, space, differential, action):
        """``action``: list over the base flat basis; action[j] is the matrix
        of m ↦ [m, e_j] on M (degree deg(e_j))."""
        self.base = base
        self.space = space
        self.differential = differential
        self.action = action

    def act_basis(self, m_idx, l_idx):
        """[m_i, e_j] as a vector in M."""
        col = self.action[l_idx]
        return [col[r][m_idx] for r in range(self.space.dim)]

    def act(self, m_vec, x_vec):
        out = zero_vec(self.space.dim)
        for j, xj in enumerate(x_vec):
            if xj:
                out = vec_add(out, vec_scale(xj, mat_vec(self.action[j], m_vec)))
        return out


def adjoint_module(alg):
    mats = []
    n = alg.space.dim
    for j in range(n):
        m = zeros(n, n)
        for i in range(n):
            col = alg.bracket_basis(i, j)
            for r in range(n):
                m[r][i] = col[r]
        mats.append(m)
    return DgModule(alg, alg.space, alg.differential, mats)


def validate_morphism(f, src, tgt):
    """Check that a degree-0 graded map is a dg-Lie algebra morphism."""
    if f.degree != 0:
        return {"ok": False, "witness": "nonzero degree"}
    if mat_mul(f.matrix, src.differential.matrix) != mat_mul(
            tgt.differential.matrix, f.matrix):
        return {"ok": False, "witness": "does not commute with differentials"}
    n = src.space.dim
    for i in range(n):
        for j in range(i, n):
            ei = [Q1 if t == i else Q0 for t in range(n)]
            ej = [Q1 if t == j else Q0 for t in range(n)]
            lhs = f.apply(src.bracket_basis(i, j))
            rhs = tgt.bracket_vec(f.apply(ei), f.apply(ej))
            if lhs != rhs:
                return {"ok": False,
                        "witness": (src.space.labels[i], src.space.labels[j])}
    return {"ok": True, "witness": None}


def module_via_morphism(f, src, tgt):
    """Make the target of a dg-Lie morphism a module over the source via
    [m, x] = [m, f(x)]."""
    rep = validate_morphism(f, src, tgt)
    if not rep["ok"]:
        raise ValueError(f"not a dg-Lie algebra morphism: {rep['witness']}")
    mats = []
    for j in range(src.space.dim):
        ej = [Q1 if t == j else Q0 for t in range(src.space.dim)]
        fx = f.apply(ej)
        m = zeros(tgt.space.dim, tgt.space.dim)
        for i in range(tgt.space.dim):
            ei = [Q1 if t == i else Q0 for t in range(tgt.space.dim)]
            col = tgt.bracket_vec(ei, fx)
            for r in range(tgt.space.dim):
                m[r][i] = col[r]
        mats.append(m)
    return DgModule(src, tgt.space, tgt.differential, mats)


def validate_module(mod):
    """Chain-map and module-axiom checks for a DgModule; list of reports."""
    L, M = mod.base, mod
    report = []
    chain_ok, chain_wit = True, None
    nl, nm = L.space.dim, M.space.dim
    for i in range(nm):
        for j in range(nl):
            mi = [Q1 if t == i else Q0 for t in range(nm)]
            xj = [Q1 if t == j else Q0 for t in range(nl)]
            lhs = M.differential.apply(M.act(mi, xj))
            rhs = vec_add(
                M.act(M.differential.apply(mi), xj),
                vec_scale((-1) ** M.space.degrees[i],
                          M.act(mi, L.differential.apply(xj))),
            )
            if lhs != rhs:
                chain_ok = False
                chain_wit = (M.space.labels[i], L.space.labels[j])
                break
        if not chain_ok:
            break
    report.append({"axiom": "action_chain_map", "ok": chain_ok,
                   "witness": chain_wit})

    ax_ok, ax_wit = True, None
    for i in range(nm):
        for j in range(nl):
            for k in range(nl):
                mi = [Q1 if t == i else Q0 for t in range(nm)]
                xj = [Q1 if t == j else Q0 for t in range(nl)]
                yk = [Q1 if t == k else Q0 for t in range(nl)]
                lhs = M.act(mi, L.bracket_vec(xj, yk))
                rhs = vec_sub(
                    M.act(M.act(mi, xj), yk),
                    vec_scale(
                        (-1) ** (L.space.degrees[j] * L.space.degrees[k]),
                        M.act(M.act(mi, yk), xj)),
                )
                if lhs != rhs:
                    ax_ok = False
                    ax_wit = (M.space.labels[i], L.space.labels[j],
                              L.space.labels[k])
                    break
            if not ax_ok:
                break
        if not ax_ok:
            break
    report.append({"axiom": "module_axiom", "ok": ax_ok, "witness": ax_wit})
    return report


class Contraction:
    """Cohomology H of a complex together with maps i, p, h satisfying
    p i = 1, i p − 1 = d h + h d, and the side conditions hi = ph = hh = 0."""

    def __init__(self, complex_, cohomology, inclusion, projection, homotopy):
        self.complex = complex_
        self.cohomology = cohomology
        self.i = inclusion
        self.p = projection
        self.h = homotopy

    def verify(self):
        n = self.complex.space.dim
        d = self.complex.differential.matrix
        i, p, h = self.i.matrix, self.p.matrix, self.h.matrix
        hdim = self.cohomology.dim
        ident_h = [[Q1 if a == b else Q0 for b in range(hdim)]
                   for a in range(hdim)]
        ip = mat_mul(i, p) if hdim else zeros(n, n)
        dh = mat_mul(d, h)
        hd = mat_mul(h, d)
        ip_minus_one = [[ip[a][b] - (Q1 if a == b else Q0) for b in range(n)]
                        for a in range(n)]
        dh_plus_hd = [[dh[a][b] + hd[a][b] for b in range(n)]
                      for a in range(n)]
        checks = {
            "pi_identity": mat_mul(p, i) == ident_h,
            "ip_minus_one": ip_minus_one == dh_plus_hd,
            "hi_zero": is_zero_mat(mat_mul(h, i)),
            "ph_zero": is_zero_mat(mat_mul(p, h)),
            "hh_zero": is_zero_mat(mat_mul(h, h)),
        }
        return checks


def cohomology(complex_, pivot_order="forward"):
    """Compute H*(complex) with an explicit deterministic contraction.

    ``pivot_order`` controls which coordinate directions get picked when
    complements are chosen ("forward" or "reverse"); either choice yields a
    valid contraction.
    """
    v = complex_.space
    dmat = complex_.differential.matrix
    if not is_zero_mat(mat_mul(dmat, dmat)):
        raise ValueError("differential does not square to zero")
    degs = v.degree_support()
    if not degs:
        h = GradedVectorSpace({})
        zero = GradedMap.zero
        return Contraction(complex_, h, zero(h, v, 0), zero(v, h, 0),
                           zero(v, v, -1))
    order = (lambda xs: list(xs)) if pivot_order == "forward" else \
        (lambda xs: list(xs)[::-1])

    def unit(i):
        return [Q1 if t == i else Q0 for t in range(v.dim)]

    # per-degree kernels and chosen complements of the kernel
    kernel = {}
    w_basis = {}
    for k in degs:
        idx = v.indices_in_degree(k)
        up = v.indices_in_degree(k + 1)
        sub = [[dmat[r][c] for c in idx] for r in up] or [[Q0] * len(idx)]
        ker_local = [vec for vec in _nullspace(sub)]
        z_vecs = []
        for vec in ker_local:
            full = zero_vec(v.dim)
            for pos, c in zip(idx, vec):
                full[pos] = c
            z_vecs.append(full)
        kernel[k] = Subspace(v.dim, z_vecs)
        span = Subspace(v.dim, z_vecs)
        ws = []
        for i in order(idx):
            e = unit(i)
            if not span.contains(e):
                ws.append(e)
                span = span.sum(Subspace(v.dim, [e]))
        w_basis[k] = ws

    # image basis paired with preimages, cohomology representatives
    b_basis = {k: [] for k in degs + [max(degs) + 1]}
    b_preimage = {k: [] for k in degs + [max(degs) + 1]}
    for k in degs:
        for w in w_basis[k]:
            b_basis[k + 1].append(mat_vec(dmat, w))
            b_preimage[k + 1].append(w)

    h_reps = {}
    for k in degs:
        span = Subspace(v.dim, b_basis.get(k, []))
        reps = []
        for zvec in order(kernel[k].basis):
            if not span.contains(zvec):
                reps.append(list(zvec))
                span = span.sum(Subspace(v.dim, [zvec]))
        h_reps[k] = reps

    hcomps = {k: [f"h{k}_{t}" for t in range(len(h_reps[k]))]
              for k in degs if h_reps[k]}
    hspace = GradedVectorSpace(hcomps)

    i_mat = zeros(v.dim, hspace.dim)
    col = 0
    rep_by_col = []
    for k in sorted(hcomps):
        for rep in h_reps[k]:
            for r in range(v.dim):
                i_mat[r][col] = rep[r]
            rep_by_col.append((k, rep))
            col += 1

    # decompose each degree-k unit vector in the basis B ∪ H ∪ W
    p_mat = zeros(hspace.dim, v.dim)
    h_mat = zeros(v.dim, v.dim)
    for k in degs:
        cols = b_basis.get(k, []) + h_reps[k] + w_basis[k]
        if not cols:
            continue
        pmat = [[cols[c][r] for c in range(len(cols))] for r in range(v.dim)]
        nb, nh = len(b_basis.get(k, [])), len(h_reps[k])
        hoffset = hspace.dim and _h_offset(hspace, k)
        for i in v.indices_in_degree(k):
            coords = solve(pmat, unit(i))
            # projection reads off the H-block coordinates
            for t in range(nh):
                p_mat[hoffset + t][i] = coords[nb + t]
            # homotopy inverts d on the B-block, with a sign
            hv = zero_vec(v.dim)
            for t in range(nb):
                if coords[t]:
                    hv = vec_add(hv, vec_scale(-coords[t], b_preimage[k][t]))
            for r in range(v.dim):
                h_mat[r][i] = hv[r]

    inc = GradedMap(hspace, v, 0, i_mat)
    proj = GradedMap(v, hspace, 0, p_mat)
    htpy = GradedMap(v, v, -1, h_mat)
    return Contraction(complex_, hspace, inc, proj, htpy)


def _h_offset(hspace, k):
    for i, d in enumerate(hspace.degrees):
        if d == k:
            return i
    return 0


def _nullspace(a):
    from .linalg import nullspace
    return nullspace(a)


def cohomology_lie(alg, pivot_order="forward"):
    """Graded Lie algebra structure on H*(L) induced by representatives.

    Returns (H as a DgLieAlgebra with zero differential, contraction).
    """
    con = cohomology(alg.complex(), pivot_order=pivot_order)
    h = con.cohomology
    pb = PowerBasis(h, EXTERIOR, 2)
    m = zeros(h.dim, len(pb))
    for c, (a, b) in enumerate(pb.elements):
        ea = [Q1 if t == a else Q0 for t in range(h.dim)]
        eb = [Q1 if t == b else Q0 for t in range(h.dim)]
        val = con.p.apply(alg.bracket_vec(con.i.apply(ea), con.i.apply(eb)))
        for r in range(h.dim):
            m[r][c] = val[r]
    bracket = PowerMap(pb, h, 0, m)
    halg = DgLieAlgebra(h, GradedMap.zero(h, h, 1), bracket)
    return halg, con
