"""Boundary cohomology via the double complex of flag subcomplexes.

Column p collects the simplicial cochains of the quotients of the flag
subcomplexes W_F for flags with p+2 members (the full space included);
vertical differentials are signed coboundaries, horizontal ones are
Cech-signed restrictions twisted by group elements carrying a deleted
flag onto its orbit representative.  The total complex computes the
cohomology of the boundary of the bordified quotient; the restriction
map from the cohomology of the whole retract quotient is realized at the
cochain level.  Spectral pages of the column filtration are computed
over a field by exact subquotient linear algebra.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .cells import OrbitComplex, enumerate_W, subcomplex_WF
from .exactla import IntMatrix, QQ, f_matrix, f_rank, f_rref, snf
from .flags import (
    RationalFlag, flag_equivalent, flag_orbits, flag_types,
    subflags_with_signs,
)
from .lattice import GroupSpec
from .quotient import (
    ChainMap, QuotientComplex, barycentric_quotient, homology, induced_map,
    parse_coeff,
)


@dataclass(frozen=True)
class Summand:
    flag: RationalFlag
    complex: OrbitComplex
    qc: QuotientComplex


@dataclass(frozen=True)
class HorizontalPiece:
    source: int          # summand index in column p
    target: int          # summand index in column p+1
    sign: int
    chain_map: ChainMap  # chains of the target's subcomplex into the source's


@dataclass(frozen=True)
class DoubleComplex:
    group: GroupSpec
    columns: tuple[tuple[Summand, ...], ...]
    pieces: tuple[tuple[HorizontalPiece, ...], ...]  # per column p: maps p -> p+1
    w_complex: OrbitComplex
    w_qc: QuotientComplex

    @property
    def num_columns(self) -> int:
        return len(self.columns)

    def max_q(self) -> int:
        return max((s.qc.dim for col in self.columns for s in col), default=0)

    def cochain_dim(self, p: int, q: int) -> int:
        if not (0 <= p < self.num_columns) or q < 0:
            return 0
        total = 0
        for s in self.columns[p]:
            if q <= s.qc.dim:
                total += len(s.qc.simplices[q])
        return total

    def offsets(self, p: int, q: int) -> list[int]:
        out = []
        acc = 0
        for s in self.columns[p]:
            out.append(acc)
            if q <= s.qc.dim:
                acc += len(s.qc.simplices[q])
        return out

    def vertical_matrix(self, p: int, q: int) -> IntMatrix:
        """(-1)^p times the coboundary: block diagonal over summands."""
        rows = self.cochain_dim(p, q + 1)
        cols = self.cochain_dim(p, q)
        mat = [[0] * cols for _ in range(rows)]
        roff = self.offsets(p, q + 1)
        coff = self.offsets(p, q)
        sign = -1 if p % 2 else 1
        for idx, s in enumerate(self.columns[p]):
            if q + 1 > s.qc.dim:
                continue
            bnd = s.qc.boundaries[q + 1]  # (q-simplices) x (q+1-simplices)
            for i in range(len(s.qc.simplices[q + 1])):
                for j in range(len(s.qc.simplices[q])):
                    if bnd and bnd[j][i]:
                        mat[roff[idx] + i][coff[idx] + j] = sign * bnd[j][i]
        return tuple(tuple(r) for r in mat)

    def horizontal_matrix(self, p: int, q: int) -> IntMatrix:
        """Cech differential: column p cochains to column p+1 cochains."""
        rows = self.cochain_dim(p + 1, q)
        cols = self.cochain_dim(p, q)
        mat = [[0] * cols for _ in range(rows)]
        if p + 1 >= self.num_columns:
            return tuple(tuple(r) for r in mat)
        roff = self.offsets(p + 1, q)
        coff = self.offsets(p, q)
        for piece in self.pieces[p]:
            tgt = self.columns[p + 1][piece.target]
            src = self.columns[p][piece.source]
            if q > tgt.qc.dim or q > src.qc.dim:
                continue
            cmat = piece.chain_map.matrix(q)  # src-simplices x tgt-simplices
            for i in range(len(tgt.qc.simplices[q])):
                for j in range(len(src.qc.simplices[q])):
                    if cmat and cmat[j][i]:
                        mat[roff[piece.target] + i][coff[piece.source] + j] += \
                            piece.sign * cmat[j][i]
        return tuple(tuple(r) for r in mat)


def build_double_complex(group: GroupSpec, variant: int = 0) -> DoubleComplex:
    """Assemble the flag-subcomplex double complex for the group.

    Column p holds one summand per orbit of flags with p+1 proper
    members; the horizontal maps pair each flag with its one-member
    deletions, located among the representatives by an exact equivalence
    search whose witness twists the restriction.
    """
    n = group.n
    w_complex = enumerate_W(group, variant=variant)
    w_qc = barycentric_quotient(w_complex)
    columns = []
    for p in range(n - 1):
        summands = []
        for dims in flag_types(n, p + 2):
            orbits = flag_orbits(group, dims)
            for flag in orbits.reps:
                sub = subcomplex_WF(w_complex, flag, variant=variant)
                summands.append(Summand(flag, sub, barycentric_quotient(sub)))
        columns.append(tuple(summands))
    pieces: list[tuple[HorizontalPiece, ...]] = []
    for p in range(len(columns) - 1):
        col_pieces = []
        for t_idx, tgt in enumerate(columns[p + 1]):
            for deleted, sign in subflags_with_signs(tgt.flag):
                s_idx, witness = _locate_flag(columns[p], deleted, group)
                cm = induced_map(tgt.qc, columns[p][s_idx].qc, twist=witness)
                col_pieces.append(HorizontalPiece(s_idx, t_idx, sign, cm))
        pieces.append(tuple(col_pieces))
    pieces.append(())
    dc = DoubleComplex(group, tuple(columns), tuple(pieces), w_complex, w_qc)
    _assert_total_differential_squares_to_zero(dc)
    return dc


def _locate_flag(column: Sequence[Summand], flag: RationalFlag,
                 group: GroupSpec):
    for idx, s in enumerate(column):
        if s.flag.dims != flag.dims:
            continue
        w = flag_equivalent(flag, s.flag, group)
        if w is not None:
            return idx, w
    raise AssertionError("deleted flag matches no representative")


# ---------------------------------------------------------------------------
# Total complex
# ---------------------------------------------------------------------------

def total_dims(dc: DoubleComplex) -> list[int]:
    kmax = dc.num_columns - 1 + dc.max_q()
    return [sum(dc.cochain_dim(p, k - p) for p in range(dc.num_columns))
            for k in range(kmax + 2)]


def total_positions(dc: DoubleComplex, k: int) -> list[tuple[int, int]]:
    """Basis labels (p, local index) of the total degree-k cochains."""
    out = []
    for p in range(dc.num_columns):
        for i in range(dc.cochain_dim(p, k - p)):
            out.append((p, i))
    return out


def total_differential(dc: DoubleComplex, k: int) -> IntMatrix:
    """D = vertical + horizontal from total degree k to k+1."""
    src = total_positions(dc, k)
    dst = total_positions(dc, k + 1)
    dst_index = {}
    for i, (p, loc) in enumerate(dst):
        dst_index[(p, loc)] = i
    mat = [[0] * len(src) for _ in range(len(dst))]
    col_offset = {}
    acc = 0
    for p in range(dc.num_columns):
        col_offset[p] = acc
        acc += dc.cochain_dim(p, k - p)
    for p in range(dc.num_columns):
        q = k - p
        if q < 0 or dc.cochain_dim(p, q) == 0:
            continue
        vm = dc.vertical_matrix(p, q)
        for i in range(dc.cochain_dim(p, q + 1)):
            for j in range(dc.cochain_dim(p, q)):
                if vm and vm[i][j]:
                    mat[dst_index[(p, i)]][col_offset[p] + j] += vm[i][j]
        hm = dc.horizontal_matrix(p, q)
        for i in range(dc.cochain_dim(p + 1, q)):
            for j in range(dc.cochain_dim(p, q)):
                if hm and hm[i][j]:
                    mat[dst_index[(p + 1, i)]][col_offset[p] + j] += hm[i][j]
    return tuple(tuple(r) for r in mat)


def _assert_total_differential_squares_to_zero(dc: DoubleComplex):
    kmax = dc.num_columns - 1 + dc.max_q()
    for k in range(kmax + 1):
        a = total_differential(dc, k + 1)
        b = total_differential(dc, k)
        if not a or not b or not a[0] or not b[0]:
            continue
        for j in range(len(b[0])):
            col = [sum(a[i][t] * b[t][j] for t in range(len(b)))
                   for i in range(len(a))]
            assert all(x == 0 for x in col), "total differential fails D*D=0"


def total_cohomology(dc: DoubleComplex, coeff="Q"):
    """Cohomology of the total complex: over a field the dimensions, over
    Z also the torsion (via Smith form)."""
    if isinstance(coeff, str):
        coeff = parse_coeff(coeff)
    dims = total_dims(dc)
    kmax = len(dims) - 1
    out = []
    for k in range(kmax):
        dk = total_differential(dc, k)
        dkm = total_differential(dc, k - 1) if k >= 1 else ()
        if coeff == "Z":
            rk = _int_rank(dk)
            rkm = _int_rank(dkm)
            betti = dims[k] - rk - rkm
            torsion: tuple[int, ...] = ()
            if dkm and dkm[0]:
                torsion = tuple(int(d) for d in snf(dkm).diag if d not in (0, 1))
            out.append({"degree": k, "betti": betti, "torsion": torsion})
        else:
            rk = f_rank(coeff, f_matrix(coeff, dk)) if dk and dk[0] else 0
            rkm = f_rank(coeff, f_matrix(coeff, dkm)) if dkm and dkm[0] else 0
            out.append({"degree": k, "betti": dims[k] - rk - rkm,
                        "torsion": ()})
    while out and out[-1]["betti"] == 0 and not out[-1]["torsion"]:
        out.pop()
    return out


def _int_rank(m) -> int:
    if not m or not m[0]:
        return 0
    return f_rank(QQ, f_matrix(QQ, m))


# ---------------------------------------------------------------------------
# Spectral sequence of the column filtration (field coefficients)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralPage:
    r: int
    entries: dict
    differentials: dict

    def dim(self, p: int, q: int) -> int:
        return self.entries.get((p, q), 0)


class _Filtered:
    """Exact subquotient linear algebra for the column filtration."""

    def __init__(self, dc: DoubleComplex, field):
        self.dc = dc
        self.field = field
        self.pmax = dc.num_columns - 1
        self.kmax = self.pmax + dc.max_q() + 1
        self.positions = {k: total_positions(dc, k) for k in range(self.kmax + 2)}
        self.D = {k: f_matrix(field, total_differential(dc, k))
                  if total_differential(dc, k) else []
                  for k in range(self.kmax + 2)}

    def coords_from(self, k: int, p: int) -> list[int]:
        return [i for i, (pp, _) in enumerate(self.positions[k]) if pp >= p]

    def z_space(self, r: int, p: int, q: int) -> list[list]:
        """Basis of {x in F^p T^{p+q} : D x in F^{p+r}}."""
        k = p + q
        if k < 0 or k > self.kmax + 1:
            return []
        cols = self.coords_from(k, p)
        if not cols:
            return []
        d = self.D.get(k, [])
        nfull = len(self.positions[k + 1]) if k + 1 in self.positions else 0
        bad_rows = [i for i, (pp, _) in enumerate(self.positions.get(k + 1, []))
                    if pp < p + r]
        rows = []
        for i in bad_rows:
            rows.append([d[i][c] for c in cols] if d else
                        [self.field.of(0)] * len(cols))
        if rows:
            from .exactla import f_kernel
            ker = f_kernel(self.field, rows, len(cols))
        else:
            ker = [[self.field.of(int(a == b)) for b in range(len(cols))]
                   for a in range(len(cols))]
        full = []
        n = len(self.positions[k])
        for v in ker:
            vec = [self.field.of(0)] * n
            for c, x in zip(cols, v):
                vec[c] = x
            full.append(vec)
        return full

    def apply_d(self, k: int, vec: list) -> list:
        d = self.D.get(k, [])
        if not d:
            return [self.field.of(0)] * len(self.positions.get(k + 1, []))
        return [sum((self.field.mul(d[i][j], vec[j]) for j in range(len(vec))),
                    start=self.field.of(0))
                for i in range(len(d))]

    def page_entry(self, r: int, p: int, q: int):
        """(numerator basis, denominator basis, lifts spanning E_r)."""
        z = self.z_space(r, p, q)
        den = self.z_space(r - 1, p + 1, q - 1) + \
            [self.apply_d(p + q - 1, v)
             for v in self.z_space(r - 1, p - r + 1, q + r - 2)]
        den = [v for v in den if any(not self.field.is_zero(x) for x in v)]
        rank_den = f_rank(self.field, den) if den else 0
        lifts = []
        basis = [list(v) for v in den]
        rank = rank_den
        for v in z:
            if f_rank(self.field, basis + [list(v)]) > rank:
                lifts.append(v)
                basis.append(list(v))
                rank += 1
        return z, den, lifts

    def express(self, vec, lifts, den):
        """Coordinates of vec in the lift basis modulo the denominator."""
        cols = [list(v) for v in lifts] + [list(v) for v in den]
        if not cols:
            assert all(self.field.is_zero(x) for x in vec)
            return [self.field.of(0)] * 0
        rows = list(map(list, zip(*cols))) if cols else []
        aug = [row + [x] for row, x in zip(rows, vec)]
        rr, pivots = f_rref(self.field, aug)
        ncols = len(cols)
        assert all(pv != ncols for pv in pivots), "vector not in the span"
        sol = [self.field.of(0)] * ncols
        for i, pv in enumerate(pivots):
            sol[pv] = rr[i][ncols]
        return sol[:len(lifts)]


def spectral_sequence(dc: DoubleComplex, coeff="Q", r_stop: Optional[int] = None):
    """Pages E_1, E_2, ... of the column filtration, with differentials,
    until stabilization; returns (pages, abutment dims per degree)."""
    field = parse_coeff(coeff) if isinstance(coeff, str) else coeff
    if field == "Z":
        raise ValueError("spectral pages need field coefficients")
    work = _Filtered(dc, field)
    pmax = work.pmax
    if r_stop is None:
        r_stop = pmax + 2
    pages = []
    for r in range(1, r_stop + 1):
        entries = {}
        lifts_at = {}
        dens_at = {}
        for p in range(pmax + 1):
            for q in range(dc.max_q() + 1):
                z, den, lifts = work.page_entry(r, p, q)
                if lifts:
                    entries[(p, q)] = len(lifts)
                    lifts_at[(p, q)] = lifts
                    dens_at[(p, q)] = den
        diffs = {}
        for (p, q), lifts in lifts_at.items():
            tp, tq = p + r, q - r + 1
            timg = lifts_at.get((tp, tq), [])
            tden = dens_at.get((tp, tq), [])
            if not timg and not tden:
                tz, tden2, timg2 = work.page_entry(r, tp, tq)
                timg, tden = timg2, tden2
            rows = []
            for v in lifts:
                img = work.apply_d(p + q, v)
                rows.append(work.express(img, timg, tden))
            if timg:
                diffs[(p, q)] = tuple(tuple(r_) for r_ in
                                      zip(*rows)) if rows else ()
            elif rows:
                assert all(not c for c in rows)
        pages.append(SpectralPage(r, entries, diffs))
    # abutment over the field
    dims = total_dims(dc)
    abutment = []
    for k in range(len(dims) - 1):
        dk = work.D.get(k, [])
        dkm = work.D.get(k - 1, []) if k >= 1 else []
        rk = f_rank(field, dk) if dk else 0
        rkm = f_rank(field, dkm) if dkm else 0
        abutment.append(dims[k] - rk - rkm)
    while abutment and abutment[-1] == 0:
        abutment.pop()
    return pages, abutment


def e1_page(dc: DoubleComplex, coeff="Q") -> SpectralPage:
    return spectral_sequence(dc, coeff, r_stop=1)[0][0]


# ---------------------------------------------------------------------------
# Restriction map and its homology dual
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RestrictionDegree:
    degree: int
    dim_retract: int      # dim H^q(W/Gamma)
    dim_total: int        # dim H^q of the total complex
    rank: int             # rank of the restriction on cohomology
    interior: int         # kernel dimension


@dataclass(frozen=True)
class RestrictionReport:
    coeff: str
    degrees: tuple[RestrictionDegree, ...]


def _inclusion_chain_maps(dc: DoubleComplex) -> list[ChainMap]:
    return [induced_map(s.qc, dc.w_qc) for s in dc.columns[0]]


def restriction(dc: DoubleComplex, coeff="Q") -> RestrictionReport:
    """Cochain-level restriction from the retract quotient into column 0,
    composed into total cohomology; ranks and interior dimensions."""
    field = parse_coeff(coeff) if isinstance(coeff, str) else coeff
    maps = _inclusion_chain_maps(dc)
    w_qc = dc.w_qc
    kmax = max(w_qc.dim, len(total_dims(dc)) - 2)
    degrees = []
    for q in range(kmax + 1):
        # cocycle representatives of H^q(W/Gamma)
        cob_in = w_qc.boundaries[q] if 1 <= q <= w_qc.dim else ()
        cob_out = w_qc.boundaries[q + 1] if q + 1 <= w_qc.dim else ()
        nq = len(w_qc.simplices[q]) if q <= w_qc.dim else 0
        # cochain complex: d^q = transpose of boundary_{q+1}
        dq = _transpose(cob_out, nq)
        dqm = _transpose(cob_in, len(w_qc.simplices[q - 1])
                         if 1 <= q <= w_qc.dim else 0)
        reps = _cohomology_reps(field, dq, dqm, nq)
        dim_w = len(reps)
        # embed via the transposed inclusion maps into total degree q
        imgs = []
        for rep in reps:
            vec = []
            for p in range(dc.num_columns):
                qq = q - p
                if p == 0:
                    for s, cm in zip(dc.columns[0], maps):
                        m = cm.matrix(q)
                        cnt = len(s.qc.simplices[q]) if q <= s.qc.dim else 0
                        for i in range(cnt):
                            val = sum((field.mul(field.of(m[t][i]), rep[t])
                                       for t in range(len(rep))),
                                      start=field.of(0))
                            vec.append(val)
                else:
                    vec.extend([field.of(0)] * dc.cochain_dim(p, qq))
            imgs.append(vec)
        # total cohomology data in degree q
        dtot = f_matrix(field, total_differential(dc, q)) \
            if total_differential(dc, q) else []
        dtot_prev = f_matrix(field, total_differential(dc, q - 1)) \
            if q >= 1 and total_differential(dc, q - 1) else []
        dim_total = total_dims(dc)[q] - (f_rank(field, dtot) if dtot else 0) \
            - (f_rank(field, dtot_prev) if dtot_prev else 0)
        for v in imgs:  # restriction of a cocycle is a total cocycle
            if dtot:
                out = [sum((field.mul(dtot[i][j], v[j])
                            for j in range(len(v))), start=field.of(0))
                       for i in range(len(dtot))]
                assert all(field.is_zero(x) for x in out)
        cobs = []
        if dtot_prev:
            for j in range(len(dtot_prev[0])):
                cobs.append([dtot_prev[i][j] for i in range(len(dtot_prev))])
        rank_cob = f_rank(field, cobs) if cobs else 0
        rank = (f_rank(field, cobs + imgs) - rank_cob) if imgs else 0
        degrees.append(RestrictionDegree(q, dim_w, dim_total, rank,
                                         dim_w - rank))
    name = field.name if field != "Z" else "Z"
    return RestrictionReport(name, tuple(degrees))


def _transpose(m, ncols_of_result: int):
    if not m or not m[0]:
        return []
    return [list(r) for r in zip(*m)]


def _cohomology_reps(field, dq, dqm, n):
    """Cocycle representatives spanning H^q of a cochain complex given
    d^q (out) and d^{q-1} (in) as row-major matrices."""
    from .exactla import f_kernel
    if n == 0:
        return []
    if dq:
        kernel = f_kernel(field, f_matrix(field, dq), n)
    else:
        kernel = [[field.of(int(i == j)) for j in range(n)] for i in range(n)]
    image = []
    if dqm:
        mm = f_matrix(field, dqm)
        for j in range(len(mm[0])):
            image.append([mm[i][j] for i in range(len(mm))])
    basis = [list(v) for v in image]
    rank = f_rank(field, basis) if basis else 0
    reps = []
    for v in kernel:
        if f_rank(field, basis + [list(v)]) > rank:
            reps.append(v)
            basis.append(list(v))
            rank += 1
    return reps


@dataclass(frozen=True)
class BoundaryHomologyDegree:
    degree: int
    dim_boundary: int     # dim H_q of the total chain complex
    dim_retract: int      # dim H_q(W/Gamma)
    rank: int             # rank of the inclusion-induced map


@dataclass(frozen=True)
class BoundaryHomologyReport:
    coeff: str
    degrees: tuple[BoundaryHomologyDegree, ...]


def boundary_homology(dc: DoubleComplex, coeff="Q") -> BoundaryHomologyReport:
    """Homology of the dual total complex and the rank of its map into
    the homology of the retract quotient.

    The dual boundary in degree q is the transpose of D^{q-1}; chains
    project to their column-0 components and include along the flag
    subcomplexes (the signed column-1 contributions cancel pairwise, so
    this is a chain map; asserted in the test suite)."""
    field = parse_coeff(coeff) if isinstance(coeff, str) else coeff
    maps = _inclusion_chain_maps(dc)
    w_qc = dc.w_qc
    dims = total_dims(dc)
    degrees = []
    kmax = len(dims) - 2
    for q in range(max(kmax, w_qc.dim) + 1):
        nq = dims[q] if q < len(dims) else 0
        d_down = total_differential(dc, q - 1) if q >= 1 else ()
        d_up = total_differential(dc, q)
        # dual boundary out of degree q: transpose(D^{q-1});
        # dual boundary into degree q: transpose(D^q)
        out_map = [list(r) for r in zip(*d_down)] if d_down and d_down[0] else []
        in_map = [list(r) for r in zip(*d_up)] if d_up and d_up[0] else []
        reps = _cohomology_reps(field, out_map, in_map, nq)
        dim_boundary = len(reps)
        # push a cycle into the chains of the retract quotient: column 0
        # components flow along the inclusion chain maps
        nw = len(w_qc.simplices[q]) if q <= w_qc.dim else 0
        imgs = []
        for rep in reps:
            vec = [field.of(0)] * nw
            off = 0
            for s, cm in zip(dc.columns[0], maps):
                scnt = len(s.qc.simplices[q]) if q <= s.qc.dim else 0
                m = cm.matrix(q)
                for t in range(scnt):
                    x = rep[off + t]
                    if field.is_zero(x):
                        continue
                    for i in range(nw):
                        if m[i][t]:
                            vec[i] = field.add(
                                vec[i], field.mul(field.of(m[i][t]), x))
                off += scnt
            imgs.append(vec)
        # homology of the retract quotient in degree q
        bq = w_qc.boundaries[q] if 1 <= q <= w_qc.dim else ()
        bq1 = w_qc.boundaries[q + 1] if q + 1 <= w_qc.dim else ()
        rk = f_rank(field, f_matrix(field, bq)) if bq and bq[0] else 0
        rk1 = f_rank(field, f_matrix(field, bq1)) if bq1 and bq1[0] else 0
        dim_w = nw - rk - rk1
        bnds = []
        if bq1 and bq1[0]:
            mm = f_matrix(field, bq1)
            for j in range(len(mm[0])):
                bnds.append([mm[i][j] for i in range(len(mm))])
        rank_b = f_rank(field, bnds) if bnds else 0
        nonzero_imgs = [v for v in imgs if any(not field.is_zero(x) for x in v)]
        rank = (f_rank(field, bnds + nonzero_imgs) - rank_b) \
            if nonzero_imgs else 0
        degrees.append(BoundaryHomologyDegree(q, dim_boundary, dim_w, rank))
    while degrees and degrees[-1].dim_boundary == 0 \
            and degrees[-1].dim_retract == 0:
        degrees.pop()
    name = field.name if field != "Z" else "Z"
    return BoundaryHomologyReport(name, tuple(degrees))


# ---------------------------------------------------------------------------
# Single-face maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FaceMapReport:
    flag: RationalFlag
    coeff: str
    homology_ranks: tuple[int, ...]     # H_q(W_F/..) -> H_q(W/Gamma)
    cohomology_ranks: tuple[int, ...]   # H^q(W/Gamma) -> H^q(W_F/..)
    matrices: tuple[IntMatrix, ...]     # chain-level inclusion per degree


def face_map(dc: DoubleComplex, flag: RationalFlag,
             coeff="Q") -> FaceMapReport:
    """Maps induced by one flag subcomplex inclusion, no spectral
    machinery: chain level in homology, transposed in cohomology."""
    field = parse_coeff(coeff) if isinstance(coeff, str) else coeff
    summand = None
    for s in dc.columns[0]:
        if s.flag == flag:
            summand = s
            break
    if summand is None:
        for s in dc.columns[0]:
            if flag_equivalent(flag, s.flag, dc.group) is not None:
                summand = s
                break
    if summand is None:
        raise ValueError("flag is not equivalent to a column-0 representative")
    cm = induced_map(summand.qc, dc.w_qc)
    sub_h = homology(summand.qc, field)
    hom_ranks = []
    co_ranks = []
    for q in range(dc.w_qc.dim + 1):
        mat = cm.matrix(q)
        reps = sub_h.degrees[q].representatives if q <= summand.qc.dim else ()
        imgs = []
        for rep in reps:
            vec = [sum((field.mul(field.of(mat[i][j]), field.of(rep[j])
                        if isinstance(rep[j], int) else rep[j])
                        for j in range(len(rep))), start=field.of(0))
                   for i in range(len(mat))]
            imgs.append(vec)
        bq1 = dc.w_qc.boundaries[q + 1] if q + 1 <= dc.w_qc.dim else ()
        bnds = []
        if bq1 and bq1[0]:
            mm = f_matrix(field, bq1)
            for j in range(len(mm[0])):
                bnds.append([mm[i][j] for i in range(len(mm))])
        rank_b = f_rank(field, bnds) if bnds else 0
        nonzero = [v for v in imgs if any(not field.is_zero(x) for x in v)]
        hom_ranks.append((f_rank(field, bnds + nonzero) - rank_b)
                         if nonzero else 0)
        co_ranks.append(hom_ranks[-1])  # adjoint maps have equal rank
    name = field.name if field != "Z" else "Z"
    return FaceMapReport(summand.flag, name, tuple(hom_ranks),
                         tuple(co_ranks),
                         tuple(cm.matrix(q) for q in range(dc.w_qc.dim + 1)))
