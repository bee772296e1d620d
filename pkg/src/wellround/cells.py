"""Cells of the well-rounded retract and their orbit complexes.

A cell is determined by its minimal-vector configuration S: the forms
with A[v] = 1 exactly on +-S and A[w] > 1 for every other integer
vector.  Feasibility and interior witnesses come from exact LPs over the
symmetric-matrix coordinates, with the infinite constraint family
certified by a cutting-plane loop (enumerate below the current witness,
add violators, repeat).  Faces carry larger configurations, cofaces
smaller ones; orbit enumeration walks the face/coface graph and
canonicalizes with the configuration-equivalence search.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

from .exactla import (
    OPTIMAL, UNBOUNDED, IntMatrix, IntVector, RatMatrix, int_matvec,
    int_transpose, lp, saturation,
)
from .flags import RationalFlag, flag_equivalent
from .lattice import (
    GramForm, GroupSpec, VectorConfig, canonical_config, canonical_vector,
    config_equiv, config_rank, config_spans, minimal_vectors, normalize,
    vectors_below,
)
from .retraction import ScalingVector, orthant_bound, retract, scale_along_flag


class NotSpanning(ValueError):
    """The configuration does not span Q^n, so it bounds no cell."""


class Infeasible(ValueError):
    """No form has exactly this configuration as its minimal vectors."""


class DimensionUnsupported(ValueError):
    """Enumeration is guarded to n <= 4 (n = 4 behind the experimental flag)."""


# contact enumeration radius: tight vectors of neighboring faces are
# collected below this witness value (completeness of the face search is
# cross-checked by the structural acceptance identities)
CONTACT_RADIUS = Fraction(4)

_MAX_CUTTING_ROUNDS = 200

# cells and their faces depend only on the configuration, and closures are
# re-explored constantly (orbit walks, subdivisions, flag subcomplexes), so
# the LP-heavy computations are memoized by configuration
_CELL_CACHE: dict = {}
_FACES_CACHE: dict = {}
_COFACES_CACHE: dict = {}


@dataclass(frozen=True)
class Cell:
    config: VectorConfig
    dim: int = field(compare=False)
    witness: GramForm = field(compare=False)
    cert_bound: Fraction = field(compare=False)
    contacts: VectorConfig = field(compare=False, repr=False)

    @property
    def n(self) -> int:
        return len(self.config[0])


def _sym_pairs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i, n)]


def _value_coeffs(pairs, v: Sequence[int]) -> list[Fraction]:
    """Row of the linear functional A -> A[v] in upper-triangle coordinates."""
    out = []
    for (i, j) in pairs:
        out.append(Fraction(v[i] * v[j] if i == j else 2 * v[i] * v[j]))
    return out


def _gram_from_point(n: int, pairs, point) -> RatMatrix:
    rows = [[Fraction(0)] * n for _ in range(n)]
    for (i, j), x in zip(pairs, point):
        rows[i][j] = x
        rows[j][i] = x
    return RatMatrix.from_rows(rows)


def _pd_violation(a: RatMatrix) -> Optional[IntVector]:
    """An integer vector with nonpositive squared length, if one exists."""
    n = a.rows
    lmat = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    d: list[Fraction] = []
    for j in range(n):
        dj = a[j, j] - sum(lmat[j][k] ** 2 * d[k] for k in range(j))
        if dj <= 0:
            x = [Fraction(0)] * n
            x[j] = Fraction(1)
            for i in reversed(range(j)):
                x[i] = -sum(lmat[k][i] * x[k] for k in range(i + 1, j + 1))
            denom = 1
            for c in x:
                denom = denom * c.denominator // _gcd(denom, c.denominator)
            vec = tuple(int(c * denom) for c in x)
            return canonical_vector(vec)
        d.append(dj)
        for i in range(j + 1, n):
            lmat[i][j] = (a[i, j] - sum(lmat[i][k] * lmat[j][k] * d[k]
                                        for k in range(j))) / dj
    return None


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _config_sym_rank(config: VectorConfig) -> int:
    n = len(config[0])
    pairs = _sym_pairs(n)
    rows = [[Fraction(v[i] * v[j]) for (i, j) in pairs] for v in config]
    return RatMatrix.from_rows(rows).rank()


def cell_dimension(config: VectorConfig) -> int:
    n = len(config[0])
    return n * (n + 1) // 2 - _config_sym_rank(config)


def _initial_candidates(config: VectorConfig, n: int) -> set[IntVector]:
    """Seed constraint vectors guaranteeing a bounded LP: a basis from the
    configuration, its pairwise sums/differences, and the unit vectors."""
    cands: set[IntVector] = set()
    basis: list[IntVector] = []
    for v in config:
        if config_rank(tuple(basis) + (v,)) > len(basis):
            basis.append(v)
    for i in range(n):
        cands.add(canonical_vector(tuple(int(k == i) for k in range(n))))
    for u, w in combinations(basis, 2):
        cands.add(canonical_vector(tuple(a + b for a, b in zip(u, w))))
        cands.add(canonical_vector(tuple(a - b for a, b in zip(u, w))))
    return {v for v in cands if v not in config}


class _Chart:
    """Affine parameterization of {A symmetric : A[v] = 1 for v in eqs}:
    A = origin + sum t_i dirs_i.  Shrinks every LP to the cell dimension
    plus a slack variable."""

    def __init__(self, eqs: VectorConfig, n: int):
        self.n = n
        self.pairs = _sym_pairs(n)
        rows = [_value_coeffs(self.pairs, v) for v in eqs]
        mat = RatMatrix.from_rows(rows)
        sol = mat.solve([Fraction(1)] * len(eqs))
        self.ok = sol is not None
        if not self.ok:
            return
        self.origin = sol
        self.dirs = mat.kernel()

    def functional(self, w) -> tuple[Fraction, list[Fraction]]:
        """A[w] = const + row . t on the chart."""
        c = _value_coeffs(self.pairs, w)
        const = sum(a * b for a, b in zip(c, self.origin))
        row = [sum(a * b for a, b in zip(c, d)) for d in self.dirs]
        return const, row

    def gram_at(self, t: Sequence[Fraction]) -> RatMatrix:
        point = list(self.origin)
        for x, d in zip(t, self.dirs):
            if x:
                point = [p + x * y for p, y in zip(point, d)]
        return _gram_from_point(self.n, self.pairs, point)

    def max_slack(self, cands: Sequence[IntVector]):
        """Maximize delta with A[w] >= 1 + delta on the chart; returns
        (delta, gram) or None when even the closed constraints fail."""
        k = len(self.dirs)
        if k == 0:
            delta = min((self.functional(w)[0] - 1 for w in cands),
                        default=Fraction(1))
            delta = min(delta, Fraction(1))
            if delta < 0:
                return None
            return delta, self.gram_at(())
        ge_lhs = []
        ge_rhs = []
        for w in cands:
            const, row = self.functional(w)
            ge_lhs.append(row + [Fraction(-1)])
            ge_rhs.append(Fraction(1) - const)
        zero = [Fraction(0)] * k
        ge_lhs.append(zero + [Fraction(-1)])
        ge_rhs.append(Fraction(-1))      # delta <= 1
        ge_lhs.append(zero + [Fraction(1)])
        ge_rhs.append(Fraction(-1))      # delta >= -1
        res = lp(zero + [Fraction(1)], (), (), ge_lhs, ge_rhs)
        if res.status != OPTIMAL:
            return None
        if res.point[-1] < 0:
            return None
        return res.point[-1], self.gram_at(res.point[:-1])

    def max_value(self, w: IntVector, cands: Sequence[IntVector]) -> Optional[Fraction]:
        """Maximum of A[w] over the closed chart polytope, or None if empty."""
        k = len(self.dirs)
        const, row = self.functional(w)
        if k == 0:
            if any(self.functional(u)[0] < 1 for u in cands):
                return None
            return const
        ge_lhs = []
        ge_rhs = []
        for u in cands:
            c2, r2 = self.functional(u)
            ge_lhs.append(r2)
            ge_rhs.append(Fraction(1) - c2)
        res = lp(row, (), (), ge_lhs, ge_rhs)
        if res.status == UNBOUNDED:
            raise AssertionError("chart polytope is unbounded")
        if res.status != OPTIMAL:
            return None
        return const + res.objective


def cell_from_config(config: VectorConfig, tighten: bool = False) -> Cell:
    """The cell with exactly this minimal-vector configuration.

    Raises NotSpanning when the vectors do not span, Infeasible when no
    positive-definite form attains the configuration exactly (with
    tighten=True, forced-tight vectors are absorbed instead and the
    closure cell is returned).  The witness is certified: a complete
    enumeration below the contact radius confirms the configuration.
    """
    config = canonical_config(config)
    key = (config, tighten)
    cached = _CELL_CACHE.get(key)
    if cached is not None:
        if isinstance(cached, Exception):
            raise cached
        return cached
    try:
        cell = _cell_from_config_uncached(config, tighten)
    except (Infeasible, NotSpanning) as exc:
        _CELL_CACHE[key] = exc
        raise
    _CELL_CACHE[key] = cell
    return cell


def _cell_from_config_uncached(config: VectorConfig, tighten: bool) -> Cell:
    if not config:
        raise NotSpanning("empty configuration")
    n = len(config[0])
    if not config_spans(config, n):
        raise NotSpanning("configuration does not span Q^n")
    cands = _initial_candidates(config, n)
    chart = _Chart(config, n)
    if not chart.ok:
        raise Infeasible("tightness equations are inconsistent")
    for _ in range(_MAX_CUTTING_ROUNDS):
        sol = chart.max_slack(sorted(cands))
        if sol is None or sol[0] == 0:
            if not tighten:
                raise Infeasible("no interior point")
            ordered = sorted(cands)
            forced = _forced_tight(chart, ordered)
            if not forced:
                raise Infeasible("no interior point and nothing to absorb")
            config = canonical_config(config + forced)
            cands = {w for w in cands if w not in config} | \
                _initial_candidates(config, n)
            chart = _Chart(config, n)
            if not chart.ok:
                raise Infeasible("tightness equations are inconsistent")
            continue
        delta, gram = sol
        bad = _pd_violation(gram)
        if bad is not None:
            if bad in config:
                raise Infeasible("configuration vector forced nonpositive")
            cands.add(bad)
            continue
        witness = GramForm(gram)
        viol = [w for w in vectors_below(witness, 1) if w not in config]
        if viol:
            cands.update(viol)
            continue
        contacts = tuple(w for w in vectors_below(witness, CONTACT_RADIUS)
                         if w not in config)
        return Cell(config, cell_dimension(config), witness,
                    CONTACT_RADIUS, contacts)
    raise AssertionError("cutting-plane loop did not converge")


def _forced_tight(chart: _Chart, cands: Sequence[IntVector],
                  test: Optional[Sequence[IntVector]] = None) -> tuple[IntVector, ...]:
    """Candidates whose value is 1 on the whole closed chart polytope.
    Only the vectors in `test` (default: all candidates) are examined."""
    forced = []
    for w in (cands if test is None else test):
        top = chart.max_value(w, cands)
        if top is not None and top == 1:
            forced.append(w)
    return tuple(forced)


def cell_faces(cell: Cell) -> list[Cell]:
    """Proper faces reachable by making one contact vector tight and
    closing up: includes every face of codimension 1."""
    if cell.dim == 0:
        return []
    if cell.config in _FACES_CACHE:
        return list(_FACES_CACHE[cell.config])
    n = cell.n
    base_config = cell.config
    cands = list(cell.contacts)
    found: dict[VectorConfig, Cell] = {}
    for w in cands:
        tight: list[IntVector] = [w]
        while True:
            eqs = base_config + tuple(tight)
            others = [u for u in cands if u not in tight]
            chart = _Chart(eqs, n)
            if not chart.ok:
                tight = []
                break
            sol = chart.max_slack(others)
            if sol is None:
                tight = []
                break
            if sol[0] > 0:
                break
            # slack 0: some candidate is tight on the whole face; the
            # forced ones are among those tight at this optimum
            gram = sol[1]
            tight_here = []
            for u in others:
                vrow = gram.matvec(u)
                if sum(a * x for a, x in zip(vrow, u)) == 1:
                    tight_here.append(u)
            forced = _forced_tight(chart, others, test=tight_here)
            new = [u for u in forced if u not in tight]
            if not new:
                tight = []
                break
            tight.extend(new)
        if not tight:
            continue
        face_config = canonical_config(base_config + tuple(tight))
        if face_config in found:
            continue
        try:
            face = cell_from_config(face_config, tighten=True)
        except (Infeasible, NotSpanning):
            continue
        found[face.config] = face
    out = [found[k] for k in sorted(found)]
    _FACES_CACHE[cell.config] = tuple(out)
    return out


def cell_cofaces(cell: Cell) -> list[Cell]:
    """Cells of one dimension higher whose closure contains this cell:
    spanning subconfigurations whose symmetric rank drops by exactly 1."""
    config = cell.config
    if config in _COFACES_CACHE:
        return list(_COFACES_CACHE[config])
    n = cell.n
    target = _config_sym_rank(config) - 1
    if target < n:
        _COFACES_CACHE[config] = ()
        return []
    found: dict[VectorConfig, Cell] = {}
    max_drop = len(config) - 1
    for k in range(1, max_drop + 1):
        for cut in combinations(range(len(config)), k):
            sub = tuple(v for i, v in enumerate(config) if i not in cut)
            if len(sub) < n or not config_spans(sub, n):
                continue
            if _config_sym_rank(sub) != target:
                continue
            if sub in found:
                continue
            try:
                cof = cell_from_config(sub)
            except (Infeasible, NotSpanning):
                continue
            if cof.config == sub:
                found[sub] = cof
    out = [found[k] for k in sorted(found)]
    _COFACES_CACHE[config] = tuple(out)
    return out


def root_form(n: int) -> GramForm:
    """The seed form: 2 on the diagonal, 1 elsewhere (a 0-cell for n <= 4,
    verified at runtime by the enumeration)."""
    return GramForm.from_rows([[2 if i == j else 1 for j in range(n)]
                               for i in range(n)])


# ---------------------------------------------------------------------------
# Orbit complexes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitCell:
    id: int
    cell: Cell


@dataclass(frozen=True)
class Incidence:
    cell: int           # orbit id of the cell
    face: int           # orbit id of a codimension-1 face
    via: IntMatrix      # group element with via(+-actual face config) = +-rep config


@dataclass(frozen=True)
class OrbitComplex:
    group: GroupSpec
    cells: tuple[OrbitCell, ...]
    incidences: tuple[Incidence, ...]
    constraint: Optional[RationalFlag] = None

    def by_dim(self) -> dict[int, list[OrbitCell]]:
        out: dict[int, list[OrbitCell]] = {}
        for oc in self.cells:
            out.setdefault(oc.cell.dim, []).append(oc)
        return out

    @property
    def top_dim(self) -> int:
        return max(oc.cell.dim for oc in self.cells)

    def cell_by_id(self, cid: int) -> Cell:
        return self.cells[cid].cell

    def to_json(self) -> dict:
        data = {
            "group": self.group.to_json(),
            "cells": [{"id": oc.id, "dim": oc.cell.dim,
                       "config": [list(v) for v in oc.cell.config],
                       "witness": oc.cell.witness.to_json()}
                      for oc in self.cells],
            "incidences": [{"cell": inc.cell, "face": inc.face,
                            "via": [list(r) for r in inc.via]}
                           for inc in self.incidences],
        }
        if self.constraint is not None:
            data["constraint"] = self.constraint.to_json()
        return data


def _orbit_key(config: VectorConfig):
    """Group-invariant prefilter: pairings under the inverse characteristic
    form are preserved by any configuration equivalence."""
    n = len(config[0])
    q = [[Fraction(0)] * n for _ in range(n)]
    for v in config:
        for i in range(n):
            if v[i]:
                for j in range(n):
                    q[i][j] += v[i] * v[j]
    qinv = RatMatrix.from_rows(q).inverse()

    def pair(v, w):
        row = qinv.matvec(w)
        return sum(a * x for a, x in zip(row, v))

    norms = sorted(pair(v, v) for v in config)
    cross = sorted(abs(pair(v, w)) for v, w in combinations(config, 2))
    return (len(config), tuple(norms), tuple(cross))


class _OrbitIndex:
    def __init__(self, group: GroupSpec, constraint: Optional[RationalFlag]):
        self.group = group
        self.constraint = constraint
        self.orbits: list[OrbitCell] = []
        self.buckets: dict = {}

    def locate(self, cell: Cell):
        key = (cell.dim, _orbit_key(cell.config))
        for oid in self.buckets.get(key, ()):
            u = config_equiv(cell.config, self.orbits[oid].cell.config,
                             self.group, flag=self.constraint)
            if u is not None:
                return oid, u
        return None, None

    def add(self, cell: Cell) -> int:
        oid = len(self.orbits)
        self.orbits.append(OrbitCell(oid, cell))
        key = (cell.dim, _orbit_key(cell.config))
        self.buckets.setdefault(key, []).append(oid)
        return oid


def _seed_shift(group: GroupSpec) -> IntMatrix:
    """A nontrivial group element used by the reseeded enumeration."""
    n = group.n
    level = group.level if group.is_congruence else 1
    rows = [[int(i == j) for j in range(n)] for i in range(n)]
    rows[0][n - 1] = level
    return tuple(tuple(r) for r in rows)


def enumerate_complex(group: GroupSpec, seed: Cell,
                      constraint: Optional[RationalFlag] = None,
                      variant: int = 0) -> OrbitComplex:
    """BFS over the face/coface graph from a seed cell, canonicalizing
    orbits; complete because the retract (or a flag subcomplex) is
    connected and the walk descends to the orbit graph."""
    index = _OrbitIndex(group, constraint)
    if variant:
        shift = _seed_shift(group)
        moved = canonical_config(tuple(int_matvec(shift, v))
                                 for v in seed.config)
        if constraint is None or respects_flag(moved, constraint):
            seed = cell_from_config(moved)
    index.add(seed)
    queue = [0]
    incidences: list[Incidence] = []
    while queue:
        oid = queue.pop(0)
        rep = index.orbits[oid].cell
        faces = cell_faces(rep)
        cofaces = cell_cofaces(rep)
        if constraint is not None:
            for f in faces:
                if not respects_flag(f.config, constraint):
                    raise AssertionError("face left the flag subcomplex")
            cofaces = [c for c in cofaces
                       if respects_flag(c.config, constraint)]
        neighbors = faces + cofaces
        if variant:
            neighbors = list(reversed(neighbors))
        for nb in neighbors:
            fid, _ = index.locate(nb)
            if fid is None:
                fid = index.add(nb)
                queue.append(fid)
        for f in faces:
            if f.dim == rep.dim - 1:
                fid, via = index.locate(f)
                incidences.append(Incidence(oid, fid, via))
    cells = tuple(index.orbits)
    return OrbitComplex(group, cells, tuple(incidences), constraint)


def enumerate_W(group: GroupSpec, experimental_n4: bool = False,
                variant: int = 0) -> OrbitComplex:
    """Orbit cells and incidences of the whole retract mod the group."""
    n = group.n
    if n > 4 or (n == 4 and not experimental_n4):
        raise DimensionUnsupported(
            "n = 4 needs the experimental flag; n > 4 is unsupported")
    seed_form = normalize(root_form(n))
    seed = cell_from_config(minimal_vectors(seed_form).vectors)
    assert seed.dim == 0, "seed configuration is not a 0-cell"
    return enumerate_complex(group, seed, None, variant)


def expected_top_dim(n: int) -> int:
    """dim X - (n - 1) with dim X = n(n+1)/2 - 1."""
    return n * (n + 1) // 2 - 1 - (n - 1)


# ---------------------------------------------------------------------------
# Flags respected by cells; flag subcomplexes
# ---------------------------------------------------------------------------

def respects_flag(config: VectorConfig, flag: RationalFlag) -> bool:
    """True iff the configuration vectors inside each member span it."""
    for member in flag.members:
        mm = RatMatrix.from_rows(member)
        inside = tuple(v for v in config if mm.solve(v) is not None)
        if not inside or config_rank(inside) != len(member[0]):
            return False
    return True


def flags_respected_by(cell: Cell) -> list[RationalFlag]:
    """Every flag assembled from proper subspaces spanned by subsets of
    the configuration (each such span is automatically respected)."""
    n = cell.n
    spans: set[IntMatrix] = set()
    for k in range(1, n):
        for sub in combinations(cell.config, k):
            if config_rank(sub) == k:
                spans.add(saturation(int_transpose(sub)))
    members = sorted(spans, key=lambda m: (len(m[0]), m))
    contains: dict[tuple[IntMatrix, IntMatrix], bool] = {}

    def contained(a: IntMatrix, b: IntMatrix) -> bool:
        if (a, b) not in contains:
            bm = RatMatrix.from_rows(b)
            contains[(a, b)] = all(bm.solve(col) is not None
                                   for col in int_transpose(a))
        return contains[(a, b)]

    flags: list[RationalFlag] = []

    def grow(chain: list[IntMatrix], rest: list[IntMatrix]):
        if chain:
            flags.append(RationalFlag(n, tuple(chain)))
        for i, m in enumerate(rest):
            if not chain or (len(m[0]) > len(chain[-1][0])
                             and contained(chain[-1], m)):
                grow(chain + [m], rest[i + 1:])

    grow([], members)
    flags.sort(key=lambda f: f.sort_key())
    return flags


def wf_seed(group: GroupSpec, flag: RationalFlag) -> Cell:
    """A cell of the flag subcomplex: push the identity form deep into
    the orthant given by the flag's bound and retract."""
    n = group.n
    base = GramForm.identity(n)
    ob = orthant_bound(base, flag)
    s = ScalingVector.from_rho_sq(ob.t_sq)
    moved = scale_along_flag(normalize(base), flag, s)
    final = retract(moved).final_form
    seed = cell_from_config(minimal_vectors(final).vectors)
    assert respects_flag(seed.config, flag)
    return seed


def subcomplex_WF(complex: OrbitComplex, flag: RationalFlag,
                  variant: int = 0) -> OrbitComplex:
    """Orbit cells of the flag subcomplex under the flag-preserving part
    of the group: same walk, equivalence constrained to preserve the flag."""
    seed = wf_seed(complex.group, flag)
    return enumerate_complex(complex.group, seed, flag, variant)


# ---------------------------------------------------------------------------
# The small-enough test
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SmallEnoughReport:
    small_enough: bool
    cell: Optional[Cell] = None
    flag: Optional[RationalFlag] = None
    other: Optional[RationalFlag] = None
    witness: Optional[IntMatrix] = None


def is_small_enough(group: GroupSpec,
                    complex: Optional[OrbitComplex] = None) -> SmallEnoughReport:
    """Scan orbit representatives for a cell respecting two distinct
    flags that some group element carries to one another; finding none
    proves the group small enough (flag-carrying tests are exact)."""
    if complex is None:
        complex = enumerate_W(group)
    for oc in complex.cells:
        flags = flags_respected_by(oc.cell)
        by_type: dict[tuple[int, ...], list[RationalFlag]] = {}
        for f in flags:
            by_type.setdefault(f.dims, []).append(f)
        for dims, group_flags in sorted(by_type.items()):
            for f1, f2 in combinations(group_flags, 2):
                w = flag_equivalent(f1, f2, group)
                if w is not None:
                    return SmallEnoughReport(False, oc.cell, f1, f2, w)
    return SmallEnoughReport(True)
