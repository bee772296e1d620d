"""Quadratic forms on Z^n and their minimal-vector configurations.

A point of the symmetric space is a rational symmetric positive-definite
Gram matrix up to positive scaling.  This module provides exact
shortest-vector enumeration (Fincke-Pohst driven by the LDL^T
factorization, with purely rational comparisons), the arithmetic minimum
and minimal vectors, well-roundedness, homothety normalization, and
equivalence / stabilizer searches for vector configurations under
GL_n(Z), SL_n(Z) and congruence subgroups.

Squared lengths everywhere: every stored quantity is the value v^T A v,
never a square root, so all arithmetic stays in Q.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence

from .exactla import (
    IntMatrix, IntVector, RatMatrix, format_rational, int_det, int_matmul,
    int_matrix, int_matvec, int_transpose, ldlt, parse_rational,
)

Vector = IntVector
VectorConfig = tuple[IntVector, ...]


# ---------------------------------------------------------------------------
# Vectors and configurations
# ---------------------------------------------------------------------------

def canonical_vector(v: Sequence[int]) -> IntVector:
    """Sign-canonical representative of the pair {v, -v}: first nonzero
    entry positive."""
    v = tuple(int(x) for x in v)
    for x in v:
        if x > 0:
            return v
        if x < 0:
            return tuple(-y for y in v)
    return v


def is_primitive(v: Sequence[int]) -> bool:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g == 1


def canonical_config(vectors: Iterable[Sequence[int]]) -> VectorConfig:
    """Deduplicated, sign-canonical, lexicographically sorted configuration."""
    return tuple(sorted({canonical_vector(v) for v in vectors}))


def config_rank(config: Sequence[Sequence[int]]) -> int:
    if not config:
        return 0
    return RatMatrix.from_rows(config).rank()


def config_spans(config: Sequence[Sequence[int]], n: int) -> bool:
    return config_rank(config) == n


# ---------------------------------------------------------------------------
# Gram forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GramForm:
    """Symmetric positive-definite rational matrix; v -> v^T A v is the
    squared length of the lattice vector v."""

    matrix: RatMatrix

    def __post_init__(self):
        if not self.matrix.is_symmetric():
            raise ValueError("Gram matrix must be symmetric")
        ldlt(self.matrix)  # raises NotPositiveDefinite otherwise

    @staticmethod
    def from_rows(rows: Iterable[Iterable]) -> "GramForm":
        return GramForm(RatMatrix.from_rows(rows))

    @staticmethod
    def identity(n: int) -> "GramForm":
        return GramForm(RatMatrix.identity(n))

    @property
    def n(self) -> int:
        return self.matrix.rows

    def value(self, v: Sequence[int]) -> Fraction:
        """The squared length v^T A v."""
        row = self.matrix.matvec(v)
        return sum(a * Fraction(x) for a, x in zip(row, v))

    def pairing(self, v: Sequence[int], w: Sequence[int]) -> Fraction:
        row = self.matrix.matvec(w)
        return sum(a * Fraction(x) for a, x in zip(row, v))

    def scale(self, c) -> "GramForm":
        c = Fraction(c)
        if c <= 0:
            raise ValueError("scaling must be positive")
        return GramForm(self.matrix.scale(c))

    def transform(self, u: IntMatrix) -> "GramForm":
        """Change of basis: the form with matrix U^T A U."""
        um = RatMatrix.from_rows(u)
        return GramForm(um.transpose() @ self.matrix @ um)

    def to_json(self) -> dict:
        return {"n": self.n,
                "rows": [[format_rational(x) for x in row]
                         for row in self.matrix.entries]}

    @staticmethod
    def from_json(data: dict) -> "GramForm":
        rows = [[parse_rational(str(x)) for x in row] for row in data["rows"]]
        form = GramForm.from_rows(rows)
        if form.n != int(data["n"]):
            raise ValueError("dimension mismatch in Gram form JSON")
        return form


@dataclass(frozen=True)
class MinimaResult:
    min_sq: Fraction
    vectors: VectorConfig


# ---------------------------------------------------------------------------
# Exact Fincke-Pohst enumeration
# ---------------------------------------------------------------------------

def _enumerate_values(a: GramForm, bound: Fraction) -> list[tuple[IntVector, Fraction]]:
    """All sign-canonical nonzero integer vectors v with v^T A v <= bound,
    with their values.  Exact: interval endpoints are located by scanning
    out from the nearest integer, avoiding square roots entirely."""
    n = a.n
    lmat, d = ldlt(a.matrix)
    bound = Fraction(bound)
    if bound <= 0:
        return []
    # v^T A v = sum_i d_i (v_i + c_i)^2 with c_i = sum_{j>i} L[j][i] v_j
    out: list[tuple[IntVector, Fraction]] = []
    v = [0] * n

    def descend(i: int, remaining: Fraction):
        if i < 0:
            val = bound - remaining
            vec = tuple(v)
            if any(vec):
                out.append((canonical_vector(vec), val))
            return
        c = sum(lmat[j, i] * v[j] for j in range(i + 1, n))
        center = -c
        # nearest integer to the rational center = floor(center + 1/2)
        m0 = (2 * center.numerator + center.denominator) // (2 * center.denominator)
        m = m0
        while True:
            t = d[i] * (m + c) ** 2
            if t > remaining:
                break
            v[i] = m
            descend(i - 1, remaining - t)
            m += 1
        m = m0 - 1
        while True:
            t = d[i] * (m + c) ** 2
            if t > remaining:
                break
            v[i] = m
            descend(i - 1, remaining - t)
            m -= 1
        v[i] = 0

    descend(n - 1, bound)
    dedup: dict[IntVector, Fraction] = {}
    for vec, val in out:
        dedup[vec] = val
    return sorted(dedup.items())


def vectors_below(a: GramForm, bound, raw: bool = False) -> VectorConfig:
    """All +- classes of nonzero vectors with value <= bound.

    With raw=True, imprimitive vectors are kept; the default keeps only
    primitive vectors (the configuration convention).
    """
    bound = Fraction(bound)
    items = _enumerate_values(a, bound)
    if raw:
        return tuple(v for v, _ in items)
    return tuple(v for v, _ in items if is_primitive(v))


def minimal_vectors(a: GramForm) -> MinimaResult:
    """Arithmetic minimum (squared) and the set of minimal vectors."""
    start = min(a.matrix[i, i] for i in range(a.n))
    items = _enumerate_values(a, start)
    min_sq = min(val for _, val in items)
    vecs = tuple(v for v, val in items if val == min_sq)
    return MinimaResult(min_sq, vecs)


def is_well_rounded(a: GramForm) -> bool:
    """True iff the minimal vectors span Q^n."""
    return config_spans(minimal_vectors(a).vectors, a.n)


def normalize(a: GramForm) -> GramForm:
    """Rescale within the homothety class so the arithmetic minimum is 1."""
    m = minimal_vectors(a).min_sq
    if m == 1:
        return a
    return a.scale(Fraction(1) / m)


# ---------------------------------------------------------------------------
# Arithmetic groups
# ---------------------------------------------------------------------------

FAMILIES = ("gl", "sl", "gamma0", "gamma1", "gamma")


@dataclass(frozen=True)
class GroupSpec:
    """An arithmetic subgroup of GL_n(Z).

    Families: "gl", "sl" (level 1) and the congruence families "gamma0"
    (bottom row = (0,...,0,*) mod N), "gamma1" (bottom row = (0,...,0,1)
    mod N) and "gamma" (= I mod N), all inside SL_n(Z) for level N > 1.
    """

    n: int
    family: str
    level: int = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.level < 1:
            raise ValueError("level must be >= 1")
        if self.family in ("gl", "sl") and self.level != 1:
            raise ValueError(f"{self.family} takes level 1")
        if self.n < 2:
            raise ValueError("n must be >= 2")

    @property
    def is_congruence(self) -> bool:
        return self.family in ("gamma0", "gamma1", "gamma") and self.level > 1

    def contains(self, u: IntMatrix) -> bool:
        u = int_matrix(u)
        if len(u) != self.n or any(len(r) != self.n for r in u):
            return False
        det = int_det(u)
        if self.family == "gl":
            return abs(det) == 1
        if det != 1:
            return False
        if self.level == 1:
            return True
        return self.pattern_holds_mod(u)

    def pattern_holds_mod(self, u: IntMatrix) -> bool:
        """The congruence condition on the reduction mod the level."""
        nn, mod = self.n, self.level
        if self.family == "gamma0":
            return all(u[nn - 1][j] % mod == 0 for j in range(nn - 1))
        if self.family == "gamma1":
            return (all(u[nn - 1][j] % mod == 0 for j in range(nn - 1))
                    and u[nn - 1][nn - 1] % mod == 1 % mod)
        if self.family == "gamma":
            return all(u[i][j] % mod == (1 if i == j else 0) % mod
                       for i in range(nn) for j in range(nn))
        return True

    def to_json(self) -> dict:
        return {"n": self.n, "family": self.family, "level": self.level}

    @staticmethod
    def from_json(data: dict) -> "GroupSpec":
        return GroupSpec(int(data["n"]), str(data["family"]).lower(),
                         int(data.get("level", 1)))


# ---------------------------------------------------------------------------
# Configuration equivalence and stabilizers
# ---------------------------------------------------------------------------

def _char_form_inverse(config: VectorConfig) -> RatMatrix:
    """Inverse of the characteristic form Q_S = sum vv^T of a spanning
    configuration; its pairings are preserved by any equivalence."""
    n = len(config[0])
    q = [[Fraction(0)] * n for _ in range(n)]
    for v in config:
        for i in range(n):
            if v[i]:
                for j in range(n):
                    q[i][j] += v[i] * v[j]
    return RatMatrix.from_rows(q).inverse()


def _independent_basis(config: VectorConfig, n: int) -> tuple[int, ...]:
    """Indices of a deterministic Q-basis chosen from the configuration."""
    chosen: list[int] = []
    rows: list[Sequence[int]] = []
    for idx, v in enumerate(config):
        if config_rank(tuple(rows) + (v,)) > len(rows):
            chosen.append(idx)
            rows.append(v)
            if len(rows) == n:
                return tuple(chosen)
    raise ValueError("configuration does not span")


def _flag_preserved(u: IntMatrix, flag) -> bool:
    from .flags import in_parabolic
    return in_parabolic(u, flag)


def _equiv_search(src: VectorConfig, dst: VectorConfig, group: GroupSpec,
                  flag=None, find_all: bool = False) -> list[IntMatrix]:
    """Backtracking search for U in the group with U(+-src) = +-dst,
    optionally preserving a flag.  Complete by exhaustion over images of
    a basis of src; the characteristic-form pairing is the pruning
    invariant."""
    n = group.n
    if len(src) != len(dst):
        return []
    if not (config_spans(src, n) and config_spans(dst, n)):
        raise ValueError("configurations must span Q^n")
    qs_inv = _char_form_inverse(src)
    qd_inv = _char_form_inverse(dst)

    def pair(qinv: RatMatrix, v: Sequence[int], w: Sequence[int]) -> Fraction:
        row = qinv.matvec(w)
        return sum(a * x for a, x in zip(row, v))

    src_norms = sorted(pair(qs_inv, v, v) for v in src)
    dst_norms = sorted(pair(qd_inv, v, v) for v in dst)
    if src_norms != dst_norms:
        return []

    basis_idx = _independent_basis(src, n)
    basis = [src[i] for i in basis_idx]
    bmat = RatMatrix.from_rows(int_transpose(tuple(basis)))
    bmat_inv = bmat.inverse()
    candidates = [w for w in dst] + [tuple(-x for x in w) for w in dst]
    dst_set = frozenset(dst)

    results: list[IntMatrix] = []
    images: list[IntVector] = []

    def accept() -> Optional[IntMatrix]:
        w = RatMatrix.from_rows(int_transpose(tuple(images)))
        u = w @ bmat_inv
        if not u.is_integral():
            return None
        ui = u.to_int()
        if abs(int_det(ui)) != 1:
            return None
        mapped = {canonical_vector(int_matvec(ui, v)) for v in src}
        if mapped != dst_set:
            return None
        if not group.contains(ui):
            return None
        if flag is not None and not _flag_preserved(ui, flag):
            return None
        return ui

    def backtrack(depth: int):
        if results and not find_all:
            return
        if depth == n:
            u = accept()
            if u is not None:
                results.append(u)
            return
        v = basis[depth]
        nv = pair(qs_inv, v, v)
        for w in candidates:
            if pair(qd_inv, w, w) != nv:
                continue
            ok = True
            for k in range(depth):
                if pair(qd_inv, images[k], w) != pair(qs_inv, basis[k], v):
                    ok = False
                    break
            if not ok:
                continue
            images.append(w)
            backtrack(depth + 1)
            images.pop()
            if results and not find_all:
                return

    backtrack(0)
    return results


def config_equiv(src: VectorConfig, dst: VectorConfig, group: GroupSpec,
                 flag=None) -> Optional[IntMatrix]:
    """A witness U in the group with U(+-src) = +-dst, preserving `flag`
    when given; None means provably inequivalent (the search is complete)."""
    src = canonical_config(src)
    dst = canonical_config(dst)
    found = _equiv_search(src, dst, group, flag=flag, find_all=False)
    return found[0] if found else None


@dataclass(frozen=True)
class StabilizerResult:
    elements: tuple[IntMatrix, ...]
    generators: tuple[IntMatrix, ...]

    @property
    def order(self) -> int:
        return len(self.elements)


def config_stabilizer(config: VectorConfig, group: GroupSpec,
                      flag=None) -> StabilizerResult:
    """The finite group {U in the group : U(+-config) = +-config},
    optionally intersected with a flag stabilizer."""
    config = canonical_config(config)
    elements = _equiv_search(config, config, group, flag=flag, find_all=True)
    elements = tuple(sorted(elements))
    # greedy generating subset
    gens: list[IntMatrix] = []
    identity = tuple(tuple(int(i == j) for j in range(group.n))
                     for i in range(group.n))
    closure = {identity}
    for e in elements:
        if e in closure:
            continue
        gens.append(e)
        frontier = list(closure)
        closure.add(e)
        queue = [e]
        while queue:
            x = queue.pop()
            for g in gens:
                for y in (int_matmul(x, g), int_matmul(g, x)):
                    if y not in closure:
                        closure.add(y)
                        queue.append(y)
    return StabilizerResult(elements, tuple(gens))


# ---------------------------------------------------------------------------
# JSON helpers for configurations
# ---------------------------------------------------------------------------

def config_to_json(config: VectorConfig) -> list[list[int]]:
    return [list(v) for v in config]


def config_from_json(data: Sequence[Sequence[int]]) -> VectorConfig:
    return canonical_config(tuple(tuple(int(x) for x in v) for v in data))
