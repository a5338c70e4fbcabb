"""Degreewise cohomology of Sullivan models by exact elimination."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import Polynomial, SullivanModel
from .linalg import RowEchelon, exact_rank, nullspace

OK = "ok"
TOP_AT_CAP = "cap reached with nonzero top cohomology"


@dataclass(frozen=True)
class CochainMatrix:
    """Matrix of d from degree ``degree`` to ``degree + 1``."""

    degree: int
    source: list  # monomials of degree k (columns)
    target: list  # monomials of degree k+1 (rows)
    entries: dict  # (row, col) -> Fraction

    @property
    def shape(self):
        return len(self.target), len(self.source)

    def dense(self):
        rows, cols = self.shape
        M = [[Fraction(0)] * cols for _ in range(rows)]
        for (i, j), v in self.entries.items():
            M[i][j] = v
        return M


def differential_matrix(m: SullivanModel, k: int) -> CochainMatrix:
    source = m.monomial_basis(k)
    target = m.monomial_basis(k + 1)
    pos = {t: i for i, t in enumerate(target)}
    entries = {}
    for j, mono in enumerate(source):
        for t, c in m.d_monomial(mono).items():
            entries[(pos[t], j)] = c
    return CochainMatrix(k, source, target, entries)


def differential_rank(m: SullivanModel, k: int, basis=None) -> int:
    if basis is None:
        basis = m.monomial_basis(k)
    return exact_rank(m.d_monomial(mono) for mono in basis)


def betti_number(m: SullivanModel, k: int) -> int:
    if k < 0:
        return 0
    basis = m.monomial_basis(k)
    if not basis:
        return 0
    rk = differential_rank(m, k, basis)
    rk_prev = differential_rank(m, k - 1) if k >= 1 else 0
    return len(basis) - rk - rk_prev


@dataclass
class BettiTable:
    betti: dict  # degree -> nonzero Betti number
    cap: int
    status: str = OK
    formal_dimension: int = field(init=False)
    total: int = field(init=False)

    def __post_init__(self):
        self.betti = {k: v for k, v in sorted(self.betti.items()) if v}
        self.formal_dimension = max(self.betti, default=0)
        self.total = sum(self.betti.values())

    def __getitem__(self, k):
        return self.betti.get(k, 0)

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** k * b for k, b in self.betti.items())


def components(m: SullivanModel) -> list:
    """Split into sub-algebras whose tensor product is ``m`` (as DGAs)."""
    n = len(m.gens)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, p in enumerate(m.d):
        for j in p.generators_used():
            a, b = find(i), find(j)
            if a != b:
                parent[a] = b
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    if len(groups) == 1:
        return [m]
    return [m.restricted(idx, name=f"{m.name}[{k}]") for k, idx in enumerate(sorted(groups.values()))]


_CACHE = {}
_CACHE_LIMIT = 20000


def _single_betti(m: SullivanModel, cap: int) -> dict:
    key = (m.key(), cap)
    hit = _CACHE.get(key)
    if hit is not None:
        return hit
    bases = m.monomials_by_degree(cap)
    ranks = {}
    for k in sorted(bases):
        ranks[k] = exact_rank(m.d_monomial(mono) for mono in bases[k])
    out = {}
    for k, basis in bases.items():
        b = len(basis) - ranks[k] - ranks.get(k - 1, 0)
        if b:
            out[k] = b
    if len(_CACHE) > _CACHE_LIMIT:
        _CACHE.clear()
    _CACHE[key] = out
    return out


def convolve(a: dict, b: dict, cap: int | None = None) -> dict:
    out = {}
    for i, x in a.items():
        for j, y in b.items():
            if cap is None or i + j <= cap:
                out[i + j] = out.get(i + j, 0) + x * y
    return out


def betti_table(m: SullivanModel, cap: int) -> BettiTable:
    """All Betti numbers through ``cap``; never silently truncates."""
    if cap < 0:
        raise ValueError("cap must be >= 0")
    betti = {0: 1}
    for comp in components(m):
        betti = convolve(betti, _single_betti(comp, cap), cap)
    table = BettiTable(betti, cap)
    if table[cap]:
        table.status = TOP_AT_CAP
    return table


def poincare_check(t: BettiTable) -> bool:
    n = t.formal_dimension
    return all(t[k] == t[n - k] for k in range(n + 1))


def _vector_to_poly(m, basis, vec):
    return Polynomial(m.gens, {mono: c for mono, c in zip(basis, vec) if c})


def cocycles(m: SullivanModel, k: int) -> list:
    """Basis of the degree-k cocycles as polynomials."""
    D = differential_matrix(m, k)
    rows, cols = D.shape
    if cols == 0:
        return []
    return [_vector_to_poly(m, D.source, v) for v in nullspace(D.dense(), cols)]


def coboundary_rows(m: SullivanModel, k: int) -> list:
    if k < 1:
        return []
    return [m.d_monomial(mono) for mono in m.monomial_basis(k - 1)]


def cohomology_basis(m: SullivanModel, k: int) -> list:
    """Cocycle representatives of a basis of H^k."""
    ech = RowEchelon()
    for row in coboundary_rows(m, k):
        ech.add(row)
    reps = []
    for z in cocycles(m, k):
        if ech.add(dict(z.terms)):
            reps.append(z)
    return reps


@dataclass(frozen=True)
class RestrictionCheck:
    surjective: bool
    per_degree: dict  # k -> (dim of image, betti_k(F))
    first_failure: int | None


def project_terms(terms: dict, keep: list) -> dict:
    """Set every generator outside ``keep`` (sorted indices) to zero."""
    keepset = set(keep)
    out = {}
    for mono, c in terms.items():
        if any(e for i, e in enumerate(mono) if e and i not in keepset):
            continue
        key = tuple(mono[i] for i in keep)
        out[key] = out.get(key, 0) + c
    return {k: v for k, v in out.items() if v}


def restriction_to_fiber(total: SullivanModel, fiber: SullivanModel, fiber_indices: list, cap: int) -> RestrictionCheck:
    """Does H*(total) -> H*(fiber) hit every class in degrees <= cap?

    ``fiber_indices`` are the positions of the fiber generators inside
    ``total`` (in fiber order); all other generators are sent to zero.
    """
    per = {}
    first = None
    for k in range(cap + 1):
        bF = betti_number(fiber, k)
        if not bF:
            continue
        ech = RowEchelon()
        for row in coboundary_rows(fiber, k):
            ech.add(row)
        base_rank = ech.rank
        for z in cocycles(total, k):
            ech.add(project_terms(z.terms, fiber_indices))
        img = ech.rank - base_rank
        per[k] = (img, bF)
        if img < bF and first is None:
            first = k
    return RestrictionCheck(first is None, per, first)
