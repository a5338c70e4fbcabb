"""Homotopy invariants, ellipticity, and the Hilali quotient of Sullivan models."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import prod

from .algebra import ModelError, Polynomial, SullivanModel, dimension_formula, substitute
from .cohomology import _single_betti, components, convolve
from .linalg import exact_rank

ELLIPTIC = "elliptic"
NOT_ELLIPTIC = "not elliptic"
UNDECIDED = "undecided at cap"


class NotEllipticError(ModelError):
    pass


@dataclass(frozen=True)
class Exponents:
    even: tuple  # a_i with 2 a_i = even generator degree
    odd: tuple  # b_i with 2 b_i - 1 = odd generator degree

    @classmethod
    def of(cls, m: SullivanModel) -> "Exponents":
        return cls(
            tuple(sorted(g.degree // 2 for g in m.gens if g.even)),
            tuple(sorted((g.degree + 1) // 2 for g in m.gens if g.odd)),
        )

    def formal_dimension(self) -> int:
        return sum(2 * b - 1 for b in self.odd) - sum(2 * a - 1 for a in self.even)


# -- linear part ------------------------------------------------------------


def homotopy_dims(m: SullivanModel) -> dict:
    """dim H^k(V, d0) per degree, from the linear part of d alone."""
    by_deg = {}
    for g in m.gens:
        by_deg.setdefault(g.degree, []).append(g)
    rank = {}
    for k, gs in by_deg.items():
        rank[k] = exact_rank(m.d[g.index].linear_part() for g in gs)
    return {
        k: len(gs) - rank[k] - rank.get(k - 1, 0)
        for k, gs in sorted(by_deg.items())
        if len(gs) - rank[k] - rank.get(k - 1, 0)
    }


@dataclass(frozen=True)
class PureReduction:
    original: SullivanModel
    minimal: SullivanModel
    pure: SullivanModel
    cancelled_pairs: tuple  # (generator, partner hit by its linear part)
    pi_dims: dict  # degree -> dim pi_k, read off the minimal part

    @property
    def dim_pi_even(self):
        return sum(v for k, v in self.pi_dims.items() if k % 2 == 0)

    @property
    def dim_pi_odd(self):
        return sum(v for k, v in self.pi_dims.items() if k % 2 == 1)

    @property
    def dim_pi(self):
        return self.dim_pi_even + self.dim_pi_odd

    @property
    def naive_formal_dimension(self) -> int:
        return dimension_formula(self.original)

    @property
    def formal_dimension(self) -> int:
        return dimension_formula(self.minimal)


def cancel_pair(m: SullivanModel, src: int, dst: int) -> SullivanModel:
    """Quotient by the contractible ideal (g, dg) where d0(g) involves ``dst``.

    ``dst`` is traded for dg in the generating set, so setting g = dg = 0
    substitutes dst := -(dg - c*dst)/c everywhere.
    """
    c = m.d[src].linear_part()[dst]
    keep = [k for k in range(len(m.gens)) if k not in (src, dst)]
    shell = SullivanModel(m.name, [(m.gens[k].name, m.gens[k].degree) for k in keep])
    pos = {old: new for new, old in enumerate(keep)}

    def remap(p: Polynomial) -> Polynomial:
        terms = {}
        for mono, coef in p.terms.items():
            if mono[src] or mono[dst]:
                raise ModelError("unexpected occurrence of a cancelled generator")
            terms[tuple(mono[k] for k in keep)] = coef
        return Polynomial(shell.gens, terms)

    rest = m.d[src] - Polynomial.generator(m.gens, dst) * c
    images = [None] * len(m.gens)
    for k in keep:
        images[k] = Polynomial.generator(shell.gens, pos[k])
    images[src] = Polynomial.zero(shell.gens)
    images[dst] = remap(rest) * Fraction(-1, 1) * (1 / Fraction(c))
    d = {m.gens[k].name: substitute(m.d[k], images, shell.gens) for k in keep}
    return SullivanModel(m.name, shell.gens, d)


def associated_pure(m: SullivanModel) -> SullivanModel:
    """Keep only the Lambda(V^even) part of d on odd generators; kill d on evens."""
    d = {}
    for g, p in zip(m.gens, m.d):
        if g.odd:
            d[g.name] = Polynomial(
                m.gens,
                {mono: c for mono, c in p.terms.items() if not any(mono[i] for i, h in enumerate(m.gens) if h.odd)},
            )
    return SullivanModel(f"{m.name}_pure", m.gens, d)


def linear_part_reduction(m: SullivanModel) -> PureReduction:
    """Cancel contractible pairs until the linear part of d vanishes."""
    cur = m
    pairs = []
    while True:
        hit = next(((i, p.linear_part()) for i, p in enumerate(cur.d) if p.linear_part()), None)
        if hit is None:
            break
        i, lp = hit
        j = max(lp)
        pairs.append((cur.gens[i].name, cur.gens[j].name))
        cur = cancel_pair(cur, i, j)
    pi = {}
    for g in cur.gens:
        pi[g.degree] = pi.get(g.degree, 0) + 1
    return PureReduction(m, cur, associated_pure(cur), tuple(pairs), dict(sorted(pi.items())))


# -- ellipticity ------------------------------------------------------------


@dataclass(frozen=True)
class EllipticityResult:
    status: str
    windows: tuple = ()  # (component name, window start, window length, status)

    def __bool__(self):
        return self.status == ELLIPTIC

    @property
    def decided(self):
        return self.status != UNDECIDED


def _pure_quotient(comp: SullivanModel):
    """Even-only algebra and the pure images of odd generators in it."""
    evens = [g for g in comp.gens if g.even]
    ring = SullivanModel(f"{comp.name}_even", [(g.name, g.degree) for g in evens])
    idx = [g.index for g in evens]
    rels = []
    for g, p in zip(comp.gens, comp.d):
        if not g.odd:
            continue
        terms = {}
        for mono, c in p.terms.items():
            if any(mono[h.index] for h in comp.gens if h.odd):
                continue
            terms[tuple(mono[i] for i in idx)] = c
        if terms:
            rels.append(Polynomial(ring.gens, terms))
    return ring, rels


def quotient_dims(ring: SullivanModel, rels: list, lo: int, hi: int) -> dict:
    """dim of Lambda(V^even)/(rels) in each degree of [lo, hi]."""
    bases = ring.monomials_by_degree(hi)
    reldeg = [(r, r.degree()) for r in rels]
    out = {}
    for k in range(lo, hi + 1):
        basis = bases.get(k, [])
        if not basis:
            out[k] = 0
            continue
        rows = []
        for r, dr in reldeg:
            for mu in bases.get(k - dr, []):
                rows.append((r * Polynomial.monomial(ring.gens, mu)).terms)
        out[k] = len(basis) - exact_rank(rows)
    return out


def _component_ellipticity(comp: SullivanModel, cap):
    ring, rels = _pure_quotient(comp)
    if not ring.gens:
        return ELLIPTIC, 1, 0
    width = max(g.degree for g in ring.gens)
    start = max(1, dimension_formula(comp) + 1)
    if cap is None or cap >= start + width - 1:
        dims = quotient_dims(ring, rels, start, start + width - 1)
        return (ELLIPTIC if not any(dims.values()) else NOT_ELLIPTIC), start, width
    # cap below the certification window: only a vanishing window can decide
    dims = quotient_dims(ring, rels, 1, cap)
    run = 0
    for k in range(1, cap + 1):
        run = run + 1 if dims[k] == 0 else 0
        if run >= width:
            return ELLIPTIC, k - width + 1, width
    return UNDECIDED, start, width


def ellipticity_check(m: SullivanModel, cap: int | None = None) -> EllipticityResult:
    """Decide finite-dimensionality of cohomology via the pure quotient.

    If the quotient of Lambda(V^even) by the pure images of the odd
    generators vanishes on ``width`` consecutive degrees (width = largest even
    generator degree) it vanishes from there on.  An elliptic minimal model
    must vanish right above its dimension-formula degree, so that window
    decides.  With an explicit ``cap`` below it the result may be UNDECIDED.
    """
    minimal = linear_part_reduction(m).minimal if not m.is_minimal() else m
    status = ELLIPTIC
    windows = []
    for comp in components(minimal):
        s, start, width = _component_ellipticity(comp, cap)
        windows.append((comp.name, start, width, s))
        if s == NOT_ELLIPTIC:
            status = NOT_ELLIPTIC
        elif s == UNDECIDED and status == ELLIPTIC:
            status = UNDECIDED
    return EllipticityResult(status, tuple(windows))


# -- invariants -------------------------------------------------------------


@dataclass(frozen=True)
class EllipticInvariants:
    dim_pi_even: int
    dim_pi_odd: int
    chi_pi: int
    chi: int
    formal_dimension: int
    dim_H_total: int
    hilali: Fraction
    betti: dict = field(default_factory=dict, compare=False)
    exponents: Exponents | None = field(default=None, compare=False)

    @property
    def dim_pi(self) -> int:
        return self.dim_pi_even + self.dim_pi_odd

    @property
    def is_f0(self) -> bool:
        return self.chi > 0


def _betti_of_minimal(minimal: SullivanModel) -> dict:
    betti = {0: 1}
    for comp in components(minimal):
        betti = convolve(betti, _single_betti(comp, max(dimension_formula(comp), 0)))
    return {k: v for k, v in sorted(betti.items()) if v}


def invariants(m: SullivanModel) -> EllipticInvariants:
    red = linear_part_reduction(m)
    minimal = red.minimal
    ell = ellipticity_check(minimal)
    if not ell:
        raise NotEllipticError(f"model {m.name} is not elliptic ({ell.status})")
    betti = _betti_of_minimal(minimal)
    dim_h = sum(betti.values())
    ex = Exponents.of(minimal)
    return EllipticInvariants(
        dim_pi_even=red.dim_pi_even,
        dim_pi_odd=red.dim_pi_odd,
        chi_pi=red.dim_pi_odd - red.dim_pi_even,
        chi=sum((-1) ** k * b for k, b in betti.items()),
        formal_dimension=ex.formal_dimension(),
        dim_H_total=dim_h,
        hilali=Fraction(red.dim_pi, dim_h),
        betti=betti,
        exponents=ex,
    )


@dataclass(frozen=True)
class F0Check:
    is_f0: bool
    pi_balanced: bool  # dim pi_even == dim pi_odd
    predicted_dim_H: Fraction | None
    dim_H_total: int

    @property
    def formula_holds(self):
        return self.predicted_dim_H is None or self.predicted_dim_H == self.dim_H_total


def f0_check_and_formula(m: SullivanModel, inv: EllipticInvariants | None = None) -> F0Check:
    inv = inv or invariants(m)
    predicted = None
    if inv.is_f0:
        ex = inv.exponents
        predicted = Fraction(prod(ex.odd), prod(ex.even))
    return F0Check(inv.is_f0, inv.dim_pi_even == inv.dim_pi_odd, predicted, inv.dim_H_total)


@dataclass(frozen=True)
class ClassPredicates:
    is_pure: bool
    is_two_stage: bool
    w0: tuple  # closed odd generators
    w1: tuple  # remaining odd generators


def class_predicates(m: SullivanModel) -> ClassPredicates:
    """Pure / two-stage tests with the greedy split W0 = closed odd generators."""
    odd_idx = {g.index for g in m.gens if g.odd}
    evens_closed = all(not m.d[g.index] for g in m.gens if g.even)
    w0 = [g for g in m.gens if g.odd and not m.d[g.index]]
    w1 = [g for g in m.gens if g.odd and m.d[g.index]]
    w0_idx = {g.index for g in w0}
    pure = evens_closed and all(not (m.d[g.index].generators_used() & odd_idx) for g in w1)
    two_stage = evens_closed and all(
        m.d[g.index].generators_used() <= ({h.index for h in m.gens if h.even} | w0_idx) for g in w1
    )
    return ClassPredicates(pure, two_stage, tuple(g.name for g in w0), tuple(g.name for g in w1))


def star_type_check(m: SullivanModel, inv: EllipticInvariants | None = None) -> bool:
    """dim pi_odd = 2 and dim pi_even = 1."""
    inv = inv or invariants(m)
    return inv.dim_pi_odd == 2 and inv.dim_pi_even == 1


def formality_fact(m: SullivanModel):
    """Formality from the constructed-fact rules, or None when no rule applies.

    Rules: F0 => formal; one even and two odd homotopy generators (elliptic)
    => formal; free odd generators with d = 0 => formal; tensor products of
    formal pieces are formal.
    """
    minimal = linear_part_reduction(m).minimal
    try:
        inv = invariants(minimal)
    except NotEllipticError:
        return None, "not elliptic"
    if inv.is_f0:
        return True, "F0"
    if star_type_check(minimal, inv):
        return True, "(*)-type"
    if all(g.odd and not p for g, p in zip(minimal.gens, minimal.d)):
        return True, "product of odd spheres"
    comps = components(minimal)
    if len(comps) > 1:
        notes = []
        for c in comps:
            ok, why = formality_fact(c)
            if not ok:
                return None, f"component {c.name}: no rule applies"
            notes.append(why)
        return True, "product of " + ", ".join(notes)
    return None, "no rule applies"
