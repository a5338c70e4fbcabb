"""Relative models of fibrations F -> X -> B and the inequalities checked on them.

A fibration is given by a base model (Lambda W, d), a fiber model
(Lambda V, dbar) and a perturbation: for each fiber generator v an element
p(v) of the ideal generated by W, so that d v = dbar v + p(v) on
Lambda W (x) Lambda V.  Base generators come first in the total model.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .algebra import ModelError, Polynomial, SullivanModel, check_d_squared, make_generators
from .cohomology import project_terms, restriction_to_fiber
from .elliptic import (
    EllipticInvariants,
    formality_fact,
    homotopy_dims,
    invariants,
    linear_part_reduction,
)
from .linalg import RowEchelon


class FibrationError(ModelError):
    def __init__(self, message, residue=None):
        super().__init__(message)
        self.residue = residue


@dataclass(frozen=True)
class FibrationModel:
    name: str
    base: SullivanModel
    fiber: SullivanModel
    total: SullivanModel
    perturbation: dict  # fiber generator name -> Polynomial over total

    @property
    def base_indices(self):
        return list(range(len(self.base.gens)))

    @property
    def fiber_indices(self):
        return list(range(len(self.base.gens), len(self.total.gens)))

    def is_base(self, index: int) -> bool:
        return index < len(self.base.gens)

    def projected_fiber(self) -> SullivanModel:
        """Send base generators to zero; must give back the fiber model."""
        keep = self.fiber_indices
        d = {}
        for i in keep:
            d[self.total.gens[i].name] = Polynomial(self.fiber.gens, project_terms(self.total.d[i].terms, keep))
        return SullivanModel(self.fiber.name, self.fiber.gens, d)


def total_generators(base: SullivanModel, fiber: SullivanModel) -> tuple:
    clash = {g.name for g in base.gens} & {g.name for g in fiber.gens}
    if clash:
        raise FibrationError(f"base and fiber share generator names {sorted(clash)}")
    return make_generators([(g.name, g.degree) for g in base.gens + fiber.gens])


def build_fibration(base: SullivanModel, fiber: SullivanModel, perturbation: Mapping | None = None, name: str | None = None) -> FibrationModel:
    gens = total_generators(base, fiber)
    shell = SullivanModel("shell", gens)
    nb = len(base.gens)
    pert = {}
    for vname, value in (perturbation or {}).items():
        if vname not in {g.name for g in fiber.gens}:
            raise FibrationError(f"perturbation given for {vname!r}, which is not a fiber generator")
        p = shell.poly(value) if not isinstance(value, Polynomial) else value
        if p.gens != gens:
            raise FibrationError("perturbation polynomial is not over the total generators")
        stray = {m: c for m, c in p.terms.items() if not any(m[:nb])}
        if stray:
            raise FibrationError(
                f"perturbation of {vname} has terms outside the base ideal; the projection would not recover the fiber differential",
                Polynomial(gens, stray),
            )
        pert[vname] = p
    d = {}
    for g, p in zip(base.gens, base.d):
        d[g.name] = Polynomial(gens, {m + (0,) * len(fiber.gens): c for m, c in p.terms.items()})
    for g, p in zip(fiber.gens, fiber.d):
        lifted = Polynomial(gens, {(0,) * nb + m: c for m, c in p.terms.items()})
        if g.name in pert:
            lifted = lifted + pert[g.name]
        d[g.name] = lifted
    try:
        total = SullivanModel(name or f"{fiber.name}->{base.name}", gens, d)
    except ModelError as exc:
        raise FibrationError(f"inhomogeneous perturbation: {exc}") from None
    res = check_d_squared(total)
    if not res.ok:
        raise FibrationError(f"d^2 {res.generator} = {res.residue} != 0 in the total model", res.residue)
    f = FibrationModel(total.name, base, fiber, total, pert)
    proj = f.projected_fiber()
    if not proj.same_as(fiber):
        raise FibrationError("projection of the total differential does not recover the fiber differential")
    return f


# -- transgression ----------------------------------------------------------


@dataclass(frozen=True)
class TransgressionAnalysis:
    d0: dict  # generator name -> {generator name: coefficient}
    contracted_pairs: tuple  # (source, target) after a triangular change of basis
    c: int  # contracted pairs whose source is an odd fiber generator
    pi_dims: dict  # degree -> dim pi_k(X)
    predicted_dim_pi: int  # dim pi(F) + dim pi(B) - 2 * #pairs
    reduction_dim_pi: int
    shape_ok: bool  # every pair is (odd fiber generator, even base generator)

    @property
    def dim_pi(self):
        return sum(self.pi_dims.values())

    @property
    def consistent(self):
        return self.dim_pi == self.predicted_dim_pi == self.reduction_dim_pi

    @property
    def pi_trivial(self):
        return not self.contracted_pairs


def transgression_analysis(f: FibrationModel) -> TransgressionAnalysis:
    tot = f.total
    d0 = {}
    by_deg = {}
    for g, p in zip(tot.gens, tot.d):
        lp = p.linear_part()
        if lp:
            d0[g.name] = {tot.gens[j].name: c for j, c in sorted(lp.items())}
        by_deg.setdefault(g.degree, []).append(g)
    pairs = []
    for k in sorted(by_deg):
        ech = RowEchelon()
        # fiber sources first so contractions are attributed to the fiber
        for g in sorted(by_deg[k], key=lambda g: (f.is_base(g.index), g.index)):
            row = ech.reduce(tot.d[g.index].linear_part())
            if row:
                pivot = min(row)  # base targets have the smallest indices
                ech.pivots[pivot] = row
                pairs.append((g.name, tot.gens[pivot].name))
    fiber_odd = {tot.gens[i].name for i in f.fiber_indices if tot.gens[i].odd}
    base_even = {tot.gens[i].name for i in f.base_indices if tot.gens[i].even}
    c = sum(1 for s, _ in pairs if s in fiber_odd)
    shape = all(s in fiber_odd and t in base_even for s, t in pairs)
    red = linear_part_reduction(tot)
    return TransgressionAnalysis(
        d0=d0,
        contracted_pairs=tuple(pairs),
        c=c,
        pi_dims=homotopy_dims(tot),
        predicted_dim_pi=len(tot.gens) - 2 * len(pairs),
        reduction_dim_pi=red.dim_pi,
        shape_ok=shape,
    )


# -- checks -----------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    name: str
    lhs: Fraction
    relation: str  # "<=", "<", ">=", "=="
    rhs: Fraction
    asserted: bool = True
    diagnostic: bool = False
    note: str = ""

    @property
    def slack(self) -> Fraction:
        if self.relation in ("<=", "<"):
            return Fraction(self.rhs) - Fraction(self.lhs)
        if self.relation == ">=":
            return Fraction(self.lhs) - Fraction(self.rhs)
        return -abs(Fraction(self.lhs) - Fraction(self.rhs))

    @property
    def holds(self) -> bool:
        s = self.slack
        return s > 0 if self.relation == "<" else s >= 0

    @property
    def failed(self) -> bool:
        """An asserted, non-diagnostic check that does not hold."""
        return self.asserted and not self.diagnostic and not self.holds


def _fr(x) -> Fraction:
    return Fraction(x)


@dataclass(frozen=True)
class Triple:
    """Invariants of fiber, base and total space."""

    F: EllipticInvariants
    B: EllipticInvariants
    X: EllipticInvariants

    @property
    def h_product(self) -> Fraction:
        # never materialize F x B: homotopy adds, cohomology multiplies
        return Fraction(self.F.dim_pi + self.B.dim_pi, self.F.dim_H_total * self.B.dim_H_total)


def triple(f: FibrationModel) -> Triple:
    return Triple(invariants(f.fiber), invariants(f.base), invariants(f.total))


def check_homotopy_counts(f: FibrationModel, t: Triple | None = None) -> list:
    t = t or triple(f)
    F, B, X = t.F, t.B, t.X
    return [
        Check("homotopy_counts.odd_X>=odd_B", _fr(X.dim_pi_odd), ">=", _fr(B.dim_pi_odd)),
        Check("homotopy_counts.odd_B>=even_B", _fr(B.dim_pi_odd), ">=", _fr(B.dim_pi_even)),
        Check("homotopy_counts.odd_X>=even_X", _fr(X.dim_pi_odd), ">=", _fr(X.dim_pi_even)),
        Check("homotopy_counts.even_X>=even_F", _fr(X.dim_pi_even), ">=", _fr(F.dim_pi_even)),
        Check("homotopy_counts.odd_X>=odd_F", _fr(X.dim_pi_odd), ">=", _fr(F.dim_pi_odd)),
        Check("homotopy_counts.summed", _fr(X.dim_pi + 2 * X.dim_pi_odd), ">=", _fr(F.dim_pi + B.dim_pi)),
    ]


def check_pi_doubling(f: FibrationModel, t: Triple | None = None) -> Check:
    """2 dim pi(X) >= dim pi(F) + dim pi(B); guaranteed only for an F0 fiber."""
    t = t or triple(f)
    return Check(
        "pi_doubling",
        _fr(2 * t.X.dim_pi),
        ">=",
        _fr(t.F.dim_pi + t.B.dim_pi),
        asserted=t.F.is_f0,
        note="asserted only when the fiber is F0",
    )


def check_cohomology_product(f: FibrationModel, t: Triple | None = None) -> Check:
    t = t or triple(f)
    return Check("cohomology_product_bound", _fr(t.X.dim_H_total), "<=", _fr(t.F.dim_H_total * t.B.dim_H_total))


def check_additivity(f: FibrationModel, t: Triple | None = None) -> list:
    t = t or triple(f)
    return [
        Check("formal_dimension_additive", _fr(t.X.formal_dimension), "==", _fr(t.F.formal_dimension + t.B.formal_dimension)),
        Check("chi_pi_additive", _fr(t.X.chi_pi), "==", _fr(t.F.chi_pi + t.B.chi_pi)),
    ]


@dataclass(frozen=True)
class Flags:
    pi_trivial: bool
    tnhz: bool
    formal_F: bool | None
    formal_B: bool | None
    formal_X: bool | None

    @property
    def all_formal(self):
        return bool(self.formal_F and self.formal_B and self.formal_X)


def check_hilali_products(f: FibrationModel, t: Triple | None = None, flags: Flags | None = None) -> list:
    """Lower and upper comparisons of h(X) with h(F x B), plus the 3h and 2h bounds.

    Which ones are asserted depends on the hypotheses known to hold: all
    three spaces formal, X positively elliptic, or an F0 fiber with a
    totally non-homologous to zero fibration.
    """
    t = t or triple(f)
    flags = flags or fibration_flags(f)
    F, B, X = t.F, t.B, t.X
    hp = t.h_product
    covered = flags.all_formal or X.is_f0 or (F.is_f0 and flags.tnhz)
    return [
        Check("product_half_lower", hp / 2, "<=", X.hilali, asserted=covered or flags.pi_trivial),
        Check("sum_quarter_upper", X.hilali, "<", F.hilali + B.hilali + Fraction(1, 4), asserted=covered or flags.tnhz),
        Check("product_3h", hp, "<=", 3 * X.hilali),
        Check(
            "product_2h",
            hp,
            "<=",
            2 * X.hilali,
            asserted=F.is_f0 or flags.all_formal,
            note="asserted for an F0 fiber or formal spaces",
        ),
    ]


def fibration_flags(f: FibrationModel, tr: TransgressionAnalysis | None = None) -> Flags:
    tr = tr or transgression_analysis(f)
    fd = invariants(f.fiber).formal_dimension
    res = restriction_to_fiber(f.total, f.fiber, f.fiber_indices, fd)
    return Flags(
        pi_trivial=tr.pi_trivial,
        tnhz=res.surjective,
        formal_F=formality_fact(f.fiber)[0],
        formal_B=formality_fact(f.base)[0],
        formal_X=formality_fact(f.total)[0],
    )


def check_tnhz_and_pi_trivial(f: FibrationModel, t: Triple | None = None, flags: Flags | None = None) -> list:
    t = t or triple(f)
    flags = flags or fibration_flags(f)
    return [
        Check("tnhz.h_X<=h_F+h_B", t.X.hilali, "<=", t.F.hilali + t.B.hilali, asserted=flags.tnhz),
        Check("pi_trivial.h_FxB<=h_X", t.h_product, "<=", t.X.hilali, asserted=flags.pi_trivial),
    ]


@dataclass(frozen=True)
class Decomposition:
    """Odd-sphere part T (closed odd generators) and F0 part V of a formal model."""

    t: tuple
    v: tuple


def validate_decomposition(m: SullivanModel, dec: Decomposition) -> None:
    names = [g.name for g in m.gens]
    if sorted(dec.t + dec.v) != sorted(names):
        raise FibrationError(f"decomposition of {m.name} is not a partition of its generators")
    for n in dec.t:
        g = m.generator(n)
        if not g.odd or m.d[g.index]:
            raise FibrationError(f"T-generator {n} of {m.name} must be odd and closed")
    keep = sorted(m.generator(n).index for n in dec.v)
    shell = SullivanModel(m.name + "_V", [(m.gens[i].name, m.gens[i].degree) for i in keep])
    d = {m.gens[i].name: Polynomial(shell.gens, project_terms(m.d[i].terms, keep)) for i in keep}
    vpart = SullivanModel(shell.name, shell.gens, d)
    if not check_d_squared(vpart).ok:
        raise FibrationError(f"V-part of {m.name} is not a differential algebra")
    try:
        inv = invariants(vpart)
    except ModelError:
        raise FibrationError(f"V-part of {m.name} is not elliptic") from None
    if not inv.is_f0:
        raise FibrationError(f"V-part of {m.name} is not positively elliptic")


def check_odd_sphere_split(
    f: FibrationModel,
    fiber_dec: Decomposition | None,
    base_dec: Decomposition | None,
    t: Triple | None = None,
    flags: Flags | None = None,
) -> list:
    t = t or triple(f)
    flags = flags or fibration_flags(f)
    out = []
    if fiber_dec is not None and base_dec is not None:
        validate_decomposition(f.fiber, fiber_dec)
        validate_decomposition(f.base, base_dec)
        tot = f.total
        rows = [tot.d[tot.generator(n).index].linear_part() for n in fiber_dec.t]
        ech = RowEchelon()
        for r in rows:
            ech.add(r)
        c = ech.rank
        out.append(
            Check(
                "odd_sphere_split",
                _fr(t.X.dim_H_total),
                "<=",
                Fraction(t.F.dim_H_total * t.B.dim_H_total, 2**c),
                asserted=bool(flags.formal_F and flags.formal_B),
                note=f"c = {c}",
            )
        )
    B = t.B
    out.append(
        Check(
            "base_doubling_diagnostic",
            _fr(t.X.dim_H_total),
            ">=",
            _fr(2 ** (B.chi_pi + B.dim_pi_even) * t.F.dim_H_total),
            asserted=False,
            diagnostic=True,
            note="reported only; fails on the quaternionic Hopf fibration",
        )
    )
    return out


@dataclass
class FibrationReport:
    name: str
    F: EllipticInvariants
    B: EllipticInvariants
    X: EllipticInvariants
    transgression: TransgressionAnalysis
    flags: Flags
    checks: list = field(default_factory=list)

    @property
    def h_product(self) -> Fraction:
        return Fraction(self.F.dim_pi + self.B.dim_pi, self.F.dim_H_total * self.B.dim_H_total)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if c.failed]

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def analyze_fibration(
    f: FibrationModel,
    fiber_dec: Decomposition | None = None,
    base_dec: Decomposition | None = None,
) -> FibrationReport:
    t = triple(f)
    tr = transgression_analysis(f)
    flags = fibration_flags(f, tr)
    checks = []
    checks += check_homotopy_counts(f, t)
    checks.append(check_pi_doubling(f, t))
    checks.append(check_cohomology_product(f, t))
    checks += check_additivity(f, t)
    checks += check_hilali_products(f, t, flags)
    checks += check_tnhz_and_pi_trivial(f, t, flags)
    checks += check_odd_sphere_split(f, fiber_dec, base_dec, t, flags)
    checks.append(Check("transgression.consistent", _fr(int(tr.consistent)), "==", Fraction(1)))
    checks.append(Check("transgression.pair_shape", _fr(int(tr.shape_ok)), "==", Fraction(1)))
    return FibrationReport(f.name, t.F, t.B, t.X, tr, flags, checks)
