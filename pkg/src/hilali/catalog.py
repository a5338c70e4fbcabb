"""Named example spaces and fibrations, the two explicit constructions, and random models."""

from __future__ import annotations

import os
import random
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, prod

from .algebra import ModelError, Polynomial, SullivanModel
from .dsl import format_polynomial
from .elliptic import (
    EllipticInvariants,
    class_predicates,
    ellipticity_check,
    formality_fact,
    invariants,
)
from .fibration import Decomposition, FibrationModel, build_fibration
from .linalg import exact_rank

DEFAULT_RETRIES = 32


class CatalogError(ModelError):
    pass


class GenerationError(ModelError):
    pass


# -- basic spaces -----------------------------------------------------------


def make_sphere(n: int) -> SullivanModel:
    if not isinstance(n, int) or n < 2:
        raise CatalogError(f"sphere dimension must be >= 2, got {n!r}")
    if n % 2:
        return SullivanModel(f"S{n}", [("y", n)])
    return SullivanModel(f"S{n}", [("x", n), ("y", 2 * n - 1)], {"y": "x^2"})


def _projective(n: int, deg: int, label: str) -> SullivanModel:
    if not isinstance(n, int) or n < 1:
        raise CatalogError(f"projective dimension must be >= 1, got {n!r}")
    return SullivanModel(f"{label}{n}", [("x", deg), ("y", deg * (n + 1) - 1)], {"y": f"x^{n + 1}"})


def make_cpn(n: int) -> SullivanModel:
    return _projective(n, 2, "CP")


def make_hpn(n: int) -> SullivanModel:
    return _projective(n, 4, "HP")


def make_product(models: list, name: str | None = None) -> SullivanModel:
    """Tensor product; generators are prefixed per factor when names collide."""
    if not models:
        return SullivanModel(name or "point", [])
    names = [g.name for mdl in models for g in mdl.gens]
    clash = len(set(names)) != len(names)
    gens = []
    d = {}
    offset = 0
    total = sum(len(mdl.gens) for mdl in models)
    parts = []
    for k, mdl in enumerate(models):
        pre = f"f{k + 1}_" if clash else ""
        parts.append((pre, mdl, offset))
        gens += [(pre + g.name, g.degree) for g in mdl.gens]
        offset += len(mdl.gens)
    shell = SullivanModel("shell", gens)
    for pre, mdl, off in parts:
        for g, p in zip(mdl.gens, mdl.d):
            terms = {(0,) * off + m + (0,) * (total - off - len(m)): c for m, c in p.terms.items()}
            d[pre + g.name] = Polynomial(shell.gens, terms)
    return SullivanModel(name or "x".join(mdl.name for mdl in models), gens, d)


def make_star_type(even_degree: int, power: int, odd_degree: int) -> SullivanModel:
    """Lambda(x, z, y) with dz = x^power, dy = 0."""
    if even_degree < 2 or even_degree % 2:
        raise CatalogError(f"even degree must be even and >= 2, got {even_degree}")
    if power < 2:
        raise CatalogError("power must be >= 2 (power 1 gives a contractible pair, not a minimal model)")
    if odd_degree < 3 or odd_degree % 2 == 0:
        raise CatalogError(f"extra degree must be odd and >= 3, got {odd_degree}")
    return SullivanModel(
        f"star({even_degree},{power},{odd_degree})",
        [("x", even_degree), ("z", even_degree * power - 1), ("y", odd_degree)],
        {"z": f"x^{power}"},
    )


def make_flag(scale: int = 1) -> SullivanModel:
    """Positively elliptic stand-in with two even and two odd generators."""
    a = 2 * scale
    return SullivanModel(
        f"W{6 * scale}",
        [("x1", a), ("x2", a), ("y1", 2 * a - 1), ("y2", 3 * a - 1)],
        {"y1": "x1^2 + x1*x2 + x2^2", "y2": "x1^2*x2 + x1*x2^2"},
    )


def make_cayley_plane() -> SullivanModel:
    return SullivanModel("CaP2", [("x", 8), ("y", 23)], {"y": "x^3"})


# -- closed-form invariants -------------------------------------------------


def _known(pe, po, H, fd, chi) -> EllipticInvariants:
    return EllipticInvariants(pe, po, po - pe, chi, fd, H, Fraction(pe + po, H))


def known_sphere(n):
    return _known(0, 1, 2, n, 0) if n % 2 else _known(1, 1, 2, n, 2)


def known_projective(n, deg):
    return _known(1, 1, n + 1, deg * n, n + 1)


def known_star(even_degree, power, odd_degree):
    return _known(1, 2, 2 * power, even_degree * (power - 1) + odd_degree, 0)


def known_product(parts):
    pe = sum(p.dim_pi_even for p in parts)
    po = sum(p.dim_pi_odd for p in parts)
    return _known(pe, po, prod(p.dim_H_total for p in parts), sum(p.formal_dimension for p in parts), prod(p.chi for p in parts))


# -- catalog ----------------------------------------------------------------


@dataclass(frozen=True)
class CatalogEntry:
    key: str
    model: SullivanModel
    known: EllipticInvariants | None
    formal: bool | None
    provenance: str
    decomposition: Decomposition | None
    description: str = ""


def _entry(key, model, known, decomposition, description=""):
    formal, why = formality_fact(model)
    return CatalogEntry(key, model, known, formal, why, decomposition, description)


def _dec(model, t_names):
    return Decomposition(tuple(t_names), tuple(g.name for g in model.gens if g.name not in t_names))


def sphere_entry(n):
    m = make_sphere(n)
    return _entry(f"sphere:{n}", m, known_sphere(n), _dec(m, ["y"] if n % 2 else []), f"{n}-sphere")


def cpn_entry(n):
    m = make_cpn(n)
    return _entry(f"cpn:{n}", m, known_projective(n, 2), _dec(m, []), f"complex projective {n}-space")


def hpn_entry(n):
    m = make_hpn(n)
    return _entry(f"hpn:{n}", m, known_projective(n, 4), _dec(m, []), f"quaternionic projective {n}-space")


def star_entry(k2, p, q):
    m = make_star_type(k2, p, q)
    return _entry(f"star:{k2},{p},{q}", m, known_star(k2, p, q), _dec(m, ["y"]), "one even, two odd homotopy generators")


def product_entry(entries: list) -> CatalogEntry:
    model = make_product([e.model for e in entries])
    known = known_product([e.known for e in entries]) if all(e.known for e in entries) else None
    dec = None
    if all(e.decomposition for e in entries):
        names = [g.name for e in entries for g in e.model.gens]
        clash = len(set(names)) != len(names)
        t = [(f"f{k + 1}_" if clash else "") + n for k, e in enumerate(entries) for n in e.decomposition.t]
        dec = _dec(model, t)
    return _entry("*".join(e.key for e in entries), model, known, dec, "product")


def _special_entries():
    w6 = make_flag(1)
    w12 = make_flag(2)
    w24 = make_flag(4)
    cap = make_cayley_plane()
    aw = make_star_type(2, 2, 5)
    b13 = make_star_type(2, 3, 9)
    return {
        "w6": _entry("w6", w6, _known(2, 2, 6, 6, 6), _dec(w6, []), "even-dimensional flag-type stand-in"),
        "w12": _entry("w12", w12, _known(2, 2, 6, 12, 6), _dec(w12, []), "flag-type stand-in, degrees doubled"),
        "w24": _entry("w24", w24, _known(2, 2, 6, 24, 6), _dec(w24, []), "flag-type stand-in, degrees quadrupled"),
        "cap2": _entry("cap2", cap, _known(1, 1, 3, 16, 3), _dec(cap, []), "Cayley plane"),
        "aloff-wallach": _entry(
            "aloff-wallach", aw, known_star(2, 2, 5), _dec(aw, ["y"]), "7-dimensional (*)-type stand-in"
        ),
        "b13": _entry("b13", b13, known_star(2, 3, 9), _dec(b13, ["y"]), "13-dimensional (*)-type stand-in"),
    }


def lookup(key: str):
    """Catalog entry or catalog fibration for a key like ``cpn:3`` or ``sphere:3*sphere:5``."""
    key = key.strip()
    if key.startswith("catalog:"):
        key = key[len("catalog:"):]
    fibs = fibration_catalog()
    if key in fibs:
        return fibs[key]
    if "*" in key:
        return product_entry([lookup(k) for k in key.split("*")])
    specials = _special_entries()
    if key in specials:
        return specials[key]
    kind, _, arg = key.partition(":")
    try:
        if kind == "sphere":
            return sphere_entry(int(arg))
        if kind == "cpn":
            return cpn_entry(int(arg))
        if kind == "hpn":
            return hpn_entry(int(arg))
        if kind == "star":
            k2, p, q = (int(a) for a in arg.split(","))
            return star_entry(k2, p, q)
    except ValueError:
        raise CatalogError(f"bad catalog key {key!r}") from None
    raise CatalogError(f"unknown catalog key {key!r}")


def model_catalog() -> list:
    """The standard list of catalog models with closed-form invariants."""
    out = [sphere_entry(n) for n in (2, 3, 4, 5, 6, 7, 8, 15)]
    out += [cpn_entry(n) for n in range(1, 6)]
    out += [hpn_entry(n) for n in (1, 2)]
    out += [star_entry(2, 2, 7), star_entry(2, 3, 5), star_entry(4, 2, 3)]
    out += list(_special_entries().values())
    out.append(product_entry([sphere_entry(3), sphere_entry(5)]))
    out.append(product_entry([sphere_entry(3), sphere_entry(3)]))
    out.append(product_entry([sphere_entry(2), sphere_entry(3)]))
    out.append(product_entry([cpn_entry(2), sphere_entry(5)]))
    out.append(product_entry([sphere_entry(4), sphere_entry(4)]))
    return out


# -- fibrations -------------------------------------------------------------


@dataclass(frozen=True)
class CatalogFibration:
    key: str
    fibration: FibrationModel
    fiber_dec: Decomposition | None
    base_dec: Decomposition | None
    description: str = ""


def _prefixed_dec(dec, prefix):
    return Decomposition(tuple(prefix + n for n in dec.t), tuple(prefix + n for n in dec.v))


def _fib(key, base_entry, fiber_entry, pert, description):
    base = base_entry.model.renamed(prefix="b_")
    fiber = fiber_entry.model.renamed(prefix="f_")
    f = build_fibration(base, fiber, pert, name=key)
    return CatalogFibration(
        key,
        f,
        _prefixed_dec(fiber_entry.decomposition, "f_") if fiber_entry.decomposition else None,
        _prefixed_dec(base_entry.decomposition, "b_") if base_entry.decomposition else None,
        description,
    )


def make_hopf_fibrations() -> list:
    return [
        _fib("hopf:s3-s7-s4", sphere_entry(4), sphere_entry(3), {"f_y": "b_x"}, "S3 -> S7 -> S4"),
        _fib("hopf:s7-s15-s8", sphere_entry(8), sphere_entry(7), {"f_y": "b_x"}, "S7 -> S15 -> S8"),
        _fib("hopf:s3-s11-hp2", hpn_entry(2), sphere_entry(3), {"f_y": "b_x"}, "S3 -> S11 -> HP2"),
        _fib("bundle:s3-cp2", cpn_entry(2), sphere_entry(3), {"f_y": "b_x^2"}, "S3 over CP2 with transgression x^2"),
    ]


def make_twistor() -> list:
    return [
        _fib("twistor:s2-cp3-s4", sphere_entry(4), sphere_entry(2), {"f_y": "b_x"}, "S2 -> CP3 -> S4"),
        _fib("twistor:s2-cp5-hp2", hpn_entry(2), sphere_entry(2), {"f_y": "b_x"}, "S2 -> CP5 -> HP2"),
    ]


def make_product_fibrations() -> list:
    pairs = [
        ("product:s3-s4", sphere_entry(4), sphere_entry(3)),
        ("product:cp2-s5", sphere_entry(5), cpn_entry(2)),
        ("product:s2-s3", sphere_entry(3), sphere_entry(2)),
        ("product:w6-s7", sphere_entry(7), _special_entries()["w6"]),
    ]
    return [_fib(k, b, f, {}, "trivial fibration") for k, b, f in pairs]


_FIB_CACHE = {}


def fibration_catalog() -> dict:
    if not _FIB_CACHE:
        for cf in make_hopf_fibrations() + make_twistor() + make_product_fibrations():
            _FIB_CACHE[cf.key] = cf
    return dict(_FIB_CACHE)


# -- constructions ----------------------------------------------------------


def _two_stage_split(m: SullivanModel):
    cp = class_predicates(m)
    if not cp.is_two_stage or not m.is_minimal():
        raise CatalogError(f"model {m.name} is not a minimal two-stage model")
    w1 = [m.generator(n) for n in cp.w1]
    if exact_rank(m.d[g.index].terms for g in w1) != len(w1):
        raise CatalogError(f"differential of {m.name} is not injective on the second stage")
    return cp


def degree_scale(m: SullivanModel, i: int) -> SullivanModel:
    """Multiply stage-0 degrees by 3^i; stage-1 degrees become 3^i * deg(dv) - 1."""
    if i < 0:
        raise CatalogError("scaling exponent must be >= 0")
    cp = _two_stage_split(m)
    if i == 0:
        return m
    f = 3**i
    w1 = set(cp.w1)
    gens = []
    for g in m.gens:
        if g.name in w1:
            gens.append((g.name, f * (g.degree + 1) - 1))
        else:
            gens.append((g.name, f * g.degree))
    shell = SullivanModel("shell", gens)
    d = {g.name: Polynomial(shell.gens, p.terms) for g, p in zip(m.gens, m.d)}
    return SullivanModel(f"{m.name}[3^{i}]", gens, d)


@dataclass(frozen=True)
class CohomologyBound:
    formal_dimension: int
    ceilings: tuple  # ceil(d / deg w) per even generator
    literal_bound: int
    corrected_bound: int
    dim_H: int
    fibration: FibrationModel

    @property
    def holds(self):
        return self.dim_H <= self.corrected_bound

    @property
    def literal_holds(self):
        return self.dim_H <= self.literal_bound


def cohomology_bound_and_fibration(m: SullivanModel, inv: EllipticInvariants | None = None) -> CohomologyBound:
    """Cohomology bound for pure elliptic models and the fibration behind it.

    Adjoin v_i with d v_i = w_i^(N_i + 1), N_i = ceil(d / deg w_i).  The
    enlarged algebra fibres over Lambda(w_i, v_i) with fiber the exterior
    algebra on the odd generators; its cohomology is H(m) (x) Lambda(v_i), so
    2^k dim H(m) <= 2^odd * prod(N_i + 1).
    """
    cp = class_predicates(m)
    if not cp.is_pure:
        raise CatalogError(f"model {m.name} is not pure")
    inv = inv or invariants(m)
    d = inv.formal_dimension
    evens = m.even_gens
    odds = m.odd_gens
    ceils = tuple(ceil(d / g.degree) for g in evens)
    if len(odds) < len(evens):
        raise CatalogError(f"model {m.name} has more even than odd generators")
    scale = 2 ** (len(odds) - len(evens))
    literal = scale * prod(ceils)
    corrected = scale * prod(c + 1 for c in ceils)
    taken = {g.name for g in m.gens}
    vnames = []
    for g in evens:
        v = "v_" + g.name
        while v in taken:
            v += "_"
        taken.add(v)
        vnames.append(v)
    base = SullivanModel(
        f"{m.name}_trunc",
        [(g.name, g.degree) for g in evens] + [(v, g.degree * (c + 1) - 1) for g, v, c in zip(evens, vnames, ceils)],
        {v: f"{g.name}^{c + 1}" for g, v, c in zip(evens, vnames, ceils)},
    )
    fiber = SullivanModel(f"{m.name}_odd", [(g.name, g.degree) for g in odds])
    pert = {g.name: format_polynomial(m.d[g.index]) for g in odds if m.d[g.index]}
    fib = build_fibration(base, fiber, pert, name=f"{m.name}_aux")
    return CohomologyBound(d, ceils, literal, corrected, inv.dim_H_total, fib)


# -- random models ----------------------------------------------------------


def retry_budget() -> int:
    raw = os.environ.get("HILALI_RETRY_BUDGET")
    if raw is None:
        return DEFAULT_RETRIES
    try:
        val = int(raw)
    except ValueError:
        raise GenerationError(f"HILALI_RETRY_BUDGET must be an integer, got {raw!r}") from None
    if val < 1:
        raise GenerationError("HILALI_RETRY_BUDGET must be >= 1")
    return val


def _monomials_of_degree(degs: list, target: int, min_len: int = 2):
    """Exponent tuples over generators with degrees ``degs`` (odd ones square-free)."""
    out = []
    cur = [0] * len(degs)

    def rec(i, left):
        if left == 0:
            if sum(cur) >= min_len:
                out.append(tuple(cur))
            return
        if i == len(degs):
            return
        top = 1 if degs[i] % 2 else left // degs[i]
        for e in range(top, -1, -1):
            if e * degs[i] <= left:
                cur[i] = e
                rec(i + 1, left - e * degs[i])
        cur[i] = 0

    rec(0, target)
    return out


def _coef(rng):
    return rng.choice((1, -1, 2, -2))


class _Block:
    def __init__(self, evens):
        self.evens = evens  # list of (name, degree)
        self.attached = []  # W0 generators whose products may enter relations
        self.relations = []  # (W1 name, degree, {exponent dict: coef})
        self.used = {}  # relation degree -> number of second-stage images there
        self.extra = 0


def _draw(rng, name, n, m, r, even_degrees, odd_degrees, max_power, block_size, pure):
    evens = [(f"x{i + 1}", rng.choice(even_degrees)) for i in range(n)]
    w0 = [(f"u{i + 1}", rng.choice(odd_degrees)) for i in range(m)]
    blocks = []
    k = 0
    while k < n:
        size = rng.randint(1, block_size)
        blocks.append(_Block(evens[k:k + size]))
        k += size
    free = list(w0)
    if not pure and blocks:
        rng.shuffle(free)
        keep = []
        for u in free:
            host = rng.choice(blocks)
            if len(host.attached) < 2 and rng.random() < 0.5:
                host.attached.append(u)
            else:
                keep.append(u)
        free = keep
    need_groups = n == 0 and r > 0
    if need_groups:
        # no even generators: second stage maps into products of closed odd ones
        rng.shuffle(free)
        room = 0
        while room < r and len(free) >= 2:
            b = _Block([])
            b.attached = [free.pop() for _ in range(min(3, len(free)))]
            room += len(b.attached) * (len(b.attached) - 1) // 2
            blocks.append(b)
        if not blocks:
            return None
    ynames = iter(f"y{i + 1}" for i in range(n))
    for b in blocks:
        for j, (xname, xdeg) in enumerate(b.evens):
            p = rng.randint(2, max(2, max_power))
            target = p * xdeg
            gens = b.evens[: j + 1] + ([] if pure else b.attached)
            terms = {((xname, p),): 1}
            for mono in _monomials_of_degree([g[1] for g in gens], target):
                if mono[j] >= p:
                    continue
                if not pure and sum(mono[len(b.evens[: j + 1]):]) % 2:
                    continue
                if rng.random() < 0.4:
                    terms[tuple((g[0], e) for g, e in zip(gens, mono) if e)] = _coef(rng)
            b.relations.append((next(ynames), target - 1, terms))
            b.used[target] = b.used.get(target, 0) + 1
    extras = []
    for z in range(r):
        if not blocks:
            return None
        fewest = min(b.extra for b in blocks)
        host = rng.choice([b for b in blocks if b.extra == fewest])
        host.extra += 1
        gens = host.evens + ([] if pure else host.attached)
        if not gens:
            return None
        degs = [g[1] for g in gens]
        # lowest degrees that still leave room for an independent image
        cands = []
        t = 2 * min(degs)
        while len(cands) < 3 and t <= 2 * min(degs) + 2 * max(degs) * (r + n + 2):
            count = len(_monomials_of_degree(degs, t))
            if count > host.used.get(t, 0):
                cands.append(t)
            t += 2
        if not cands:
            return None
        target = rng.choice(cands)
        host.used[target] = host.used.get(target, 0) + 1
        monos = _monomials_of_degree(degs, target)
        terms = {}
        for mono in monos:
            if rng.random() < 0.6:
                terms[tuple((g[0], e) for g, e in zip(gens, mono) if e)] = _coef(rng)
        if not terms:
            mono = rng.choice(monos)
            terms[tuple((g[0], e) for g, e in zip(gens, mono) if e)] = 1
        extras.append((f"z{z + 1}", target - 1, terms))
    gens = evens + w0 + [(y, deg) for b in blocks for y, deg, _ in b.relations] + [(z, deg) for z, deg, _ in extras]
    shell = SullivanModel("shell", gens)
    d = {}
    for gname_, _, terms in [rel for b in blocks for rel in b.relations] + extras:
        p = Polynomial.zero(shell.gens)
        for mono, c in terms.items():
            q = Polynomial.constant(shell.gens, c)
            for gname, e in mono:
                q = q * shell.var(gname) ** e
            p = p + q
        d[gname_] = p
    return SullivanModel(name, gens, d)


def random_two_stage(
    seed,
    n: int,
    m: int,
    r: int,
    even_degrees=(2,),
    odd_degrees=(3, 5),
    max_power: int = 3,
    block_size: int = 2,
    pure: bool = False,
    retries: int | None = None,
    name: str | None = None,
) -> SullivanModel:
    """Seeded elliptic minimal two-stage model with dim V^even = n, dim W0 = m, dim W1 = n + r.

    Even generators are grouped into small blocks; each block carries a
    triangular relation system whose leading terms are pure powers, so the
    pure quotient is finite.  Ellipticity and injectivity of d on W1 are
    still verified and the draw is repeated (sub-seed "seed/attempt") on
    failure.
    """
    for v, label in ((n, "n"), (m, "m"), (r, "r")):
        if not isinstance(v, int) or v < 0:
            raise GenerationError(f"{label} must be a non-negative integer")
    if any(d % 2 or d < 2 for d in even_degrees) or any(d % 2 == 0 or d < 3 for d in odd_degrees):
        raise GenerationError("bad degree ranges")
    if r > 0 and n == 0 and (pure or m < 2):
        raise GenerationError(f"no two-stage model with n=0, m={m}, r={r}{' (pure)' if pure else ''}")
    budget = retries if retries is not None else retry_budget()
    for attempt in range(budget):
        rng = random.Random(f"{seed}/{attempt}")
        label = name or f"two-stage[{seed}]({n},{m},{r})"
        model = _draw(rng, label, n, m, r, tuple(even_degrees), tuple(odd_degrees), max_power, block_size, pure)
        if model is None:
            continue
        cp = class_predicates(model)
        if not model.is_minimal() or not cp.is_two_stage or len(cp.w0) != m or len(cp.w1) != n + r:
            continue
        if pure and not cp.is_pure:
            continue
        w1 = [model.generator(x) for x in cp.w1]
        if exact_rank(model.d[g.index].terms for g in w1) != len(w1):
            continue
        if not ellipticity_check(model):
            continue
        return model
    raise GenerationError("could not achieve ellipticity within retry budget")


def random_pure(seed, n: int, m: int, r: int, **kw) -> SullivanModel:
    return random_two_stage(seed, n, m, r, pure=True, **kw)
