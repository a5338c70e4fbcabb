"""Free graded-commutative algebras over Q with a degree +1 differential.

Monomials are exponent tuples indexed by generator position.  Odd generators
carry exponent 0 or 1; the canonical word is the product of generators in
index order, and every product is brought back to that order with the Koszul
sign (-1)^(deg a * deg b) for each transposition of odd factors.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

MAX_DEGREE = 2**31 - 1
NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")

Monomial = tuple  # tuple[int, ...]
Scalar = Union[int, Fraction]


class ModelError(ValueError):
    """Invalid model data (degrees, names, homogeneity)."""


class ModelMismatchError(ModelError):
    """Operands live in different algebras."""


class DifferentialError(ModelError):
    """d(d(g)) != 0 for some generator g."""

    def __init__(self, message, generator=None, residue=None):
        super().__init__(message)
        self.generator = generator
        self.residue = residue


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int
    index: int

    @property
    def odd(self) -> bool:
        return self.degree % 2 == 1

    @property
    def even(self) -> bool:
        return self.degree % 2 == 0


def check_degree(value: int) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ModelError(f"degree must be an integer, got {value!r}")
    if value > MAX_DEGREE:
        raise ModelError(f"degree {value} exceeds {MAX_DEGREE}")
    return value


def make_generators(pairs: Iterable) -> tuple:
    """Build an indexed generator tuple from ``(name, degree)`` pairs."""
    gens = []
    seen = set()
    for i, item in enumerate(pairs):
        if isinstance(item, Generator):
            name, degree = item.name, item.degree
        else:
            name, degree = item
        check_degree(degree)
        if not NAME_RE.match(name):
            raise ModelError(f"bad generator name {name!r}")
        if name in seen:
            raise ModelError(f"duplicate generator {name!r}")
        if degree < 2:
            raise ModelError(f"generator {name} has degree {degree}; need >= 2")
        seen.add(name)
        gens.append(Generator(name, degree, i))
    return tuple(gens)


def mono_degree(gens, mono) -> int:
    return sum(e * g.degree for e, g in zip(mono, gens) if e)


def mono_mul(odd, a, b):
    """Product of two monomials: ``(sign, monomial)`` or ``(0, None)``."""
    out = list(a)
    above = 0
    swaps = 0
    for j in range(len(a) - 1, -1, -1):
        bj = b[j]
        if odd[j]:
            if bj:
                if a[j]:
                    return 0, None
                swaps += above
                out[j] = 1
            elif a[j]:
                above += 1
        elif bj:
            out[j] += bj
    return (-1 if swaps & 1 else 1), tuple(out)


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"coefficient must be int or Fraction, got {type(c).__name__}")


class Polynomial:
    """Exact rational combination of monomials over a fixed generator tuple."""

    __slots__ = ("gens", "terms", "_odd")

    def __init__(self, gens: tuple, terms: Mapping | None = None):
        self.gens = gens
        self._odd = tuple(g.odd for g in gens)
        clean = {}
        if terms:
            for mono, c in terms.items():
                c = _as_fraction(c)
                if c:
                    clean[mono] = c
        self.terms = clean

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, gens):
        return cls(gens)

    @classmethod
    def constant(cls, gens, c):
        return cls(gens, {(0,) * len(gens): c})

    @classmethod
    def generator(cls, gens, index):
        mono = [0] * len(gens)
        mono[index] = 1
        return cls(gens, {tuple(mono): 1})

    @classmethod
    def monomial(cls, gens, mono, c=1):
        return cls(gens, {tuple(mono): c})

    # structure ----------------------------------------------------------
    def _same(self, other):
        if self.gens is not other.gens and self.gens != other.gens:
            raise ModelMismatchError("polynomials belong to different algebras")

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            self._same(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.gens, other)
        return NotImplemented

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.gens, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.gens == other.gens and self.terms == other.terms

    def __hash__(self):
        return hash((self.gens, frozenset(self.terms.items())))

    def degrees(self) -> set:
        return {mono_degree(self.gens, m) for m in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def degree(self) -> int | None:
        """Degree of a homogeneous polynomial; ``None`` for zero."""
        ds = self.degrees()
        if not ds:
            return None
        if len(ds) > 1:
            raise ModelError(f"polynomial {self} is not homogeneous")
        return ds.pop()

    def homogeneous_part(self, k):
        return Polynomial(
            self.gens, {m: c for m, c in self.terms.items() if mono_degree(self.gens, m) == k}
        )

    def generators_used(self) -> set:
        used = set()
        for m in self.terms:
            used.update(i for i, e in enumerate(m) if e)
        return used

    def linear_part(self) -> dict:
        """Coefficients of word-length-one terms, keyed by generator index."""
        out = {}
        for m, c in self.terms.items():
            if sum(m) == 1:
                out[m.index(1)] = c
        return out

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, 0) + c
        return Polynomial(self.gens, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.gens, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Polynomial(self.gens, {m: c * other for m, c in self.terms.items()})
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._same(other)
        odd = self._odd
        terms = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                s, m = mono_mul(odd, ma, mb)
                if s:
                    terms[m] = terms.get(m, 0) + s * ca * cb
        return Polynomial(self.gens, terms)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.gens, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __str__(self):
        from .dsl import format_polynomial

        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({self})"


def multiply(p: Polynomial, q: Polynomial) -> Polynomial:
    """Graded-commutative product; raises ModelMismatchError across algebras."""
    if not isinstance(p, Polynomial) or not isinstance(q, Polynomial):
        raise TypeError("multiply expects two polynomials")
    return p * q


class SullivanModel:
    """Free graded-commutative algebra on named generators with a differential.

    ``differential`` maps generator names to a Polynomial over this model's
    generators, a polynomial string, or 0.  Missing names get d = 0.
    Degrees and homogeneity are validated here; d^2 = 0 is not (see
    ``check_d_squared`` / ``validated``).
    """

    def __init__(self, name: str, generators: Sequence, differential: Mapping | None = None):
        self.name = name
        self.gens = make_generators(generators)
        self._by_name = {g.name: g for g in self.gens}
        self._odd = tuple(g.odd for g in self.gens)
        differential = dict(differential or {})
        unknown = set(differential) - set(self._by_name)
        if unknown:
            raise ModelError(f"differential given for unknown generator(s) {sorted(unknown)}")
        d = []
        for g in self.gens:
            value = differential.get(g.name, 0)
            p = self._to_poly(value)
            deg = p.degree() if p.terms else None
            if deg is not None and deg != g.degree + 1:
                raise ModelError(
                    f"d {g.name} has degree {deg}, expected {g.degree + 1}"
                )
            d.append(p)
        self.d = tuple(d)
        # integral coefficients as plain ints: much cheaper in elimination
        self._int_d = tuple(
            {m: (int(c) if c.denominator == 1 else c) for m, c in p.terms.items()} for p in d
        )
        self._dcache = {}
        self._basis_cache = {}

    def _to_poly(self, value) -> Polynomial:
        if isinstance(value, Polynomial):
            if value.gens != self.gens:
                raise ModelMismatchError(f"differential polynomial is not over model {self.name}")
            return Polynomial(self.gens, value.terms)
        if isinstance(value, str):
            from .dsl import parse_polynomial

            return parse_polynomial(value, self.gens)
        if isinstance(value, (int, Fraction)):
            if value:
                raise ModelError("a differential cannot be a nonzero constant")
            return Polynomial.zero(self.gens)
        raise TypeError(f"cannot interpret {value!r} as a polynomial")

    # access -------------------------------------------------------------
    def __len__(self):
        return len(self.gens)

    def __repr__(self):
        return f"SullivanModel({self.name!r}, {[(g.name, g.degree) for g in self.gens]})"

    def generator(self, name: str) -> Generator:
        try:
            return self._by_name[name]
        except KeyError:
            raise ModelError(f"unknown generator {name!r} in model {self.name}") from None

    def var(self, name: str) -> Polynomial:
        return Polynomial.generator(self.gens, self.generator(name).index)

    def poly(self, text) -> Polynomial:
        return self._to_poly(text)

    def one(self) -> Polynomial:
        return Polynomial.constant(self.gens, 1)

    def diff_of(self, name: str) -> Polynomial:
        return self.d[self.generator(name).index]

    @property
    def odd_gens(self):
        return [g for g in self.gens if g.odd]

    @property
    def even_gens(self):
        return [g for g in self.gens if g.even]

    def key(self):
        """Hashable structural key (generator names ignored)."""
        return (
            tuple(g.degree for g in self.gens),
            tuple(tuple(sorted(p.terms.items())) for p in self.d),
        )

    def same_as(self, other: "SullivanModel") -> bool:
        """Equality of generator names, degrees and differential."""
        if [(g.name, g.degree) for g in self.gens] != [(g.name, g.degree) for g in other.gens]:
            return False
        return all(a.terms == b.terms for a, b in zip(self.d, other.d))

    def is_minimal(self) -> bool:
        return all(not p.linear_part() for p in self.d)

    def with_differential(self, name: str, mapping: Mapping) -> "SullivanModel":
        return SullivanModel(name, [(g.name, g.degree) for g in self.gens], mapping)

    def renamed(self, name=None, prefix="") -> "SullivanModel":
        gens = [(prefix + g.name, g.degree) for g in self.gens]
        new = SullivanModel(name or self.name, gens)
        d = {prefix + g.name: Polynomial(new.gens, p.terms) for g, p in zip(self.gens, self.d)}
        return SullivanModel(new.name, gens, d)

    def restricted(self, indices: Sequence[int], name=None) -> "SullivanModel":
        """Sub-algebra on ``indices``; the differential must stay inside it."""
        indices = sorted(indices)
        pos = {old: new for new, old in enumerate(indices)}
        gens = [(self.gens[i].name, self.gens[i].degree) for i in indices]
        shell = SullivanModel(name or self.name, gens)
        d = {}
        for i in indices:
            terms = {}
            for m, c in self.d[i].terms.items():
                if any(e for j, e in enumerate(m) if e and j not in pos):
                    raise ModelError("sub-algebra is not closed under d")
                terms[tuple(m[j] for j in indices)] = c
            d[self.gens[i].name] = Polynomial(shell.gens, terms)
        return SullivanModel(shell.name, gens, d)

    # differential -------------------------------------------------------
    def d_monomial(self, mono) -> dict:
        """d applied to one monomial, as a term dict (cached)."""
        hit = self._dcache.get(mono)
        if hit is not None:
            return hit
        odd = self._odd
        n = len(mono)
        out = {}
        prefix_odd = 0
        dterms = self._int_d
        for i in range(n):
            e = mono[i]
            if not e:
                continue
            dg = dterms[i]
            if dg:
                left = list(mono[:i]) + [e - 1] + [0] * (n - i - 1)
                right = [0] * (i + 1) + list(mono[i + 1:])
                left = tuple(left)
                right = tuple(right)
                coeff = 1 if odd[i] else e
                if prefix_odd & 1:
                    coeff = -coeff
                for t, c in dg.items():
                    s1, m1 = mono_mul(odd, left, t)
                    if not s1:
                        continue
                    s2, m2 = mono_mul(odd, m1, right)
                    if not s2:
                        continue
                    out[m2] = out.get(m2, 0) + s1 * s2 * coeff * c
            if odd[i]:
                prefix_odd += 1
        out = {m: c for m, c in out.items() if c}
        self._dcache[mono] = out
        return out

    def apply(self, p: Polynomial) -> Polynomial:
        if p.gens != self.gens:
            raise ModelMismatchError(f"polynomial is not over model {self.name}")
        terms = {}
        for m, c in p.terms.items():
            for m2, c2 in self.d_monomial(m).items():
                terms[m2] = terms.get(m2, 0) + c * c2
        return Polynomial(self.gens, terms)

    # bases --------------------------------------------------------------
    def monomials_by_degree(self, cap: int) -> dict:
        """All monomials of degree <= cap grouped by degree, graded-lex ordered."""
        hit = self._basis_cache.get(cap)
        if hit is not None:
            return hit
        gens = self.gens
        n = len(gens)
        out = {}
        cur = [0] * n

        def rec(i, deg):
            if i == n:
                out.setdefault(deg, []).append(tuple(cur))
                return
            g = gens[i]
            top = 1 if g.odd else (cap - deg) // g.degree
            for e in range(0, top + 1):
                if deg + e * g.degree > cap:
                    break
                cur[i] = e
                rec(i + 1, deg + e * g.degree)
            cur[i] = 0

        if cap >= 0:
            rec(0, 0)
        for k in out:
            out[k].sort(reverse=True)
        self._basis_cache[cap] = out
        return out

    def monomial_basis(self, degree: int) -> list:
        if degree < 0:
            raise ValueError("degree must be >= 0")
        return list(self.monomials_by_degree(degree).get(degree, []))

    def validated(self) -> "SullivanModel":
        res = check_d_squared(self)
        if not res.ok:
            raise DifferentialError(
                f"d^2 {res.generator} = {res.residue} != 0 in model {self.name}",
                res.generator,
                res.residue,
            )
        return self


def apply_differential(m: SullivanModel, p: Polynomial) -> Polynomial:
    """Extend d to ``p`` as a degree +1 derivation."""
    return m.apply(p)


@dataclass(frozen=True)
class DSquaredCheck:
    ok: bool
    generator: str | None = None
    residue: Polynomial | None = None


def check_d_squared(m: SullivanModel) -> DSquaredCheck:
    for g, dg in zip(m.gens, m.d):
        r = m.apply(dg)
        if r:
            return DSquaredCheck(False, g.name, r)
    return DSquaredCheck(True)


def monomial_basis(m: SullivanModel, degree: int) -> list:
    return m.monomial_basis(degree)


def dimension_formula(m: SullivanModel) -> int:
    """Sum of odd degrees minus sum of (even degree - 1), taken literally."""
    return sum(g.degree for g in m.gens if g.odd) - sum(g.degree - 1 for g in m.gens if g.even)


def substitute(p: Polynomial, images: Sequence[Polynomial], gens: tuple) -> Polynomial:
    """Algebra map sending generator i to ``images[i]`` (degree-preserving)."""
    result = Polynomial.zero(gens)
    for mono, c in p.terms.items():
        term = Polynomial.constant(gens, c)
        for i, e in enumerate(mono):
            if e:
                term = term * images[i] ** e
                if not term:
                    break
        result = result + term
    return result
