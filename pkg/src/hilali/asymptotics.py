"""The explicit two-stage bound on h, its threshold, and seeded random experiments."""

from __future__ import annotations

import csv
import io
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .algebra import ModelError, SullivanModel
from .catalog import random_two_stage
from .elliptic import class_predicates, invariants

log = logging.getLogger(__name__)

TAIL_WINDOW = 64
CSV_COLUMNS = [
    "sample_index",
    "seed",
    "n",
    "m",
    "r",
    "dim_pi",
    "dim_H",
    "h_exact",
    "h_decimal",
    "bound_exact",
    "bound_decimal",
]


@dataclass(frozen=True)
class TwoStageParams:
    n: int  # dim V^even
    m: int  # dim W0
    r: int  # dim W1 - dim V^even

    def __post_init__(self):
        for v in (self.n, self.m, self.r):
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"two-stage parameters must be non-negative integers, got {self}")

    @property
    def total(self) -> int:
        return 2 * self.n + self.m + self.r

    @classmethod
    def of(cls, model: SullivanModel) -> "TwoStageParams":
        cp = class_predicates(model)
        if not cp.is_two_stage:
            raise ModelError(f"model {model.name} is not two-stage")
        n = len(model.even_gens)
        r = len(cp.w1) - n
        if r < 0:
            raise ModelError(f"model {model.name} has fewer second-stage than even generators")
        return cls(n, len(cp.w0), r)


def _denominator(p: TwoStageParams) -> Fraction:
    n, m, r = p.n, p.m, p.r
    return max(Fraction(n * n + n + m * m + m + 2 * n * m + 2 - 2 * r, 2), Fraction(2**r))


def two_stage_bound(p: TwoStageParams) -> Fraction:
    """(2n+m+r) / max((n^2+n+m^2+m+2nm+2-2r)/2, 2^r)."""
    return Fraction(p.total) / _denominator(p)


def case_bounds(p: TwoStageParams):
    """(case 1, case 2) bounds; None where the case hypothesis fails."""
    n, m, r = p.n, p.m, p.r
    c1 = Fraction(5 * n + 3 * m, n * n + m * m + 2 * n * m + 2) if 2 * r <= n + m else None
    c2 = Fraction(5 * r, 2**r) if 2 * r >= n + m else None
    return c1, c2


def word_length_bound(p: TwoStageParams) -> int:
    """Lower bound on dim H from words of length <= 2 in the first stage."""
    n, m = p.n, p.m
    return 1 + 2 * n + comb(n, 2) + m + comb(m, 2) + n * m - (n + p.r)


def jl_bound(p: TwoStageParams) -> int:
    """dim H >= 2^(dim W1 - dim V^even)."""
    return 2**p.r


def triples(total: int):
    for n in range(total // 2 + 1):
        for m in range(total - 2 * n + 1):
            yield TwoStageParams(n, m, total - 2 * n - m)


def _analytic_tail(eps: Fraction) -> int:
    """A total T0 from which every bound is provably < eps.

    With r <= (n+m)/2 the bound is at most 5/(n+m) <= 25/(2t); otherwise it
    is at most 5r/2^r with r >= t/5, and 5r/2^r decreases for r >= 2.
    """
    t = 10
    while True:
        r0 = -(-t // 5)
        if Fraction(25, 2 * t) < eps and Fraction(5 * r0, 2**r0) < eps:
            return t
        t += 1


@dataclass(frozen=True)
class ThresholdResult:
    epsilon: Fraction
    N: int
    witness: TwoStageParams | None  # a triple at total N-1 with bound >= epsilon
    witness_bound: Fraction | None
    verified_up_to: int  # every total in [N, verified_up_to] checked exhaustively
    tail_from: int  # analytic certificate covers totals >= tail_from

    @property
    def certified(self) -> bool:
        return self.verified_up_to >= self.tail_from - 1


def threshold(epsilon) -> ThresholdResult:
    """Smallest N with two_stage_bound < epsilon for every triple of total >= N."""
    eps = Fraction(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    tail = _analytic_tail(eps)
    last_bad = -1
    worst = None
    t = 0
    limit = tail + TAIL_WINDOW
    while t <= limit:
        for p in triples(t):
            b = two_stage_bound(p)
            if b >= eps and (t > last_bad or b > worst[1]):
                last_bad = t
                worst = (p, b)
        if last_bad >= 0:
            limit = max(limit, last_bad + 1 + TAIL_WINDOW)
        t += 1
    N = last_bad + 1
    return ThresholdResult(
        eps,
        N,
        worst[0] if worst else None,
        worst[1] if worst else None,
        t - 1,
        tail,
    )


# -- experiments ------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentRecord:
    sample_index: int
    seed: int
    params: TwoStageParams
    dim_pi: int
    dim_H: int
    h: Fraction
    bound: Fraction
    word_length: int
    jl: int

    def row(self) -> list:
        return [
            self.sample_index,
            self.seed,
            self.params.n,
            self.params.m,
            self.params.r,
            self.dim_pi,
            self.dim_H,
            _frac(self.h),
            f"{float(self.h):.10g}",
            _frac(self.bound),
            f"{float(self.bound):.10g}",
        ]


def _frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class ExperimentConfig:
    samples: int = 100
    seed: int = 0
    n_range: tuple = (0, 12)
    m_range: tuple = (0, 24)
    r_range: tuple = (0, 4)
    even_degrees: tuple = (2,)
    odd_degrees: tuple = (3, 5)
    max_power: int = 3
    pure: bool = False


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list = field(default_factory=list)
    failures: list = field(default_factory=list)  # (sample_index, seed, message)

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(CSV_COLUMNS)
        for rec in self.records:
            w.writerow(rec.row())
        return buf.getvalue()


def sample_seed(seed: int, index: int) -> int:
    return seed * 100003 + index


def run_sample(index: int, cfg: ExperimentConfig) -> ExperimentRecord:
    s = sample_seed(cfg.seed, index)
    rng = random.Random(s)
    n = rng.randint(*cfg.n_range)
    m = rng.randint(*cfg.m_range)
    r = rng.randint(*cfg.r_range)
    if n == 0:
        # without even generators the second stage needs pairs of closed odd ones
        r = 0 if cfg.pure else min(r, m // 2)
    model = random_two_stage(
        s, n, m, r, even_degrees=cfg.even_degrees, odd_degrees=cfg.odd_degrees, max_power=cfg.max_power, pure=cfg.pure
    )
    p = TwoStageParams.of(model)
    inv = invariants(model)
    return ExperimentRecord(
        index, s, p, inv.dim_pi, inv.dim_H_total, inv.hilali, two_stage_bound(p), word_length_bound(p), jl_bound(p)
    )


def run_experiment(cfg: ExperimentConfig, output: str | None = None) -> ExperimentResult:
    if cfg.samples < 0:
        raise ValueError("samples must be >= 0")
    res = ExperimentResult(cfg)
    for i in range(cfg.samples):
        try:
            res.records.append(run_sample(i, cfg))
        except ModelError as exc:
            log.warning("sample %d (seed %d) skipped: %s", i, sample_seed(cfg.seed, i), exc)
            res.failures.append((i, sample_seed(cfg.seed, i), str(exc)))
    if output is not None:
        with open(output, "w", newline="", encoding="utf-8") as fh:
            fh.write(res.csv_text())
    return res


def running_max_above(records: list, n0: int) -> Fraction | None:
    """Largest h among records with dim_pi >= n0 (None if there are none)."""
    hs = [r.h for r in records if r.dim_pi >= n0]
    return max(hs) if hs else None
