"""Homogeneous Moran sets: spec validation and dimension-bound sequences."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .basis import as_fraction
from .errors import DomainError


def log_ratio(x: Fraction) -> float:
    """Natural log of a positive rational without underflow for tiny values."""
    if x <= 0:
        raise DomainError(f"log of non-positive value {x}")
    return math.log(x.numerator) - math.log(x.denominator)


class _Neumaier:
    """Compensated running sum."""

    __slots__ = ("s", "c")

    def __init__(self):
        self.s = 0.0
        self.c = 0.0

    def add(self, v: float) -> None:
        t = self.s + v
        if abs(self.s) >= abs(v):
            self.c += (self.s - t) + v
        else:
            self.c += (v - t) + self.s
        self.s = t

    @property
    def value(self) -> float:
        return self.s + self.c


@dataclass(frozen=True)
class MoranSpec:
    """Interval length ``delta``, branch counts n_k and contractions c_k (k >= 1)."""

    delta: Fraction
    n: Callable[[int], int]
    c: Callable[[int], Fraction]
    name: str = "moran"

    @classmethod
    def constant(cls, n_k: int, c_k, delta=1) -> "MoranSpec":
        c_k = as_fraction(c_k)
        return cls(as_fraction(delta), lambda k: n_k, lambda k: c_k, f"n={n_k},c={c_k}")


def validate_moran_spec(spec: MoranSpec, depth: int) -> list[str]:
    """Violations of n_1 c_1 <= delta, n_k c_k <= 1, 0 < c_k < 1, n_k >= 1 for k <= depth."""
    problems = []
    if not 0 < spec.delta <= 1:
        problems.append(f"delta={spec.delta} not in (0, 1]")
    for k in range(1, depth + 1):
        n_k, c_k = spec.n(k), as_fraction(spec.c(k))
        if n_k < 1:
            problems.append(f"k={k}: n_k={n_k} < 1")
        if not 0 < c_k < 1:
            problems.append(f"k={k}: c_k={c_k} not in (0, 1)")
        if k == 1 and n_k * c_k > spec.delta:
            problems.append(f"k=1: n_1 c_1 = {n_k * c_k} > delta = {spec.delta}")
        if n_k * c_k > 1:
            problems.append(f"k={k}: n_k c_k = {n_k * c_k} > 1")
    return problems


@dataclass(frozen=True)
class DimensionBoundReport:
    """Finite lower/upper bound sequences, index k-1 holding the value at depth k.

    ``None`` marks a degenerate (non-positive) denominator.
    """

    K: int
    lower: tuple[float | None, ...]
    upper: tuple[float | None, ...]

    def _tail_min(self, seq) -> float | None:
        vals = [v for v in seq[self.K // 2:] if v is not None]
        return min(vals) if vals else None

    @property
    def lower_tail_min(self) -> float | None:
        """Minimum of the lower sequence over the tail half k > K/2."""
        return self._tail_min(self.lower)

    @property
    def upper_tail_min(self) -> float | None:
        return self._tail_min(self.upper)

    def running_min(self, which: str = "lower") -> list[float | None]:
        seq = self.lower if which == "lower" else self.upper
        out, cur = [], None
        for v in seq:
            if v is not None:
                cur = v if cur is None else min(cur, v)
            out.append(cur)
        return out


def fww_bounds(spec: MoranSpec, K: int) -> DimensionBoundReport:
    """Feng-Wen-Wu bound sequences up to depth K.

    lower(k) = log(n_1...n_k) / -log(c_1...c_{k+1} n_{k+1})
    upper(k) = log(n_1...n_k) / -log(c_1...c_k)

    Products are never formed; the logs are accumulated with compensation.
    """
    if K < 1:
        raise DomainError(f"K must be >= 1, got {K}")
    log_n, neg_log_c = _Neumaier(), _Neumaier()
    lower, upper = [], []
    nxt_c = -log_ratio(as_fraction(spec.c(1)))
    for k in range(1, K + 1):
        log_n.add(math.log(spec.n(k)))
        neg_log_c.add(nxt_c)
        c_up = neg_log_c.value
        nxt_c = -log_ratio(as_fraction(spec.c(k + 1)))
        c_low = c_up + nxt_c - math.log(spec.n(k + 1))
        num = log_n.value
        upper.append(num / c_up if c_up > 0 else None)
        lower.append(num / c_low if c_low > 0 else None)
    return DimensionBoundReport(K, tuple(lower), tuple(upper))


def theta_moran_spec(params) -> MoranSpec:
    """The Moran structure of a Theta set: c_k = 1/q_k, n_k = |I_{i(k)}| at beta positions, else 1."""
    from .pattern import PatternIndex

    idx = params if isinstance(params, PatternIndex) else PatternIndex(params)

    def n_k(k: int) -> int:
        if not idx.is_beta_position(k):
            return 1
        size = len(idx.params.I(idx.i_of(k)))
        if size == 0:
            raise DomainError(f"I_{idx.i_of(k)} is empty (position {k})")
        return size

    q = idx.q
    return MoranSpec(Fraction(1), n_k, lambda k: Fraction(1, q(k)), "theta")


def hdt_gamma_seq(params, N: int, start: int = 1) -> list[float]:
    """log|I_n| / log beta_n for n = start..N."""
    out = []
    for n in range(start, N + 1):
        size, beta = len(params.I(n)), params.beta(n)
        if size < 1 or beta < 2:
            raise DomainError(f"need |I_n| >= 1 and beta_n >= 2 at n={n}")
        out.append(math.log(size) / math.log(beta))
    return out


@dataclass(frozen=True)
class HDTRow:
    n: int
    hdt1: float | None
    hdt2: float | None


def _ratio(num: float, den: float) -> float | None:
    if num == 0:
        return 0.0
    return num / den if den > 0 else None


def hdt_condition_probe(params, N: int, checkpoints=None) -> list[HDTRow]:
    """Finite values of the two side conditions of the Theta dimension lemma.

    hdt1(n) = s_n log alpha_n / sum_{i<n} upsilon_i t_i log beta_i
    hdt2(n) = s_n log alpha_n / (t_n log beta_n)
    """
    if N < 2:
        raise DomainError(f"N must be >= 2, got {N}")
    want = set(checkpoints) if checkpoints is not None else None
    # the hdt1 denominator grows like sum 2^i for the worked examples, so it is
    # accumulated as a log to stay finite
    log_den = -math.inf
    rows = []
    p = params
    for n in range(1, N + 1):
        head = p.s(n) * math.log(p.alpha(n))
        if n >= 2 and (want is None or n in want):
            if head == 0:
                hdt1 = 0.0
            elif log_den == -math.inf:
                hdt1 = None
            else:
                hdt1 = math.exp(math.log(head) - log_den)
            rows.append(HDTRow(n, hdt1, _ratio(head, p.t(n) * math.log(p.beta(n)))))
        ut = p.upsilon(n) * p.t(n)
        if ut:
            log_den = _logaddexp(log_den, math.log(ut) + math.log(math.log(p.beta(n))))
    return rows


def _logaddexp(a: float, b: float) -> float:
    if a == -math.inf:
        return b
    hi, lo = max(a, b), min(a, b)
    return hi + math.log1p(math.exp(lo - hi))
