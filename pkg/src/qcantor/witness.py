"""Digit streams that witness the set constructions behind the dimension theorems.

* :func:`pseudo_normal_stream` - seeded i.i.d. digits, the stand-in for a
  P-normal number (almost every number is one, so a random draw serves).
* :class:`LambdaConstruction` / :func:`lambda_stream` - members of the set
  built to be ratio normal and distribution normal but not normal.
* :func:`ndn_theta_params` - the Theta parameters whose members are normal
  but not distribution normal.
* :func:`digitrange_stream` - a number whose digit set is a prescribed S.
"""

from __future__ import annotations

import bisect
import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Iterator

import mpmath

from .basis import (BasicSequence, DigitStream, RuleSequence, _floor_checked, floor_log,
                    floor_loglog, log_rule, qnk)
from .errors import ConstructionError, DomainError, HorizonError, PreconditionError
from .intsets import IntegerSet
from .pattern import PatternIndex, PatternParams

DEFAULT_SEARCH_CAP = 1_000_000


class WitnessStream(DigitStream):
    """A digit stream plus read-only provenance (theorem, parameters, seed)."""

    def __init__(self, base, digits, provenance: dict, construction=None, length=None):
        super().__init__(base, digits, source=provenance.get("theorem", "witness"),
                         meta=provenance, length=length)
        self.provenance = MappingProxyType(dict(provenance))
        self.construction = construction


# -- uniformly distributed sources -----------------------------------------

UD_KINDS = ("weyl-golden", "weyl-alpha", "scaled-non-ud", "constant")


@dataclass(frozen=True)
class UDSource:
    """Deterministic points x_1, x_2, ... in [0, 1), all exact rationals.

    ``weyl-golden`` uses floor(2^bits (sqrt5 - 1)/2) / 2^bits in place of the
    irrational rotation; for n << 2^(bits/2) the points keep the order of the
    true golden sequence and move by less than n 2^-bits.
    """

    kind: str = "weyl-golden"
    alpha: Fraction | None = None
    value: Fraction = Fraction(0)
    bits: int = 128

    def __post_init__(self):
        if self.kind not in UD_KINDS:
            raise DomainError(f"unknown source {self.kind!r}; known: {', '.join(UD_KINDS)}")
        if self.kind == "weyl-alpha" and self.alpha is None:
            raise DomainError("weyl-alpha needs an alpha")
        if self.kind == "constant" and not 0 <= self.value < 1:
            raise DomainError("constant source value must lie in [0, 1)")

    def _golden_numerator(self) -> int:
        one = 1 << self.bits
        return (math.isqrt(5 << (2 * self.bits)) - one) // 2

    def point(self, n: int) -> Fraction:
        if self.kind == "weyl-golden":
            return Fraction(n * self._golden_numerator() % (1 << self.bits), 1 << self.bits)
        if self.kind == "scaled-non-ud":
            return Fraction(n * self._golden_numerator() % (1 << self.bits), 1 << (self.bits + 1))
        if self.kind == "weyl-alpha":
            v = n * self.alpha
            return v - math.floor(v)
        return self.value

    def points(self, N: int) -> list[Fraction]:
        if self.kind in ("weyl-golden", "scaled-non-ud"):
            a, mod = self._golden_numerator(), 1 << self.bits
            den = mod if self.kind == "weyl-golden" else mod << 1
            return [Fraction(n * a % mod, den) for n in range(1, N + 1)]
        return [self.point(n) for n in range(1, N + 1)]


# -- seeded stand-in for a P-normal number ---------------------------------

def pseudo_normal_stream(P: BasicSequence, seed: int, forbid_zero: bool = False) -> WitnessStream:
    """Independent uniform digits on {0..p_n-1} ({1..p_n-1} with ``forbid_zero``)."""
    rng = random.Random(seed)
    lo = 1 if forbid_zero else 0

    def gen() -> Iterator[int]:
        for n in itertools.count(1):
            yield rng.randrange(lo, P(n))

    return WitnessStream(P, gen(), {"theorem": "pseudo-normal", "P": P.name, "seed": seed,
                                    "forbid_zero": forbid_zero})


# -- the Lambda_Q construction ---------------------------------------------

def _ceil_log(i: int) -> int:
    return 0 if i <= 1 else floor_log(i) + 1


class LambdaConstruction:
    """Bookkeeping for Lambda_Q: the sequence L_n, the set S and the windows V(n).

    L_0 = 0 and L_n is the maximum of
      * T_n = min{t : log q_j > n for all j >= t},
      * L_{n-1} + n^2,
      * L_{n-1} + nu_n,
      * max_{k<=n} upsilon_{n,k},
    where nu_n is the number of bases, counted from L_{n-1}, whose log-sum
    first exceeds n times the log-sum of the n bases starting there, and
    upsilon_{n,k} is the first j with sum_{i<=j} P_{i-k+1}^(k) > n Q_n^(k)
    for the log-rule P.  Every search gives up past ``search_cap``.
    """

    def __init__(self, Q: BasicSequence, P: BasicSequence | None = None,
                 search_cap: int = DEFAULT_SEARCH_CAP):
        self.Q = Q
        self.P = P or log_rule()
        self.search_cap = search_cap
        self._L = [0]
        self._detail: list[dict] = [{}]
        self._sufmin: list[float] | None = None
        # per order k: cumulative P^(k)_m and D_k(j) = sum_{m<=j-k+1} P^(k)_m
        self._pk: dict[int, list[Fraction]] = {}
        self._dk: dict[int, list[Fraction]] = {}
        self._logq_prefix = [0.0]

    # T_n ------------------------------------------------------------------

    def threshold_index(self, n: int) -> int:
        """min{t : log q_j > n for every j >= t}, certified up to the search cap."""
        Q, cap = self.Q, self.search_cap
        bound = math.exp(n)
        if Q.monotone:
            if Q(cap) <= bound:
                raise HorizonError(f"T_{n}: log q_j > {n} not reached by j = {cap}")
            lo, hi = 1, 1
            while Q(hi) <= bound:
                lo, hi = hi + 1, min(2 * hi, cap)
            while lo < hi:
                mid = (lo + hi) // 2
                if Q(mid) > bound:
                    hi = mid
                else:
                    lo = mid + 1
            return lo
        if self._sufmin is None:
            logs = [Q.log(j) for j in range(1, cap + 1)]
            suf = [0.0] * cap
            cur = math.inf
            for j in range(cap - 1, -1, -1):
                cur = min(cur, logs[j])
                suf[j] = cur
            self._sufmin = suf
        t = bisect.bisect_right(self._sufmin, n) + 1
        if t > cap:
            raise HorizonError(f"T_{n}: log q_j > {n} for all j >= t not certified within {cap}")
        return t

    # nu_n -----------------------------------------------------------------

    def _logq(self, j: int) -> float:
        return self.Q.log(j)

    def nu(self, n: int) -> int:
        start = max(self.L(n - 1), 1)
        head = math.fsum(self._logq(start + i) for i in range(n))
        target = n * head
        total = 0.0
        count = 0
        while total <= target:
            if start + count > self.search_cap:
                raise HorizonError(f"nu_{n}: no crossing before index {self.search_cap}")
            total += self._logq(start + count)
            count += 1
        return count

    # upsilon_{n,k} ----------------------------------------------------------

    def _extend_dk(self, k: int, j: int) -> None:
        pk = self._pk.setdefault(k, [Fraction(0)])
        dk = self._dk.setdefault(k, [Fraction(0)] * k)  # D_k(j) = 0 for j < k
        P = self.P
        while len(dk) <= j:
            m = len(pk)  # next P^(k)_m
            term = Fraction(1, math.prod(P(l) for l in range(m, m + k)))
            pk.append(pk[-1] + term)
            dk.append(dk[-1] + pk[m])

    def upsilon(self, n: int, k: int) -> int:
        target = n * qnk(self.Q, n, k)
        self._extend_dk(k, k)
        dk = self._dk[k]
        j = k
        while True:
            if j >= len(dk):
                self._extend_dk(k, min(2 * len(dk), self.search_cap + 1))
                if j >= len(dk):
                    raise HorizonError(f"upsilon_{n},{k}: no crossing before index {self.search_cap}")
            if dk[j] > target:
                return j
            j += 1

    # L_n ------------------------------------------------------------------

    def L(self, n: int) -> int:
        while len(self._L) <= n:
            m = len(self._L)
            prev = self._L[-1]
            terms = {
                "threshold": self.threshold_index(m),
                "square": prev + m * m,
                "nu": prev + self.nu(m),
                "upsilon": max(self.upsilon(m, k) for k in range(1, m + 1)),
            }
            self._L.append(max(terms.values()))
            self._detail.append(terms)
        return self._L[n]

    def terms(self, n: int) -> dict:
        """The four candidates whose maximum is L_n."""
        self.L(n)
        return dict(self._detail[n])

    def block_of(self, n: int) -> int:
        """i(n) = max{j : L_j <= n} (0 before L_1)."""
        j = 1
        while self.L(j) <= n:
            j += 1
        return j - 1

    def in_S(self, n: int) -> bool:
        i = self.block_of(n)
        return i >= 1 and n - self.L(i) < i

    def log_omega(self, n: int) -> float:
        """log of omega_n = q_n^(1 - eps_n), eps_n evaluated at the position's own base."""
        while len(self._logq_prefix) < n:
            self._logq_prefix.append(self._logq_prefix[-1] + self._logq(len(self._logq_prefix)))
        log_q = self._logq(n)
        return log_q - math.sqrt(min(self._logq_prefix[n - 1], log_q))

    def epsilon(self, n: int) -> float:
        log_q = self._logq(n)
        return (log_q - self.log_omega(n)) / log_q


def _log_abs(x: Fraction) -> float:
    return math.log(abs(x.numerator)) - math.log(x.denominator)


def within_omega(digit: int, target: Fraction, log_omega: float) -> bool:
    """target - omega <= digit < target + omega, decided on logs."""
    diff = digit - target
    if diff == 0:
        return True
    return _log_abs(diff) < log_omega


def lambda_stream(Q: BasicSequence, X: UDSource, xi: DigitStream, horizon: int,
                  search_cap: int = DEFAULT_SEARCH_CAP,
                  construction: LambdaConstruction | None = None) -> WitnessStream:
    """The first ``horizon`` digits of a member of Lambda_Q.

    Positions in S = U_i {L_i, ..., L_i + i - 1} copy xi: E_{L_i + m} is the
    (m+1)-th digit of xi.  Elsewhere E_n is the integer nearest x_n q_n (ties
    go down), clipped to [ceil(log i(n)), q_n - 1]; it must also lie within
    omega_n of x_n q_n or the construction fails.
    """
    lam = construction or LambdaConstruction(Q, search_cap=search_cap)

    def gen():
        i, L_i, L_next = 0, 0, lam.L(1)
        for n in range(1, horizon + 1):
            while L_next <= n:
                i += 1
                L_i, L_next = L_next, lam.L(i + 1)
            q = Q(n)
            if i >= 1 and n - L_i < i:
                yield xi.digit(n - L_i + 1)
                continue
            y = X.point(n) * q
            lowest = _ceil_log(i)
            if lowest > q - 1:
                raise ConstructionError(f"V({n}) empty: ceil(log i(n)) = {lowest} > q_n - 1 = {q - 1}")
            r = math.ceil(y - Fraction(1, 2))
            d = min(max(r, lowest), q - 1)
            if not within_omega(d, y, lam.log_omega(n)):
                raise ConstructionError(
                    f"V({n}) empty: nearest admissible digit {d} is not within omega_n of x_n q_n")
            yield d

    prov = {"theorem": "lambda", "Q": Q.name, "X": X.kind, "xi": xi.meta.get("seed"),
            "horizon": horizon, "search_cap": lam.search_cap}
    return WitnessStream(Q, gen(), prov, construction=lam, length=horizon)


# -- Theta parameters for normal but not distribution normal numbers --------

def ndn_upper(beta: int) -> int:
    """floor(beta^(1 - (1/log beta)^(1/2))) + 1."""
    expo = 1 - (1 / math.log(beta)) ** 0.5
    exact = lambda: mpmath.power(beta, 1 - mpmath.sqrt(1 / mpmath.log(beta)))
    return _floor_checked(beta ** expo, exact) + 1


def ndn_digit_set(alpha: int, beta: int) -> range:
    return range(alpha, ndn_upper(beta) + 1)


def ndn_theta_params(alpha, beta, s, t, upsilon, seed: int, on_empty: str = "error",
                     forbid_zero: bool = False, name: str = "ndn") -> PatternParams:
    """Theta parameters with I_i = {alpha_i, ..., floor(beta_i^(1-(1/log beta_i)^(1/2))) + 1}.

    F is a pseudo-normal stream over P = [alpha_1]^{s_1 upsilon_1} [alpha_2]^{s_2 upsilon_2} ...
    ``on_empty`` decides what happens at a block whose displayed set is
    empty or leaves [0, beta_i - 1]: ``"error"`` raises when the block is
    used, ``"clip"`` intersects with the digit range and falls back to
    {beta_i - 1} if nothing is left.
    """
    if on_empty not in ("error", "clip"):
        raise DomainError(f"on_empty must be 'error' or 'clip', got {on_empty!r}")
    base = PatternParams.build(alpha, beta, s, t, upsilon, name=name)

    def I(i: int):
        a, b = base.alpha(i), base.beta(i)
        shown = ndn_digit_set(a, b)
        if len(shown) and shown[-1] <= b - 1:
            return shown
        if on_empty == "error":
            raise ConstructionError(
                f"I_{i} = {{{a}, ..., {ndn_upper(b)}}} is empty or exceeds beta_{i} - 1 = {b - 1}")
        kept = range(a, min(ndn_upper(b), b - 1) + 1)
        return kept if len(kept) else (b - 1,)

    idx = PatternIndex(base)
    xi = pseudo_normal_stream(idx.alpha_subsequence(), seed, forbid_zero=forbid_zero)
    F = RuleSequence(xi.digit, f"xi(seed={seed})")
    return base.with_digits(F=F, I=I)


def example1_params(name: str = "example1") -> PatternParams:
    """alpha_n = floor(log log(n+2)) + 2, beta_n = floor(log n) + 2, s_n = floor(log n), t_n = n, upsilon_n = 2^n."""
    return PatternParams.build(
        lambda n: floor_loglog(n + 2) + 2,
        lambda n: floor_log(n) + 2,
        floor_log,
        lambda n: n,
        lambda n: 1 << n,
        name=name,
    )


def example2_params(ell: int, name: str | None = None) -> PatternParams:
    """As example 1 but t_n = floor((beta_n / alpha_n)^(ell+1) s_n)."""
    a = lambda n: floor_loglog(n + 2) + 2
    b = lambda n: floor_log(n) + 2
    return PatternParams.build(
        a, b, floor_log,
        lambda n: b(n) ** (ell + 1) * floor_log(n) // a(n) ** (ell + 1),
        lambda n: 1 << n,
        name=name or f"example2(l={ell})",
    )


@dataclass(frozen=True)
class ConditionRow:
    """Finite values of the four limit conditions at one n.

    ``nq`` is t_n alpha_n^k / (s_n beta_n^k), whose limit is 0 under (NQ)
    and positive under (NotNQ).  None marks a zero denominator.
    """

    n: int
    nq: Fraction | None
    rnq: Fraction | None
    dnq: Fraction | None


def condition_probe(params: PatternParams, k: int, N: int, checkpoints=None) -> list[ConditionRow]:
    if N < 2:
        raise DomainError(f"N must be >= 2, got {N}")
    want = set(checkpoints) if checkpoints is not None else None
    p = params
    us, ust = 0, 0
    rows = []
    for n in range(1, N + 1):
        s, t, u = p.s(n), p.t(n), p.upsilon(n)
        us += u * s
        ust += u * (s + t)
        if n < 2 or (want is not None and n not in want):
            continue
        a, b = p.alpha(n), p.beta(n)
        nq = Fraction(t * a ** k, s * b ** k) if s else None
        rnq = Fraction(a ** k, s) if s else None
        dnq = Fraction(us, ust) if ust else None
        rows.append(ConditionRow(n, nq, rnq, dnq))
    return rows


# -- numbers with a prescribed digit set ------------------------------------

def _cycling(S: IntegerSet) -> Iterator[int]:
    # s_0; s_0, s_1; s_0, s_1, s_2; ... hits every element infinitely often
    for r in itertools.count(1):
        for j in range(r):
            try:
                yield S.nth(j)
            except IndexError:
                break


@dataclass
class DigitRangePlan:
    """The sparse positions T (tau_j > tau_{j-1}^2) and the values f(tau_j)."""

    Q: BasicSequence
    S: IntegerSet
    horizon: int
    taus: list[int] = field(default_factory=list)
    values: list[int] = field(default_factory=list)

    def f(self, t: int) -> int | None:
        j = bisect.bisect_left(self.taus, t)
        if j < len(self.taus) and self.taus[j] == t:
            return self.values[j]
        return None


def _plan_positions(Q: BasicSequence, S: IntegerSet, horizon: int) -> DigitRangePlan:
    plan = DigitRangePlan(Q, S, horizon)
    prev = 0
    for value in _cycling(S):
        t = prev * prev + 1
        while t <= horizon and Q(t) <= value:
            t += 1
        if t > horizon:
            break
        plan.taus.append(t)
        plan.values.append(value)
        prev = t
    return plan


def digitrange_stream(Q: BasicSequence, S: IntegerSet, horizon: int, seed: int = 0) -> WitnessStream:
    """First ``horizon`` digits of a number whose digit set is S.

    Positions tau_j in T force the value f(tau_j) (a cycling enumeration of
    S); every other position draws uniformly from S cap {0, ..., q_k - 2},
    or takes min S where that intersection is empty.
    """
    try:
        s_min = S.min()
    except DomainError:
        raise DomainError("S must be non-empty") from None
    q_inf = Q(1) if Q.monotone else min(Q(n) for n in range(1, horizon + 1))
    if s_min >= q_inf:
        raise PreconditionError(f"min S = {s_min} is not below min Q = {q_inf}")
    plan = _plan_positions(Q, S, horizon)
    rng = random.Random(seed)

    def gen():
        for k in range(1, horizon + 1):
            forced = plan.f(k)
            if forced is not None:
                yield forced
                continue
            count = S.count_below(Q(k) - 1)
            yield S.nth(rng.randrange(count)) if count else s_min

    prov = {"theorem": "digitrange", "Q": Q.name, "S": S.name, "seed": seed, "horizon": horizon}
    return WitnessStream(Q, gen(), prov, construction=plan, length=horizon)


def coverage_bound(stream: DigitStream, targets, horizon: int) -> int | None:
    """First n <= horizon by which every value in ``targets`` has appeared as a digit."""
    missing = set(targets)
    for n, d in enumerate(stream.prefix(horizon), start=1):
        missing.discard(d)
        if not missing:
            return n
    return None
