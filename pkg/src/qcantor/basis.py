"""Basic sequences, digit streams and exact Q-Cantor expansions.

Indices are 1-based throughout: ``Q(1)`` is q_1 and ``stream.digit(1)`` is E_1.
Every value that the expansion touches is an exact integer or
:class:`fractions.Fraction`; floats only appear in logarithmic diagnostics.
"""

from __future__ import annotations

import bisect
import itertools
import math
from collections import Counter
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

import mpmath

from .errors import DomainError, RangeError

Rational = Fraction


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions, decimal strings and ``"p/q"`` strings."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x)
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise DomainError(f"not a rational number: {x!r}") from exc


def _floor_checked(value: float, exact: Callable[[], mpmath.mpf]) -> int:
    k = math.floor(value)
    # float log is trusted unless it sits within rounding distance of an integer
    if min(value - k, k + 1 - value) > 1e-9:
        return k
    with mpmath.workdps(60):
        return int(mpmath.floor(exact()))


# _E_CEIL[k-1] = ceil(e^k); e^k is irrational, so n >= e^k iff n >= ceil(e^k)
_E_CEIL: list[int] = []


def floor_log(n: int) -> int:
    """``floor(log n)`` (natural log) for a positive integer, exact."""
    if n < 1:
        raise DomainError(f"floor_log needs n >= 1, got {n}")
    if n.bit_length() > 1000:
        return _floor_checked(math.log(n), lambda: mpmath.log(n))
    while not _E_CEIL or _E_CEIL[-1] <= n:
        k = len(_E_CEIL) + 1
        with mpmath.workdps(30 + k // 2):
            _E_CEIL.append(int(mpmath.ceil(mpmath.exp(k))))
    return bisect.bisect_right(_E_CEIL, n)


def floor_loglog(n: int) -> int:
    """``floor(log log n)`` for an integer n >= 2."""
    if n < 2:
        raise DomainError(f"floor_loglog needs n >= 2, got {n}")
    return _floor_checked(math.log(math.log(n)), lambda: mpmath.log(mpmath.log(n)))


class RuleSequence:
    """An integer sequence indexed from 1 and produced by a rule.

    ``length`` is None for infinite rules.  Values are memoized only when
    ``cache`` is set, which is worthwhile for rules that do real work
    (pattern lookups); closed forms are cheaper to recompute.
    """

    minimum = 0

    def __init__(self, rule: Callable[[int], int], name: str = "rule",
                 length: int | None = None, cache: bool = False,
                 monotone: bool = False):
        self._rule = rule
        self.name = name
        self.length = length
        self.monotone = monotone
        self._cache: dict[int, int] | None = {} if cache else None

    def __call__(self, n: int) -> int:
        if n < 1:
            raise DomainError(f"{self.name}: index must be >= 1, got {n}")
        if self.length is not None and n > self.length:
            raise RangeError(f"{self.name}: index {n} beyond explicit length {self.length}")
        if self._cache is not None:
            v = self._cache.get(n)
            if v is not None:
                return v
        v = self._rule(n)
        if v < self.minimum:
            raise DomainError(f"{self.name}: value {v} at index {n} is below {self.minimum}")
        if self._cache is not None:
            self._cache[n] = v
        return v

    def values(self, start: int, stop: int) -> list[int]:
        """Values at indices ``start..stop`` inclusive."""
        return [self(n) for n in range(start, stop + 1)]

    def is_finite(self) -> bool:
        return self.length is not None

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r})"

    @classmethod
    def of_list(cls, values: Sequence[int], name: str | None = None):
        vals = tuple(int(v) for v in values)
        if not vals:
            raise DomainError("explicit sequence must be non-empty")
        bad = [(i + 1, v) for i, v in enumerate(vals) if v < cls.minimum]
        if bad:
            i, v = bad[0]
            raise DomainError(f"explicit sequence has {v} < {cls.minimum} at index {i}")
        label = name or "list:" + ",".join(map(str, vals))
        return cls(lambda n: vals[n - 1], label, length=len(vals))

    @classmethod
    def constant(cls, c: int):
        c = int(c)
        if c < cls.minimum:
            raise DomainError(f"constant {c} is below {cls.minimum}")
        return cls(lambda n: c, f"const:{c}", monotone=True)


class BasicSequence(RuleSequence):
    """A sequence of bases q_n >= 2."""

    minimum = 2

    def log(self, n: int) -> float:
        return math.log(self(n))

    def prefix_product(self, n: int) -> int:
        return math.prod(self(j) for j in range(1, n + 1))


def successor() -> BasicSequence:
    return BasicSequence(lambda n: n + 1, "succ", monotone=True)


def power_of_two() -> BasicSequence:
    return BasicSequence(lambda n: 1 << n, "pow2", monotone=True)


def log_rule() -> BasicSequence:
    """q_n = floor(log n) + 2."""
    return BasicSequence(lambda n: floor_log(n) + 2, "log", monotone=True)


def explicit(values: Sequence[int]) -> BasicSequence:
    return BasicSequence.of_list(values)


def constant(c: int) -> BasicSequence:
    return BasicSequence.constant(c)


KNOWN_RULES = ("succ", "pow2", "log", "const:<c>", "list:<q1,q2,...>")


def parse_rule(text: str) -> BasicSequence:
    """Build a basic sequence from a descriptor such as ``pow2`` or ``const:2``."""
    text = text.strip()
    head, _, arg = text.partition(":")
    head = head.lower()
    try:
        if head in ("succ", "successor") and not arg:
            return successor()
        if head in ("pow2", "power-of-two") and not arg:
            return power_of_two()
        if head in ("log", "log-rule") and not arg:
            return log_rule()
        if head == "const" and arg:
            return constant(int(arg))
        if head in ("list", "explicit") and arg:
            return explicit([int(v) for v in arg.split(",")])
    except ValueError as exc:
        raise DomainError(f"bad basic-sequence descriptor {text!r}: {exc}") from exc
    raise DomainError(f"unknown basic-sequence rule {text!r}; known rules: {', '.join(KNOWN_RULES)}")


def block(*digits: int) -> tuple[int, ...]:
    """Validate and return a block (non-empty tuple of non-negative ints)."""
    if len(digits) == 1 and not isinstance(digits[0], int):
        digits = tuple(digits[0])
    if not digits:
        raise DomainError("a block must have length >= 1")
    if any(d < 0 for d in digits):
        raise DomainError(f"block entries must be non-negative: {digits}")
    return tuple(int(d) for d in digits)


class DigitStream:
    """Lazily produced digits E_1, E_2, ... attached to a basic sequence.

    Digits are pulled from ``digits`` on demand and kept, so every query at
    the same index sees the same value.  Each digit is checked against
    ``0 <= E_n < q_n`` as it arrives.
    """

    def __init__(self, base: BasicSequence, digits: Iterable[int], source: str = "generated",
                 meta: dict | None = None, length: int | None = None):
        self.base = base
        self.source = source
        self.meta = dict(meta or {})
        self.length = length
        self._it: Iterator[int] = iter(digits)
        self._digits: list[int] = []

    @classmethod
    def from_digits(cls, digits: Sequence[int], base: BasicSequence, source: str = "explicit"):
        digits = list(digits)
        return cls(base, digits, source=source, length=len(digits))

    def _extend(self, n: int) -> None:
        have = len(self._digits)
        if n <= have:
            return
        if self.length is not None and n > self.length:
            raise RangeError(f"stream has only {self.length} digits, asked for {n}")
        fresh = list(itertools.islice(self._it, n - have))
        if len(fresh) < n - have:
            raise RangeError(f"digit source exhausted after {have + len(fresh)} digits")
        q = self.base
        for m, d in enumerate(fresh, start=have + 1):
            if not 0 <= d < q(m):
                raise DomainError(f"digit E_{m}={d} outside [0, {q(m) - 1}]")
        self._digits.extend(fresh)

    def digit(self, n: int) -> int:
        if n < 1:
            raise DomainError(f"digit index must be >= 1, got {n}")
        self._extend(n)
        return self._digits[n - 1]

    def prefix(self, n: int) -> list[int]:
        """E_1..E_n as a new list."""
        self._extend(n)
        return self._digits[:n]

    def normalized(self, n: int) -> list[Fraction]:
        """The points E_m / q_m for m <= n."""
        q = self.base
        return [Fraction(d, q(m)) for m, d in enumerate(self.prefix(n), start=1)]

    def __iter__(self) -> Iterator[int]:
        for n in itertools.count(1):
            if self.length is not None and n > self.length:
                return
            yield self.digit(n)

    def __repr__(self) -> str:
        return f"DigitStream(source={self.source!r}, base={self.base.name!r})"


def take(stream, n: int) -> list[int]:
    """First ``n`` digits of a DigitStream or a plain digit sequence."""
    if n < 0:
        raise DomainError(f"prefix length must be >= 0, got {n}")
    if isinstance(stream, DigitStream):
        return stream.prefix(n)
    out = list(itertools.islice(iter(stream), n))
    if len(out) < n:
        raise RangeError(f"sequence has only {len(out)} digits, asked for {n}")
    return out


def _unit_fraction_parts(x) -> tuple[int, int]:
    x = as_fraction(x)
    if not 0 <= x < 1:
        raise DomainError(f"x must lie in [0, 1), got {x}")
    return x.numerator, x.denominator


def _rational_digits(a: int, b: int, Q: BasicSequence) -> Iterator[int]:
    # r_m = a/b with a fixed denominator: multiplying by q_m and dropping the
    # integer part never introduces new prime factors.
    for m in itertools.count(1):
        a *= Q(m)
        e, a = divmod(a, b)
        yield e


def digits_of_rational(x, Q: BasicSequence, n: int) -> list[int]:
    """E_1..E_n of the canonical Q-Cantor expansion of a rational ``x`` in [0, 1)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    a, b = _unit_fraction_parts(x)
    return list(itertools.islice(_rational_digits(a, b, Q), n))


def rational_stream(x, Q: BasicSequence) -> DigitStream:
    a, b = _unit_fraction_parts(x)
    return DigitStream(Q, _rational_digits(a, b, Q), source="rational",
                       meta={"x": str(Fraction(a, b))})


def value_of_digits(E: Sequence[int], Q: BasicSequence) -> Fraction:
    """Exact partial sum  sum_m E_m / (q_1 ... q_m)."""
    num, den = 0, 1
    for m, e in enumerate(E, start=1):
        q = Q(m)
        if not 0 <= e < q:
            raise DomainError(f"digit E_{m}={e} outside [0, {q - 1}]")
        num = num * q + e
        den *= q
    return Fraction(num, den)


def t_map(x, Q: BasicSequence, n: int) -> Fraction:
    """T_{Q,n}(x) = frac(q_1 ... q_n x)."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    x = as_fraction(x)
    a, b = x.numerator % x.denominator, x.denominator
    for j in range(1, n + 1):
        a = a * Q(j) % b
    return Fraction(a, b)


def t_orbit(x, Q: BasicSequence, n: int) -> list[Fraction]:
    """T_{Q,0}(x), ..., T_{Q,n-1}(x)."""
    x = as_fraction(x)
    a, b = x.numerator % x.denominator, x.denominator
    out = []
    for j in range(1, n + 1):
        out.append(Fraction(a, b))
        a = a * Q(j) % b
    return out


def _sum_unit_fractions(counts: Counter) -> Fraction:
    return sum((Fraction(c, d) for d, c in counts.items()), Fraction(0))


def _qnk_counts(Q: BasicSequence, start: int, stop: int, k: int) -> Counter:
    """Multiplicities of the products q_j...q_{j+k-1} for start <= j <= stop."""
    counts: Counter = Counter()
    if stop < start:
        return counts
    window = [Q(j) for j in range(start, start + k)]
    prod = math.prod(window)
    for j in range(start, stop + 1):
        counts[prod] += 1
        if j < stop:
            nxt = Q(j + k)
            prod = prod // Q(j) * nxt
    return counts


def qnk(Q: BasicSequence, n: int, k: int) -> Fraction:
    """Q_n^(k) = sum_{j=1}^n 1/(q_j q_{j+1} ... q_{j+k-1}), exactly.

    Needs bases up to q_{n+k-1}; a finite explicit sequence that is too
    short raises :class:`RangeError`.
    """
    if n < 1 or k < 1:
        raise DomainError(f"need n >= 1 and k >= 1, got n={n}, k={k}")
    return _sum_unit_fractions(_qnk_counts(Q, 1, n, k))


def probe_divergence(Q: BasicSequence, k: int, checkpoints: Sequence[int]) -> list[tuple[int, Fraction]]:
    """Partial sums Q_n^(k) at each checkpoint n (strictly increasing)."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    _check_increasing(checkpoints)
    rows = []
    total = Fraction(0)
    done = 0
    for n in checkpoints:
        total += _sum_unit_fractions(_qnk_counts(Q, done + 1, n, k))
        done = n
        rows.append((n, total))
    return rows


def probe_infinite_in_limit(Q: BasicSequence, window: tuple[int, int]) -> int:
    """min q_n over the inclusive index window; a diagnostic, not a limit."""
    lo, hi = window
    if lo < 1 or hi < lo:
        raise DomainError(f"window must satisfy 1 <= lo <= hi, got {window}")
    return min(Q(n) for n in range(lo, hi + 1))


def _check_increasing(points: Sequence[int]) -> None:
    if not points:
        raise DomainError("checkpoint list is empty")
    if points[0] < 1:
        raise DomainError(f"checkpoints must be >= 1, got {points[0]}")
    for a, b in zip(points, points[1:]):
        if b <= a:
            raise DomainError(f"checkpoints not strictly increasing: {a} then {b}")
