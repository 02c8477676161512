"""Digit-stream statistics: block counts, normality indices, discrepancy, digit sets."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .basis import BasicSequence, DigitStream, as_fraction, block, qnk, take
from .errors import DomainError
from .intsets import IntegerSet, IntegerSetWindow


def _prefix_table(B: tuple[int, ...]) -> list[int]:
    fail = [0] * len(B)
    j = 0
    for i in range(1, len(B)):
        while j and B[i] != B[j]:
            j = fail[j - 1]
        if B[i] == B[j]:
            j += 1
        fail[i] = j
    return fail


@dataclass(frozen=True)
class BlockCount:
    block: tuple[int, ...]
    count: int
    position: int


class BlockCountAccumulator:
    """Streaming N_n(B): occurrences of ``B`` lying inside the first n digits.

    A Knuth-Morris-Pratt automaton keeps the cost O(1) amortized per digit.
    """

    def __init__(self, B):
        self.block = block(B)
        self.count = 0
        self.position = 0
        self._fail = _prefix_table(self.block)
        self._state = 0

    def push(self, d: int) -> None:
        B, j = self.block, self._state
        while j and d != B[j]:
            j = self._fail[j - 1]
        if d == B[j]:
            j += 1
        if j == len(B):
            self.count += 1
            j = self._fail[j - 1]
        self._state = j
        self.position += 1

    def extend(self, digits) -> None:
        for d in digits:
            self.push(d)

    def snapshot(self) -> BlockCount:
        return BlockCount(self.block, self.count, self.position)


def count_block(stream, B, n: int) -> int:
    """N_n(B): start positions m <= n-k+1 with (E_m, ..., E_{m+k-1}) = B."""
    B = block(B)
    if n <= 0:
        return 0
    digits = take(stream, n)
    if len(B) == 1:
        return digits.count(B[0])
    acc = BlockCountAccumulator(B)
    acc.extend(digits)
    return acc.count


def count_blocks(stream, blocks, n: int) -> dict[tuple[int, ...], int]:
    """N_n(B) for several blocks at once (one pass per distinct length)."""
    blocks = [block(B) for B in blocks]
    digits = take(stream, max(n, 0))
    out = {}
    for k in sorted({len(B) for B in blocks}):
        grams = Counter(zip(*(digits[i:] for i in range(k))))
        for B in blocks:
            if len(B) == k:
                out[B] = grams.get(B, 0)
    return out


def _qnk_for_index(Q: BasicSequence, n: int, k: int) -> Fraction:
    if Q.length is not None and n + k - 1 > Q.length:
        # finite explicit bases: keep only the terms whose bases are all given
        usable = Q.length - k + 1
        if usable < 1:
            raise DomainError(f"explicit sequence of length {Q.length} has no order-{k} terms")
        return qnk(Q, usable, k)
    return qnk(Q, n, k)


def normality_index(stream, Q: BasicSequence | None, B, n: int) -> Fraction:
    """N_n(B) / Q_n^(k); tends to 1 for Q-normal numbers of order k = len(B)."""
    B = block(B)
    k = len(B)
    if n < k:
        raise DomainError(f"need n >= k, got n={n}, k={k}")
    Q = Q if Q is not None else stream.base
    return Fraction(count_block(stream, B, n)) / _qnk_for_index(Q, n, k)


def normality_indices(stream, Q: BasicSequence | None, blocks, n: int) -> dict[tuple[int, ...], Fraction]:
    """normality_index for many blocks sharing one prefix scan."""
    Q = Q if Q is not None else stream.base
    counts = count_blocks(stream, blocks, n)
    denoms = {}
    out = {}
    for B, c in counts.items():
        k = len(B)
        if k not in denoms:
            denoms[k] = _qnk_for_index(Q, n, k)
        out[B] = Fraction(c) / denoms[k]
    return out


def ratio_index(stream, B1, B2, n: int) -> Fraction | None:
    """N_n(B1) / N_n(B2), or None when B2 has not occurred."""
    B1, B2 = block(B1), block(B2)
    if len(B1) != len(B2):
        raise DomainError("ratio_index needs blocks of equal length")
    counts = count_blocks(stream, [B1, B2], n)
    if counts[B2] == 0:
        return None
    return Fraction(counts[B1], counts[B2])


def star_discrepancy(points: Sequence) -> Fraction:
    """Exact D_N* = max_i max(i/N - x_(i), x_(i) - (i-1)/N) over the sorted sample."""
    xs = sorted(as_fraction(x) for x in points)
    N = len(xs)
    if N == 0:
        raise DomainError("star discrepancy of an empty sample")
    if xs[0] < 0 or xs[-1] >= 1:
        raise DomainError("points must lie in [0, 1)")
    best = Fraction(0)
    for i, x in enumerate(xs, start=1):
        # (i - N x)/N and (N x - i + 1)/N share the denominator N
        nx = x * N
        cand = max(i - nx, nx - (i - 1))
        if cand > best:
            best = cand
    return best / N


@dataclass(frozen=True)
class DiscrepancyReport:
    """Exact star discrepancy plus the bracket for the two-sided discrepancy."""

    N: int
    d_star: Fraction

    @property
    def two_sided_lower(self) -> Fraction:
        return self.d_star

    @property
    def two_sided_upper(self) -> Fraction:
        return min(Fraction(1), 2 * self.d_star)

    def note(self) -> str:
        return "D_N* <= D_N <= 2 D_N*"


def discrepancy_report(points: Sequence) -> DiscrepancyReport:
    return DiscrepancyReport(len(points), star_discrepancy(points))


@dataclass(frozen=True)
class PerturbationCheck:
    holds: bool
    difference: Fraction
    bound: Fraction
    n_bar: int
    d_x: Fraction
    d_y: Fraction


def disc_perturbation_check(x: Sequence, y: Sequence, eps) -> PerturbationCheck:
    """Evaluate |D*(x) - D*(y)| <= 2 eps + N_bar(eps)/N with N_bar(eps) = #{n : |x_n - y_n| > eps}."""
    if len(x) != len(y):
        raise DomainError(f"length mismatch: {len(x)} vs {len(y)}")
    if not x:
        raise DomainError("need at least one point")
    eps = as_fraction(eps)
    if eps < 0:
        raise DomainError("eps must be non-negative")
    xs = [as_fraction(v) for v in x]
    ys = [as_fraction(v) for v in y]
    n_bar = sum(1 for a, b in zip(xs, ys) if abs(a - b) > eps)
    d_x, d_y = star_discrepancy(xs), star_discrepancy(ys)
    diff = abs(d_x - d_y)
    bound = 2 * eps + Fraction(n_bar, len(xs))
    return PerturbationCheck(diff <= bound, diff, bound, n_bar, d_x, d_y)


def distinct_digits(stream, n: int) -> int:
    """d_n: number of distinct values among E_1..E_n."""
    return len(set(take(stream, n)))


def digit_set(stream, n: int) -> IntegerSetWindow:
    """The observed part of S_Q(x): sorted distinct digits of the first n positions."""
    return IntegerSetWindow.of(take(stream, n))


def density_estimate(S: IntegerSetWindow | IntegerSet, m: int) -> Fraction:
    """#(S cap [0, m)) / m."""
    if m < 1:
        raise DomainError(f"horizon must be >= 1, got {m}")
    return Fraction(S.count_below(m), m)


def mass_dimension_estimate(S: IntegerSetWindow | IntegerSet, n: int) -> float:
    """log #(S cap [0, n/2)) / log n; ``-inf`` when the intersection is empty."""
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")
    count = S.count_below((n + 1) // 2)
    if count == 0:
        return -math.inf
    return math.log(count) / math.log(n)


@dataclass(frozen=True)
class MassDimensionProfile:
    rows: tuple[tuple[int, float], ...]
    upper: float
    lower: float


def mass_dimension_profile(S, checkpoints: Sequence[int]) -> MassDimensionProfile:
    """Estimates at each checkpoint; ``upper``/``lower`` are max/min over the tail half."""
    rows = tuple((n, mass_dimension_estimate(S, n)) for n in checkpoints)
    tail = [v for _, v in rows[len(rows) // 2:]]
    return MassDimensionProfile(rows, max(tail), min(tail))
