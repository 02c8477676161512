"""Sets of non-negative integers: finite observation windows and lazy infinite sets."""

from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import DomainError


@dataclass(frozen=True)
class IntegerSetWindow:
    """Sorted distinct members of a set, known completely below ``horizon``.

    ``horizon`` is None when the members were merely observed (e.g. the
    digits seen so far) and no completeness claim is made.
    ``members`` may be any sorted sequence, including a ``range``.
    """

    members: Sequence[int]
    horizon: int | None = None

    def __post_init__(self):
        if isinstance(self.members, (tuple, list)):
            m = self.members
            if any(b <= a for a, b in zip(m, m[1:])):
                raise DomainError("members must be sorted and duplicate-free")
            if m and m[0] < 0:
                raise DomainError("members must be non-negative")

    @classmethod
    def of(cls, values: Iterable[int], horizon: int | None = None) -> "IntegerSetWindow":
        return cls(tuple(sorted(set(values))), horizon)

    def count_below(self, m: int) -> int:
        """#{s in S : s < m}."""
        if self.horizon is not None and m > self.horizon:
            raise DomainError(f"window only complete below {self.horizon}, asked about {m}")
        return bisect.bisect_left(self.members, m)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, v: int) -> bool:
        i = bisect.bisect_left(self.members, v)
        return i < len(self.members) and self.members[i] == v

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)


class IntegerSet:
    """A possibly infinite set of non-negative integers, enumerated in order.

    Subclasses give ``nth`` (0-based) and ``count_below``; the generic
    implementation materialises a sorted iterable lazily.
    """

    name = "set"

    def __init__(self, values: Iterable[int] | None = None, name: str | None = None):
        self._source = iter(values) if values is not None else None
        self._seen: list[int] = []
        self._exhausted = values is None
        if name:
            self.name = name

    def _pull_until(self, predicate) -> None:
        while not self._exhausted and not predicate():
            try:
                v = next(self._source)
            except StopIteration:
                self._exhausted = True
                break
            if v < 0 or (self._seen and v <= self._seen[-1]):
                raise DomainError(f"{self.name}: values must be non-negative and strictly increasing")
            self._seen.append(v)

    def nth(self, j: int) -> int:
        self._pull_until(lambda: len(self._seen) > j)
        if j >= len(self._seen):
            raise IndexError(f"{self.name} has only {len(self._seen)} elements")
        return self._seen[j]

    def count_below(self, m: int) -> int:
        self._pull_until(lambda: bool(self._seen) and self._seen[-1] >= m)
        return bisect.bisect_left(self._seen, m)

    def min(self) -> int:
        try:
            return self.nth(0)
        except IndexError:
            raise DomainError(f"{self.name} is empty") from None

    def __contains__(self, v: int) -> bool:
        return self.count_below(v + 1) > self.count_below(v)

    def window(self, horizon: int) -> IntegerSetWindow:
        """Members below ``horizon``, complete."""
        n = self.count_below(horizon)
        return IntegerSetWindow(tuple(self.nth(j) for j in range(n)), horizon)

    def __iter__(self) -> Iterator[int]:
        for j in itertools.count():
            try:
                yield self.nth(j)
            except IndexError:
                return


class Squares(IntegerSet):
    name = "squares"

    def __init__(self):
        super().__init__(None)

    def nth(self, j: int) -> int:
        return j * j

    def count_below(self, m: int) -> int:
        return 0 if m <= 0 else math.isqrt(m - 1) + 1

    def window(self, horizon: int) -> IntegerSetWindow:
        return IntegerSetWindow(_SquaresView(self.count_below(horizon)), horizon)


class Naturals(IntegerSet):
    """N_0 = {0, 1, 2, ...}."""

    name = "naturals"

    def __init__(self):
        super().__init__(None)

    def nth(self, j: int) -> int:
        return j

    def count_below(self, m: int) -> int:
        return max(m, 0)

    def window(self, horizon: int) -> IntegerSetWindow:
        return IntegerSetWindow(range(max(horizon, 0)), horizon)


class _SquaresView(Sequence):
    # read-only sorted view so large windows of squares stay O(1) in memory
    def __init__(self, n: int):
        self._n = n

    def __len__(self) -> int:
        return self._n

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [j * j for j in range(*i.indices(self._n))]
        if i < 0:
            i += self._n
        if not 0 <= i < self._n:
            raise IndexError(i)
        return i * i


def parse_set(text: str) -> IntegerSet:
    """``squares``, ``naturals`` or ``list:0,1,4``."""
    head, _, arg = text.strip().partition(":")
    head = head.lower()
    if head == "squares" and not arg:
        return Squares()
    if head in ("naturals", "n0") and not arg:
        return Naturals()
    if head == "list" and arg:
        try:
            vals = sorted({int(v) for v in arg.split(",")})
        except ValueError as exc:
            raise DomainError(f"bad set list {text!r}") from exc
        return IntegerSet(vals, name=f"list:{arg}")
    raise DomainError(f"unknown set {text!r}; known sets: squares, naturals, list:<a,b,...>")
