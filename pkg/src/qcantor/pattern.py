"""Pattern basic sequences [[alpha_i]^{s_i} [beta_i]^{t_i}]^{upsilon_i} and their Theta sets.

Conventions used by the index functions:

* Positions n of Q are 1-based.  Block i occupies the positions
  ``block_end(i-1) < n <= block_end(i)`` with
  ``block_end(i) = sum_{j<=i} upsilon_j (s_j + t_j)``.
* Inside a block, the 0-based offset ``r`` is an alpha position when
  ``r mod (s_i + t_i) < s_i`` and a beta position otherwise.
* ``phi_alpha(i, c, d)`` numbers the alpha slots from 0 and ``G(m)`` is the
  0-based position of slot m.  ``g(x) = min{t : G(t) >= x}`` therefore counts
  the alpha slots among positions 1..x, which is the 1-based number of the last
  alpha slot at or before x.  ``i_alpha``, ``c_alpha``, ``d_alpha`` and
  ``C_alpha`` take that 1-based slot number, so ``i_alpha(g(n)) == i(n)``
  whenever block i(n) has alpha slots.
* The forced digit written at the alpha position n is ``F(g(n))``.
"""

from __future__ import annotations

import bisect
import itertools
import random
from dataclasses import dataclass
from typing import Callable, Sequence

from .basis import BasicSequence, DigitStream, RuleSequence
from .errors import ConstructionError, DomainError

Chooser = Callable[[int, tuple, random.Random], int]

MAX_EMPTY_BLOCKS = 100_000


def _seq(x, name: str, cls=RuleSequence) -> RuleSequence:
    if isinstance(x, cls):
        return x
    if isinstance(x, RuleSequence):
        return cls(x, x.name, length=x.length, cache=True)
    if isinstance(x, int):
        return cls.constant(x)
    if callable(x):
        return cls(x, name, cache=True)
    return cls.of_list(list(x), name)


class _SetSequence:
    """Memoized i -> sorted digits; ranges are kept as ranges so huge sets stay cheap."""

    def __init__(self, rule: Callable[[int], Sequence[int]], name: str = "I"):
        self._rule = rule
        self.name = name
        self._cache: dict[int, Sequence[int]] = {}

    def __call__(self, i: int) -> Sequence[int]:
        got = self._cache.get(i)
        if got is None:
            raw = self._rule(i)
            if isinstance(raw, range) and raw.step > 0:
                got = raw
            else:
                got = tuple(sorted(set(raw)))
            self._cache[i] = got
        return got


@dataclass(frozen=True)
class PatternParams:
    """The bundle (alpha, beta, s, t, upsilon, F, I).

    Sequences may be given as callables, lists, constants or
    :class:`RuleSequence` objects; they are normalised on construction.
    ``F`` is indexed by the 1-based alpha-slot number and ``I`` maps a block
    index to its admissible digits.  Blocks with ``s_i + t_i = 0`` are allowed
    and simply contribute no positions.
    """

    alpha: BasicSequence
    beta: BasicSequence
    s: RuleSequence
    t: RuleSequence
    upsilon: RuleSequence
    F: RuleSequence | None = None
    I: Callable[[int], tuple[int, ...]] | None = None
    name: str = "pattern"

    @classmethod
    def build(cls, alpha, beta, s, t, upsilon, F=None, I=None, name="pattern") -> "PatternParams":
        ups = _seq(upsilon, "upsilon")
        return cls(
            _seq(alpha, "alpha", BasicSequence),
            _seq(beta, "beta", BasicSequence),
            _seq(s, "s"),
            _seq(t, "t"),
            RuleSequence(lambda i: _positive(ups, i), ups.name, cache=True),
            None if F is None else _seq(F, "F"),
            None if I is None else (I if isinstance(I, _SetSequence) else _SetSequence(I)),
            name,
        )

    def with_digits(self, F=None, I=None) -> "PatternParams":
        return PatternParams(self.alpha, self.beta, self.s, self.t, self.upsilon,
                             self.F if F is None else _seq(F, "F"),
                             self.I if I is None else (I if isinstance(I, _SetSequence) else _SetSequence(I)),
                             self.name)


def _positive(seq, i):
    v = seq(i)
    if v < 1:
        raise DomainError(f"upsilon_{i} = {v} must be >= 1")
    return v


class PatternIndex:
    """Index machinery of a pattern: i(n), the position classes, Phi_alpha, G, g, C_alpha.

    Block boundaries are cached in append-only prefix-sum tables and looked
    up by bisection; all arithmetic is on Python integers.
    """

    def __init__(self, params: PatternParams):
        self.params = params
        self._block_end = [0]
        self._alpha_end = [0]
        self._ups_end = [0]
        self.q = BasicSequence(self._q_rule, f"Q({params.name})", cache=True)

    # -- block tables -------------------------------------------------------

    def _grow(self, enough: Callable[[], bool]) -> None:
        p = self.params
        empty_run = 0
        while not enough():
            i = len(self._block_end)
            s, t, u = p.s(i), p.t(i), p.upsilon(i)
            self._block_end.append(self._block_end[-1] + u * (s + t))
            self._alpha_end.append(self._alpha_end[-1] + u * s)
            self._ups_end.append(self._ups_end[-1] + u)
            empty_run = empty_run + 1 if s + t == 0 else 0
            if empty_run > MAX_EMPTY_BLOCKS:
                raise ConstructionError(f"{MAX_EMPTY_BLOCKS} consecutive empty blocks before block {i}")

    def block_end(self, i: int) -> int:
        """sum_{j<=i} upsilon_j (s_j + t_j)."""
        self._grow(lambda: len(self._block_end) > i)
        return self._block_end[i]

    def _alpha_block_end(self, i: int) -> int:
        self._grow(lambda: len(self._alpha_end) > i)
        return self._alpha_end[i]

    # -- positions ----------------------------------------------------------

    def i_of(self, n: int) -> int:
        """The block containing position n."""
        if n < 1:
            raise DomainError(f"position must be >= 1, got {n}")
        self._grow(lambda: self._block_end[-1] >= n)
        return bisect.bisect_left(self._block_end, n)

    def _locate(self, n: int) -> tuple[int, int, int]:
        i = self.i_of(n)
        s, t = self.params.s(i), self.params.t(i)
        c, r = divmod(n - 1 - self._block_end[i - 1], s + t)
        return i, c, r

    def is_beta_position(self, n: int) -> bool:
        i, _, r = self._locate(n)
        return r >= self.params.s(i)

    def c_of(self, n: int) -> int:
        """Repetition index (0-based) of position n inside its block."""
        return self._locate(n)[1]

    def _q_rule(self, n: int) -> int:
        i, _, r = self._locate(n)
        p = self.params
        return p.beta(i) if r >= p.s(i) else p.alpha(i)

    # -- alpha slots --------------------------------------------------------

    def phi_alpha(self, i: int, c: int, d: int) -> int:
        p = self.params
        if i < 1 or not 0 <= c < p.upsilon(i) or not 0 <= d < p.s(i):
            raise DomainError(f"({i}, {c}, {d}) is outside the alpha-slot domain")
        return self._alpha_block_end(i - 1) + c * p.s(i) + d

    def phi_alpha_inv(self, m: int) -> tuple[int, int, int]:
        if m < 0:
            raise DomainError(f"alpha-slot index must be >= 0, got {m}")
        self._grow(lambda: self._alpha_end[-1] > m)
        i = bisect.bisect_right(self._alpha_end, m)
        c, d = divmod(m - self._alpha_end[i - 1], self.params.s(i))
        return i, c, d

    def G_of(self, m: int) -> int:
        """0-based position of the alpha slot with 0-based number m."""
        i, c, d = self.phi_alpha_inv(m)
        p = self.params
        return self._block_end[i - 1] + c * (p.s(i) + p.t(i)) + d

    def g_of(self, x: int) -> int:
        """min{t >= 0 : G(t) >= x}: number of alpha slots among positions 1..x."""
        if x <= 0:
            return 0
        i, c, r = self._locate(x)
        s = self.params.s(i)
        return self._alpha_end[i - 1] + c * s + min(r + 1, s)

    def i_alpha(self, m: int) -> int:
        """Block of the m-th alpha slot (m >= 1)."""
        return self._slot(m)[0]

    def c_alpha(self, m: int) -> int:
        return self._slot(m)[1]

    def d_alpha(self, m: int) -> int:
        return self._slot(m)[2]

    def C_alpha(self, m: int) -> int:
        """Completed alpha runs before the m-th slot: sum_{j<i_alpha} upsilon_j + c_alpha."""
        i, c, _ = self._slot(m)
        return self._ups_end[i - 1] + c

    def _slot(self, m: int) -> tuple[int, int, int]:
        if m < 1:
            raise DomainError(f"alpha-slot number must be >= 1, got {m}")
        return self.phi_alpha_inv(m - 1)

    def alpha_subsequence(self) -> BasicSequence:
        """P = [alpha_1]^{s_1 upsilon_1} [alpha_2]^{s_2 upsilon_2} ..."""
        return BasicSequence(lambda m: self.params.alpha(self.i_alpha(m)),
                             f"P({self.params.name})", cache=True)


def build_pattern_q(params: PatternParams) -> BasicSequence:
    return PatternIndex(params).q


def vn_condition(params: PatternParams | PatternIndex, n: int) -> bool:
    """True when position n is a beta position."""
    idx = params if isinstance(params, PatternIndex) else PatternIndex(params)
    return idx.is_beta_position(n)


def choose_min(i: int, digits: tuple, rng: random.Random) -> int:
    return digits[0]


def choose_uniform(i: int, digits: tuple, rng: random.Random) -> int:
    return digits[rng.randrange(len(digits))]


def theta_stream(params: PatternParams, chooser: Chooser = choose_min, seed: int = 0,
                 index: PatternIndex | None = None) -> DigitStream:
    """A member of Theta(alpha, beta, s, t, upsilon, F, I), digit by digit.

    Beta positions take ``chooser(i, I_i, rng)``; alpha positions take the
    forced digit F(g(n)).
    """
    if params.I is None or params.F is None:
        raise DomainError("theta_stream needs both F and I")
    idx = index or PatternIndex(params)
    rng = random.Random(seed)

    def gen():
        p = params
        for n in itertools.count(1):
            i = idx.i_of(n)
            if idx.is_beta_position(n):
                digits = p.I(i)
                if not digits:
                    raise ConstructionError(f"I_{i} is empty (needed at position {n})")
                if digits[0] < 0 or digits[-1] >= p.beta(i):
                    raise ConstructionError(f"I_{i} = {digits} is not inside [0, {p.beta(i) - 1}]")
                d = chooser(i, digits, rng)
                if d not in digits:
                    raise ConstructionError(f"chooser returned {d}, not in I_{i}")
            else:
                m = idx.g_of(n)
                d = p.F(m)
                if d >= p.alpha(i):
                    raise ConstructionError(
                        f"forced digit F_{m} = {d} is not below alpha_{i} = {p.alpha(i)} (position {n})")
            yield d

    return DigitStream(idx.q, gen(), source="theta",
                       meta={"pattern": params.name, "seed": seed,
                             "chooser": getattr(chooser, "__name__", "custom")})
