"""Slow, independent reference implementations used only by the tests."""

import math
from fractions import Fraction


def floor_digits(x: Fraction, qs) -> list[int]:
    # E_n = floor(q_1..q_n x) - q_n floor(q_1..q_{n-1} x)
    out, prod, prev = [], 1, 0
    for q in qs:
        prod *= q
        cur = math.floor(prod * x)
        out.append(cur - q * prev)
        prev = cur
    return out


def naive_count(digits, B, n) -> int:
    k = len(B)
    return sum(1 for m in range(0, n - k + 1) if tuple(digits[m:m + k]) == tuple(B))


def brute_star_discrepancy(points) -> Fraction:
    """max over anchored [0, c) and [0, c] with c in points U {1}."""
    N = len(points)
    best = Fraction(0)
    for c in set(points) | {Fraction(1)}:
        below = sum(1 for p in points if p < c)
        upto = sum(1 for p in points if p <= c)
        best = max(best, abs(Fraction(below, N) - c), abs(Fraction(upto, N) - c))
    return best


def brute_qnk(qs, n, k) -> Fraction:
    return sum((Fraction(1, math.prod(qs[j:j + k])) for j in range(n)), Fraction(0))


def unroll_pattern(alpha, beta, s, t, ups, blocks):
    """Positions of the bracket word, block by block: (q, is_beta, block) triples."""
    out = []
    for i in range(1, blocks + 1):
        for _ in range(ups(i)):
            out.extend((alpha(i), False, i) for _ in range(s(i)))
            out.extend((beta(i), True, i) for _ in range(t(i)))
    return out


def g_by_search(G, x, upper):
    """min{t >= 0 : G(t) >= x} by bisection over a strictly increasing G."""
    lo, hi = 0, upper
    while lo < hi:
        mid = (lo + hi) // 2
        if G(mid) >= x:
            hi = mid
        else:
            lo = mid + 1
    return lo


def lambda_L_bruteforce(q, p, N, cap=10_000):
    """L_1..L_N straight from the four-term definition, no shortcuts."""
    L = [0]
    for n in range(1, N + 1):
        # T_n: smallest t such that every j in [t, cap] has log q_j > n
        t = cap
        while t > 1 and math.log(q(t - 1)) > n:
            t -= 1
        start = max(L[-1], 1)
        head = sum(math.log(q(start + i)) for i in range(n))
        j = start
        while sum(math.log(q(start + i)) for i in range(j - start)) <= n * head:
            j += 1
        nu = j - start
        ups = []
        for k in range(1, n + 1):
            Qnk = brute_qnk([q(j) for j in range(1, n + k)], n, k)
            j = 1
            while True:
                total = Fraction(0)
                for i in range(1, j + 1):
                    m = i - k + 1
                    if m >= 1:
                        total += sum((Fraction(1, math.prod(p(l) for l in range(a, a + k)))
                                      for a in range(1, m + 1)), Fraction(0))
                if total > 0 and Qnk / total < Fraction(1, n):
                    break
                j += 1
            ups.append(j)
        L.append(max(t, L[-1] + n * n, L[-1] + nu, max(ups)))
    return L
