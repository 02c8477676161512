"""Desk-scale acceptance gate; a summary line per criterion is printed at the end of the run."""

import math
import random
import time
from fractions import Fraction
from itertools import combinations

import mpmath
import pytest

from qcantor.basis import digits_of_rational, log_rule, power_of_two, successor, value_of_digits
from qcantor.intsets import Squares
from qcantor.moran import MoranSpec, fww_bounds, hdt_gamma_seq
from qcantor.pattern import PatternIndex, PatternParams, choose_uniform, theta_stream
from qcantor.stats import (count_block, count_blocks, density_estimate, digit_set,
                           disc_perturbation_check, distinct_digits, mass_dimension_estimate,
                           normality_index, normality_indices, ratio_index, star_discrepancy)
from qcantor.witness import (UDSource, coverage_bound, digitrange_stream, example2_params,
                             lambda_stream, ndn_theta_params, pseudo_normal_stream)

from oracles import brute_star_discrepancy


class Clock:
    def __init__(self, limit):
        self.limit = limit

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start

    def check(self):
        assert self.elapsed < self.limit, f"took {self.elapsed:.2f}s, limit {self.limit}s"


@pytest.mark.criterion(1, "round-trip exactness, 200 rationals, successor, n=40, <5s")
def test_round_trip_exactness():
    rng = random.Random(20240101)
    Q = successor()
    bound = Fraction(1, math.prod(range(2, 42)))
    failures = 0
    with Clock(5) as clock:
        for _ in range(200):
            d = rng.randint(1, 10 ** 4)
            x = Fraction(rng.randrange(d), d)
            if not abs(x - value_of_digits(digits_of_rational(x, Q, 40), Q)) < bound:
                failures += 1
    assert failures == 0
    clock.check()


@pytest.mark.criterion(2, "exact star discrepancy equals brute force on 50 sets, N<=200, <10s")
def test_discrepancy_oracle():
    rng = random.Random(2)
    mismatches = 0
    with Clock(10) as clock:
        for _ in range(50):
            N = rng.randint(1, 200)
            den = rng.choice([N, 97, 1000, 2 ** 16])
            pts = [Fraction(rng.randrange(den), den) for _ in range(N)]
            if star_discrepancy(pts) != brute_star_discrepancy(pts):
                mismatches += 1
    assert mismatches == 0
    clock.check()


@pytest.mark.criterion(3, "golden Weyl D*_{10^4} < 0.01, <1s")
def test_weyl_benchmark():
    with Clock(1) as clock:
        d = star_discrepancy(UDSource("weyl-golden").points(10 ** 4))
    assert d < Fraction(1, 100)
    clock.check()


@pytest.mark.criterion(4, "perturbation inequality on 100 pairs, N<=500, <5s")
def test_perturbation_lemma():
    rng = random.Random(4)
    grid = [Fraction(0), Fraction(1, 1000), Fraction(1, 100), Fraction(1, 20), Fraction(1, 4)]
    violations = 0
    with Clock(5) as clock:
        for i in range(100):
            N = rng.randint(1, 500)
            den = 10 ** 4
            x = [Fraction(rng.randrange(den), den) for _ in range(N)]
            y = [(v + Fraction(rng.randint(-300, 300), den)) % 1 for v in x]
            eps = grid[i % len(grid)]
            if not disc_perturbation_check(x, y, eps).holds:
                violations += 1
    assert violations == 0
    clock.check()


@pytest.mark.criterion(5, "Feng-Wen-Wu closed forms, <1s")
def test_fww_closed_form():
    with Clock(1) as clock:
        rep = fww_bounds(MoranSpec.constant(2, Fraction(1, 4)), 10 ** 4)
        trivial = fww_bounds(MoranSpec.constant(1, Fraction(1, 4)), 100)
    assert abs(rep.lower[19] - 20 / 41) < 1e-9
    assert all(abs(u - 0.5) < 1e-12 for u in rep.upper)
    assert all(v == 0 for v in trivial.lower)
    clock.check()


def _random_params(seed):
    rng = random.Random(seed)
    size = 3000
    return PatternParams.build(
        [rng.randint(2, 6) for _ in range(size)],
        [rng.randint(2, 12) for _ in range(size)],
        [rng.randint(1, 5) for _ in range(size)],
        [rng.randint(0, 5) for _ in range(size)],
        [rng.randint(1, 6) for _ in range(size)],
        name=f"acc{seed}",
    )


@pytest.mark.criterion(6, "Phi_alpha round trip on 10^5 triples and i_alpha(g(n)) = i(n) for n <= 10^4, <10s")
def test_index_machinery():
    failures = 0
    with Clock(10) as clock:
        for seed in range(20):
            p = _random_params(seed)
            idx = PatternIndex(p)
            rng = random.Random(1000 + seed)
            for _ in range(5000):
                i = rng.randint(1, 500)
                c = rng.randrange(p.upsilon(i))
                d = rng.randrange(p.s(i))
                if idx.phi_alpha_inv(idx.phi_alpha(i, c, d)) != (i, c, d):
                    failures += 1
            for n in range(1, 10 ** 4 + 1):
                if idx.i_alpha(idx.g_of(n)) != idx.i_of(n):
                    failures += 1
    assert failures == 0
    clock.check()


def _displayed_upper(beta):
    with mpmath.workdps(50):
        return int(mpmath.floor(mpmath.power(beta, 1 - mpmath.sqrt(1 / mpmath.log(beta))))) + 1


@pytest.mark.criterion(7, "Theta structure on example 2 (l=1) over 10^4 positions, gamma to 1e-12, <30s")
def test_theta_structure():
    with Clock(30) as clock:
        base = example2_params(1)
        params = ndn_theta_params(base.alpha, base.beta, base.s, base.t, base.upsilon, seed=17)
        idx = PatternIndex(params)
        digits = theta_stream(params, chooser=choose_uniform, seed=23, index=idx).prefix(10 ** 4)
        bad_beta = bad_alpha = 0
        slot = 0
        for n, d in enumerate(digits, start=1):
            i = idx.i_of(n)
            offset = n - 1 - idx.block_end(i - 1)
            if offset % (params.s(i) + params.t(i)) >= params.s(i):
                shown = range(params.alpha(i), _displayed_upper(params.beta(i)) + 1)
                bad_beta += d not in shown
            else:
                slot += 1
                bad_alpha += d != params.F(slot)
        first = next(n for n in range(1, 100) if params.t(n) > 0)
        last = 13
        gammas = hdt_gamma_seq(params, last, start=first)
        worst = max(abs(g - math.log(_displayed_upper(params.beta(n)) - params.alpha(n) + 1)
                        / math.log(params.beta(n)))
                    for n, g in zip(range(first, last + 1), gammas))
    assert bad_beta == 0 and bad_alpha == 0
    assert worst < 1e-12
    clock.check()


@pytest.mark.criterion(8, "Lambda_Q witness, pow2, golden X, seed 7, horizon 10^4, <120s")
def test_lambda_witness():
    N = 10 ** 4
    Q = power_of_two()
    with Clock(120) as clock:
        xi = pseudo_normal_stream(log_rule(), 7)
        X = UDSource("weyl-golden")
        w = lambda_stream(Q, X, xi, N)
        digits = w.prefix(N)
        lam = w.construction
        d_star = star_discrepancy(w.normalized(N))
        ratios = [ratio_index(w, (a,), (b,), N) for a, b in combinations(range(4), 2)]
        ratios += [1 / r for r in ratios if r]
        nidx_big = normality_index(w, Q, (0,), N)
        nidx_small = normality_index(w, Q, (0,), 100)
        trace_errors = []
        for n, d in enumerate(digits, start=1):
            i = lam.block_of(n)
            if lam.in_S(n):
                if d != xi.digit(n - lam.L(i) + 1):
                    trace_errors.append(n)
            else:
                gap = abs(d - X.point(n) * Q(n))
                log_gap = -math.inf if gap == 0 else math.log(gap.numerator) - math.log(gap.denominator)
                if log_gap > lam.log_omega(n) + 1e-12:
                    trace_errors.append(n)
    counts = count_blocks(w, [(a,) for a in range(4)], N)
    problems = []
    if not d_star < Fraction(1, 10):
        problems.append(f"(a) D* = {float(d_star):.4f}")
    if any(r is None or not 0.7 <= r <= 1.4 for r in ratios):
        problems.append(f"(b) digit counts {dict((k[0], v) for k, v in counts.items())} give ratios outside [0.7, 1.4]")
    if not (nidx_big > 5 and nidx_big > nidx_small):
        problems.append(f"(c) normality index {float(nidx_big)} vs {float(nidx_small)}")
    if trace_errors:
        problems.append(f"(d) structural failures at {trace_errors[:5]}")
    assert not problems, "; ".join(problems)
    clock.check()


@pytest.mark.criterion(9, "W_Q(S) witness, squares, successor, horizon 10^4, <10s")
def test_digitrange_witness():
    N = 10 ** 4
    with Clock(10) as clock:
        S = Squares()
        w = digitrange_stream(successor(), S, N, seed=9)
        digits = w.prefix(N)
        all_squares = all(math.isqrt(d) ** 2 == d for d in digits)
        reached = coverage_bound(w, [j * j for j in range(10)], N)
        density = density_estimate(digit_set(w, N), 10 ** 6)
        mass = mass_dimension_estimate(S, 10 ** 6)
    assert all_squares
    assert reached is not None and reached <= N
    assert density < Fraction(1, 1000)
    assert 0.42 <= mass <= 0.52
    clock.check()


@pytest.mark.criterion(10, "Erdos-Renyi desk checks, pow2, seeded digits, n=10^3, <5s")
def test_erdos_renyi():
    with Clock(5) as clock:
        w = pseudo_normal_stream(power_of_two(), 10)
        ratio = Fraction(distinct_digits(w, 10 ** 3), 10 ** 3)
        density = density_estimate(digit_set(w, 10 ** 3), 10 ** 6)
    assert ratio > Fraction(9, 10)
    assert density < Fraction(1, 1000)
    clock.check()


@pytest.mark.criterion(11, "pseudo-normal calibration, log-rule, n=10^6, <30s")
def test_pseudo_normal_calibration():
    N = 10 ** 6
    with Clock(30) as clock:
        P = log_rule()
        w = pseudo_normal_stream(P, 11)
        indices = list(normality_indices(w, P, [(b,) for b in range(4)], N).values())
        z = pseudo_normal_stream(P, 11, forbid_zero=True)
        zero_counts = [count_block(z, (0,), n) for n in (10, 10 ** 3, 10 ** 5, N)]
    assert all(Fraction(9, 10) <= v <= Fraction(11, 10) for v in indices), [float(v) for v in indices]
    assert zero_counts == [0, 0, 0, 0]
    clock.check()
