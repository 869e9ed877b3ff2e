"""Exact evaluation of every bound and closed form, plus the property suites.

Two displayed formulas in the source material are internally inconsistent and
are handled explicitly rather than silently corrected:

* The symmetric-construction ratio is exactly ``k - 1 + k/(2**k - 1)``.  The
  commonly quoted ``k - 2**-k`` figure comes from an algebra slip (it exceeds
  the exact value for every k >= 2) and is exposed only as
  :func:`symmetric_ratio_quoted_bound` for side-by-side reporting.

* The per-level closed form ``sum x_i (2**(k+1-i) - 1)(k+1-i)`` for the online
  cost disagrees with the defining double sum already at k = 2 (6*x1 + x2
  versus 4*x1 + x2).  The double sum, which simulation reproduces exactly, is
  ground truth; the alternative form is reported next to it.
"""

from __future__ import annotations

import bisect
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .algorithms import run_online
from .core import Instance, as_rational, format_rational
from .offline import optimal_balanced, optimal_bruteforce, optimal_cost, optimal_dp


def _xs(values: Iterable) -> list[Fraction]:
    return [as_rational(x) for x in values]


# ---------------------------------------------------------------------------
# closed forms and bounds
# ---------------------------------------------------------------------------

def ratio_bound_deterministic(xs: Sequence, k: Optional[int] = None) -> Fraction:
    """k minus the 2^-i-weighted mean index of the gap ledger.

    This is the guaranteed competitive-ratio lower bound of the adaptive
    construction with per-level gaps x_i.
    """
    xs = _xs(xs)
    if k is None:
        k = len(xs)
    if len(xs) != k:
        raise ValueError("ledger length must equal k")
    if any(x < 0 for x in xs):
        raise ValueError("gaps must be nonnegative")
    den = sum(x / 2**i for i, x in enumerate(xs, start=1))
    if den == 0:
        raise ValueError("ledger must contain a positive gap")
    num = sum(i * x / 2**i for i, x in enumerate(xs, start=1))
    return k - num / den


def symmetric_ratio(k: int) -> Fraction:
    """Exact online/offline ratio of the unit-gap symmetric tree.

    Equals (k*2^k - 2^k + 1) / (2^k - 1) = k - 1 + k/(2^k - 1): each of the
    2^(k-i) level-i requests pays 2^i - 1 while the offline optimum pays 1.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    value = Fraction(k * 2**k - 2**k + 1, 2**k - 1)
    assert value >= k - 1  # the sound form of the advertised bound
    return value


def symmetric_ratio_quoted_bound(k: int) -> Fraction:
    """The commonly quoted ``k - 2**-k`` figure (reference only).

    Exceeds :func:`symmetric_ratio` for k >= 2; kept for reports, never
    asserted.
    """
    return Fraction(k) - Fraction(1, 2**k)


def online_cost_formula(xs: Sequence) -> Fraction:
    """Ground-truth online cost of the adaptive instance: the double sum
    sum_i 2^(k-i) * sum_{j<=i} 2^(i-j) x_j (both trees, cleanup excluded)."""
    xs = _xs(xs)
    k = len(xs)
    total = Fraction(0)
    for i in range(1, k + 1):
        inner = sum(2 ** (i - j) * xs[j - 1] for j in range(1, i + 1))
        total += 2 ** (k - i) * inner
    return total


def online_cost_alt_form(xs: Sequence) -> Fraction:
    """The alternative per-level form sum x_i (2^(k+1-i) - 1)(k+1-i).

    Disagrees with :func:`online_cost_formula` at k = 2 (6*x1 + x2 versus
    4*x1 + x2); reported for transparency, never used in assertions.
    """
    xs = _xs(xs)
    k = len(xs)
    return sum((x * (2 ** (k + 1 - i) - 1) * (k + 1 - i) for i, x in enumerate(xs, start=1)), Fraction(0))


def opt_cost_formula(xs: Sequence) -> Fraction:
    """Upper bound on the offline optimum: sum 2^(k-i) x_i (eps terms aside)."""
    xs = _xs(xs)
    k = len(xs)
    return sum((2 ** (k - i) * x for i, x in enumerate(xs, start=1)), Fraction(0))


def check_doubling_condition(xs: Sequence) -> bool:
    """Is every gap at most twice the largest earlier gap?

    This is the sufficient condition under which the adaptive construction
    proves a Theta(k) ratio.  Requires x_1 > 0 and x_i >= 0.
    """
    xs = _xs(xs)
    if not xs or xs[0] <= 0:
        raise ValueError("first gap must be positive")
    if any(x < 0 for x in xs):
        raise ValueError("gaps must be nonnegative")
    best = xs[0]
    for x in xs[1:]:
        if x > 2 * best:
            return False
        best = max(best, x)
    return True


def prefix_mass_ratio(xs: Sequence, m: int, k: Optional[int] = None) -> Fraction:
    """(sum_{i<=m} 2^-i x_i) / (sum_{i<=k} 2^-i x_i), exact.

    Under :func:`check_doubling_condition` this is at least m/k for every m.
    """
    xs = _xs(xs)
    if k is None:
        k = len(xs)
    if not (1 <= m <= k <= len(xs)):
        raise ValueError("need 1 <= m <= k <= len(xs)")
    total = sum(x / 2**i for i, x in enumerate(xs[:k], start=1))
    if total == 0:
        raise ValueError("ledger mass is zero")
    prefix = sum(x / 2**i for i, x in enumerate(xs[:m], start=1))
    return prefix / total


def weighted_index_mean(ys: Sequence) -> Fraction:
    """sum y_i * i / sum y_i with 1-based indices."""
    ys = _xs(ys)
    if not ys:
        raise ValueError("empty sequence")
    total = sum(ys, Fraction(0))
    if total <= 0:
        raise ValueError("weights must have positive total")
    return sum((i * y for i, y in enumerate(ys, start=1)), Fraction(0)) / total


def geometric_index_mean(c, k: int) -> Fraction:
    """Weighted mean index of the geometric weights c, c^2, ..., c^k (direct sum)."""
    c = as_rational(c)
    if c <= 1:
        raise ValueError("ratio must exceed 1")
    if k < 1:
        raise ValueError("k must be >= 1")
    powers = []
    acc = Fraction(1)
    for _ in range(k):
        acc *= c
        powers.append(acc)
    return weighted_index_mean(powers)


def fast_growth_upper_bound(xs: Sequence, eps, k: Optional[int] = None) -> Fraction:
    """Value of 2(k+1) - 2 * weighted mean index of (x_i 2^-i) for ledgers whose
    gaps grow by at least (2+eps) per level.

    Such ledgers escape the logarithmic regime: the expression converges (from
    below) to the constant 2 + 4/eps as k grows, which is asserted here.
    """
    xs = _xs(xs)
    eps = as_rational(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if k is None:
        k = len(xs)
    if len(xs) != k:
        raise ValueError("ledger length must equal k")
    growth = 2 + eps
    for prev, cur in zip(xs, xs[1:]):
        if cur < growth * prev:
            raise ValueError("ledger must grow by at least (2+eps) per level")
    ys = [x / 2**i for i, x in enumerate(xs, start=1)]
    value = 2 * (k + 1) - 2 * weighted_index_mean(ys)
    assert value <= 2 + Fraction(4) / eps
    return value


def ratio_bound_randomized(xs: Sequence, k: Optional[int] = None) -> Fraction:
    """(1/8) * (sum_{i<k} x_i 2^-i (k-i)) / (sum_{i<k} x_i 2^-i).

    Lower-bounds E[online] / offline for the same-shape randomized tree whose
    free-server distributions are symmetric per level; the accounting requires
    the top-level gap to be zeroed (x_k = 0).
    """
    xs = _xs(xs)
    if k is None:
        k = len(xs)
    if len(xs) != k:
        raise ValueError("ledger length must equal k")
    if xs[-1] != 0:
        raise ValueError("top-level gap must be zero for this bound")
    den = sum(x / 2**i for i, x in enumerate(xs[:-1], start=1))
    if den == 0:
        raise ValueError("ledger mass is zero")
    num = sum((k - i) * x / 2**i for i, x in enumerate(xs[:-1], start=1))
    return Fraction(1, 8) * num / den


@dataclass(frozen=True)
class BoundReport:
    """A reproducible record of one bound evaluation."""

    formula: str
    k: int
    xs: tuple[Fraction, ...]
    value: Fraction
    aux: dict = field(default_factory=dict, compare=False)

    def to_jsonable(self) -> dict:
        return {
            "formula": self.formula,
            "k": self.k,
            "x": [format_rational(x) for x in self.xs],
            "value": format_rational(self.value),
            "value_decimal": float(self.value),
            "aux": self.aux,
        }


# ---------------------------------------------------------------------------
# harmonic free-server distribution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FreeServerDistribution:
    """Exact probability of each server being the one left free."""

    probs: dict
    center: Fraction

    def total_mass(self) -> Fraction:
        return sum(self.probs.values(), Fraction(0))

    def support(self) -> list:
        return sorted(self.probs)


def harmonic_free_server_distribution(k: int, budget: int = 10) -> FreeServerDistribution:
    """Distribution of the free server when harmonic plays the unit-gap
    same-shape tree (servers 2, 4, ..., 2^(k+1)).

    Exact recursion: merging two level-i copies sums over both free-server
    positions with the harmonic match probabilities, an O(4^i) step.  Beyond
    ``budget`` levels the merge is refused; use Monte Carlo estimates instead.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > budget:
        raise ValueError(f"exact recursion budgeted to k <= {budget}; use Monte Carlo beyond")
    probs = {Fraction(2): Fraction(1, 2), Fraction(4): Fraction(1, 2)}
    for level in range(1, k):
        width = 2 ** (level + 1)
        request = Fraction(width + 1)
        left = probs
        right = {pos + width: p for pos, p in probs.items()}
        merged: dict = {}
        for x, px in left.items():
            d_x = request - x
            mass = Fraction(0)
            for y, py in right.items():
                d_y = y - request
                mass += py * d_x / (d_x + d_y)  # request matched right, x stays free
            merged[x] = px * mass
        for y, py in right.items():
            d_y = y - request
            mass = Fraction(0)
            for x, px in left.items():
                d_x = request - x
                mass += px * d_y / (d_x + d_y)  # request matched left, y stays free
            merged[y] = py * mass
        probs = merged
    return FreeServerDistribution(probs, Fraction(2**k + 1))


@dataclass(frozen=True)
class DistributionSymmetry:
    exactly_symmetric: bool
    tv_distance: object  # Fraction for exact distributions, float for empirical


def check_symmetric_distribution(dist: FreeServerDistribution) -> DistributionSymmetry:
    """Exact symmetry verdict, or the total-variation distance to the mirror."""
    mirrored = {2 * dist.center - pos: p for pos, p in dist.probs.items()}
    keys = set(dist.probs) | set(mirrored)
    zero = Fraction(0) if all(isinstance(p, Fraction) for p in dist.probs.values()) else 0.0
    tv = sum((abs(dist.probs.get(s, zero) - mirrored.get(s, zero)) for s in keys), zero) / 2
    return DistributionSymmetry(tv == 0, tv)


def harmonic_outcome_enumeration(instance: Instance):
    """Brute-force oracle: walk every branch of harmonic's decision tree.

    Returns (free-server distribution, exact expected total cost).  Intended
    for small trees; the branch count is 2^(number of two-sided requests).
    """
    positions = sorted(pos for _, pos in instance.servers)
    dist: dict = {}
    expected_cost = Fraction(0)

    def recurse(free: tuple, idx: int, prob: Fraction, cost: Fraction):
        nonlocal expected_cost
        if idx == len(instance.requests):
            expected_cost += prob * cost
            for pos in free:
                dist[pos] = dist.get(pos, Fraction(0)) + prob
            return
        _, rpos = instance.requests[idx]
        cut = bisect.bisect_left(free, rpos)
        left = free[cut - 1] if cut > 0 else None
        right = free[cut] if cut < len(free) else None
        if cut > 0 and free[cut - 1] == rpos:
            left = right = rpos
        if left is None or right is None or left == right:
            pick = left if left is not None else right
            rest = list(free)
            rest.remove(pick)
            recurse(tuple(rest), idx + 1, prob, cost + abs(rpos - pick))
            return
        d_l, d_r = rpos - left, right - rpos
        p_left = d_r / (d_l + d_r)
        for pick, p in ((left, p_left), (right, 1 - p_left)):
            if p == 0:
                continue
            rest = list(free)
            rest.remove(pick)
            recurse(tuple(rest), idx + 1, prob * p, cost + abs(rpos - pick))

    recurse(tuple(positions), 0, Fraction(1), Fraction(0))
    return dist, expected_cost


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MonteCarloResult:
    mean: Fraction          # exact mean of the exact per-trial ratios
    stderr: float
    ratios: tuple[Fraction, ...]

    @property
    def mean_float(self) -> float:
        return float(self.mean)


def trial_seed(master_seed: int, index: int) -> int:
    """Deterministic per-trial stream id, independent of scheduling."""
    return (master_seed << 32) + index


def _harmonic_fast_trial(spos: list, rpos: list, rng: random.Random) -> int:
    """One harmonic run on an all-integer instance, plain-int arithmetic.

    Draws exactly the same rng stream as the generic ChoiceAlgorithm path
    (normalized Bernoulli, no draw on forced moves), so trajectories agree
    bit for bit with run_online for the same seed.
    """
    free = list(spos)
    total = 0
    for r in rpos:
        cut = bisect.bisect_left(free, r)
        if cut > 0 and free[cut - 1] == r:
            del free[cut - 1]
            continue
        left = free[cut - 1] if cut > 0 else None
        right = free[cut] if cut < len(free) else None
        if left is None:
            pick, idx = right, cut
        elif right is None:
            pick, idx = left, cut - 1
        else:
            d_l, d_r = r - left, right - r
            if d_l == 0:
                go_left = True            # p = 1, no draw
            elif d_r == 0:
                go_left = False           # p = 0, no draw
            else:
                g = math.gcd(d_r, d_l + d_r)
                go_left = rng.randrange((d_l + d_r) // g) < d_r // g
            pick, idx = (left, cut - 1) if go_left else (right, cut)
        del free[idx]
        total += abs(r - pick)
    return total


def monte_carlo_ratio(algorithm_factory: Callable[[], object], instance: Instance,
                      trials: int, master_seed: int) -> MonteCarloResult:
    """Mean competitive ratio over independent seeded runs.

    OPT is computed once; per-trial ratios are exact rationals.  The float
    standard error is computed over the sorted ratios so the result is
    bit-identical regardless of trial ordering.  Harmonic on all-integer
    instances takes a plain-int fast path with the identical rng stream.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    opt = optimal_cost(instance.servers, instance.requests)
    if opt <= 0:
        raise ValueError("offline optimum is zero; ratio undefined")
    probe = algorithm_factory()
    integral = all(p.denominator == 1 for _, p in instance.servers) and \
        all(p.denominator == 1 for _, p in instance.requests)
    fast = integral and hasattr(getattr(probe, "choice", None), "p_left_from_distances")
    ratios = []
    if fast:
        spos = sorted(int(p) for _, p in instance.servers)
        rpos = [int(p) for _, p in instance.requests]
        for i in range(trials):
            rng = random.Random(trial_seed(master_seed, i))
            ratios.append(_harmonic_fast_trial(spos, rpos, rng) / opt)
    else:
        for i in range(trials):
            trace = run_online(algorithm_factory(), instance, seed=trial_seed(master_seed, i))
            ratios.append(trace.total_cost / opt)
    mean = sum(ratios, Fraction(0)) / trials
    if trials == 1:
        stderr = 0.0
    else:
        mean_f = float(mean)
        ordered = sorted(float(r) for r in ratios)
        var = sum((r - mean_f) ** 2 for r in ordered) / (trials - 1)
        stderr = math.sqrt(var / trials)
    return MonteCarloResult(mean, stderr, tuple(ratios))


# ---------------------------------------------------------------------------
# property suites (shared by the CLI verify command and the test suite)
# ---------------------------------------------------------------------------

@dataclass
class SuiteReport:
    name: str
    cases: int
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        status = "pass" if self.passed else f"FAIL ({len(self.failures)} counterexamples)"
        return f"{self.name}: {self.cases} cases, {status}"


def _random_fraction(rng: random.Random, lo: Fraction, hi: Fraction, max_den: int = 16) -> Fraction:
    den = rng.randint(1, max_den)
    lo_num = math.ceil(lo * den)
    hi_num = math.floor(hi * den)
    if hi_num < lo_num:
        return lo
    return Fraction(rng.randint(lo_num, hi_num), den)


def random_doubling_ledger(rng: random.Random, k: int) -> list[Fraction]:
    """A ledger satisfying: x_1 > 0, x_i >= 0, x_i <= 2 * max of earlier gaps."""
    xs = [_random_fraction(rng, Fraction(1, 8), Fraction(4))]
    best = xs[0]
    for _ in range(k - 1):
        if rng.random() < 0.15:
            xs.append(Fraction(0))
        else:
            xs.append(_random_fraction(rng, Fraction(0), 2 * best))
        best = max(best, xs[-1])
    return xs

def run_prefix_mass_suite(cases: int = 10_000, k_max: int = 12, seed: int = 2024) -> SuiteReport:
    """Prefix-mass law: under the doubling condition the first m levels carry
    at least m/k of the 2^-i-weighted ledger mass, for every m."""
    rng = random.Random(seed)
    report = SuiteReport("prefix-mass", cases)
    for case in range(cases):
        k = rng.randint(1, k_max)
        xs = random_doubling_ledger(rng, k)
        for m in range(1, k + 1):
            ratio = prefix_mass_ratio(xs, m)
            if ratio < Fraction(m, k):
                report.failures.append({"case": case, "x": [str(x) for x in xs], "m": m, "k": k,
                                        "ratio": str(ratio)})
                break
    return report


def run_sum_lemma_suite(cases: int = 10_000, k_max: int = 10, seed: int = 2025) -> SuiteReport:
    """Geometric domination law: if y_i >= c * y_{i-1} then the weighted mean
    index of y is at least that of the pure geometric sequence c^i."""
    rng = random.Random(seed)
    report = SuiteReport("sum-lemma", cases)
    for case in range(cases):
        k = rng.randint(1, k_max)
        c = 1 + _random_fraction(rng, Fraction(1, 8), Fraction(3))
        ys = [_random_fraction(rng, Fraction(1, 8), Fraction(4))]
        for _ in range(k - 1):
            slack = 1 + _random_fraction(rng, Fraction(0), Fraction(1, 2))
            ys.append(ys[-1] * c * slack)
        if weighted_index_mean(ys) < geometric_index_mean(c, k):
            report.failures.append({"case": case, "c": str(c), "y": [str(y) for y in ys]})
    return report


def run_doubling_bound_suite(cases: int = 2_000, k_max: int = 12, seed: int = 2026) -> SuiteReport:
    """Under the doubling condition the weighted mean index stays <= 3k/4 + 1/2,
    so the adaptive bound is at least k/4 - 1/2."""
    rng = random.Random(seed)
    report = SuiteReport("doubling-bound", cases)
    for case in range(cases):
        k = rng.randint(1, k_max)
        xs = random_doubling_ledger(rng, k)
        if not check_doubling_condition(xs):
            report.failures.append({"case": case, "x": [str(x) for x in xs], "reason": "generator broke condition"})
            continue
        bound = ratio_bound_deterministic(xs)
        if bound < Fraction(k, 4) - Fraction(1, 2):
            report.failures.append({"case": case, "x": [str(x) for x in xs], "bound": str(bound)})
    return report


def run_harmonic_symmetry_suite(k_max: int = 8) -> SuiteReport:
    """Exact symmetry and unit mass of the harmonic free-server distribution."""
    report = SuiteReport("harmonic-symmetry", k_max)
    for k in range(1, k_max + 1):
        dist = harmonic_free_server_distribution(k)
        verdict = check_symmetric_distribution(dist)
        if dist.total_mass() != 1 or not verdict.exactly_symmetric:
            report.failures.append({"k": k, "mass": str(dist.total_mass()),
                                    "tv": str(verdict.tv_distance)})
    return report


def random_line_instance(rng: random.Random, max_servers: int = 8, max_requests: int = 7,
                         balanced: bool = False) -> Instance:
    n = rng.randint(1, max_servers)
    m = n if balanced else rng.randint(1, min(n, max_requests))
    servers = [_random_fraction(rng, Fraction(-20), Fraction(20), max_den=8) for _ in range(n)]
    requests = [_random_fraction(rng, Fraction(-20), Fraction(20), max_den=8) for _ in range(m)]
    return Instance.from_positions(servers, requests)


def run_offline_oracle_suite(cases: int = 1_000, seed: int = 2027) -> SuiteReport:
    """DP versus brute force on unbalanced instances; sorted pairing versus DP
    on balanced ones.  All equalities exact."""
    rng = random.Random(seed)
    report = SuiteReport("offline-oracle", cases)
    for case in range(cases):
        inst = random_line_instance(rng)
        dp = optimal_dp(inst.servers, inst.requests)
        bf = optimal_bruteforce(inst.servers, inst.requests)
        if dp.cost != bf:
            report.failures.append({"case": case, "instance": inst.to_jsonable(),
                                    "dp": str(dp.cost), "bf": str(bf)})
            continue
        bal = random_line_instance(rng, balanced=True)
        if optimal_balanced(bal.servers, bal.requests).cost != optimal_dp(bal.servers, bal.requests).cost:
            report.failures.append({"case": case, "instance": bal.to_jsonable(), "kind": "balanced"})
    return report


VERIFY_SUITES = {
    "prefix-mass": run_prefix_mass_suite,
    "sum-lemma": run_sum_lemma_suite,
    "doubling-bound": run_doubling_bound_suite,
    "harmonic-symmetry": run_harmonic_symmetry_suite,
    "offline-oracle": run_offline_oracle_suite,
}
