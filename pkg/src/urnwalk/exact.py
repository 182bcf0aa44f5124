"""Closed forms and recursions for expected hitting times, in exact rationals.

Every function here evaluates a formula, never a chain: the linear-solver
oracle and the Monte Carlo simulator live in their own modules precisely so
these values can be checked against independently computed ones.  All
arithmetic uses :class:`fractions.Fraction`, so results are exact and float
conversion happens only at output boundaries.

Main quantities, for ``n`` urns and ``M`` balls:

* full transfer time, the expected number of moves for the walk started
  with every ball in urn 1 to first have every ball in urn 2:
  ``(n-1)*M/n * sum(n**k / k for k in 1..M)``;
* passage increments ``e[0..M-1]``, where ``e[k]`` is the expected time for
  the urn-2 occupancy count (started at 0) to go from first reaching k to
  first reaching k+1; their total over k is the full transfer time, and a
  partial sum over the top L indices gives the expected hitting time
  between any two placements that differ in exactly L balls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, IdenticalConfigurationsError, InternalCheckError
from .model import Configuration, ModelParams, hamming_distance

__all__ = [
    "binomial",
    "full_transfer_time",
    "full_transfer_time_by_ball_induction",
    "passage_increment",
    "passage_increments",
    "HittingQuery",
    "general_hitting_time",
    "SumIdentityReport",
    "sum_identity_report",
    "first_visit_probability",
    "FiberEscape",
    "fiber_escape_ratio",
]


def binomial(n: int, m: int) -> int:
    """Exact binomial coefficient C(n, m) with strict domain checking."""
    if n < 0 or m < 0:
        raise DomainError(f"binomial arguments must be nonnegative, got ({n}, {m})")
    if m > n:
        raise DomainError(f"binomial requires m <= n, got ({n}, {m})")
    return math.comb(n, m)


def full_transfer_time(params: ModelParams) -> Fraction:
    """Expected moves from all-in-urn-1 to all-in-urn-2, by the closed form."""
    n, m = params.urns, params.balls
    total = sum(Fraction(n**k, k) for k in range(1, m + 1))
    return Fraction((n - 1) * m, n) * total


def full_transfer_time_by_ball_induction(params: ModelParams) -> Fraction:
    """Same quantity via the recursion on the ball count.

    With s(1) = n - 1, each extra ball multiplies by k/(k-1) and adds
    (n-1)*n**(k-1).  Must agree with :func:`full_transfer_time` exactly.
    """
    n = params.urns
    s = Fraction(n - 1)
    for k in range(2, params.balls + 1):
        s = Fraction(k, k - 1) * s + (n - 1) * n ** (k - 1)
    return s


def passage_increment(params: ModelParams, k: int) -> Fraction:
    """Closed form for the k-th occupancy passage increment, 0 <= k < balls."""
    n, m = params.urns, params.balls
    if not 0 <= k <= m - 1:
        raise DomainError(f"increment index {k} outside 0..{m - 1}")
    inner = sum(Fraction(binomial(m, j), (n - 1) ** j) for j in range(k + 1))
    return Fraction((n - 1) ** (k + 1), binomial(m - 1, k)) * inner


def passage_increments(params: ModelParams) -> list[Fraction]:
    """All passage increments by forward recursion.

    e[0] = n - 1 and e[k] = (n-1)*k/(M-k) * e[k-1] + (n-1)*M/(M-k); agrees
    termwise with :func:`passage_increment`.
    """
    n, m = params.urns, params.balls
    out = [Fraction(n - 1)]
    for k in range(1, m):
        out.append(
            Fraction((n - 1) * k, m - k) * out[k - 1] + Fraction((n - 1) * m, m - k)
        )
    return out


@dataclass(frozen=True)
class HittingQuery:
    """Parameters plus the number of balls placed differently at start and target.

    The expected hitting time between two placements depends on them only
    through that count, so the query stores nothing else.
    """

    params: ModelParams
    hamming_distance: int

    def __post_init__(self) -> None:
        if self.hamming_distance == 0:
            raise IdenticalConfigurationsError(
                "start and target placements are identical; the transfer "
                "distance must be at least 1"
            )
        if not 1 <= self.hamming_distance <= self.params.balls:
            raise DomainError(
                f"distance {self.hamming_distance} outside 1..{self.params.balls}"
            )

    @classmethod
    def from_configurations(
        cls, params: ModelParams, start: Configuration, target: Configuration
    ) -> "HittingQuery":
        from .model import check_configuration

        check_configuration(start, params)
        check_configuration(target, params)
        return cls(params=params, hamming_distance=hamming_distance(start, target))


def general_hitting_time(query: HittingQuery) -> Fraction:
    """Expected hitting time between placements differing in L balls.

    Equals the sum of the top L passage increments; with L equal to the
    ball count it collapses to :func:`full_transfer_time`.
    """
    m, distance = query.params.balls, query.hamming_distance
    return sum(
        (passage_increment(query.params, k) for k in range(m - distance, m)),
        Fraction(0),
    )


@dataclass(frozen=True)
class SumIdentityReport:
    """Both sides of the increment-sum identity, with their per-index terms.

    ``left_terms[k]`` is the k-th passage increment and ``right_terms[k]``
    is ``(n-1)*M/n * n**(k+1)/(k+1)``.  The totals agree exactly for every
    parameter choice even though the individual terms generally differ.
    """

    left_total: Fraction
    right_total: Fraction
    left_terms: tuple[Fraction, ...]
    right_terms: tuple[Fraction, ...]

    @property
    def matches(self) -> bool:
        return self.left_total == self.right_total

    @property
    def termwise_matches(self) -> bool:
        return self.left_terms == self.right_terms


def sum_identity_report(params: ModelParams) -> SumIdentityReport:
    n, m = params.urns, params.balls
    left_terms = tuple(passage_increment(params, k) for k in range(m))
    scale = Fraction((n - 1) * m, n)
    right_terms = tuple(scale * Fraction(n ** (k + 1), k + 1) for k in range(m))
    return SumIdentityReport(
        left_total=sum(left_terms, Fraction(0)),
        right_total=sum(right_terms, Fraction(0)),
        left_terms=left_terms,
        right_terms=right_terms,
    )


def first_visit_probability(params: ModelParams) -> Fraction:
    """Probability that the walk from all-in-urn-1 completes the transfer on
    its first visit to the fiber of states whose front balls all sit in urn 2.

    Closed form (n**(k-1) - 1) / (n**k - 1) with k the ball count; zero for
    a single ball, where the fiber is the whole space.
    """
    n, k = params.urns, params.balls
    return Fraction(n ** (k - 1) - 1, n**k - 1)


@dataclass(frozen=True)
class FiberEscape:
    """Escape probabilities at the target fiber and their fixed ratio.

    ``first_miss`` is the probability the first fiber visit misses the
    target point; ``repeat_miss`` the probability the next visit misses
    again given the first did.  Their ratio first_miss / (1 - repeat_miss)
    always equals urns - 1.
    """

    first_miss: Fraction
    repeat_miss: Fraction
    ratio: Fraction


def fiber_escape_ratio(params: ModelParams) -> FiberEscape:
    """Compute the two escape probabilities and verify their fixed ratio.

    ``first_miss`` comes from the closed form above; ``repeat_miss`` from
    the lumped-chain linear solve, an independent route.
    """
    from . import oracle

    n, k = params.urns, params.balls
    if k < 2:
        raise DomainError("fiber escape analysis needs at least 2 balls")
    first_miss = 1 - first_visit_probability(params)
    probs = oracle.lumped_first_visit_probs(params)
    # class 2k-1 holds the fiber states other than the target point
    repeat_miss = 1 - probs[2 * k - 2]
    ratio = first_miss / (1 - repeat_miss)
    if ratio != n - 1:
        raise InternalCheckError(
            f"fiber escape ratio {ratio} differs from {n - 1} for {params}"
        )
    return FiberEscape(first_miss=first_miss, repeat_miss=repeat_miss, ratio=ratio)
