"""The urn-2 occupancy count as a birth-death chain.

Watching only how many balls sit in urn 2 turns the full walk into a chain
on {0, ..., M} that moves by at most one ball per step:

* down: k/M (one of the k urn-2 balls is picked, it must leave),
* stay: (n-2)(M-k) / ((n-1)M) (another ball is picked, lands elsewhere),
* up:   (M-k) / ((n-1)M) (another ball is picked, lands in urn 2).

:func:`aggregation_matches_full_walk` certifies, state by state, that the
full walk really does aggregate to these rates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExceededError
from .model import TARGET_URN, ModelParams, TransitionMatrix, neighbors

DEFAULT_AGGREGATION_BUDGET = 100_000


@dataclass(frozen=True)
class OccupancyChain:
    params: ModelParams
    kernel: TransitionMatrix


def build_occupancy_chain(params: ModelParams) -> OccupancyChain:
    """Tridiagonal kernel of the occupancy count, exact rationals."""
    n, m = params.urns, params.balls
    degree = params.degree
    rows = []
    for k in range(m + 1):
        row = [Fraction(0)] * (m + 1)
        if k >= 1:
            row[k - 1] = Fraction(k, m)
        row[k] = Fraction((n - 2) * (m - k), degree)
        if k <= m - 1:
            row[k + 1] = Fraction(m - k, degree)
        rows.append(row)
    return OccupancyChain(params=params, kernel=TransitionMatrix.from_rows(rows))


def passage_increments_by_solve(chain: OccupancyChain) -> list[Fraction]:
    """Passage increments from the kernel by one-step conditioning.

    Starting from occupancy k, the time to first reach k+1 satisfies
    e[k] = 1 + down * (e[k-1] + e[k]) + stay * e[k], which solves forward
    as e[k] = (1 + down * e[k-1]) / up.  Independent of the closed forms
    in :mod:`urnwalk.exact`, which it must reproduce exactly.
    """
    m = chain.params.balls
    kernel = chain.kernel
    out: list[Fraction] = []
    for k in range(m):
        up = kernel[k][k + 1]
        down = kernel[k][k - 1] if k >= 1 else Fraction(0)
        previous = out[k - 1] if k >= 1 else Fraction(0)
        out.append((1 + down * previous) / up)
    return out


def stationary_distribution(chain: OccupancyChain) -> list[Fraction]:
    """The reversing measure: weight C(M,k) * (n-1)**(M-k), normalized.

    Detailed balance pi[k] * up[k] == pi[k+1] * down[k+1] holds exactly;
    the tests assert it.  This is a structural property of the rates, used
    as a sanity check rather than quoted from anywhere.
    """
    import math

    n, m = chain.params.urns, chain.params.balls
    weights = [math.comb(m, k) * (n - 1) ** (m - k) for k in range(m + 1)]
    total = sum(weights)
    return [Fraction(w, total) for w in weights]


def aggregation_matches_full_walk(
    params: ModelParams, max_states: int = DEFAULT_AGGREGATION_BUDGET
) -> bool:
    """Exhaustively certify the occupancy rates against the full walk.

    For every placement, group its one-move destinations by their urn-2
    occupancy and compare the summed transition probabilities with the
    kernel row of the placement's own occupancy.  True means every state
    matched.  Raises when the state space exceeds ``max_states``.
    """
    import itertools

    n, m = params.urns, params.balls
    if params.state_count > max_states:
        raise BudgetExceededError(
            params.state_count, max_states, what="exhaustive aggregation check"
        )
    kernel = build_occupancy_chain(params).kernel
    degree = params.degree
    for config in itertools.product(range(1, n + 1), repeat=m):
        occupancy = config.count(TARGET_URN)
        moves_to: dict[int, int] = {}
        for destination in neighbors(config, params):
            j = destination.count(TARGET_URN)
            moves_to[j] = moves_to.get(j, 0) + 1
        row = kernel[occupancy]
        for j in range(m + 1):
            if Fraction(moves_to.get(j, 0), degree) != row[j]:
                return False
    return True
