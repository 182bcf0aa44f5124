"""Core model of the n-urn ball-transfer walk.

The state space is every placement of ``balls`` labelled balls into
``urns`` labelled urns, written as a tuple of 1-based urn indices, one per
ball.  A move picks a ball uniformly at random and re-places it in one of
the other ``urns - 1`` urns uniformly at random, so every state has exactly
``(urns - 1) * balls`` neighbors, each reached with the same probability.

By convention urn 1 is the "source" urn and urn 2 the "target" urn: the
quantities computed elsewhere in the package concern the walk travelling
from all-balls-in-urn-1 to all-balls-in-urn-2.  The walk itself is fully
symmetric under urn relabelling, which is what the automorphisms built
here express.

Everything in this module is a pure function of immutable values and is
safe for unrestricted concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ConfigurationError, DomainError, ValidationError

SOURCE_URN = 1
TARGET_URN = 2

Configuration = tuple[int, ...]


@dataclass(frozen=True)
class ModelParams:
    """Number of urns and balls, validated on construction.

    At least two urns are required (a ball must have somewhere else to
    go), and at least one ball (an empty walk has no hitting times).
    """

    urns: int
    balls: int

    def __post_init__(self) -> None:
        if not isinstance(self.urns, int) or not isinstance(self.balls, int):
            raise ValidationError("urns and balls must be integers")
        if self.urns < 2:
            raise ValidationError(f"need at least 2 urns, got {self.urns}")
        if self.balls < 1:
            raise ValidationError(f"need at least 1 ball, got {self.balls}")

    @property
    def state_count(self) -> int:
        return self.urns**self.balls

    @property
    def degree(self) -> int:
        """Number of neighbors of every state: (urns - 1) * balls."""
        return (self.urns - 1) * self.balls


def check_configuration(config: Configuration, params: ModelParams) -> None:
    """Raise ConfigurationError unless ``config`` is a valid placement."""
    if len(config) != params.balls:
        raise ConfigurationError(
            f"placement has {len(config)} entries, expected {params.balls}"
        )
    for entry in config:
        if not isinstance(entry, int) or not 1 <= entry <= params.urns:
            raise ConfigurationError(
                f"urn index {entry!r} outside 1..{params.urns}"
            )


def all_in_urn(params: ModelParams, urn: int) -> Configuration:
    """The placement with every ball in the given urn."""
    if not 1 <= urn <= params.urns:
        raise ConfigurationError(f"urn index {urn} outside 1..{params.urns}")
    return (urn,) * params.balls


def parse_configuration(text: str, params: ModelParams) -> Configuration:
    """Parse a comma-separated list of 1-based urn indices, e.g. "1,1,2"."""
    parts = [piece.strip() for piece in text.split(",")]
    try:
        config = tuple(int(piece) for piece in parts)
    except ValueError:
        raise ConfigurationError(f"cannot parse placement {text!r}") from None
    check_configuration(config, params)
    return config


def format_configuration(config: Configuration) -> str:
    return ",".join(str(entry) for entry in config)


def index_of(config: Configuration, params: ModelParams) -> int:
    """Base-``urns`` encoding of a placement; ball 1 is the least significant digit."""
    check_configuration(config, params)
    index = 0
    for entry in reversed(config):
        index = index * params.urns + (entry - 1)
    return index


def config_at(index: int, params: ModelParams) -> Configuration:
    """Inverse of :func:`index_of`."""
    if not 0 <= index < params.state_count:
        raise ValidationError(f"state index {index} outside 0..{params.state_count - 1}")
    digits = []
    for _ in range(params.balls):
        index, digit = divmod(index, params.urns)
        digits.append(digit + 1)
    return tuple(digits)


def hamming_distance(a: Configuration, b: Configuration) -> int:
    """Number of balls placed differently by the two placements."""
    if len(a) != len(b):
        raise ConfigurationError(
            f"placements have different lengths ({len(a)} vs {len(b)})"
        )
    return sum(1 for x, y in zip(a, b) if x != y)


def neighbors(config: Configuration, params: ModelParams) -> list[Configuration]:
    """All placements reachable in one move, in (ball, urn) lexicographic order."""
    check_configuration(config, params)
    out = []
    for i, current in enumerate(config):
        prefix, suffix = config[:i], config[i + 1 :]
        for urn in range(1, params.urns + 1):
            if urn != current:
                out.append(prefix + (urn,) + suffix)
    return out


def transition_probability(
    source: Configuration, destination: Configuration, params: ModelParams
) -> Fraction:
    """One-step probability: 1/((urns-1)*balls) if exactly one ball moves, else 0."""
    check_configuration(source, params)
    check_configuration(destination, params)
    if hamming_distance(source, destination) == 1:
        return Fraction(1, params.degree)
    return Fraction(0)


@dataclass(frozen=True)
class Automorphism:
    """A self-inverse relabelling of the state space.

    Coordinate ``i`` applies the transposition that swaps urn 1 with urn
    ``swap_partners[i]`` and fixes every other urn.  Since no partner is
    urn 2, the map fixes the all-in-urn-2 state, sends the all-in-urn-1
    state to ``tuple(swap_partners)``, and preserves the neighbor relation.
    """

    params: ModelParams
    swap_partners: Configuration

    def __call__(self, config: Configuration) -> Configuration:
        check_configuration(config, self.params)
        out = []
        for entry, partner in zip(config, self.swap_partners):
            if entry == SOURCE_URN:
                out.append(partner)
            elif entry == partner:
                out.append(SOURCE_URN)
            else:
                out.append(entry)
        return tuple(out)

    def index_map(self) -> list[int]:
        """The induced permutation of state indices (small state spaces only)."""
        return [
            index_of(self(config_at(g, self.params)), self.params)
            for g in range(self.params.state_count)
        ]


def build_automorphism(
    target_avoiding: Configuration, params: ModelParams
) -> Automorphism:
    """Automorphism fixing all-in-urn-2 and sending all-in-urn-1 to the given state.

    The given placement must avoid urn 2 entirely; otherwise the coordinate
    transpositions would move the all-in-urn-2 state.
    """
    check_configuration(target_avoiding, params)
    if any(entry == TARGET_URN for entry in target_avoiding):
        raise DomainError(
            "automorphism target must avoid urn 2 in every coordinate"
        )
    return Automorphism(params=params, swap_partners=tuple(target_avoiding))


@dataclass(frozen=True)
class TransitionMatrix:
    """Dense row-stochastic matrix of exact rationals.

    Used for the small chains (the occupancy chain and the class-lumped
    chain); the full walk's kernel is only ever handled implicitly through
    adjacency because it would not fit densely.
    """

    rows: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        size = len(self.rows)
        one = Fraction(1)
        for row in self.rows:
            if len(row) != size:
                raise ValidationError("transition matrix must be square")
            total = Fraction(0)
            for entry in row:
                if entry < 0 or entry > 1:
                    raise ValidationError(f"probability {entry} outside [0, 1]")
                total += entry
            if total != one:
                raise ValidationError(f"row sums to {total}, expected exactly 1")

    @classmethod
    def from_rows(cls, rows) -> "TransitionMatrix":
        return cls(tuple(tuple(Fraction(entry) for entry in row) for row in rows))

    @property
    def dimension(self) -> int:
        return len(self.rows)

    def __getitem__(self, i: int) -> tuple[Fraction, ...]:
        return self.rows[i]


@dataclass(frozen=True)
class LumpClass:
    """One block of the 2k-class partition used for first-visit analysis.

    A placement with ``prefix_twos`` of its first ``balls - 1`` balls in
    urn 2 belongs to class ``2 * prefix_twos + 1`` when its last ball is
    elsewhere and to class ``2 * prefix_twos + 2`` when its last ball is
    also in urn 2.  Class labels run 1..2k and the blocks partition the
    whole state space.
    """

    index: int
    prefix_twos: int
    last_is_two: bool

    @property
    def level(self) -> int:
        """1-based pair number: classes 2i-1 and 2i share level i."""
        return self.prefix_twos + 1


def lump_class_of(config: Configuration, params: ModelParams) -> LumpClass:
    """The unique partition class containing the placement."""
    check_configuration(config, params)
    prefix_twos = sum(1 for entry in config[:-1] if entry == TARGET_URN)
    last_is_two = config[-1] == TARGET_URN
    index = 2 * prefix_twos + (2 if last_is_two else 1)
    return LumpClass(index=index, prefix_twos=prefix_twos, last_is_two=last_is_two)


def lumped_kernel(params: ModelParams) -> TransitionMatrix:
    """Transition matrix of the walk observed through the 2k classes.

    The aggregation is exact: every state of a class has the same total
    transition probability into each other class, which the test suite
    checks exhaustively on small state spaces.  Class m maps to row m-1.
    """
    k, n = params.balls, params.urns
    size = 2 * k
    q = [[Fraction(0) for _ in range(size)] for _ in range(size)]

    def at(row_class: int, col_class: int, value: Fraction) -> None:
        if value:
            q[row_class - 1][col_class - 1] += value

    for i in range(1, k + 1):
        odd, even = 2 * i - 1, 2 * i
        # last ball leaves / enters urn 2
        at(even, even - 1, Fraction(1, k))
        at(odd, odd + 1, Fraction(1, k * (n - 1)))
        # one of the i-1 front balls leaves urn 2
        at(even, even - 2, Fraction(i - 1, k))
        at(odd, odd - 2, Fraction(i - 1, k))
        # one of the k-i non-target front balls enters urn 2
        at(even, even + 2, Fraction(k - i, k * (n - 1)))
        at(odd, odd + 2, Fraction(k - i, k * (n - 1)))
        # moves that stay outside urn 2 keep the class
        at(even, even, Fraction((k - i) * (n - 2), k * (n - 1)))
        at(odd, odd, Fraction((k - i + 1) * (n - 2), k * (n - 1)))
    return TransitionMatrix.from_rows(q)
