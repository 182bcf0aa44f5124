"""Tiny independent reference implementations used only by the tests.

Deliberately separate code paths from the package: a Gauss-Jordan solver
over plain Fraction lists, a Pascal-triangle binomial, and a hitting-time
computation that builds its state space with itertools.  Slow and simple on
purpose; they exist so package results can be checked against something
that shares no code with them.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


def gauss_jordan_solve(matrix, rhs):
    """Solve A x = b by full Gauss-Jordan reduction on Fractions."""
    size = len(matrix)
    aug = [
        [Fraction(entry) for entry in row] + [Fraction(b)]
        for row, b in zip(matrix, rhs)
    ]
    for col in range(size):
        pivot_row = next(r for r in range(col, size) if aug[r][col] != 0)
        aug[col], aug[pivot_row] = aug[pivot_row], aug[col]
        pivot = aug[col][col]
        aug[col] = [entry / pivot for entry in aug[col]]
        for r in range(size):
            if r != col and aug[r][col]:
                factor = aug[r][col]
                aug[r] = [x - factor * y for x, y in zip(aug[r], aug[col])]
    return [aug[r][size] for r in range(size)]


def pascal_binomial(n, m):
    """C(n, m) from the additive triangle recurrence."""
    row = [1]
    for _ in range(n):
        row = [1] + [row[i] + row[i + 1] for i in range(len(row) - 1)] + [1]
    return row[m]


def reference_hitting_time(urns, balls, start, target):
    """Expected moves from start to target, by brute-force dense solve."""
    states = list(itertools.product(range(1, urns + 1), repeat=balls))
    position = {state: i for i, state in enumerate(states)}
    if start == target:
        return Fraction(0)
    transient = [state for state in states if state != target]
    t_pos = {state: i for i, state in enumerate(transient)}
    degree = (urns - 1) * balls
    size = len(transient)
    matrix = [[Fraction(0)] * size for _ in range(size)]
    for state in transient:
        i = t_pos[state]
        matrix[i][i] = Fraction(1)
        for ball in range(balls):
            for urn in range(1, urns + 1):
                if urn != state[ball]:
                    dest = state[:ball] + (urn,) + state[ball + 1 :]
                    if dest != target:
                        matrix[i][t_pos[dest]] -= Fraction(1, degree)
    rhs = [Fraction(1)] * size
    solution = gauss_jordan_solve(matrix, rhs)
    return solution[t_pos[start]]
