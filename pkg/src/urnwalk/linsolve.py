"""Exact solvers for the sparse rational linear systems built by the oracle.

:func:`solve_exact` always returns the exact rational solution of
``A x = b``.  Three strategies share one soundness argument, so speed never
costs correctness:

1. dense rational Gaussian elimination with partial pivoting, used
   directly for small systems;
2. a float path: sparse LU gives an approximate solution, each entry is
   snapped to the nearest small-denominator rational, and the candidate is
   accepted only if it satisfies every equation exactly;
3. a modular path: eliminate over several word-sized prime fields, combine
   by the Chinese remainder theorem, lift each residue back to a rational,
   and again accept only after an exact residual check.

When a candidate from path 2 or 3 verifies, it is the unique solution
whenever the system is nonsingular, which path 3 certifies as a byproduct
(a matrix invertible modulo a prime is invertible over the rationals) and
the oracle guarantees structurally via reachability.  All paths are
deterministic: pivots are the first nonzero choice, the prime sequence is
fixed, and snap bounds are tried in a fixed order.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .errors import InternalCheckError, SingularSystemError

SparseRows = Sequence[Mapping[int, Fraction]]

DENSE_FRACTION_LIMIT = 64
SNAP_DENOMINATOR_BOUNDS = (1_000, 1_000_000)
_PRIME_FLOOR = 2**29  # keeps products of two residues inside int64


def solve_exact(rows: SparseRows, rhs: Sequence[Fraction]) -> list[Fraction]:
    """Exact solution of the square sparse system ``rows @ x == rhs``."""
    size = len(rows)
    if size != len(rhs):
        raise ValueError("matrix and right-hand side sizes differ")
    if size == 0:
        return []
    if size <= DENSE_FRACTION_LIMIT:
        return _dense_fraction_solve(rows, rhs)
    int_rows, int_rhs = _integer_rows(rows, rhs)
    candidate = _try_float_snap(int_rows, int_rhs)
    if candidate is not None:
        return candidate
    return _solve_modular(int_rows, int_rhs)


def solve_float(
    rows: SparseRows, rhs: Sequence[Fraction | float]
) -> tuple[np.ndarray, float]:
    """Approximate solve by sparse LU; returns (solution, relative residual)."""
    import scipy.sparse as sparse
    import scipy.sparse.linalg as sparse_linalg

    size = len(rows)
    matrix = _as_csc(rows, size)
    b = np.array([float(v) for v in rhs])
    lu = sparse_linalg.splu(matrix)
    x = lu.solve(b)
    residual = np.abs(matrix @ x - b).max()
    scale = max(1.0, float(np.abs(b).max()))
    return x, float(residual / scale)


def _as_csc(rows: SparseRows, size: int):
    import scipy.sparse as sparse

    ri, ci, data = [], [], []
    for i, row in enumerate(rows):
        for j, coeff in row.items():
            ri.append(i)
            ci.append(j)
            data.append(float(coeff))
    return sparse.csc_matrix((data, (ri, ci)), shape=(size, size))


def _dense_fraction_solve(rows: SparseRows, rhs: Sequence[Fraction]) -> list[Fraction]:
    size = len(rows)
    a = [[Fraction(0)] * size for _ in range(size)]
    for i, row in enumerate(rows):
        for j, coeff in row.items():
            a[i][j] = Fraction(coeff)
    b = [Fraction(v) for v in rhs]
    for col in range(size):
        pivot_row = next((r for r in range(col, size) if a[r][col] != 0), None)
        if pivot_row is None:
            raise SingularSystemError(f"no pivot in column {col}")
        if pivot_row != col:
            a[col], a[pivot_row] = a[pivot_row], a[col]
            b[col], b[pivot_row] = b[pivot_row], b[col]
        pivot = a[col][col]
        if pivot != 1:
            a[col] = [entry / pivot for entry in a[col]]
            b[col] /= pivot
        for r in range(col + 1, size):
            factor = a[r][col]
            if factor:
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
                b[r] -= factor * b[col]
    x = [Fraction(0)] * size
    for i in range(size - 1, -1, -1):
        acc = b[i]
        row = a[i]
        for j in range(i + 1, size):
            if row[j]:
                acc -= row[j] * x[j]
        x[i] = acc
    return x


def _integer_rows(
    rows: SparseRows, rhs: Sequence[Fraction]
) -> tuple[list[dict[int, int]], list[int]]:
    """Clear denominators row by row so every coefficient is an integer."""
    int_rows: list[dict[int, int]] = []
    int_rhs: list[int] = []
    for row, b in zip(rows, rhs):
        b = Fraction(b)
        scale = b.denominator
        for coeff in row.values():
            scale = scale * coeff.denominator // math.gcd(scale, coeff.denominator)
        int_rows.append({j: int(coeff * scale) for j, coeff in row.items()})
        int_rhs.append(int(b * scale))
    return int_rows, int_rhs


def _residual_is_zero(
    int_rows: Sequence[Mapping[int, int]], int_rhs: Sequence[int], x: Sequence[Fraction]
) -> bool:
    for row, b in zip(int_rows, int_rhs):
        total = Fraction(0)
        for j, coeff in row.items():
            total += coeff * x[j]
        if total != b:
            return False
    return True


def _try_float_snap(
    int_rows: list[dict[int, int]], int_rhs: list[int]
) -> list[Fraction] | None:
    rows_as_fractions = [
        {j: Fraction(c) for j, c in row.items()} for row in int_rows
    ]
    try:
        approx, _ = solve_float(rows_as_fractions, [Fraction(v) for v in int_rhs])
    except Exception:
        return None
    if not np.all(np.isfinite(approx)):
        return None
    values = [float(v) for v in approx]
    for bound in SNAP_DENOMINATOR_BOUNDS:
        candidate = [Fraction(v).limit_denominator(bound) for v in values]
        if _residual_is_zero(int_rows, int_rhs, candidate):
            return candidate
    return None


# ---------------------------------------------------------------------------
# modular path
# ---------------------------------------------------------------------------


def _is_prime(candidate: int) -> bool:
    if candidate % 2 == 0:
        return candidate == 2
    d, s = candidate - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for base in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if base % candidate == 0:
            continue
        x = pow(base, d, candidate)
        if x in (1, candidate - 1):
            continue
        for _ in range(s - 1):
            x = x * x % candidate
            if x == candidate - 1:
                break
        else:
            return False
    return True


def _prime_sequence(count: int = 24) -> list[int]:
    primes = []
    candidate = 2**30 - 1
    while len(primes) < count:
        if candidate < _PRIME_FLOOR:
            raise InternalCheckError("prime pool exhausted")
        if _is_prime(candidate):
            primes.append(candidate)
        candidate -= 2
    return primes


_PRIMES = _prime_sequence()


def _solve_mod_prime(
    int_rows: list[dict[int, int]], int_rhs: list[int], p: int
) -> np.ndarray | None:
    """Gaussian elimination over GF(p); None when singular modulo p."""
    size = len(int_rows)
    aug = np.zeros((size, size + 1), dtype=np.int64)
    for i, row in enumerate(int_rows):
        for j, coeff in row.items():
            aug[i, j] = coeff % p
        aug[i, size] = int_rhs[i] % p
    for col in range(size):
        column = aug[col:, col]
        nonzero = np.flatnonzero(column)
        if nonzero.size == 0:
            return None
        pivot_row = col + int(nonzero[0])
        if pivot_row != col:
            aug[[col, pivot_row]] = aug[[pivot_row, col]]
        inverse = pow(int(aug[col, col]), p - 2, p)
        aug[col, col:] = (aug[col, col:] * inverse) % p
        block = aug[col + 1 :, col:]
        factors = block[:, 0]
        mask = factors != 0
        if mask.any():
            block[mask] = (block[mask] - factors[mask, None] * aug[col, col:]) % p
    x = np.zeros(size, dtype=np.int64)
    for i in range(size - 1, -1, -1):
        if i < size - 1:
            acc = int(((aug[i, i + 1 : size] * x[i + 1 :]) % p).sum()) % p
        else:
            acc = 0
        x[i] = (int(aug[i, size]) - acc) % p
    return x


def _rational_reconstruct(residue: int, modulus: int) -> Fraction | None:
    """Lift a residue to the unique small rational congruent to it, if any."""
    residue %= modulus
    if residue == 0:
        return Fraction(0)
    bound = math.isqrt(modulus // 2)
    r_prev, r_curr = modulus, residue
    s_prev, s_curr = 0, 1
    while r_curr > bound:
        q = r_prev // r_curr
        r_prev, r_curr = r_curr, r_prev - q * r_curr
        s_prev, s_curr = s_curr, s_prev - q * s_curr
    if s_curr == 0 or abs(s_curr) > bound:
        return None
    if math.gcd(r_curr, abs(s_curr)) != 1:
        return None
    if s_curr < 0:
        return Fraction(-r_curr, -s_curr)
    return Fraction(r_curr, s_curr)


def _solve_modular(
    int_rows: list[dict[int, int]], int_rhs: list[int]
) -> list[Fraction]:
    residues: list[int] | None = None
    modulus = 0
    singular_primes = 0
    for p in _PRIMES:
        solution = _solve_mod_prime(int_rows, int_rhs, p)
        if solution is None:
            # could be an unlucky prime dividing the determinant; three in a
            # row from independent word-sized primes means genuinely singular
            singular_primes += 1
            if singular_primes >= 3:
                raise SingularSystemError(
                    "system is singular modulo three independent primes"
                )
            continue
        if residues is None:
            residues = [int(v) for v in solution]
            modulus = p
        else:
            m_inverse = pow(modulus, -1, p)
            residues = [
                r + modulus * ((int(v) - r) * m_inverse % p)
                for r, v in zip(residues, solution)
            ]
            modulus *= p
        candidate = [_rational_reconstruct(r, modulus) for r in residues]
        if all(entry is not None for entry in candidate) and _residual_is_zero(
            int_rows, int_rhs, candidate
        ):
            return candidate  # type: ignore[return-value]
    raise InternalCheckError(
        "modular solve exhausted its prime pool without a verified solution"
    )
