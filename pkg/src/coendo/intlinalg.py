"""Exact linear algebra over the integers and rationals.

Matrices are tuples of row tuples (immutable, hashable); vectors are
tuples.  Everything is exact: integer arithmetic where possible,
``fractions.Fraction`` elsewhere.  Smith normal forms are delegated to
sympy's integer-matrix kernel.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import smith_normal_decomp

Matrix = tuple[tuple[int, ...], ...]
Vector = tuple[int, ...]


def mat(rows: Sequence[Sequence[int]]) -> Matrix:
    return tuple(tuple(int(x) for x in row) for row in rows)


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a)) if a else ()


def matmul(a, b):
    bt = list(zip(*b))
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
    )


def matvec(a, v):
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def vecmat(v, a):
    return tuple(sum(v[i] * a[i][j] for i in range(len(v))) for j in range(len(a[0])))


def add(u, v):
    return tuple(x + y for x, y in zip(u, v))


def neg(u):
    return tuple(-x for x in u)


def scale(c, u):
    return tuple(c * x for x in u)


def columns(a: Matrix) -> list[Vector]:
    return [tuple(row[j] for row in a) for j in range(len(a[0]))] if a else []


def from_columns(cols: Sequence[Vector]) -> Matrix:
    return tuple(tuple(col[i] for col in cols) for i in range(len(cols[0])))


def det(a) -> Fraction:
    """Determinant by fraction-free Gaussian elimination."""
    n = len(a)
    m = [[Fraction(x) for x in row] for row in a]
    sign = 1
    for j in range(n):
        pivot = next((i for i in range(j, n) if m[i][j] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != j:
            m[j], m[pivot] = m[pivot], m[j]
            sign = -sign
        for i in range(j + 1, n):
            f = m[i][j] / m[j][j]
            if f:
                m[i] = [x - f * y for x, y in zip(m[i], m[j])]
    out = Fraction(sign)
    for j in range(n):
        out *= m[j][j]
    return out


def rank(rows) -> int:
    """Rank over the rationals."""
    m = [[Fraction(x) for x in row] for row in rows]
    r = 0
    ncols = len(m[0]) if m else 0
    for j in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][j] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        for i in range(len(m)):
            if i != r and m[i][j]:
                f = m[i][j] / m[r][j]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def inverse(a) -> tuple[tuple[Fraction, ...], ...]:
    """Exact inverse of a nonsingular square matrix."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(a)]
    for j in range(n):
        pivot = next((i for i in range(j, n) if m[i][j] != 0), None)
        if pivot is None:
            raise ValueError("matrix is singular")
        m[j], m[pivot] = m[pivot], m[j]
        pv = m[j][j]
        m[j] = [x / pv for x in m[j]]
        for i in range(n):
            if i != j and m[i][j]:
                f = m[i][j]
                m[i] = [x - f * y for x, y in zip(m[i], m[j])]
    return tuple(tuple(row[n:]) for row in m)


def int_inverse(a) -> Matrix:
    """Inverse of a unimodular (det ±1) integer matrix, as an integer matrix."""
    inv = inverse(a)
    if any(x.denominator != 1 for row in inv for x in row):
        raise ValueError("matrix is not unimodular")
    return mat([[int(x) for x in row] for row in inv])


def solve(a, y) -> tuple[Fraction, ...]:
    """Solve a·x = y exactly for square nonsingular a."""
    inv = inverse(a)
    return tuple(sum(row[j] * y[j] for j in range(len(y))) for row in inv)


def solve_int(a, y) -> Vector | None:
    """Integer solution of a·x = y, or None if the exact solution is not integral."""
    x = solve(a, y)
    if any(c.denominator != 1 for c in x):
        return None
    return tuple(int(c) for c in x)


def _to_domain(a) -> DomainMatrix:
    rows = [[ZZ(int(x)) for x in row] for row in a]
    return DomainMatrix(rows, (len(a), len(a[0])), ZZ)


def snf_transform(a) -> tuple[Matrix, Matrix, Matrix]:
    """Smith normal form with transforms: returns (d, u, v) with u·a·v = d."""
    d, u, v = smith_normal_decomp(_to_domain(a))
    return (
        mat([[int(x) for x in row] for row in d.to_list()]),
        mat([[int(x) for x in row] for row in u.to_list()]),
        mat([[int(x) for x in row] for row in v.to_list()]),
    )


def invariant_factors(a) -> list[int]:
    """Nonzero diagonal of the Smith form, made positive, divisibility chain."""
    d, _, _ = snf_transform(a)
    out = [abs(d[i][i]) for i in range(min(len(d), len(d[0]))) if d[i][i] != 0]
    return out
