"""Small exact-arithmetic helpers: Fraction coercion and dense linear algebra.

Everything here works over ``fractions.Fraction``; matrices are lists of
lists.  Sizes stay small (the largest use is inverting the power-sum /
monomial transition at the symmetric-function degree cap), so plain
Gauss-Jordan elimination is plenty.
"""

from fractions import Fraction

from .errors import DomainError


def as_fraction(x):
    """Coerce int / str ("3/4") / Fraction to Fraction.

    Floats are rejected on purpose: binary floats silently misrepresent
    values like 0.1 and would poison the exact-arithmetic paths.
    """
    if isinstance(x, float):
        raise DomainError(
            f"exact parameters must be int, str or Fraction, not float ({x!r}); "
            f"write '1/10' or Fraction(1, 10) instead"
        )
    return Fraction(x)


def identity_matrix(n):
    return [[Fraction(i == j) for j in range(n)] for i in range(n)]


def solve_matrix(a, b):
    """Solve a X = b exactly; ``a`` is n x n, ``b`` is n x m (both Fraction)."""
    n = len(a)
    aug = [list(a[i]) + list(b[i]) for i in range(n)]
    m = len(b[0]) if n else 0
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise DomainError("singular matrix in exact solve")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [vr - f * vc for vr, vc in zip(aug[r], aug[col])]
    return [row[n : n + m] for row in aug]


def invert_matrix(a):
    return solve_matrix(a, identity_matrix(len(a)))


def det_fraction(a):
    """Exact determinant by fraction Gaussian elimination."""
    n = len(a)
    m = [list(row) for row in a]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            if m[r][col] != 0:
                f = m[r][col] * inv
                m[r] = [vr - f * vc for vr, vc in zip(m[r], m[col])]
    return det
