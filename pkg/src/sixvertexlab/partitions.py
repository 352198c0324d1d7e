"""Integer partitions: enumeration, conjugation, dominance order.

Partitions are plain tuples of weakly decreasing positive integers; the
empty partition is ``()``.  Enumeration order is fixed once and for all:
sizes ascending, reverse-lexicographic within a size, e.g. for size 3 the
order is (3), (2, 1), (1, 1, 1).  Reverse-lex refines dominance, so this
order is also the default linear extension used by the Gram-Schmidt
construction of Macdonald polynomials.
"""

from fractions import Fraction
from functools import lru_cache
from math import factorial

from .errors import DomainError

Partition = tuple


def check_partition(parts):
    """Validate and normalize a partition given as any integer iterable."""
    lam = tuple(int(p) for p in parts if p != 0)
    if any(p < 0 for p in lam):
        raise DomainError(f"partition parts must be nonnegative: {parts}")
    if any(lam[i] < lam[i + 1] for i in range(len(lam) - 1)):
        raise DomainError(f"partition parts must be weakly decreasing: {parts}")
    return lam


def conjugate(lam):
    """Transpose of the Young diagram of ``lam``."""
    if not lam:
        return ()
    return tuple(sum(1 for p in lam if p >= j) for j in range(1, lam[0] + 1))


def part(lam, i):
    """i-th part (1-based), zero beyond the length."""
    return lam[i - 1] if 1 <= i <= len(lam) else 0


@lru_cache(maxsize=None)
def partitions_of(size, max_length=None):
    """All partitions of ``size`` with at most ``max_length`` parts, reverse-lex."""
    if size < 0:
        raise DomainError("size must be nonnegative")
    bound = size if max_length is None else min(max_length, size)

    def gen(remaining, max_part, slots):
        if remaining == 0:
            yield ()
            return
        if slots == 0:
            return
        for first in range(min(remaining, max_part), 0, -1):
            for rest in gen(remaining - first, first, slots - 1):
                yield (first,) + rest

    return tuple(gen(size, size, bound))


def partitions_up_to(degree, max_length=None):
    """All partitions of each size <= degree, sizes ascending, reverse-lex within."""
    if degree < 0:
        raise DomainError("degree must be nonnegative")
    out = []
    for d in range(degree + 1):
        out.extend(partitions_of(d, max_length))
    return out


def dominance_leq(mu, lam):
    """True iff mu <= lam in dominance order (requires |mu| = |lam|)."""
    if sum(mu) != sum(lam):
        raise DomainError("dominance order compares partitions of equal size")
    s_mu = 0
    s_lam = 0
    for i in range(max(len(mu), len(lam))):
        s_mu += part(mu, i + 1)
        s_lam += part(lam, i + 1)
        if s_mu > s_lam:
            return False
    return True


def z_lambda(lam):
    """Order of the centralizer of a permutation of cycle type lam."""
    z = 1
    mult = {}
    for p in lam:
        mult[p] = mult.get(p, 0) + 1
    for p, m in mult.items():
        z *= p**m * factorial(m)
    return z


def z_lambda_qt(lam, q, t):
    """z_lam(q,t) = z_lam * prod_i (1 - q^{lam_i}) / (1 - t^{lam_i})."""
    q = Fraction(q)
    t = Fraction(t)
    val = Fraction(z_lambda(lam))
    for p in lam:
        val *= (1 - q**p) / (1 - t**p)
    return val
