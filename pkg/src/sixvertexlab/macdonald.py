"""Macdonald measures on partitions: weights, normalization, expectations.

The measure assigns lambda the weight P_lambda(rho1) Q_lambda(rho2) / Pi,
with rho1 a finite list of positive variables x_1..x_n and rho2 an
(alpha; beta)-specialization with gamma = 0.  Weights are computed with
exact rational numerators; only the normalization Pi (an infinite series)
and final expectations are floating point.

Truncation policy: partitions are enumerated up to a degree D which is
doubled until (observable bound) * (tail mass) falls under the requested
tolerance or the symmetric-function degree cap is hit; the achieved bound
is what acceptance tolerances are measured against.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import DomainError
from .exact import as_fraction
from .partitions import part, partitions_up_to
from .symfunc import (
    DEFAULT_DEGREE_CAP,
    Specialization,
    evaluate_symfunc,
    g_series_direct,
    macdonald_P,
    macdonald_Q,
    power_sums_of_specialization,
    power_sums_of_variables,
    to_p_basis,
)


@dataclass(frozen=True)
class MacdonaldSpec:
    """n positive variables x and an (alpha; beta) specialization rho2."""

    n: int
    x: tuple
    rho2: Specialization

    @staticmethod
    def make(n, x, alphas=(), betas=(), q=0, t=0):
        n = int(n)
        if n < 1:
            raise DomainError("n must be >= 1")
        x = tuple(as_fraction(v) for v in x)
        if len(x) != n:
            raise DomainError(f"expected {n} variables, got {len(x)}")
        if any(v <= 0 for v in x):
            raise DomainError("variables x must be positive")
        rho2 = Specialization.make(alphas=alphas, betas=betas, gamma=0, q=q, t=t)
        for xi in x:
            for a in rho2.alphas:
                if xi * a >= 1:
                    raise DomainError(f"need x*alpha < 1, got {xi}*{a}")
        return MacdonaldSpec(n, x, rho2)

    @property
    def q(self):
        return self.rho2.q

    @property
    def t(self):
        return self.rho2.t


def normalization_Pi(mspec, tol=1e-12):
    """Pi(rho1; rho2) = exp(sum_n (1/n) (1-t^n)/(1-q^n) p_n(rho1) p_n(rho2)).

    The series term is geometrically small like (max x * max parameter)^n,
    which gives the truncation bound.  When some x*beta >= 1 the power-sum
    series for the beta part diverges even though Pi itself is finite; that
    part is then resummed exactly as sum log(1 + x*beta).
    """
    q, t = float(mspec.q), float(mspec.t)
    xs = [float(v) for v in mspec.x]
    alphas = [float(a) for a in mspec.rho2.alphas]
    betas = [float(b) for b in mspec.rho2.betas]
    xmax = max(xs)
    if alphas and xmax * max(alphas) >= 1:
        raise DomainError("Pi diverges: some x*alpha >= 1")
    split_beta = bool(betas) and xmax * max(betas) >= 1
    log_pi = 0.0
    if split_beta:
        for xi in xs:
            for b in betas:
                log_pi += math.log1p(xi * b)
    ratio_a = max((xi * a for xi in xs for a in alphas), default=0.0)
    ratio_b = 0.0 if split_beta else max(
        (xi * b for xi in xs for b in betas), default=0.0
    )
    ratio = max(ratio_a, ratio_b)
    if ratio > 0:
        # |term_n| <= K * ratio^n; K collects the counting and (1-q)/(1-t) slack.
        K = len(xs) * (len(alphas) + (0 if split_beta else len(betas)) / (1 - t)) / (
            1 - q
        )
        n = 1
        while K * ratio**n / (1 - ratio) >= tol or n <= 2:
            pa = sum(xi**n for xi in xs) * sum(a**n for a in alphas)
            pb = 0.0
            if not split_beta and betas:
                pb = (
                    (-1.0) ** (n - 1)
                    * sum(xi**n for xi in xs)
                    * sum(b**n for b in betas)
                )
            log_pi += ((1 - t**n) / (1 - q**n) * pa + pb) / n
            n += 1
    return math.exp(log_pi)


@dataclass(frozen=True)
class MeasureTruncation:
    """Weights of all lambda with l(lambda) <= n, |lambda| <= D, plus tail mass."""

    D: int
    weights: dict
    tail_mass: float


# One-row measures need no Gram-Schmidt (P_(r) at a single variable is x^r
# and Q_(r) = g_r), so they may be truncated far beyond the generic cap.
ONE_ROW_DEGREE_CAP = 192


@lru_cache(maxsize=None)
def _weight_numerators(mspec, D, degree_cap):
    """Exact P_lambda(rho1) Q_lambda(rho2) for |lambda| <= D, l(lambda) <= n."""
    if mspec.n == 1:
        x = mspec.x[0]
        g = g_series_direct(mspec.rho2, D)
        rows = [((), Fraction(1))]
        rows += [((r,), x**r * g[r]) for r in range(1, D + 1) if g[r]]
        return tuple(rows)
    pv1 = power_sums_of_variables(mspec.x, max(D, 1))
    pv2 = power_sums_of_specialization(mspec.rho2, max(D, 1))
    q, t = mspec.q, mspec.t
    rows = []
    for lam in partitions_up_to(D, mspec.n):
        P = evaluate_symfunc(to_p_basis(macdonald_P(lam, q, t, degree_cap)), pv1)
        if P == 0:
            continue
        Q = evaluate_symfunc(to_p_basis(macdonald_Q(lam, q, t, degree_cap)), pv2)
        if Q == 0:
            continue
        rows.append((lam, P * Q))
    return tuple(rows)


def mm_weights_truncated(mspec, D, degree_cap=DEFAULT_DEGREE_CAP, tol=1e-12):
    if D > degree_cap:
        raise DomainError(f"D = {D} exceeds the degree cap {degree_cap}")
    pi = normalization_Pi(mspec, tol)
    rows = _weight_numerators(mspec, D, degree_cap)
    weights = {lam: float(numer) / pi for lam, numer in rows}
    tail = 1.0 - float(sum(numer for _, numer in rows)) / pi
    return MeasureTruncation(D, weights, tail)


def _adaptive_rows(mspec, bound, tol, degree_cap):
    """Grow D until bound * tail_mass < tol or the cap is reached."""
    cap = ONE_ROW_DEGREE_CAP if mspec.n == 1 else degree_cap
    D = min(6, cap)
    while True:
        pi = normalization_Pi(mspec, min(tol, 1e-12))
        rows = _weight_numerators(mspec, D, degree_cap)
        tail = 1.0 - float(sum(numer for _, numer in rows)) / pi
        if bound * tail < tol or D >= cap:
            return rows, pi, tail, D
        D = min(2 * D, cap)


def _elementary_symmetric(values, ell):
    e = [Fraction(0)] * (ell + 1)
    e[0] = Fraction(1)
    for y in values:
        for j in range(min(ell, len(values)), 0, -1):
            e[j] += y * e[j - 1]
    return e[ell]


def _spectrum(lam, n, q, t):
    """The n geometric observables q^{lam_i} t^{n-i}, i = 1..n, exact."""
    return [q ** part(lam, i) * t ** (n - i) for i in range(1, n + 1)]


def mm_expect_elementary(mspec, ell, tol=1e-8, degree_cap=DEFAULT_DEGREE_CAP):
    """E e_ell(q^{lam_1} t^{n-1}, ..., q^{lam_n}) by direct truncated summation.

    Every argument of e_ell lies in [0, 1], so the observable is bounded by
    C(n, ell) and the truncation error by C(n, ell) * tail_mass.
    """
    if not 0 <= ell <= mspec.n:
        raise DomainError(f"need 0 <= ell <= n, got ell={ell}, n={mspec.n}")
    if ell == 0:
        return 1.0
    bound = float(math.comb(mspec.n, ell))
    rows, pi, _tail, _D = _adaptive_rows(mspec, bound, tol, degree_cap)
    q, t = mspec.q, mspec.t
    total = Fraction(0)
    for lam, numer in rows:
        total += numer * _elementary_symmetric(_spectrum(lam, mspec.n, q, t), ell)
    return float(total) / pi


def qlaplace_observable(lam, n, q, t, zeta, tol=1e-14):
    """prod_{j>=0} (1 + zeta q^{lam_{n-j}} t^j) / (1 + zeta t^j) for one lambda.

    Indices n-j <= 0 contribute q^{lam} = 0, so factors with j >= n reduce to
    1/(1 + zeta t^j); their product is truncated under a geometric log-tail
    bound.  The value always lies in (0, 1].
    """
    qf, tf, z = float(q), float(t), float(zeta)
    val = 1.0
    for j in range(n):
        val *= (1.0 + z * qf ** part(lam, n - j) * tf**j) / (1.0 + z * tf**j)
    j = n
    while tf > 0 and z * tf**j / (1.0 - tf) >= tol:
        val /= 1.0 + z * tf**j
        j += 1
    return val


def mm_expect_qlaplace(mspec, zeta, tol=1e-8, degree_cap=DEFAULT_DEGREE_CAP):
    """E of the multiplicative q-Laplace observable, truncated summation."""
    if zeta <= 0:
        raise DomainError(f"zeta must be positive, got {zeta}")
    rows, pi, _tail, _D = _adaptive_rows(mspec, 1.0, tol, degree_cap)
    total = 0.0
    for lam, numer in rows:
        total += float(numer) * qlaplace_observable(
            lam, mspec.n, mspec.q, mspec.t, zeta, tol * 1e-4
        )
    return total / pi


def mm_expect_qlaplace_polynomial(mspec, zeta, tol=1e-8, degree_cap=DEFAULT_DEGREE_CAP):
    """E prod_{j=1..n} (1 + zeta q^{lam_j} t^{n-j}): the polynomial observable."""
    zeta = as_fraction(zeta)
    q, t = mspec.q, mspec.t
    bound = 1.0
    for j in range(mspec.n):
        bound *= 1.0 + float(zeta) * float(t) ** j
    rows, pi, _tail, _D = _adaptive_rows(mspec, bound, tol, degree_cap)
    total = Fraction(0)
    for lam, numer in rows:
        obs = Fraction(1)
        for j in range(1, mspec.n + 1):
            obs *= 1 + zeta * q ** part(lam, j) * t ** (mspec.n - j)
        total += numer * obs
    return float(total) / pi
