"""Exact symmetric-function engine at fixed rational (q, t).

Everything is homogeneous of a fixed degree and expanded over either the
power-sum basis p_lambda or the monomial basis m_lambda with Fraction
coefficients.  The (q,t) deformation enters only through the dot product

    <p_lam, p_mu> = delta_{lam,mu} z_lam prod_i (1-q^{lam_i})/(1-t^{lam_i}),

and the Macdonald functions P_lambda are produced by Gram-Schmidt over the
monomial basis along a linear extension of dominance order (implemented as
an exact LDL' factorization of the Gram matrix, whose inverse-transpose
rows are the P coefficients and whose diagonal holds <P,P>).

(q, t) are concrete rationals, not symbols: identities are verified at many
rational points instead of in the rational-function field, which keeps the
engine dependency-free and exact.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import DomainError, ResourceCapError
from .exact import as_fraction, invert_matrix
from .partitions import (
    Partition,
    check_partition,
    conjugate,
    dominance_leq,
    partitions_of,
    partitions_up_to,
    z_lambda_qt,
)

DEFAULT_DEGREE_CAP = 12


@dataclass(frozen=True)
class SymPolyExpansion:
    """Homogeneous symmetric function: coefficients over one basis.

    basis is "p" (power sums) or "m" (monomials); coeffs maps partitions of
    ``degree`` to Fractions.
    """

    degree: int
    basis: str
    coeffs: dict

    def coefficient(self, lam):
        return self.coeffs.get(tuple(lam), Fraction(0))


@dataclass(frozen=True)
class Specialization:
    """(alpha; beta; gamma) specialization data together with its (q, t).

    Defined through the generating series
    sum_n g_n(rho) u^n = e^{gamma u} prod_i (t a_i u; q)_inf / (a_i u; q)_inf
    * prod_i (1 + b_i u).
    """

    alphas: tuple
    betas: tuple
    gamma: Fraction
    q: Fraction
    t: Fraction

    @staticmethod
    def make(alphas=(), betas=(), gamma=0, q=0, t=0):
        alphas = tuple(as_fraction(a) for a in alphas)
        betas = tuple(as_fraction(b) for b in betas)
        gamma = as_fraction(gamma)
        q = as_fraction(q)
        t = as_fraction(t)
        if any(a <= 0 for a in alphas) or any(b <= 0 for b in betas):
            raise DomainError("alpha and beta parameters must be strictly positive")
        if gamma < 0:
            raise DomainError("gamma must be nonnegative")
        if not (0 <= q < 1 and 0 <= t < 1):
            raise DomainError(f"q and t must lie in [0,1), got q={q}, t={t}")
        return Specialization(alphas, betas, gamma, q, t)


@dataclass(frozen=True)
class PowerSumValues:
    """p_1(rho) .. p_D(rho); values[n-1] = p_n(rho)."""

    values: tuple

    def p(self, n):
        return self.values[n - 1]


# ---------------------------------------------------------------------------
# basis transitions
# ---------------------------------------------------------------------------


def _multiply_by_power_sum(expansion, r):
    """Multiply an m-basis expansion by p_r.

    p_r * m_mu = sum over ways of adding r to a part of mu (or appending a
    new part r); the coefficient of the resulting m_nu is the multiplicity
    of the grown part v+r in nu.
    """
    out = {}
    for mu, c in expansion.items():
        values = set(mu) | {0}
        for v in values:
            grown = v + r
            nu = list(mu)
            if v:
                nu.remove(v)
            nu.append(grown)
            nu = tuple(sorted(nu, reverse=True))
            mult = nu.count(grown)
            out[nu] = out.get(nu, 0) + c * mult
    return {nu: c for nu, c in out.items() if c}


@lru_cache(maxsize=None)
def _p_in_m(lam):
    """Monomial expansion of p_lam as a dict with integer coefficients."""
    exp = {(): 1}
    for r in lam:
        exp = _multiply_by_power_sum(exp, r)
    return exp


@lru_cache(maxsize=None)
def _transition_matrices(degree):
    """(partitions, P2M, M2P) at one degree; columns index the source basis.

    P2M[i][j] = coefficient of m_{partitions[i]} in p_{partitions[j]} and
    M2P is its exact inverse.
    """
    parts = partitions_of(degree)
    index = {lam: i for i, lam in enumerate(parts)}
    n = len(parts)
    p2m = [[Fraction(0)] * n for _ in range(n)]
    for j, lam in enumerate(parts):
        for mu, c in _p_in_m(lam).items():
            p2m[index[mu]][j] = Fraction(c)
    m2p = invert_matrix(p2m) if n else []
    return parts, p2m, m2p


@dataclass(frozen=True)
class BasisTransition:
    """Mutually inverse p<->m conversion matrices over ``partitions``."""

    degree: int
    partitions: tuple
    p_to_m: list
    m_to_p: list


def basis_transition(degree, degree_cap=DEFAULT_DEGREE_CAP):
    if degree > degree_cap:
        raise ResourceCapError(f"degree {degree} above the cap {degree_cap}")
    parts, p2m, m2p = _transition_matrices(degree)
    return BasisTransition(degree, parts, p2m, m2p)


def to_p_basis(f):
    """Convert an expansion to the power-sum basis."""
    if f.basis == "p":
        return f
    parts, _, m2p = _transition_matrices(f.degree)
    index = {lam: i for i, lam in enumerate(parts)}
    out = {}
    for mu, c in f.coeffs.items():
        col = index[mu]
        for i, rho in enumerate(parts):
            v = m2p[i][col]
            if v:
                out[rho] = out.get(rho, Fraction(0)) + c * v
    return SymPolyExpansion(f.degree, "p", {k: v for k, v in out.items() if v})


def to_m_basis(f):
    """Convert an expansion to the monomial basis."""
    if f.basis == "m":
        return f
    out = {}
    for lam, c in f.coeffs.items():
        for mu, w in _p_in_m(lam).items():
            out[mu] = out.get(mu, Fraction(0)) + c * w
    return SymPolyExpansion(f.degree, "m", {k: v for k, v in out.items() if v})


# ---------------------------------------------------------------------------
# the (q, t) dot product and Macdonald functions
# ---------------------------------------------------------------------------


def inner_product_qt(f, g, q, t):
    """<f, g>_{q,t} for two p-basis expansions of equal degree."""
    q = as_fraction(q)
    t = as_fraction(t)
    if q == 1 or t == 1:
        raise DomainError("the (q,t) dot product needs q, t != 1")
    if f.basis != "p" or g.basis != "p":
        raise DomainError("inner_product_qt expects p-basis expansions")
    if f.degree != g.degree:
        raise DomainError("inner product needs equal degrees")
    total = Fraction(0)
    for lam, c in f.coeffs.items():
        d = g.coeffs.get(lam)
        if d:
            total += c * d * z_lambda_qt(lam, q, t)
    return total


@lru_cache(maxsize=None)
def _macdonald_data(degree, q, t):
    """All P_lambda of one degree: m-coefficients and norms <P,P>.

    Returns (order, coeff_rows, norms) where ``order`` lists partitions in
    the Gram-Schmidt (ascending reverse-lex) order, coeff_rows[i] is the
    dict of m-coefficients of P_{order[i]}, and norms[i] = <P, P>.
    """
    parts, _, m2p = _transition_matrices(degree)
    asc = tuple(reversed(parts))
    n = len(asc)
    pos_in_parts = {lam: i for i, lam in enumerate(parts)}
    z = [z_lambda_qt(lam, q, t) for lam in parts]
    # Gram matrix of the monomial basis in ascending order: G = C' Z C with
    # C[rho][j] = coefficient of p_rho in m_{asc[j]}.
    cols = []
    for lam in asc:
        j = pos_in_parts[lam]
        cols.append([m2p[i][j] for i in range(n)])
    gram = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1):
            s = Fraction(0)
            ci, cj = cols[i], cols[j]
            for r in range(n):
                if ci[r] and cj[r]:
                    s += ci[r] * cj[r] * z[r]
            gram[i][j] = gram[j][i] = s
    # Exact LDL': G = L D L'; the rows of L^{-1} are the Gram-Schmidt
    # coefficients, D its squared norms.
    L = [[Fraction(0)] * n for _ in range(n)]
    D = [Fraction(0)] * n
    for i in range(n):
        for j in range(i):
            s = gram[i][j]
            for k in range(j):
                s -= L[i][k] * L[j][k] * D[k]
            L[i][j] = s / D[j]
        s = gram[i][i]
        for k in range(i):
            s -= L[i][k] * L[i][k] * D[k]
        D[i] = s
        L[i][i] = Fraction(1)
        if s <= 0:
            raise DomainError("Gram matrix not positive definite; bad (q,t)?")
    # Invert the unit lower-triangular L by back substitution within each row.
    V = []
    for i in range(n):
        row = [Fraction(0)] * n
        row[i] = Fraction(1)
        for j in range(i - 1, -1, -1):
            s = Fraction(0)
            for k in range(j + 1, i + 1):
                if row[k]:
                    s += row[k] * L[k][j]
            row[j] = -s
        V.append(row)
    coeff_rows = []
    for i in range(n):
        coeff_rows.append({asc[j]: V[i][j] for j in range(i + 1) if V[i][j]})
    return asc, tuple(coeff_rows), tuple(D)


def macdonald_P(lam, q, t, degree_cap=DEFAULT_DEGREE_CAP):
    """Macdonald P_lambda as an m-basis expansion (monic in m_lambda)."""
    lam = check_partition(lam)
    q = as_fraction(q)
    t = as_fraction(t)
    d = sum(lam)
    if d > degree_cap:
        raise ResourceCapError(f"|lambda| = {d} above the degree cap {degree_cap}")
    order, rows, _ = _macdonald_data(d, q, t)
    i = order.index(lam)
    return SymPolyExpansion(d, "m", dict(rows[i]))


def macdonald_norm(lam, q, t, degree_cap=DEFAULT_DEGREE_CAP):
    """<P_lambda, P_lambda>_{q,t}, exact."""
    lam = check_partition(lam)
    d = sum(lam)
    if d > degree_cap:
        raise ResourceCapError(f"|lambda| = {d} above the degree cap {degree_cap}")
    order, _, norms = _macdonald_data(d, as_fraction(q), as_fraction(t))
    return norms[order.index(lam)]


def macdonald_Q(lam, q, t, degree_cap=DEFAULT_DEGREE_CAP):
    """Q_lambda = P_lambda / <P_lambda, P_lambda>, m-basis expansion."""
    P = macdonald_P(lam, q, t, degree_cap)
    b = 1 / macdonald_norm(lam, q, t, degree_cap)
    return SymPolyExpansion(P.degree, "m", {mu: b * c for mu, c in P.coeffs.items()})


# ---------------------------------------------------------------------------
# specializations and evaluation
# ---------------------------------------------------------------------------


def power_sums_of_specialization(rho, D):
    """p_n(rho) for n = 1..D.

    Matching the log of the generating series of rho against the power-sum
    exponential form of the Cauchy kernel gives

        p_n(rho) = sum_i a_i^n
                   + (-1)^{n-1} (1-q^n)/(1-t^n) sum_i b_i^n
                   + gamma (1-q)/(1-t) [n = 1].
    """
    if D < 1:
        raise DomainError("D must be >= 1")
    vals = []
    q, t = rho.q, rho.t
    for n in range(1, D + 1):
        s = sum((a**n for a in rho.alphas), Fraction(0))
        if rho.betas:
            ratio = (1 - q**n) / (1 - t**n)
            s += (-1) ** (n - 1) * ratio * sum((b**n for b in rho.betas), Fraction(0))
        if n == 1 and rho.gamma:
            s += rho.gamma * (1 - q) / (1 - t)
        vals.append(s)
    return PowerSumValues(tuple(vals))


def power_sums_of_variables(xs, D):
    """p_n = sum_i x_i^n for a finite variable list (pure-alpha case)."""
    xs = [as_fraction(x) for x in xs]
    return PowerSumValues(
        tuple(sum((x**n for x in xs), Fraction(0)) for n in range(1, D + 1))
    )


def evaluate_symfunc(f, p_values):
    """Apply a specialization: substitute p_n -> p_n(rho) in a p-expansion."""
    if f.basis != "p":
        raise DomainError("evaluate_symfunc expects a p-basis expansion")
    if f.degree > len(p_values.values):
        raise DomainError(
            f"degree {f.degree} exceeds available power sums {len(p_values.values)}"
        )
    total = Fraction(0)
    for lam, c in f.coeffs.items():
        term = c
        for part_ in lam:
            term *= p_values.p(part_)
        total += term
    return total


# ---------------------------------------------------------------------------
# Schur fast paths and oracles
# ---------------------------------------------------------------------------


def complete_homogeneous_values(xs, D):
    """h_0..h_D of the given variables, exactly (series of prod 1/(1-x u))."""
    h = [Fraction(1)] + [Fraction(0)] * D
    for x in xs:
        x = as_fraction(x)
        for k in range(1, D + 1):
            # h_new[k] = sum_j h_old[j] x^{k-j} telescopes to this update.
            h[k] += h[k - 1] * x
    return h


def schur_eval(lam, xs):
    """s_lambda(x_1..x_n) by the Jacobi-Trudi determinant det[h_{lam_i-i+j}]."""
    lam = check_partition(lam)
    if not lam:
        return Fraction(1)
    ell = len(lam)
    h = complete_homogeneous_values(xs, lam[0] + ell)

    def hh(k):
        return h[k] if 0 <= k < len(h) else Fraction(0)

    from .exact import det_fraction

    mat = [[hh(lam[i] - (i + 1) + (j + 1)) for j in range(ell)] for i in range(ell)]
    return det_fraction(mat)


def schur_eval_ones(lam, N):
    """s_lambda(1^N) in closed hook-content form, as a cross-check oracle."""
    lam = check_partition(lam)
    lam_c = conjugate(lam)
    val = Fraction(1)
    for i, row in enumerate(lam, start=1):
        for j in range(1, row + 1):
            content = N + j - i
            if content <= 0:
                return Fraction(0)
            hook = (row - j) + (lam_c[j - 1] - i) + 1
            val *= Fraction(content, hook)
    return val


def kostka_number(lam, mu):
    """Number of SSYT of shape lam and content mu, by direct enumeration."""
    lam = check_partition(lam)
    mu = tuple(mu)
    if sum(lam) != sum(mu):
        return 0

    rows = len(lam)

    def fill(row_idx, prev_row, remaining):
        if row_idx == rows:
            return 1
        width = lam[row_idx]
        total = 0

        def place(col, row_vals, rem):
            nonlocal total
            if col == width:
                total += fill(row_idx + 1, row_vals, rem)
                return
            lo = row_vals[col - 1] if col else 1
            floor = prev_row[col] + 1 if prev_row is not None and col < len(prev_row) else 1
            for v in range(max(lo, floor, row_idx + 1), len(mu) + 1):
                if rem[v - 1]:
                    rem2 = list(rem)
                    rem2[v - 1] -= 1
                    place(col + 1, row_vals + [v], rem2)

        place(0, [], list(remaining))
        return total

    return fill(0, None, list(mu))


# ---------------------------------------------------------------------------
# generating series of a specialization (g-series), two independent routes
# ---------------------------------------------------------------------------


def _series_mul(a, b, D):
    out = [Fraction(0)] * (D + 1)
    for i, ai in enumerate(a[: D + 1]):
        if ai:
            for j, bj in enumerate(b[: D + 1 - i]):
                if bj:
                    out[i + j] += ai * bj
    return out


def _series_inv(a, D):
    if a[0] == 0:
        raise DomainError("series has no inverse")
    out = [Fraction(0)] * (D + 1)
    out[0] = 1 / a[0]
    for k in range(1, D + 1):
        s = Fraction(0)
        for j in range(1, k + 1):
            if j < len(a) and a[j]:
                s += a[j] * out[k - j]
        out[k] = -s / a[0]
    return out


def _pochhammer_series(a, q, D):
    """(a u; q)_inf as a u-series via Euler's expansion."""
    coeffs = [Fraction(0)] * (D + 1)
    coeffs[0] = Fraction(1)
    qfac = Fraction(1)
    apow = Fraction(1)
    for k in range(1, D + 1):
        qfac *= 1 - q**k
        apow *= a
        coeffs[k] = (-1) ** k * q ** (k * (k - 1) // 2) * apow / qfac
    return coeffs


def g_series_direct(rho, D):
    """g_0..g_D of rho from the explicit product form of its generating series."""
    series = [Fraction(0)] * (D + 1)
    series[0] = Fraction(1)
    for a in rho.alphas:
        series = _series_mul(series, _pochhammer_series(rho.t * a, rho.q, D), D)
        series = _series_mul(series, _series_inv(_pochhammer_series(a, rho.q, D), D), D)
    for b in rho.betas:
        series = _series_mul(series, [Fraction(1), b] + [Fraction(0)] * (D - 1), D)
    if rho.gamma:
        expg = [Fraction(1)]
        term = Fraction(1)
        for k in range(1, D + 1):
            term *= Fraction(rho.gamma, k)
            expg.append(term)
        series = _series_mul(series, expg, D)
    return series


def g_series_from_power_sums(rho, D):
    """g_r = sum_{|lam|=r} z_lam(q,t)^{-1} p_lam(rho), the basis-expansion route."""
    pv = power_sums_of_specialization(rho, max(D, 1))
    out = [Fraction(1)]
    for r in range(1, D + 1):
        s = Fraction(0)
        for lam in partitions_of(r):
            term = 1 / z_lambda_qt(lam, rho.q, rho.t)
            for part_ in lam:
                term *= pv.p(part_)
            s += term
        out.append(s)
    return out


# ---------------------------------------------------------------------------
# serialization (golden-file tests)
# ---------------------------------------------------------------------------


def expansion_to_json(f):
    return {
        "degree": f.degree,
        "basis": f.basis,
        "coefficients": [
            {"partition": list(lam), "value": str(c)}
            for lam, c in sorted(f.coeffs.items(), reverse=True)
        ],
    }


def expansion_from_json(obj):
    coeffs = {
        tuple(e["partition"]): Fraction(e["value"]) for e in obj["coefficients"]
    }
    return SymPolyExpansion(int(obj["degree"]), obj["basis"], coeffs)
