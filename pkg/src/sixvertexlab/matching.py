"""Matched vertex/Macdonald specification pairs and the identity checks.

A Macdonald measure with parameters (q, t), variables x_1..x_n and
(alpha; beta) data matches a vertex specification when Q = t, N = n,
{u_y} = {1/x_y}, and the alpha/beta parameters split into geometric
clusters (ratio t for alphas, ratio q for betas), each cluster feeding one
column:

    alpha cluster (ta, k):  s^2 = t^-k,  s xi = t^-k / ta,  capacity k
    beta  cluster (tb, l):  s^2 = q^l,   s xi = -1 / tb,    uncapped

The cluster decomposition is genuinely non-unique (a k=2 cluster equals two
k=1 clusters at ta and t*ta), and the u <-> 1/x correspondence is only a
multiset equality, so both are explicit inputs rather than inferred data.

With matched specifications,

  (-1)^ell E_6v prod_i (Q^h - Q^{i-1})/(1 - Q^i) = E_MM e_ell(q^lam t^...),

and the generating-function (q-Laplace) forms of the same identity hold; the
checks below triangulate each side through exact enumeration, direct
truncated summation, and contour quadrature.
"""

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .contour import macdonald_moment_contour, _macdonald_factor, _vertex_factor
from .errors import DomainError
from .exact import as_fraction, solve_matrix
from .macdonald import (
    MacdonaldSpec,
    mm_expect_elementary,
    mm_expect_qlaplace,
    mm_expect_qlaplace_polynomial,
)
from .vertex import (
    ColumnParams,
    VertexSpec,
    exact_height_distribution,
    qlaplace_exact,
    qlaplace_polynomial_exact,
    qmoment_exact,
    validate_vertex_spec,
)


@dataclass(frozen=True)
class ClusterMap:
    """Cluster decomposition of (alpha; beta) data plus a column assignment.

    alpha_clusters: tuple of (alpha_tilde, k); beta_clusters: tuple of
    (beta_tilde, l); column_order: tuple of ("alpha", i) / ("beta", j)
    references, one per vertex column, left to right.
    """

    alpha_clusters: tuple
    beta_clusters: tuple
    column_order: tuple

    @staticmethod
    def make(alpha_clusters=(), beta_clusters=(), column_order=None):
        ac = tuple((as_fraction(a), int(k)) for a, k in alpha_clusters)
        bc = tuple((as_fraction(b), int(l)) for b, l in beta_clusters)
        if any(k < 1 for _, k in ac) or any(l < 1 for _, l in bc):
            raise DomainError("cluster sizes must be >= 1")
        if column_order is None:
            column_order = tuple(("alpha", i) for i in range(len(ac))) + tuple(
                ("beta", j) for j in range(len(bc))
            )
        else:
            column_order = tuple((kind, int(i)) for kind, i in column_order)
        counts = Counter(column_order)
        expect = Counter(
            [("alpha", i) for i in range(len(ac))] + [("beta", j) for j in range(len(bc))]
        )
        if counts != expect:
            raise DomainError("column_order must reference each cluster exactly once")
        return ClusterMap(ac, bc, column_order)

    def expanded_alphas(self, t):
        out = []
        for a, k in self.alpha_clusters:
            out.extend(a * t**i for i in range(k))
        return out

    def expanded_betas(self, q):
        out = []
        for b, l in self.beta_clusters:
            out.extend(b * q**i for i in range(l))
        return out


def column_from_cluster(kind, value, size, q, t):
    """The vertex column carrying one cluster (exact (s^2, s*xi) data)."""
    if kind == "alpha":
        return ColumnParams.make(t**-size, t**-size / value, +1, size)
    if kind == "beta":
        return ColumnParams.make(q**size, -1 / value, -1, None)
    raise DomainError(f"unknown cluster kind {kind!r}")


def build_matched_vertex_spec(mspec, cmap):
    """The vertex specification matched to ``mspec`` under ``cmap``."""
    q, t = mspec.q, mspec.t
    if Counter(cmap.expanded_alphas(t)) != Counter(mspec.rho2.alphas):
        raise DomainError("alpha clusters do not expand to the measure's alphas")
    if Counter(cmap.expanded_betas(q)) != Counter(mspec.rho2.betas):
        raise DomainError("beta clusters do not expand to the measure's betas")
    columns = []
    for kind, i in cmap.column_order:
        value, size = (cmap.alpha_clusters[i] if kind == "alpha" else cmap.beta_clusters[i])
        columns.append(column_from_cluster(kind, value, size, q, t))
    spec = VertexSpec.make(
        t, len(columns) + 1, mspec.n, columns, [1 / x for x in mspec.x]
    )
    problems = validate_vertex_spec(spec)
    if problems:
        raise DomainError("matched spec is invalid: " + "; ".join(problems))
    return spec


def verify_matching(vspec, mspec, cmap):
    """Structural check of every matching condition; returns (ok, problems)."""
    problems = []
    q, t = mspec.q, mspec.t
    if vspec.Q != t:
        problems.append(f"Q = {vspec.Q} differs from t = {t}")
    if vspec.N != mspec.n:
        problems.append(f"N = {vspec.N} differs from n = {mspec.n}")
    if Counter(vspec.u) != Counter(1 / x for x in mspec.x):
        problems.append("u multiset differs from 1/x multiset")
    if Counter(cmap.expanded_alphas(t)) != Counter(mspec.rho2.alphas):
        problems.append("alpha clusters do not expand to the measure's alphas")
    if Counter(cmap.expanded_betas(q)) != Counter(mspec.rho2.betas):
        problems.append("beta clusters do not expand to the measure's betas")
    if len(cmap.column_order) != vspec.M - 1:
        problems.append("cluster count differs from column count")
    else:
        for x, (kind, i) in enumerate(cmap.column_order, start=1):
            value, size = (
                cmap.alpha_clusters[i] if kind == "alpha" else cmap.beta_clusters[i]
            )
            want = column_from_cluster(kind, value, size, q, t)
            got = vspec.columns[x - 1]
            if (got.s_squared, got.s_xi, got.s_sign, got.capacity) != (
                want.s_squared,
                want.s_xi,
                want.s_sign,
                want.capacity,
            ):
                problems.append(f"column {x} does not carry its cluster: {got} != {want}")
    return (not problems), problems


def qbinomial_normalized_moment(dist, Q, ell):
    """LHS of the moment identity: (-1)^ell E prod (Q^h - Q^{i-1}) / (1 - Q^i)."""
    Q = as_fraction(Q)
    denom = Fraction(1)
    for i in range(1, ell + 1):
        denom *= 1 - Q**i
    return (-1) ** ell * qmoment_exact(dist, Q, ell) / denom


def check_match_moments(vspec, mspec, ell_max=3, tol=1e-8, contour_tol=1e-10):
    """Per-ell triples (exact vertex, direct Macdonald, contour Macdonald).

    Returns a list of JSON-ready rows {identity, parameters, lhs, rhs_direct,
    rhs_contour, abs_error, pass}.
    """
    ok, problems = verify_matching(vspec, mspec, build_cluster_map_check(vspec, mspec))
    if not ok:
        raise DomainError("specifications do not match: " + "; ".join(problems))
    dist = exact_height_distribution(vspec)
    rows = []
    for ell in range(0, min(ell_max, vspec.N) + 1):
        lhs = float(qbinomial_normalized_moment(dist, vspec.Q, ell))
        direct = mm_expect_elementary(mspec, ell, tol=min(tol * 1e-2, 1e-10))
        contour = macdonald_moment_contour(mspec, ell, contour_tol)
        err = max(abs(lhs - direct), abs(lhs - contour))
        rows.append(
            {
                "identity": "moment",
                "parameters": {"ell": ell},
                "lhs": lhs,
                "rhs_direct": direct,
                "rhs_contour": contour,
                "abs_error": err,
                "pass": bool(err < tol),
            }
        )
    return rows


def build_cluster_map_check(vspec, mspec):
    """Recover the ClusterMap implied by a vertex spec (for verification)."""
    q, t = mspec.q, mspec.t
    alphas, betas, order = [], [], []
    for col in vspec.columns:
        if col.s_sign > 0:
            k = col.capacity
            order.append(("alpha", len(alphas)))
            alphas.append((col.s_squared / col.s_xi, k))
        else:
            if q == 0:
                raise DomainError("beta columns require q > 0")
            # s^2 = q^l, recovered in exact rational arithmetic
            l = 0
            ss = Fraction(col.s_squared)
            while ss != 1 and l <= 64:
                ss /= q
                l += 1
            if ss != 1:
                raise DomainError(f"column s^2 = {col.s_squared} is not a power of q")
            order.append(("beta", len(betas)))
            betas.append((-1 / col.s_xi, l))
    return ClusterMap.make(alphas, betas, order)


def check_match_qlaplace(vspec, mspec, zetas=(0.3, 1.0, 3.0), tol=1e-8):
    """q-Laplace identity at each zeta, plus the polynomial form coefficientwise.

    The polynomial identity is degree N in zeta on both sides; coefficients
    are extracted by evaluating at N+1 Chebyshev-spaced rational nodes and
    solving the (exactly built) Vandermonde system.
    """
    dist = exact_height_distribution(vspec)
    rows = []
    for zeta in zetas:
        lhs = qlaplace_exact(dist, vspec.Q, zeta, tol=min(tol * 1e-2, 1e-12))
        rhs = mm_expect_qlaplace(mspec, zeta, tol=min(tol * 1e-1, 1e-9))
        err = abs(lhs - rhs)
        rows.append(
            {
                "identity": "qlaplace",
                "parameters": {"zeta": float(zeta)},
                "lhs": lhs,
                "rhs_direct": rhs,
                "rhs_contour": None,
                "abs_error": err,
                "pass": bool(err < tol),
            }
        )
    N = vspec.N
    # Chebyshev-like rational nodes on [1/2, 3/2]; exact Vandermonde solve.
    nodes = [Fraction(1) + Fraction(2 * i - N, 2 * (N + 1)) for i in range(N + 1)]
    vand = [[z**j for j in range(N + 1)] for z in nodes]
    lhs_vals = [[qlaplace_polynomial_exact(dist, vspec.Q, z)] for z in nodes]
    lhs_coeffs = [row[0] for row in solve_matrix(vand, lhs_vals)]
    rhs_vals = [
        [mm_expect_qlaplace_polynomial(mspec, z, tol=min(tol * 1e-1, 1e-9))]
        for z in nodes
    ]
    vand_f = np.array([[float(v) for v in row] for row in vand])
    rhs_coeffs = np.linalg.solve(vand_f, np.array([r[0] for r in rhs_vals]))
    for j in range(N + 1):
        err = abs(float(lhs_coeffs[j]) - rhs_coeffs[j])
        rows.append(
            {
                "identity": "qlaplace_polynomial",
                "parameters": {"coefficient": j},
                "lhs": float(lhs_coeffs[j]),
                "rhs_direct": float(rhs_coeffs[j]),
                "rhs_contour": None,
                "abs_error": err,
                "pass": bool(err < tol),
            }
        )
    return rows


def integrand_ratio_audit(vspec, mspec, n_points=64):
    """Max |vertex factor / macdonald factor - 1| over contour-like nodes.

    For matched specifications the two multiplicative integrand factors are
    identically equal, so the audit value is pure roundoff.
    """
    theta = 2.0 * np.pi * (np.arange(n_points) + 0.25) / n_points
    radius = 0.5 * min(float(x) for x in mspec.x)
    z = radius * np.exp(1j * theta)
    num = _vertex_factor(vspec, z)
    den = _macdonald_factor(mspec, z)
    return float(np.max(np.abs(num / den - 1.0)))
