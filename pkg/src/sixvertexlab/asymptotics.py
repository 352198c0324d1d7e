"""Critical-point data, spread/equivalence diagnostics, and TW experiments.

Two homogeneous model variants are handled:

  spin_half  : columns s = Q^{-1/2} (capacity 1), xi = 1, rapidity u,
               zeta = Q^{-1/2}/u; steepest-descent action
               G(z) = -mu ln(1 - sqrt(zeta) z) + nu ln(1 - sqrt(zeta)/z)
                      - (x/L) ln z
  negative_s : columns s = -Q^{1/2} (uncapped), xi = 1, same zeta;
               G(z) = +mu ln(1 + sqrt(zeta) z) + nu ln(1 - sqrt(zeta)/z)
                      - (x/L) ln z

The double critical point (G' = G'' = 0) controls the lower edge of the
associated point process.  For spin_half everything is closed-form and the
numeric root-finder is only a certificate.  For negative_s the printed
closed form of z_c is dimensionally inconsistent for mu != nu (mu instead
of sqrt(mu) in the denominator); here z_c is produced by the root-finder
(seeded from the sqrt(mu) variant, which the certificate confirms) and the
deviation from the printed formula is reported, never silently patched.
"""

import math
from dataclasses import dataclass

import numpy as np

from .airy import TWTable, build_tw_table
from .errors import AccuracyError, DomainError
from .exact import as_fraction
from .partitions import part
from .vertex import ColumnParams, VertexSpec, sample_heights_batch

VARIANTS = ("spin_half", "negative_s")


def _check_variant(variant):
    if variant not in VARIANTS:
        raise DomainError(f"variant must be one of {VARIANTS}, got {variant!r}")


def action_G(z, mu, nu, zeta, x_over_L, variant, derivative_order=0):
    """G and its first three derivatives in closed form.

    The nu-term is differentiated through ln(1 - s/z) = ln(z - s) - ln(z),
    whose derivatives have no branch issues away from z in {0, s}.
    """
    _check_variant(variant)
    if not 0 <= derivative_order <= 3:
        raise DomainError("derivative_order must be 0..3")
    s = math.sqrt(zeta)
    sgn = -1.0 if variant == "spin_half" else 1.0  # sign inside (1 + sgn*s*z)
    z = complex(z)
    c = x_over_L
    if derivative_order == 0:
        for arg in (1.0 + sgn * s * z, 1.0 - s / z, z):
            if arg.imag == 0 and arg.real <= 0:
                raise DomainError(f"log branch cut hit at z = {z}")
        val = sgn * mu * np.log(1.0 + sgn * s * z)
        return complex(val + nu * np.log(1.0 - s / z) - c * np.log(z))
    for point in (0.0, s, -sgn / s):
        if z == point:
            raise DomainError(f"derivative singular at z = {z}")
    if derivative_order == 1:
        return mu * s / (1.0 + sgn * s * z) + nu * (1.0 / (z - s) - 1.0 / z) - c / z
    if derivative_order == 2:
        return (
            -sgn * mu * s**2 / (1.0 + sgn * s * z) ** 2
            + nu * (-1.0 / (z - s) ** 2 + 1.0 / z**2)
            + c / z**2
        )
    return (
        2.0 * mu * s**3 / (1.0 + sgn * s * z) ** 3
        + nu * (2.0 / (z - s) ** 3 - 2.0 / z**3)
        - 2.0 * c / z**3
    )


def _double_critical_newton(mu, nu, zeta, variant, z0, c0, max_iter=60):
    """Damped Newton for G'(z) = G''(z) = 0 in the unknowns (z, c = x/L)."""
    z, c = complex(z0), float(c0)

    def F(z, c):
        return (
            action_G(z, mu, nu, zeta, c, variant, 1),
            action_G(z, mu, nu, zeta, c, variant, 2),
        )

    f1, f2 = F(z, c)
    norm = abs(f1) + abs(f2)
    for _ in range(max_iter):
        if norm < 1e-14:
            break
        j11 = action_G(z, mu, nu, zeta, c, variant, 2)
        j12 = -1.0 / z
        j21 = action_G(z, mu, nu, zeta, c, variant, 3)
        j22 = 1.0 / z**2
        det = j11 * j22 - j12 * j21
        dz = (f1 * j22 - f2 * j12) / det
        dc = (j11 * f2 - j21 * f1) / det
        step = 1.0
        while step > 1e-6:
            z_new, c_new = z - step * dz, c - step * dc.real
            try:
                g1, g2 = F(z_new, c_new)
            except DomainError:
                step /= 2.0
                continue
            if abs(g1) + abs(g2) < norm:
                z, c, (f1, f2), norm = z_new, c_new, (g1, g2), abs(g1) + abs(g2)
                break
            step /= 2.0
        else:
            break
    return z.real if abs(z.imag) < 1e-12 else z, c, norm


@dataclass(frozen=True)
class CriticalData:
    """Edge data with its numeric certificate residuals."""

    variant: str
    mu: float
    nu: float
    zeta: float
    x_c: float
    z_c: float
    sigma: float
    H: float
    res_g1: float
    res_g2: float
    sigma_residual: float
    printed_zc_deviation: float


def limit_shape_H(mu, nu, zeta, variant):
    """The law-of-large-numbers height profile, all branches."""
    _check_variant(variant)
    if mu <= 0 or nu <= 0:
        raise DomainError("mu and nu must be positive")
    ratio = mu / nu
    if variant == "spin_half":
        if ratio >= 1.0 / zeta:
            return 0.0
        if ratio <= zeta:
            return nu - mu
        return (math.sqrt(nu) - math.sqrt(zeta * mu)) ** 2 / (1.0 - zeta)
    if ratio >= 1.0 / zeta:
        return 0.0
    return (math.sqrt(nu) - math.sqrt(zeta * mu)) ** 2 / (1.0 + zeta)


def critical_data(mu, nu, zeta, variant, certify_tol=1e-10):
    """Closed-form edge data plus a damped-Newton double-critical certificate.

    Raises DomainError outside the admissible cone and AccuracyError when the
    certificate residuals exceed ``certify_tol``.
    """
    _check_variant(variant)
    if not 0 < zeta < 1:
        raise DomainError(f"zeta must be in (0,1), got {zeta}")
    ratio = mu / nu
    if variant == "spin_half" and not (zeta < ratio < 1.0 / zeta):
        raise DomainError(f"need zeta < mu/nu < 1/zeta, got mu/nu = {ratio}")
    if variant == "negative_s" and not ratio < 1.0 / zeta:
        raise DomainError(f"need mu/nu < 1/zeta, got mu/nu = {ratio}")
    H = limit_shape_H(mu, nu, zeta, variant)
    x_c = H - nu
    rt = math.sqrt
    if variant == "spin_half":
        z_seed = (rt(zeta * mu) - rt(nu)) / (rt(mu) - rt(zeta * nu))
        sigma = (
            (zeta * mu * nu) ** (1.0 / 6.0)
            * (1.0 - rt(zeta * mu / nu)) ** (2.0 / 3.0)
            * (1.0 - rt(zeta * nu / mu)) ** (2.0 / 3.0)
            / (1.0 - zeta)
        )
        printed_zc = z_seed
    else:
        # seed with sqrt(mu) in the denominator; the printed form uses mu.
        z_seed = (rt(zeta * mu) - rt(nu)) / (rt(mu) + rt(zeta * nu))
        sigma = (
            (zeta * mu * nu) ** (1.0 / 6.0)
            * (1.0 - rt(zeta * mu / nu)) ** (2.0 / 3.0)
            * (1.0 + rt(zeta * nu / mu)) ** (2.0 / 3.0)
            / (1.0 + zeta)
        )
        printed_zc = (rt(zeta * mu) - rt(nu)) / (mu + rt(zeta * nu))
    z_num, c_num, _ = _double_critical_newton(mu, nu, zeta, variant, z_seed, x_c)
    z_num = float(np.real(z_num))
    if variant == "spin_half":
        if abs(z_num - z_seed) > 1e-8 or abs(c_num - x_c) > 1e-8:
            raise AccuracyError(
                f"certificate drifted from the closed form: z {z_seed} -> {z_num}"
            )
        z_c = z_seed
    else:
        z_c = z_num
        x_c = c_num
    g1 = abs(action_G(z_c, mu, nu, zeta, x_c, variant, 1))
    g2 = abs(action_G(z_c, mu, nu, zeta, x_c, variant, 2))
    g3 = complex(action_G(z_c, mu, nu, zeta, x_c, variant, 3)).real
    sigma_num = -z_c * math.copysign(abs(g3 / 2.0) ** (1.0 / 3.0), g3)
    sigma_residual = abs(sigma_num - sigma) / sigma
    if max(g1, g2) > certify_tol or sigma_residual > certify_tol:
        raise AccuracyError(
            f"critical-point certificate failed: |G'|={g1}, |G''|={g2}, "
            f"sigma residual {sigma_residual}"
        )
    return CriticalData(
        variant,
        mu,
        nu,
        zeta,
        x_c,
        z_c,
        sigma,
        H,
        g1,
        g2,
        sigma_residual,
        abs(z_c - printed_zc),
    )


# ---------------------------------------------------------------------------
# spread / asymptotic-equivalence diagnostics
# ---------------------------------------------------------------------------


def spread_metric(samples=None, cdf=None, lo=None, hi=None, grid_step=1e-3):
    """sup over x of (F(x+1) - F(x)) scanned on a grid of the given step.

    Pass either a sample array (its ecdf is used, scanned over its range) or
    a cdf callable together with lo/hi.
    """
    if samples is not None:
        xs = np.sort(np.asarray(samples, dtype=float))
        lo, hi = xs[0] - 1.0, xs[-1]
        grid = np.arange(lo, hi + grid_step, grid_step)
        mass = (
            np.searchsorted(xs, grid + 1.0, side="right")
            - np.searchsorted(xs, grid, side="right")
        ) / len(xs)
        return float(mass.max())
    if cdf is None or lo is None or hi is None:
        raise DomainError("spread_metric needs samples or (cdf, lo, hi)")
    grid = np.arange(lo - 1.0, hi + grid_step, grid_step)
    vals = np.asarray(cdf(grid + 1.0)) - np.asarray(cdf(grid))
    return float(vals.max())


def phi_observable(family, **kw):
    """The bounded monotone observables used by the equivalence machinery.

    family "product_Q": Phi(x) = prod_{i>=0} 1/(1 + Q^{x+i});  kw: x, Q.
    family "column":    prod_{j>=0} (1+q^{lam_{n-j}} t^{j+x})/(1+t^{j+x});
                        kw: lam, n, x, q, t with t in (0,1), q in [0,1).
    family "t_zero":    prod_{0<=j<-x} q^{lam_{n-j}};  kw: lam, n, x, q.
    family "min_set":   prod_{j in J} 1/(1+q^{x+j}) for J = Z_{>=0} minus a
                        finite excluded set (or an explicit finite included
                        set);  kw: x, q, excluded or included.
    """
    if family == "product_Q":
        x, Q = kw["x"], float(kw["Q"])
        if not 0 < Q < 1:
            raise DomainError("product_Q needs Q in (0,1)")
        return math.exp(-_log_product_tail(x, Q))
    if family == "column":
        lam, n, x = kw["lam"], kw["n"], kw["x"]
        q, t = float(kw["q"]), float(kw["t"])
        if not 0 < t < 1:
            raise DomainError("column family needs t in (0,1)")
        if not 0 <= q < 1:
            raise DomainError("column family needs q in [0,1)")
        logt = math.log(t)
        logq = math.log(q) if q > 0 else None
        log_val = 0.0
        for j in range(n):
            a = part(lam, n - j)
            if a == 0:
                continue  # q^0 = 1 cancels the factor exactly
            log_num = 0.0 if logq is None else float(
                np.logaddexp(0.0, a * logq + (j + x) * logt)
            )
            log_val += log_num - float(np.logaddexp(0.0, (j + x) * logt))
        log_val -= _log_product_tail(x + n, t)
        return math.exp(log_val)
    if family == "t_zero":
        lam, n, x, q = kw["lam"], kw["n"], kw["x"], float(kw["q"])
        if not 0 <= q < 1:
            raise DomainError("t_zero family needs q in [0,1)")
        val = 1.0
        j = 0
        while j < -x:
            idx = n - j
            if idx <= 0:
                return 0.0
            lam_j = part(lam, idx)
            if lam_j:
                val *= q**lam_j
            j += 1
        return val
    if family == "min_set":
        x, q = kw["x"], float(kw["q"])
        if not 0 < q < 1:
            raise DomainError("min_set family needs q in (0,1)")
        if "included" in kw:
            log_val = -sum(
                np.logaddexp(0.0, (x + j) * math.log(q)) for j in kw["included"]
            )
            return math.exp(log_val)
        excluded = set(kw.get("excluded", ()))
        log_val = -_log_product_tail(x, q)
        for j in excluded:
            log_val += np.logaddexp(0.0, (x + j) * math.log(q))
        return math.exp(log_val)
    raise DomainError(f"unknown observable family {family!r}")


def _log_product_tail(x, base, tol=1e-15):
    """log prod_{i>=0} (1 + base^{x+i}) for base in (0,1), stable in x."""
    log_b = math.log(base)
    total = 0.0
    i = 0
    while True:
        e = (x + i) * log_b
        if e < math.log(tol) and i > 0:
            total += math.exp(e) / (1.0 - base)
            return total
        total += float(np.logaddexp(0.0, e))
        i += 1
        if i > 100000:
            raise AccuracyError("product tail failed to converge")


@dataclass(frozen=True)
class EquivalenceReport:
    rows: tuple
    sup_decreasing: bool


def equivalence_report(pairs):
    """Spread metrics and sup distances for a sequence of (eta, F) pairs.

    ``pairs`` holds (samples, grid, F_values) triples; per index the report
    carries both spread metrics and sup_x |ecdf(x) - F(x)| over the grid.
    """
    rows = []
    for idx, (samples, grid, f_vals) in enumerate(pairs):
        xs = np.sort(np.asarray(samples, dtype=float))
        grid = np.asarray(grid, dtype=float)
        f_vals = np.asarray(f_vals, dtype=float)
        ecdf = np.searchsorted(xs, grid, side="right") / len(xs)
        sup = float(np.max(np.abs(ecdf - f_vals)))
        f_shift = np.interp(grid + 1.0, grid, f_vals)
        rows.append(
            {
                "index": idx,
                "spread_eta": spread_metric(samples=xs),
                "spread_F": float(np.max(f_shift - f_vals)),
                "sup_distance": sup,
            }
        )
    sups = [r["sup_distance"] for r in rows]
    decreasing = all(b <= a + 1e-9 for a, b in zip(sups, sups[1:]))
    return EquivalenceReport(tuple(rows), decreasing)


# ---------------------------------------------------------------------------
# end-to-end Tracy-Widom experiments
# ---------------------------------------------------------------------------


def homogeneous_vertex_spec(variant, sqrt_Q, zeta, M, N):
    """The Example-style homogeneous specification with rational data.

    sqrt_Q is taken as the primitive parameter so that s*xi = Q^{-1/2} (or
    -Q^{1/2}) and u = 1/(sqrt_Q * zeta) stay exactly rational.
    """
    _check_variant(variant)
    sq = as_fraction(sqrt_Q)
    zeta = as_fraction(zeta)
    if not 0 < zeta < 1:
        raise DomainError("zeta must be in (0,1)")
    Q = sq * sq
    u = 1 / (sq * zeta)
    if variant == "spin_half":
        col = ColumnParams.make(1 / Q, 1 / sq, +1, 1)
    else:
        col = ColumnParams.make(Q, -sq, -1, None)
    return VertexSpec.make(Q, M, N, [col] * (M - 1), [u] * N)


def ks_distance(samples, table):
    """Kolmogorov-Smirnov distance of samples against an interpolated table."""
    xs = np.sort(np.asarray(samples, dtype=float))
    n = len(xs)
    F = table.cdf(xs)
    i = np.arange(1, n + 1)
    return float(np.max(np.maximum(np.abs(F - i / n), np.abs(F - (i - 1) / n))))


def tw_experiment(
    variant,
    zeta,
    mu,
    nu,
    L_list,
    n_samples,
    seed,
    sqrt_Q="1/2",
    workers=1,
    tw_table=None,
):
    """Sample the homogeneous model at sizes L and compare against F_GUE.

    Heights are rescaled as X = (H L - h(M, N)) / (sigma L^{1/3}): the
    fluctuation theorem is stated as P{(h - H L)/(sigma L^{1/3}) >= -x} ->
    F_GUE(x), so it is -(h - H L) that follows the Tracy-Widom law.  Returns
    (rows, rescaled) with one result row per L.
    """
    zeta = as_fraction(zeta)
    cd = critical_data(mu, nu, float(zeta), variant)
    if tw_table is None:
        tw_table = build_tw_table(order=60)
    rows = []
    rescaled = {}
    for L in L_list:
        M = math.ceil(mu * L)
        N = math.ceil(nu * L)
        spec = homogeneous_vertex_spec(variant, sqrt_Q, zeta, M, N)
        h = sample_heights_batch(spec, n_samples, seed=(seed, L), workers=workers)
        X = (cd.H * L - h) / (cd.sigma * L ** (1.0 / 3.0))
        ks = ks_distance(X, tw_table)
        rows.append(
            {
                "L": L,
                "n_samples": n_samples,
                "mean_h_over_L": float(h.mean()) / L,
                "H_target": cd.H,
                "ks_distance": ks,
            }
        )
        rescaled[L] = X
    return rows, rescaled
