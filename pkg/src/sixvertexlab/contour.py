"""Contour integrals on circles: moment formulas and correlation kernels.

All integrals are (2 pi i)^{-ell}-normalized iterated integrals over
positively oriented circles, evaluated by the trapezoid rule, which is
spectrally accurate for integrands analytic near the contour.  Nodes are
doubled until two successive levels agree below the requested tolerance.

Contour placement policy: the target poles (all real here) are grouped into
clusters, and each cluster gets a circle with radius halfway to the nearest
excluded point.  The excluded set always contains the origin and every pole
that must stay outside; for the multi-variable moment integrands it also
contains the Q-shifted (resp. t-shifted) images of the targets, which keeps
the cross-factor poles w_a = Q w_b strictly outside the product of contours
("sufficiently small" circles), so their residues never enter.
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import AccuracyError, ConfigError, DomainError, ResourceCapError

DEFAULT_MAX_ELL = 3
_GRID_CHUNK = 1 << 21


@dataclass(frozen=True)
class ContourSpec:
    """One positively oriented circle with a node-count hint (power of two)."""

    center: complex
    radius: float
    nodes: int = 32

    def __post_init__(self):
        if self.radius <= 0:
            raise ConfigError(f"radius must be positive, got {self.radius}")
        if self.nodes < 8 or self.nodes & (self.nodes - 1):
            raise ConfigError(f"nodes must be a power of two >= 8, got {self.nodes}")


@dataclass
class QuadratureResult:
    value: complex
    error_estimate: float
    nodes_used: int


def _system(contours):
    """Normalize one dimension's contour argument to a tuple of circles."""
    if isinstance(contours, ContourSpec):
        return (contours,)
    return tuple(contours)


def _nodes_weights(system, scale):
    zs, ws = [], []
    for c in system:
        n = c.nodes * scale
        theta = 2.0 * np.pi * np.arange(n) / n
        z = c.center + c.radius * np.exp(1j * theta)
        zs.append(z)
        # (1/2 pi i) dz on a circle is (z - center)/n per node.
        ws.append((z - c.center) / n)
    return np.concatenate(zs), np.concatenate(ws)


def circle_quadrature(f, contours, tol=1e-10, max_levels=7):
    """(2 pi i)^{-ell} iterated integral of f over the given contour systems.

    ``contours`` holds one ContourSpec (or a sequence of them, summed) per
    dimension; ``f`` must accept ``ell`` broadcastable complex arrays.  Node
    counts double per level until two levels agree below ``tol``.
    """
    systems = [_system(c) for c in contours]
    ell = len(systems)
    prev = None
    value = None
    nodes_used = 0
    for level in range(max_levels):
        scale = 1 << level
        nw = [_nodes_weights(s, scale) for s in systems]
        sizes = [len(z) for z, _ in nw]
        total = math.prod(sizes)
        if total > _GRID_CHUNK * 64:
            break
        grids = []
        weights = []
        for d, (z, w) in enumerate(nw):
            shape = [1] * ell
            shape[d] = sizes[d]
            grids.append(z.reshape(shape))
            weights.append(w.reshape(shape))
        if total <= _GRID_CHUNK or ell == 1:
            vals = f(*grids) * math.prod(weights)
            value = complex(vals.sum())
        else:
            # chunk along the first axis to bound memory
            value = 0j
            z0, w0 = nw[0]
            step = max(1, _GRID_CHUNK // max(1, total // sizes[0]))
            for a in range(0, sizes[0], step):
                sl = slice(a, a + step)
                g0 = grids[0][sl]
                w0s = weights[0][sl]
                vals = f(g0, *grids[1:]) * w0s
                for wd in weights[1:]:
                    vals = vals * wd
                value += complex(vals.sum())
        nodes_used = max(sizes)
        if prev is not None:
            err = abs(value - prev)
            if err < tol:
                return QuadratureResult(value, err, nodes_used)
        prev = value
    raise AccuracyError(
        f"circle quadrature did not stabilize below {tol}",
        best_value=value,
        error_estimate=abs(value - prev) if prev is not None and value is not prev else None,
    )


def _cluster_circles(targets, excluded, base_nodes=32):
    """Circles jointly enclosing ``targets`` and excluding ``excluded`` (reals).

    Single-linkage clustering: clusters whose tentative circles would touch
    are merged; each final circle is centered on its cluster's extent with
    radius extent/2 + (distance to nearest excluded point)/2.
    """
    targets = sorted(set(float(t) for t in targets))
    excluded = sorted(set(float(e) for e in excluded))
    if not targets:
        raise ConfigError("no target poles to enclose")
    for e in excluded:
        if any(abs(e - t) < 1e-13 * max(1.0, abs(t)) for t in targets):
            raise ConfigError(f"excluded pole {e} coincides with a target pole")
    clusters = [[t] for t in targets]

    def circle(cl):
        lo, hi = cl[0], cl[-1]
        dist = min((abs(e - lo) if e < lo else (e - hi) if e > hi else 0.0)
                   for e in excluded) if excluded else 1.0
        if dist == 0.0:
            raise ConfigError("an excluded pole lies inside a target cluster")
        return (lo + hi) / 2.0, (hi - lo) / 2.0 + dist / 2.0

    while True:
        merged = False
        i = 0
        while i + 1 < len(clusters):
            c1, r1 = circle(clusters[i])
            c2, r2 = circle(clusters[i + 1])
            if c2 - c1 < (r1 + r2) * 1.05:
                clusters[i] = clusters[i] + clusters[i + 1]
                del clusters[i + 1]
                merged = True
            else:
                i += 1
        if not merged:
            break
    return tuple(
        ContourSpec(complex(c), r, base_nodes) for c, r in (circle(cl) for cl in clusters)
    )


# ---------------------------------------------------------------------------
# vertex model q-moments
# ---------------------------------------------------------------------------


def _vertex_factor(spec, w):
    """prod_x (1 - (a/b) w)/(1 - w/b) * prod_y (1 - Q u w)/(1 - u w)."""
    Q = float(spec.Q)
    val = np.ones_like(w)
    for col in spec.columns:
        a_over_b = float(col.s_squared / col.s_xi)
        inv_b = float(1 / col.s_xi)
        val = val * (1.0 - a_over_b * w) / (1.0 - inv_b * w)
    for u in spec.u:
        uf = float(u)
        val = val * (1.0 - Q * uf * w) / (1.0 - uf * w)
    return val


def vertex_moment_contour(spec, ell, tol=1e-10, max_ell=DEFAULT_MAX_ELL, base_nodes=32):
    """E prod_{i=1..ell} (Q^h - Q^{i-1}) as an ell-fold contour integral.

    Q^{ell(ell-1)/2} times the integral of
    prod_{a<b} (w_a - w_b)/(w_a - Q w_b) * prod_i w_i^{-1} F(w_i)
    over small circles around the points 1/u_y; the poles 1/(s_x xi_x), the
    origin, and the Q-shifted targets Q/u_y stay outside.
    """
    if ell == 0:
        return 1.0
    if ell < 0:
        raise DomainError("ell must be nonnegative")
    if ell > max_ell:
        raise ResourceCapError(f"ell = {ell} above the cap {max_ell}")
    from .vertex import validate_vertex_spec

    problems = validate_vertex_spec(spec)
    if problems:
        raise DomainError("invalid spec: " + "; ".join(problems))
    Q = float(spec.Q)
    targets = [1.0 / float(u) for u in spec.u]
    excluded = [0.0]
    excluded += [float(1 / col.s_xi) for col in spec.columns]
    excluded += [Q * t for t in targets]
    circles = _cluster_circles(targets, excluded, base_nodes)

    def integrand(*ws):
        val = 1.0
        for w in ws:
            val = val * _vertex_factor(spec, w) / w
        for a, b in itertools.combinations(range(ell), 2):
            val = val * (ws[a] - ws[b]) / (ws[a] - Q * ws[b])
        return val

    res = circle_quadrature(integrand, [circles] * ell, tol)
    value = Q ** (ell * (ell - 1) // 2) * res.value
    if abs(value.imag) > max(tol, 10 * res.error_estimate):
        raise AccuracyError(
            f"imaginary residue {value.imag} above tolerance", best_value=value.real
        )
    return value.real


# ---------------------------------------------------------------------------
# Macdonald e_ell expectations
# ---------------------------------------------------------------------------


def _macdonald_factor(mspec, z):
    """prod_m (t z - x_m)/(z - x_m) * prod_j (1-a_j z)/(1-t a_j z) (1+q b_j z)/(1+b_j z)."""
    q, t = float(mspec.q), float(mspec.t)
    val = np.ones_like(z)
    for x in mspec.x:
        xf = float(x)
        val = val * (t * z - xf) / (z - xf)
    for a in mspec.rho2.alphas:
        af = float(a)
        val = val * (1.0 - af * z) / (1.0 - t * af * z)
    for b in mspec.rho2.betas:
        bf = float(b)
        val = val * (1.0 + q * bf * z) / (1.0 + bf * z)
    return val


def macdonald_moment_contour(
    mspec, ell, tol=1e-10, max_ell=DEFAULT_MAX_ELL, base_nodes=32
):
    """E e_ell(q^{lam_1} t^{n-1}, ..., q^{lam_n}) as an ell-fold integral.

    (1/ell!) (2 pi i)^{-ell} times the integral of
    det[1/(t z_a - z_b)] prod_i Phi(z_i) over small circles around the x_m;
    the poles 1/(t alpha_j), -1/beta_j, the origin and the t-shifted targets
    t x_m stay outside.
    """
    if ell == 0:
        return 1.0
    if ell < 0 or ell > mspec.n:
        raise DomainError(f"need 0 <= ell <= n, got ell={ell}")
    if ell > max_ell:
        raise ResourceCapError(f"ell = {ell} above the cap {max_ell}")
    t = float(mspec.t)
    targets = [float(x) for x in mspec.x]
    excluded = [0.0]
    excluded += [float(1 / (mspec.t * a)) for a in mspec.rho2.alphas]
    excluded += [float(-1 / b) for b in mspec.rho2.betas]
    excluded += [t * x for x in targets]
    circles = _cluster_circles(targets, excluded, base_nodes)

    def integrand(*zs):
        val = 0.0
        for perm in itertools.permutations(range(ell)):
            sign = (-1.0) ** sum(
                1
                for a, b in itertools.combinations(range(ell), 2)
                if perm[a] > perm[b]
            )
            term = sign
            for a in range(ell):
                term = term / (t * zs[a] - zs[perm[a]])
            val = val + term
        for z in zs:
            val = val * _macdonald_factor(mspec, z)
        return val

    res = circle_quadrature(integrand, [circles] * ell, tol)
    value = res.value / math.factorial(ell)
    if abs(value.imag) > max(tol, 10 * res.error_estimate):
        raise AccuracyError(
            f"imaginary residue {value.imag} above tolerance", best_value=value.real
        )
    return value.real


# ---------------------------------------------------------------------------
# Schur-measure correlation kernels (double contour integrals)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KernelModel:
    """Parameters of the two concrete Schur-measure kernels.

    family "meixner":    F(v) = (1 - sqrt(zeta)/v)^N / (1 - sqrt(zeta) v)^{M-1}
    family "krawtchouk": F(v) = (1 + sqrt(zeta) v)^{M-1} (1 - sqrt(zeta)/v)^N

    K(x, y) = (2 pi i)^{-2} oint oint F(z)/F(w) dz dw / ((z - w) z^{x+1} w^{-y})
    over |z| = r1 > 1 > r2 = |w|.  The integrand is singular at sqrt(zeta)
    and 1/sqrt(zeta) (tighter than the nominal zeta..1/zeta bounds), so the
    radii are placed midway: r1 = (1 + zeta^{-1/2})/2, r2 = (1 + zeta^{1/2})/2.
    """

    family: str
    M: int
    N: int
    zeta: float

    def __post_init__(self):
        if self.family not in ("meixner", "krawtchouk"):
            raise DomainError(f"unknown kernel family {self.family!r}")
        if not 0 < self.zeta < 1:
            raise DomainError(f"zeta must be in (0,1), got {self.zeta}")
        if self.M < 1 or self.N < 1:
            raise DomainError("M and N must be >= 1")

    def radii(self):
        r1 = 0.5 * (1.0 + self.zeta**-0.5)
        r2 = 0.5 * (1.0 + self.zeta**0.5)
        if not (self.zeta**0.5 < r2 < 1.0 < r1 < self.zeta**-0.5):
            raise ConfigError("kernel contour radii violate the separation bounds")
        return r1, r2

    def outer_factor(self, v):
        s = self.zeta**0.5
        if self.family == "meixner":
            return (1.0 - s / v) ** self.N / (1.0 - s * v) ** (self.M - 1)
        return (1.0 + s * v) ** (self.M - 1) * (1.0 - s / v) ** self.N


def kernel_matrix(model, xs, ys, tol=1e-10, base_nodes=64, max_levels=6):
    """K(x, y) on a grid of integer points, all pairs at once.

    With z^{-x} F(z) row vectors, w^{y+1}/F(w) column vectors and the Cauchy
    matrix 1/(z - w), the whole kernel block is two matrix products per
    quadrature level; levels double nodes until the block stabilizes.
    """
    xs = np.asarray(xs, dtype=np.int64)
    ys = np.asarray(ys, dtype=np.int64)
    r1, r2 = model.radii()
    prev = None
    for level in range(max_levels):
        n = base_nodes << level
        theta = 2.0 * np.pi * (np.arange(n) + 0.5) / n
        z = r1 * np.exp(1j * theta)
        w = r2 * np.exp(1j * theta)
        fz = model.outer_factor(z)
        fw = model.outer_factor(w)
        cauchy = 1.0 / (z[:, None] - w[None, :])
        u = fz[None, :] * z[None, :] ** (-xs[:, None])
        v = w[None, :] ** (ys[:, None] + 1) / fw[None, :]
        block = (u @ cauchy @ v.T).real / n**2
        if prev is not None and np.max(np.abs(block - prev)) < tol:
            return block
        prev = block
    raise AccuracyError(
        f"kernel quadrature did not stabilize below {tol}", best_value=prev
    )


def correlation_kernel(model, x, y, tol=1e-10, base_nodes=64):
    """One kernel entry K(x, y); see ``kernel_matrix`` for the quadrature."""
    return float(kernel_matrix(model, [x], [y], tol, base_nodes)[0, 0])
