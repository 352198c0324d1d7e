"""Determinantal layer: point configurations, gap probabilities, RSK samplers.

A partition lambda maps to the point configuration X(lambda) = {lambda_i - i}
in Z; its complement Y = Z \\ X is again determinantal with the kernel
1_{x=y} - K(x,y) (complementation), and -l(lambda) = min Y.  Gap
probabilities are finite determinants det[1 - K~] over {x, x-1, ...},
truncated at a depth where the complement kernel has decayed.

The two Schur measures handled here are sampled through RSK: a geometric
i.i.d. matrix with classical row insertion for s_lam(1^{M-1}) s_lam(1^N)
zeta^|lam| ("meixner"), and a Bernoulli(zeta/(1+zeta)) 0/1 matrix with dual
insertion for the transposed variant ("krawtchouk").  Both parameter choices
are validated against exact weight tables at desk scale in the test-suite.
"""

import bisect
from dataclasses import dataclass, field

import numpy as np

from .contour import KernelModel, kernel_matrix
from .errors import AccuracyError, DomainError
from .partitions import check_partition, conjugate

GAP_DEPTH_CAP = 512


@dataclass
class DiscreteKernel:
    """A correlation kernel on Z x Z with an optional fast block evaluator."""

    evaluate: object
    support_hint: tuple | None = None
    label: str = ""
    matrix: object = None
    _cache: dict = field(default_factory=dict)

    def __call__(self, x, y):
        key = (x, y)
        if key not in self._cache:
            self._cache[key] = float(self.evaluate(x, y))
        return self._cache[key]

    def block(self, xs, ys):
        if self.matrix is not None:
            return np.asarray(self.matrix(xs, ys), dtype=float)
        return np.array([[self(x, y) for y in ys] for x in xs])


def schur_measure_kernel(model, tol=1e-10):
    """The double-contour correlation kernel of a KernelModel as a DiscreteKernel."""

    def matrix(xs, ys):
        return kernel_matrix(model, xs, ys, tol)

    def evaluate(x, y):
        return kernel_matrix(model, [x], [y], tol)[0, 0]

    lo = -(model.N + model.M)
    return DiscreteKernel(
        evaluate=evaluate,
        support_hint=(lo, model.N + model.M),
        label=f"{model.family}(M={model.M},N={model.N},zeta={model.zeta})",
        matrix=matrix,
    )


def complement_kernel(K):
    """Kerov complementation: K~(x, y) = 1_{x=y} - K(x, y)."""

    def evaluate(x, y):
        return (1.0 if x == y else 0.0) - K(x, y)

    def matrix(xs, ys):
        block = -K.block(xs, ys)
        eye = np.equal.outer(np.asarray(xs), np.asarray(ys)).astype(float)
        return block + eye

    return DiscreteKernel(
        evaluate=evaluate,
        support_hint=K.support_hint,
        label=f"complement[{K.label}]",
        matrix=matrix,
    )


def point_configuration(lam, n_cutoff):
    """{lambda_i - i : 1 <= i <= n_cutoff} as a set of integers."""
    lam = check_partition(lam)
    if n_cutoff < len(lam):
        raise DomainError(f"cutoff {n_cutoff} below the partition length {len(lam)}")
    return {(lam[i - 1] if i <= len(lam) else 0) - i for i in range(1, n_cutoff + 1)}


def complement_in_window(lam, lo, hi):
    """Y(lambda) = Z \\ X(lambda) intersected with [lo, hi]."""
    cutoff = max(len(lam), -lo if lo < 0 else 0) + 1
    X = point_configuration(lam, cutoff)
    return sorted(x for x in range(lo, hi + 1) if x not in X)


def discrete_gap_probability(K_tilde, x, depth=None, tol=1e-10):
    """P{no K~-points at x, x-1, ...} = det[delta - K~(x-a, x-b)].

    The semi-infinite determinant is truncated at ``depth`` and the depth is
    doubled until two successive values agree below tol.  The value is
    clamped to [0, 1] when it strays within tol of the boundary.
    """
    if depth is None:
        depth = 8
        while depth < GAP_DEPTH_CAP and abs(K_tilde(x - depth, x - depth)) > tol * 1e-2:
            depth *= 2
    if depth < 1:
        raise DomainError("depth must be >= 1")
    prev = None
    while depth <= GAP_DEPTH_CAP:
        sites = [x - a for a in range(depth)]
        mat = np.eye(depth) - K_tilde.block(sites, sites)
        val = float(np.linalg.det(mat))
        if prev is not None and abs(val - prev) < tol:
            if val < -tol or val > 1.0 + tol:
                raise AccuracyError(
                    f"gap probability {val} outside [0,1]", best_value=val
                )
            return min(max(val, 0.0), 1.0)
        prev = val
        depth *= 2
    raise AccuracyError(
        f"gap determinant did not stabilize below {tol}", best_value=prev
    )


# ---------------------------------------------------------------------------
# RSK
# ---------------------------------------------------------------------------


def _insert_row(tableau, letter, dual):
    """Insert one letter; classical bumps the leftmost entry > letter, dual
    the leftmost >= letter.  Returns nothing; mutates the tableau."""
    row = 0
    while True:
        if row == len(tableau):
            tableau.append([letter])
            return
        r = tableau[row]
        pos = bisect.bisect_left(r, letter) if dual else bisect.bisect_right(r, letter)
        if pos == len(r):
            r.append(letter)
            return
        letter, r[pos] = r[pos], letter
        row += 1


def rsk_shape(W, mode="row-insertion"):
    """Shape of the RSK insertion tableau of a nonnegative integer matrix.

    mode "row-insertion" is classical RSK; mode "dual" is the 0/1-matrix
    variant where equal letters bump each other (column-strict rows become
    row-strict).  The biword reads the matrix row by row.
    """
    W = np.asarray(W)
    if W.ndim != 2:
        raise DomainError("RSK expects a matrix")
    dual = mode == "dual"
    if mode not in ("row-insertion", "dual"):
        raise DomainError(f"unknown RSK mode {mode!r}")
    if (W < 0).any():
        raise DomainError("RSK expects nonnegative entries")
    if dual and (W > 1).any():
        raise DomainError("dual RSK expects a 0/1 matrix")
    tableau = []
    for i in range(W.shape[0]):
        for j in range(W.shape[1]):
            for _ in range(int(W[i, j])):
                _insert_row(tableau, j, dual)
    return tuple(len(r) for r in tableau)


def sample_schur_measure(M, N, zeta, variant="meixner", rng=None):
    """One partition from the Schur measure of the given variant.

    meixner: (M-1) x N i.i.d. Geom(zeta) entries (P{k} = (1-zeta) zeta^k),
    classical RSK shape; the Cauchy identity with all variables sqrt(zeta)
    makes the shape law proportional to s_lam(1^{M-1}) s_lam(1^N) zeta^|lam|.

    krawtchouk: i.i.d. Bernoulli(zeta/(1+zeta)) entries, dual RSK, and the
    *conjugate* of the insertion shape is returned, matching the dual Cauchy
    identity law s_lam'(1^{M-1}) s_lam(1^N) zeta^|lam| (so l(lam) <= N).
    """
    if not 0 < zeta < 1:
        raise DomainError(f"zeta must be in (0,1), got {zeta}")
    if rng is None or not isinstance(rng, np.random.Generator):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(rng)))
    rows, cols = M - 1, N
    if variant == "meixner":
        W = rng.geometric(1.0 - zeta, size=(rows, cols)) - 1
        return rsk_shape(W, "row-insertion")
    if variant == "krawtchouk":
        W = (rng.random((rows, cols)) < zeta / (1.0 + zeta)).astype(np.int64)
        return conjugate(rsk_shape(W, "dual"))
    raise DomainError(f"unknown variant {variant!r}")


@dataclass(frozen=True)
class SampleBatch:
    """Partitions sampled from one model, reproducible from (seed, tag)."""

    partitions: tuple
    seed: int
    model: KernelModel


def sample_schur_batch(model, n_samples, seed):
    """n_samples partitions with per-sample substreams (worker independent)."""
    out = []
    for i in range(n_samples):
        ss = np.random.SeedSequence(seed, spawn_key=(i,))
        rng = np.random.Generator(np.random.PCG64(ss))
        out.append(
            sample_schur_measure(model.M, model.N, model.zeta, model.family, rng)
        )
    return SampleBatch(tuple(out), seed, model)
