"""Stochastic higher spin six vertex model in a quadrant.

The model lives on Z_{>=1}^2 with up-right paths entering every row from the
left (step boundary).  A vertex in column x, row y maps inputs
(i1 = paths from below, j1 = path from the left in {0,1}) to outputs
(i2, j2) with i1 + j1 = i2 + j2, using the stochastic weights

    P((i1,0)->(i1,0))   = (1 - Q^i1 b u) / (1 - b u)
    P((i1,0)->(i1-1,1)) = (Q^i1 - 1) b u / (1 - b u)
    P((i1,1)->(i1,1))   = (Q^i1 a - b u) / (1 - b u)
    P((i1,1)->(i1+1,0)) = (1 - Q^i1 a)   / (1 - b u)

written in terms of a = s^2 and b = s*xi for the column's spin parameters
(s, xi) and the row rapidity u.  Only (s^2, s*xi, sign s) ever enter the
formulas, which keeps all enumeration arithmetic exactly rational even when
s = Q^{-m/2} is irrational.  Columns with s = Q^{-m/2} hold at most m paths
per vertical edge; columns with s in (-1, 0) are unbounded.

The height h(m, y) counts paths passing through or to the right of (m, y);
with the step boundary it equals y minus the number of paths crossing
vertical edges strictly left of column m at level y -> y+1.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, ResourceCapError
from .exact import as_fraction

DEFAULT_STATE_CAP = 2_000_000


@dataclass(frozen=True)
class ColumnParams:
    """One column of the quadrant: a = s^2, b = s*xi, sign(s), capacity.

    capacity is a positive integer for s = Q^{-m/2} columns (at most m paths
    per vertical edge) and None for unbounded s in (-1, 0) columns.
    """

    s_squared: Fraction
    s_xi: Fraction
    s_sign: int
    capacity: int | None = None

    @staticmethod
    def make(s_squared, s_xi, s_sign, capacity=None):
        return ColumnParams(
            as_fraction(s_squared), as_fraction(s_xi), int(s_sign), capacity
        )


@dataclass(frozen=True)
class VertexSpec:
    """Quadrant specification: Q, lattice size, column data, row rapidities."""

    Q: Fraction
    M: int
    N: int
    columns: tuple
    u: tuple

    @staticmethod
    def make(Q, M, N, columns, u):
        Q = as_fraction(Q)
        columns = tuple(columns)
        u = tuple(as_fraction(v) for v in u)
        if len(columns) != M - 1:
            raise DomainError(f"expected {M - 1} columns, got {len(columns)}")
        if len(u) != N:
            raise DomainError(f"expected {N} rapidities, got {len(u)}")
        return VertexSpec(Q, int(M), int(N), columns, u)


@dataclass(frozen=True)
class HeightField:
    """One sampled path configuration restricted to the (M-1) x N rectangle.

    v[x-1, y-1] is the number of paths on the vertical edge (x,y)->(x,y+1);
    j_exit[y-1] is the horizontal output of the last column in row y.
    """

    M: int
    N: int
    v: np.ndarray
    j_exit: np.ndarray


@dataclass(frozen=True)
class HeightDistribution:
    """Exact law of h(M, N): values[k] = P{h = k}, k = 0..N, Fractions."""

    values: tuple


def validate_vertex_spec(spec):
    """Return a list of violated-constraint descriptions (empty iff valid)."""
    report = []
    if not (0 < spec.Q < 1):
        report.append(f"Q must lie in (0,1), got {spec.Q}")
    if spec.M < 1 or spec.N < 1:
        report.append(f"M and N must be >= 1, got M={spec.M}, N={spec.N}")
    for y, uy in enumerate(spec.u, start=1):
        if uy <= 0:
            report.append(f"u must be positive: u_{y} = {uy}")
    for x, col in enumerate(spec.columns, start=1):
        if col.s_squared <= 0:
            report.append(f"s^2 must be positive at column {x}")
            continue
        if col.s_sign not in (+1, -1):
            report.append(f"sign must be +1 or -1 at column {x}")
            continue
        if (col.s_xi > 0) != (col.s_sign > 0) or col.s_xi == 0:
            report.append(f"sign(s*xi) must equal sign(s) at column {x}")
        if col.s_sign > 0:
            m = col.capacity
            if not (isinstance(m, int) and m >= 1):
                report.append(f"positive-s column {x} needs an integer capacity >= 1")
            elif col.s_squared != spec.Q ** (-m):
                report.append(
                    f"s^2 = Q^-m fails at column {x}: {col.s_squared} != Q^-{m}"
                )
            # xi*u > s (multiplied through by s > 0), once per distinct u.
            for uy in _distinct_by_identity(spec.u)[0]:
                if col.s_xi * uy <= col.s_squared:
                    y = next(i for i, v in enumerate(spec.u, start=1) if v == uy)
                    report.append(f"xi*u > s fails at (x={x}, y={y})")
        else:
            if not col.s_squared < 1:
                report.append(
                    f"negative-s column {x} needs s^2 in (0,1), got {col.s_squared}"
                )
            if col.capacity is not None:
                report.append(f"negative-s column {x} must be uncapped")
    if not report:
        # Belt and braces: every weight of every reachable input is >= 0,
        # checked once per distinct (column, rapidity) pair.
        for col, uy in _distinct_pairs(spec):
            imax = _column_imax(col, spec.N)
            for i1 in range(imax + 1):
                for (j1, i2, j2) in ((0, i1, 0), (0, i1 - 1, 1), (1, i1, 1), (1, i1 + 1, 0)):
                    if i2 < 0:
                        continue
                    w = vertex_weight(i1, j1, i2, j2, col, uy, spec.Q)
                    if w < 0:
                        report.append(
                            f"negative weight {w} for ({i1},{j1})->({i2},{j2})"
                        )
    return report


def _distinct_by_identity(items):
    """Dedupe by object identity first (cheap), then by value."""
    by_id = {}
    for i, obj in enumerate(items):
        if id(obj) not in by_id:
            by_id[id(obj)] = (i, obj)
    distinct = []
    index_of = {}
    positions = {}
    for i, obj in sorted(by_id.values()):
        if obj in index_of:
            positions[id(obj)] = index_of[obj]
        else:
            index_of[obj] = len(distinct)
            positions[id(obj)] = len(distinct)
            distinct.append(obj)
    return distinct, [positions[id(obj)] for obj in items]


def _distinct_pairs(spec):
    cols, _ = _distinct_by_identity(spec.columns)
    us, _ = _distinct_by_identity(spec.u)
    return [(c, u) for c in cols for u in us]


def _column_imax(col, N):
    return N if col.capacity is None else min(col.capacity, N)


def vertex_weight(i1, j1, i2, j2, col, u_y, Q):
    """Exact transition weight of (i1, j1) -> (i2, j2) at one vertex.

    Returns 0 when path conservation i1 + j1 = i2 + j2 fails; raises
    DomainError when i1 exceeds the column capacity.
    """
    if i1 < 0 or i2 < 0 or j1 not in (0, 1) or j2 not in (0, 1):
        raise DomainError(f"bad arrow counts ({i1},{j1})->({i2},{j2})")
    if col.capacity is not None and i1 > col.capacity:
        raise DomainError(f"i1 = {i1} exceeds column capacity {col.capacity}")
    if i1 + j1 != i2 + j2:
        return Fraction(0)
    Q = as_fraction(Q)
    u = as_fraction(u_y)
    a = col.s_squared
    bu = col.s_xi * u
    denom = 1 - bu
    if j1 == 0 and j2 == 0:
        return (1 - Q**i1 * bu) / denom
    if j1 == 0 and j2 == 1:
        return (Q**i1 - 1) * bu / denom
    if j1 == 1 and j2 == 1:
        return (Q**i1 * a - bu) / denom
    return (1 - Q**i1 * a) / denom


def _threshold_tables(col, u, Q, imax):
    """Float tables T0[i] = P(j=0 stays 0), T1[i] = P(j=1 stays 1), i = 0..imax."""
    a = col.s_squared
    bu = col.s_xi * as_fraction(u)
    denom = 1 - bu
    Qf = as_fraction(Q)
    t0 = np.empty(imax + 1)
    t1 = np.empty(imax + 1)
    qi = Fraction(1)
    for i in range(imax + 1):
        t0[i] = float((1 - qi * bu) / denom)
        t1[i] = float((qi * a - bu) / denom)
        qi *= Qf
    return t0, t1


class _RowTables:
    """Per-column, per-row threshold tables, shared across equal (column, u)."""

    def __init__(self, spec):
        self.M, self.N = spec.M, spec.N
        cols, col_idx = _distinct_by_identity(spec.columns)
        us, u_idx = _distinct_by_identity(spec.u)
        cache = {}
        for ci, col in enumerate(cols):
            imax = _column_imax(col, spec.N)
            for ui, uy in enumerate(us):
                cache[(ci, ui)] = _threshold_tables(col, uy, spec.Q, imax)
        self.t0 = [
            [cache[(col_idx[x], u_idx[y])][0] for y in range(spec.N)]
            for x in range(spec.M - 1)
        ]
        self.t1 = [
            [cache[(col_idx[x], u_idx[y])][1] for y in range(spec.N)]
            for x in range(spec.M - 1)
        ]


def _as_generator(rng):
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(rng)))


def sample_generator(seed, index):
    """The per-sample substream: fixed function of (master seed, sample index)."""
    ss = np.random.SeedSequence(seed, spawn_key=(index,))
    return np.random.Generator(np.random.PCG64(ss))


def sample_height_field(spec, rng):
    """Draw one path configuration by the row-by-row Markov sweep.

    Row y injects a path at the left, then columns x = 1..M-1 are updated
    with the vertex weights; this is distribution-equivalent to building the
    measure along anti-diagonals because each vertex depends only on its
    bottom and left inputs.  Exactly one uniform is consumed per vertex, in
    row-major order, so a fixed seed reproduces the field bit for bit.
    """
    problems = validate_vertex_spec(spec)
    if problems:
        raise DomainError("invalid spec: " + "; ".join(problems))
    rng = _as_generator(rng)
    tables = _RowTables(spec)
    ncols = spec.M - 1
    v = np.zeros((ncols, spec.N), dtype=np.int64)
    j_exit = np.zeros(spec.N, dtype=np.int64)
    occ = [0] * ncols
    for y in range(spec.N):
        uniforms = rng.random(ncols)
        j = 1
        for x in range(ncols):
            i1 = occ[x]
            if j == 0:
                if uniforms[x] >= tables.t0[x][y][i1]:
                    occ[x] = i1 - 1
                    j = 1
            else:
                if uniforms[x] >= tables.t1[x][y][i1]:
                    occ[x] = i1 + 1
                    j = 0
        v[:, y] = occ
        j_exit[y] = j
    return HeightField(spec.M, spec.N, v, j_exit)


def _sample_heights_chunk(spec, tables, seed, start, stop):
    ncols = spec.M - 1
    B = stop - start
    gens = [sample_generator(seed, i) for i in range(start, stop)]
    occ = np.zeros((B, ncols), dtype=np.int64)
    j = np.ones(B, dtype=np.int64)
    uniforms = np.empty((B, ncols))
    for y in range(spec.N):
        for b, g in enumerate(gens):
            uniforms[b] = g.random(ncols)
        j[:] = 1
        for x in range(ncols):
            i1 = occ[:, x]
            thresh = np.where(j, tables.t1[x][y][i1], tables.t0[x][y][i1])
            flip = (uniforms[:, x] >= thresh).astype(np.int64)
            # j = 1 pushes the occupation up on a flip, j = 0 releases it down
            occ[:, x] = i1 + (2 * j - 1) * flip
            j ^= flip
    return spec.N - occ.sum(axis=1)


def sample_heights_batch(spec, n_samples, seed, chunk_size=4096, workers=1):
    """Heights h(M,N) for n_samples independent fields.

    Sample index i always uses the substream SeedSequence(seed, spawn_key=(i,)),
    and the chunk layout is a function of (n_samples, chunk_size) alone, so the
    result is identical for any worker count (workers only map over chunks).
    """
    problems = validate_vertex_spec(spec)
    if problems:
        raise DomainError("invalid spec: " + "; ".join(problems))
    tables = _RowTables(spec)
    bounds = list(range(0, n_samples, chunk_size)) + [n_samples]
    chunks = list(zip(bounds[:-1], bounds[1:]))
    if workers > 1 and len(chunks) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(
                pool.map(
                    lambda se: _sample_heights_chunk(spec, tables, seed, *se), chunks
                )
            )
    else:
        parts = [_sample_heights_chunk(spec, tables, seed, a, b) for a, b in chunks]
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def height(field, m, y):
    """h(m, y) = y - sum of vertical crossings left of column m at level y."""
    if not (1 <= m <= field.M) or not (1 <= y <= field.N):
        raise DomainError(f"height index out of range: (m={m}, y={y})")
    return int(y - field.v[: m - 1, y - 1].sum())


def _count_states(caps, N):
    ways = [1] + [0] * N
    for c in caps:
        new = [0] * (N + 1)
        for s in range(N + 1):
            if ways[s]:
                for add in range(0, min(c, N - s) + 1):
                    new[s + add] += ways[s]
        ways = new
    return sum(ways)


def exact_height_distribution(spec, state_cap=DEFAULT_STATE_CAP):
    """Exact rational law of h(M, N) by dynamic programming over occupations.

    The state is the vector of column occupations; one row update injects a
    path at the left and sweeps the columns with the exact weights.  The
    number of admissible states must stay below ``state_cap``.
    """
    problems = validate_vertex_spec(spec)
    if problems:
        raise DomainError("invalid spec: " + "; ".join(problems))
    ncols = spec.M - 1
    caps = [_column_imax(col, spec.N) for col in spec.columns]
    n_states = _count_states(caps, spec.N)
    if n_states > state_cap:
        raise ResourceCapError(
            f"exact enumeration needs {n_states} states, above the cap {state_cap}"
        )
    Q = spec.Q
    dist = {(0,) * ncols: Fraction(1)}
    for y in range(spec.N):
        uy = spec.u[y]
        layer = {(state, 1): p for state, p in dist.items()}
        for x in range(ncols):
            col = spec.columns[x]
            a = col.s_squared
            bu = col.s_xi * uy
            denom = 1 - bu
            new = {}

            def put(key, val):
                if val:
                    new[key] = new.get(key, Fraction(0)) + val

            for (state, j), p in layer.items():
                i1 = state[x]
                qi = Q**i1
                if j == 0:
                    put((state, 0), p * (1 - qi * bu) / denom)
                    if i1 >= 1:
                        put(
                            (state[:x] + (i1 - 1,) + state[x + 1 :], 1),
                            p * (qi - 1) * bu / denom,
                        )
                else:
                    put((state, 1), p * (qi * a - bu) / denom)
                    w_up = p * (1 - qi * a) / denom
                    if w_up:
                        put((state[:x] + (i1 + 1,) + state[x + 1 :], 0), w_up)
            layer = new
        dist = {}
        for (state, _j), p in layer.items():
            dist[state] = dist.get(state, Fraction(0)) + p
    values = [Fraction(0)] * (spec.N + 1)
    for state, p in dist.items():
        values[spec.N - sum(state)] += p
    total = sum(values)
    if total != 1:
        raise AssertionError(f"probability mass {total} != 1; enumeration bug")
    return HeightDistribution(tuple(values))


def qmoment_exact(dist, Q, ell):
    """E prod_{i=1..ell} (Q^h - Q^{i-1}), exact; the empty product is 1."""
    if ell < 0:
        raise DomainError("ell must be nonnegative")
    Q = as_fraction(Q)
    total = Fraction(0)
    for k, p in enumerate(dist.values):
        if p == 0:
            continue
        term = Fraction(1)
        for i in range(1, ell + 1):
            term *= Q**k - Q ** (i - 1)
        total += p * term
    return total


def qlaplace_polynomial_exact(dist, Q, zeta):
    """E prod_{i=0..h-1} (1 + zeta Q^i), exact for rational zeta.

    This is the telescoped form of E prod_{i>=0} (1+zeta Q^i)/(1+zeta Q^{h+i}),
    a polynomial of degree N in zeta.
    """
    Q = as_fraction(Q)
    zeta = as_fraction(zeta)
    total = Fraction(0)
    for k, p in enumerate(dist.values):
        if p == 0:
            continue
        term = Fraction(1)
        for i in range(k):
            term *= 1 + zeta * Q**i
        total += p * term
    return total


def qlaplace_exact(dist, Q, zeta, tol=1e-12):
    """E prod_{i>=0} 1/(1 + zeta Q^{h+i}) with a certified product truncation.

    The dropped log-tail after I factors is below zeta Q^{k+I} / (1 - Q), so
    each k-term is computed with that bound under tol/2; the result then
    carries absolute error < tol.  Requires zeta > 0 (the transform has poles
    at zeta in -Q^{Z<=0}).
    """
    if zeta <= 0:
        raise DomainError(f"zeta must be positive, got {zeta}")
    Q = as_fraction(Q)
    Qf = float(Q)
    zf = float(zeta)
    total = 0.0
    for k, p in enumerate(dist.values):
        if p == 0:
            continue
        prod = 1.0
        factor = zf * Qf**k
        while factor / (1.0 - Qf) >= 0.5 * tol:
            prod /= 1.0 + factor
            factor *= Qf
        total += float(p) * prod
    return total
