"""Periodic cell problem: correctors and the effective (Albanese) tensor.

The fundamental domain [o, o+1)^n is discretized by a uniform grid whose
identifications follow the lattice wrap maps; on the Heisenberg group the
wraps twist the central coordinate, and twisted evaluation points are
resolved by linear interpolation along the central axes.  Everything runs
through one weak-form assembly: with D_m the (wrapped) central-difference
matrices and C(x) = w(x) sqrt(det g) F g^{-1} F^T the coordinate-basis
coefficient field,

    A = sum_{m,m'} D_m^T diag(C_mm') D_m'

is symmetric positive semidefinite by construction, with nullspace the
constants.  The corrector chi^i solves A chi = r_i where r_i applies the
same form to the coordinate function x_i through its exact frame gradient.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .algebra import left_invariant_frame
from .errors import (
    InconsistentFormulas,
    ResolutionOutOfRange,
    SingularSystem,
    SolverDiverged,
    UnsupportedStep,
)
from .metric import wrap_to_domain

RESOLUTION_RANGE = (8, 256)
SNAP_TOL = 1e-9
CG_TOL = 1e-10


@dataclass(frozen=True)
class PeriodicGrid:
    algebra: object
    resolution: tuple
    origin: np.ndarray
    nodes: np.ndarray  # (m, n) coordinates, C-order over the index grid
    weight: float      # coordinate cell volume

    @property
    def shape(self):
        return self.resolution

    @property
    def size(self):
        return self.nodes.shape[0]

    @property
    def spacing(self):
        return tuple(1.0 / N for N in self.resolution)


def build_periodic_grid(algebra, resolution, origin=None):
    """Uniform grid on the box fundamental domain with lattice wraps."""
    if algebra.step > 2:
        raise UnsupportedStep("periodic grids require a step <= 2 group law")
    resolution = tuple(int(N) for N in resolution)
    if len(resolution) != algebra.dim:
        raise ResolutionOutOfRange(
            f"need {algebra.dim} axis resolutions, got {len(resolution)}"
        )
    lo, hi = RESOLUTION_RANGE
    if any(not lo <= N <= hi for N in resolution):
        raise ResolutionOutOfRange(f"axis resolutions must lie in [{lo}, {hi}]")
    origin = np.zeros(algebra.dim) if origin is None else np.asarray(origin, float)
    axes = [origin[a] + np.arange(N) / N for a, N in enumerate(resolution)]
    mesh = np.meshgrid(*axes, indexing="ij")
    nodes = np.stack([m.ravel() for m in mesh], axis=-1)
    nodes.flags.writeable = False
    return PeriodicGrid(
        algebra=algebra,
        resolution=resolution,
        origin=origin,
        nodes=nodes,
        weight=float(np.prod([1.0 / N for N in resolution])),
    )


def sample_matrix(grid, points):
    """Sparse S with (S u)[p] ~ u(points[p]) by wrapped interpolation.

    Points are reduced to the fundamental domain; coordinates that land
    between nodes (the twisted central shifts) interpolate linearly.
    """
    alg = grid.algebra
    res = grid.resolution
    wrapped = wrap_to_domain(alg, points, origin=grid.origin)
    m = wrapped.shape[0]
    fidx = (wrapped - grid.origin[None, :]) * np.asarray(res, float)[None, :]
    base = np.floor(fidx + SNAP_TOL).astype(np.int64)
    frac = fidx - base
    frac[np.abs(frac) < SNAP_TOL] = 0.0
    base = base % np.asarray(res)[None, :]

    strides = np.ones(len(res), dtype=np.int64)
    for a in range(len(res) - 2, -1, -1):
        strides[a] = strides[a + 1] * res[a + 1]

    # entries are (point row, interpolation weight, partial flat index);
    # each axis splits entries that interpolate into a lo / hi corner pair
    rows = np.arange(m)
    vals = np.ones(m)
    flats = np.zeros(m, dtype=np.int64)
    for a in range(len(res)):
        f = frac[:, a]
        lo = base[:, a]
        hi = (lo + 1) % res[a]
        split = f[rows] > 0
        lo_vals = vals * np.where(split, 1.0 - f[rows], 1.0)
        lo_flats = flats + lo[rows] * strides[a]
        if np.any(split):
            hi_rows = rows[split]
            hi_vals = vals[split] * f[hi_rows]
            hi_flats = flats[split] + hi[hi_rows] * strides[a]
            rows = np.concatenate([rows, hi_rows])
            vals = np.concatenate([lo_vals, hi_vals])
            flats = np.concatenate([lo_flats, hi_flats])
        else:
            vals = lo_vals
            flats = lo_flats
    keep = vals != 0
    return sp.csr_matrix((vals[keep], (rows[keep], flats[keep])), shape=(m, grid.size))


def partial_derivative_matrices(grid):
    """Wrapped central-difference matrices D_m, one per coordinate axis."""
    mats = []
    for a, N in enumerate(grid.resolution):
        h = 1.0 / N
        step = np.zeros(grid.algebra.dim)
        step[a] = h
        s_plus = sample_matrix(grid, grid.nodes + step[None, :])
        s_minus = sample_matrix(grid, grid.nodes - step[None, :])
        mats.append(((s_plus - s_minus) * (0.5 / h)).tocsr())
    return mats


def assemble_divergence_form(deriv_mats, coeff):
    """A = sum_{m,m'} D_m^T diag(C[:, m, m']) D_m' (symmetric PSD)."""
    n = len(deriv_mats)
    A = None
    for m in range(n):
        for mp in range(m, n):
            c = coeff[:, m, mp]
            if not np.any(c):
                continue
            term = deriv_mats[m].T @ sp.diags(c) @ deriv_mats[mp]
            if mp != m:
                term = term + term.T
            A = term if A is None else A + term
    if A is None:
        raise SingularSystem("coefficient field is identically zero")
    return A.tocsr()


def _metric_data(field, grid):
    """Per-node inverse metric, frame, weights and coefficient field."""
    g = field.evaluate(grid.nodes)
    ginv = np.linalg.inv(g)
    det = np.linalg.det(g)
    F = left_invariant_frame(grid.algebra, grid.nodes)
    mu = grid.weight * np.sqrt(det)  # quadrature weight of d(mu_g)
    coeff = np.einsum("pmk,pkl,pnl->pmn", F, ginv, F) * mu[:, None, None]
    return g, ginv, det, F, mu, coeff


def conjugate_gradient(A, b, tol=CG_TOL, maxiter=None, deflate_constants=True):
    """Jacobi-preconditioned CG with the constant nullspace projected out."""
    n = A.shape[0]
    diag = A.diagonal()
    if np.any(diag <= 0):
        raise SingularSystem("operator diagonal is not strictly positive")
    inv_diag = 1.0 / diag

    def project(v):
        if deflate_constants:
            return v - v.mean()
        return v

    b = project(np.asarray(b, float))
    bnorm = np.linalg.norm(b)
    if bnorm <= 1e-13 * np.max(diag) * np.sqrt(n):
        # right-hand side is numerically zero (constant-coefficient case)
        return np.zeros(n), 0.0, 0
    maxiter = maxiter or max(2000, 20 * int(np.sqrt(n)) ** 2)
    x = np.zeros(n)
    r = b.copy()
    z = project(inv_diag * r)
    p = z.copy()
    rz = r @ z
    for it in range(1, maxiter + 1):
        Ap = A @ p
        alpha = rz / (p @ Ap)
        x += alpha * p
        r -= alpha * Ap
        res = np.linalg.norm(r) / bnorm
        if res <= tol:
            return project(x), res, it
        z = project(inv_diag * r)
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise SolverDiverged(res, maxiter)


@dataclass(frozen=True)
class CorrectorSolution:
    grid: PeriodicGrid
    field: object
    chi: np.ndarray        # (d1, nodes)
    residuals: tuple
    means: tuple
    frame_gradients: np.ndarray  # (d1, n, nodes): X_k eta_i per node
    _cache: dict

    @property
    def d1(self):
        return self.chi.shape[0]


def solve_correctors(field, grid, tol=CG_TOL):
    """Periodic correctors chi^i (first layer), zero mu_g-mean."""
    if field.algebra is not grid.algebra and field.algebra.name != grid.algebra.name:
        raise ValueError("metric and grid algebras differ")
    derivs = partial_derivative_matrices(grid)
    g, ginv, det, F, mu, coeff = _metric_data(field, grid)
    A = assemble_divergence_form(derivs, coeff)
    d1 = grid.algebra.d1
    n = grid.algebra.dim

    chis, residuals, means, grads = [], [], [], []
    total_mu = mu.sum()
    for i in range(d1):
        rhs = np.zeros(grid.size)
        for m in range(n):
            rhs += derivs[m].T @ coeff[:, m, i]
        chi, res, _ = conjugate_gradient(A, rhs, tol=tol)
        chi = chi - (mu @ chi) / total_mu
        chis.append(chi)
        residuals.append(res)
        means.append(float(mu @ chi) / total_mu)
        # frame components X_k eta_i = X_k chi^i - delta_ik (first-layer i)
        dchi = np.stack([derivs[m] @ chi for m in range(n)], axis=0)
        xk_chi = np.einsum("pmk,mp->kp", F, dchi)
        xk_chi[i, :] -= 1.0
        grads.append(xk_chi)

    return CorrectorSolution(
        grid=grid,
        field=field,
        chi=np.stack(chis, axis=0),
        residuals=tuple(residuals),
        means=tuple(means),
        frame_gradients=np.stack(grads, axis=0),
        _cache={"ginv": ginv, "mu": mu},
    )


@dataclass(frozen=True)
class AlbaneseTensor:
    q: np.ndarray
    q_gram: np.ndarray
    provenance: dict

    @property
    def dual(self):
        """Matrix of the induced norm on first-layer homology classes."""
        return np.linalg.inv(self.q)


def albanese_tensor(field, sol, consistency_tol=1e-6):
    """Effective tensor q^{ij}, cross-validated against the Gram form."""
    grid = sol.grid
    ginv = sol._cache["ginv"]
    mu = sol._cache["mu"]
    vol = mu.sum()
    d1 = sol.d1

    # direct formula: (1/Vol) integral of g^{ij} - g^{ik} X_k chi^j
    q_direct = np.empty((d1, d1))
    for i in range(d1):
        for j in range(d1):
            xk_chi_j = sol.frame_gradients[j].copy()
            xk_chi_j[j, :] += 1.0  # back to X_k chi^j from X_k eta_j
            integrand = ginv[:, i, j] - np.einsum("pk,kp->p", ginv[:, i, :], xk_chi_j)
            q_direct[i, j] = (mu @ integrand) / vol

    # Gram of the harmonic forms d eta_i
    q_gram = np.empty((d1, d1))
    for i in range(d1):
        for j in range(i, d1):
            val = (
                mu
                @ np.einsum(
                    "kp,pkl,lp->p", sol.frame_gradients[i], ginv, sol.frame_gradients[j]
                )
            ) / vol
            q_gram[i, j] = q_gram[j, i] = val

    scale = np.linalg.norm(q_gram)
    if np.linalg.norm(q_direct - q_gram) > consistency_tol * scale:
        raise InconsistentFormulas(
            f"direct and Gram tensors differ by "
            f"{np.linalg.norm(q_direct - q_gram) / scale:.3e} (rel)"
        )
    q = 0.5 * (q_direct + q_direct.T)
    return AlbaneseTensor(
        q=q,
        q_gram=q_gram,
        provenance={
            "resolution": grid.resolution,
            "residuals": sol.residuals,
            "symmetry_defect": float(
                np.max(np.abs(q_direct - q_direct.T)) / max(scale, 1e-300)
            ),
        },
    )


def harmonic_length_field(field, sol):
    """Pointwise g-norms of the harmonic forms d eta_i and their variances.

    Returns (values, variances): values[i] is per-node |d eta_i|_g, and
    variances[i] the mu_g-weighted variance; near-zero variance flags the
    constant-length (rigidity) case.
    """
    ginv = sol._cache["ginv"]
    mu = sol._cache["mu"]
    total = mu.sum()
    values, variances = [], []
    for i in range(sol.d1):
        sq = np.einsum("kp,pkl,lp->p", sol.frame_gradients[i], ginv, sol.frame_gradients[i])
        v = np.sqrt(np.maximum(sq, 0.0))
        mean = (mu @ v) / total
        var = (mu @ (v - mean) ** 2) / total
        values.append(v)
        variances.append(float(var))
    return np.stack(values, axis=0), tuple(variances)


def norm_comparison(field, sol, samples=32, rng=None, tol=1e-9):
    """Pairs (|alpha|_2, sup |alpha|) for random unit combinations of d eta_i.

    |alpha|_2 is the normalized L2 norm (so |d eta_i|_2^2 = q^{ii}); the sup
    of the pointwise g-norm dominates it for every harmonic form.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    ginv = sol._cache["ginv"]
    mu = sol._cache["mu"]
    vol = mu.sum()
    d1 = sol.d1
    out = []
    for _ in range(int(samples)):
        c = rng.normal(size=d1)
        c /= np.linalg.norm(c)
        comp = np.einsum("i,ikp->kp", c, sol.frame_gradients)
        sq = np.einsum("kp,pkl,lp->p", comp, ginv, comp)
        l2 = float(np.sqrt(max((mu @ sq) / vol, 0.0)))
        sup = float(np.sqrt(max(sq.max(), 0.0)))
        out.append((l2, sup))
    return out
