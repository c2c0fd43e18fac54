"""Periodic Riemannian metrics on the cover, written in the invariant frame.

A MetricField stores one expression per upper-triangle entry g_ij; values are
coefficients with respect to the left-invariant fields (X_i), so lattice
periodicity is plain invariance of the entry functions under the wrap maps.
Rescaled coefficients follow the dilation weights: the inverse-metric entry
(i, j) picks up rho^(2 - alpha(i) - alpha(j)) and oscillates at scale 1/rho.
"""

from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .algebra import dilate, left_invariant_frame
from .errors import NotPositiveDefinite, PeriodicityViolation, UnsupportedStep

SPD_SAMPLE_PER_AXIS = 17
SPD_MIN_EIGENVALUE = 1e-8
PERIODICITY_TOL = 1e-9


def wrap_to_domain(algebra, points, origin=None):
    """Left-translate points by lattice elements into the box domain.

    The box fundamental domain is [o_i, o_i + 1)^n in first-kind coordinates.
    Reduction runs through first-layer coordinates first (their wraps twist
    the higher layers through the bracket), then the remaining coordinates,
    which wrap by plain integer shifts for step <= 2.
    """
    if algebra.step > 2:
        raise UnsupportedStep("fundamental-domain reduction implemented for step <= 2")
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64)).copy()
    n = algebra.dim
    o = np.zeros(n) if origin is None else np.asarray(origin, dtype=np.float64)
    c = algebra.structure_constants
    first = [j for j in range(n) if algebra.weights[j] == 1]
    rest = [j for j in range(n) if algebra.weights[j] != 1]
    for j in first:
        k = np.floor(pts[:, j] - o[j])
        # exp(-k e_j) * x = x - k e_j - (k/2) [e_j, x]
        bracket = pts @ c[j]  # row p: [e_j, pts[p]]
        pts -= k[:, None] * (np.eye(n)[j][None, :] + 0.5 * bracket)
    for j in rest:
        pts[:, j] -= np.floor(pts[:, j] - o[j])
    if np.asarray(points).ndim == 1:
        return pts[0]
    return pts


@dataclass(frozen=True)
class MetricField:
    """Gamma-periodic metric, entries given as expression trees."""

    algebra: object
    entries: tuple  # tuple of tuples of AST nodes, full symmetric matrix

    def evaluate(self, points, wrap=True):
        """Entry matrices at points: returns (m, n, n) array."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if wrap and self.algebra.step <= 2:
            pts = wrap_to_domain(self.algebra, pts)
        n = self.algebra.dim
        coords = pts.T
        out = np.empty((pts.shape[0], n, n))
        for i in range(n):
            for j in range(i, n):
                vals = np.broadcast_to(
                    ex.evaluate(self.entries[i][j], coords), (pts.shape[0],)
                )
                out[:, i, j] = vals
                out[:, j, i] = vals
        return out

    def dets(self, points, wrap=True):
        return np.linalg.det(self.evaluate(points, wrap=wrap))


def _as_entry(value):
    if isinstance(value, (int, float)):
        return ex.constant(value)
    return value


def metric_field(algebra, entries, check_periodicity=True, check_spd=True, rng=None):
    """Build and validate a MetricField from AST (or numeric) entries."""
    n = algebra.dim
    rows = []
    for i in range(n):
        rows.append(tuple(_as_entry(entries[i][j]) for j in range(n)))
    field = MetricField(algebra=algebra, entries=tuple(rows))

    if check_spd:
        axes = [np.linspace(0.0, 1.0, SPD_SAMPLE_PER_AXIS, endpoint=False)] * min(n, 3)
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, min(n, 3))
        if n > 3:
            extra = np.random.default_rng(0).uniform(0, 1, size=(grid.shape[0], n - 3))
            grid = np.hstack([grid, extra])
        mats = field.evaluate(grid, wrap=False)
        eigs = np.linalg.eigvalsh(mats)
        worst = int(np.argmin(eigs[:, 0]))
        if eigs[worst, 0] < SPD_MIN_EIGENVALUE:
            raise NotPositiveDefinite(tuple(grid[worst]), float(eigs[worst, 0]))

    if check_periodicity and algebra.step <= 2:
        for i in range(n):
            for j in range(i, n):
                ok, worst = ex.check_lattice_periodicity(
                    field.entries[i][j], algebra, samples=200, tol=PERIODICITY_TOL, rng=rng
                )
                if not ok:
                    raise PeriodicityViolation(
                        f"entry ({i + 1},{j + 1}) varies by {worst:.3e} under the lattice"
                    )
    return field


def metric_at(field, x):
    """Metric matrix and determinant at one point; checks positivity."""
    mat = field.evaluate(np.asarray(x, dtype=np.float64)[None, :])[0]
    eigs = np.linalg.eigvalsh(mat)
    if eigs[0] <= 0:
        raise NotPositiveDefinite(tuple(np.asarray(x)), float(eigs[0]))
    return mat, float(np.linalg.det(mat))


def reduce_to_fundamental_domain(field, x, origin=None):
    return wrap_to_domain(field.algebra, x, origin=origin)


def left_invariant_metric(algebra, Q):
    """Constant metric field from an SPD matrix in the frame."""
    Q = np.asarray(Q, dtype=np.float64)
    if Q.shape != (algebra.dim, algebra.dim):
        raise NotPositiveDefinite(("shape",), float("nan"))
    if np.max(np.abs(Q - Q.T)) > 1e-12:
        raise NotPositiveDefinite(("symmetry",), float(np.max(np.abs(Q - Q.T))))
    eigs = np.linalg.eigvalsh(Q)
    if eigs[0] <= 0:
        raise NotPositiveDefinite(("constant",), float(eigs[0]))
    entries = [[ex.constant(Q[i, j]) for j in range(algebra.dim)] for i in range(algebra.dim)]
    return metric_field(algebra, entries, check_periodicity=False, check_spd=False)


def pseudo_left_invariant_metric(algebra, flat_torus_metric, theta_perturbation):
    """Metric with orthonormal coframe (alpha_1, alpha_2, theta) on heisenberg:3.

    alpha_i lift an orthonormal coframe of the flat 2-torus with matrix Q_T;
    theta is the standard vertical coform plus a_1(x1,x2) dx1 + a_2 dx2.  In
    the invariant frame the entries come out as

        g = [[Q11 + a1^2, Q12 + a1 a2, a1],
             [Q12 + a1 a2, Q22 + a2^2, a2],
             [a1,          a2,          1]]

    With a = 0 and Q_T = I this is the standard left-invariant metric.
    """
    if algebra.name != "heisenberg:3":
        raise UnsupportedStep("pseudo-left-invariant construction is wired to heisenberg:3")
    Q = np.asarray(flat_torus_metric, dtype=np.float64)
    if Q.shape != (2, 2) or np.max(np.abs(Q - Q.T)) > 1e-12 or np.linalg.eigvalsh(Q)[0] <= 0:
        raise NotPositiveDefinite(("flat_torus_metric",), float(np.linalg.eigvalsh(Q)[0]))
    a1, a2 = (_as_entry(a) for a in theta_perturbation)
    for name, node in (("a1", a1), ("a2", a2)):
        used = ex.variables_used(node)
        if 3 in used:
            raise PeriodicityViolation(
                f"{name} depends on x3; the connection form must come from the base torus"
            )
        ok, worst = ex.check_lattice_periodicity(node, algebra, samples=200, tol=PERIODICITY_TOL)
        if not ok:
            raise PeriodicityViolation(f"{name} varies by {worst:.3e} under the lattice")

    def prod(u, v):
        return ex.BinOp("*", u, v)

    def plus(u, v):
        return ex.BinOp("+", u, v)

    entries = [
        [plus(ex.constant(Q[0, 0]), prod(a1, a1)), plus(ex.constant(Q[0, 1]), prod(a1, a2)), a1],
        [plus(ex.constant(Q[0, 1]), prod(a1, a2)), plus(ex.constant(Q[1, 1]), prod(a2, a2)), a2],
        [a1, a2, ex.constant(1.0)],
    ]
    return metric_field(algebra, entries, check_periodicity=True)


def frame_matrices(algebra, points):
    """Stack of frame matrices F(x) (columns are the invariant fields)."""
    return left_invariant_frame(algebra, np.atleast_2d(points))


def coordinate_metric(field, points, rho=None):
    """Metric in the coordinate basis: G = F^{-T} g_frame F^{-1}.

    With rho set, returns the rescaled coordinate metric instead, built from
    g_rho(x) = D g(delta_rho x) D / rho^2 with D = diag(rho^alpha); for step-2
    algebras the frame of the rescaled group coincides with the original one.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    alg = field.algebra
    if rho is None:
        g = field.evaluate(pts)
    else:
        scale = np.power(float(rho), alg.weights.astype(float))
        g = field.evaluate(dilate(alg, rho, pts))
        g = g * (scale[:, None] * scale[None, :])[None, :, :] / rho**2
    F = frame_matrices(alg, pts)
    Finv = np.linalg.inv(F)
    return np.einsum("pmi,pij,pnj->pmn", Finv.transpose(0, 2, 1), g, Finv.transpose(0, 2, 1))


@dataclass(frozen=True)
class RescaledCoefficients:
    """Inverse-metric coefficients and volume weight of the rescaled metric."""

    field: MetricField
    rho: float

    def inverse_matrix(self, points):
        """(i, j) entry rho^(2 - alpha_i - alpha_j) g^{ij}(delta_rho x)."""
        alg = self.field.algebra
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        g = self.field.evaluate(dilate(alg, self.rho, pts))
        ginv = np.linalg.inv(g)
        damp = np.power(
            float(self.rho),
            2.0 - alg.weights.astype(float)[:, None] - alg.weights.astype(float)[None, :],
        )
        return ginv * damp[None, :, :]

    def det_weight(self, points):
        """det g(delta_rho x); quadrature weights use its square root."""
        alg = self.field.algebra
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        return self.field.dets(dilate(alg, self.rho, pts))


def rescaled_coefficients(field, rho):
    if rho < 1:
        raise ValueError(f"rescaling expects rho >= 1, got {rho}")
    return RescaledCoefficients(field=field, rho=float(rho))
