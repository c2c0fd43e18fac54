"""Nilpotent Lie algebras and their simply connected groups.

Structure constants c[i][j][k] encode [X_i, X_j] = sum_k c[i][j][k] X_k in a
basis adapted to the lower central series.  Points of the group live in
exponential coordinates of the first kind: x <-> exp(sum_i x_i X_i).  For
step <= 2 the Baker-Campbell-Hausdorff series closes after the first bracket,

    x * y = x + y + [x, y] / 2,

which is the group law used throughout.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AntisymmetryViolation,
    BasisNotAdapted,
    JacobiViolation,
    NonpositiveRho,
    NotNilpotent,
    UnsupportedStep,
)

AXIOM_TOL = 1e-12
MAX_DIM = 16


@dataclass(frozen=True)
class GradedNilpotentAlgebra:
    """A validated nilpotent Lie algebra with a layer structure.

    weights[p] is the layer index alpha(p) of basis vector X_p (1-based
    layers); homogeneous_dim = sum_i i * layer_dims[i-1].
    """

    dim: int
    structure_constants: np.ndarray
    layer_dims: tuple
    weights: np.ndarray
    step: int
    homogeneous_dim: int
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        self.structure_constants.flags.writeable = False
        self.weights.flags.writeable = False

    @property
    def d1(self):
        """Dimension of the first layer (the horizontal directions)."""
        return self.layer_dims[0]

    def bracket(self, v, w):
        """[v, w] for coefficient vectors v, w."""
        return np.einsum("ijk,i,j->k", self.structure_constants, v, w)

    def is_abelian(self):
        return not np.any(self.structure_constants)


def _lower_central_series(c, tol=AXIOM_TOL):
    """Orthonormal bases of u^1 >= u^2 >= ... computed from brackets.

    Returns the list of bases; raises NotNilpotent if the dimensions stop
    decreasing before reaching zero.
    """
    n = c.shape[0]
    series = [np.eye(n)]
    while True:
        prev = series[-1]
        if prev.shape[1] == 0:
            break
        # span of [u^i, u]: brackets of the current basis with all of u
        vecs = np.einsum("ijk,ia,jb->abk", c, prev, np.eye(n)).reshape(-1, n)
        norms = np.linalg.norm(vecs, axis=1)
        vecs = vecs[norms > tol]
        if vecs.size == 0:
            series.append(np.zeros((n, 0)))
            break
        u, s, _ = np.linalg.svd(vecs.T, full_matrices=False)
        rank = int(np.sum(s > tol * max(1.0, s[0])))
        nxt = u[:, :rank]
        if rank >= prev.shape[1]:
            raise NotNilpotent(
                f"lower central series stalls at dimension {rank}; algebra is not nilpotent"
            )
        series.append(nxt)
    return series


def _weights_from_layers(layer_dims):
    w = []
    for i, d in enumerate(layer_dims, start=1):
        w.extend([i] * d)
    return np.array(w, dtype=np.int64)


def validate_algebra(structure_constants, layer_dims, name="custom"):
    """Check the Lie-algebra axioms and the layer structure.

    Raises AntisymmetryViolation, JacobiViolation, NotNilpotent or
    BasisNotAdapted; on success returns a GradedNilpotentAlgebra.
    """
    c = np.ascontiguousarray(structure_constants, dtype=np.float64)
    if c.ndim != 3 or len(set(c.shape)) != 1:
        raise BasisNotAdapted(f"structure constants must be cubic, got shape {c.shape}")
    n = c.shape[0]
    if n > MAX_DIM:
        raise BasisNotAdapted(f"dimension {n} exceeds the supported maximum {MAX_DIM}")
    if not np.all(np.isfinite(c)):
        raise BasisNotAdapted("structure constants must be finite")

    layer_dims = tuple(int(d) for d in layer_dims)
    if any(d <= 0 for d in layer_dims) or sum(layer_dims) != n:
        raise BasisNotAdapted(
            f"layer dimensions {layer_dims} do not partition dimension {n}"
        )

    asym = np.max(np.abs(c + c.transpose(1, 0, 2)))
    if asym > AXIOM_TOL:
        raise AntisymmetryViolation(f"antisymmetry violated by {asym:.3e}")

    # Jacobi: cyclic sum of c[i,j,m] c[m,k,l] must vanish.
    cc = np.einsum("ijm,mkl->ijkl", c, c)
    jac = cc + cc.transpose(1, 2, 0, 3) + cc.transpose(2, 0, 1, 3)
    worst = np.max(np.abs(jac))
    if worst > AXIOM_TOL:
        raise JacobiViolation(f"Jacobi identity violated by {worst:.3e}")

    series = _lower_central_series(c)
    step = len(series) - 1
    if step != len(layer_dims):
        raise BasisNotAdapted(
            f"declared {len(layer_dims)} layers but the lower central series has length {step}"
        )

    # Adaptation: span(X_p : alpha(p) >= i) must equal u^i.
    weights = _weights_from_layers(layer_dims)
    offsets = np.cumsum((0,) + layer_dims)
    for i in range(1, step + 1):
        basis = series[i - 1]
        expected_dim = n - offsets[i - 1]
        if basis.shape[1] != expected_dim:
            raise BasisNotAdapted(
                f"dim u^{i} = {basis.shape[1]} but layers {i}..{step} span {expected_dim}"
            )
        # u^i must be contained in the span of the trailing basis vectors
        residual = np.abs(basis[: offsets[i - 1], :]).max() if offsets[i - 1] else 0.0
        if residual > AXIOM_TOL:
            raise BasisNotAdapted(
                f"u^{i} sticks out of span(X_p : alpha(p) >= {i}) by {residual:.3e}"
            )

    d_h = int(sum(i * d for i, d in enumerate(layer_dims, start=1)))
    return GradedNilpotentAlgebra(
        dim=n,
        structure_constants=c,
        layer_dims=layer_dims,
        weights=weights,
        step=step,
        homogeneous_dim=d_h,
        name=name,
    )


def graded_limit_bracket(algebra):
    """Structure constants of the graded limit algebra u_infinity.

    [X_i, X_j]_inf keeps only the component of [X_i, X_j] in the layer of
    weight alpha(i) + alpha(j); for an already graded algebra this is the
    identity.
    """
    c = algebra.structure_constants
    a = algebra.weights
    # keep c[i,j,k] iff alpha(k) == alpha(i) + alpha(j)
    keep = a[None, None, :] == (a[:, None, None] + a[None, :, None])
    return np.where(keep, c, 0.0)


def graded_limit(algebra):
    """The limit algebra itself, revalidated."""
    return validate_algebra(
        graded_limit_bracket(algebra), algebra.layer_dims, name=algebra.name + ":graded"
    )


def dilate(algebra, rho, x):
    """Graded dilation: coordinate p is scaled by rho ** alpha(p)."""
    if rho <= 0:
        raise NonpositiveRho(f"dilation parameter must be positive, got {rho}")
    x = np.asarray(x, dtype=np.float64)
    scale = np.power(float(rho), algebra.weights.astype(np.float64))
    return x * scale


def _require_step2(algebra):
    if algebra.step > 2:
        raise UnsupportedStep(
            f"group law implemented for step <= 2 only (algebra has step {algebra.step})"
        )


def group_multiply(algebra, x, y):
    """BCH product x * y = x + y + [x, y]/2; exact for step <= 2.

    Broadcasts over leading axes, so stacks of points multiply in one call.
    """
    _require_step2(algebra)
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    corr = 0.5 * np.einsum("ijk,...i,...j->...k", algebra.structure_constants, x, y)
    return x + y + corr


def group_inverse(algebra, x):
    _require_step2(algebra)
    return -np.asarray(x, dtype=np.float64)


def group_power(algebra, x, n):
    """x * x * ... * x (n times, n >= 0)."""
    _require_step2(algebra)
    out = np.zeros(algebra.dim)
    for _ in range(int(n)):
        out = group_multiply(algebra, out, x)
    return out


def left_invariant_frame(algebra, x):
    """Matrix F(x) whose column i is the left-invariant field X_i at x.

    Differentiating left translation under the step-2 BCH law gives
    F[k, i] = delta_ki + sum_j x_j c[j][i][k] / 2.  F(0) = I and det F = 1.
    Accepts a single point (n,) or a stack (..., n); returns (..., n, n).
    """
    _require_step2(algebra)
    x = np.asarray(x, dtype=np.float64)
    n = algebra.dim
    eye = np.eye(n)
    corr = 0.5 * np.einsum("...j,jik->...ki", x, algebra.structure_constants)
    return np.broadcast_to(eye, x.shape[:-1] + (n, n)).copy() + corr


# --- named algebras -------------------------------------------------------

def heisenberg(dim):
    """The (2m+1)-dimensional Heisenberg algebra, [X_{2i-1}, X_{2i}] = X_n."""
    if dim < 3 or dim % 2 == 0:
        raise BasisNotAdapted(f"Heisenberg dimension must be odd and >= 3, got {dim}")
    n = dim
    c = np.zeros((n, n, n))
    for i in range(0, n - 1, 2):
        c[i, i + 1, n - 1] = 1.0
        c[i + 1, i, n - 1] = -1.0
    return validate_algebra(c, (n - 1, 1), name=f"heisenberg:{n}")


def torus(dim):
    """The abelian algebra of the n-torus."""
    c = np.zeros((dim, dim, dim))
    return validate_algebra(c, (dim,), name=f"torus:{dim}")


def named_algebra(name):
    """Resolve "torus:n" / "heisenberg:n" specifications."""
    kind, _, arg = name.partition(":")
    if kind == "torus":
        return torus(int(arg))
    if kind == "heisenberg":
        return heisenberg(int(arg))
    raise BasisNotAdapted(f"unknown algebra name {name!r}")


def algebra_from_triples(dim, layer_dims, triples, name="custom"):
    """Build structure constants from (i, j, k, value) entries (1-based).

    Each triple records [X_i, X_j] = value * X_k (+ other listed terms); the
    antisymmetric counterpart is filled in automatically.
    """
    c = np.zeros((dim, dim, dim))
    for i, j, k, v in triples:
        c[i - 1, j - 1, k - 1] += float(v)
        c[j - 1, i - 1, k - 1] -= float(v)
    return validate_algebra(c, layer_dims, name=name)
