"""Discrete differential geometry of immersed surfaces in R^4 = C^2.

Everything is computed per grid node with 4th-order stencils: induced metric,
orthonormal tangent/normal frames, second fundamental form, mean curvature,
the Kahler angle cos(alpha) = omega(e1, e2), the Lagrangian angle as a unit
complex number, and the squared gradient of the compatible complex structure
J_Sigma (90-degree rotation of tangent and normal planes).

Frame conventions.  e1, e2 come from Gram-Schmidt on (F_u, F_v); v1 is the
first ambient basis vector with a usable normal projection; v2 completes
{e1, e2, v1, v2} to a positively oriented ambient basis.  All scalar outputs
are invariant under any other (orientation-preserving) frame choice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFrame, DegenerateMetric, FrameInconsistent
from .grid import ParamGrid, SurfaceState, position_derivatives, scalar_derivative

# Numerical floors and the J-field normalization, referenced by tests.
DET_G_FLOOR = 1e-12          # immersion requirement: det g above this
PROJECTION_FLOOR = 1e-6      # Gram-Schmidt fallback threshold
COS_CLAMP_EXCESS = 1e-10     # tolerated overshoot of |cos alpha| past 1
OMEGA_NORM_FLOOR = 1e-12     # below this the holomorphic form is degenerate
J_DEGENERACY_SIN2 = 1e-6     # sin^2(alpha) filter for the J-gradient field
J_SCALE = 0.25               # |grad J|^2 = J_SCALE * sum_k ||D_k J||_F^2

_KAHLER_SIGNS = ((0, 1, 1.0), (1, 0, -1.0), (2, 3, 1.0), (3, 2, -1.0))


def omega_pairing(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Standard symplectic form dx1^dy1 + dx2^dy2 on two 4-vector fields."""
    return (a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
            + a[..., 2] * b[..., 3] - a[..., 3] * b[..., 2])


def holomorphic_pairing(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Complex form dz1^dz2 on two 4-vector fields (complex-valued)."""
    za1 = a[..., 0] + 1j * a[..., 1]
    za2 = a[..., 2] + 1j * a[..., 3]
    zb1 = b[..., 0] + 1j * b[..., 1]
    zb2 = b[..., 2] + 1j * b[..., 3]
    return za1 * zb2 - zb1 * za2


def cross4(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Vector d with d . x = det(rows a, b, c, x); orthogonal to a, b, c."""

    def det3(p, q, r):
        return (a[..., p] * (b[..., q] * c[..., r] - b[..., r] * c[..., q])
                - a[..., q] * (b[..., p] * c[..., r] - b[..., r] * c[..., p])
                + a[..., r] * (b[..., p] * c[..., q] - b[..., q] * c[..., p]))

    return np.stack([-det3(1, 2, 3), det3(0, 2, 3),
                     -det3(0, 1, 3), det3(0, 1, 2)], axis=-1)


@dataclass
class GeometryBundle:
    """Per-node geometric data of one surface state.

    Index conventions: metric-type arrays end in (i, j) parameter indices;
    ``second_ff[..., n, i, j]`` is h^n_ij with n the normal index; frames are
    stored as (..., frame_index, ambient_component).
    """

    grid: ParamGrid
    positions: np.ndarray        # (n1, n2, 4)
    first_derivs: np.ndarray     # (n1, n2, 2, 4)   rows F_u, F_v
    metric: np.ndarray           # (n1, n2, 2, 2)
    inverse_metric: np.ndarray   # (n1, n2, 2, 2)
    det_g: np.ndarray            # (n1, n2)
    area_element: np.ndarray     # (n1, n2)
    christoffel: np.ndarray      # (n1, n2, 2, 2, 2)  [k, i, j]
    tangent_frame: np.ndarray    # (n1, n2, 2, 4)
    tangent_coeffs: np.ndarray   # (n1, n2, 2, 2)   e_a = C[a, i] F_i
    normal_frame: np.ndarray     # (n1, n2, 2, 4)
    second_ff: np.ndarray        # (n1, n2, 2, 2, 2)
    second_ff_frame: np.ndarray  # (n1, n2, 2, 2, 2)  orthonormal tangent basis
    mean_curvature: np.ndarray   # (n1, n2, 4)
    mean_normal: np.ndarray      # (n1, n2, 2)       H^n components
    norm_A2: np.ndarray          # (n1, n2)
    norm_H2: np.ndarray          # (n1, n2)
    cos_alpha: np.ndarray        # (n1, n2)
    lag_angle_unit: np.ndarray   # (n1, n2) complex, |.| = 1
    lag_omega_norm: np.ndarray   # (n1, n2)  |Omega(e1, e2)| = sin alpha
    omega_degenerate: np.ndarray  # (n1, n2) bool
    nabla_bar_j2: np.ndarray | None = None  # NaN where the filter applies

    @property
    def cos_theta(self) -> np.ndarray:
        """Cosine of the Lagrangian angle (meaningful on Lagrangian surfaces)."""
        return self.lag_angle_unit.real

    def quadrature_weights(self) -> np.ndarray:
        """Per-node surface measure: area element times parameter cell."""
        return self.area_element * self.grid.node_weight()


def _tangent_frame(f_u, f_v, metric, det_g, rotation=None):
    """Oriented orthonormal tangent frame and its coefficients in (F_u, F_v)."""
    g11 = metric[..., 0, 0]
    g12 = metric[..., 0, 1]
    sqrt_g11 = np.sqrt(g11)
    e1 = f_u / sqrt_g11[..., None]
    mu = np.sqrt(det_g / g11)
    e2 = (f_v - (g12 / g11)[..., None] * f_u) / mu[..., None]
    c = np.zeros(metric.shape)
    c[..., 0, 0] = 1.0 / sqrt_g11
    c[..., 1, 0] = -g12 / (g11 * mu)
    c[..., 1, 1] = 1.0 / mu
    if rotation is not None:
        cos_b = np.cos(rotation)
        sin_b = np.sin(rotation)
        e1, e2 = (cos_b[..., None] * e1 + sin_b[..., None] * e2,
                  -sin_b[..., None] * e1 + cos_b[..., None] * e2)
        c0 = cos_b[..., None] * c[..., 0, :] + sin_b[..., None] * c[..., 1, :]
        c1 = -sin_b[..., None] * c[..., 0, :] + cos_b[..., None] * c[..., 1, :]
        c = np.stack([c0, c1], axis=-2)
    return np.stack([e1, e2], axis=-2), c


def _normal_frame(e1, e2, basis_order):
    """First normal vector by deterministic Gram-Schmidt with fallback."""
    proj = -e1[..., :, None] * e1[..., None, :] - e2[..., :, None] * e2[..., None, :]
    idx = np.arange(4)
    proj[..., idx, idx] += 1.0
    # Row b of proj is the normal projection of ambient basis vector b.
    candidates = proj[..., list(basis_order), :]
    norms = np.linalg.norm(candidates, axis=-1)
    usable = norms >= PROJECTION_FLOOR
    if not usable.any(axis=-1).all():
        node = int(np.argmax(~usable.any(axis=-1)))
        raise DegenerateFrame(node, "no usable normal projection")
    first = np.argmax(usable, axis=-1)
    v1 = np.take_along_axis(candidates, first[..., None, None], axis=-2)[..., 0, :]
    v1 = v1 / np.linalg.norm(v1, axis=-1, keepdims=True)
    v2 = cross4(e1, e2, v1)
    v2 = v2 / np.linalg.norm(v2, axis=-1, keepdims=True)
    return np.stack([v1, v2], axis=-2)


def build_geometry(state: SurfaceState, compute_j: bool = True,
                   tangent_rotation=None,
                   normal_basis_order=(0, 1, 2, 3)) -> GeometryBundle:
    """Full geometric bundle of a surface state.

    ``tangent_rotation`` (per-node angles) and ``normal_basis_order`` change
    internal frame gauges; every scalar output is independent of them.

    Raises DegenerateMetric when det g falls below the immersion floor and
    FrameInconsistent when |omega(e1, e2)| exceeds 1 beyond rounding.
    """
    state.require_finite()
    grid = state.grid
    f_u, f_v, f_uu, f_uv, f_vv = position_derivatives(state)
    first = np.stack([f_u, f_v], axis=-2)
    metric = np.einsum('...ia,...ja->...ij', first, first)
    det_g = metric[..., 0, 0] * metric[..., 1, 1] - metric[..., 0, 1] ** 2
    if np.any(det_g <= DET_G_FLOOR):
        node = int(np.argmax(det_g <= DET_G_FLOOR))
        raise DegenerateMetric(node, f"det g = {det_g.flat[node]:.3e}")
    inverse = np.empty_like(metric)
    inverse[..., 0, 0] = metric[..., 1, 1]
    inverse[..., 1, 1] = metric[..., 0, 0]
    inverse[..., 0, 1] = -metric[..., 0, 1]
    inverse[..., 1, 0] = -metric[..., 0, 1]
    inverse /= det_g[..., None, None]
    area = np.sqrt(det_g)

    hess = np.empty(f_u.shape[:-1] + (2, 2, 4))
    hess[..., 0, 0, :] = f_uu
    hess[..., 0, 1, :] = f_uv
    hess[..., 1, 0, :] = f_uv
    hess[..., 1, 1, :] = f_vv
    # In flat ambient space Gamma^k_ij = g^kl <d2_ij F, d_l F>.
    proj_t = np.einsum('...ija,...la->...ijl', hess, first)
    christoffel = np.einsum('...kl,...ijl->...kij', inverse, proj_t)
    second = hess - np.einsum('...kij,...ka->...ija', christoffel, first)

    frame_t, coeffs = _tangent_frame(f_u, f_v, metric, det_g, tangent_rotation)
    frame_n = _normal_frame(frame_t[..., 0, :], frame_t[..., 1, :], normal_basis_order)

    h = np.einsum('...ijc,...nc->...nij', second, frame_n)
    h_frame = np.einsum('...ai,...bj,...nij->...nab', coeffs, coeffs, h)
    mean_normal = np.einsum('...ij,...nij->...n', inverse, h)
    mean = np.einsum('...n,...nc->...c', mean_normal, frame_n)
    norm_h2 = np.einsum('...n,...n->...', mean_normal, mean_normal)
    norm_a2 = np.einsum('...ik,...jl,...nij,...nkl->...', inverse, inverse, h, h)

    e1 = frame_t[..., 0, :]
    e2 = frame_t[..., 1, :]
    cos_alpha = omega_pairing(e1, e2)
    excess = np.abs(cos_alpha) - 1.0
    if np.any(excess > COS_CLAMP_EXCESS):
        node = int(np.argmax(excess > COS_CLAMP_EXCESS))
        raise FrameInconsistent(node, f"|cos alpha| = {1 + excess.flat[node]:.12f}")
    cos_alpha = np.clip(cos_alpha, -1.0, 1.0)

    omega_c = holomorphic_pairing(e1, e2)
    omega_norm = np.abs(omega_c)
    degenerate = omega_norm < OMEGA_NORM_FLOOR
    unit = np.where(degenerate, 1.0 + 0.0j, omega_c / np.where(degenerate, 1.0, omega_norm))

    bundle = GeometryBundle(
        grid=grid, positions=state.positions, first_derivs=first,
        metric=metric, inverse_metric=inverse, det_g=det_g, area_element=area,
        christoffel=christoffel, tangent_frame=frame_t, tangent_coeffs=coeffs,
        normal_frame=frame_n, second_ff=h, second_ff_frame=h_frame,
        mean_curvature=mean, mean_normal=mean_normal,
        norm_A2=norm_a2, norm_H2=norm_h2, cos_alpha=cos_alpha,
        lag_angle_unit=unit, lag_omega_norm=omega_norm,
        omega_degenerate=degenerate)
    if compute_j:
        bundle.nabla_bar_j2 = _nabla_bar_j2(bundle)
    return bundle


def _nabla_bar_j2(bundle: GeometryBundle) -> np.ndarray:
    """|grad J_Sigma|^2 by differentiating the 4x4 rotation field."""
    e1 = bundle.tangent_frame[..., 0, :]
    e2 = bundle.tangent_frame[..., 1, :]
    v1 = bundle.normal_frame[..., 0, :]
    v2 = bundle.normal_frame[..., 1, :]

    def skew(a, b):
        return a[..., :, None] * b[..., None, :] - b[..., :, None] * a[..., None, :]

    j_field = skew(e2, e1) + skew(v2, v1)
    dj_u = scalar_derivative(j_field, bundle.grid, 0, 1)
    dj_v = scalar_derivative(j_field, bundle.grid, 1, 1)
    dj = np.stack([dj_u, dj_v], axis=-3)          # (..., i, 4, 4)
    frame_dj = np.einsum('...ki,...iab->...kab', bundle.tangent_coeffs, dj)
    total = np.einsum('...kab,...kab->...', frame_dj, frame_dj)
    value = J_SCALE * total
    sin2 = 1.0 - bundle.cos_alpha ** 2
    return np.where(sin2 < J_DEGENERACY_SIN2, np.nan, value)


def nabla_bar_j2_from_shape(bundle: GeometryBundle) -> np.ndarray:
    """|grad J_Sigma|^2 from second-fundamental-form components.

    Equivalent closed form used as fallback at nodes excluded by the
    degeneracy filter and as an independent route in tests:
    sum_k (h^1_k2 + h^2_k1)^2 + (h^2_k2 - h^1_k1)^2 in the orthonormal frame.
    """
    h = bundle.second_ff_frame
    p = h[..., 0, :, 1] + h[..., 1, :, 0]
    q = h[..., 1, :, 1] - h[..., 0, :, 0]
    return np.sum(p ** 2 + q ** 2, axis=-1)


def nabla_bar_j2_filled(bundle: GeometryBundle) -> np.ndarray:
    """J-gradient field with filtered nodes filled by the closed form."""
    direct = bundle.nabla_bar_j2
    if direct is None:
        direct = _nabla_bar_j2(bundle)
    fallback = nabla_bar_j2_from_shape(bundle)
    return np.where(np.isnan(direct), fallback, direct)


def kahler_angle(state: SurfaceState) -> np.ndarray:
    """cos(alpha) per node; positive means symplectic, zero Lagrangian."""
    return build_geometry(state, compute_j=False).cos_alpha


def lagrangian_angle(state: SurfaceState):
    """Unit complex e^{i theta} per node and the pairing norm |Omega(e1, e2)|.

    The norm equals sin(alpha); it is 1 exactly on Lagrangian planes and 0 on
    complex ones, where the returned unit defaults to 1 and the bundle flags
    the node.
    """
    bundle = build_geometry(state, compute_j=False)
    return bundle.lag_angle_unit, bundle.lag_omega_norm


def field_derivatives(field: np.ndarray, grid: ParamGrid):
    """Coordinate first derivatives (d_u f, d_v f) of a per-node field."""
    return (scalar_derivative(field, grid, 0, 1),
            scalar_derivative(field, grid, 1, 1))


def laplace_beltrami(field: np.ndarray, bundle: GeometryBundle) -> np.ndarray:
    """Surface Laplacian g^ij (d2_ij f - Gamma^k_ij d_k f) per node."""
    grid = bundle.grid
    f_u, f_v = field_derivatives(field, grid)
    f_uu = scalar_derivative(field, grid, 0, 2)
    f_vv = scalar_derivative(field, grid, 1, 2)
    f_uv = scalar_derivative(f_u, grid, 1, 1)
    grad = np.stack([f_u, f_v], axis=-1)
    hess = np.empty(field.shape + (2, 2))
    hess[..., 0, 0] = f_uu
    hess[..., 0, 1] = f_uv
    hess[..., 1, 0] = f_uv
    hess[..., 1, 1] = f_vv
    correction = np.einsum('...kij,...k->...ij', bundle.christoffel, grad)
    return np.einsum('...ij,...ij->...', bundle.inverse_metric, hess - correction)


def gradient_sq(field: np.ndarray, bundle: GeometryBundle) -> np.ndarray:
    """|grad f|^2 = g^ij d_i f d_j f per node."""
    f_u, f_v = field_derivatives(field, bundle.grid)
    grad = np.stack([f_u, f_v], axis=-1)
    return np.einsum('...ij,...i,...j->...', bundle.inverse_metric, grad, grad)


def gradient_inner(field_a: np.ndarray, field_b: np.ndarray,
                   bundle: GeometryBundle) -> np.ndarray:
    """Tangential inner product grad f . grad g = g^ij d_i f d_j g."""
    a = np.stack(field_derivatives(field_a, bundle.grid), axis=-1)
    b = np.stack(field_derivatives(field_b, bundle.grid), axis=-1)
    return np.einsum('...ij,...i,...j->...', bundle.inverse_metric, a, b)


def project_normal(vectors: np.ndarray, bundle: GeometryBundle) -> np.ndarray:
    """Project ambient 4-vector fields onto the normal frame span."""
    comps = np.einsum('...nc,...c->...n', bundle.normal_frame, vectors)
    return np.einsum('...n,...nc->...c', comps, bundle.normal_frame)


def frame_directional(field: np.ndarray, bundle: GeometryBundle) -> np.ndarray:
    """Derivatives of a field along the orthonormal tangent directions.

    Output shape is field.shape with a leading-inserted axis at position -2
    for vector fields of shape (..., c): result (..., k, c) with k in {0, 1}.
    For scalar fields the result is (..., k).
    """
    d_u, d_v = field_derivatives(field, bundle.grid)
    coord = np.stack([d_u, d_v], axis=field.ndim - (0 if field.ndim == 2 else 1))
    if field.ndim == 2:                             # scalar field (n1, n2)
        return np.einsum('...ki,...i->...k', bundle.tangent_coeffs, coord)
    return np.einsum('...ki,...ic->...kc', bundle.tangent_coeffs, coord)


def normal_gradient_sq(vectors: np.ndarray, bundle: GeometryBundle) -> np.ndarray:
    """|grad^N X|^2: normal projection of the frame derivatives, squared.

    For the mean curvature field this is the |grad H|^2 entering the
    curvature evolution identity; computing through ambient components keeps
    it frame-gauge invariant.
    """
    deriv = frame_directional(vectors, bundle)      # (..., k, c)
    comps = np.einsum('...nc,...kc->...kn', bundle.normal_frame, deriv)
    return np.einsum('...kn,...kn->...', comps, comps)
