"""Analysis of sampled almost complex surfaces in the product of two 3-spheres.

An immersed surface patch arrives as a regular parameter grid of points
(p(u,v), q(u,v)).  In adapted coordinates the second coordinate derivative
is J applied to the first; all machinery here assumes (and measures) that
property rather than trusting it.  The pipeline is

    grid -> finite-difference partials -> logarithmic-derivative coefficient
    fields -> residuals, holomorphic quadratic coefficient, induced metric,
    Gaussian curvature, second fundamental form, alignment classification.

Derivatives are second-order finite differences throughout; every residual
statistic is taken on the grid interior (two-cell margin) because one-sided
edge stencils degrade the order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import quat
from .nkspace import (
    CONN,
    SQRT3,
    Point,
    Tangent,
    apply_J,
    apply_P,
    frame_coords,
    from_frame_coords,
    gnorm,
    metric,
)

__all__ = [
    "THETA",
    "ImmersionGrid",
    "immersion_grid",
    "GridPartials",
    "CoefficientFields",
    "SecondFundamentalForm",
    "interior",
    "partials",
    "almost_complex_residual",
    "span_defect",
    "extract_coefficients",
    "rotate_pair",
    "rotate_pair_back",
    "integrability_residuals",
    "lambda_field",
    "lambda_quadratic",
    "cr_residuals",
    "induced_metric",
    "second_derivative",
    "adapted_relation_residuals",
    "brioschi_curvature",
    "gaussian_curvature",
    "second_fundamental_form",
    "classify_P_alignment",
    "analyze",
]

# the coefficient pair used by the flat-potential construction is the
# logarithmic-derivative pair rotated by this fixed angle
THETA = 2.0 * np.pi / 3.0
_COS_T = float(np.cos(THETA))
_SIN_T = float(np.sin(THETA))


@dataclass(frozen=True)
class ImmersionGrid:
    """Regular (u, v) parameter grid of points on the product manifold.

    `p` and `q` have shape (nu, nv, 4); axis 0 walks u, axis 1 walks v.
    `adapted` records the intent that the v-derivative equals J applied to
    the u-derivative; analysis code measures the actual defect.
    """

    u0: float
    v0: float
    du: float
    dv: float
    p: np.ndarray
    q: np.ndarray
    adapted: bool = True

    @property
    def nu(self):
        return self.p.shape[0]

    @property
    def nv(self):
        return self.p.shape[1]

    @property
    def u_vals(self):
        return self.u0 + self.du * np.arange(self.nu)

    @property
    def v_vals(self):
        return self.v0 + self.dv * np.arange(self.nv)

    @property
    def base(self):
        return Point(self.p, self.q)


def immersion_grid(u0, v0, du, dv, p, q, adapted=True, unit_tol=1e-6):
    """Validated grid constructor.

    Checks shapes, grid size (at least 5x5), positive steps, unit norms
    (renormalizing within `unit_tol`), and that the finite-difference
    derivatives are nonzero in the metric (immersion check).
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 3 or p.shape[-1] != 4:
        raise ValueError(f"expected matching (nu, nv, 4) arrays, got {p.shape} and {q.shape}")
    if p.shape[0] < 5 or p.shape[1] < 5:
        raise ValueError(f"grid must be at least 5x5, got {p.shape[:2]}")
    if not (du > 0 and dv > 0 and np.isfinite(du) and np.isfinite(dv)):
        raise ValueError(f"grid steps must be positive, got du={du}, dv={dv}")
    grid = ImmersionGrid(
        float(u0), float(v0), float(du), float(dv),
        quat.unit(p, tol=unit_tol), quat.unit(q, tol=unit_tol), adapted,
    )
    gp = partials(grid)
    slow = min(
        float(interior(gnorm(gp.phi_u)).min()), float(interior(gnorm(gp.phi_v)).min())
    )
    if slow < 1e-8:
        raise ValueError(f"grid is not an immersion (derivative norm {slow:.3e})")
    return grid


def interior(field, margin=2):
    """Trim `margin` cells from each grid edge of the leading two axes."""
    return field[margin:-margin, margin:-margin]


@dataclass(frozen=True)
class GridPartials:
    """Finite-difference coordinate derivatives of an immersion grid.

    The raw derivatives are projected to exact tangency (the component along
    the base point is removed); `projection_max` records the largest removed
    component over the grid interior, which doubles as the real-part defect
    of the logarithmic derivatives.
    """

    grid: ImmersionGrid
    phi_u: Tangent
    phi_v: Tangent
    projection_max: float


def _project_tangent(base_q, deriv):
    radial = quat.dot(deriv, base_q)
    return deriv - radial[..., None] * base_q, float(interior(np.abs(radial)).max())


def partials(grid):
    """Central-difference partial derivatives, one-sided at the edges."""
    base = grid.base
    worst = 0.0
    comps = []
    for arr in (grid.p, grid.q):
        for axis, step in ((0, grid.du), (1, grid.dv)):
            raw = np.gradient(arr, step, axis=axis, edge_order=2)
            tan, dev = _project_tangent(arr, raw)
            comps.append(tan)
            worst = max(worst, dev)
    pu, pv, qu, qv = comps
    return GridPartials(
        grid,
        Tangent(base, pu, qu),
        Tangent(base, pv, qv),
        worst,
    )


def almost_complex_residual(gp):
    """Pointwise metric norm of phi_v minus J phi_u, relative to |phi_u|."""
    defect = gp.phi_v - apply_J(gp.phi_u)
    return gnorm(defect) / gnorm(gp.phi_u)


def span_defect(gp):
    """Component of J phi_u outside span{phi_u, phi_v}, relative to |phi_u|.

    Coordinate-free counterpart of `almost_complex_residual`: zero whenever
    the tangent plane is J-invariant, however the patch is parametrized.
    """
    target = apply_J(gp.phi_u)
    lam, mu = _tangential_coefficients(gp, target)
    rest = target - lam * gp.phi_u - mu * gp.phi_v
    return gnorm(rest) / gnorm(gp.phi_u)


def rotate_pair(alpha_t, beta_t):
    """Forward rotation of the coefficient pair by the fixed angle."""
    a = _COS_T * alpha_t + _SIN_T * beta_t
    b = -_SIN_T * alpha_t + _COS_T * beta_t
    return a, b


def rotate_pair_back(alpha, beta):
    """Inverse of `rotate_pair`."""
    at = _COS_T * alpha - _SIN_T * beta
    bt = _SIN_T * alpha + _COS_T * beta
    return at, bt


@dataclass(frozen=True)
class CoefficientFields:
    """Logarithmic-derivative coefficient fields of an adapted immersion.

    alpha_t, beta_t, gamma_t, delta_t are the imaginary parts of
    p^-1 p_u, p^-1 p_v, q^-1 q_u, q^-1 q_v on the grid; (alpha, beta) is the
    pair (alpha_t, beta_t) rotated by `theta`.  `real_part_max` records the
    largest real part seen before discarding (a finite-difference defect).
    """

    alpha_t: np.ndarray
    beta_t: np.ndarray
    gamma_t: np.ndarray
    delta_t: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    theta: float
    real_part_max: float


def extract_coefficients(grid, gp=None, max_real_part=1e-4):
    """Coefficient fields of an adapted grid.

    Raises ValueError when the real-part defect of the logarithmic
    derivatives exceeds `max_real_part`; that signals a grid that is not a
    smooth unit-quaternion immersion sampled finely enough.
    """
    if gp is None:
        gp = partials(grid)
    if gp.projection_max > max_real_part:
        raise ValueError(
            "logarithmic derivatives are far from imaginary "
            f"(real-part residual {gp.projection_max:.3e} > {max_real_part:.1e})"
        )
    alpha_t = quat.imag(quat.qmul(quat.qconj(grid.p), gp.phi_u.u))
    beta_t = quat.imag(quat.qmul(quat.qconj(grid.p), gp.phi_v.u))
    gamma_t = quat.imag(quat.qmul(quat.qconj(grid.q), gp.phi_u.v))
    delta_t = quat.imag(quat.qmul(quat.qconj(grid.q), gp.phi_v.v))
    alpha, beta = rotate_pair(alpha_t, beta_t)
    return CoefficientFields(
        alpha_t, beta_t, gamma_t, delta_t, alpha, beta, THETA, gp.projection_max
    )


def adapted_relation_residuals(cf):
    """Max deviation of the second-factor coefficients from the first-factor
    pair under the fixed linear relation that adapted coordinates force."""
    gamma_pred = (SQRT3 / 2.0) * cf.beta_t + 0.5 * cf.alpha_t
    delta_pred = 0.5 * cf.beta_t - (SQRT3 / 2.0) * cf.alpha_t
    rg = np.linalg.norm(cf.gamma_t - gamma_pred, axis=-1)
    rd = np.linalg.norm(cf.delta_t - delta_pred, axis=-1)
    return float(interior(rg).max()), float(interior(rd).max())


def integrability_residuals(cf, du, dv, margin=2):
    """Max-norm residuals of the three first-order compatibility equations.

    Returns (tilde_curl, closure, divergence): the cross-product curl
    equation on the unrotated pair, and the closure and divergence equations
    on the rotated pair.  All are second-order small on a genuine almost
    complex surface.
    """
    at_v = np.gradient(cf.alpha_t, dv, axis=1, edge_order=2)
    bt_u = np.gradient(cf.beta_t, du, axis=0, edge_order=2)
    r1 = at_v - bt_u - 2.0 * np.cross(cf.alpha_t, cf.beta_t)

    a_v = np.gradient(cf.alpha, dv, axis=1, edge_order=2)
    b_u = np.gradient(cf.beta, du, axis=0, edge_order=2)
    r2 = a_v - b_u

    a_u = np.gradient(cf.alpha, du, axis=0, edge_order=2)
    b_v = np.gradient(cf.beta, dv, axis=1, edge_order=2)
    r3 = a_u + b_v + (4.0 / SQRT3) * np.cross(cf.alpha, cf.beta)

    def stat(r):
        return float(interior(np.linalg.norm(r, axis=-1), margin).max())

    return stat(r1), stat(r2), stat(r3)


def lambda_quadratic(x, y):
    """The holomorphic quadratic coefficient as a quadratic form on a
    coefficient pair: (1 + i sqrt3)/4 times the complex square of x - iy."""
    a = np.sum(x * x, axis=-1) - np.sum(y * y, axis=-1)
    b = np.sum(x * y, axis=-1)
    re = 0.25 * a + (SQRT3 / 2.0) * b
    im = (SQRT3 / 4.0) * a - 0.5 * b
    return re + 1j * im


def lambda_field(gp):
    """Holomorphic quadratic coefficient from the metric-level definition:
    twice its value is g(P phi_u, phi_u) - i g(P phi_u, J phi_u)."""
    pu = apply_P(gp.phi_u)
    re = metric(pu, gp.phi_u)
    im = -metric(pu, apply_J(gp.phi_u))
    return 0.5 * (re + 1j * im)


def cr_residuals(cf, du, dv, margin=2):
    """Max residual of the two Cauchy-Riemann equations coupling the dot
    products of the rotated pair; second-order small on genuine surfaces."""
    dot_ab = np.sum(cf.alpha * cf.beta, axis=-1)
    diff = np.sum(cf.alpha * cf.alpha, axis=-1) - np.sum(cf.beta * cf.beta, axis=-1)
    r1 = np.gradient(dot_ab, du, axis=0, edge_order=2) - 0.5 * np.gradient(
        diff, dv, axis=1, edge_order=2
    )
    r2 = np.gradient(dot_ab, dv, axis=1, edge_order=2) + 0.5 * np.gradient(
        diff, du, axis=0, edge_order=2
    )
    stack = np.maximum(np.abs(r1), np.abs(r2))
    return float(interior(stack, margin).max())


def induced_metric(gp):
    """First fundamental form fields (E, F, G) of the immersion."""
    E = metric(gp.phi_u, gp.phi_u)
    F = metric(gp.phi_u, gp.phi_v)
    G = metric(gp.phi_v, gp.phi_v)
    return E, F, G


def second_derivative(f, h, axis):
    """Three-point second derivative along one axis, one-sided at the edges."""
    f = np.moveaxis(f, axis, 0)
    if f.shape[0] < 4:
        raise ValueError("need at least 4 samples for a second derivative")
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / (h * h)
    out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (h * h)
    out[-1] = (2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]) / (h * h)
    return np.moveaxis(out, 0, axis)


def brioschi_curvature(E, F, G, du, dv):
    """Gaussian curvature of a metric given by coefficient fields.

    Classical Brioschi determinant formula evaluated with second-order
    finite differences; intrinsic, so it needs only (E, F, G).
    """
    det = E * G - F * F
    if float(np.min(det)) < 1e-10:
        raise ValueError(f"metric is degenerate (min EG - F^2 = {np.min(det):.3e})")
    Eu = np.gradient(E, du, axis=0, edge_order=2)
    Ev = np.gradient(E, dv, axis=1, edge_order=2)
    Gu = np.gradient(G, du, axis=0, edge_order=2)
    Gv = np.gradient(G, dv, axis=1, edge_order=2)
    Fu = np.gradient(F, du, axis=0, edge_order=2)
    Fv = np.gradient(F, dv, axis=1, edge_order=2)
    Evv = second_derivative(E, dv, axis=1)
    Guu = second_derivative(G, du, axis=0)
    Fuv = np.gradient(Fu, dv, axis=1, edge_order=2)

    def det3(rows):
        m = np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)
        return np.linalg.det(m)

    m1 = det3(
        [
            [-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev],
            [Fv - 0.5 * Gu, E, F],
            [0.5 * Gv, F, G],
        ]
    )
    m2 = det3(
        [
            [np.zeros_like(E), 0.5 * Ev, 0.5 * Gu],
            [0.5 * Ev, E, F],
            [0.5 * Gu, F, G],
        ]
    )
    return (m1 - m2) / (det * det)


def gaussian_curvature(gp):
    """Gaussian curvature field of the induced metric."""
    E, F, G = induced_metric(gp)
    return brioschi_curvature(E, F, G, gp.grid.du, gp.grid.dv)


def _tangential_coefficients(gp, W):
    """Solve the 2x2 normal equations projecting W onto span{phi_u, phi_v}."""
    E, F, G = induced_metric(gp)
    det = E * G - F * F
    a = metric(W, gp.phi_u)
    b = metric(W, gp.phi_v)
    lam = (G * a - F * b) / det
    mu = (-F * a + E * b) / det
    return lam, mu


def _grid_covariant(grid, x_coeff, field_coeff, step, axis):
    """Frame coefficients of the ambient covariant derivative of a grid
    tangent field along one coordinate direction.

    `x_coeff` is the direction's own coefficient field (the flow of the
    coordinate line), `field_coeff` the differentiated field's coefficients;
    the coordinate derivative is a grid stencil and the frame correction is
    the constant connection table.
    """
    dc = np.gradient(field_coeff, step, axis=axis, edge_order=2)
    corr = np.einsum("abk,...a,...b->...k", CONN, x_coeff, field_coeff)
    return dc + corr


@dataclass(frozen=True)
class SecondFundamentalForm:
    """Normal-valued second derivatives of the immersion on the grid.

    huu, huv, hvv are the normal projections of the ambient covariant
    derivatives of phi_u, phi_v along the coordinate directions; `unit_norm`
    is the largest of their metric norms after normalizing both slots to
    unit vectors, and `trace_norm` the norm of the metric trace (twice the
    mean curvature vector).
    """

    huu: Tangent
    huv: Tangent
    hvv: Tangent
    unit_norm: np.ndarray
    trace_norm: np.ndarray


def second_fundamental_form(grid, gp=None):
    if gp is None:
        gp = partials(grid)
    base = grid.base
    cu = frame_coords(gp.phi_u)
    cv = frame_coords(gp.phi_v)
    duu = _grid_covariant(grid, cu, cu, grid.du, 0)
    duv = _grid_covariant(grid, cu, cv, grid.du, 0)
    dvv = _grid_covariant(grid, cv, cv, grid.dv, 1)
    E, F, G = induced_metric(gp)
    det = E * G - F * F
    out = []
    for dc in (duu, duv, dvv):
        D = from_frame_coords(base, dc)
        lam, mu = _tangential_coefficients(gp, D)
        out.append(D - lam * gp.phi_u - mu * gp.phi_v)
    huu, huv, hvv = out
    unit_norm = np.maximum(
        gnorm(huu) / E, np.maximum(gnorm(huv) / np.sqrt(E * G), gnorm(hvv) / G)
    )
    trace = (G[..., None] * np.stack([huu.u, huu.v], 0)
             - 2.0 * F[..., None] * np.stack([huv.u, huv.v], 0)
             + E[..., None] * np.stack([hvv.u, hvv.v], 0)) / det[..., None]
    trace_t = Tangent(base, trace[0], trace[1])
    return SecondFundamentalForm(huu, huv, hvv, unit_norm, gnorm(trace_t))


def classify_P_alignment(grid, gp=None, tol=None):
    """Alignment of the almost product structure with the tangent plane.

    Returns "normal" when P maps the tangent plane into the normal space
    everywhere, "tangent" when P preserves the tangent plane everywhere,
    "mixed" otherwise.  The default tolerance scales with the squared grid
    step, matching the finite-difference error floor.
    """
    if gp is None:
        gp = partials(grid)
    if tol is None:
        tol = max(1e-8, 100.0 * max(grid.du, grid.dv) ** 2)
    pu = apply_P(gp.phi_u)
    scale = gnorm(pu) * gnorm(gp.phi_u)
    a = np.abs(metric(pu, gp.phi_u)) / scale
    b = np.abs(metric(pu, gp.phi_v)) / scale
    normal_dev = float(interior(np.maximum(a, b)).max())
    lam, mu = _tangential_coefficients(gp, pu)
    rest = pu - lam * gp.phi_u - mu * gp.phi_v
    tangent_dev = float(interior(gnorm(rest) / gnorm(pu)).max())
    if normal_dev < tol:
        return "normal"
    if tangent_dev < tol:
        return "tangent"
    return "mixed"


def analyze(grid, seed=0, tol_scale=1.0, adapted_gate=0.05):
    """Full summary report of an adapted immersion grid.

    The report dict uses a fixed key schema (see the CLI docs).  Raises
    ValueError when the grid is not adapted: the relative almost-complex
    defect must stay below `adapted_gate`.
    """
    gp = partials(grid)
    ac = almost_complex_residual(gp)
    ac_max = float(interior(ac).max())
    if ac_max > adapted_gate * tol_scale:
        raise ValueError(
            "grid is not adapted: relative almost-complex defect "
            f"{ac_max:.3e} exceeds {adapted_gate * tol_scale:.1e} "
            f"(real-part residual {gp.projection_max:.3e})"
        )
    cf = extract_coefficients(grid, gp)
    r21, r22, r23 = integrability_residuals(cf, grid.du, grid.dv)
    cr = cr_residuals(cf, grid.du, grid.dv)
    lam = lambda_field(gp)
    K = gaussian_curvature(gp)
    K_int = interior(K)
    sff = second_fundamental_form(grid, gp)
    return {
        "almost_complex_max": ac_max,
        "integrability_21_max": r21,
        "integrability_22_max": r22,
        "integrability_23_max": r23,
        "cr_max": cr,
        "lambda_max_abs": float(interior(np.abs(lam)).max()),
        "K_mean": float(K_int.mean()),
        "K_max_dev": float(np.abs(K_int - K_int.mean()).max()),
        "h_norm_max": float(interior(sff.unit_norm).max()),
        "classification": classify_P_alignment(grid, gp),
        "grid": {
            "u0": grid.u0,
            "v0": grid.v0,
            "du": grid.du,
            "dv": grid.dv,
            "nu": grid.nu,
            "nv": grid.nv,
        },
        "seed": int(seed),
    }
