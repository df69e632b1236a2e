"""The correspondence between almost complex surfaces and flat-space
constant-mean-curvature data.

An adapted surface grid yields a closed coefficient one-form whose potential
is a map into R^3 satisfying the quadratic second-order equation

    eps_uu + eps_vv = -(4 / sqrt3) eps_u x eps_v,

and conversely a solution grid of that equation integrates back to an
adapted surface through the rotated coefficient pair.  Both directions are
discretized here; each emits a certificate (path-independence or
cross-ordering compatibility residual) that callers must treat as the
correctness signal, because sampled inputs only satisfy the compatibility
conditions to discretization error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import quat
from .nkspace import SQRT3
from .surface import (
    almost_complex_residual,
    extract_coefficients,
    immersion_grid,
    induced_metric,
    interior,
    lambda_field,
    partials,
    rotate_pair_back,
    second_derivative,
)

__all__ = [
    "CertificateError",
    "HSurfaceGrid",
    "h_surface_grid",
    "h_equation_residual",
    "epsilon_from_surface",
    "surface_from_epsilon",
    "mean_curvature",
    "metric_factor_check",
    "window_overlap",
    "sphere_fit",
]


class CertificateError(RuntimeError):
    """An integration self-check failed: the input does not satisfy the
    compatibility conditions to the expected discretization order."""


@dataclass(frozen=True)
class HSurfaceGrid:
    """Regular grid of values of a map eps: R^2 -> R^3 (shape (nu, nv, 3))."""

    u0: float
    v0: float
    du: float
    dv: float
    eps: np.ndarray

    @property
    def nu(self):
        return self.eps.shape[0]

    @property
    def nv(self):
        return self.eps.shape[1]

    @property
    def u_vals(self):
        return self.u0 + self.du * np.arange(self.nu)

    @property
    def v_vals(self):
        return self.v0 + self.dv * np.arange(self.nv)


def h_surface_grid(u0, v0, du, dv, eps):
    """Validated constructor: checks shape, size, steps, and that the
    first derivatives do not vanish on the interior."""
    eps = np.asarray(eps, dtype=float)
    if eps.ndim != 3 or eps.shape[-1] != 3:
        raise ValueError(f"expected an (nu, nv, 3) array, got {eps.shape}")
    if eps.shape[0] < 5 or eps.shape[1] < 5:
        raise ValueError(f"grid must be at least 5x5, got {eps.shape[:2]}")
    if not (du > 0 and dv > 0):
        raise ValueError(f"grid steps must be positive, got du={du}, dv={dv}")
    hs = HSurfaceGrid(float(u0), float(v0), float(du), float(dv), eps)
    eu, ev = _eps_partials(hs)
    speed = np.sum(eu * eu, axis=-1) + np.sum(ev * ev, axis=-1)
    if float(interior(speed).min()) < 1e-10:
        raise ValueError("derivatives vanish on the interior; not a solution surface")
    return hs


def _eps_partials(hs):
    eu = np.gradient(hs.eps, hs.du, axis=0, edge_order=2)
    ev = np.gradient(hs.eps, hs.dv, axis=1, edge_order=2)
    return eu, ev


def h_equation_residual(hs):
    """Pointwise norm of the defect of the quadratic second-order equation."""
    eu, ev = _eps_partials(hs)
    lap = second_derivative(hs.eps, hs.du, axis=0) + second_derivative(
        hs.eps, hs.dv, axis=1
    )
    defect = lap + (4.0 / SQRT3) * np.cross(eu, ev)
    return np.linalg.norm(defect, axis=-1)


def _cumtrapz(f, h, axis):
    """Cumulative trapezoid integral along one axis, starting at zero."""
    f = np.moveaxis(f, axis, 0)
    steps = 0.5 * h * (f[1:] + f[:-1])
    out = np.concatenate([np.zeros_like(f[:1]), np.cumsum(steps, axis=0)], axis=0)
    return np.moveaxis(out, 0, axis)


def _default_cert_tol(du, dv, tol_scale):
    return tol_scale * 200.0 * max(du, dv) ** 2


def epsilon_from_surface(grid, cf=None, tol_scale=1.0):
    """Integrate the rotated coefficient pair to the potential map.

    Returns (HSurfaceGrid, certificate dict).  The output grid covers the
    input window shrunk by one cell on each side, so only centrally
    stenciled coefficient samples enter the integrals (one-sided edge
    stencils have a different error constant; integrating across that kink
    would leave a value jump at the first output row that later double
    differentiation amplifies by the inverse squared step).

    The primary integration runs u-first then v; the certificate compares
    against the v-first path (a closedness check) and evaluates the
    second-order equation on the result.  Raises CertificateError when the
    paths disagree beyond the discretization-order tolerance.
    """
    if grid.nu < 7 or grid.nv < 7:
        raise ValueError(
            f"need at least a 7x7 grid to integrate, got {grid.nu}x{grid.nv}"
        )
    if cf is None:
        cf = extract_coefficients(grid)
    a, b = cf.alpha[1:-1, 1:-1], cf.beta[1:-1, 1:-1]
    eps_uv = _cumtrapz(a[:, :1], grid.du, axis=0) + _cumtrapz(b, grid.dv, axis=1)
    eps_vu = _cumtrapz(b[:1, :], grid.dv, axis=1) + _cumtrapz(a, grid.du, axis=0)
    loop = float(np.linalg.norm(eps_uv - eps_vu, axis=-1).max())
    hs = HSurfaceGrid(
        grid.u0 + grid.du, grid.v0 + grid.dv, grid.du, grid.dv, eps_uv
    )
    cert = {
        "loop_max": loop,
        "h_equation_max": float(interior(h_equation_residual(hs)).max()),
    }
    tol = _default_cert_tol(grid.du, grid.dv, tol_scale)
    if loop > tol:
        raise CertificateError(
            f"path-ordering residual {loop:.3e} exceeds {tol:.1e}; "
            "the coefficient one-form is not closed to discretization order"
        )
    return hs, cert


def _rk4_segment(p, c0, c1, h):
    """One 4th-order step of p' = p * c(t) across a grid segment, with the
    imaginary-quaternion coefficient interpolated linearly in the segment."""
    cm = quat.embed(0.5 * (c0 + c1))
    c0 = quat.embed(c0)
    c1 = quat.embed(c1)
    k1 = quat.qmul(p, c0)
    k2 = quat.qmul(p + 0.5 * h * k1, cm)
    k3 = quat.qmul(p + 0.5 * h * k2, cm)
    k4 = quat.qmul(p + h * k3, c1)
    out = p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    drift = float(np.abs(quat.norm(out) - 1.0).max())
    return quat.normalize(out), drift


def _integrate_chain(start, coeff, h, axis):
    """Integrate p' = p * coeff along `axis`, starting from the slice value
    `start` at index 0 of that axis; `start` carries the remaining axes.

    Returns the unit-quaternion grid and the largest pre-renormalization
    drift over all steps.
    """
    coeff = np.moveaxis(coeff, axis, 0)
    out = np.empty(coeff.shape[:-1] + (4,))
    out[0] = start
    drift = 0.0
    for k in range(coeff.shape[0] - 1):
        out[k + 1], d = _rk4_segment(out[k], coeff[k], coeff[k + 1], h)
        drift = max(drift, d)
    return np.moveaxis(out, 0, axis), drift


def _integrate_pair(c_u, c_v, du, dv, start):
    """Integrate a quaternion grid with both coordinate derivatives given,
    along the two path orderings (u-spine then v, v-spine then u)."""
    spine_u, d1 = _integrate_chain(start, c_u[:, 0], du, axis=0)
    ufirst, d2 = _integrate_chain(spine_u, c_v, dv, axis=1)
    spine_v, d3 = _integrate_chain(start, c_v[0], dv, axis=0)
    vfirst, d4 = _integrate_chain(spine_v, c_u, du, axis=0)
    return ufirst, vfirst, max(d1, d2, d3, d4)


def surface_from_epsilon(hs, p0=None, q0=None, tol_scale=1.0):
    """Integrate a solution grid of the quadratic equation back to an
    adapted immersion with initial point (p0, q0) at the grid origin.

    Returns (ImmersionGrid, certificate dict).  The output grid covers the
    input window shrunk by one cell on each side: the derivative stencils
    feeding the integrator are uniformly central there, so the output stays
    smooth through its own edges (one-sided stencils at the input edges have
    a different error constant, and the double differentiation done by later
    analysis would amplify that kink by the inverse squared step).

    The certificate carries the second-order equation residual of the input,
    the largest disagreement between the two path orderings of the
    quaternion integration, the per-step unit-norm drift before
    renormalization, and the adaptedness defect of the output.  Raises
    CertificateError when the input fails the equation residual gate or the
    orderings disagree beyond tolerance.
    """
    if hs.nu < 7 or hs.nv < 7:
        raise ValueError(
            f"need at least a 7x7 grid to integrate, got {hs.nu}x{hs.nv}"
        )
    p0 = quat.ONE if p0 is None else quat.unit(p0)
    q0 = quat.ONE if q0 is None else quat.unit(q0)
    tol = _default_cert_tol(hs.du, hs.dv, tol_scale)
    eq_res = float(interior(h_equation_residual(hs)).max())
    if eq_res > tol:
        raise CertificateError(
            f"second-order equation residual {eq_res:.3e} exceeds {tol:.1e}; "
            "input is not a solution surface"
        )
    eu, ev = _eps_partials(hs)
    eu = eu[1:-1, 1:-1]
    ev = ev[1:-1, 1:-1]
    at, bt = rotate_pair_back(eu, ev)
    gt = (SQRT3 / 2.0) * bt + 0.5 * at
    dt = 0.5 * bt - (SQRT3 / 2.0) * at

    p_u, p_v, drift_p = _integrate_pair(at, bt, hs.du, hs.dv, p0)
    q_u, q_v, drift_q = _integrate_pair(gt, dt, hs.du, hs.dv, q0)
    compat = max(float(np.abs(p_u - p_v).max()), float(np.abs(q_u - q_v).max()))
    if compat > tol:
        raise CertificateError(
            f"path-ordering disagreement {compat:.3e} exceeds {tol:.1e}"
        )
    grid = immersion_grid(
        hs.u0 + hs.du, hs.v0 + hs.dv, hs.du, hs.dv, p_u, q_u
    )
    gp = partials(grid)
    cert = {
        "h_equation_max": eq_res,
        "compat_max": compat,
        "drift_max": max(drift_p, drift_q),
        "almost_complex_max": float(interior(almost_complex_residual(gp)).max()),
    }
    return grid, cert


def mean_curvature(hs, iso_tol=None):
    """Mean curvature field of a solution grid in conformal coordinates.

    Requires the parametrization to be conformal (equal-speed orthogonal
    derivatives) within `iso_tol` relative deviation on the interior; raises
    ValueError otherwise, since the formula divides by the common speed.
    The default tolerance scales with the squared grid step.
    """
    if iso_tol is None:
        iso_tol = max(1e-8, 100.0 * max(hs.du, hs.dv) ** 2)
    eu, ev = _eps_partials(hs)
    e2 = np.sum(eu * eu, axis=-1)
    g2 = np.sum(ev * ev, axis=-1)
    f = np.sum(eu * ev, axis=-1)
    dev = np.maximum(np.abs(e2 - g2), np.abs(f)) / np.maximum(e2, g2)
    worst = float(interior(dev).max())
    if worst > iso_tol:
        raise ValueError(
            f"coordinates are not conformal (relative deviation {worst:.3e})"
        )
    lap = second_derivative(hs.eps, hs.du, axis=0) + second_derivative(
        hs.eps, hs.dv, axis=1
    )
    n = np.cross(eu, ev)
    n = n / np.linalg.norm(n, axis=-1, keepdims=True)
    return np.sum(lap * n, axis=-1) / (2.0 * e2)


def sphere_fit(points):
    """Algebraic least-squares sphere through a point cloud (..., 3).

    Linearizes |x - c|^2 = r^2 to 2 c . x + (r^2 - |c|^2) = |x|^2 and solves
    the normal equations.  Returns (center, radius, max_dev) where max_dev
    is the largest deviation of a point's distance-to-center from the fitted
    radius.
    """
    x = np.asarray(points, dtype=float).reshape(-1, 3)
    A = np.concatenate([2.0 * x, np.ones((x.shape[0], 1))], axis=1)
    rhs = np.sum(x * x, axis=-1)
    sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    center = sol[:3]
    radius = float(np.sqrt(sol[3] + center @ center))
    dist = np.linalg.norm(x - center, axis=-1)
    return center, radius, float(np.abs(dist - radius).max())


def window_overlap(au0, av0, anu, anv, bu0, bv0, bnu, bnv, du, dv):
    """Index slices of the common (u, v) window of two grids sharing steps."""

    def offset(b0, a0, h):
        k = (b0 - a0) / h
        ki = int(round(k))
        if abs(k - ki) > 1e-6:
            raise ValueError("grids are not aligned to a common lattice")
        return ki

    ou = offset(bu0, au0, du)
    ov = offset(bv0, av0, dv)
    lo_u, lo_v = max(0, ou), max(0, ov)
    hi_u = min(anu, ou + bnu)
    hi_v = min(anv, ov + bnv)
    if hi_u - lo_u < 5 or hi_v - lo_v < 5:
        raise ValueError("grids overlap on fewer than 5x5 cells")
    a_slice = (slice(lo_u, hi_u), slice(lo_v, hi_v))
    b_slice = (slice(lo_u - ou, hi_u - ou), slice(lo_v - ov, hi_v - ov))
    return a_slice, b_slice


def metric_factor_check(grid, hs, lambda_tol=1e-4):
    """Pointwise ratio of the surface metric to the flat-potential metric.

    Only meaningful when the holomorphic quadratic coefficient vanishes;
    returns a dict with status "not_applicable" otherwise.  On applicable
    pairs the ratio field must be the constant 2.  The two grids may cover
    offset windows of the same lattice; the ratio is taken on the overlap.
    """
    if abs(grid.du - hs.du) > 1e-12 or abs(grid.dv - hs.dv) > 1e-12:
        raise ValueError("grid steps differ between the surface and the potential")
    gp = partials(grid)
    lam_max = float(interior(np.abs(lambda_field(gp))).max())
    if lam_max > lambda_tol:
        return {"status": "not_applicable", "lambda_max_abs": lam_max}
    eu, _ = _eps_partials(hs)
    E, _, _ = induced_metric(gp)
    g_slice, h_slice = window_overlap(
        grid.u0, grid.v0, grid.nu, grid.nv,
        hs.u0, hs.v0, hs.nu, hs.nv, grid.du, grid.dv,
    )
    ratio = E[g_slice] / np.sum(eu * eu, axis=-1)[h_slice]
    ratio_int = interior(ratio)
    return {
        "status": "ok",
        "lambda_max_abs": lam_max,
        "ratio_mean": float(ratio_int.mean()),
        "ratio_max_dev": float(np.abs(ratio_int - 2.0).max()),
    }
