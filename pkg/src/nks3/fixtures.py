"""Closed-form grid generators for the example surfaces and CMC solutions.

Two totally geodesic almost complex surfaces (a torus-like orbit through
circle factors and the diagonal-type round sphere) are emitted in adapted
coordinates, plus the two constant-mean-curvature solution surfaces of the
flat-space equation they correspond to (a round sphere and a circular
cylinder in conformal parameters).  A deliberately non-adapted immersion is
provided as a negative control for gate tests.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .hsystem import HSurfaceGrid, h_equation_residual, h_surface_grid
from .nkspace import SQRT3
from .surface import ImmersionGrid, immersion_grid, interior

__all__ = [
    "FIXTURE_NAMES",
    "FixtureSpec",
    "default_spec",
    "example1_grid",
    "example2_grid",
    "cmc_sphere_epsilon",
    "cmc_cylinder_epsilon",
    "non_adapted_grid",
    "make_fixture",
    "SPHERE_RADIUS",
    "CYLINDER_RADIUS",
]

FIXTURE_NAMES = ("example1", "example2", "cmc_sphere", "cmc_cylinder")

SPHERE_RADIUS = SQRT3 / 2.0
CYLINDER_RADIUS = SQRT3 / 4.0


@dataclass(frozen=True)
class FixtureSpec:
    """Window, steps and counts for one named fixture grid."""

    name: str
    u0: float
    v0: float
    du: float
    dv: float
    nu: int
    nv: int
    pole_margin: float = 0.2

    def u_vals(self):
        return self.u0 + self.du * np.arange(self.nu)

    def v_vals(self):
        return self.v0 + self.dv * np.arange(self.nv)


def default_spec(name, nu=None, nv=None, du=None, dv=None):
    """Per-fixture default windows, centered where the geometry wants it."""
    if name not in FIXTURE_NAMES:
        raise ValueError(f"unknown fixture {name!r}, expected one of {FIXTURE_NAMES}")
    defaults = {
        "example1": dict(du=1e-2, dv=1e-2, nu=101, nv=101),
        "example2": dict(du=5e-3, dv=5e-3, nu=201, nv=201),
        "cmc_sphere": dict(du=6e-3, dv=6e-3, nu=201, nv=201),
        "cmc_cylinder": dict(du=6e-3, dv=6e-3, nu=201, nv=201),
    }[name]
    du = defaults["du"] if du is None else float(du)
    dv = defaults["dv"] if dv is None else float(dv)
    nu = defaults["nu"] if nu is None else int(nu)
    nv = defaults["nv"] if nv is None else int(nv)
    u0, v0 = 0.0, 0.0
    if name == "example2":
        # center the conformal coordinate so the window stays off the poles
        u0 = -0.5 * (nu - 1) * du
    elif name == "cmc_sphere":
        v0 = -0.5 * (nv - 1) * dv
    elif name == "cmc_cylinder":
        v0 = -0.5 * (nv - 1) * dv
    return FixtureSpec(name, u0, v0, du, dv, nu, nv)


def _circle(angle):
    """exp of an imaginary quaternion along the first axis, as (..., 4)."""
    zero = np.zeros_like(angle)
    return np.stack([np.cos(angle), np.sin(angle), zero, zero], axis=-1)


def example1_grid(spec):
    """Product-of-circles surface in adapted coordinates.

    Both factors move along the same circle subgroup; the parameters are a
    fixed linear change from the natural per-factor angles, chosen so the
    v-derivative is J applied to the u-derivative identically.
    """
    u = spec.u_vals()[:, None]
    v = spec.v_vals()[None, :]
    s = u - v / SQRT3
    t = -2.0 * v / SQRT3 + 0.0 * u
    return immersion_grid(spec.u0, spec.v0, spec.du, spec.dv, _circle(s), _circle(t))


def example2_grid(spec):
    """Round-sphere surface in conformal (Mercator) adapted coordinates.

    The underlying map sends a point x of the unit 2-sphere to the pair
    (c - s x, c + s x) with c = 1/2 and s = sqrt3/2 (real part c, imaginary
    part along x).  Spherical coordinates are conformally reparametrized in
    the polar angle so the grid is adapted; the window must keep the
    conformal factor above `pole_margin`.
    """
    a = spec.u_vals()
    sin_u = 1.0 / np.cosh(a)
    if float(sin_u.min()) < spec.pole_margin:
        raise ValueError(
            f"window reaches a conformal factor {sin_u.min():.3f}, below the "
            f"pole margin {spec.pole_margin}"
        )
    cos_u = -np.tanh(a)
    v = spec.v_vals()
    x = np.empty((spec.nu, spec.nv, 3))
    x[..., 0] = sin_u[:, None] * np.cos(v)[None, :]
    x[..., 1] = sin_u[:, None] * np.sin(v)[None, :]
    x[..., 2] = cos_u[:, None] + 0.0 * v[None, :]
    half = np.full(x.shape[:-1] + (1,), 0.5)
    p = np.concatenate([half, -(SQRT3 / 2.0) * x], axis=-1)
    q = np.concatenate([half, (SQRT3 / 2.0) * x], axis=-1)
    return immersion_grid(spec.u0, spec.v0, spec.du, spec.dv, p, q)


def _pick_orientation(spec, builder):
    """Build both parameter orientations and keep the one that satisfies the
    quadratic second-order equation the solution surfaces must obey."""
    best = None
    best_res = np.inf
    for swap in (False, True):
        try:
            eps = builder(spec, swap)
        except ValueError:
            continue
        hs = HSurfaceGrid(spec.u0, spec.v0, spec.du, spec.dv, eps)
        res = float(interior(h_equation_residual(hs)).max())
        if res < best_res:
            best, best_res = hs, res
    if best is None:
        raise ValueError(f"no valid orientation for fixture window {spec}")
    return h_surface_grid(best.u0, best.v0, best.du, best.dv, best.eps)


def cmc_sphere_epsilon(spec):
    """Round sphere of radius sqrt3/2 in conformal coordinates."""
    r = SPHERE_RADIUS

    def build(spec, swap):
        u = spec.u_vals()[:, None]
        v = spec.v_vals()[None, :]
        lon, mer = (v, u) if swap else (u, v)
        sech = 1.0 / np.cosh(mer)
        if float(sech.min()) < spec.pole_margin:
            raise ValueError(
                f"conformal factor {sech.min():.3f} below pole margin "
                f"{spec.pole_margin}"
            )
        return np.stack(
            [
                r * sech * np.cos(lon) + 0.0 * (lon + mer),
                r * sech * np.sin(lon) + 0.0 * (lon + mer),
                r * np.tanh(mer) + 0.0 * (lon + mer),
            ],
            axis=-1,
        )

    return _pick_orientation(spec, build)


def cmc_cylinder_epsilon(spec):
    """Circular cylinder of radius sqrt3/4 in arclength coordinates."""
    r = CYLINDER_RADIUS

    def build(spec, swap):
        u = spec.u_vals()[:, None]
        v = spec.v_vals()[None, :]
        wrap, axis = (v, u) if swap else (u, v)
        return np.stack(
            [
                r * np.cos(wrap / r) + 0.0 * axis,
                r * np.sin(wrap / r) + 0.0 * axis,
                axis + 0.0 * wrap,
            ],
            axis=-1,
        )

    return _pick_orientation(spec, build)


def non_adapted_grid(spec):
    """Negative control: a smooth immersion whose tangent planes are not
    J-invariant (independent circle factors along different axes)."""
    u = spec.u_vals()[:, None]
    v = spec.v_vals()[None, :]
    p = _circle(u + 0.0 * v)
    zero = np.zeros((spec.nu, spec.nv))
    q = np.stack([np.cos(v) + 0.0 * u, zero, np.sin(v) + 0.0 * u, zero], axis=-1)
    return immersion_grid(
        spec.u0, spec.v0, spec.du, spec.dv, p, q, adapted=False
    )


def make_fixture(spec):
    """Dispatch a FixtureSpec to its generator; immersion grids and solution
    surfaces are distinguished by the fixture name."""
    builders = {
        "example1": example1_grid,
        "example2": example2_grid,
        "cmc_sphere": cmc_sphere_epsilon,
        "cmc_cylinder": cmc_cylinder_epsilon,
    }
    if spec.name not in builders:
        raise ValueError(f"unknown fixture {spec.name!r}")
    return builders[spec.name](spec)
