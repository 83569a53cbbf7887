"""Extrinsic geometry of the revolution hypersurface.

All quantities refer to the hypersurface obtained by rotating a generating
curve (z(s), r(s)) in the warped ambient space.  With c' = (z', r') and
speed |c'| = sqrt(z'^2 + (f r')^2), the two distinct normal curvatures are

    k1 = -(1/|c'|) [ (r'' f z' - z'' f r' + r' f' z'^2)/|c'|^2 + f' r' ]
    k2 =  (1/|c'|) [ h' z'/(h f) - f' r' ]

(k1 along the profile, k2 along the n-1 orbit directions), the mean
curvature is H = k1 + (n-1) k2, and the area element against ds is
|c'| f^(n-1) h^(n-1) times the unit-sphere volume.  The orientation is
fixed so that the normal points away from the axis when the curve is
traversed with increasing z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ambient import AmbientSpace, radial_measure
from .curve import GraphProfile, ParamCurve, curve_derivatives, diff, quadrature


def unit_sphere_volume(n: int) -> float:
    """Volume of the unit sphere S^(n-1), i.e. 2 pi^(n/2) / Gamma(n/2)."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def _curve_arrays(space: AmbientSpace, curve):
    """Return (s, z, r, dz, dr, d2z, d2r) for either curve representation."""
    if isinstance(curve, GraphProfile):
        z = curve.z
        rdot, rddot = diff(curve)
        one = np.ones_like(z)
        return z, z, curve.r, one, rdot, np.zeros_like(z), rddot
    if isinstance(curve, ParamCurve):
        dz, dr, d2z, d2r = curve_derivatives(curve)
        return curve.s, curve.z, curve.r, dz, dr, d2z, d2r
    raise TypeError(f"expected GraphProfile or ParamCurve, got {type(curve)!r}")


def principal_curvatures(space: AmbientSpace, curve) -> tuple[np.ndarray, np.ndarray]:
    """Normal curvatures (k1, k2) at every sample of the curve."""
    s, z, r, dz, dr, d2z, d2r = _curve_arrays(space, curve)
    space.check_z(z)
    space.check_r(r, strict=True)
    f, fp, _ = space.f(z)
    h, hp, _ = space.h(r)
    speed = np.hypot(dz, f * dr)
    if np.any(speed == 0.0):
        raise ValueError("curve is not regular: zero speed sample")
    k1 = -((d2r * f * dz - d2z * f * dr + dr * fp * dz**2) / speed**2 + fp * dr) / speed
    k2 = (hp * dz / (h * f) - fp * dr) / speed
    return k1, k2


def mean_curvature(k1: np.ndarray, k2: np.ndarray, n: int) -> np.ndarray:
    """H = k1 + (n-1) k2, pointwise."""
    return k1 + (n - 1) * k2


def weingarten_norm(k1: np.ndarray, k2: np.ndarray, n: int) -> np.ndarray:
    """Pointwise norm sqrt(k1^2 + (n-1) k2^2) of the shape operator."""
    return np.sqrt(k1 * k1 + (n - 1) * k2 * k2)


def graph_slope(space: AmbientSpace, profile: GraphProfile):
    """Graph quantities (u, v, speed): u = f/speed, v = speed/f.

    v >= 1/f always, with equality exactly at critical points of r; finite
    v is the graph condition.
    """
    rdot, _ = diff(profile)
    f = space.f(profile.z)[0]
    speed = np.sqrt(1.0 + (f * rdot) ** 2)
    return f / speed, speed / f, speed


def _area_element(space: AmbientSpace, curve):
    s, z, r, dz, dr, _, _ = _curve_arrays(space, curve)
    f = space.f(z)[0]
    h = space.h(r)[0]
    speed = np.hypot(dz, f * dr)
    return s, speed * f ** (space.n - 1) * h ** (space.n - 1)


def area(space: AmbientSpace, curve, rule: str = "trapezoid") -> float:
    """Hypersurface area by quadrature of the rotational area element."""
    s, elem = _area_element(space, curve)
    return unit_sphere_volume(space.n) * quadrature(elem, x=s, rule=rule)


def enclosed_volume(space: AmbientSpace, profile: GraphProfile,
                    rule: str = "trapezoid") -> float:
    """Volume enclosed between the hypersurface and the axis r = 0."""
    f = space.f(profile.z)[0]
    vals = f ** space.n * radial_measure(space, profile.r)
    return unit_sphere_volume(space.n) * quadrature(vals, x=profile.z, rule=rule)


def averaged_H_direct(space: AmbientSpace, curve, rule: str = "trapezoid") -> float:
    """Area-weighted average of H, by direct quadrature of H d(area)."""
    k1, k2 = principal_curvatures(space, curve)
    H = mean_curvature(k1, k2, space.n)
    s, elem = _area_element(space, curve)
    denom = quadrature(elem, x=s, rule=rule)
    if denom <= 0.0 or not np.isfinite(denom):
        raise ValueError(f"degenerate area {denom}")
    return quadrature(H * elem, x=s, rule=rule) / denom


def averaged_H_by_parts(space: AmbientSpace, curve: ParamCurve,
                        rule: str = "trapezoid", endpoint_tol: float = 1e-8) -> float:
    """Average of H via the integrated-by-parts split of the k1 integral.

    The k1 part of the H integral is an exact derivative of the tangent
    angle arctan(f r'/z') against (f h)^(n-1); integrating by parts moves
    the derivative off the angle, leaving a bounded integrand even where
    the curve has vertical tangents.  Requires r' = 0 at both endpoints.
    The angle is accumulated continuously along the curve (atan2 plus
    unwrapping), so full windings contribute through the boundary term.
    """
    s, z, r, dz, dr, _, _ = _curve_arrays(space, curve)
    space.check_z(z)
    space.check_r(r, strict=True)
    f, fp, _ = space.f(z)
    h, hp, _ = space.h(r)
    n = space.n
    dr_scale = float(np.max(np.abs(dr)))
    if dr_scale > 0.0 and max(abs(dr[0]), abs(dr[-1])) > endpoint_tol * dr_scale:
        raise ValueError("endpoint r' must vanish for the by-parts formula")

    theta = np.unwrap(np.arctan2(f * dr, dz))
    fh_pow = (f * h) ** (n - 1)
    boundary = fh_pow[0] * theta[0] - fh_pow[-1] * theta[-1]
    i1 = boundary + quadrature(
        (n - 1) * (f * h) ** (n - 2) * (f * hp * dr + h * fp * dz) * theta,
        x=s, rule=rule)
    i2 = quadrature(((n - 1) * hp * dz / (h * f) - n * fp * dr) * f ** (n - 1) * h ** (n - 1),
                    x=s, rule=rule)
    denom = quadrature(np.hypot(dz, f * dr) * fh_pow, x=s, rule=rule)
    return (i1 + i2) / denom


@dataclass(frozen=True)
class GeometrySummary:
    """Per-node curvature data plus the scalar functionals of one state."""

    k1: np.ndarray
    k2: np.ndarray
    H: np.ndarray
    u: np.ndarray
    v: np.ndarray
    speed: np.ndarray
    L_norm: np.ndarray
    area: float
    volume: float
    avg_H: float
    sphere_volume: float


def summarize(space: AmbientSpace, profile: GraphProfile,
              rule: str = "trapezoid") -> GeometrySummary:
    """All geometric diagnostics of a graph state in one pass."""
    k1, k2 = principal_curvatures(space, profile)
    H = mean_curvature(k1, k2, space.n)
    u, v, speed = graph_slope(space, profile)
    s, elem = _area_element(space, profile)
    omega = unit_sphere_volume(space.n)
    denom = quadrature(elem, x=s, rule=rule)
    return GeometrySummary(
        k1=k1, k2=k2, H=H, u=u, v=v, speed=speed,
        L_norm=weingarten_norm(k1, k2, space.n),
        area=omega * denom,
        volume=enclosed_volume(space, profile, rule=rule),
        avg_H=quadrature(H * elem, x=s, rule=rule) / denom,
        sphere_volume=omega,
    )


def summary_table(space: AmbientSpace, profile: GraphProfile,
                  summary: GeometrySummary) -> str:
    """Per-node CSV table ``z,r,k1,k2,H,v``."""
    rows = ["z,r,k1,k2,H,v"]
    for vals in zip(profile.z, profile.r, summary.k1, summary.k2, summary.H, summary.v):
        rows.append(",".join(f"{x:.17g}" for x in vals))
    return "\n".join(rows) + "\n"
