"""A-priori constants and runtime monitors for the volume-preserving flow.

Every quantitative estimate available for the flow is turned into a
number that can be checked against the evolving state:

* radius localization: the profile must cross the volume-equivalent
  radius, and an area budget caps how far above it the profile can reach;
* a bound on |averaged H| in terms of sup norms of the warping functions;
* an exponential-weight bound on the graph slope v;
* an area threshold sufficient for long-time existence;
* boundary derivative identities satisfied by flow states at the slab
  walls, evaluated as residuals with one-sided stencils.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .ambient import (AmbientSpace, Rect, radial_measure, radial_measure_inverse,
                      sup_norms)
from .curve import GraphProfile, diff
from .geometry import (GeometrySummary, mean_curvature, principal_curvatures,
                       unit_sphere_volume)

# Monitor tolerances.  The dissipation check compares a first-order finite
# difference of the area against the exact decay integral; it is only
# meaningful while the per-step area decrement stands out from roundoff.
AREA_INCREASE_TOL = 1e-12
DISSIPATION_RTOL = 0.05
DISSIPATION_FLOOR = 1e-10   # active while D*dt >= floor * area
VOLUME_DRIFT_TOL = 1e-6
MONITOR_DT_MAX = 1e-4


@lru_cache(maxsize=256)
def _slab_f_integral(space: AmbientSpace, a: float, b: float) -> float:
    space.check_z([a, b])
    val, _ = quad(lambda z: float(space.f(z)[0]) ** space.n, a, b,
                  epsabs=1e-13, epsrel=1e-13, limit=200)
    return val


def slab_f_integral(space: AmbientSpace, slab: tuple[float, float]) -> float:
    """Integral of f^n over the slab, by adaptive quadrature (cached; the
    monitors re-derive the radius cap at every recorded step)."""
    return _slab_f_integral(space, float(slab[0]), float(slab[1]))


def slab_volume(space: AmbientSpace, slab: tuple[float, float]) -> float | None:
    """Total volume of the slab up to the far axis, None when infinite."""
    if space.h_zero is None:
        return None
    total = radial_measure(space, space.h_zero)
    return unit_sphere_volume(space.n) * slab_f_integral(space, slab) * total


def radius_bounds(space: AmbientSpace, slab: tuple[float, float],
                  volume: float, area: float) -> tuple[float, float | None]:
    """Volume-equivalent radius and a-priori radius cap.

    Returns ``(r_volume, r_cap)``.  ``r_volume`` is the radius whose
    coaxial tube over the slab encloses exactly ``volume``; any profile
    with that enclosed volume crosses it.  ``r_cap`` caps the profile
    above ``r_volume`` using the area budget; when the defining equation
    has no solution below the zero of h, the cap is returned as None and
    the zero of h itself is the only constraint.
    """
    if volume <= 0.0 or area <= 0.0:
        raise ValueError("volume and area must be positive")
    omega = unit_sphere_volume(space.n)
    f_int = slab_f_integral(space, slab)
    r_volume = radial_measure_inverse(space, volume / (omega * f_int))
    inv_fn = _inv_fn_sup(space, float(slab[0]), float(slab[1]))
    target = area * inv_fn / omega + radial_measure(space, r_volume)
    if space.h_zero is not None and target > radial_measure(space, space.h_zero):
        return r_volume, None
    return r_volume, radial_measure_inverse(space, target)


def _safe_exp(x: float) -> float:
    """exp that saturates to inf instead of raising; the slope-estimate
    constants blow up as the radius envelope approaches a coordinate
    zero, and an infinite cap is a vacuous bound, not an error."""
    return math.inf if x > 709.0 else math.exp(x)


def _f_sup(space: AmbientSpace, slab: tuple[float, float], expr) -> float:
    """Exact sup of |expr(f, f')| over the slab (candidates: ends and z=0)."""
    a, b = slab
    zs = [a, b] + ([0.0] if a < 0.0 < b else [])
    f, fp, _ = space.f(np.asarray(zs))
    return float(np.max(np.abs(expr(f, fp))))


@lru_cache(maxsize=256)
def _inv_fn_sup(space: AmbientSpace, a: float, b: float) -> float:
    return _f_sup(space, (a, b), lambda f, fp: 1.0 / f**space.n)


def avg_H_bound(space: AmbientSpace, slab: tuple[float, float],
                r_lo: float, r_hi: float) -> float:
    """Upper bound for |averaged H| on graphs with radii in [r_lo, r_hi].

    The constant is (n-1)(1 + pi/2) sup|h'/(f h)| + ((n-1) pi/2 + n)
    sup|f'/f| over the slab-times-radius rectangle: the first term bounds
    the turning-angle integral of the profile curvature, the second the
    drift terms proportional to f'/f.
    """
    n = space.n
    norms = sup_norms(space, Rect(slab[0], slab[1], r_lo, r_hi))
    return ((n - 1) * (1.0 + math.pi / 2.0) * norms["h'/(f h)"]
            + ((n - 1) * math.pi / 2.0 + n) * norms["f'/f"])


@dataclass(frozen=True)
class BoundSet:
    """All a-priori constants for one configuration, frozen at start.

    Attributes
    ----------
    r_volume, r_cap : radius localization (cap None when unconstraining).
    avg_H_cap : bound on |averaged H|.
    curv_const : ambient constant sup(f^2) sup|Ric| + (n-1)(sup|h''/h| +
        sup|h'/h|^2) entering the slope estimate.
    weight_rate : rate of the exponential weight e^(rate * r) in the slope
        estimate; curv_const + (n-1) sup|h'/h| + 1.
    decay_rate : weight_rate / sup(f^2).
    source_const : source bound of the slope inequality.
    v_cap : resulting sup bound for the slope v along the flow.
    longtime_area_cap : area threshold sufficient for long-time existence.
    slab_vol : total slab volume (None when infinite).
    """

    n: int
    slab: tuple[float, float]
    r_lo: float
    r_hi: float
    max_v0: float
    volume0: float
    r_volume: float
    r_cap: float | None
    avg_H_cap: float
    curv_const: float
    weight_rate: float
    decay_rate: float
    source_const: float
    v_cap: float
    longtime_area_cap: float
    longtime_ok: bool
    slab_vol: float | None

    def to_json_dict(self) -> dict:
        """Plain-JSON view; unbounded (infinite) values serialize as null,
        matching the None convention of r_cap and slab_vol."""
        out = {}
        for name in ("n", "slab", "r_lo", "r_hi", "max_v0", "volume0",
                     "r_volume", "r_cap", "avg_H_cap", "curv_const",
                     "weight_rate", "decay_rate", "source_const", "v_cap",
                     "longtime_area_cap", "longtime_ok", "slab_vol"):
            val = getattr(self, name)
            if isinstance(val, tuple):
                val = list(val)
            if isinstance(val, float) and not math.isfinite(val):
                val = None
            out[name] = val
        return out


def graph_bound(space: AmbientSpace, slab: tuple[float, float], r_lo: float,
                r_hi: float, r_cap: float | None, max_v0: float):
    """Constants of the graph-slope estimate.

    Returns ``(curv_const, weight_rate, decay_rate, source_const, v_cap)``
    with ``v_cap = max(e^(weight_rate * r_hi) * max_v0,
    source_const / decay_rate)``.
    """
    n = space.n
    norms = sup_norms(space, Rect(slab[0], slab[1], r_lo, r_hi))
    curv_const = (norms["f^2"] * norms["ricci"]
                  + (n - 1) * (norms["h''/h"] + norms["h'^2/h^2"]))
    rate = curv_const + (n - 1) * norms["h'/h"] + 1.0
    decay = rate / norms["f^2"]
    r_eff = r_cap if r_cap is not None else space.h_zero
    if r_eff is None:
        raise ValueError("radius cap undefined in a space with no far axis")
    source = (rate * _safe_exp(rate * r_eff) * norms["f^-2"]
              * (avg_H_bound(space, slab, r_lo, r_hi)
                 + 2.0 * norms["f'/f"] + rate * norms["f^-1"]))
    v_cap = max(_safe_exp(rate * r_hi) * max_v0, source / decay)
    return curv_const, rate, decay, source, v_cap


def longtime_area_check(space: AmbientSpace, slab: tuple[float, float],
                        volume: float, area: float) -> tuple[float, bool]:
    """Area threshold sufficient for long-time existence, and the verdict.

    The threshold is min(V, vol(slab) - V) / (sup(f^-n) * integral f^n);
    with an infinite slab volume the min reduces to V.
    """
    f_int = slab_f_integral(space, slab)
    inv_fn = _f_sup(space, slab, lambda f, fp: 1.0 / f**space.n)
    vol_g = slab_volume(space, slab)
    head = volume if vol_g is None else min(volume, vol_g - volume)
    threshold = head / (inv_fn * f_int)
    return threshold, area <= threshold


def compute_bound_set(space: AmbientSpace, slab: tuple[float, float],
                      volume: float, area: float, r_lo: float, r_hi: float,
                      max_v0: float) -> BoundSet:
    """Assemble every a-priori constant for a configuration."""
    r_vol, r_cap = radius_bounds(space, slab, volume, area)
    h_cap = avg_H_bound(space, slab, r_lo, r_hi)
    curv_const, rate, decay, source, v_cap = graph_bound(
        space, slab, r_lo, r_hi, r_cap, max_v0)
    threshold, ok = longtime_area_check(space, slab, volume, area)
    return BoundSet(
        n=space.n, slab=slab, r_lo=r_lo, r_hi=r_hi, max_v0=max_v0,
        volume0=volume, r_volume=r_vol, r_cap=r_cap, avg_H_cap=h_cap,
        curv_const=curv_const, weight_rate=rate, decay_rate=decay,
        source_const=source, v_cap=v_cap, longtime_area_cap=threshold,
        longtime_ok=ok, slab_vol=slab_volume(space, slab))


# -- boundary identities ---------------------------------------------------

def _stencil_weights(offsets, order: int) -> np.ndarray:
    """Finite-difference weights for the given derivative order at 0.

    Solves the Vandermonde moment system for nodes at ``offsets`` (in units
    of the grid step); exact on polynomials of degree len(offsets)-1.
    """
    offsets = np.asarray(offsets, dtype=float)
    m = len(offsets)
    rhs = np.zeros(m)
    rhs[order] = math.factorial(order)
    return np.linalg.solve(np.vander(offsets, m, increasing=True).T, rhs)


def _endpoint_value_and_slope(values: np.ndarray, dz: float, left: bool):
    """Value and z-derivative at an endpoint from the three nearest
    interior nodes (the boundary node itself is not used, so a lower-order
    boundary closure elsewhere cannot pollute the estimate)."""
    if left:
        y = values[1:4]
        offs = np.array([1.0, 2.0, 3.0])
    else:
        y = values[-4:-1][::-1]
        offs = np.array([-1.0, -2.0, -3.0])
    w0 = _stencil_weights(offs, 0)
    w1 = _stencil_weights(offs, 1)
    return float(w0 @ y), float(w1 @ y) / dz


@dataclass(frozen=True)
class BoundaryResiduals:
    """Residuals of the wall identities, one value per endpoint (a, b)."""

    dH: tuple[float, float]
    dk2: tuple[float, float]


def boundary_identity_residuals(space: AmbientSpace, profile: GraphProfile,
                                avg_H: float) -> BoundaryResiduals:
    """Residuals of the two first-order wall identities.

    At the slab walls a flow state satisfies dH/dz = (H - avg_H) f'/f, and
    any orthogonal state satisfies dk2/dz = (f'/f)(k1 - k2).  Both sides
    are estimated from interior nodes by second-order one-sided stencils.
    """
    k1, k2 = principal_curvatures(space, profile)
    H = mean_curvature(k1, k2, space.n)
    dz = profile.dz
    out_H = []
    out_k2 = []
    for left, z_end in ((True, profile.a), (False, profile.b)):
        f, fp, _ = space.f(z_end)
        H_end, dH = _endpoint_value_and_slope(H, dz, left)
        k1_end, _ = _endpoint_value_and_slope(k1, dz, left)
        k2_end, dk2 = _endpoint_value_and_slope(k2, dz, left)
        out_H.append(dH - (H_end - avg_H) * float(fp / f))
        out_k2.append(dk2 - float(fp / f) * (k1_end - k2_end))
    return BoundaryResiduals(dH=(out_H[0], out_H[1]), dk2=(out_k2[0], out_k2[1]))


def boundary_compat_residual(space: AmbientSpace, profile: GraphProfile,
                             avg_H: float) -> tuple[float, float]:
    """Residual of the third-order compatibility relation at each wall.

    Differentiating the flow equation in z and evaluating where r' = 0
    leaves r''' + (n+1)(f'/f) r'' + 2(n-1) h' f'/(h f^3) - avg_H f'/f^2 = 0.
    The derivatives of r are taken directly from the state with one-sided
    second-order stencils.
    """
    n = space.n
    r = profile.r
    dz = profile.dz
    w2 = _stencil_weights(np.arange(4.0), 2)
    w3 = _stencil_weights(np.arange(5.0), 3)
    out = []
    for left, z_end, r_end in ((True, profile.a, r[0]), (False, profile.b, r[-1])):
        if left:
            rpp = float(w2 @ r[:4]) / dz**2
            rppp = float(w3 @ r[:5]) / dz**3
        else:
            rpp = float(w2 @ r[-4:][::-1]) / dz**2
            rppp = -float(w3 @ r[-5:][::-1]) / dz**3
        f, fp, _ = space.f(z_end)
        h, hp, _ = space.h(r_end)
        out.append(float(rppp + (n + 1) * (fp / f) * rpp
                         + 2.0 * (n - 1) * hp * fp / (h * f**3)
                         - avg_H * fp / f**2))
    return out[0], out[1]


# -- runtime monitors ------------------------------------------------------

@dataclass(frozen=True)
class MonitorCheck:
    observed: float
    threshold: float
    passed: bool


@dataclass(frozen=True)
class ViolationReport:
    """Outcome of every monitor at one recorded time."""

    time: float
    checks: dict[str, MonitorCheck] = field(repr=False)

    @property
    def failures(self) -> list[str]:
        return [name for name, c in self.checks.items() if not c.passed]


def dissipation_integral(space: AmbientSpace, profile: GraphProfile,
                         avg_H: float) -> float:
    """Exact area-decay integral of (avg_H - H)^2 over the hypersurface."""
    k1, k2 = principal_curvatures(space, profile)
    H = mean_curvature(k1, k2, space.n)
    rdot, _ = diff(profile)
    f = space.f(profile.z)[0]
    h = space.h(profile.r)[0]
    speed = np.sqrt(1.0 + (f * rdot) ** 2)
    elem = speed * f ** (space.n - 1) * h ** (space.n - 1)
    from .curve import quadrature
    return unit_sphere_volume(space.n) * quadrature(
        (avg_H - H) ** 2 * elem, x=profile.z)


def run_monitors(space: AmbientSpace, bound_set: BoundSet,
                 profile: GraphProfile, summary: GeometrySummary, t: float,
                 prev_area: float | None = None,
                 prev_dissipation: float | None = None,
                 dt: float | None = None) -> ViolationReport:
    """Check the current state against every a-priori bound.

    The radius cap is re-derived from the current area (with the initial
    volume) and the stricter of the frozen and the running cap is used.
    ``prev_*`` and ``dt`` feed the area-monotonicity and dissipation
    checks for the step that produced this state; pass None at t = 0.
    """
    checks: dict[str, MonitorCheck] = {}

    _, r_cap_now = radius_bounds(space, bound_set.slab, bound_set.volume0,
                                 summary.area)
    caps = [c for c in (bound_set.r_cap, r_cap_now) if c is not None]
    if space.h_zero is not None:
        caps.append(space.h_zero)
    cap = min(caps) if caps else math.inf
    r_max = float(np.max(profile.r))
    checks["radius_cap"] = MonitorCheck(r_max, cap, r_max < cap)

    checks["avg_H_cap"] = MonitorCheck(abs(summary.avg_H), bound_set.avg_H_cap,
                                       abs(summary.avg_H) <= bound_set.avg_H_cap)

    v_max = float(np.max(summary.v))
    checks["slope_cap"] = MonitorCheck(v_max, bound_set.v_cap,
                                       v_max <= bound_set.v_cap)

    if prev_area is not None:
        growth = summary.area - prev_area
        checks["area_monotone"] = MonitorCheck(growth, AREA_INCREASE_TOL,
                                               growth <= AREA_INCREASE_TOL)

    if (prev_area is not None and prev_dissipation is not None
            and dt is not None and dt <= MONITOR_DT_MAX
            and prev_dissipation * dt >= DISSIPATION_FLOOR * summary.area):
        rate = (summary.area - prev_area) / dt
        mismatch = abs(rate + prev_dissipation) / prev_dissipation
        checks["dissipation"] = MonitorCheck(mismatch, DISSIPATION_RTOL,
                                             mismatch <= DISSIPATION_RTOL)

    drift = abs(summary.volume - bound_set.volume0) / bound_set.volume0
    checks["volume_drift"] = MonitorCheck(drift, VOLUME_DRIFT_TOL,
                                          drift <= VOLUME_DRIFT_TOL)

    return ViolationReport(time=t, checks=checks)
