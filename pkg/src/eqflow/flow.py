"""Time integration of the volume-preserving flow for graph profiles.

The radial graph r(z, t) moves by (avg_H - H) in the normal direction,
which for graphs is the scalar equation

    dr/dt = r'' / |c'|^2 + (f'/f) (1/|c'|^2 + n) r'
            - (n-1) h' / (h f^2) + avg_H |c'| / f,

with |c'|^2 = 1 + (f r')^2 and Neumann walls r'(a) = r'(b) = 0.  The
nonlocal average is evaluated once per step from the pre-step state.

The default scheme treats the second-derivative term implicitly with its
coefficient frozen (a tridiagonal solve per step) and everything else
explicitly; step size is controlled by step doubling against a fixed
per-step tolerance.  An explicit Runge-Kutta alternative under a
parabolic step restriction is kept for cross checks.

The inner loop works on bare radius arrays; profile objects are built
once per accepted step for records and monitors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .ambient import AmbientSpace, radial_measure
from .bounds import (BoundSet, ViolationReport, compute_bound_set,
                     run_monitors)
from .curve import GraphProfile, diff_radii, quad_weights
from .geometry import unit_sphere_volume

STEP_TOL = 1e-6          # per-step error bound for the doubling control
RECT_MARGIN = 0.01       # radius envelope margin for the frozen bounds
MAX_RETRIES = 60

SCHEMES = ("imex", "explicit_rk4")
AVG_MODES = ("volume_consistent", "geometric")
TERMINATIONS = ("reached_T", "steady", "singular_axis", "step_failure")


@dataclass(frozen=True)
class DtPolicy:
    cfl_safety: float = 0.5
    dt_max: float = 2e-5
    dt_min: float = 1e-12


@dataclass(frozen=True)
class FlowConfig:
    T_max: float = 2.0
    dt: DtPolicy = field(default_factory=DtPolicy)
    scheme: str = "imex"
    avg_mode: str = "volume_consistent"
    eps_cmc: float = 1e-5
    eps_axis: float = 1e-3
    output_every: int = 1

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.avg_mode not in AVG_MODES:
            raise ValueError(f"unknown avg_mode {self.avg_mode!r}")
        if self.T_max <= 0.0:
            raise ValueError("T_max must be positive")
        if not 0.0 < self.dt.dt_min <= self.dt.dt_max:
            raise ValueError("need 0 < dt_min <= dt_max")
        if self.output_every < 1:
            raise ValueError("output_every must be at least 1")


class FlowStepError(RuntimeError):
    """A single update produced an invalid state."""


class _Grid:
    """Per-run constants: nodes, warping values on them, weights."""

    def __init__(self, space: AmbientSpace, profile: GraphProfile):
        self.space = space
        self.z = profile.z
        self.dz = profile.dz
        self.a = profile.a
        self.b = profile.b
        self.f, self.fp, _ = space.f(self.z)
        self.w = quad_weights(len(self.z), self.dz, "trapezoid")
        self.omega = unit_sphere_volume(space.n)


@dataclass
class _StateEval:
    """Arrays and scalars of one state; scalars filled by _full_eval."""

    r: np.ndarray
    rdot: np.ndarray
    rddot: np.ndarray
    speed2: np.ndarray
    speed: np.ndarray
    local: np.ndarray        # rhs minus the nonlocal term
    avg_H: float
    H: np.ndarray | None = None
    area: float = 0.0
    volume: float = 0.0
    sup_dev: float = 0.0
    r_min: float = 0.0
    r_max: float = 0.0
    v_max: float = 0.0
    L_max: float = 0.0
    dissipation: float = 0.0


def _light_eval(g: _Grid, r: np.ndarray, avg_mode: str) -> _StateEval:
    """Arrays plus the driving average; enough to take a step."""
    n = g.space.n
    rdot, rddot = diff_radii(r, g.dz)
    h, hp, _ = g.space.h(r)
    speed2 = 1.0 + (g.f * rdot) ** 2
    speed = np.sqrt(speed2)
    local = (rddot / speed2 + (g.fp / g.f) * (1.0 / speed2 + n) * rdot
             - (n - 1) * hp / (h * g.f * g.f))
    gdens = g.f ** (n - 1) * h ** (n - 1)
    elem = speed * gdens
    den = float(g.w @ elem)
    if avg_mode == "volume_consistent":
        avg = -float(g.w @ (g.f * gdens * local)) / den
    else:
        k1 = -(rddot * g.f / speed2
               + g.fp * rdot * (1.0 / speed2 + 1.0)) / speed
        k2 = (hp / (h * g.f) - g.fp * rdot) / speed
        avg = float(g.w @ ((k1 + (n - 1) * k2) * elem)) / den
    ev = _StateEval(r=r, rdot=rdot, rddot=rddot, speed2=speed2, speed=speed,
                    local=local, avg_H=avg)
    ev._h, ev._hp, ev._elem, ev._den = h, hp, elem, den
    return ev


def _full_eval(g: _Grid, r: np.ndarray, avg_mode: str) -> _StateEval:
    """Light evaluation plus every recorded scalar."""
    n = g.space.n
    ev = _light_eval(g, r, avg_mode)
    h, hp, elem, den = ev._h, ev._hp, ev._elem, ev._den
    k1 = -(ev.rddot * g.f / ev.speed2
           + g.fp * ev.rdot * (1.0 / ev.speed2 + 1.0)) / ev.speed
    k2 = (hp / (h * g.f) - g.fp * ev.rdot) / ev.speed
    H = k1 + (n - 1) * k2
    ev.H = H
    ev.area = g.omega * den
    ev.volume = g.omega * float(g.w @ (g.f ** n * radial_measure(g.space, r)))
    ev.sup_dev = float(np.max(np.abs(H - ev.avg_H)))
    ev.r_min = float(np.min(r))
    ev.r_max = float(np.max(r))
    ev.v_max = float(np.max(ev.speed / g.f))
    ev.L_max = float(np.max(np.sqrt(k1 ** 2 + (n - 1) * k2 ** 2)))
    ev.dissipation = g.omega * float(g.w @ ((ev.avg_H - H) ** 2 * elem))
    return ev


def _admissible(space: AmbientSpace, r: np.ndarray) -> bool:
    if not np.all(np.isfinite(r)) or not np.all(r > 0.0):
        return False
    return space.h_zero is None or bool(np.all(r < space.h_zero))


def _imex_update(g: _Grid, ev: _StateEval, dt: float) -> np.ndarray | None:
    """One implicit-explicit update; None when the result is inadmissible.

    The r'' coefficient 1/|c'|^2 is frozen at the pre-step state, so the
    implicit part is a tridiagonal solve; the ghost closure
    r''(a) = 2 (r_1 - r_0)/dz^2 keeps the Neumann walls exact.
    """
    r = ev.r
    m = len(r)
    a = dt / (ev.speed2 * g.dz ** 2)
    b_expl = (ev.local - ev.rddot / ev.speed2 + ev.avg_H * ev.speed / g.f)
    ab = np.empty((3, m))
    ab[1] = 1.0 + 2.0 * a
    ab[0, 1:] = -a[:-1]
    ab[2, :-1] = -a[1:]
    ab[0, 1] = -2.0 * a[0]
    ab[2, m - 2] = -2.0 * a[m - 1]
    r_new = solve_banded((1, 1), ab, r + dt * b_expl,
                         overwrite_ab=True, overwrite_b=True,
                         check_finite=False)
    if not _admissible(g.space, r_new):
        return None
    return r_new


def _rhs_arrays(g: _Grid, r: np.ndarray, avg_H: float) -> np.ndarray:
    n = g.space.n
    rdot, rddot = diff_radii(r, g.dz)
    h, hp, _ = g.space.h(r)
    speed2 = 1.0 + (g.f * rdot) ** 2
    return (rddot / speed2 + (g.fp / g.f) * (1.0 / speed2 + n) * rdot
            - (n - 1) * hp / (h * g.f * g.f)
            + avg_H * np.sqrt(speed2) / g.f)


def _rk4_update(g: _Grid, r: np.ndarray, dt: float,
                avg_H: float) -> np.ndarray | None:
    def slope(radii):
        if not _admissible(g.space, radii):
            return None
        return _rhs_arrays(g, radii, avg_H)

    k1 = slope(r)
    if k1 is None:
        return None
    k2 = slope(r + 0.5 * dt * k1)
    if k2 is None:
        return None
    k3 = slope(r + 0.5 * dt * k2)
    if k3 is None:
        return None
    k4 = slope(r + dt * k3)
    if k4 is None:
        return None
    r_new = r + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not _admissible(g.space, r_new):
        return None
    return r_new


def flow_rhs(space: AmbientSpace, profile: GraphProfile,
             avg_H: float) -> np.ndarray:
    """Pointwise time derivative of the radii for a given average."""
    return _rhs_arrays(_Grid(space, profile), profile.r, avg_H)


def averaged_for_step(space: AmbientSpace, profile: GraphProfile,
                      mode: str = "volume_consistent") -> float:
    """The average that drives the next step from this state."""
    if mode not in AVG_MODES:
        raise ValueError(f"unknown avg_mode {mode!r}")
    return _light_eval(_Grid(space, profile), profile.r, mode).avg_H


def detect_steady(space: AmbientSpace, profile: GraphProfile, eps: float,
                  avg_mode: str = "volume_consistent") -> bool:
    """True when the mean curvature deviates from its average by at most
    eps in sup norm, i.e. the state is a constant-mean-curvature surface
    up to tolerance."""
    if avg_mode not in AVG_MODES:
        raise ValueError(f"unknown avg_mode {avg_mode!r}")
    ev = _full_eval(_Grid(space, profile), profile.r, avg_mode)
    return ev.sup_dev <= eps


def step(space: AmbientSpace, profile: GraphProfile, dt: float,
         scheme: str = "imex",
         avg_mode: str = "volume_consistent") -> GraphProfile:
    """One update of the given scheme; raises FlowStepError when the
    proposed state leaves the admissible radius band."""
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    if avg_mode not in AVG_MODES:
        raise ValueError(f"unknown avg_mode {avg_mode!r}")
    g = _Grid(space, profile)
    ev = _light_eval(g, profile.r, avg_mode)
    if scheme == "imex":
        r_new = _imex_update(g, ev, dt)
    else:
        r_new = _rk4_update(g, profile.r, dt, ev.avg_H)
    if r_new is None:
        raise FlowStepError("update left the admissible radius band")
    return profile.with_radii(r_new)


COLUMNS = ("t", "dt", "area", "volume", "avgH", "r_min", "r_max", "v_max",
           "L_max", "sup_H_dev", "viol_r2", "viol_h2", "viol_vbound",
           "viol_area", "vol_drift")


@dataclass(frozen=True)
class RecordRow:
    t: float
    dt: float
    area: float
    volume: float
    avgH: float
    r_min: float
    r_max: float
    v_max: float
    L_max: float
    sup_H_dev: float
    viol_r2: int
    viol_h2: int
    viol_vbound: int
    viol_area: int
    vol_drift: float


@dataclass
class FlowRecord:
    rows: list[RecordRow] = field(default_factory=list)

    def to_csv(self) -> str:
        lines = [",".join(COLUMNS)]
        for row in self.rows:
            parts = []
            for name in COLUMNS:
                val = getattr(row, name)
                parts.append(str(val) if isinstance(val, int) else f"{val:.17g}")
            lines.append(",".join(parts))
        return "\n".join(lines) + "\n"

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(row, name) for row in self.rows], dtype=float)


@dataclass
class RunResult:
    termination: str
    t_final: float
    steps: int
    profile: GraphProfile
    record: FlowRecord
    bound_set: BoundSet
    violations: list[ViolationReport]
    singular_side: str | None = None
    snapshots: list[tuple[int, float, GraphProfile]] = field(default_factory=list)
    dissipation_worst: float = 0.0
    dissipation_checked: int = 0


class _MonitorView:
    """The summary fields run_monitors reads, taken from a state eval."""

    def __init__(self, g: _Grid, ev: _StateEval):
        self.area = ev.area
        self.volume = ev.volume
        self.avg_H = ev.avg_H
        self.v = ev.speed / g.f


def _freeze_bounds(space, slab, volume0, area0, r_lo, r_hi, max_v0) -> BoundSet:
    lo = r_lo * (1.0 - RECT_MARGIN)
    hi = r_hi * (1.0 + RECT_MARGIN)
    if space.h_zero is not None:
        hi = min(hi, math.nextafter(space.h_zero, 0.0))
    return compute_bound_set(space, slab, volume0, area0, lo, hi, max_v0)


def run(space: AmbientSpace, initial: GraphProfile, config: FlowConfig,
        snapshot_every: int = 0) -> RunResult:
    """Integrate from the initial profile until a termination condition.

    Terminations: ``reached_T`` (time horizon), ``steady`` (sup |H -
    avg_H| <= eps_cmc, checked before each step so an exact constant mean
    curvature state stops at t = 0), ``singular_axis`` (min r within
    eps_axis of the axis, or max r within eps_axis of the far axis), and
    ``step_failure`` (no admissible step above dt_min).

    The recorded ``avgH`` column is the average that drives the step from
    that state under the configured mode.  Monitors run at every recorded
    state; the frozen bound set is re-derived (with fresh 1% margins and
    the initial area) whenever the running radius envelope leaves the
    margined rectangle used to freeze it.
    """
    g = _Grid(space, initial)
    slab = (initial.a, initial.b)
    ev = _full_eval(g, initial.r, config.avg_mode)
    volume0, area0 = ev.volume, ev.area
    run_lo, run_hi = ev.r_min, ev.r_max
    bounds_now = _freeze_bounds(space, slab, volume0, area0,
                                run_lo, run_hi, ev.v_max)

    record = FlowRecord()
    violations: list[ViolationReport] = []
    result = RunResult(termination="reached_T", t_final=0.0, steps=0,
                       profile=initial, record=record, bound_set=bounds_now,
                       violations=violations)

    t = 0.0
    steps = 0
    dt_next = config.dt.dt_max
    prof = initial
    prev: tuple[float, float, float] | None = None   # (area, dissipation, dt)

    def emit(row_dt: float) -> None:
        report = run_monitors(
            space, bounds_now, prof, _MonitorView(g, ev), t,
            prev_area=None if prev is None else prev[0],
            prev_dissipation=None if prev is None else prev[1],
            dt=None if prev is None else prev[2])
        violations.append(report)
        if "dissipation" in report.checks:
            result.dissipation_checked += 1
            result.dissipation_worst = max(
                result.dissipation_worst,
                report.checks["dissipation"].observed)
        c = report.checks
        record.rows.append(RecordRow(
            t=t, dt=row_dt, area=ev.area, volume=ev.volume, avgH=ev.avg_H,
            r_min=ev.r_min, r_max=ev.r_max, v_max=ev.v_max, L_max=ev.L_max,
            sup_H_dev=ev.sup_dev,
            viol_r2=int(not c["radius_cap"].passed),
            viol_h2=int(not c["avg_H_cap"].passed),
            viol_vbound=int(not c["slope_cap"].passed),
            viol_area=int("area_monotone" in c
                          and not c["area_monotone"].passed),
            vol_drift=(ev.volume - volume0) / volume0))

    def snap() -> None:
        if snapshot_every > 0 and (steps % snapshot_every == 0):
            result.snapshots.append((steps, t, prof))

    emit(0.0)
    snap()

    while True:
        if ev.sup_dev <= config.eps_cmc:
            result.termination = "steady"
            break
        if t >= config.T_max * (1.0 - 1e-14):
            result.termination = "reached_T"
            break

        if config.scheme == "explicit_rk4":
            dt_next = config.dt.cfl_safety * g.dz ** 2 \
                * float(np.min(ev.speed2))
            dt_next = min(dt_next, config.dt.dt_max)
        dt = min(dt_next, config.T_max - t)

        accepted = None
        for _ in range(MAX_RETRIES):
            if config.scheme == "imex":
                full = _imex_update(g, ev, dt)
                half = _imex_update(g, ev, dt / 2.0)
                if half is not None:
                    ev_mid = _light_eval(g, half, config.avg_mode)
                    half = _imex_update(g, ev_mid, dt / 2.0)
                if full is None or half is None:
                    err = math.inf
                else:
                    err = float(np.max(np.abs(full - half)))
                if err <= STEP_TOL:
                    accepted = half
                    grow = 2.0 if err == 0.0 else min(
                        2.0, 0.9 * math.sqrt(STEP_TOL / err))
                    dt_next = min(config.dt.dt_max, dt * grow)
                    break
                if dt <= config.dt.dt_min:
                    break
                shrink = 0.5 if not math.isfinite(err) else max(
                    0.1, min(0.5, 0.9 * math.sqrt(STEP_TOL / err)))
                dt = max(dt * shrink, config.dt.dt_min)
            else:
                proposal = _rk4_update(g, ev.r, dt, ev.avg_H)
                if proposal is not None:
                    accepted = proposal
                    break
                if dt <= config.dt.dt_min:
                    break
                dt = max(dt / 2.0, config.dt.dt_min)

        if accepted is None:
            result.termination = "step_failure"
            break

        prev = (ev.area, ev.dissipation, dt)
        t += dt
        steps += 1
        ev = _full_eval(g, accepted, config.avg_mode)
        prof = initial.with_radii(accepted)

        if run_lo > ev.r_min or run_hi < ev.r_max:
            run_lo = min(run_lo, ev.r_min)
            run_hi = max(run_hi, ev.r_max)
            if run_lo < bounds_now.r_lo or run_hi > bounds_now.r_hi:
                bounds_now = _freeze_bounds(space, slab, volume0, area0,
                                            run_lo, run_hi,
                                            bounds_now.max_v0)
                result.bound_set = bounds_now

        hit_axis = ev.r_min <= config.eps_axis
        hit_far = (space.h_zero is not None
                   and ev.r_max >= space.h_zero - config.eps_axis)
        terminal = hit_axis or hit_far

        if steps % config.output_every == 0 or terminal:
            emit(dt)
            snap()

        if terminal:
            result.termination = "singular_axis"
            result.singular_side = "axis_min" if hit_axis else "axis_max"
            break

    if record.rows and record.rows[-1].t < t:
        emit(prev[2] if prev is not None else 0.0)
    if snapshot_every > 0 and (not result.snapshots
                               or result.snapshots[-1][0] != steps):
        result.snapshots.append((steps, t, prof))
    result.t_final = t
    result.steps = steps
    result.profile = prof
    return result
