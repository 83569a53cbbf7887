"""Rotationally symmetric ambient spaces with closed-form warping functions.

The ambient metric is the doubly warped product

    dz^2 + f(z)^2 dr^2 + f(z)^2 h(r)^2 g_{S^{n-1}},

where z ranges over an interval on which f > 0 and r over [0, z*] with z*
the first positive zero of h (z* may be infinite).  Six model families are
supported, each with exact first and second derivatives of f and h:

    C1  f = 1,            h = r            Euclidean slab
    C2  f = z,            h = sin r        Euclidean spherical crown
    C3  f = cosh(m z),    h = sinh(m r)/m  hyperbolic, equidistants to a plane
    C4  f = sinh(m z)/m,  h = sin r        hyperbolic, geodesic spheres
    C5  f = e^{m z},      h = r            hyperbolic, horospheres
    C6  f = cos(m z),     h = sin(m r)/m   round sphere, slice of parallels

with m = sqrt(|curvature|).  C3 and C6 additionally admit variants where
the rate in f and the rate in h differ (fields ``lam`` and ``lam_h``);
those variants are not space forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

CASES = ("C1", "C2", "C3", "C4", "C5", "C6")

# Cases where f vanishes at z = 0 (the domain of z is one-sided and open).
_POSITIVE_Z = ("C2", "C4")


@dataclass(frozen=True)
class Rect:
    """Closed rectangle [z_lo, z_hi] x [r_lo, r_hi] in the (z, r) half plane."""

    z_lo: float
    z_hi: float
    r_lo: float
    r_hi: float

    def __post_init__(self):
        if not (self.z_lo < self.z_hi and self.r_lo < self.r_hi):
            raise ValueError(f"degenerate rectangle {self}")

    def contains(self, other: "Rect") -> bool:
        return (self.z_lo <= other.z_lo and other.z_hi <= self.z_hi
                and self.r_lo <= other.r_lo and other.r_hi <= self.r_hi)


@dataclass(frozen=True)
class CurvatureComponents:
    """Sectional curvatures of the three coordinate 2-plane types.

    ``axis_plane``   planes containing the axis direction d/dz,
    ``radial_plane`` the plane spanned by d/dr and one sphere direction,
    ``sphere_plane`` planes tangent to the orbit sphere.
    """

    axis_plane: float
    radial_plane: float
    sphere_plane: float


@dataclass(frozen=True)
class SupNorms:
    """Suprema of the named warping-function expressions over a rectangle.

    Values are exact for the supported model families (each expression is
    piecewise monotone per axis, so the supremum sits at a rectangle edge
    or at z = 0), and they are monotone under rectangle inclusion.
    """

    rect: Rect
    values: dict[str, float] = field(repr=False)

    def __getitem__(self, key: str) -> float:
        return self.values[key]


@dataclass(frozen=True)
class AmbientSpace:
    """One of the model families C1..C6, immutable once constructed.

    Attributes
    ----------
    case : str
        Model tag in ``CASES``.
    n : int
        Dimension of the revolution hypersurface (ambient dimension n+1).
    lam : float
        Curvature parameter; 0 for the flat cases C1 and C2.
    lam_h : float
        Rate parameter of h; equals ``lam`` except for the mismatched
        variants of C3 and C6.
    h_zero : float or None
        First positive zero of h, or None when h never vanishes again.
    z_domain : (float or None, float or None)
        Open interval on which f > 0; None marks an unbounded side.
    """

    case: str
    n: int
    lam: float
    lam_h: float
    h_zero: float | None
    z_domain: tuple[float | None, float | None]

    # -- closed-form warping functions ------------------------------------

    def f(self, z):
        """Return (f, f', f'') at ``z`` (scalar or array), exactly."""
        z = np.asarray(z, dtype=float)
        if self.case == "C1":
            one = np.ones_like(z)
            return one, np.zeros_like(z), np.zeros_like(z)
        if self.case == "C2":
            return z, np.ones_like(z), np.zeros_like(z)
        m = math.sqrt(abs(self.lam))
        if self.case == "C3":
            return np.cosh(m * z), m * np.sinh(m * z), m * m * np.cosh(m * z)
        if self.case == "C4":
            return np.sinh(m * z) / m, np.cosh(m * z), m * np.sinh(m * z)
        if self.case == "C5":
            e = np.exp(m * z)
            return e, m * e, m * m * e
        # C6
        return np.cos(m * z), -m * np.sin(m * z), -m * m * np.cos(m * z)

    def h(self, r):
        """Return (h, h', h'') at ``r`` (scalar or array), exactly."""
        r = np.asarray(r, dtype=float)
        if self.case in ("C1", "C5"):
            return r, np.ones_like(r), np.zeros_like(r)
        if self.case in ("C2", "C4"):
            return np.sin(r), np.cos(r), -np.sin(r)
        m = math.sqrt(abs(self.lam_h))
        if self.case == "C3":
            return np.sinh(m * r) / m, np.cosh(m * r), m * np.sinh(m * r)
        # C6
        return np.sin(m * r) / m, np.cos(m * r), -m * np.sin(m * r)

    # -- domain handling ---------------------------------------------------

    def check_z(self, z) -> None:
        """Raise if any z lies outside the open interval where f > 0."""
        z = np.asarray(z, dtype=float)
        lo, hi = self.z_domain
        if lo is not None and np.any(z <= lo):
            raise ValueError(f"z out of domain for {self.case}: min z = {z.min()} <= {lo}")
        if hi is not None and np.any(z >= hi):
            raise ValueError(f"z out of domain for {self.case}: max z = {z.max()} >= {hi}")

    def check_r(self, r, strict: bool = False) -> None:
        """Raise if any r leaves [0, h_zero] (open interval when strict)."""
        r = np.asarray(r, dtype=float)
        lo_bad = np.any(r <= 0.0) if strict else np.any(r < 0.0)
        if lo_bad:
            raise ValueError(f"r out of range: min r = {r.min()}")
        if self.h_zero is not None:
            hi_bad = np.any(r >= self.h_zero) if strict else np.any(r > self.h_zero)
            if hi_bad:
                raise ValueError(f"r out of range: max r = {r.max()} vs h zero {self.h_zero}")

    def check_rect(self, rect: Rect) -> None:
        self.check_z([rect.z_lo, rect.z_hi])
        self.check_r([rect.r_lo, rect.r_hi], strict=True)

    @property
    def is_space_form(self) -> bool:
        return self.lam_h == self.lam


def make_space(case: str, lam: float | None = None, n: int = 2,
               lam_h: float | None = None) -> AmbientSpace:
    """Construct a model ambient space.

    Parameters
    ----------
    case : str
        One of ``CASES``.
    lam : float, optional
        Curvature parameter.  Ignored for the flat cases C1/C2, required
        negative for C3/C4/C5 and positive for C6.
    n : int
        Hypersurface dimension, at least 2.
    lam_h : float, optional
        Independent rate for h (same sign constraint as ``lam``); only the
        C3 and C6 families admit this variant.
    """
    if case not in CASES:
        raise ValueError(f"unknown case {case!r}; expected one of {CASES}")
    if n < 2:
        raise ValueError(f"hypersurface dimension must be >= 2, got {n}")

    if case in ("C1", "C2"):
        if lam_h is not None:
            raise ValueError(f"{case} does not admit an independent lam_h")
        lam = 0.0
    elif case in ("C3", "C4", "C5"):
        if lam is None or lam >= 0:
            raise ValueError(f"{case} requires a negative curvature parameter, got {lam}")
        if lam_h is not None and case != "C3":
            raise ValueError(f"{case} does not admit an independent lam_h")
        if lam_h is not None and lam_h >= 0:
            raise ValueError(f"lam_h must be negative for C3, got {lam_h}")
    else:  # C6
        if lam is None or lam <= 0:
            raise ValueError(f"C6 requires a positive curvature parameter, got {lam}")
        if lam_h is not None and lam_h <= 0:
            raise ValueError(f"lam_h must be positive for C6, got {lam_h}")
    lam = float(lam)
    lam_h = lam if lam_h is None else float(lam_h)

    m_f = math.sqrt(abs(lam))
    m_h = math.sqrt(abs(lam_h))
    if case in ("C2", "C4"):
        h_zero: float | None = math.pi
        z_domain: tuple[float | None, float | None] = (0.0, None)
    elif case == "C6":
        h_zero = math.pi / m_h
        z_domain = (-math.pi / (2 * m_f), math.pi / (2 * m_f))
    else:
        h_zero = None
        z_domain = (None, None)
    return AmbientSpace(case=case, n=n, lam=lam, lam_h=lam_h,
                        h_zero=h_zero, z_domain=z_domain)


def eval_fh(space: AmbientSpace, z, r):
    """Evaluate (f, f', f'', h, h', h'') at (z, r) with domain checks."""
    space.check_z(z)
    space.check_r(r)
    return (*space.f(z), *space.h(r))


def curvature_components(space: AmbientSpace, z, r) -> CurvatureComponents:
    """Sectional curvatures of the coordinate 2-planes at (z, r).

    For the standard families all three equal the constant curvature of
    the model (0 for C1/C2); the mismatched C3/C6 variants give genuinely
    position-dependent values.
    """
    space.check_z(z)
    space.check_r(r, strict=True)
    f, fp, fpp = space.f(z)
    h, hp, hpp = space.h(r)
    axis = -fpp / f
    radial = -(hpp / h + fp * fp) / (f * f)
    sphere = (1.0 - hp * hp - h * h * fp * fp) / (f * f * h * h)
    return CurvatureComponents(axis, radial, sphere)


def ricci_normal_bound(space: AmbientSpace, rect: Rect) -> float:
    """Supremum of the Ricci operator norm over a rectangle.

    Space forms are handled exactly (n times |curvature|).  For the C3/C6
    mismatched variants, every diagonal Ricci entry reduces to a function
    of z alone (h''/h and (1 - h'^2)/h^2 are constant in these families),
    so the supremum is taken over a dense z sample plus the endpoints.
    """
    space.check_rect(rect)
    n = space.n
    if space.is_space_form:
        return n * abs(space.lam)

    h1, hp1, hpp1 = space.h(rect.r_lo)
    b_const = float(hpp1 / h1)                  # h''/h, constant in C3/C6
    q_const = float((1.0 - hp1 * hp1) / (h1 * h1))  # (1 - h'^2)/h^2, constant

    z = np.linspace(rect.z_lo, rect.z_hi, 2001)
    if rect.z_lo < 0.0 < rect.z_hi:
        z = np.append(z, 0.0)
    f, fp, fpp = space.f(z)
    axis_term = -fpp / f
    ric_zz = n * axis_term
    ric_rr = axis_term - (n - 1) * (b_const + fp * fp) / (f * f)
    ric_sph = (axis_term - (b_const + fp * fp) / (f * f)
               + (n - 2) * (q_const - fp * fp) / (f * f))
    return float(max(np.max(np.abs(ric_zz)), np.max(np.abs(ric_rr)),
                     np.max(np.abs(ric_sph))))


SUP_NORM_KEYS = ("f^2", "f^-1", "f^-2", "f^-n", "f'/f",
                 "h'/h", "h'/(f h)", "h''/h", "h'^2/h^2", "ricci")


def sup_norms(space: AmbientSpace, rect: Rect) -> SupNorms:
    """Suprema of the expressions in ``SUP_NORM_KEYS`` over ``rect``.

    Each per-axis expression in the model families is piecewise monotone
    with interior extrema only at z = 0, so evaluating at the rectangle
    edges plus z = 0 gives the exact supremum.
    """
    space.check_rect(rect)
    z = [rect.z_lo, rect.z_hi]
    if rect.z_lo < 0.0 < rect.z_hi:
        z.append(0.0)
    z = np.asarray(z)
    r = np.asarray([rect.r_lo, rect.r_hi])
    f, fp, _ = space.f(z)
    h, hp, hpp = space.h(r)

    def fmax(expr):
        return float(np.max(np.abs(expr)))

    values = {
        "f^2": fmax(f * f),
        "f^-1": fmax(1.0 / f),
        "f^-2": fmax(1.0 / f**2),
        "f^-n": fmax(1.0 / f**space.n),
        "f'/f": fmax(fp / f),
        "h'/h": fmax(hp / h),
        "h''/h": fmax(hpp / h),
        "h'^2/h^2": fmax((hp / h) ** 2),
    }
    values["h'/(f h)"] = values["h'/h"] * values["f^-1"]
    values["ricci"] = ricci_normal_bound(space, rect)
    return SupNorms(rect=rect, values=values)


# -- cumulative orbit-volume factor ---------------------------------------

def _sin_power_integral(m: int, x):
    """Integral of sin^m over [0, x], by the power-reduction recursion."""
    x = np.asarray(x, dtype=float)
    if m == 0:
        return x.copy()
    if m == 1:
        return 1.0 - np.cos(x)
    return (-np.cos(x) * np.sin(x) ** (m - 1) + (m - 1) * _sin_power_integral(m - 2, x)) / m


def _sinh_power_integral(m: int, x):
    """Integral of sinh^m over [0, x]."""
    x = np.asarray(x, dtype=float)
    if m == 0:
        return x.copy()
    if m == 1:
        return np.cosh(x) - 1.0
    return (np.cosh(x) * np.sinh(x) ** (m - 1) - (m - 1) * _sinh_power_integral(m - 2, x)) / m


def radial_measure(space: AmbientSpace, R):
    """Closed-form integral of h^(n-1) over [0, R] (scalar or array).

    This is the cross-sectional volume factor pairing with f^n in the
    enclosed-volume formula; it is strictly increasing in R.
    """
    R = np.asarray(R, dtype=float)
    space.check_r(R)
    n = space.n
    if space.case in ("C1", "C5"):
        out = R ** n / n
    elif space.case in ("C2", "C4"):
        out = _sin_power_integral(n - 1, R)
    elif space.case == "C3":
        m = math.sqrt(abs(space.lam_h))
        out = _sinh_power_integral(n - 1, m * R) / m**n
    else:  # C6
        m = math.sqrt(abs(space.lam_h))
        out = _sin_power_integral(n - 1, m * R) / m**n
    return out if out.ndim else float(out)


def radial_measure_inverse(space: AmbientSpace, y: float) -> float:
    """Inverse of :func:`radial_measure` for scalar y >= 0.

    Raises ValueError when y exceeds the total measure of [0, h_zero]
    (only possible when h_zero is finite).
    """
    if y < 0:
        raise ValueError(f"negative measure {y}")
    if y == 0.0:
        return 0.0
    n = space.n
    if space.case in ("C1", "C5"):
        return float((n * y) ** (1.0 / n))
    if space.h_zero is not None:
        total = radial_measure(space, space.h_zero)
        if y > total * (1.0 + 1e-13):
            raise ValueError(f"measure {y} exceeds total {total} up to the zero of h")
        y = min(y, total)
        hi = space.h_zero
    else:
        hi = 1.0
        while radial_measure(space, hi) < y:
            hi *= 2.0
    return float(brentq(lambda R: radial_measure(space, R) - y, 0.0, hi,
                        xtol=1e-14, rtol=8.9e-16))
