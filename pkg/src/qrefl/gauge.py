"""Liouville transformations of the scattering coefficient F.

A Liouville map is a smooth increasing change of coordinate z -> zt(z)
together with the rescaling Psi_t = sqrt(zt') Psi. The transformed
coefficient is

    Ft(zt) = (F(z) - S(z)/2) / zt'(z)^2,

where S is the Schwarzian derivative of the map. The WKB gauge uses the
accumulated WKB phase as new coordinate and turns the attractive well into
a repulsive wall Vb with energy Eb = kappa*ell.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, optimize
from scipy.special import gamma

from .errors import ConfigurationError, DomainError, NumericError
from .potentials import ScatteringProblem, _check_z

Z0_BOLD = gamma(0.75) ** 2 / math.sqrt(math.pi)
"""Wall coordinate of the peak of the universal C4 curve."""

V_BOLD_PEAK = 0.625


@dataclass(frozen=True)
class LiouvilleMap:
    """Smooth increasing map with closed-form derivatives up to third order.

    ``domain`` is the open interval on which the map is defined and
    ``image`` its range; either bound may be infinite.
    """

    f: Callable
    d1: Callable
    d2: Callable
    d3: Callable
    domain: tuple = (-math.inf, math.inf)
    image: tuple = (-math.inf, math.inf)
    name: str = "map"

    def __call__(self, z):
        return self.f(self._check(z))

    def _check(self, z):
        lo, hi = self.domain
        arr = np.asarray(z, dtype=float)
        if not np.all((arr > lo) & (arr < hi)):
            raise DomainError(f"{self.name}: z outside domain {self.domain}")
        return z

    def inverse(self, zt):
        """Numerical inverse zt -> z by bracketed root finding."""
        lo, hi = self.image
        if not lo < zt < hi:
            raise DomainError(f"{self.name}: {zt} outside image {self.image}")
        a, b = self.domain
        # Expand a finite bracket inside the (possibly infinite) domain.
        x0 = 0.5 * (a + b) if math.isfinite(a) and math.isfinite(b) else (
            a + 1.0 if math.isfinite(a) else (b - 1.0 if math.isfinite(b) else 0.0)
        )
        left, right = x0, x0
        step = 1.0
        for _ in range(2000):
            if self.f(left) <= zt:
                break
            new = left - step
            left = 0.5 * (left + a) if math.isfinite(a) and new <= a else new
            step *= 2.0
        for _ in range(2000):
            if self.f(right) >= zt:
                break
            new = right + step
            right = 0.5 * (right + b) if math.isfinite(b) and new >= b else new
            step *= 2.0
        if not self.f(left) <= zt <= self.f(right):
            raise NumericError(f"{self.name}: cannot bracket inverse", {"zt": zt})
        if left == right:
            return left
        return optimize.brentq(lambda x: self.f(x) - zt, left, right, xtol=1e-300, rtol=4 * np.finfo(float).eps)


def schwarzian(gmap, z):
    """Schwarzian derivative zt'''/zt' - 3/2 (zt''/zt')^2."""
    gmap._check(z)
    d1 = gmap.d1(z)
    return gmap.d3(z) / d1 - 1.5 * (gmap.d2(z) / d1) ** 2


def _zero(z):
    return 0.0 * z


def identity_map():
    return LiouvilleMap(lambda z: z, lambda z: 1.0 + 0.0 * z, _zero, _zero, name="identity")


def affine_map(a, b=0.0):
    """zt = a z + b with a > 0."""
    if not a > 0:
        raise DomainError("affine map needs a positive slope")
    return LiouvilleMap(
        lambda z: a * z + b,
        lambda z: a + 0.0 * z,
        _zero,
        _zero,
        name=f"affine({a},{b})",
    )


def mobius_map(a, b, c, d, domain):
    """zt = (a z + b)/(c z + d) restricted to an interval where c z + d != 0."""
    det = a * d - b * c
    if not det > 0:
        raise DomainError("Mobius map needs ad - bc > 0 to be increasing")
    lo, hi = domain
    if c != 0 and lo < -d / c < hi:
        raise ConfigurationError("Mobius pole inside the requested domain")
    def f(z):
        return (a * z + b) / (c * z + d)

    def limit(x):
        if math.isfinite(x):
            return f(x)
        return a / c if c else math.copysign(math.inf, x)

    ends = sorted(limit(x) for x in domain)
    return LiouvilleMap(
        f,
        lambda z: det / (c * z + d) ** 2,
        lambda z: -2.0 * c * det / (c * z + d) ** 3,
        lambda z: 6.0 * c * c * det / (c * z + d) ** 4,
        domain=tuple(domain),
        image=tuple(ends),
        name="mobius",
    )


def power_map(p):
    """zt = z^p on z > 0, p > 0."""
    if not p > 0:
        raise DomainError("power map needs p > 0")
    return LiouvilleMap(
        lambda z: z**p,
        lambda z: p * z ** (p - 1),
        lambda z: p * (p - 1) * z ** (p - 2),
        lambda z: p * (p - 1) * (p - 2) * z ** (p - 3),
        domain=(0.0, math.inf),
        image=(0.0, math.inf),
        name=f"power({p})",
    )


def log_map():
    """zt = ln z on z > 0."""
    return LiouvilleMap(
        np.log,
        lambda z: 1.0 / z,
        lambda z: -1.0 / z**2,
        lambda z: 2.0 / z**3,
        domain=(0.0, math.inf),
        image=(-math.inf, math.inf),
        name="log",
    )


def exp_map(c=1.0):
    """zt = exp(c z), c > 0."""
    if not c > 0:
        raise DomainError("exp map needs c > 0")
    return LiouvilleMap(
        lambda z: np.exp(c * z),
        lambda z: c * np.exp(c * z),
        lambda z: c * c * np.exp(c * z),
        lambda z: c**3 * np.exp(c * z),
        image=(0.0, math.inf),
        name=f"exp({c})",
    )


def cubic_map(a, b):
    """zt = a z + b z^3 with a > 0, b >= 0; increasing on the real line."""
    if not (a > 0 and b >= 0):
        raise DomainError("cubic map needs a > 0 and b >= 0")
    return LiouvilleMap(
        lambda z: a * z + b * z**3,
        lambda z: a + 3.0 * b * z**2,
        lambda z: 6.0 * b * z,
        lambda z: 6.0 * b + 0.0 * z,
        name=f"cubic({a},{b})",
    )


def wiggle_map(eps, width, center=0.0):
    """zt = z + eps*width*tanh((z-center)/width), increasing for eps > -1."""
    if not eps > -1 or not width > 0:
        raise DomainError("wiggle map needs eps > -1 and width > 0")

    def t(z):
        return np.tanh((z - center) / width)

    return LiouvilleMap(
        lambda z: z + eps * width * t(z),
        lambda z: 1.0 + eps * (1.0 - t(z) ** 2),
        lambda z: -2.0 * eps * t(z) * (1.0 - t(z) ** 2) / width,
        lambda z: -2.0 * eps * (1.0 - t(z) ** 2) * (1.0 - 3.0 * t(z) ** 2) / width**2,
        name=f"wiggle({eps},{width},{center})",
    )


def compose(map_ab, map_bc):
    """Map z -> zhat = map_bc(map_ab(z)) with chain-rule derivatives."""
    lo, hi = map_bc.domain
    ilo, ihi = map_ab.image
    if ilo < lo or ihi > hi:
        raise ConfigurationError(
            f"image {map_ab.image} of {map_ab.name} not inside domain "
            f"{map_bc.domain} of {map_bc.name}"
        )
    f, g = map_ab, map_bc

    def d1(z):
        return g.d1(f.f(z)) * f.d1(z)

    def d2(z):
        y1 = f.d1(z)
        return g.d2(f.f(z)) * y1 * y1 + g.d1(f.f(z)) * f.d2(z)

    def d3(z):
        y = f.f(z)
        y1, y2, y3 = f.d1(z), f.d2(z), f.d3(z)
        return g.d3(y) * y1**3 + 3.0 * g.d2(y) * y1 * y2 + g.d1(y) * y3

    return LiouvilleMap(
        lambda z: g.f(f.f(z)),
        d1,
        d2,
        d3,
        domain=f.domain,
        image=g.image,
        name=f"{g.name}o{f.name}",
    )


def inverse_map(gmap):
    """Inverse map zt -> z with derivatives from the inverse function rule."""

    def at(zt):
        return np.vectorize(gmap.inverse, otypes=[float])(zt) if np.ndim(zt) else gmap.inverse(zt)

    def d1(zt):
        return 1.0 / gmap.d1(at(zt))

    def d2(zt):
        z = at(zt)
        return -gmap.d2(z) / gmap.d1(z) ** 3

    def d3(zt):
        z = at(zt)
        y1, y2, y3 = gmap.d1(z), gmap.d2(z), gmap.d3(z)
        return -y3 / y1**4 + 3.0 * y2 * y2 / y1**5

    return LiouvilleMap(at, d1, d2, d3, domain=gmap.image, image=gmap.domain,
                        name=f"inv({gmap.name})")


def transformed_F_at(F, gmap, z):
    """Ft evaluated at zt = gmap(z), given the original-frame point z."""
    d1 = gmap.d1(z)
    return (F(z) - 0.5 * schwarzian(gmap, z)) / d1**2


def transform_F(F, gmap):
    """Return the evaluator zt -> Ft(zt) of the transformed coefficient."""

    def Ft(zt):
        return transformed_F_at(F, gmap, gmap.inverse(zt))

    return Ft


def transform_F_inverse_form(F, gmap, z):
    """Ft(zt) from the inverse map: z'(zt)^2 F(z) + {z, zt}/2.

    The inverse derivatives and Schwarzian are computed independently of
    :func:`transformed_F_at`, so the two routes cross-check each other.
    """
    y1, y2, y3 = gmap.d1(z), gmap.d2(z), gmap.d3(z)
    i1 = 1.0 / y1
    i2 = -y2 / y1**3
    i3 = -y3 / y1**4 + 3.0 * y2 * y2 / y1**5
    s_inv = i3 / i1 - 1.5 * (i2 / i1) ** 2
    return i1 * i1 * F(z) + 0.5 * s_inv


def liouville_state(gmap, z, psi, dpsi):
    """Map (Psi, dPsi/dz) to (Psi_t, dPsi_t/dzt) under Psi_t = sqrt(zt') Psi."""
    d1 = gmap.d1(z)
    root = math.sqrt(d1)
    return root * psi, (dpsi + 0.5 * gmap.d2(z) / d1 * psi) / root


def liouville_state_back(gmap, z, psit, dpsit):
    """Inverse of :func:`liouville_state`."""
    d1 = gmap.d1(z)
    root = math.sqrt(d1)
    psi = psit / root
    return psi, root * dpsit - 0.5 * gmap.d2(z) / d1 * psi


# --- WKB phase and gauge --------------------------------------------------

QUAD_RTOL = 1e-13


def _quad(func, a, b, what, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err, info = integrate.quad(
            func, a, b, epsabs=0.0, epsrel=QUAD_RTOL, limit=400, full_output=1, **kw
        )[:3]
    if not math.isfinite(val) or err > max(1e-10 * abs(val), 1e-13):
        raise NumericError(
            f"quadrature for {what} did not converge",
            {"interval": (a, b), "value": val, "error_estimate": err,
             "evaluations": info.get("neval")},
        )
    return val


def _tail_phase(problem, z):
    """int_z^inf (k - kappa) dy via y = 1/x on [0, 1/z]."""
    def g(x):
        y = 1.0 / x
        return problem.k_minus_kappa(y) * y * y

    return _quad(lambda x: g(x) if x > 0 else 0.0, 0.0, 1.0 / z, "phase tail")


def _log_phase(problem, a, b):
    """int_a^b (k - kappa) dy via y = e^s, split by decades."""
    s_edges = np.linspace(math.log(a), math.log(b), max(2, int(math.ceil(math.log10(b / a))) + 1))
    total = 0.0
    for s0, s1 in zip(s_edges[:-1], s_edges[1:]):
        total += _quad(lambda s: problem.k_minus_kappa(math.exp(s)) * math.exp(s),
                       s0, s1, "phase body")
    return total


def wkb_phase(problem: ScatteringProblem, z):
    """WKB phase with phi(z) - kappa z -> 0 as z -> infinity.

    phi(z) = kappa z - int_z^inf (k_dB(y) - kappa) dy.
    """
    _check_z(z)
    if np.ndim(z):
        return np.array([wkb_phase(problem, float(x)) for x in np.ravel(z)]).reshape(np.shape(z))
    z = float(z)
    zr = problem.z_scale
    if z >= zr:
        excess = _tail_phase(problem, z)
    else:
        excess = _log_phase(problem, z, zr) + _tail_phase(problem, zr)
    return problem.kappa * z - excess


def wkb_gauge_map(problem: ScatteringProblem):
    """The map z -> zb = phi(z)/sqrt(kappa*ell)."""
    root = math.sqrt(problem.kappa_ell)

    def d1(z):
        return problem.k(z) / root

    def d2(z):
        return 0.5 * problem.dF(z) / (problem.k(z) * root)

    def d3(z):
        k = problem.k(z)
        f1 = problem.dF(z)
        return (0.5 * problem.d2F(z) / k - 0.25 * f1 * f1 / k**3) / root

    return LiouvilleMap(
        lambda z: wkb_phase(problem, z) / root,
        d1, d2, d3,
        domain=(0.0, math.inf),
        image=(-math.inf, math.inf),
        name="wkb-gauge",
    )


@dataclass(frozen=True)
class GaugeProfile:
    """Sampled WKB-gauge wall: original z, wall coordinate zb, wall height Vb."""

    e_bold: float
    kappa_ell: float
    z: np.ndarray
    z_bold: np.ndarray
    v_bold: np.ndarray

    def __iter__(self):
        return iter(zip(self.z, self.z_bold, self.v_bold))

    def peak(self):
        i = int(np.argmax(self.v_bold))
        return self.z[i], self.z_bold[i], self.v_bold[i]


def wkb_gauge(problem: ScatteringProblem, z_grid):
    """Energy Eb = kappa*ell and wall Vb = -kappa*ell*Q sampled on ``z_grid``.

    The wall coordinate is accumulated from the far end inwards, one
    quadrature per grid interval, so a dense grid costs little more than
    a single phase evaluation.
    """
    z = _check_z(z_grid).astype(float)
    if z.ndim != 1 or np.any(np.diff(z) <= 0):
        raise DomainError("z_grid must be one-dimensional and strictly increasing")
    kl = problem.kappa_ell
    root = math.sqrt(kl)
    excess = np.empty_like(z)
    excess[-1] = wkb_phase(problem, z[-1]) - problem.kappa * z[-1]
    for i in range(len(z) - 2, -1, -1):
        a, b = z[i], z[i + 1]
        if b / a > 1.5:
            piece = _log_phase(problem, a, b)
        else:
            piece = _quad(problem.k_minus_kappa, a, b, "phase body")
        excess[i] = excess[i + 1] - piece
    phi = problem.kappa * z + excess
    v = -kl * problem.Q(z)
    return GaugeProfile(kl, kl, z, phi / root, v)


# --- universal C4 curve -----------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)
PANEL = 0.25


def _universal_arc(u):
    """int_0^u sqrt(2 cosh 2v) dv by Gauss-Legendre panels of width <= 0.25."""
    if u == 0.0:
        return 0.0
    n = max(1, int(math.ceil(abs(u) / PANEL)))
    edges = np.linspace(0.0, u, n + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    v = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = np.sqrt(2.0 * np.cosh(2.0 * v))
    return float(np.sum(half * (vals @ _GL_WEIGHTS)))


@dataclass(frozen=True)
class UniversalPoint:
    u: float
    z_bold: float
    v_bold: float


@dataclass(frozen=True)
class UniversalCurve:
    u: np.ndarray
    z_bold: np.ndarray
    v_bold: np.ndarray

    def points(self):
        return [UniversalPoint(*p) for p in zip(self.u, self.z_bold, self.v_bold)]


def universal_v(u):
    return 5.0 / (8.0 * np.cosh(2.0 * np.asarray(u, dtype=float)) ** 3)


def universal_curve(u_grid):
    """Parametric wall (zb(u), Vb(u)) of the pure C4 model, z = z0 e^u."""
    u = np.asarray(u_grid, dtype=float)
    if not np.all(np.isfinite(u)):
        raise DomainError("u values must be finite")
    zb = Z0_BOLD + np.array([_universal_arc(x) for x in np.ravel(u)]).reshape(u.shape)
    return UniversalCurve(u, zb, universal_v(u))
