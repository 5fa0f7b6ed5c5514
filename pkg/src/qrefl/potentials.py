"""Attractive atom-surface potentials and local semiclassical quantities.

All models are defined on the half-line z > 0, in atomic units, and
provide analytic (or spline) first and second derivatives so that the
badlands function never needs nested numerical differentiation.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ConfigurationError, DomainError
from .units import HYDROGEN, Particle, energy_of_kappa, kappa_of_energy

# Far-end length ell (a0) for hydrogen on nanoporous silica, keyed by porosity in %.
PRESET_ELL = {0: 321.3, 30: 282.1, 50: 244.7, 70: 192.8, 90: 111.8}

# Cliff-side coefficient used for "silica-like" C3-C4 models (hartree a0^3).
# A plausible order of magnitude for H on a dielectric, not a fitted value.
SILICA_LIKE_C3 = 0.05


def c4_from_ell(ell, particle=HYDROGEN):
    """C4 such that sqrt(2 m C4) = ell (hbar = 1)."""
    if not ell > 0:
        raise DomainError(f"ell must be positive, got {ell}")
    return ell * ell / (2.0 * particle.mass)


def _out(x, arr):
    return float(arr) if np.ndim(x) == 0 else arr


class PotentialModel:
    """Contract for V(z) on z > 0.

    Subclasses implement ``_v``, ``_v1`` and ``_v2`` on positive float arrays
    and set ``c3``, ``c4`` and ``label``.
    """

    c3: float
    c4: float
    label: str

    # closed-form models evaluate plain floats without numpy overhead
    _scalar_ok = True

    def v(self, z):
        if self._scalar_ok and isinstance(z, float):
            return self._v(z)
        z = np.asarray(z, dtype=float)
        return _out(z, self._v(z))

    def v1(self, z):
        if self._scalar_ok and isinstance(z, float):
            return self._v1(z)
        z = np.asarray(z, dtype=float)
        return _out(z, self._v1(z))

    def v2(self, z):
        if self._scalar_ok and isinstance(z, float):
            return self._v2(z)
        z = np.asarray(z, dtype=float)
        return _out(z, self._v2(z))


@dataclass(frozen=True)
class PureC4(PotentialModel):
    """V(z) = -C4/z^4, the far-end tail alone."""

    c4: float
    label: str = "C4"
    c3: float = field(default=0.0, init=False)

    def __post_init__(self):
        if not self.c4 > 0:
            raise DomainError(f"C4 must be positive, got {self.c4}")

    @classmethod
    def from_ell(cls, ell, particle=HYDROGEN, label="C4"):
        return cls(c4_from_ell(ell, particle), label)

    def _v(self, z):
        return -self.c4 / z**4

    def _v1(self, z):
        return 4.0 * self.c4 / z**5

    def _v2(self, z):
        return -20.0 * self.c4 / z**6


@dataclass(frozen=True)
class C3C4(PotentialModel):
    """V(z) = -C4 / (z^3 (z + lambda3)) with lambda3 = C4/C3.

    Behaves as -C3/z^3 at the cliff-side and -C4/z^4 at the far-end.
    """

    c3: float
    c4: float
    label: str = "C3C4"

    def __post_init__(self):
        if not (self.c3 > 0 and self.c4 > 0):
            raise DomainError(f"C3 and C4 must be positive, got {self.c3}, {self.c4}")

    @classmethod
    def from_ell(cls, ell, *, lambda3=None, c3=None, particle=HYDROGEN, label="C3C4"):
        """Build from the far-end length ell and either lambda3 or C3."""
        if (lambda3 is None) == (c3 is None):
            raise ConfigurationError("give exactly one of lambda3 or c3")
        c4 = c4_from_ell(ell, particle)
        if c3 is None:
            if not lambda3 > 0:
                raise DomainError(f"lambda3 must be positive, got {lambda3}")
            c3 = c4 / lambda3
        return cls(c3, c4, label)

    @property
    def lambda3(self):
        return self.c4 / self.c3

    def _v(self, z):
        return -self.c4 / (z**3 * (z + self.lambda3))

    def _v1(self, z):
        lam = self.lambda3
        d = z**4 + lam * z**3
        d1 = 4.0 * z**3 + 3.0 * lam * z**2
        return self.c4 * d1 / d**2

    def _v2(self, z):
        lam = self.lambda3
        d = z**4 + lam * z**3
        d1 = 4.0 * z**3 + 3.0 * lam * z**2
        d2 = 12.0 * z**2 + 6.0 * lam * z
        return self.c4 * (d2 / d**2 - 2.0 * d1**2 / d**3)


TABLE_HEADER = ("z_a0", "V_hartree")
TABLE_MIN_ROWS = 50
TAIL_MISMATCH = 0.05


class Tabulated(PotentialModel):
    """Spline through sampled V(z) with power-law tails outside the table.

    The spline interpolates ln(-V) against ln(z), so pure power laws are
    reproduced exactly. Below the first sample the potential is -C3/z^3 and
    beyond the last one -C4/z^4; the tail coefficients are rescaled to make
    V continuous, and a rescaling larger than 5 % of the declared value is
    rejected.
    """

    _scalar_ok = False

    def __init__(self, z, v, c3, c4, label="table"):
        z = np.asarray(z, dtype=float)
        v = np.asarray(v, dtype=float)
        if z.ndim != 1 or z.shape != v.shape:
            raise ConfigurationError("table columns must be 1-D and of equal length")
        if len(z) < TABLE_MIN_ROWS:
            raise ConfigurationError(
                f"table needs at least {TABLE_MIN_ROWS} rows, got {len(z)}"
            )
        if not np.all(np.isfinite(z)) or not np.all(np.isfinite(v)):
            raise ConfigurationError("table contains non-finite values")
        if z[0] <= 0 or np.any(np.diff(z) <= 0):
            raise ConfigurationError("table z must be positive and strictly increasing")
        if np.any(v >= 0):
            raise ConfigurationError("tabulated potential must be attractive (V < 0)")
        if not (c3 > 0 and c4 > 0):
            raise DomainError("declared C3 and C4 must be positive")
        self.c3 = float(c3)
        self.c4 = float(c4)
        self.label = label
        self.z = z
        self.values = v
        self.z_min = float(z[0])
        self.z_max = float(z[-1])
        self._spline = CubicSpline(np.log(z), np.log(-v))
        self._c3_tail = -v[0] * z[0] ** 3
        self._c4_tail = -v[-1] * z[-1] ** 4
        for name, fitted, declared in (
            ("C3", self._c3_tail, self.c3),
            ("C4", self._c4_tail, self.c4),
        ):
            if abs(fitted / declared - 1.0) > TAIL_MISMATCH:
                raise ConfigurationError(
                    f"{name} tail junction mismatch: table implies {fitted:.6g}, "
                    f"declared {declared:.6g}"
                )

    @classmethod
    def from_csv(cls, path, c3, c4, label=None):
        """Read a two-column ``z_a0,V_hartree`` CSV file."""
        path = Path(path)
        with path.open(newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
        if not rows or tuple(c.strip() for c in rows[0]) != TABLE_HEADER:
            raise ConfigurationError(
                f"{path}: expected header {','.join(TABLE_HEADER)!r}"
            )
        try:
            data = np.array([[float(a), float(b)] for a, b in rows[1:]])
        except ValueError as exc:
            raise ConfigurationError(f"{path}: malformed row ({exc})") from None
        return cls(data[:, 0], data[:, 1], c3, c4, label or path.stem)

    def _regions(self, z):
        return z < self.z_min, z > self.z_max

    def _v(self, z):
        lo, hi = self._regions(z)
        mid = ~(lo | hi)
        out = np.empty_like(z)
        out[lo] = -self._c3_tail / z[lo] ** 3
        out[hi] = -self._c4_tail / z[hi] ** 4
        out[mid] = -np.exp(self._spline(np.log(z[mid])))
        return out

    def _v1(self, z):
        lo, hi = self._regions(z)
        mid = ~(lo | hi)
        out = np.empty_like(z)
        out[lo] = 3.0 * self._c3_tail / z[lo] ** 4
        out[hi] = 4.0 * self._c4_tail / z[hi] ** 5
        s = np.log(z[mid])
        out[mid] = -np.exp(self._spline(s)) * self._spline(s, 1) / z[mid]
        return out

    def _v2(self, z):
        lo, hi = self._regions(z)
        mid = ~(lo | hi)
        out = np.empty_like(z)
        out[lo] = -12.0 * self._c3_tail / z[lo] ** 5
        out[hi] = -20.0 * self._c4_tail / z[hi] ** 6
        s = np.log(z[mid])
        g1 = self._spline(s, 1)
        g2 = self._spline(s, 2)
        out[mid] = -np.exp(self._spline(s)) * (g2 + g1 * g1 - g1) / z[mid] ** 2
        return out


def _check_z(z):
    z = np.asarray(z, dtype=float)
    if not np.all(z > 0):
        raise DomainError("z must be strictly positive")
    return z


@dataclass(frozen=True)
class ScatteringProblem:
    """A particle of energy E > 0 (hartree) incident on a potential."""

    potential: PotentialModel
    particle: Particle = HYDROGEN
    energy: float = 1e-12

    def __post_init__(self):
        if not (self.energy > 0 and math.isfinite(self.energy)):
            raise DomainError(f"incident energy must be positive, got {self.energy}")

    @classmethod
    def from_kappa(cls, potential, kappa, particle=HYDROGEN):
        return cls(potential, particle, energy_of_kappa(particle, kappa))

    @classmethod
    def from_kappa_ell(cls, potential, kappa_ell, particle=HYDROGEN):
        ell = math.sqrt(2.0 * particle.mass * potential.c4)
        return cls.from_kappa(potential, kappa_ell / ell, particle)

    def with_kappa(self, kappa):
        return replace(self, energy=energy_of_kappa(self.particle, kappa))

    def with_energy(self, energy):
        return replace(self, energy=energy)

    @property
    def kappa(self):
        return kappa_of_energy(self.particle, self.energy)

    @property
    def ell(self):
        """Far-end length sqrt(2 m C4)/hbar."""
        return math.sqrt(2.0 * self.particle.mass * self.potential.c4)

    @property
    def kappa_ell(self):
        return self.kappa * self.ell

    @property
    def z_scale(self):
        """sqrt(ell/kappa), where the C4 tail equals the kinetic energy."""
        if self.ell > 0:
            return math.sqrt(self.ell / self.kappa)
        return 1.0 / self.kappa

    # Unchecked fast paths used by the integrators.
    def F(self, z):
        return 2.0 * self.particle.mass * (self.energy - self.potential.v(z))

    def dF(self, z):
        return -2.0 * self.particle.mass * self.potential.v1(z)

    def d2F(self, z):
        return -2.0 * self.particle.mass * self.potential.v2(z)

    def k(self, z):
        return np.sqrt(self.F(z))

    def k_minus_kappa(self, z):
        """k_dB(z) - kappa without cancellation."""
        return -2.0 * self.particle.mass * self.potential.v(z) / (self.k(z) + self.kappa)

    def Q(self, z):
        if not isinstance(z, float):
            z = np.asarray(z, dtype=float)
        f = self.F(z)
        f1 = self.dF(z)
        return -0.25 * self.d2F(z) / f**2 + 0.3125 * f1 * f1 / f**3


def eval_F(problem, z):
    """Squared local wavevector 2m(E - V(z))/hbar^2."""
    return problem.F(_check_z(z))


def de_broglie(problem, z):
    """Reduced de Broglie wavelength 1/sqrt(F(z))."""
    return 1.0 / np.sqrt(eval_F(problem, z))


def badlands(problem, z):
    """WKB failure factor Q = lambda^{3/2} (lambda^{1/2})''.

    With F = k^2 and lambda = 1/k,

        Q = -F''/(4 F^2) + 5 F'^2/(16 F^3),

    obtained by differentiating F^{-1/4} twice and multiplying by F^{-3/4}.
    The transformed wall potential of the WKB gauge is -kappa*ell*Q.
    """
    return problem.Q(_check_z(z))
