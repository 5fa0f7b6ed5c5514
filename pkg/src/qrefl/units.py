"""Atomic units and the handful of conversions this package needs.

Internally every quantity is expressed in Hartree atomic units
(hbar = m_e = a0 = E_h = 1). Public functions accept energies in
``hartree`` or ``neV`` and lengths in ``a0`` or ``nm``.

Constants are CODATA 2018 values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigurationError, DomainError

HARTREE_EV = 27.211386245988
"""Hartree energy in eV (CODATA 2018)."""

BOHR_NM = 0.0529177210903
"""Bohr radius in nm (CODATA 2018)."""

ATOMIC_MASS_UNIT_ME = 1822.888486209
"""Atomic mass constant in electron masses (CODATA 2018)."""

HYDROGEN_MASS_U = 1.00782503223
"""Mass of the 1H atom in atomic mass units."""

HYDROGEN_MASS = HYDROGEN_MASS_U * ATOMIC_MASS_UNIT_ME

NEV_PER_HARTREE = HARTREE_EV * 1e9

_ENERGY_TO_HARTREE = {"hartree": 1.0, "neV": 1.0 / NEV_PER_HARTREE}
_LENGTH_TO_A0 = {"a0": 1.0, "nm": 1.0 / BOHR_NM}


@dataclass(frozen=True)
class UnitSystem:
    """Hartree atomic units; the only unit system used internally."""

    hbar: float = 1.0
    electron_mass: float = 1.0
    bohr_radius: float = 1.0
    hartree: float = 1.0
    nev_to_hartree: float = 1.0 / NEV_PER_HARTREE
    nm_to_a0: float = 1.0 / BOHR_NM


ATOMIC = UnitSystem()


@dataclass(frozen=True)
class Particle:
    """A point particle of given mass (electron masses)."""

    mass: float
    label: str = ""

    def __post_init__(self):
        if not (self.mass > 0 and math.isfinite(self.mass)):
            raise DomainError(f"particle mass must be positive, got {self.mass}")


HYDROGEN = Particle(HYDROGEN_MASS, "H")


def _factor(table, unit, kind):
    try:
        return table[unit]
    except KeyError:
        raise ConfigurationError(
            f"unknown {kind} unit {unit!r}; expected one of {sorted(table)}"
        ) from None


def convert_energy(value, from_unit, to_unit):
    """Convert an energy between ``hartree`` and ``neV``."""
    if not math.isfinite(value):
        raise DomainError(f"energy must be finite, got {value}")
    f_in = _factor(_ENERGY_TO_HARTREE, from_unit, "energy")
    f_out = _factor(_ENERGY_TO_HARTREE, to_unit, "energy")
    if from_unit == to_unit:
        return float(value)
    return value * f_in / f_out


def convert_length(value, from_unit, to_unit):
    """Convert a length between ``a0`` and ``nm``."""
    if not math.isfinite(value):
        raise DomainError(f"length must be finite, got {value}")
    f_in = _factor(_LENGTH_TO_A0, from_unit, "length")
    f_out = _factor(_LENGTH_TO_A0, to_unit, "length")
    if from_unit == to_unit:
        return float(value)
    return value * f_in / f_out


def kappa_of_energy(particle, energy):
    """Asymptotic wavevector sqrt(2 m E)/hbar (a0^-1) for an energy in hartree."""
    if not energy > 0:
        raise DomainError(f"incident energy must be positive, got {energy}")
    return math.sqrt(2.0 * particle.mass * energy)


def energy_of_kappa(particle, kappa):
    """Inverse of :func:`kappa_of_energy`."""
    if not kappa > 0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    return kappa * kappa / (2.0 * particle.mass)


def parse_energy(text):
    """Parse strings such as ``"0.1neV"`` or ``"1e-12 hartree"`` into hartree."""
    s = text.strip()
    for unit in sorted(_ENERGY_TO_HARTREE, key=len, reverse=True):
        if s.endswith(unit):
            num = s[: -len(unit)].strip()
            break
    else:
        raise ConfigurationError(
            f"energy {text!r} lacks a unit suffix (neV or hartree)"
        )
    try:
        value = float(num)
    except ValueError:
        raise ConfigurationError(f"cannot parse energy value {text!r}") from None
    return convert_energy(value, unit, "hartree")
