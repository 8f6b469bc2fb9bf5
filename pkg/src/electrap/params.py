"""Physical parameter cards (SI units, angular frequencies in rad/s)."""

import math
import warnings
from dataclasses import dataclass

from .constants import CONST, TWO_PI
from .errors import NotDispersive, ValidationError

AXES = ("x", "y", "z")


def axis_index(axis):
    return AXES.index(axis) if isinstance(axis, str) else int(axis)


@dataclass(frozen=True)
class ElectronParams:
    omega: tuple = (TWO_PI * 400e6, TWO_PI * 500e6, TWO_PI * 400e6)
    omega_s: float = None
    B0: float = 1e-3
    mass: float = CONST.m_e
    charge: float = -CONST.e

    def __post_init__(self):
        if len(self.omega) != 3 or min(self.omega) <= 0:
            raise ValidationError("three positive secular frequencies required")
        zeeman = zeeman_splitting(self.B0)
        if self.omega_s is None:
            object.__setattr__(self, "omega_s", zeeman)
        elif self.B0 > 0 and abs(self.omega_s / zeeman - 1) > 0.01:
            raise ValidationError(
                f"spin splitting {self.omega_s:.4g} rad/s inconsistent with B0={self.B0} T"
            )

    @property
    def omega_y(self):
        return self.omega[1]

    def secular(self, axis):
        return self.omega[axis_index(axis)]


def zeeman_splitting(B0):
    """Electron spin splitting ``g mu_B B0 / hbar`` in rad/s."""
    return CONST.g_e * CONST.mu_B * B0 / CONST.hbar


@dataclass(frozen=True)
class ResonatorParams:
    Omega: float
    Z: float
    C: float
    L: float
    t1: float = 45e-6

    def __post_init__(self):
        if min(self.Omega, self.Z, self.C, self.L) <= 0:
            raise ValidationError("resonator parameters must be positive")
        if abs(self.Omega * math.sqrt(self.L * self.C) - 1) > 1e-9:
            raise ValidationError("Omega != 1/sqrt(LC)")
        if abs(math.sqrt(self.L / self.C) / self.Z - 1) > 1e-9:
            raise ValidationError("Z != sqrt(L/C)")

    @classmethod
    def from_omega_impedance(cls, Omega, Z, t1=45e-6):
        return cls(Omega=Omega, Z=Z, C=1.0 / (Omega * Z), L=Z / Omega, t1=t1)


@dataclass(frozen=True)
class TransmonParams:
    omega_t: float
    Omega_c: float
    G_tc: float
    t1: float = 70e-6
    t2: float = 92e-6

    @property
    def Delta(self):
        return self.Omega_c - self.omega_t

    def check_dispersive(self):
        check_dispersive(self.Delta, self.G_tc)


def check_dispersive(Delta, G_tc):
    if abs(Delta) < 5 * abs(G_tc):
        raise NotDispersive(f"|Delta|={abs(Delta):.4g} < 5*G_tc={5 * abs(G_tc):.4g}")
    if abs(Delta) < 10 * abs(G_tc):
        warnings.warn("cavity-transmon detuning below 10*G_tc; dispersive reduction is rough",
                      stacklevel=3)


@dataclass(frozen=True)
class DriveParams:
    A_d: float = 350e-9
    Omega_d: float = TWO_PI * 6.5e9
    Omega_tr: float = TWO_PI * 7e9
    V_tr: float = 0.4
    V_d: float = 0.2

    def __post_init__(self):
        if self.A_d < 0:
            raise ValidationError("driven amplitude must be >= 0")


@dataclass(frozen=True)
class CouplingGeometry:
    """Coupling-electrode expansion lengths per axis (x, y, z), metres."""

    D1: tuple = (math.inf, 20e-6, math.inf)
    D2: tuple = (math.inf, 7.3e-6, math.inf)

    def __post_init__(self):
        if any(d <= 0 for d in self.D2):
            raise ValidationError("quadrupole coupling lengths must be > 0")


@dataclass(frozen=True)
class RateCard:
    y0: float
    q0: float
    g: float

    @property
    def g_p(self):
        return self.g / 2.0
