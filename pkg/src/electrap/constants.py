"""CODATA constants in SI units (taken from :mod:`scipy.constants`)."""

import math
from dataclasses import dataclass

import numpy as np
import scipy.constants as sc


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = sc.hbar
    e: float = sc.e
    m_e: float = sc.m_e
    mu_B: float = sc.physical_constants["Bohr magneton"][0]
    mu0: float = sc.mu_0
    eps0: float = sc.epsilon_0
    k_B: float = sc.k
    g_e: float = abs(sc.physical_constants["electron g factor"][0])
    amu: float = sc.physical_constants["atomic mass constant"][0]


CONST = PhysicalConstants()

HBAR = CONST.hbar
E_CHARGE = CONST.e
M_E = CONST.m_e
TWO_PI = 2.0 * math.pi


def bose_occupation(freq_hz, temperature):
    """Mean thermal occupation of a mode at ``freq_hz`` (Hz) and ``temperature`` (K)."""
    if temperature <= 0:
        return 0.0
    x = sc.h * freq_hz / (sc.k * temperature)
    return float(1.0 / np.expm1(x))
