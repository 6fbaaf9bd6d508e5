"""Physical constants, atom/laser parameters and launch kinematics."""
from __future__ import annotations

import math
from dataclasses import dataclass

# CODATA 2018
HBAR = 1.054571817e-34  # J s
C_LIGHT = 299792458.0  # m/s
AMU = 1.66053906660e-27  # kg


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = HBAR
    c: float = C_LIGHT  # math.inf for idealized runs
    amu: float = AMU

    def __post_init__(self):
        for name in ("hbar", "c", "amu"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def infinite_c(self) -> bool:
        return math.isinf(self.c)


@dataclass(frozen=True)
class AtomSpecies:
    mass: float = 87 * AMU  # kg

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("atom mass must be positive")

    @classmethod
    def from_amu(cls, mass_amu: float, consts: PhysicalConstants | None = None) -> "AtomSpecies":
        amu = (consts or PhysicalConstants()).amu
        return cls(mass=mass_amu * amu)


@dataclass(frozen=True)
class LaserConfig:
    """Pulse parameters shared by both interferometers.

    ``omega_R`` is kept as an independent parameter: the catalogue value
    (1e7 rad/s) is not ħk²/2m. Use :func:`recoil_quantities` for the
    value implied by ``k`` and the atom mass.
    """

    k: float = 4e6  # 1/m
    N: int = 1
    omega_R: float = 1e7  # rad/s
    z_upper: float = 10.0  # m, laser height
    z_lower: float = 0.0  # m, retro-mirror height
    mirror_detuning: float = 0.0
    final_detuning: float = 0.0

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError("k must be positive")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError("N must be an integer >= 1")
        if not self.z_upper > self.z_lower:
            raise ValueError("z_upper must lie above z_lower")
        if abs(self.mirror_detuning) >= 1 or abs(self.final_detuning) >= 1:
            raise ValueError("detunings must satisfy |detuning| < 1")


@dataclass(frozen=True)
class ExperimentParams:
    z0: float = 5.0  # m
    v0: float = 6.0  # m/s
    T_R: float = 0.6  # s
    n_steps: int = 20000  # over [0, 2 T_R]

    def __post_init__(self):
        if not self.T_R > 0:
            raise ValueError("T_R must be positive")
        if int(self.n_steps) != self.n_steps or self.n_steps < 2 or self.n_steps % 2:
            raise ValueError("n_steps must be an even integer >= 2")


def recoil_quantities(laser: LaserConfig, atom: AtomSpecies,
                      consts: PhysicalConstants = PhysicalConstants()) -> tuple[float, float]:
    """Single-quantum recoil velocity ħk/m and recoil frequency ħk²/2m."""
    v_rec = consts.hbar * laser.k / atom.mass
    return v_rec, 0.5 * v_rec * laser.k


def launch_from_height(delta_h: float, g_local: float) -> tuple[float, float]:
    """Launch-mode kinematics putting the apex at the mirror pulse.

    Returns ``(T_R, v0)`` with ``T_R = sqrt(2 delta_h / g)`` and ``v0 = g T_R``.
    """
    if not delta_h > 0 or not g_local > 0:
        raise ValueError("delta_h and g_local must be positive")
    T_R = math.sqrt(2.0 * delta_h / g_local)
    return T_R, g_local * T_R
