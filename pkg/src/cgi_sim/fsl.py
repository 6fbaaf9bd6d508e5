"""Finite-speed-of-light phases and last-pulse detuning mitigation (closed form)."""
from __future__ import annotations

from dataclasses import dataclass

from .constants import AtomSpecies, PhysicalConstants
from .errors import SingularityError

POLE_TOL = 1e-6  # s


@dataclass(frozen=True)
class FslConfig:
    z_upper: float = 10.0
    z_lower: float = 0.0
    v0: float = 5.0
    T_R: float = 0.2
    N: int = 1
    k: float = 4e6

    def __post_init__(self):
        if not self.z_upper > self.z_lower:
            raise ValueError("z_upper must lie above z_lower")


def _v_launch(cfg: FslConfig, atom: AtomSpecies, consts: PhysicalConstants) -> float:
    """v0 + N hbar k / m."""
    return cfg.v0 + cfg.N * consts.hbar * cfg.k / atom.mass


def fsl_phase(cfg: FslConfig, z0: float, g: float, atom: AtomSpecies = AtomSpecies(),
              consts: PhysicalConstants = PhysicalConstants()) -> tuple[float, float]:
    """Two-photon Bragg FSL phase split into its T_R-dependent and static parts."""
    if consts.infinite_c:
        return 0.0, 0.0
    pref = consts.hbar * cfg.N**2 * cfg.k**2 / (atom.mass * consts.c)
    time_dependent = 4.0 * pref * cfg.T_R * (4.0 * g * cfg.T_R - _v_launch(cfg, atom, consts))
    static = 2.0 * pref * (2.0 * cfg.z_lower - z0 - cfg.z_upper)
    return time_dependent, static


def detuning_phase(cfg: FslConfig, delta_det: float, g: float, atom: AtomSpecies = AtomSpecies(),
                   consts: PhysicalConstants = PhysicalConstants()) -> float:
    """Extra phase from scaling the last pulse's wave number by (1 + delta_det)."""
    return 2.0 * cfg.N * cfg.k * cfg.T_R * delta_det * (_v_launch(cfg, atom, consts) - g * cfg.T_R)


def detuning_pole(cfg: FslConfig, g: float, atom: AtomSpecies = AtomSpecies(),
                  consts: PhysicalConstants = PhysicalConstants()) -> float:
    """T_R at which v0 + N hbar k/m = g T_R and the optimal detuning diverges."""
    return _v_launch(cfg, atom, consts) / g


def optimal_detuning(cfg: FslConfig, g: float, atom: AtomSpecies = AtomSpecies(),
                     consts: PhysicalConstants = PhysicalConstants()) -> tuple[float, float, float]:
    """Detuning whose extra phase cancels the time-dependent FSL phase.

    Returns ``(delta_det, nu_det, pole_T_R)`` with ``nu_det = c k delta_det``.
    """
    pole = detuning_pole(cfg, g, atom, consts)
    if abs(cfg.T_R - pole) < POLE_TOL:
        raise SingularityError(f"T_R={cfg.T_R:g} s sits on the detuning pole at {pole:.6g} s", pole)
    if consts.infinite_c:
        return 0.0, 0.0, pole
    vl = _v_launch(cfg, atom, consts)
    v_rec = consts.hbar * cfg.k / atom.mass
    delta = 2.0 * cfg.N * (vl - 4.0 * g * cfg.T_R) / (vl - g * cfg.T_R) * v_rec / consts.c
    return delta, consts.c * cfg.k * delta, pole
