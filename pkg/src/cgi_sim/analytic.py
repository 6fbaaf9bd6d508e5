"""Closed-form phase catalogue for the ideal potential phi = g z + gamma0 z^2 / 2.

Used as an independent oracle for the numerical engine. Prefactors are kept
as exact fractions. Terms carrying 1/c^2 are catalogue-only and vanish when
``consts.c`` is infinite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .constants import AtomSpecies, ExperimentParams, LaserConfig, PhysicalConstants
from .interferometer import Kind, PhaseBreakdown


@dataclass(frozen=True)
class AnalyticTerm:
    id: str
    expression: str
    prefactor_mzi: Fraction
    prefactor_sddi: Fraction
    value: float  # monomial magnitude (without prefactor), rad

    @property
    def prefactor_diff(self) -> Fraction:
        return self.prefactor_mzi - self.prefactor_sddi

    def phase(self, kind: Kind | str) -> float:
        pref = self.prefactor_mzi if Kind(kind) is Kind.MZI else self.prefactor_sddi
        return float(pref) * self.value

    @property
    def differential(self) -> float:
        return float(self.prefactor_diff) * self.value


_F = Fraction
# (id, expression, MZI, SDDI)
TABLE1_ROWS = (
    ("1", "N k g T_R^2", _F(2), _F(2)),
    ("2", "N k z0 Gamma0 T_R^2", _F(2), _F(2)),
    ("3", "N k v0 Gamma0 T_R^3", _F(2), _F(2)),
    ("4", "N k g Gamma0 T_R^4", _F(-7, 6), _F(-7, 6)),
    ("5", "N^2 hbar k^2 Gamma0 T_R^3 / m", _F(2), _F(0)),
    ("6", "N omega_R g^2 T_R^3 / c^2", _F(-6), _F(-6)),
    ("7", "N omega_R g v0 T_R^2 / c^2", _F(6), _F(6)),
    ("8", "N^2 omega_R hbar k g T_R^2 / (m c^2)", _F(10), _F(0)),
    ("9", "N^2 omega_R hbar k v0 T_R / (m c^2)", _F(-4), _F(0)),
    ("10", "N^3 omega_R hbar^2 k^2 T_R / (m^2 c^2)", _F(0), _F(4)),
)


def _monomials(laser: LaserConfig, atom: AtomSpecies, params: ExperimentParams, g: float,
               gamma0: float, consts: PhysicalConstants) -> dict[str, float]:
    N, k, wR = laser.N, laser.k, laser.omega_R
    T, z0, v0 = params.T_R, params.z0, params.v0
    hbar, m = consts.hbar, atom.mass
    inv_c2 = 0.0 if consts.infinite_c else 1.0 / consts.c**2
    return {
        "1": N * k * g * T**2,
        "2": N * k * z0 * gamma0 * T**2,
        "3": N * k * v0 * gamma0 * T**3,
        "4": N * k * g * gamma0 * T**4,
        "5": N**2 * hbar * k**2 * gamma0 * T**3 / m,
        "6": N * wR * g**2 * T**3 * inv_c2,
        "7": N * wR * g * v0 * T**2 * inv_c2,
        "8": N**2 * wR * hbar * k * g * T**2 / m * inv_c2,
        "9": N**2 * wR * hbar * k * v0 * T / m * inv_c2,
        "10": N**3 * wR * hbar**2 * k**2 * T / m**2 * inv_c2,
    }


def table1_catalog(laser: LaserConfig, atom: AtomSpecies, params: ExperimentParams,
                   g: float, gamma0: float,
                   consts: PhysicalConstants = PhysicalConstants()) -> list[AnalyticTerm]:
    """All ten catalogue rows evaluated at the given parameters.

    ``omega_R`` comes from the laser configuration, not from k and m.
    """
    vals = _monomials(laser, atom, params, g, gamma0, consts)
    return [AnalyticTerm(i, expr, pm, ps, vals[i]) for i, expr, pm, ps in TABLE1_ROWS]


def closed_form_breakdown(kind: Kind | str, laser: LaserConfig, atom: AtomSpecies,
                          params: ExperimentParams, g: float, gamma0: float,
                          consts: PhysicalConstants = PhysicalConstants(),
                          include_disputed: bool = False) -> PhaseBreakdown:
    """Separation, kick and propagation phases of one geometry in the ideal potential.

    The 1/c^2 propagation terms are assigned so that the per-geometry totals
    reproduce the catalogue columns. ``include_disputed`` adds the SDDI
    ``-2 N^2 hbar k^2 Gamma0 T_R^3 / m`` propagation term, which piecewise
    integration does not support.
    """
    kind = Kind(kind)
    r = _monomials(laser, atom, params, g, gamma0, consts)
    mzi = kind is Kind.MZI
    # r1 = NkgT^2, r2 = Nkz0GT^2, r3 = Nkv0GT^3, r4 = NkgGT^4, r5 = N^2 hbar k^2 G T^3/m
    sep = -2 * r["3"] + 4 * r["4"] + 8 * r["6"] - 4 * r["7"]
    kick = 2 * r["1"] + 2 * r["2"] + 2 * r["3"] - 7 / 6 * r["4"] - 6 * r["6"] + 6 * r["7"]
    prop = -4 * r["4"] + 2 * r["3"] - 8 * r["6"] + 4 * r["7"]
    if mzi:
        sep += -8 * r["8"] + 4 * r["9"]
        kick += 6 * r["8"] - 4 * r["9"]
        prop += 2 * r["5"] + 12 * r["8"] - 4 * r["9"]
    else:
        prop += 4 * r["10"]
        if include_disputed:
            prop += -2 * r["5"]
    return PhaseBreakdown.from_parts(prop, kick, sep)


def scale_factor(laser: LaserConfig, atom: AtomSpecies, T_R: float,
                 consts: PhysicalConstants = PhysicalConstants()) -> float:
    """f = 2 N^2 hbar k^2 T_R^3 / m, in s^2."""
    return 2.0 * laser.N**2 * consts.hbar * laser.k**2 * T_R**3 / atom.mass


def ideal_cgi_phase(laser: LaserConfig, atom: AtomSpecies, T_R: float, gamma0: float,
                    consts: PhysicalConstants = PhysicalConstants()) -> float:
    return scale_factor(laser, atom, T_R, consts) * gamma0


def closed_form_differential(laser: LaserConfig, atom: AtomSpecies, params: ExperimentParams,
                             g: float, gamma0: float,
                             consts: PhysicalConstants = PhysicalConstants()) -> float:
    return math.fsum(t.differential for t in table1_catalog(laser, atom, params, g, gamma0, consts))
