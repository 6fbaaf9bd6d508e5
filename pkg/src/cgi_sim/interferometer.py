"""MZI and SDDI pulse sequences, phase contributions and the CGI differential.

Phase convention (shared with the analytic catalogue):

* propagation: -(1/hbar) * integral of L(z_up) - L(z_low)
* kick: sum of (1 + k_scale) q k z over the lower arm's vertices minus the
  same over the upper arm, q the signed number of absorbed quanta
* separation: (m/hbar) (z_up - z_low) v_aver at the output

With these signs the MZI kick phase in uniform gravity is +2 N k g T_R^2 and
the curvature term of the propagation phase is +2 N^2 hbar k^2 gamma0 T_R^3 / m.
"""
from __future__ import annotations

import math
import warnings
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .constants import AtomSpecies, ExperimentParams, LaserConfig, PhysicalConstants
from .dynamics import (ArmSpec, KickEvent, Trajectory, integrate_segments, moment_integral,
                       propagate_batch, relative_offsets, segment_bounds,
                       snap_kicks)
from .errors import ClosureWarning
from .potential import PolynomialPotential, PotentialModel, as_polynomial

CLOSURE_WARN_DZ = 1e-6  # m
MAX_CHUNK = 64  # launch points per vectorized batch


class Kind(str, Enum):
    MZI = "MZI"
    SDDI = "SDDI"


@dataclass(frozen=True)
class GeometrySpec:
    kind: Kind
    arm_up: ArmSpec
    arm_low: ArmSpec
    laser: LaserConfig
    params: ExperimentParams


@dataclass(frozen=True)
class PhaseBreakdown:
    propagation: float
    kick: float
    separation: float
    total: float
    output_separation_dz: float = 0.0
    output_dv: float = 0.0

    @classmethod
    def from_parts(cls, propagation, kick, separation, dz=0.0, dv=0.0) -> "PhaseBreakdown":
        return cls(propagation, kick, separation, propagation + kick + separation, dz, dv)


@dataclass(frozen=True)
class CGIResult:
    mzi: PhaseBreakdown
    sddi: PhaseBreakdown
    differential: float

    @classmethod
    def from_pair(cls, mzi: PhaseBreakdown, sddi: PhaseBreakdown) -> "CGIResult":
        return cls(mzi, sddi, mzi.total - sddi.total)


def kick_schedules(kind: Kind | str, N: int, T_R: float, mirror: float = 0.0,
                   final: float = 0.0) -> tuple[tuple[KickEvent, ...], tuple[KickEvent, ...]]:
    kind = Kind(kind)
    t0, t1, t2 = 0.0, T_R, 2.0 * T_R
    if kind is Kind.MZI:
        # both arms leave through the port with the initial momentum
        up = (KickEvent(t0, 2 * N), KickEvent(t1, -2 * N, mirror))
        low = (KickEvent(t1, 2 * N, mirror), KickEvent(t2, -2 * N, final))
    else:
        up = (KickEvent(t0, N), KickEvent(t1, -2 * N, mirror), KickEvent(t2, N, final))
        low = (KickEvent(t0, -N), KickEvent(t1, 2 * N, mirror), KickEvent(t2, -N, final))
    return up, low


def build_geometry(kind: Kind | str, laser: LaserConfig, params: ExperimentParams) -> GeometrySpec:
    up, low = kick_schedules(kind, laser.N, params.T_R, laser.mirror_detuning, laser.final_detuning)
    return GeometrySpec(Kind(kind), ArmSpec(params.z0, params.v0, up),
                        ArmSpec(params.z0, params.v0, low), laser, params)


# ---------------------------------------------------------------------------
# phase pieces on propagated trajectories

def _phi_difference(poly: PolynomialPotential, y_low, sep):
    """phi(y_low + sep) - phi(y_low) for heights measured from the expansion point."""
    c = poly.coeffs
    y_up = y_low + sep
    px = np.full_like(y_low, c[-1])
    dd = np.zeros_like(y_low)
    for cn in c[-2::-1]:
        dd = dd * y_up + px
        px = px * y_low + cn
    return dd * sep


def propagation_phase_traj(model: PotentialModel, up: Trajectory, low: Trajectory,
                           atom: AtomSpecies, consts: PhysicalConstants) -> float:
    poly = as_polynomial(model)
    y_low, sep = relative_offsets(up, low, poly.origin)
    pot = _phi_difference(poly, y_low, sep)
    ref_dv = up.ref_v - low.ref_v
    vref = 0.5 * (up.ref_v + low.ref_v)
    bounds = segment_bounds(len(up.t) - 1, up.kick_index + low.kick_index)
    terms = []
    for a, b in bounds:
        u_up = up.dv[a:b + 1].copy()
        u_low = low.dv[a:b + 1].copy()
        # velocities just before any kick at the segment end
        u_up[-1] = up.dv_left.get(b, up.dv[b])
        u_low[-1] = low.dv_left.get(b, low.dv[b])
        du = (u_up - u_low) + ref_dv[a:b + 1]
        vbar = vref[a:b + 1] + 0.5 * (u_up + u_low)
        lag = du * vbar - pot[a:b + 1]  # (L_up - L_low) / m
        terms.append(integrate_segments(lag, up.h, [(0, b - a)]))
    return -atom.mass / consts.hbar * math.fsum(terms)


def kick_phase_traj(kicks_up, kicks_low, up: Trajectory, low: Trajectory, k: float) -> float:
    """kicks_*: (node, quanta, k_scale) triples."""
    grouped = defaultdict(int)
    for sign, arm in ((-1, kicks_up), (1, kicks_low)):
        for i, q, s in arm:
            grouped[(i, s)] += sign * q
    terms = []
    # reference part: identical for any geometry sharing the reference and net vertex charges
    for (i, s), Q in sorted(grouped.items()):
        if Q:
            terms.append(k * (1.0 + s) * Q * up.ref_z[i])
    ref_part = math.fsum(terms)
    dev = []
    for sign, arm, tr in ((-1, kicks_up, up), (1, kicks_low, low)):
        for i, q, s in arm:
            dev.append(sign * k * (1.0 + s) * q * tr.dz[i])
    if up.ref_z is not low.ref_z and not np.array_equal(up.ref_z, low.ref_z):
        for sign, arm, tr in ((-1, kicks_up, up), (1, kicks_low, low)):
            for i, q, s in arm:
                dev.append(sign * k * (1.0 + s) * q * (tr.ref_z[i] - up.ref_z[i]))
    return ref_part + math.fsum(dev)


def separation_terms(up: Trajectory, low: Trajectory) -> tuple[float, float, float]:
    """Output separation dz, velocity difference and mean velocity (post final pulse)."""
    dz = (up.ref_z[-1] - low.ref_z[-1]) + (up.dz[-1] - low.dz[-1])
    dv = (up.ref_v[-1] - low.ref_v[-1]) + (up.dv[-1] - low.dv[-1])
    v_aver = 0.5 * (up.ref_v[-1] + low.ref_v[-1]) + 0.5 * (up.dv[-1] + low.dv[-1])
    return float(dz), float(dv), float(v_aver)


def separation_phase_traj(up: Trajectory, low: Trajectory, atom: AtomSpecies,
                          consts: PhysicalConstants) -> float:
    dz, _, v_aver = separation_terms(up, low)
    return atom.mass / consts.hbar * dz * v_aver


# ---------------------------------------------------------------------------
# geometry-level API

def _vertex_list(arm: ArmSpec, h: float) -> list[tuple[int, int, float]]:
    return [(round(kk.time / h), kk.delta_p_quanta, kk.k_scale) for kk in arm.kicks]


def _propagate_geometries(geoms: Sequence[GeometrySpec], model: PotentialModel,
                          atom: AtomSpecies, consts: PhysicalConstants):
    p = geoms[0].params
    laser = geoms[0].laser
    for gm in geoms:
        if (gm.params != p or gm.laser.k != laser.k or gm.arm_up.z0 != p.z0 or gm.arm_low.z0 != p.z0
                or gm.arm_up.v0 != p.v0 or gm.arm_low.v0 != p.v0):
            raise ValueError("geometries run together must share launch, grid and wave number")
    n = p.n_steps
    h = 2.0 * p.T_R / n
    v_rec = consts.hbar * laser.k / atom.mass
    arms = [a for gm in geoms for a in (gm.arm_up, gm.arm_low)]
    res = propagate_batch(model, [p.z0], [p.v0], [h], n, [snap_kicks(a, h, n, v_rec) for a in arms])
    return [res.trajectory(0, j) for j in range(len(arms))], h


def _breakdown(gm: GeometrySpec, model, up, low, h, atom, consts, warn=True) -> PhaseBreakdown:
    prop = propagation_phase_traj(model, up, low, atom, consts)
    kick = kick_phase_traj(_vertex_list(gm.arm_up, h), _vertex_list(gm.arm_low, h), up, low,
                           gm.laser.k)
    dz, dv, v_aver = separation_terms(up, low)
    sep = atom.mass / consts.hbar * dz * v_aver
    if warn and abs(dz) > CLOSURE_WARN_DZ:
        warnings.warn(f"{gm.kind.value} output separation {dz:.3g} m exceeds "
                      f"{CLOSURE_WARN_DZ:g} m; separation phase dominates", ClosureWarning,
                      stacklevel=3)
    return PhaseBreakdown.from_parts(prop, kick, sep, dz, dv)


def propagate_geometry(geom: GeometrySpec, model: PotentialModel,
                       atom: AtomSpecies = AtomSpecies(),
                       consts: PhysicalConstants = PhysicalConstants()) -> tuple[Trajectory, Trajectory]:
    trajs, _ = _propagate_geometries([geom], model, atom, consts)
    return trajs[0], trajs[1]


def propagation_phase(geom: GeometrySpec, model: PotentialModel, atom: AtomSpecies = AtomSpecies(),
                      consts: PhysicalConstants = PhysicalConstants()) -> float:
    up, low = propagate_geometry(geom, model, atom, consts)
    return propagation_phase_traj(model, up, low, atom, consts)


def kick_phase(geom: GeometrySpec, model: PotentialModel, atom: AtomSpecies = AtomSpecies(),
               consts: PhysicalConstants = PhysicalConstants()) -> float:
    (up, low), h = _propagate_geometries([geom], model, atom, consts)
    return kick_phase_traj(_vertex_list(geom.arm_up, h), _vertex_list(geom.arm_low, h), up, low,
                           geom.laser.k)


def separation_phase(geom: GeometrySpec, model: PotentialModel, atom: AtomSpecies = AtomSpecies(),
                     consts: PhysicalConstants = PhysicalConstants()) -> float:
    up, low = propagate_geometry(geom, model, atom, consts)
    return separation_phase_traj(up, low, atom, consts)


def run_geometry(geom: GeometrySpec, model: PotentialModel, atom: AtomSpecies = AtomSpecies(),
                 consts: PhysicalConstants = PhysicalConstants()) -> PhaseBreakdown:
    (up, low), h = _propagate_geometries([geom], model, atom, consts)
    return _breakdown(geom, model, up, low, h, atom, consts)


def run_cgi_with_trajectories(laser: LaserConfig, params: ExperimentParams, model: PotentialModel,
                              atom: AtomSpecies = AtomSpecies(),
                              consts: PhysicalConstants = PhysicalConstants(), warn: bool = True):
    geoms = [build_geometry(Kind.MZI, laser, params), build_geometry(Kind.SDDI, laser, params)]
    trajs, h = _propagate_geometries(geoms, model, atom, consts)
    mzi = _breakdown(geoms[0], model, trajs[0], trajs[1], h, atom, consts, warn)
    sddi = _breakdown(geoms[1], model, trajs[2], trajs[3], h, atom, consts, warn)
    return CGIResult.from_pair(mzi, sddi), trajs


def run_cgi(laser: LaserConfig, params: ExperimentParams, model: PotentialModel,
            atom: AtomSpecies = AtomSpecies(), consts: PhysicalConstants = PhysicalConstants(),
            warn: bool = True) -> CGIResult:
    """MZI and SDDI from identical launch conditions on one grid and reference."""
    return run_cgi_with_trajectories(laser, params, model, atom, consts, warn)[0]


def _cgi_chunk(model, laser, atom, consts, z0, v0, T_R, n_steps):
    h = 2.0 * np.asarray(T_R, dtype=float) / n_steps
    v_rec = consts.hbar * laser.k / atom.mass
    vertices = []
    arms = []
    for kind in (Kind.MZI, Kind.SDDI):
        for sched in kick_schedules(kind, laser.N, 1.0, laser.mirror_detuning, laser.final_detuning):
            # unit T_R: nodes 0, n/2, n are the same for every point
            verts = [(round(kk.time * n_steps / 2), kk.delta_p_quanta, kk.k_scale) for kk in sched]
            vertices.append(verts)
            arms.append([(i, q * (1.0 + s) * v_rec) for i, q, s in verts])
    res = propagate_batch(model, z0, v0, h, n_steps, arms)
    out = []
    for p in range(len(h)):
        tr = [res.trajectory(p, a) for a in range(4)]
        parts = []
        for j in (0, 2):
            up, low = tr[j], tr[j + 1]
            prop = propagation_phase_traj(model, up, low, atom, consts)
            kick = kick_phase_traj(vertices[j], vertices[j + 1], up, low, laser.k)
            dz, dv, v_aver = separation_terms(up, low)
            parts.append(PhaseBreakdown.from_parts(prop, kick, atom.mass / consts.hbar * dz * v_aver,
                                                   dz, dv))
        out.append((CGIResult.from_pair(*parts), tr))
    return out


def run_cgi_batch(laser: LaserConfig, model: PotentialModel, z0, v0, T_R, n_steps: int = 20000,
                  atom: AtomSpecies = AtomSpecies(), consts: PhysicalConstants = PhysicalConstants(),
                  threads: int = 1, chunk: int | None = None, keep_trajectories: bool = False):
    """CGI runs for many launch points; results come back in input order.

    Points are split into chunks (optionally on worker threads). Every
    arithmetic step is elementwise, so chunking and threading do not change
    any bit of the output.
    """
    z0, v0, T_R = np.broadcast_arrays(*(np.atleast_1d(np.asarray(x, dtype=float)) for x in (z0, v0, T_R)))
    if n_steps < 2 or n_steps % 2:
        raise ValueError("n_steps must be an even integer >= 2")
    if np.any(T_R <= 0):
        raise ValueError("T_R must be positive")
    if chunk is None:
        # spread points over the workers; 64 keeps memory per chunk modest
        chunk = min(MAX_CHUNK, -(-len(z0) // max(threads, 1)))
    idx = [slice(i, i + chunk) for i in range(0, len(z0), chunk)]

    def work(sl):
        return _cgi_chunk(model, laser, atom, consts, z0[sl], v0[sl], T_R[sl], n_steps)

    if threads > 1 and len(idx) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(work, idx))
    else:
        parts = [work(sl) for sl in idx]
    flat = [r for part in parts for r in part]
    return flat if keep_trajectories else [r for r, _ in flat]


def curvature_phase_series(model: PotentialModel, mzi_pair: tuple[Trajectory, Trajectory],
                           sddi_pair: tuple[Trajectory, Trajectory], n_max: int,
                           atom: AtomSpecies = AtomSpecies(),
                           consts: PhysicalConstants = PhysicalConstants()) -> float:
    """(m/hbar) sum_{n=2}^{n_max} phi^(n)/n! [A_MZI(n) - A_SDDI(n)].

    The overall sign is positive so that the series reproduces the simulated
    differential, which follows the propagation-phase convention above.
    Moments are taken about the model's expansion point.
    """
    poly = as_polynomial(model)
    if n_max > poly.degree:
        raise ValueError(f"n_max={n_max} exceeds potential degree {poly.degree}")
    terms = []
    for n in range(2, n_max + 1):
        c = poly.coeffs[n]
        if c == 0.0:
            continue
        a_mzi = moment_integral(*mzi_pair, n, origin=poly.origin)
        a_sddi = moment_integral(*sddi_pair, n, origin=poly.origin)
        terms.append(c * (a_mzi - a_sddi))
    return atom.mass / consts.hbar * math.fsum(terms)
