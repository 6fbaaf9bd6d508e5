"""Classical arm trajectories.

Every arm is stored as an unkicked reference trajectory through the initial
conditions plus a deviation driven by the photon kicks. Arms of one
interferometer (and of a co-located MZI/SDDI pair) share the reference, so
arm differences are formed from millimetre-scale deviations instead of
metre-scale absolute heights. With m/hbar ~ 1e9 s/m^2 this is what keeps
the differential phase free of rounding noise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .constants import AtomSpecies, ExperimentParams, LaserConfig, PhysicalConstants
from .errors import PropagationError
from .potential import IdealPotential, PotentialModel, as_polynomial, evaluate

SNAP_TOL = 1e-9  # kick time -> grid node, in units of the step


@dataclass(frozen=True)
class KickEvent:
    time: float
    delta_p_quanta: int  # momentum change in units of hbar k
    k_scale: float = 0.0  # fractional wave-number shift for this pulse


@dataclass(frozen=True)
class ArmSpec:
    z0: float
    v0: float
    kicks: tuple[KickEvent, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kicks", tuple(self.kicks))
        times = [kk.time for kk in self.kicks]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("kick times must be strictly increasing")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Arm trajectory on a uniform grid over [0, 2 T_R].

    Velocities at kick nodes are the post-kick values; the pre-kick values
    are kept in ``dv_left`` (index -> deviation velocity).
    """

    t: np.ndarray
    ref_z: np.ndarray
    ref_v: np.ndarray
    dz: np.ndarray
    dv: np.ndarray
    kick_index: tuple[int, ...] = ()
    dv_left: dict = field(default_factory=dict)

    @property
    def z(self) -> np.ndarray:
        return self.ref_z + self.dz

    @property
    def v(self) -> np.ndarray:
        return self.ref_v + self.dv

    @property
    def h(self) -> float:
        return (self.t[-1] - self.t[0]) / (len(self.t) - 1)

    def v_left(self, i: int) -> float:
        return self.ref_v[i] + self.dv_left.get(i, self.dv[i])


def ideal_trajectory(t, N: int, k: float, z0: float, v0: float, g: float, gamma0: float,
                     atom: AtomSpecies = AtomSpecies(),
                     consts: PhysicalConstants = PhysicalConstants()):
    """First-order-in-gamma0 solution in the ideal potential after an N-quantum kick at t=0."""
    t = np.asarray(t, dtype=float)
    w = v0 + N * consts.hbar * k / atom.mass
    z = z0 + w * t - 0.5 * g * t**2 - 0.5 * gamma0 * (z0 * t**2 + w * t**3 / 3 - g * t**4 / 12)
    v = w - g * t - 0.5 * gamma0 * (2 * z0 * t + w * t**2 - g * t**3 / 3)
    return z, v


# ---------------------------------------------------------------------------
# batched fourth-order integrator

def _accel(gc, origin, z, d):
    """Return -g(z) and -(g(z+d) - g(z)) via Horner with a divided difference."""
    x = z - origin
    y = x[:, None] + d
    px = np.full_like(x, gc[-1])
    dd = np.zeros_like(d)
    for c in gc[-2::-1]:
        dd = dd * y + px[:, None]
        px = px * x + c
    return -px, -dd * d


def _kahan(s, comp, inc):
    y = inc - comp
    t = s + y
    return t, (t - s) - y


@dataclass
class BatchResult:
    """Histories from :func:`propagate_batch`; axis order (node, point[, arm])."""

    h: np.ndarray
    ref_z: np.ndarray
    ref_v: np.ndarray
    dz: np.ndarray
    dv: np.ndarray
    dv_left: dict
    kick_index: tuple[int, ...]

    def trajectory(self, p: int, a: int) -> Trajectory:
        n = self.ref_z.shape[0] - 1
        t = np.arange(n + 1) * self.h[p]
        idx = tuple(i for i in self.kick_index if self.dv_left[i][p, a] != self.dv[i, p, a])
        return Trajectory(t, self.ref_z[:, p], self.ref_v[:, p], self.dz[:, p, a],
                          self.dv[:, p, a], idx, {i: self.dv_left[i][p, a] for i in self.kick_index})


def propagate_batch(model: PotentialModel, z0, v0, h, n_steps: int,
                    kicks: Sequence[Sequence[tuple[int, float]]],
                    check_roi: bool = True) -> BatchResult:
    """Integrate ``z'' = -g(z)`` for P launch points and A kicked arms each.

    ``kicks[a]`` lists ``(node_index, velocity_jump)`` for arm ``a``; the
    jumps are shared by all points. ``h`` is the per-point step.
    All states are summed with Kahan compensation; every operation is
    elementwise so the result for one point does not depend on the batch.
    """
    poly = as_polynomial(model)
    gc = np.asarray(poly.g_coeffs(), dtype=float)
    origin = poly.origin
    z = np.array(z0, dtype=float, ndmin=1)
    v = np.array(v0, dtype=float, ndmin=1) + 0 * z
    h = np.array(h, dtype=float, ndmin=1) + 0 * z
    npts, narm = z.shape[0], len(kicks)

    jumps: dict[int, np.ndarray] = {}
    for a, arm in enumerate(kicks):
        for i, dv in arm:
            if not 0 <= i <= n_steps:
                raise ValueError(f"kick node {i} outside grid 0..{n_steps}")
            jumps.setdefault(i, np.zeros(narm))[a] += dv
    kick_index = tuple(sorted(jumps))

    ref_z = np.empty((n_steps + 1, npts))
    ref_v = np.empty_like(ref_z)
    dz = np.empty((n_steps + 1, npts, narm))
    dvh = np.empty_like(dz)
    dv_left = {}

    cz = np.zeros_like(z)
    cv = np.zeros_like(z)
    d = np.zeros((npts, narm))
    u = np.zeros_like(d)
    cd = np.zeros_like(d)
    cu = np.zeros_like(d)
    half = 0.5 * h
    sixth = h / 6.0
    half2 = half[:, None]
    sixth2 = sixth[:, None]

    for i in range(n_steps + 1):
        if i in jumps:
            dv_left[i] = u.copy()
            u, cu = _kahan(u, cu, jumps[i])
        ref_z[i] = z
        ref_v[i] = v
        dz[i] = d
        dvh[i] = u
        if i == n_steps:
            break
        a1, b1 = _accel(gc, origin, z, d)
        z2 = z + half * v
        v2 = v + half * a1
        d2 = d + half2 * u
        u2 = u + half2 * b1
        a2, b2 = _accel(gc, origin, z2, d2)
        z3 = z + half * v2
        v3 = v + half * a2
        d3 = d + half2 * u2
        u3 = u + half2 * b2
        a3, b3 = _accel(gc, origin, z3, d3)
        z4 = z + h * v3
        v4 = v + h * a3
        d4 = d + h[:, None] * u3
        u4 = u + h[:, None] * b3
        a4, b4 = _accel(gc, origin, z4, d4)
        z, cz = _kahan(z, cz, sixth * (v + 2.0 * (v2 + v3) + v4))
        v, cv = _kahan(v, cv, sixth * (a1 + 2.0 * (a2 + a3) + a4))
        d, cd = _kahan(d, cd, sixth2 * (u + 2.0 * (u2 + u3) + u4))
        u, cu = _kahan(u, cu, sixth2 * (b1 + 2.0 * (b2 + b3) + b4))

    res = BatchResult(h, ref_z, ref_v, dz, dvh, dv_left, kick_index)
    if check_roi and poly.roi is not None:
        _check_batch_roi(res, poly.roi)
    return res


def _check_batch_roi(res: BatchResult, roi) -> None:
    lo, hi = roi
    ref = res.ref_z
    if res.dz.shape[2]:
        zmin = ref + res.dz.min(axis=2)
        zmax = ref + res.dz.max(axis=2)
    else:
        zmin = zmax = ref
    bad = (zmin < lo) | (zmax > hi)
    if not bad.any():
        return
    nodes, pts = np.nonzero(bad)
    j = int(np.argmin(nodes))
    i, p = int(nodes[j]), int(pts[j])
    height = float(zmin[i, p]) if zmin[i, p] < lo else float(zmax[i, p])
    raise PropagationError(i * float(res.h[p]), height, roi)


def snap_kicks(arm: ArmSpec, h: float, n_steps: int, v_rec: float) -> list[tuple[int, float]]:
    """Map kick times onto grid nodes and momentum quanta onto velocity jumps."""
    out = []
    for kk in arm.kicks:
        x = kk.time / h
        i = round(x)
        if abs(x - i) > SNAP_TOL * max(1.0, abs(x)) or not 0 <= i <= n_steps:
            raise ValueError(f"kick time {kk.time!r} s is not a node of the {n_steps}-step grid")
        out.append((i, kk.delta_p_quanta * (1.0 + kk.k_scale) * v_rec))
    return out


def propagate_arms(model: PotentialModel, arms: Sequence[ArmSpec], params: ExperimentParams,
                   laser: LaserConfig = LaserConfig(), atom: AtomSpecies = AtomSpecies(),
                   consts: PhysicalConstants = PhysicalConstants()) -> list[Trajectory]:
    """Propagate arms sharing (z0, v0) on one grid and one reference trajectory."""
    if not arms:
        return []
    z0, v0 = arms[0].z0, arms[0].v0
    if any(a.z0 != z0 or a.v0 != v0 for a in arms):
        raise ValueError("arms propagated together must share z0 and v0")
    n = params.n_steps
    h = 2.0 * params.T_R / n
    v_rec = consts.hbar * laser.k / atom.mass
    res = propagate_batch(model, [z0], [v0], [h], n, [snap_kicks(a, h, n, v_rec) for a in arms])
    return [res.trajectory(0, a) for a in range(len(arms))]


def propagate_arm(model: PotentialModel, arm: ArmSpec, params: ExperimentParams,
                  laser: LaserConfig = LaserConfig(), atom: AtomSpecies = AtomSpecies(),
                  consts: PhysicalConstants = PhysicalConstants()) -> Trajectory:
    return propagate_arms(model, [arm], params, laser, atom, consts)[0]


# ---------------------------------------------------------------------------
# quadrature

def simpson_weights(n: int) -> np.ndarray:
    """Composite Simpson weights (unit step) for n intervals; 3/8 rule closes odd n."""
    if n < 1:
        return np.zeros(n + 1)
    w = np.zeros(n + 1)
    if n == 1:
        w[:] = 0.5
        return w
    m = n if n % 2 == 0 else n - 3
    if m:
        w[0:m + 1:2] += 2.0 / 3.0
        w[1:m:2] += 4.0 / 3.0
        w[0] -= 1.0 / 3.0
        w[m] -= 1.0 / 3.0
    if m != n:
        w[m:m + 4] += np.array([3.0, 9.0, 9.0, 3.0]) / 8.0
    return w


def segment_bounds(n: int, kick_index: Sequence[int]) -> list[tuple[int, int]]:
    cuts = sorted({0, n, *(i for i in kick_index if 0 < i < n)})
    return list(zip(cuts, cuts[1:]))


def integrate_segments(values: np.ndarray, h: float, bounds) -> float:
    """Simpson over each segment, compensated (exactly rounded) summation."""
    terms = []
    for a, b in bounds:
        terms.extend((simpson_weights(b - a) * values[a:b + 1]).tolist())
    return h * math.fsum(terms)


def _same_grid(tu: Trajectory, tl: Trajectory) -> None:
    if len(tu.t) != len(tl.t) or tu.t[-1] != tl.t[-1] or tu.t[0] != tl.t[0]:
        raise ValueError("trajectories must share one time grid")


def relative_offsets(tu: Trajectory, tl: Trajectory, origin: float = 0.0):
    """Heights of the lower arm about ``origin`` and the up-minus-low separation."""
    _same_grid(tu, tl)
    if tu.ref_z is tl.ref_z or np.array_equal(tu.ref_z, tl.ref_z):
        base = tl.ref_z - origin
        y_low = base + tl.dz
        sep = tu.dz - tl.dz
    else:
        y_low = tl.z - origin
        sep = (tu.ref_z - tl.ref_z) + (tu.dz - tl.dz)
    return y_low, sep


def power_difference(y_low, sep, n: int):
    """(y_low + sep)**n - y_low**n without cancellation."""
    y_up = y_low + sep
    acc = np.zeros_like(y_low)
    pw = np.ones_like(y_low)  # y_low**j
    for _ in range(n):
        acc = acc * y_up + pw
        pw = pw * y_low
    return acc * sep


def moment_integral(traj_up: Trajectory, traj_low: Trajectory, n: int, origin: float = 0.0) -> float:
    """Geometry moment: integral over [0, 2 T_R] of z_up**n - z_low**n (heights about ``origin``)."""
    if n < 0:
        raise ValueError("moment order must be non-negative")
    y_low, sep = relative_offsets(traj_up, traj_low, origin)
    vals = power_difference(y_low, sep, n)
    bounds = segment_bounds(len(traj_up.t) - 1, traj_up.kick_index + traj_low.kick_index)
    return integrate_segments(vals, traj_up.h, bounds)


def energy(model: PotentialModel, traj: Trajectory):
    """Energy per unit mass v^2/2 + phi(z) at every node (post-kick velocity)."""
    phi = evaluate(model if isinstance(model, IdealPotential) else as_polynomial(model), traj.z)[0]
    return 0.5 * traj.v ** 2 + phi
