"""Gravity-gradient estimation from CGI phases."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import scale_factor
from .constants import AtomSpecies, LaserConfig, PhysicalConstants, launch_from_height
from .dynamics import Trajectory, integrate_segments, propagate_batch, segment_bounds
from .errors import ROIError
from .interferometer import run_cgi_batch
from .potential import PotentialModel, as_polynomial, evaluate

CUBIC_MEAN_LAUNCH = (16.0 / 35.0) ** (1.0 / 3.0)  # cubic mean / delta_h for a launch parabola
DEFAULT_SPACING = 0.1  # m
LAUNCH_STEPS = 2000  # grid for the launch-height solve; cubic mean converged to ~1e-13 m


def _cubic_mean_arrays(z: np.ndarray, h: float) -> float:
    vals = np.abs(z - z[0]) ** 3
    n = len(z) - 1
    return (integrate_segments(vals, h, segment_bounds(n, ())) / (n * h)) ** (1.0 / 3.0)


def cubic_mean(traj: Trajectory) -> float:
    """((1/2T_R) * integral |z(t) - z0|^3 dt)^(1/3)."""
    return _cubic_mean_arrays(traj.z, traj.h)


@dataclass(frozen=True)
class ProfileEstimate:
    z_eval: np.ndarray
    gamma_hat: np.ndarray
    gamma_true: np.ndarray
    phase: np.ndarray
    z_launch: np.ndarray
    delta_h: float

    @property
    def rms_error(self) -> float:
        if not len(self.z_eval):
            raise ValueError("empty estimate: rms error undefined")
        return float(np.sqrt(np.mean((self.gamma_hat - self.gamma_true) ** 2)))

    @property
    def relative_rms_error(self) -> float:
        """RMS error over the mean gradient magnitude of the sampled heights."""
        return self.rms_error / float(np.mean(np.abs(self.gamma_true)))

    @property
    def mean_abs_phase(self) -> float:
        if not len(self.z_eval):
            raise ValueError("empty estimate")
        return float(np.mean(np.abs(self.phase)))

    def rows(self):
        return zip(self.z_eval, self.gamma_hat, self.gamma_true, self.phase, self.z_launch)


def _g_local(model: PotentialModel, z) -> np.ndarray:
    return np.asarray(evaluate(model, z)[1], dtype=float) + 0 * np.asarray(z, dtype=float)


def solve_launch(model: PotentialModel, z_eval, delta_h: float, n_steps: int = LAUNCH_STEPS,
                 tol: float = 1e-10, max_iter: int = 8):
    """Launch heights with z_launch = z_eval - cubic_mean(trajectory from z_launch).

    Fixed-point iteration on the unkicked reference trajectory, with launch
    kinematics from the local g at the launch height.
    """
    z_eval = np.atleast_1d(np.asarray(z_eval, dtype=float))
    z_l = z_eval - CUBIC_MEAN_LAUNCH * delta_h
    for _ in range(max_iter):
        try:
            g_loc = _g_local(model, z_l)
        except ROIError as exc:
            raise ROIError(f"launch height outside ROI for delta_h={delta_h:g} m: {exc}") from None
        T = np.sqrt(2.0 * delta_h / g_loc)
        v0 = g_loc * T
        h = 2.0 * T / n_steps
        res = propagate_batch(model, z_l, v0, h, n_steps, [], check_roi=False)
        cm = np.array([_cubic_mean_arrays(res.ref_z[:, p], h[p]) for p in range(len(z_l))])
        z_new = z_eval - cm
        done = np.max(np.abs(z_new - z_l)) < tol
        z_l = z_new
        if done:
            break
    g_loc = _g_local(model, z_l)
    T = np.sqrt(2.0 * delta_h / g_loc)
    return z_l, T, g_loc * T


def _run_points(model, laser, atom, z_eval, delta_h, consts, n_steps, threads):
    z_l, T, v0 = solve_launch(model, z_eval, delta_h)
    try:
        res = run_cgi_batch(laser, model, z_l, v0, T, n_steps, atom, consts, threads=threads)
    except ROIError as exc:
        raise ROIError(f"CGI for delta_h={delta_h:g} m leaves the ROI: {exc}") from None
    phase = np.array([r.differential for r in res])
    f = np.array([scale_factor(laser, atom, t, consts) for t in T])
    return phase / f, phase, z_l


def estimate_gamma(model: PotentialModel, laser: LaserConfig, atom: AtomSpecies, z_eval: float,
                   delta_h: float, consts: PhysicalConstants = PhysicalConstants(),
                   n_steps: int = 20000) -> tuple[float, float, float]:
    """Gradient estimate at ``z_eval`` from a CGI launched one cubic mean below it.

    Returns ``(gamma_hat, phase, z_launch)``; gamma_hat = phase / f(T_R).
    """
    gh, ph, zl = _run_points(model, laser, atom, [z_eval], delta_h, consts, n_steps, 1)
    return float(gh[0]), float(ph[0]), float(zl[0])


def default_z_range(model: PotentialModel, delta_h: float, spacing: float = DEFAULT_SPACING,
                    margin: float = 0.01) -> np.ndarray:
    """Evaluation heights whose launch trajectory fits inside the ROI.

    ``margin`` leaves room for the recoil-lifted upper MZI arm.
    """
    roi = as_polynomial(model).roi
    if roi is None:
        raise ValueError("model has no ROI; pass z_range explicitly")
    lo = roi[0] + CUBIC_MEAN_LAUNCH * delta_h + margin
    hi = roi[1] - (1.0 - CUBIC_MEAN_LAUNCH) * delta_h - margin
    if hi < lo:
        return np.empty(0)
    start = math.ceil(lo / spacing - 1e-9) * spacing
    n = int(math.floor((hi - start) / spacing + 1e-9)) + 1
    return np.round(start + spacing * np.arange(max(n, 0)), 12)


def sweep_estimate(model: PotentialModel, laser: LaserConfig, atom: AtomSpecies, z_range,
                   delta_h: float, consts: PhysicalConstants = PhysicalConstants(),
                   n_steps: int = 20000, threads: int = 1) -> ProfileEstimate:
    z = np.asarray(z_range if z_range is not None else default_z_range(model, delta_h), dtype=float)
    if z.size == 0:
        empty = np.empty(0)
        return ProfileEstimate(empty, empty, empty, empty, empty, delta_h)
    gh, ph, zl = _run_points(model, laser, atom, z, delta_h, consts, n_steps, threads)
    gamma_true = np.asarray(evaluate(model, z)[2], dtype=float) + 0 * z
    return ProfileEstimate(z, gh, gamma_true, ph, zl, delta_h)


def plan_sampling(laser: LaserConfig, atom: AtomSpecies, gamma_scale: float,
                  phase_resolution: float, g_local: float,
                  consts: PhysicalConstants = PhysicalConstants()) -> tuple[float, float, float]:
    """Shortest T_R resolving ``gamma_scale`` and the resulting sampling limits.

    Returns ``(T_R_min, nu_max, delta_h_min)`` with f(T_R_min)|gamma| equal to
    the phase resolution, nu_max = 1/(2 T_R_min) and delta_h_min = g T_R_min^2 / 2.
    """
    if gamma_scale == 0 or phase_resolution < 0 or not g_local > 0:
        raise ValueError("need nonzero gamma_scale, non-negative resolution and positive g")
    f_per_T3 = scale_factor(laser, atom, 1.0, consts)
    T_min = (phase_resolution / (f_per_T3 * abs(gamma_scale))) ** (1.0 / 3.0)
    nu_max = math.inf if T_min == 0 else 1.0 / (2.0 * T_min)
    return T_min, nu_max, 0.5 * g_local * T_min**2
