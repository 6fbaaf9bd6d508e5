"""One-dimensional gravitational potential models.

Sign convention: ``phi`` is the potential per unit mass, ``g = dphi/dz`` is
the (positive, downward-pulling) acceleration and ``gamma = d2phi/dz2`` the
gravity gradient. The equation of motion is ``z'' = -g(z)``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np
from numpy.polynomial import polynomial as P
from numpy.polynomial import Polynomial as _NpPoly

from .errors import ExtrapolationError, FitError
from .output import write_csv

DEFAULT_SAMPLED_DEGREE = 8
DEFAULT_SYNTH_DEGREE = 10


@dataclass(frozen=True)
class IdealPotential:
    """phi(z) = g z + gamma0 z^2 / 2, unbounded."""

    g: float = 9.81
    gamma0: float = -2.7e-6
    roi = None

    def as_polynomial(self) -> "PolynomialPotential":
        return PolynomialPotential((0.0, self.g, 0.5 * self.gamma0))


@dataclass(frozen=True)
class PolynomialPotential:
    """Potential stored as Taylor coefficients ``phi^(n)/n!`` about ``origin``.

    ``coeffs[n]`` multiplies ``(z - origin)**n``. ``roi`` (if set) bounds the
    heights where evaluation is allowed.
    """

    coeffs: tuple[float, ...]
    origin: float = 0.0
    roi: tuple[float, float] | None = None
    fit_rms: float | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if not self.coeffs:
            raise ValueError("empty coefficient list")
        if self.roi is not None:
            lo, hi = self.roi
            if not hi > lo:
                raise ValueError("degenerate ROI")
            object.__setattr__(self, "roi", (float(lo), float(hi)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def g_coeffs(self) -> np.ndarray:
        return P.polyder(np.asarray(self.coeffs)) if self.degree else np.zeros(1)

    def gamma_coeffs(self) -> np.ndarray:
        return P.polyder(np.asarray(self.coeffs), 2) if self.degree > 1 else np.zeros(1)


@dataclass(frozen=True)
class SampledProfile:
    """Measured acceleration samples; converted to a polynomial before use."""

    z: tuple[float, ...]
    g: tuple[float, ...]
    fit_degree: int = DEFAULT_SAMPLED_DEGREE

    @property
    def roi(self) -> tuple[float, float]:
        return (min(self.z), max(self.z))

    def to_polynomial(self) -> PolynomialPotential:
        return fit_polynomial(self.z, self.g, self.fit_degree)


PotentialModel = Union[IdealPotential, PolynomialPotential, SampledProfile]


@dataclass(frozen=True)
class ProfileSpec:
    """Synthetic field: constant gradient plus Gaussian bumps in gamma(z).

    ``g_ref`` is the acceleration at the lower ROI edge.
    """

    g_ref: float = 9.812
    gamma_base: float = -2.75e-6
    bumps: tuple[tuple[float, float, float], ...] = ()  # (center, width, amplitude)
    roi: tuple[float, float] = (0.0, 8.0)

    def __post_init__(self):
        object.__setattr__(self, "bumps", tuple(tuple(map(float, b)) for b in self.bumps))
        if not self.roi[1] > self.roi[0]:
            raise ValueError("degenerate ROI")
        if any(w <= 0 for _, w, _ in self.bumps):
            raise ValueError("bump widths must be positive")

    def gamma(self, z):
        z = np.asarray(z, dtype=float)
        out = np.full_like(z, self.gamma_base)
        for c, w, a in self.bumps:
            out = out + a * np.exp(-((z - c) ** 2) / (2 * w * w))
        return out

    def g(self, z):
        """Closed-form integral of :meth:`gamma` from the lower ROI edge."""
        z = np.asarray(z, dtype=float)
        z_min = self.roi[0]
        out = self.g_ref + self.gamma_base * (z - z_min)
        erf = np.vectorize(math.erf)
        for c, w, a in self.bumps:
            s = math.sqrt(2.0) * w
            out = out + a * w * math.sqrt(math.pi / 2) * (erf((z - c) / s) - math.erf((z_min - c) / s))
        return out


def default_profile_spec() -> ProfileSpec:
    """Long-baseline-like stand-in: mean gradient ~2.75e3 E, variations ~1e-7 s^-2."""
    return ProfileSpec(
        g_ref=9.812,
        gamma_base=-2.75e-6,
        bumps=((1.8, 1.2, 6.0e-8), (4.6, 1.4, -5.0e-8), (6.8, 1.0, 3.5e-8)),
        roi=(0.0, 8.0),
    )


def as_polynomial(model: PotentialModel) -> PolynomialPotential:
    if isinstance(model, PolynomialPotential):
        return model
    return model.to_polynomial() if isinstance(model, SampledProfile) else model.as_polynomial()


def check_roi(model, z) -> None:
    roi = model.roi
    if roi is None:
        return
    z = np.asarray(z, dtype=float)
    bad = (z < roi[0]) | (z > roi[1])
    if np.any(bad):
        zb = float(np.ravel(z)[np.argmax(np.ravel(bad))])
        raise ExtrapolationError(f"z={zb:g} m outside ROI [{roi[0]:g}, {roi[1]:g}] m")


def evaluate(model: PotentialModel, z):
    """Return ``(phi, g, gamma)`` at height(s) ``z``."""
    if isinstance(model, SampledProfile):
        model = model.to_polynomial()
    check_roi(model, z)
    z = np.asarray(z, dtype=float)
    if isinstance(model, IdealPotential):
        phi = model.g * z + 0.5 * model.gamma0 * z * z
        return phi, model.g + model.gamma0 * z, np.full_like(z, model.gamma0)[()]
    x = z - model.origin
    c = np.asarray(model.coeffs)
    return (P.polyval(x, c), P.polyval(x, model.g_coeffs()) + 0 * x,
            P.polyval(x, model.gamma_coeffs()) + 0 * x)


def fit_polynomial(z: Sequence[float], g: Sequence[float], degree: int,
                   origin: float | None = None) -> PolynomialPotential:
    """Least-squares fit of g(z); phi is the antiderivative vanishing at min(z).

    The expansion point defaults to the centre of the sampled range. The
    returned model carries the residual RMS in ``fit_rms``.
    """
    z = np.asarray(z, dtype=float)
    g = np.asarray(g, dtype=float)
    if z.shape != g.shape or z.ndim != 1:
        raise FitError("z and g must be 1-D arrays of equal length")
    if degree < 0 or int(degree) != degree:
        raise FitError("degree must be a non-negative integer")
    if len(np.unique(z)) != len(z):
        raise FitError("sample heights must be distinct")
    if len(z) <= degree:
        raise FitError(f"need more than {degree} samples for a degree-{degree} fit")
    z_min, z_max = float(z.min()), float(z.max())
    if origin is None:
        origin = 0.5 * (z_min + z_max)
    x = z - origin
    fit, (_, rank, _, _) = _NpPoly.fit(x, g, degree, full=True)
    if rank < degree + 1:
        raise FitError(f"rank-deficient fit (rank {rank} < {degree + 1})")
    g_c = fit.convert().coef
    g_c = np.concatenate([g_c, np.zeros(degree + 1 - len(g_c))])
    resid = g - P.polyval(x, g_c)
    phi_c = P.polyint(g_c, lbnd=z_min - origin)
    roi = (z_min, z_max) if z_max > z_min else None
    return PolynomialPotential(tuple(phi_c), origin=origin, roi=roi,
                               fit_rms=float(np.sqrt(np.mean(resid ** 2))))


def synthesize_profile(spec: ProfileSpec, degree: int = DEFAULT_SYNTH_DEGREE,
                       n_samples: int = 801) -> PolynomialPotential:
    z = np.linspace(spec.roi[0], spec.roi[1], n_samples)
    return fit_polynomial(z, spec.g(z), degree)


def load_profile_csv(path: str | Path, fit_degree: int = DEFAULT_SAMPLED_DEGREE) -> SampledProfile:
    """Read a ``z_m,g_mps2`` CSV (extra trailing columns are ignored)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [h.strip() for h in rows[0][:2]] != ["z_m", "g_mps2"]:
        raise ValueError(f"{path}: header must start with z_m,g_mps2")
    z, g = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or not "".join(row).strip():
            continue
        try:
            z.append(float(row[0]))
            g.append(float(row[1]))
        except (ValueError, IndexError):
            raise ValueError(f"{path}:{lineno}: malformed row {row!r}") from None
    if any(b <= a for a, b in zip(z, z[1:])):
        raise ValueError(f"{path}: z must be strictly increasing")
    return SampledProfile(tuple(z), tuple(g), fit_degree)


def write_profile_csv(fh, model: PolynomialPotential, z) -> None:
    phi, g, gamma = evaluate(model, z)
    z = np.ravel(z)
    rows = zip(z, np.broadcast_to(g, z.shape), np.broadcast_to(gamma, z.shape))
    write_csv(fh, ["z_m", "g_mps2", "gamma_si"], rows)
