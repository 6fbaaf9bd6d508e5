"""INI run configuration with command-line overrides.

Sections: ``[constants] [atom] [laser] [run] [potential] [sweep] [estimate]
[profile]``. Every key has a default except the potential selection, which is
inferred from the keys present in ``[potential]`` or forced with ``kind``.
"""
from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .constants import AtomSpecies, ExperimentParams, LaserConfig, PhysicalConstants
from .errors import ConfigError
from .potential import (IdealPotential, PolynomialPotential, PotentialModel, ProfileSpec,
                        default_profile_spec, load_profile_csv, synthesize_profile)

POTENTIAL_KINDS = ("ideal", "poly", "csv", "synth")

# keys whose presence selects a potential kind
_SELECTORS = {
    "ideal": {"g", "gamma0"},
    "poly": {"coeffs"},
    "csv": {"csv"},
    "synth": {"g_ref", "gamma_base", "bumps", "n_samples"},
}
# keys that refine a selection but do not select one
_MODIFIERS = {"degree": {"csv", "synth"}, "roi": {"poly", "synth"}, "origin": {"poly"}}


def parse_range(text: str) -> np.ndarray:
    """``START:STOP:STEP`` with STOP included, or a single value."""
    parts = text.split(":")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise ValueError(f"bad range {text!r}") from None
    if len(vals) == 1:
        return np.array(vals)
    if len(vals) != 3:
        raise ValueError(f"range {text!r} must be START:STOP:STEP")
    start, stop, step = vals
    if not step > 0 or stop < start:
        raise ValueError(f"range {text!r} needs STEP > 0 and STOP >= START")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(n), 12)


def _pair(text: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise ValueError(f"expected LO:HI, got {text!r}")
    return float(parts[0]), float(parts[1])


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(p) for p in text.replace(",", " ").split())


def _bumps(text: str) -> tuple[tuple[float, float, float], ...]:
    out = []
    for item in filter(None, (s.strip() for s in text.split(";"))):
        vals = _floats(item)
        if len(vals) != 3:
            raise ValueError(f"bump {item!r} must be center,width,amplitude")
        out.append(vals)
    return tuple(out)


def _int(text: str) -> int:
    return int(text)


def _cfloat(text: str) -> float:
    return math.inf if text.strip().lower() in ("inf", "infinity") else float(text)


# section -> key -> converter
SCHEMA: dict[str, dict[str, Callable]] = {
    "constants": {"hbar": float, "c": _cfloat, "amu": float},
    "atom": {"mass_amu": float},
    "laser": {"k": float, "N": _int, "omega_R": float, "z_upper": float, "z_lower": float,
              "mirror_detuning": float, "final_detuning": float},
    "run": {"z0": float, "v0": float, "T_R": float, "n_steps": _int},
    "potential": {"kind": str, "g": float, "gamma0": float, "coeffs": _floats, "origin": float,
                  "roi": _pair, "csv": str, "degree": _int, "g_ref": float, "gamma_base": float,
                  "bumps": _bumps, "n_samples": _int},
    "sweep": {"tr": parse_range, "z0": parse_range},
    "estimate": {"delta_h": float, "z_range": parse_range, "spacing": float},
    "profile": {"points": _int},
}


@dataclass(frozen=True)
class PotentialSelection:
    kind: str
    values: dict = field(default_factory=dict)
    base_dir: Path = Path(".")

    def build(self) -> PotentialModel:
        v = self.values
        if self.kind == "ideal":
            return IdealPotential(v.get("g", 9.81), v.get("gamma0", -2.7e-6))
        if self.kind == "poly":
            if "coeffs" not in v:
                raise ConfigError("poly potential needs coeffs")
            return PolynomialPotential(v["coeffs"], v.get("origin", 0.0), v.get("roi"))
        if self.kind == "csv":
            if "csv" not in v:
                raise ConfigError("csv potential needs a csv path")
            path = Path(v["csv"])
            if not path.is_absolute():
                path = self.base_dir / path
            if not path.exists():
                raise ConfigError(f"profile file {path} does not exist")
            kw = {"fit_degree": v["degree"]} if "degree" in v else {}
            return load_profile_csv(path, **kw).to_polynomial()
        base = default_profile_spec()
        spec = ProfileSpec(v.get("g_ref", base.g_ref), v.get("gamma_base", base.gamma_base),
                           v.get("bumps", base.bumps), v.get("roi", base.roi))
        kw = {k: v[k] for k in ("degree", "n_samples") if k in v}
        return synthesize_profile(spec, **kw)


@dataclass(frozen=True)
class RunConfig:
    consts: PhysicalConstants = PhysicalConstants()
    atom: AtomSpecies = AtomSpecies()
    laser: LaserConfig = LaserConfig()
    params: ExperimentParams = ExperimentParams()
    potential: PotentialSelection | None = None
    tr_range: np.ndarray | None = None
    z0_range: np.ndarray | None = None
    delta_h: float = 1.0
    z_range: np.ndarray | None = None
    spacing: float = 0.1
    profile_points: int = 801

    def model(self) -> PotentialModel:
        if self.potential is None:
            raise ConfigError("no potential selected")
        return self.potential.build()


def _line_map(text: str) -> dict[tuple[str, str], int]:
    """(section, key) -> 1-based line number, for error messages."""
    out, section = {}, None
    for i, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        m = re.match(r"\[([^\]]+)\]", s)
        if m:
            section = m.group(1).strip()
        elif s and not s.startswith(("#", ";")) and section is not None:
            key = re.split(r"[=:]", s, maxsplit=1)[0].strip()
            out.setdefault((section, key), i)
    return out


def read_ini(path: str | Path) -> tuple[dict[str, dict], dict[tuple[str, str], int]]:
    """Parse and type-convert an INI file; returns (values, line numbers)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(str(exc).replace("\n", " "), getattr(exc, "lineno", None), str(path)) from None
    lines = _line_map(text)
    values: dict[str, dict] = {}
    for section in cp.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]", _section_line(text, section), str(path))
        for key, raw in cp.items(section):
            ln = lines.get((section, key))
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]", ln, str(path))
            try:
                values.setdefault(section, {})[key] = SCHEMA[section][key](raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {section}.{key}: {exc}", ln, str(path)) from None
    return values, lines


def _section_line(text: str, section: str) -> int | None:
    for i, line in enumerate(text.splitlines(), start=1):
        if line.strip().startswith(f"[{section}]"):
            return i
    return None


def select_potential(values: dict, forced: str | None = None, base_dir: Path = Path("."),
                     lines: dict | None = None, path: str | None = None) -> PotentialSelection | None:
    """Infer the potential kind from the keys given; ``forced`` overrides ``kind``."""
    lines = lines or {}

    def err(msg, key=None):
        return ConfigError(msg, lines.get(("potential", key)), path)

    kind = forced or values.get("kind")
    if kind is not None and kind not in POTENTIAL_KINDS:
        raise err(f"unknown potential kind {kind!r}; expected one of {', '.join(POTENTIAL_KINDS)}", "kind")
    hits = sorted(k for k, keys in _SELECTORS.items() if keys & values.keys())
    if len(hits) > 1:
        clash = sorted(values.keys() & _SELECTORS[hits[1]])[0]
        raise err(f"conflicting potential selections: {', '.join(hits)}", clash)
    if kind is None:
        if not hits:
            return None
        kind = hits[0]
    elif hits and hits[0] != kind:
        raise err(f"potential kind {kind!r} conflicts with {hits[0]} keys", "kind")
    for key, kinds in _MODIFIERS.items():
        if key in values and kind not in kinds:
            raise err(f"key {key!r} does not apply to a {kind} potential", key)
    vals = {k: v for k, v in values.items() if k != "kind"}
    return PotentialSelection(kind, vals, base_dir)


def build_config(values: dict, overrides: dict | None = None, base_dir: Path = Path("."),
                 lines: dict | None = None, path: str | None = None) -> RunConfig:
    """Assemble a :class:`RunConfig`; ``overrides`` are flat command-line values."""
    o = {k: v for k, v in (overrides or {}).items() if v is not None}
    lines = lines or {}

    def make(section, factory, **extra):
        kw = dict(values.get(section, {}))
        kw.update(extra)
        try:
            return factory(**kw)
        except (TypeError, ValueError) as exc:
            ln = min((lines[(section, k)] for k in kw if (section, k) in lines), default=None)
            raise ConfigError(f"[{section}] {exc}", ln, path) from None

    consts = make("constants", PhysicalConstants)
    atom_vals = values.get("atom", {})
    try:
        atom = AtomSpecies.from_amu(atom_vals.get("mass_amu", 87.0), consts)
    except ValueError as exc:
        raise ConfigError(f"[atom] {exc}", lines.get(("atom", "mass_amu")), path) from None
    laser = make("laser", LaserConfig, **{k: o[k] for k in ("N", "k") if k in o})

    run_extra = {}
    tr = o.get("tr")
    if tr is not None and len(tr) == 1:
        run_extra["T_R"] = float(tr[0])
    z0 = o.get("z0")
    if z0 is not None and len(z0) == 1:
        run_extra["z0"] = float(z0[0])
    params = make("run", ExperimentParams, **run_extra)

    sweep = values.get("sweep", {})
    est = values.get("estimate", {})
    pot = select_potential(values.get("potential", {}), o.get("potential"), base_dir, lines, path)
    return RunConfig(
        consts=consts, atom=atom, laser=laser, params=params, potential=pot,
        tr_range=tr if tr is not None else sweep.get("tr"),
        z0_range=z0 if z0 is not None else sweep.get("z0"),
        delta_h=o.get("delta_h", est.get("delta_h", 1.0)),
        z_range=est.get("z_range"),
        spacing=est.get("spacing", 0.1),
        profile_points=values.get("profile", {}).get("points", 801),
    )


def parse_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    """Read an optional INI file and apply command-line overrides."""
    if path is None:
        return build_config({}, overrides)
    values, lines = read_ini(path)
    return build_config(values, overrides, Path(path).parent, lines, str(path))
