"""Command-line entry point: ``cgi-sim COMMAND [options]``.

Exit codes: 0 success, 2 configuration error, 3 ROI or singularity error.
"""
from __future__ import annotations

import argparse
import io
import os
import sys
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .analytic import table1_catalog
from .config import POTENTIAL_KINDS, RunConfig, parse_config, parse_range
from .errors import ConfigError, FitError, ROIError, SingularityError
from .estimator import default_z_range, sweep_estimate
from .fsl import FslConfig, detuning_phase, fsl_phase, optimal_detuning
from .interferometer import CGIResult, run_cgi_batch, run_cgi_with_trajectories
from .output import write_csv
from .potential import IdealPotential, as_polynomial, evaluate, write_profile_csv

EXIT_OK, EXIT_CONFIG, EXIT_DOMAIN = 0, 2, 3

CGI_COLUMNS = ["mzi_total_rad", "sddi_total_rad", "differential_rad",
               "mzi_propagation_rad", "mzi_kick_rad", "mzi_separation_rad",
               "sddi_propagation_rad", "sddi_kick_rad", "sddi_separation_rad",
               "mzi_output_dz_m", "sddi_output_dz_m"]
ESTIMATE_COLUMNS = ["z_eval_m", "gamma_hat_si", "gamma_true_si", "phase_rad", "z_launch_m"]
TABLE1_COLUMNS = ["id", "expr", "pref_mzi", "pref_sddi", "pref_diff", "value_rad"]
QUARTIC = 4


def thread_count() -> int:
    """Worker threads: ``CGI_SIM_THREADS`` if set, else the CPU count."""
    cap = os.environ.get("CGI_SIM_THREADS")
    if not cap:
        return os.cpu_count() or 1
    try:
        n = int(cap)
    except ValueError:
        raise ConfigError(f"CGI_SIM_THREADS must be an integer, got {cap!r}") from None
    if n < 1:
        raise ConfigError("CGI_SIM_THREADS must be >= 1")
    return n


def cgi_row(r: CGIResult) -> list[float]:
    m, s = r.mzi, r.sddi
    return [m.total, s.total, r.differential, m.propagation, m.kick, m.separation,
            s.propagation, s.kick, s.separation, m.output_separation_dz, s.output_separation_dz]


def _local_field(cfg: RunConfig) -> tuple[float, float]:
    """(g, gamma0) for closed-form commands: exact for ideal fields, else taken at z0."""
    model = cfg.model()
    if isinstance(model, IdealPotential):
        return model.g, model.gamma0
    _, g, gamma = evaluate(model, cfg.params.z0)
    return float(g), float(gamma)


def cmd_simulate(cfg: RunConfig, out, stride: int = 1) -> None:
    _, trajs = run_cgi_with_trajectories(cfg.laser, cfg.params, cfg.model(), cfg.atom, cfg.consts)
    idx = slice(None, None, stride)
    cols = [trajs[0].t[idx]] + [tr.z[idx] for tr in trajs]
    write_csv(out, ["t_s", "mzi_up_z_m", "mzi_low_z_m", "sddi_up_z_m", "sddi_low_z_m"], zip(*cols))


def cmd_cgi(cfg: RunConfig, out) -> None:
    p = cfg.params
    (r,) = run_cgi_batch(cfg.laser, cfg.model(), p.z0, p.v0, p.T_R, p.n_steps, cfg.atom, cfg.consts)
    write_csv(out, CGI_COLUMNS, [cgi_row(r)])


def _sweep(cfg: RunConfig, z0, T_R, threads: int):
    p = cfg.params
    return run_cgi_batch(cfg.laser, cfg.model(), z0, p.v0, T_R, p.n_steps, cfg.atom, cfg.consts,
                         threads=threads)


def quartic_fit(x, y) -> tuple[np.ndarray, float]:
    """Power-basis quartic least-squares fit and its residual RMS."""
    coef = P.polyfit(x, y, QUARTIC)
    resid = y - P.polyval(x, coef)
    return coef, float(np.sqrt(np.mean(resid**2)))


def cmd_sweep_tr(cfg: RunConfig, out, threads: int) -> None:
    if cfg.tr_range is None:
        raise ConfigError("sweep-tr needs --tr START:STOP:STEP or [sweep] tr")
    T = np.asarray(cfg.tr_range, dtype=float)
    res = _sweep(cfg, cfg.params.z0, T, threads)
    diff = np.array([r.differential for r in res])
    comments = []
    if len(T) > QUARTIC:
        coef, rms = quartic_fit(T, diff)
        comments.append("quartic fit differential_rad = sum c_i T_R^i")
        comments += [f"c{i} = {c:.17g}" for i, c in enumerate(coef)]
        comments.append(f"fit_residual_rms_rad = {rms:.17g}")
    else:
        comments.append(f"quartic fit skipped: needs at least {QUARTIC + 1} points")
    write_csv(out, ["T_R_s"] + CGI_COLUMNS, ([t] + cgi_row(r) for t, r in zip(T, res)), comments)


def cmd_sweep_z0(cfg: RunConfig, out, threads: int) -> None:
    if cfg.z0_range is None:
        raise ConfigError("sweep-z0 needs --z0 START:STOP:STEP or [sweep] z0")
    z = np.asarray(cfg.z0_range, dtype=float)
    res = _sweep(cfg, z, cfg.params.T_R, threads)
    write_csv(out, ["z0_m"] + CGI_COLUMNS, ([zi] + cgi_row(r) for zi, r in zip(z, res)))


def cmd_estimate(cfg: RunConfig, out, threads: int) -> None:
    model = cfg.model()
    z = cfg.z_range
    if z is None:
        z = default_z_range(model, cfg.delta_h, cfg.spacing)
    est = sweep_estimate(model, cfg.laser, cfg.atom, z, cfg.delta_h, cfg.consts,
                         cfg.params.n_steps, threads)
    comments = [f"delta_h_m = {cfg.delta_h:.17g}"]
    if len(est.z_eval):
        comments += [f"rms_error_si = {est.rms_error:.17g}",
                     f"relative_rms_error = {est.relative_rms_error:.17g}",
                     f"mean_abs_phase_rad = {est.mean_abs_phase:.17g}"]
    else:
        comments.append("no evaluation heights fit inside the ROI")
    write_csv(out, ESTIMATE_COLUMNS, est.rows(), comments)


def cmd_table1(cfg: RunConfig, out) -> None:
    g, gamma0 = _local_field(cfg)
    rows = table1_catalog(cfg.laser, cfg.atom, cfg.params, g, gamma0, cfg.consts)
    write_csv(out, TABLE1_COLUMNS,
              ([t.id, t.expression, t.prefactor_mzi, t.prefactor_sddi, t.prefactor_diff, t.value]
               for t in rows))


def cmd_fsl(cfg: RunConfig, out) -> None:
    g, _ = _local_field(cfg)
    L, p = cfg.laser, cfg.params
    fc = FslConfig(L.z_upper, L.z_lower, p.v0, p.T_R, L.N, L.k)
    delta, nu, pole = optimal_detuning(fc, g, cfg.atom, cfg.consts)
    td, static = fsl_phase(fc, p.z0, g, cfg.atom, cfg.consts)
    write_csv(out, ["delta_det", "nu_det_hz", "pole_T_R_s", "fsl_time_dependent_rad",
                    "fsl_static_rad", "detuning_phase_rad"],
              [[delta, nu, pole, td, static, detuning_phase(fc, delta, g, cfg.atom, cfg.consts)]])


def cmd_synth_profile(cfg: RunConfig, out) -> None:
    model = as_polynomial(cfg.model())
    if model.roi is None:
        raise ConfigError("synth-profile needs a potential with a bounded ROI")
    write_profile_csv(out, model, np.linspace(*model.roi, cfg.profile_points))


COMMANDS = ("simulate", "cgi", "sweep-tr", "sweep-z0", "estimate", "table1", "fsl-detuning",
            "synth-profile")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI configuration file")
    common.add_argument("--N", type=int, help="momentum quanta per pulse")
    common.add_argument("--k", type=float, help="wave number [1/m]")
    common.add_argument("--tr", metavar="START:STOP:STEP", help="T_R value or inclusive range [s]")
    common.add_argument("--z0", metavar="START:STOP:STEP", help="z0 value or inclusive range [m]")
    common.add_argument("--delta-h", type=float, help="launch height for estimate [m]")
    common.add_argument("--potential", choices=POTENTIAL_KINDS, help="force the potential kind")
    common.add_argument("--out", metavar="PATH", help="write CSV here instead of stdout")
    parser = argparse.ArgumentParser(prog="cgi-sim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "simulate":
            sp.add_argument("--stride", type=int, default=1, help="emit every STRIDE-th grid node")
    return parser


def _overrides(args) -> dict:
    def rng(text, flag):
        if text is None:
            return None
        try:
            return parse_range(text)
        except ValueError as exc:
            raise ConfigError(f"--{flag}: {exc}") from None

    return {"N": args.N, "k": args.k, "tr": rng(args.tr, "tr"), "z0": rng(args.z0, "z0"),
            "delta_h": args.delta_h, "potential": args.potential}


def run(args, out) -> None:
    cfg = parse_config(args.config, _overrides(args))
    c = args.command
    if c == "simulate":
        if args.stride < 1:
            raise ConfigError("--stride must be >= 1")
        cmd_simulate(cfg, out, args.stride)
    elif c == "cgi":
        cmd_cgi(cfg, out)
    elif c == "sweep-tr":
        cmd_sweep_tr(cfg, out, thread_count())
    elif c == "sweep-z0":
        cmd_sweep_z0(cfg, out, thread_count())
    elif c == "estimate":
        cmd_estimate(cfg, out, thread_count())
    elif c == "table1":
        cmd_table1(cfg, out)
    elif c == "fsl-detuning":
        cmd_fsl(cfg, out)
    else:
        cmd_synth_profile(cfg, out)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    buf = io.StringIO()
    try:
        run(args, buf)
        # nothing is written unless the command succeeded
        if args.out:
            with open(args.out, "w", newline="") as fh:
                fh.write(buf.getvalue())
        else:
            sys.stdout.write(buf.getvalue())
    except (ROIError, SingularityError) as exc:
        print(f"cgi-sim: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ConfigError, FitError, ValueError, OSError) as exc:
        print(f"cgi-sim: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
