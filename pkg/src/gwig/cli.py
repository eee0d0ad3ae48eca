"""Command-line entry point.

    gwig particle --config run.cfg [--out-dir DIR]
    gwig verify   --config run.cfg [--seed N] [--out-dir DIR]
    gwig wave     --config run.cfg [--out-dir DIR]
    gwig metric   [--config run.cfg] [--g "2,1;1,2"] [--kappa 0.5] [--z 1,2]

Exit codes: 0 success, 1 a check failed, 2 usage, configuration or I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import closed_forms as cf
from . import core
from . import operators as ops
from .config import ConfigError, RunConfig, load_config, parse_config, parse_matrix, parse_vector
from .delta import RegularizedDelta
from .errors import DomainError, NonStationaryError, ShapeError
from .grids import SpacetimeGrid1p1
from .output import atomic_write_text, csv_text, fmt, report_text, svg_figure
from .verifier import ConvergenceStudy, convergence_order, run_property_suites

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

PARTICLE_COLUMNS = ("r_breve", "phi_breve", "E_breve", "rho_breve", "kappa_a", "inv_r", "inv_r2")
DIMENSIONAL_COLUMNS = ("r_m", "phi_V", "E_V_per_m", "rho_C_per_m3")


class UsageError(Exception):
    pass


def _model(config: RunConfig) -> cf.ParticleModel:
    return cf.ParticleModel(RegularizedDelta(config.a, config.beta), w=config.w)


def _out_path(name: str, out_dir) -> Path:
    p = Path(name)
    return p if out_dir is None or p.is_absolute() else Path(out_dir) / p


def particle_table(config: RunConfig) -> tuple:
    """Columns of the particle profile on ``r_i = r_max i / n``, ``i = 1 .. n``."""
    model = _model(config)
    i = np.arange(1, config.n + 1)
    r = config.r_max * i / config.n
    columns = [
        r,
        np.asarray(cf.particle_potential(r, model)),
        np.asarray(cf.particle_field(r, model)),
        np.asarray(cf.particle_charge_density(r, model)),
        np.asarray(model.kappa.evaluate(r)),
        1.0 / r,
        1.0 / r**2,
    ]
    header = list(PARTICLE_COLUMNS)
    if config.dimensional:
        # phi_a = Q/(4 pi eps0 a), E(a) = Q/(4 pi eps0 a^2), rho_0 = 3Q/(4 pi a^3); a in metres
        k = config.Q / (4.0 * np.pi * config.epsilon0)
        columns += [r * config.a, columns[1] * k / config.a, columns[2] * k / config.a**2,
                    columns[3] * 3.0 * config.Q / (4.0 * np.pi * config.a**3)]
        header += list(DIMENSIONAL_COLUMNS)
    return header, columns


def cmd_particle(config: RunConfig, out_dir=None) -> int:
    header, columns = particle_table(config)
    rows = zip(*columns)
    atomic_write_text(_out_path(config.csv, out_dir), csv_text(header, rows))

    r, phi, E, rho = columns[:4]
    linear = ("linear", [("phi", r, phi, False), ("E", r, E, False), ("rho", r, rho, False)], False)
    loglog = ("log-log", [("phi", r, phi, False), ("E", r, E, False), ("1/r", r, 1.0 / r, True),
                          ("1/r^2", r, 1.0 / r**2, True)], True)
    atomic_write_text(_out_path(config.svg, out_dir), svg_figure([linear, loglog]))
    print(f"wrote {_out_path(config.csv, out_dir)} and {_out_path(config.svg, out_dir)}")
    return EXIT_OK


def cmd_verify(config: RunConfig, out_dir=None) -> int:
    report = run_property_suites(config.seed, _model(config))
    meta = [("seed", config.seed), ("a", config.a), ("beta", config.beta), ("w", config.w),
            ("charge_sign_convention", "density as implemented; integral of 3 rho r^2 is negative")]
    path = _out_path(config.report, out_dir)
    atomic_write_text(path, report_text(meta, report))
    for c in report.failures():
        print(f"FAIL {c.name}: measured {fmt(c.measured)} tolerance {fmt(c.tolerance)} {c.notes}", file=sys.stderr)
    print(f"{'pass' if report.overall else 'fail'}: {len(report.failures())} failing checks, report in {path}")
    return EXIT_OK if report.overall else EXIT_FAIL


def wave_study(config: RunConfig) -> ConvergenceStudy:
    """Residual of a manufactured travelling-wave solution pushed through the affine blend."""
    w = config.wave_weight
    phi_d = 1.0
    grids = [SpacetimeGrid1p1(nt=n // 2 + 1, nx=n + 1, dt=0.5 / n, dx=1.0 / n) for n in config.wave_sizes]

    def lam(g):
        bump = config.wave_amplitude * np.exp(-(((g.x - 0.5) / config.wave_width) ** 2))
        if config.wave_time_rate == 0.0:
            return bump
        return bump[None, :] * (1.0 + config.wave_time_rate * g.t[:, None])

    def solution(g):
        T, X = g.mesh()
        lam_sx = np.broadcast_to(lam(g), g.shape)[0]
        K = -np.expm1(-w * lam_sx)[None, :]
        return cf.compose_solution(np.sin(2.0 * np.pi * (X - T)), phi_d, K).phi_hat

    def residual(phi_hat, g):
        return ops.wave_residual(phi_hat, phi_d, g, ops.OperatorCoefficients(lam(g), w=w))

    return convergence_order(residual, solution, grids)


def cmd_wave(config: RunConfig, out_dir=None) -> int:
    study = wave_study(config)
    rows = []
    for k, (n, h, res) in enumerate(zip(study.grid_sizes, study.spacings, study.residual_norms)):
        pair = "" if k == 0 else fmt(np.log(study.residual_norms[k - 1] / res) / np.log(study.spacings[k - 1] / h))
        rows.append((k, n, h, 0.5 * h, res, pair, study.fitted_order))
    header = ("level", "nx", "dx", "dt", "residual_max", "pairwise_order", "fitted_order")
    path = _out_path(config.wave_csv, out_dir)
    atomic_write_text(path, csv_text(header, rows))
    print(f"fitted order {study.fitted_order:.4f} (threshold {study.threshold}); wrote {path}")
    return EXIT_OK if study.passed else EXIT_FAIL


def _matrix_lines(name, m):
    return [f"{name} = " + "; ".join(", ".join(fmt(v) for v in row) for row in np.atleast_2d(m))]


def cmd_metric(g, kappa: float, z) -> int:
    g = np.asarray(g, dtype=float)
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if g.ndim != 2 or z.size not in (1, g.shape[0]):
        raise ShapeError(f"z has {z.size} entries for a {g.shape} metric")
    z = np.broadcast_to(z, (g.shape[0],))
    rep = core.metric_representations(g, kappa, z)
    chi = core.dilation_tensor(kappa, z)
    sigma = core.dilation_density(kappa, z)
    lam = core.kappa_to_lambda(kappa)
    Lam = np.exp(z * lam)
    if not np.allclose(Lam[:, None] * rep.g_hat_W * Lam[None, :], rep.g_hat_R, rtol=1e-12, atol=0.0):
        print("metric representations are inconsistent", file=sys.stderr)
        return EXIT_FAIL
    lines = [f"kappa = {fmt(kappa)}", f"lambda = {fmt(lam)}", "z = " + ", ".join(fmt(v) for v in z)]
    lines += _matrix_lines("g", rep.g)
    lines += _matrix_lines("g_hat_W", rep.g_hat_W)
    lines += _matrix_lines("g_hat_R", rep.g_hat_R)
    lines += ["chi = " + ", ".join(fmt(v) for v in np.diag(chi)), f"sigma = {fmt(sigma)}"]
    print("\n".join(lines))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gwig", description="Dilated potential theory: particle profiles, "
                                     "verification suites and metric tables.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs_config in (("particle", True), ("verify", True), ("wave", True), ("metric", False)):
        p = sub.add_parser(name)
        p.add_argument("--config", required=needs_config, help="key = value configuration file")
        p.add_argument("--seed", type=int, default=None, help="override the seed from the config")
        p.add_argument("--out-dir", default=None, help="directory for relative output paths")
        if name == "metric":
            p.add_argument("--g", help="rows separated by ';', entries by ','")
            p.add_argument("--kappa", type=float, help="affinity in [0, 1)")
            p.add_argument("--z", help="comma-separated dilation exponents")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config is not None:
            config = load_config(args.config, seed=args.seed)
        else:
            config = parse_config("", seed=args.seed)
        if args.command == "particle":
            return cmd_particle(config, args.out_dir)
        if args.command == "verify":
            return cmd_verify(config, args.out_dir)
        if args.command == "wave":
            return cmd_wave(config, args.out_dir)
        g = parse_matrix(args.g) if args.g else config.g
        if g is None:
            raise UsageError("metric needs g, from --g or the config key g")
        kappa = args.kappa if args.kappa is not None else config.kappa
        z = parse_vector(args.z) if args.z else config.z
        return cmd_metric(g, kappa, z)
    except (ConfigError, UsageError, DomainError, ShapeError, NonStationaryError) as exc:
        parser.print_usage(sys.stderr)
        print(f"gwig: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"gwig: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
