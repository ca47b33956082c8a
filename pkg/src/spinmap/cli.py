"""Command-line front end: parameter ingestion, CSV emission, verification.

Exit codes: 0 success / all checks pass, 1 physics-check failure,
2 configuration error, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import dynamics, mapping, teleport
from .config import ConfigError, RunConfig
from .dynamics import GridGrowthError, GridSpec, PulseArea
from .model import DriveParams, MediumParams, check_feasibility, total_dephasing
from .specfun import QuadratureConvergenceError

EXIT_OK = 0
EXIT_PHYSICS = 1
EXIT_CONFIG = 2
EXIT_NUMERICS = 3

DEFAULT_B_LIST = (50.0, 10.0)
VERIFY_KERNEL_LADDER = (100, 200, 400)
VERIFY_KERNEL_ALPHA = 0.5
VERIFY_KERNEL_TAU_MAX = 0.5


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _emit(lines: list[str], out_path: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if out_path is None or out_path == "-":
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _csv(header: list[str], rows: list[list]) -> list[str]:
    return [",".join(header)] + [",".join(_fmt(v) for v in row) for row in rows]


def _dimensionless_medium_drive(alpha: float, tau_max: float):
    """Unit-Gamma, unit-length stand-ins so the grid oracle runs from the
    dimensionless block alone (alpha = g in these units)."""
    medium = MediumParams(density=1.0, length=1.0, area=1.0, gamma0=1.0, wavelength=1.0)
    drive = DriveParams(g=alpha, gamma_s=0.0, tau_pulse=2.0 * tau_max)
    return medium, drive


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_efficiency(cfg: RunConfig, out: str | None, tol: float) -> int:
    grid = cfg.get_grid("dimensionless.alpha_grid", mapping.DEFAULT_ALPHA_GRID)
    if cfg.has("dimensionless.b_list"):
        b_list = [float(b) for b in cfg.get_grid("dimensionless.b_list")]
    else:
        b_list = list(DEFAULT_B_LIST)
    s = cfg.get_float("dimensionless.s", 1.0)

    header = ["alpha", "eta_flat"] + [f"eta_b{_fmt(float(b))}" for b in b_list]
    columns = [[mapping.eta_closed(a) for a in grid]]
    for b in b_list:
        model = mapping.SqueezingModel.lorentzian(gamma_q=b, s=s)
        columns.append([eta for _, eta in mapping.efficiency_curve(grid, model, tol=tol)])
    rows = [[float(a), *(col[i] for col in columns)] for i, a in enumerate(grid)]
    _emit(_csv(header, rows), out)
    return EXIT_OK


def cmd_spectrum(cfg: RunConfig, out: str | None, tol: float) -> int:
    del tol
    alpha = cfg.alpha()
    model = cfg.squeezing_model()
    x_grid = cfg.get_grid("dimensionless.x_grid", np.linspace(-30.0, 30.0, 241))
    rows = []
    for x in x_grid:
        s0 = model.spectral_density(float(x))
        rows.append([
            float(x),
            mapping.transmitted_spectrum(alpha, float(x), s0),
            mapping.atomic_spectral_density(alpha, float(x), s0),
        ])
    _emit(_csv(["x", "transmitted", "atomic_density"], rows), out)
    return EXIT_OK


def cmd_transient(cfg: RunConfig, out: str | None, tol: float) -> int:
    alpha = cfg.alpha()
    model = cfg.squeezing_model()
    tau_max = cfg.get_float("transient.tau_max_gamma", 10.0)
    points = cfg.get_int("transient.points", 200)
    if tau_max <= 0 or points < 1:
        raise ConfigError("transient.tau_max_gamma", "horizon and points must be positive")
    area = PulseArea.constant(alpha)  # Gamma = 1, L = 1 units
    rows = []
    for tau in np.linspace(0.0, tau_max, points + 1):
        report = dynamics.transient_variance(area, 1.0, 1.0, model, float(tau), tol=tol)
        rows.append([float(tau), report.variance_norm, report.eta])
    _emit(_csv(["tau_gamma", "variance_norm", "eta"], rows), out)
    return EXIT_OK


def cmd_simulate(cfg: RunConfig, out: str | None, tol: float) -> int:
    del tol
    model = cfg.squeezing_model()
    nz = cfg.get_int("grid.nz", 200)
    ntau = cfg.get_int("grid.ntau", 200)
    tau_max_gamma = cfg.get_float("grid.tau_max_gamma", 1.0)

    medium = cfg.medium()
    drive = cfg.drive()
    if medium is None or drive is None:
        alpha = cfg.alpha()
        medium, drive = _dimensionless_medium_drive(alpha, tau_max_gamma)
    gamma = total_dephasing(medium, drive, drive_on=True)
    grid = GridSpec(nz=nz, ntau=ntau, tau_max=tau_max_gamma / gamma)

    table, _report = dynamics.simulate_grid(medium, drive, grid, model)
    rows = [
        [float(t * gamma), float(v), float(e)]
        for t, v, e in zip(
            table.tau,
            table.variance_trace,
            [mapping.eta_from_variance(v, model.noise_floor) for v in table.variance_trace],
        )
    ]
    _emit(_csv(["tau_gamma", "variance_norm", "eta"], rows), out)

    if PulseArea.from_drive(drive).max_rate() == 0.0:
        sys.stderr.write("convergence report: coupling off, kernel study skipped\n")
        return EXIT_OK
    study = dynamics.light_kernel_convergence(medium, drive, grid, levels=3)
    report_lines = ["convergence report (light kernel vs analytic, L2 relative):"]
    for (snz, sntau), err in zip(study.sizes, study.errors):
        report_lines.append(f"  nz={snz} ntau={sntau} rel_l2={_fmt(err)}")
    for i, order in enumerate(study.orders):
        report_lines.append(f"  order level {i}->{i + 1}: {_fmt(order)}")
    sys.stderr.write("\n".join(report_lines) + "\n")
    return EXIT_OK


def cmd_teleport(cfg: RunConfig, out: str | None, tol: float) -> int:
    del tol
    alpha_pulse = cfg.get_float("teleport.alpha_pulse")
    if alpha_pulse is None:
        raise ConfigError("teleport.alpha_pulse", "required but missing")
    threshold = cfg.get_float("teleport.r_threshold", teleport.DEFAULT_R_THRESHOLD)
    epr_residual = cfg.get_float("teleport.epr_residual", 0.0)

    bs = teleport.coupling_r(alpha_pulse, threshold=threshold)
    budget = teleport.readout_noise_budget(bs.r, epr_residual)
    rows = [[
        bs.r, bs.valid, bs.epr_requirement, bs.commutator_defect,
        budget.epr_residual, budget.passes, budget.residual_over_r,
        budget.classical_baseline,
    ]]
    header = ["r", "valid", "epr_requirement", "commutator_defect",
              "epr_residual", "budget_pass", "residual_over_r", "classical_baseline"]
    _emit(_csv(header, rows), out)
    return EXIT_OK


def cmd_feasibility(cfg: RunConfig, out: str | None, tol: float) -> int:
    del tol
    medium = cfg.medium(required=True)
    drive = cfg.drive(required=True)
    physics = cfg.physics(required=True)
    ratio = cfg.get_float("feasibility.ratio", 10.0)
    fresnel = (
        cfg.get_float("feasibility.fresnel_min", 0.3),
        cfg.get_float("feasibility.fresnel_max", 3.0),
    )
    report = check_feasibility(medium, drive, physics, ratio=ratio, fresnel_range=fresnel)
    rows = [
        [c.name, c.left, c.right, c.required_ratio, c.passed]
        for c in report.conditions
    ]
    rows.append(["overall", math.nan, math.nan, math.nan, report.overall])
    _emit(_csv(["condition", "left", "right", "required_ratio", "pass"], rows), out)
    return EXIT_OK if report.overall else EXIT_PHYSICS


def _verify_checks(cfg: RunConfig, tol: float):
    checks = []

    def add(name, detail, value, reference, tolerance):
        error = abs(value - reference)
        checks.append((name, detail, value, reference, error, tolerance, error <= tolerance))

    # closed-form vacuum fixed point
    for alpha in (0.0, 0.5, 5.0, 50.0, 500.0):
        add("closed_vacuum", f"alpha={_fmt(alpha)}",
            mapping.variance_closed(alpha, 1.0).variance_norm, 1.0, 1e-12)

    # spectral engine against the closed form, squeezed and vacuum input
    for alpha in (0.1, 1.0, 10.0, 60.0):
        closed = mapping.variance_closed(alpha, 0.0).variance_norm
        spectral = mapping.variance_spectral(alpha, mapping.SqueezingModel.flat(0.0), tol=tol)
        add("spectral_vs_closed", f"alpha={_fmt(alpha)}",
            spectral.variance_norm, closed, 1e-6 * closed)
    for alpha in (0.5, 5.0, 50.0, 500.0):
        spectral = mapping.variance_spectral(alpha, mapping.SqueezingModel.flat(1.0), tol=tol)
        add("spectral_vacuum", f"alpha={_fmt(alpha)}", spectral.variance_norm, 1.0, 1e-6)

    # transient engine: steady state and vacuum passthrough
    for alpha in (1.0, 10.0):
        area = PulseArea.constant(alpha)
        closed = mapping.variance_closed(alpha, 0.0).variance_norm
        rep = dynamics.transient_variance(area, 1.0, 1.0, mapping.SqueezingModel.flat(0.0), 10.0)
        add("transient_steady", f"alpha={_fmt(alpha)}", rep.variance_norm, closed, 1e-3)
    for tau in (0.3, 3.0):
        rep = dynamics.transient_variance(
            PulseArea.constant(10.0), 1.0, 1.0, mapping.SqueezingModel.flat(1.0), tau
        )
        add("transient_vacuum", f"tau_gamma={_fmt(tau)}", rep.variance_norm, 1.0, 1e-8)

    # grid oracle: vacuum passthrough at the configured grid
    nz = cfg.get_int("grid.nz", 200)
    ntau = cfg.get_int("grid.ntau", 200)
    tau_max = cfg.get_float("grid.tau_max_gamma", 1.0)
    for alpha in (0.5, 5.0):
        medium, drive = _dimensionless_medium_drive(alpha, tau_max)
        table, _ = dynamics.simulate_grid(
            medium, drive, GridSpec(nz=nz, ntau=ntau, tau_max=tau_max),
            mapping.SqueezingModel.flat(1.0),
        )
        worst = float(np.max(np.abs(table.variance_trace - 1.0)))
        add("grid_vacuum", f"alpha={_fmt(alpha)}", 1.0 + worst, 1.0, 5e-3)

    # grid oracle: light-kernel convergence ladder
    medium, drive = _dimensionless_medium_drive(VERIFY_KERNEL_ALPHA, VERIFY_KERNEL_TAU_MAX)
    grid = GridSpec(nz=VERIFY_KERNEL_LADDER[-1], ntau=VERIFY_KERNEL_LADDER[-1],
                    tau_max=VERIFY_KERNEL_TAU_MAX)
    study = dynamics.light_kernel_convergence(medium, drive, grid, levels=len(VERIFY_KERNEL_LADDER))
    monotone = all(a > b for a, b in zip(study.errors, study.errors[1:]))
    checks.append(("grid_kernel", "monotone_decrease", float(monotone), 1.0,
                   0.0 if monotone else 1.0, 0.0, monotone))
    for i, order in enumerate(study.orders):
        checks.append(("grid_kernel", f"order_{i}", order, 1.0,
                       abs(order - 1.0), 0.2, 0.8 <= order <= 1.2))
    add("grid_kernel", "finest_rel_l2", study.errors[-1], 0.0, 1e-3)

    # spatial integral of the pointwise Langevin kernels reproduces the
    # collective J0 form (the identity behind the single-kernel Langevin term)
    from .specfun import bessel_j0, bessel_j1, integrate_adaptive
    for u in (0.3, 2.0):
        for zp in (0.0, 0.4, 0.9):
            val = integrate_adaptive(
                lambda z: math.sqrt(u / (z - zp)) * bessel_j1(2.0 * math.sqrt(u * (z - zp)))
                if z > zp else 0.0,
                zp, 1.0, tol=1e-12,
            ).value
            ref = 1.0 - bessel_j0(2.0 * math.sqrt(u * (1.0 - zp)))
            add("langevin_kernel_identity", f"u={_fmt(u)},zp={_fmt(zp)}", val, ref, 1e-9)

    return checks


def cmd_verify(cfg: RunConfig, out: str | None, tol: float) -> int:
    checks = _verify_checks(cfg, tol)
    rows = [
        [name, detail, value, reference, error, tolerance, ok]
        for name, detail, value, reference, error, tolerance, ok in checks
    ]
    n_pass = sum(1 for c in checks if c[-1])
    rows.append(["summary", f"{n_pass}/{len(checks)}", math.nan, math.nan, math.nan,
                 math.nan, n_pass == len(checks)])
    _emit(_csv(["check", "detail", "value", "reference", "error", "tolerance", "pass"], rows), out)
    return EXIT_OK if n_pass == len(checks) else EXIT_PHYSICS


# ---------------------------------------------------------------------------

COMMANDS = {
    "efficiency": cmd_efficiency,
    "spectrum": cmd_spectrum,
    "transient": cmd_transient,
    "simulate": cmd_simulate,
    "teleport": cmd_teleport,
    "feasibility": cmd_feasibility,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinmap",
        description="Light-to-collective-spin mapping engines and their verification suite.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="path to a key = value config file")
    parser.add_argument("--out", help="output path (default stdout)")
    parser.add_argument("--tol", type=float, help="override quadrature tolerance")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
        tol = cfg.quad_tol(args.tol)
        return COMMANDS[args.command](cfg, args.out, tol)
    except (QuadratureConvergenceError, GridGrowthError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NUMERICS
    except (ValueError, OSError) as exc:
        # ConfigError, parameter-record and grid-stability violations all
        # signal a bad run configuration
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
