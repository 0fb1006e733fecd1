"""Command-line front end: single-shot evaluation, time series, sweeps, validation.

Subcommands
-----------
tunnel    final penetrability + energy/constraint report for one scaled config
evolve    moment time series (t, sigma_q, sigma_p, sigma_qq, sigma_pp, sigma_pq, P)
sweep     two-axis penetrability surface (figure presets 1..6 available)
validate  randomized analytic-vs-ODE (and optional Fokker-Planck) oracle runs

Exit codes: 0 ok, 1 parse/config errors, 2 regime violations, 3 singular
parameters, 4 validation tolerance failure.  All CSV output is
comma-separated with a header row, LF endings, UTF-8, 17 significant
digits (round-trip exact for 64-bit floats).  Every output file gets a
sidecar ``<name>.manifest.json`` recording the resolved configuration and
the constraint bookkeeping.
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .errors import AmbiguousRegime, NegativeDelta, SingularParameters
from .model import (
    DimensionlessConfig,
    check_positivity_constraint,
    dimensionless_to_dimensional,
    gibbs_constraint_satisfied,
)
from .moment_ode import compare_with_analytic, integrate_moments
from .phase_space import fokker_planck_evolve, grid_for_evolution, grid_moments
from .propagator import propagate_covariance, propagate_mean, propagate_state
from .sampling import random_barrier_model
from .tunneling import (
    initial_energy,
    penetrability_dimensionless,
    penetrability_from_moments,
)

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_REGIME = 2
EXIT_SINGULAR = 3
EXIT_VALIDATION = 4

CONFIG_NAMES = ("z", "v", "eps", "r", "gamma", "theta")

#: 2% relative inset applied to open axis windows
AXIS_EDGE = 0.02


class _Parser(argparse.ArgumentParser):
    """argparse exits with code 2 on errors; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class AxisSpec:
    name: str
    lo: float
    hi: float
    n: int
    log: bool = False

    def points(self) -> np.ndarray:
        if self.log:
            return np.geomspace(self.lo, self.hi, self.n)
        return np.linspace(self.lo, self.hi, self.n)


@dataclass(frozen=True)
class SweepSpec:
    axis1: AxisSpec
    axis2: AxisSpec
    fixed: dict

    def __post_init__(self):
        for ax in (self.axis1, self.axis2):
            if ax.name not in CONFIG_NAMES:
                raise ValueError(f"unknown sweep parameter {ax.name!r}")
            if ax.n < 2:
                raise ValueError(f"axis {ax.name}: need n_points >= 2, got {ax.n}")
            if not ax.hi > ax.lo:
                raise ValueError(f"axis {ax.name}: need max > min")
            if ax.log and ax.lo <= 0:
                raise ValueError(f"axis {ax.name}: log spacing needs positive bounds")
        if self.axis1.name == self.axis2.name:
            raise ValueError("sweep axes must be distinct parameters")
        missing = [
            n for n in CONFIG_NAMES
            if n not in (self.axis1.name, self.axis2.name) and n not in self.fixed
        ]
        if missing:
            raise ValueError(f"missing fixed values for {missing}")


def _eps_axis(gamma: float, n: int) -> AxisSpec:
    lo, hi = (gamma, math.hypot(1.0, gamma)) if gamma > 0 else (0.0, 1.0)
    span = hi - lo
    return AxisSpec("eps", lo + AXIS_EDGE * span, hi - AXIS_EDGE * span, n)


def figure_preset(fig: int, n1: int, n2: int) -> tuple[SweepSpec, bool]:
    """Sweep spec for the standard penetrability surfaces.

    Returns (spec, forces_allow_violations).  Figures 3 and 4 scan eps
    across the full gamma range at zero temperature, which necessarily
    leaves the admissible window, so they imply allow-violations.
    """
    theta_axis = AxisSpec("theta", 1.0, 10.0, n2)
    if fig == 1:
        fixed = dict(z=-3.0, v=-0.5, r=0.5, gamma=0.0)
        return SweepSpec(_eps_axis(0.0, n1), theta_axis, fixed), False
    if fig == 2:
        fixed = dict(z=-3.0, v=-0.5, r=0.1, gamma=0.0)
        return SweepSpec(_eps_axis(0.0, n1), theta_axis, fixed), False
    if fig in (3, 4):
        fixed = (
            dict(z=-3.0, v=-0.5, r=0.3, theta=1.0)
            if fig == 3
            else dict(z=-9.0, v=-0.9, r=0.3, theta=1.0)
        )
        axis1 = AxisSpec("eps", AXIS_EDGE, 8.0, n1)
        axis2 = AxisSpec("gamma", 0.0, 8.0, n2)
        return SweepSpec(axis1, axis2, fixed), True
    if fig == 5:
        fixed = dict(z=-3.0, v=-0.5, r=0.5, gamma=7.99)
        return SweepSpec(_eps_axis(7.99, n1), theta_axis, fixed), False
    if fig == 6:
        fixed = dict(z=-9.0, v=-0.9, r=0.5, gamma=0.97)
        return SweepSpec(_eps_axis(0.97, n1), theta_axis, fixed), False
    raise ValueError(f"figure preset must be 1..6, got {fig}")


def _sweep_point(task):
    """Evaluate one grid point; returns (value_or_nan_or_None, flag).

    None value means a regime violation that must abort when violations
    are not allowed.
    """
    fixed, updates, allow = task
    values = dict(fixed)
    values.update(updates)
    try:
        cfg = DimensionlessConfig(**values)
    except ValueError:
        return float("nan"), "undefined"
    window_bad = cfg.violates_window()
    if window_bad and not allow:
        return None, "regime"
    try:
        result = penetrability_dimensionless(cfg, enforce_window=False)
    except (NegativeDelta, AmbiguousRegime):
        return float("nan"), "undefined"
    if window_bad:
        return result.value, "window"
    if not gibbs_constraint_satisfied(cfg):
        return result.value, "constraint"
    return result.value, ""


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _timestamp() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def _write_manifest(out_path: str, payload: dict) -> None:
    payload = {
        "tool": "lindblad-tunneling",
        "version": __version__,
        "timestamp": _timestamp(),
        **payload,
    }
    with open(f"{out_path}.manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _constraint_summary(cfg: DimensionlessConfig, m, omega, hbar):
    """Dimensional positivity-bound report; None when the Gibbs form is undefined."""
    if cfg.eps <= cfg.gamma:
        return None
    params, _ = dimensionless_to_dimensional(cfg, m, omega, hbar, check_window=False)
    rep = check_positivity_constraint(params)
    return {"passed": rep.passed, "margin": rep.margin, "product": rep.product, "bound": rep.bound}


def _resolve_config(args, parser) -> DimensionlessConfig:
    file_vals = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                file_vals = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            parser.error(f"cannot read config file: {exc}")
        if not isinstance(file_vals, dict):
            parser.error("config file must hold a flat JSON object")

    def pick(name, default=None):
        cli = getattr(args, name, None)
        if cli is not None:
            return cli
        return file_vals.get(name, default)

    raw = {
        "z": pick("z"),
        "v": pick("v"),
        "eps": pick("eps"),
        "r": pick("r"),
        "gamma": pick("gamma", 0.0),
        "theta": pick("theta", 1.0),
    }
    missing = [k for k in ("z", "v", "eps", "r") if raw[k] is None]
    if missing:
        parser.error(f"missing required config values: {', '.join(missing)}")
    try:
        return DimensionlessConfig(**{k: float(v) for k, v in raw.items()})
    except (TypeError, ValueError) as exc:
        parser.error(str(exc))


def _parse_units(text: str, parser) -> tuple[float, float, float]:
    try:
        m, omega, hbar = (float(part) for part in text.split(","))
    except ValueError:
        parser.error(f"--units expects 'm,omega,hbar', got {text!r}")
    if m <= 0 or omega <= 0 or hbar <= 0:
        parser.error("--units values must be positive")
    return m, omega, hbar


def _check_window_or_fail(cfg: DimensionlessConfig, allow: bool) -> int | None:
    if cfg.violates_window():
        lo, hi = cfg.window()
        msg = (
            f"eps={cfg.eps} violates the admissible window "
            f"{lo:g} < eps < {hi:.9g} for gamma={cfg.gamma}"
        )
        if not allow:
            print(f"error: {msg} (use --allow-violations to evaluate anyway)", file=sys.stderr)
            return EXIT_REGIME
        print(f"warning: {msg}", file=sys.stderr)
    return None


def _warn_constraint(summary, strict: bool) -> int | None:
    if summary is None:
        print(
            "warning: Gibbs coefficients undefined (eps <= gamma); "
            "no constraint report",
            file=sys.stderr,
        )
        return EXIT_REGIME if strict else None
    if not summary["passed"]:
        print(
            f"warning: diffusion positivity bound violated "
            f"(margin {summary['margin']:.6g})",
            file=sys.stderr,
        )
        if strict:
            print("error: aborting under --strict", file=sys.stderr)
            return EXIT_REGIME
    return None


def cmd_tunnel(args, parser) -> int:
    cfg = _resolve_config(args, parser)
    m, omega, hbar = _parse_units(args.units, parser)
    code = _check_window_or_fail(cfg, args.allow_violations)
    if code is not None:
        return code
    summary = _constraint_summary(cfg, m, omega, hbar)
    code = _warn_constraint(summary, args.strict)
    if code is not None:
        return code
    try:
        result = penetrability_dimensionless(cfg, enforce_window=False)
    except NegativeDelta as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except AmbiguousRegime as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    energy = initial_energy(cfg, omega=omega, hbar=hbar)
    if args.format == "json":
        doc = {
            "P": result.value,
            "erf_argument": result.argument,
            "regime": result.regime.value,
            "energy": {
                "E": energy.E,
                "sub_barrier": energy.sub_barrier,
                "classical_pass": energy.classical_pass,
            },
            "constraint": summary,
            "config": vars(cfg) | {},
            "window_violated": cfg.violates_window(),
        }
        print(json.dumps(doc, sort_keys=True))
    else:
        print(f"P = {_fmt(result.value)}")
        print(f"erf argument = {_fmt(result.argument)}")
        print(f"regime = {result.regime.value}")
        print(
            f"E = {_fmt(energy.E)} "
            f"({'sub-barrier' if energy.sub_barrier else 'above-barrier'}; "
            f"classical pass: {'yes' if energy.classical_pass else 'no'})"
        )
        if summary is not None:
            print(
                f"constraint margin = {_fmt(summary['margin'])} "
                f"({'pass' if summary['passed'] else 'VIOLATED'})"
            )
    return EXIT_OK


def cmd_evolve(args, parser) -> int:
    cfg = _resolve_config(args, parser)
    m, omega, hbar = _parse_units(args.units, parser)
    if args.t_max is None or args.t_max <= 0:
        parser.error("--t-max must be a positive time")
    code = _check_window_or_fail(cfg, args.allow_violations)
    if code is not None:
        return code
    summary = _constraint_summary(cfg, m, omega, hbar)
    code = _warn_constraint(summary, args.strict)
    if code is not None:
        return code
    params, state0 = dimensionless_to_dimensional(cfg, m, omega, hbar, check_window=False)
    ts = np.linspace(0.0, args.t_max, args.n_steps + 1)
    if args.ode:
        states = integrate_moments(params, None, state0, ts)
        rows = [
            (s.t, s.sigma_q, s.sigma_p, s.sigma_qq, s.sigma_pp, s.sigma_pq)
            for s in states
        ]
    else:
        try:
            sq, sp = propagate_mean(params, state0, ts)
            sqq, spp, spq = propagate_covariance(params, state0, ts)
        except SingularParameters as exc:
            print(f"error: {exc}\nhint: rerun with --ode", file=sys.stderr)
            return EXIT_SINGULAR
        rows = list(zip(ts, sq, sp, sqq, spp, spq))
    lines = ["t,sigma_q,sigma_p,sigma_qq,sigma_pp,sigma_pq,P"]
    for t, q, p, qq, pp, pq in rows:
        prob, _ = penetrability_from_moments(q, qq)
        lines.append(",".join(_fmt(x) for x in (t, q, p, qq, pp, pq, prob)))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        _write_manifest(
            args.out,
            {
                "command": "evolve",
                "config": vars(cfg) | {},
                "units": {"m": m, "omega": omega, "hbar": hbar},
                "t_max": args.t_max,
                "n_steps": args.n_steps,
                "ode": bool(args.ode),
                "constraint_report": summary,
            },
        )
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _parse_axis(text: str, parser) -> AxisSpec:
    parts = text.split(":")
    if len(parts) not in (4, 5):
        parser.error(f"axis spec must be name:min:max:n[:log|linear], got {text!r}")
    name, lo, hi, n = parts[:4]
    log = False
    if len(parts) == 5:
        if parts[4] not in ("log", "linear"):
            parser.error(f"axis scale must be 'log' or 'linear', got {parts[4]!r}")
        log = parts[4] == "log"
    try:
        return AxisSpec(name=name, lo=float(lo), hi=float(hi), n=int(n), log=log)
    except ValueError as exc:
        parser.error(f"bad axis spec {text!r}: {exc}")


def cmd_sweep(args, parser) -> int:
    if not args.out:
        parser.error("sweep requires --out PATH")
    n1, n2 = args.points
    allow = args.allow_violations
    if args.fig is not None:
        spec, forced = figure_preset(args.fig, n1, n2)
        if forced and not allow:
            print(
                f"note: figure {args.fig} scans outside the admissible window; "
                "enabling --allow-violations",
                file=sys.stderr,
            )
            allow = True
        fixed = dict(spec.fixed)
        for name in CONFIG_NAMES:
            override = getattr(args, name, None)
            if override is not None and name in fixed:
                fixed[name] = override
        spec = SweepSpec(spec.axis1, spec.axis2, fixed)
    else:
        if not (args.axis1 and args.axis2):
            parser.error("sweep needs either --fig N or both --axis1 and --axis2")
        axis1 = _parse_axis(args.axis1, parser)
        axis2 = _parse_axis(args.axis2, parser)
        fixed = {}
        for name in CONFIG_NAMES:
            if name in (axis1.name, axis2.name):
                continue
            val = getattr(args, name, None)
            if val is None:
                val = {"gamma": 0.0, "theta": 1.0}.get(name)
            if val is None:
                parser.error(f"sweep needs a fixed value for {name}")
            fixed[name] = float(val)
        try:
            spec = SweepSpec(axis1, axis2, fixed)
        except ValueError as exc:
            parser.error(str(exc))

    xs1 = spec.axis1.points()
    xs2 = spec.axis2.points()
    tasks = [
        (spec.fixed, {spec.axis1.name: float(x1), spec.axis2.name: float(x2)}, allow)
        for x1 in xs1
        for x2 in xs2
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_point, tasks, chunksize=64))
    else:
        results = [_sweep_point(task) for task in tasks]

    flags = {"window": 0, "constraint": 0, "undefined": 0}
    lines = [f"{spec.axis1.name},{spec.axis2.name},P"]
    for task, (value, flag) in zip(tasks, results):
        if value is None:
            updates = task[1]
            print(
                f"error: regime violation at {updates} "
                "(use --allow-violations to emit the full surface)",
                file=sys.stderr,
            )
            return EXIT_REGIME
        if flag:
            flags[flag] += 1
        updates = task[1]
        lines.append(
            ",".join(
                _fmt(x)
                for x in (updates[spec.axis1.name], updates[spec.axis2.name], value)
            )
        )
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    _write_manifest(
        args.out,
        {
            "command": "sweep",
            "fig": args.fig,
            "axes": [vars(spec.axis1) | {}, vars(spec.axis2) | {}],
            "fixed": spec.fixed,
            "allow_violations": allow,
            "violations": {
                "window_points": flags["window"],
                "constraint_points": flags["constraint"],
                "undefined_points": flags["undefined"],
                "note": (
                    "window/constraint points evaluated through the closed forms; "
                    "undefined points emitted as NaN"
                ),
            },
        },
    )
    return EXIT_OK


def cmd_validate(args, parser) -> int:
    rng = np.random.default_rng(args.seed)
    tol_ode = 1e-8
    worst = 0.0
    worst_desc = ""
    for i in range(args.cases):
        regime = "escaping" if i % 2 == 0 else "stuck"
        params, state0 = random_barrier_model(
            rng,
            regime=regime,
            minimum_uncertainty=(i % 3 != 0),
            with_cross_diffusion=(i % 4 == 0),
        )
        t_grid = np.linspace(0.0, 10.0 / params.omega, 101)
        report = compare_with_analytic(params, state0, t_grid)
        if report.max_rel_error > worst:
            worst = report.max_rel_error
            worst_desc = f"case {i} ({regime}): {params!r}"
    ode_pass = worst < tol_ode

    lines = [
        "lindblad-tunneling validate report",
        f"seed={args.seed} cases={args.cases}",
        f"analytic-vs-ode: max_rel_error={worst:.6e} tolerance={tol_ode:.0e} "
        f"{'PASS' if ode_pass else 'FAIL'}",
        f"  worst: {worst_desc}",
    ]

    fp_pass = True
    if args.fp:
        tol_fp = 1e-2
        cfg = DimensionlessConfig(z=-3.0, v=-0.5, eps=0.5, r=0.5, gamma=0.0, theta=1.0)
        params, state0 = dimensionless_to_dimensional(cfg)
        t_final = 1.0 / params.omega
        grid0 = grid_for_evolution(params, state0, t_final, args.grid, args.grid)
        evolved = fokker_planck_evolve(params, grid0, t_final)
        gm = grid_moments(evolved)
        exact = propagate_state(params, state0, t_final)
        errs = {
            "sigma_q": abs(gm.sigma_q - exact.sigma_q) / abs(exact.sigma_q),
            "sigma_p": abs(gm.sigma_p - exact.sigma_p) / abs(exact.sigma_p),
            "sigma_qq": abs(gm.sigma_qq - exact.sigma_qq) / exact.sigma_qq,
            "sigma_pp": abs(gm.sigma_pp - exact.sigma_pp) / exact.sigma_pp,
            "sigma_pq": abs(gm.sigma_pq - exact.sigma_pq) / abs(exact.sigma_pq),
        }
        worst_fp = max(errs.values())
        fp_pass = worst_fp < tol_fp
        lines.append(
            f"fp-oracle: grid={args.grid} max_rel_error={worst_fp:.6e} "
            f"tolerance={tol_fp:.0e} {'PASS' if fp_pass else 'FAIL'}"
        )
        lines.append(f"  leakage={evolved.leaked:.3e}")

    ok = ode_pass and fp_pass
    lines.append(f"overall: {'PASS' if ok else 'FAIL'}")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    if not ok:
        return EXIT_VALIDATION
    return EXIT_OK


def _add_config_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("-z", "--z", type=float, help="scaled initial position (typically < 0)")
    sub.add_argument("-v", "--v", type=float, help="scaled initial momentum")
    sub.add_argument("--eps", type=float, help="scaled friction lambda/omega")
    sub.add_argument("-r", "--r", type=float, help="scaled inverse packet width")
    sub.add_argument("--gamma", type=float, help="mu/omega (default 0)")
    sub.add_argument("--theta", type=float, help="coth(hbar*omega/2kT) >= 1 (default 1)")
    sub.add_argument("--config", help="flat JSON file with the same keys; flags override")
    sub.add_argument("--units", default="1,1,1", help="m,omega,hbar (default 1,1,1)")
    sub.add_argument("--strict", action="store_true", help="abort on constraint violations")
    sub.add_argument(
        "--allow-violations",
        action="store_true",
        help="evaluate outside the admissible eps window instead of aborting",
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="ltunnel", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    p_tunnel = subs.add_parser("tunnel", help="single penetrability evaluation")
    _add_config_flags(p_tunnel)
    p_tunnel.add_argument("--format", choices=("text", "json"), default="text")

    p_evolve = subs.add_parser("evolve", help="moment time series as CSV")
    _add_config_flags(p_evolve)
    p_evolve.add_argument("--t-max", type=float, help="final time (physical units)")
    p_evolve.add_argument("--n-steps", type=int, default=200, help="number of intervals")
    p_evolve.add_argument("--ode", action="store_true", help="integrate instead of closed forms")
    p_evolve.add_argument("--out", help="output CSV path (stdout when omitted)")

    p_sweep = subs.add_parser("sweep", help="two-axis penetrability surface")
    _add_config_flags(p_sweep)
    p_sweep.add_argument("--fig", type=int, choices=range(1, 7), help="figure preset 1..6")
    p_sweep.add_argument("--axis1", help="name:min:max:n[:log|linear]")
    p_sweep.add_argument("--axis2", help="name:min:max:n[:log|linear]")
    p_sweep.add_argument(
        "--points",
        type=lambda s: tuple(int(x) for x in s.split(",")) if "," in s else (int(s), int(s)),
        default=(41, 41),
        help="preset grid size N or N1,N2 (default 41)",
    )
    p_sweep.add_argument("--jobs", type=int, default=1, help="worker processes")
    p_sweep.add_argument("--out", help="output CSV path (manifest written alongside)")

    p_val = subs.add_parser("validate", help="randomized oracle comparison")
    p_val.add_argument("--seed", type=int, default=42)
    p_val.add_argument("--cases", type=int, default=100)
    p_val.add_argument("--fp", action="store_true", help="include the Fokker-Planck oracle")
    p_val.add_argument("--grid", type=int, default=256, help="FP grid size per axis")
    p_val.add_argument("--out", help="also write the report to this path")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {
        "tunnel": cmd_tunnel,
        "evolve": cmd_evolve,
        "sweep": cmd_sweep,
        "validate": cmd_validate,
    }[args.command]
    return handler(args, parser)


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
