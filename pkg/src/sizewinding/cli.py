"""Command-line front end.

Usage::

    sizewinding [--seed S] [--workers W] [--output PATH] [--format json|csv]
                [--config FILE] COMMAND [command options]

Every command produces a :class:`~sizewinding.records.Table`.  Without
``--output`` the CSV form is printed to stdout.  Exit codes: 0 success,
1 numeric failure (a diagnostic record is written), 2 invalid input.

Grid arguments accept ``start:stop:step`` (stop inclusive) or a comma list;
every float accepts ``pi`` multiples such as ``pi``, ``2pi`` or ``pi/2``.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import brownian, bulk, ensembles, experiments, pauli, records, spin_chain, syk
from .errors import DimensionError, MalformedInputError, SizeWindingError, ValidationError

__all__ = ["ExperimentConfig", "COMMANDS", "build_parser", "config_from_args", "run", "main"]

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2

_PI = re.compile(r"^([-+]?(?:\d+\.?\d*|\.\d+)?)\*?pi(?:/((?:\d+\.?\d*|\.\d+)))?$")


def parse_float(text: str | float) -> float:
    if isinstance(text, (int, float)):
        return float(text)
    s = str(text).strip().lower()
    m = _PI.match(s)
    if m:
        coef = m.group(1)
        c = 1.0 if coef in ("", "+") else -1.0 if coef == "-" else float(coef)
        return c * np.pi / (float(m.group(2)) if m.group(2) else 1.0)
    try:
        return float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def parse_optional_float(text: str | float | None) -> float | None:
    if text is None or str(text).strip().lower() in ("", "none", "auto"):
        return None
    return parse_float(text)


def parse_grid(text: str | list) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [parse_float(x) for x in text]
    s = str(text).strip()
    if ":" in s:
        parts = s.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError("grid must be start:stop:step")
        start, stop, step = (parse_float(p) for p in parts)
        if step <= 0 or stop < start:
            raise argparse.ArgumentTypeError("grid needs step > 0 and stop >= start")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [float(x) for x in start + step * np.arange(count)]
    return [parse_float(p) for p in s.split(",") if p.strip()]


def parse_int(text: str | int) -> int:
    try:
        return int(text)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def parse_int_list(text: str | list) -> list[int]:
    values = parse_grid(text)
    if any(v != int(v) for v in values):
        raise argparse.ArgumentTypeError("expected integers")
    return [int(v) for v in values]


def parse_bool(text: str | bool) -> bool:
    if isinstance(text, bool):
        return text
    s = str(text).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


def _choice(*options: str) -> Callable[[str], str]:
    def parse(text: str) -> str:
        s = str(text).strip().lower()
        if s not in options:
            raise argparse.ArgumentTypeError(f"expected one of {', '.join(options)}, got {text!r}")
        return s

    return parse


# name -> (parser, default, help); names use underscores, flags use dashes
COMMANDS: dict[str, dict[str, tuple[Callable, Any, str]]] = {
    "pauli-check": {
        "n": (parse_int, 3, "qubits"),
        "samples": (parse_int, 0, "random pairs; 0 means exhaustive"),
    },
    "transfer": {
        "kind": (_choice("gue", "goe"), "goe", "ensemble"),
        "n": (parse_int, 5, "qubits per side"),
        "samples": (parse_int, 16, "ensemble samples"),
        "beta": (parse_float, 0.0, "inverse temperature"),
        "t": (parse_float, 3.0, "time on both sides"),
        "g": (parse_grid, [np.pi], "coupling grid"),
        "carriers": (_choice("all", "exclude"), "all", "coupled qubits"),
    },
    "twopoint": {
        "kind": (_choice("gue", "goe"), "gue", "ensemble"),
        "n": (parse_int, 5, "qubits per side"),
        "samples": (parse_int, 16, "ensemble samples"),
        "beta": (parse_float, 0.0, "inverse temperature"),
        "t": (parse_float, 2.0, "time"),
        "g_grid": (parse_grid, parse_grid("-1:1:0.125"), "coupling grid"),
        "form": (_choice("i", "ii"), "i", "two-point form"),
        "carriers": (_choice("all", "exclude"), "all", "coupled qubits"),
    },
    "winding": {
        "kind": (_choice("gue", "goe"), "gue", "ensemble"),
        "n": (parse_int, 6, "qubits per side"),
        "samples": (parse_int, 16, "ensemble samples"),
        "beta": (parse_float, 0.0, "inverse temperature"),
        "t": (parse_float, 2.0, "time"),
        "l0": (parse_int, 1, "initial size (X on the first l0 qubits)"),
        "sigma_rule": (_choice("binomial", "sqrt-2n-over-3", "sqrt-3n-over-4"), "binomial", "bulk width rule"),
    },
    "ensemble": {
        "kind": (_choice("gue", "goe"), "goe", "ensemble"),
        "n": (parse_int, 7, "qubits per side"),
        "samples": (parse_int, 64, "ensemble samples"),
        "beta": (parse_float, 0.0, "inverse temperature"),
        "g": (parse_float, np.pi, "coupling"),
        "t_grid": (parse_grid, parse_grid("0:6:0.25"), "time grid"),
        "carriers": (_choice("all", "exclude"), "all", "coupled qubits"),
    },
    "brownian": {
        "n": (parse_int, 400, "qubits"),
        "l0": (parse_int, 1, "initial size"),
        "t": (parse_grid, [1.0, 1.3, 1.6, 2.0, 3.0], "output times"),
        "dt": (parse_float, 0.0, "maximum step; 0 means 0.25/n"),
        "snapshot": (parse_bool, False, "emit x = l/n and density n q_l instead of l and q_l"),
        "oracle_trials": (parse_int, 0, "also run the jump-process oracle with this many trials"),
    },
    "chain": {
        "n": (parse_int, 10, "sites"),
        "depth": (parse_int, 10, "brickwork layers"),
        "samples": (parse_int, 4, "circuits"),
        "m": (parse_int_list, [1, 2, 3], "message counts"),
        "g": (parse_optional_float, None, "coupling; omitted means phase matched"),
        "baseline": (parse_bool, True, "also run g = 0"),
    },
    "syk": {
        "betaJ": (parse_float, 100.0, "beta J"),
        "q": (parse_int, 4, "locality"),
        "t_grid": (parse_grid, parse_grid("50:200:25"), "times in units of 1/J"),
        "N": (parse_float, 0.0, "fermions; 0 disables width checks"),
    },
    "bulk": {
        "Delta": (parse_float, 0.25, "operator dimension"),
        "beta": (parse_float, 2 * np.pi, "inverse temperature"),
        "epsilon": (parse_float, 0.1, "UV regulator"),
        "t_grid": (parse_grid, parse_grid("7:10:1"), "times"),
        "alpha_S": (parse_float, 1.0, "Schwarzian coefficient"),
        "J": (parse_float, 1.0, "coupling scale"),
    },
}


@dataclass
class ExperimentConfig:
    """Validated run configuration.

    Attributes
    ----------
    command : str
    params : dict
        Parsed command parameters.
    seed : int
        64-bit master seed.
    workers : int
    output : str or None
    format : str
        ``"json"`` or ``"csv"``.
    """

    command: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    workers: int = 1
    output: str | None = None
    format: str = "csv"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise MalformedInputError(f"unknown command {self.command!r}")
        known = COMMANDS[self.command]
        unknown = set(self.params) - set(known)
        if unknown:
            raise MalformedInputError(f"unknown parameters for {self.command}: {', '.join(sorted(unknown))}")
        parsed = {}
        for key, (parse, default, _) in known.items():
            raw = self.params.get(key, default)
            try:
                parsed[key] = parse(raw) if raw is not default else default
            except argparse.ArgumentTypeError as exc:
                raise MalformedInputError(f"{key}: {exc}") from None
        self.params = parsed
        if not 0 <= int(self.seed) < 1 << 64:
            raise MalformedInputError("seed must fit in 64 bits")
        if self.workers < 1:
            raise MalformedInputError("workers must be positive")
        if self.format not in ("json", "csv"):
            raise MalformedInputError("format must be json or csv")

    def as_dict(self) -> dict:
        return asdict(self)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sizewinding", description="Size-winding experiments.")
    parser.add_argument("--seed", type=parse_int, default=None, help="64-bit master seed (default 0)")
    parser.add_argument(
        "--workers",
        type=parse_int,
        default=None,
        help=f"worker processes (default from {experiments.WORKERS_ENV}, else 1)",
    )
    parser.add_argument("--output", default=None, help="output file; stdout CSV when omitted")
    parser.add_argument("--format", choices=("json", "csv"), default=None, help="output format (default from suffix)")
    parser.add_argument("--config", default=None, help="JSON file with command, params, seed, workers, output, format")
    sub = parser.add_subparsers(dest="command")
    for name, params in COMMANDS.items():
        p = sub.add_parser(name)
        for key, (_, _, help_text) in params.items():
            p.add_argument("--" + key.replace("_", "-"), dest=key, default=None, help=help_text)
    return parser


_CONFIG_KEYS = {"command", "params", "seed", "workers", "output", "format"}


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    base: dict[str, Any] = {}
    if args.config:
        try:
            base = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise MalformedInputError(f"cannot read config: {exc}") from None
        if not isinstance(base, dict):
            raise MalformedInputError("config must be a JSON object")
        unknown = set(base) - _CONFIG_KEYS
        if unknown:
            raise MalformedInputError(f"unknown config keys: {', '.join(sorted(unknown))}")
    command = args.command or base.get("command")
    if command is None:
        raise MalformedInputError("no command given")
    if args.command and base.get("command") not in (None, args.command):
        raise MalformedInputError("command on the line differs from the config file")
    params = dict(base.get("params", {}) if base.get("command", command) == command else {})
    for key in COMMANDS.get(command, {}):
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value
    output = args.output if args.output is not None else base.get("output")
    fmt = args.format or base.get("format")
    if fmt is None:
        fmt = "json" if output and str(output).endswith(".json") else "csv"
    workers = args.workers if args.workers is not None else base.get("workers", experiments.default_workers())
    seed = args.seed if args.seed is not None else base.get("seed", 0)
    return ExperimentConfig(
        command=command, params=params, seed=parse_int(seed), workers=parse_int(workers), output=output, format=fmt
    )


# ---------------------------------------------------------------------------
# commands


def _pauli_check(cfg: ExperimentConfig) -> records.Table:
    n, samples = cfg.params["n"], cfg.params["samples"]
    result = pauli.check_against_dense(n, samples or None, cfg.seed)
    names = list(result)
    return records.Table(
        grid={"check": names},
        values={"cases": [result[k][0] for k in names], "failures": [result[k][1] for k in names]},
        meta={"exhaustive": not samples},
    )


def _spec(cfg: ExperimentConfig) -> ensembles.EnsembleSpec:
    p = cfg.params
    return ensembles.EnsembleSpec(p["kind"], p["n"], p["samples"], cfg.seed)


def _transfer(cfg: ExperimentConfig) -> records.Table:
    p = cfg.params
    spec = _spec(cfg)
    lam, err = [], []
    for g in p["g"]:
        stats = experiments.lambda_monte_carlo(spec, p["beta"], [p["t"]], g, p["carriers"], cfg.workers)
        lam.append(float(stats.mean[0]))
        err.append(float(stats.stderr[0]))
    formula = [float(ensembles.finite_n_lambda(p["beta"], p["t"], p["t"], g, p["n"])) for g in p["g"]]
    return records.Table(grid={"g": p["g"]}, values={"lambda_mc": lam, "lambda_formula": formula}, stderr={"lambda_mc": err})


def _twopoint(cfg: ExperimentConfig) -> records.Table:
    p = cfg.params
    form = p["form"].upper()
    stats = experiments.twopoint_monte_carlo(
        _spec(cfg), p["beta"], p["t"], p["g_grid"], form, p["carriers"], workers=cfg.workers
    )
    mean = stats.mean
    return records.Table(
        grid={"g": p["g_grid"]},
        values={"re_q": mean.real.tolist(), "im_q": mean.imag.tolist(), "abs_q": np.abs(mean).tolist()},
        stderr={"q": stats.stderr.tolist()},
        meta={"form": form},
    )


def _winding(cfg: ExperimentConfig) -> records.Table:
    p = cfg.params
    n, l0 = p["n"], p["l0"]
    if not 1 <= l0 <= n:
        raise MalformedInputError("l0 must lie in [1, n]")
    label = "X" * l0 + "I" * (n - l0)
    q, prob = experiments.winding_monte_carlo(_spec(cfg), p["beta"], p["t"], label, cfg.workers)
    model = ensembles.winding_size_gue(l0, n, p["beta"], p["t"], p["sigma_rule"])
    ls = list(range(n + 1))
    return records.Table(
        grid={"l": ls},
        values={
            "re_q": q.mean.real.tolist(),
            "im_q": q.mean.imag.tolist(),
            "p": prob.mean.tolist(),
            "re_q_model": model.q.real.tolist(),
            "im_q_model": model.q.imag.tolist(),
            "p_model": model.p.tolist(),
        },
        stderr={"q": q.stderr.tolist(), "p": prob.stderr.tolist()},
        meta={"pauli": label},
    )


def _ensemble(cfg: ExperimentConfig) -> records.Table:
    p = cfg.params
    ts = p["t_grid"]
    stats = experiments.lambda_monte_carlo(_spec(cfg), p["beta"], ts, p["g"], p["carriers"], cfg.workers)
    k = p["n"] if p["carriers"] == "all" else p["n"] - 1
    formula = [float(ensembles.finite_n_lambda(p["beta"], t, t, p["g"], k)) for t in ts]
    large_n = [float(ensembles.lambda_master(p["beta"], t, t, p["g"])) for t in ts]
    return records.Table(
        grid={"t": ts},
        values={"lambda_mc": stats.mean.tolist(), "lambda_formula": formula, "lambda_large_n": large_n},
        stderr={"lambda_mc": stats.stderr.tolist()},
    )


def _brownian(cfg: ExperimentConfig) -> records.Table:
    p = cfg.params
    n, l0 = p["n"], p["l0"]
    times = sorted(p["t"])
    traj = brownian.integrate(brownian.delta_distribution(n, l0), n, times, dt=p["dt"] or None)
    ls = np.arange(n + 1)
    tcol = np.repeat(traj.times, n + 1).tolist()
    qcol = traj.q.ravel().tolist()
    meta = {"mean": traj.mean().tolist(), "std": traj.std().tolist()}
    if p["oracle_trials"]:
        oracle = brownian.stochastic_oracle(n, l0, times, p["oracle_trials"], cfg.seed)
        meta["total_variation"] = [brownian.total_variation(a, b) for a, b in zip(oracle, traj.q)]
    if p["snapshot"]:
        return records.Table(
            grid={"time": tcol, "x": np.tile(ls / n, len(times)).tolist()},
            values={"density": (traj.q * n).ravel().tolist()},
            meta=meta,
        )
    return records.Table(grid={"time": tcol, "l": np.tile(ls, len(times)).tolist()}, values={"q_l": qcol}, meta=meta)


def _chain(cfg: ExperimentConfig) -> records.Table:
    p = cfg.params
    spec = spin_chain.BrickworkSpec(p["n"], p["depth"], cfg.seed, p["samples"])
    g = p["g"]
    rows: dict[str, list] = {"m": [], "message_site": [], "cone": [], "g": [], "fidelity": []}
    errs: list[float] = []
    base_f: list[float] = []
    flags = {}
    for m in p["m"]:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", spin_chain.SeparationWarning)
            res = spin_chain.simulate_chain_transfer(spec, m, g)
        flags[m] = {"separated": res.separated, "warnings": len(caught)}
        if p["baseline"]:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", spin_chain.SeparationWarning)
                base = spin_chain.simulate_chain_transfer(spec, m, 0.0)
            base_f.extend(base.fidelities.tolist())
        for i, site in enumerate(res.message_sites):
            rows["m"].append(m)
            rows["message_site"].append(site)
            rows["cone"].append(res.cone_sizes[i])
            rows["g"].append(res.g)
            rows["fidelity"].append(float(res.fidelities[i]))
            errs.append(float(res.standard_errors[i]))
    grid = {k: rows[k] for k in ("m", "message_site", "cone", "g")}
    values = {"fidelity": rows["fidelity"]}
    if p["baseline"]:
        values["fidelity_g0"] = base_f
    return records.Table(grid=grid, values=values, stderr={"fidelity": errs}, meta={"separation": flags})


def _syk(cfg: ExperimentConfig) -> records.Table:
    p = cfg.params
    N = p["N"] or None
    cols: dict[str, list] = {
        "alpha": [],
        "mean_size": [],
        "windings_per_sigma": [],
        "predicted_windings_per_sigma": [],
        "sigma_over_wavelength": [],
        "origin_phase": [],
        "phase_per_step": [],
        "predicted_phase_per_step": [],
        "regime_ok": [],
    }
    regimes = []
    root = syk.solve_alpha_gamma(p["betaJ"])
    for t in p["t_grid"]:
        params = syk.SykParams(p["betaJ"], p["q"], t, N)
        diag = syk.winding_diagnostics(params)
        cols["alpha"].append(float(np.real(root.alpha)))
        cols["mean_size"].append(syk.mean_size(params, root))
        for key in (
            "windings_per_sigma",
            "predicted_windings_per_sigma",
            "sigma_over_wavelength",
            "origin_phase",
            "phase_per_step",
            "predicted_phase_per_step",
        ):
            cols[key].append(getattr(diag, key))
        cols["regime_ok"].append(diag.regime.ok)
        regimes.append(diag.regime.as_dict())
    return records.Table(grid={"t": p["t_grid"]}, values=cols, meta={"regime": regimes, "gamma": root.gamma})


def _bulk(cfg: ExperimentConfig) -> records.Table:
    p = cfg.params
    ts = p["t_grid"]
    fit = bulk.bulk_perfect_winding_fit(ts, p["Delta"], p["beta"], p["epsilon"])
    sizes = [bulk.average_thermal_size(t, p["beta"], p["Delta"], p["epsilon"], p["alpha_S"], p["J"]) for t in ts]
    predicted = (4 * np.exp(-2 * np.pi * np.asarray(ts) / p["beta"])).tolist()
    return records.Table(
        grid={"t": ts},
        values={
            "alpha": fit.alpha.tolist(),
            "alpha_predicted": predicted,
            "magnitude_mismatch": fit.magnitude_mismatch.tolist(),
            "phase_residual": fit.phase_residual.tolist(),
            "mean_size": sizes,
            "regime_ok": fit.regime_ok.tolist(),
        },
    )


_RUNNERS: dict[str, Callable[[ExperimentConfig], records.Table]] = {
    "pauli-check": _pauli_check,
    "transfer": _transfer,
    "twopoint": _twopoint,
    "winding": _winding,
    "ensemble": _ensemble,
    "brownian": _brownian,
    "chain": _chain,
    "syk": _syk,
    "bulk": _bulk,
}


def _emit(table: records.Table, cfg: ExperimentConfig, stdout) -> None:
    config = records.to_jsonable(cfg.as_dict())
    if cfg.output is None:
        if cfg.format == "json":
            record = records.to_jsonable(records.build_record(table, config, None))
            stdout.write(json.dumps(record, indent=1, sort_keys=True) + "\n")
        else:
            stdout.write(records.csv_text(table))
        return
    if cfg.format == "json":
        records.write_json(cfg.output, table, config)
    else:
        records.write_csv(cfg.output, table)


def _diagnostic(cfg: ExperimentConfig, exc: BaseException, stderr) -> None:
    record = {
        "config": records.to_jsonable(cfg.as_dict()),
        "version": records.code_version(),
        "error": {"type": type(exc).__name__, "message": str(exc)},
    }
    text = json.dumps(record, indent=1, sort_keys=True) + "\n"
    if cfg.output:
        Path(str(cfg.output) + ".error.json").write_text(text, encoding="utf-8")
    stderr.write(text)


def run(config: ExperimentConfig, stdout=None, stderr=None) -> int:
    """Execute a validated configuration and return the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        table = _RUNNERS[config.command](config)
    except (MalformedInputError, DimensionError, ValidationError) as exc:
        stderr.write(f"sizewinding: error: {exc}\n")
        return EXIT_USAGE
    except (SizeWindingError, ArithmeticError, np.linalg.LinAlgError) as exc:
        _diagnostic(config, exc, stderr)
        return EXIT_NUMERIC
    _emit(table, config, stdout)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = config_from_args(args)
    except MalformedInputError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"sizewinding: error: {exc}\n")
        return EXIT_USAGE
    return run(config)


if __name__ == "__main__":
    raise SystemExit(main())
