"""Command-line driver.

    simplexdyn <matrix-analyze|simulate|verify|ternary> --config <file> [--out <dir>]

Experiments are described by a JSON config file; flags only pick the config
and the output directory.  Every artifact gets a sidecar JSON embedding the
config, its hash, the master seed, and the package version, so a rerun with
the same config is byte-identical.

Exit codes: 0 ok, 2 config/parse error, 3 dimension error, 4 simulation
error, 5 verification gate failure.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import aitchison as ag
from . import figures, io, payoff, suites, ternary
from . import replicator as rd
from . import sde
from .errors import SimplexDynError, WrongDimension

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_DIMENSION = 3
EXIT_SIMULATION = 4
EXIT_VERIFY = 5


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _load_config(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise CliError(EXIT_PARSE, f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_PARSE, f"config is not valid JSON: {exc}")


def _load_matrix(config: dict, base: Path) -> np.ndarray:
    if "matrix_file" in config:
        raw = _load_config(base / config["matrix_file"]
                           if not Path(config["matrix_file"]).is_absolute()
                           else config["matrix_file"])
    elif "matrix" in config:
        raw = config["matrix"]
    else:
        raise CliError(EXIT_PARSE, "config needs a 'matrix' or 'matrix_file' key")
    try:
        a = np.asarray(raw["A"], dtype=float)
        n = int(raw["n"])
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(EXIT_PARSE, f"matrix JSON must be {{'n': int, 'A': rows}}: {exc}")
    if a.shape != (n, n):
        raise CliError(EXIT_DIMENSION, f"matrix shape {a.shape} does not match n={n}")
    try:
        return payoff.as_payoff_matrix(a)
    except SimplexDynError as exc:
        raise CliError(EXIT_DIMENSION, str(exc))


def _require_seed(config: dict) -> int:
    if "seed" not in config:
        raise CliError(EXIT_PARSE, "config must carry an explicit 'seed'")
    return int(config["seed"])


def _outdir(args) -> Path:
    out = Path(args.out) if args.out else Path.cwd()
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_matrix_analyze(args) -> int:
    config = _load_config(args.config)
    out = _outdir(args)
    a = _load_matrix(config, Path(args.config).parent)
    d = payoff.decompose(a)
    report = {
        "n": a.shape[0],
        "decomposition": None if d is None else d.to_dict(),
        "definiteness": payoff.definiteness(a).to_dict(),
        "sum_condition": payoff.sum_condition(a),
        "equilibria": payoff.enumerate_nash(a).to_dict(),
    }
    path = out / "matrix_analysis.json"
    io.write_json(path, {**io.sidecar(config), "report": report})
    print(f"wrote {path}")
    return EXIT_OK


def _sim_trajectory(config: dict, a, out: Path, base_name: str, seed: int,
                    want_figures: bool):
    kind = config.get("kind", "ode")
    p0 = ag.as_composition(config.get("p0", ag.barycenter(a.shape[0] if a is not None
                                                          else int(config["n"]))))
    if kind == "ode":
        cfg = rd.OdeConfig(t_end=float(config.get("t_end", 10.0)),
                           dt=float(config.get("dt", 1e-3)),
                           record_every=int(config.get("record_every", 10)))
        traj = rd.integrate_replicator(a, p0, cfg)
    else:
        cfg = sde.SdeConfig(sigma=float(config.get("sigma", 1.0)),
                            t_end=float(config.get("t_end", 1.0)),
                            dt=float(config.get("dt", 1e-3)),
                            master_seed=seed,
                            record_every=int(config.get("record_every", 10)))
        if kind == "bm":
            traj = sde.bm_path(p0, cfg)
        elif kind == "sde":
            traj = sde.sde_path(_drift_from_config(config, a), p0, cfg)
        elif kind == "wong-zakai":
            traj = sde.wong_zakai_path(float(config["lambda_corr"]), p0, cfg)
        else:
            raise CliError(EXIT_PARSE, f"unknown simulation kind: {kind}")
    csv_path = out / f"{base_name}.csv"
    io.write_trajectory_csv(csv_path, traj)
    io.write_json(out / f"{base_name}.json",
                  io.sidecar(config, seed=seed, rows=int(traj.times.size)))
    if want_figures:
        figures.trajectory_figure(traj, out / f"{base_name}.png")
    return csv_path


def _drift_from_config(config: dict, a) -> object:
    drift = config.get("drift", "replicator" if a is not None else "none")
    if drift == "none":
        return sde.NoDrift()
    if drift == "replicator":
        if a is None:
            raise CliError(EXIT_PARSE, "replicator drift needs a matrix")
        return sde.ReplicatorDrift(a)
    if drift == "dirichlet-langevin":
        return sde.DirichletLangevinDrift(np.asarray(config["alpha"], float))
    raise CliError(EXIT_PARSE, f"unknown drift kind: {drift}")


def cmd_simulate(args) -> int:
    config = _load_config(args.config)
    seed = _require_seed(config)
    out = _outdir(args)
    want_figures = bool(config.get("figures", True))
    a = None
    if "matrix" in config or "matrix_file" in config:
        a = _load_matrix(config, Path(args.config).parent)
    try:
        if config.get("paths", 1) > 1:
            cfg = sde.SdeConfig(sigma=float(config.get("sigma", 1.0)),
                                t_end=float(config.get("t_end", 1.0)),
                                dt=float(config.get("dt", 1e-3)),
                                master_seed=seed)
            p0 = ag.as_composition(config.get("p0"))
            if config.get("kind") == "bm":
                ens = sde.bm_terminal_ensemble(p0, cfg.t_end, cfg.sigma, seed,
                                               int(config["paths"]))
            else:
                ens = sde.em_terminal_ensemble(_drift_from_config(config, a),
                                               sde.fixed_start(p0), cfg,
                                               int(config["paths"]))
            csv_path = out / "ensemble.csv"
            io.write_ensemble_csv(csv_path, ens)
            io.write_json(out / "ensemble.json",
                          io.sidecar(config, seed=seed,
                                     paths=int(config["paths"])))
            if want_figures:
                figures.ensemble_figure(ens.terminal_states, out / "ensemble.png")
            print(f"wrote {csv_path}")
        else:
            csv_path = _sim_trajectory(config, a, out, "trajectory", seed,
                                       want_figures)
            print(f"wrote {csv_path}")
        if config.get("portrait") and a is not None:
            portrait = rd.phase_portrait(a, int(config.get("portrait_grid", 16)))
            io.write_portrait_csv(out / "portrait.csv", portrait)
            print(f"wrote {out / 'portrait.csv'}")
    except CliError:
        raise
    except SimplexDynError as exc:
        raise CliError(EXIT_SIMULATION, f"simulation failed: {exc}")
    return EXIT_OK


def cmd_verify(args) -> int:
    config = _load_config(args.config)
    out = _outdir(args)
    suite_name = config.get("suite")
    if suite_name not in suites.SUITE_NAMES:
        raise CliError(EXIT_PARSE,
                       f"suite must be one of {', '.join(suites.SUITE_NAMES)}")
    kwargs = {}
    for key in ("seed", "n_paths", "n_pairs", "n_walks", "t_end", "dt",
                "grid_points", "m", "sigma0", "cases"):
        if key in config:
            kwargs[key] = config[key]
    report = suites.SUITES[suite_name](**kwargs)
    path = out / f"verify_{suite_name}.json"
    io.write_json(path, {**io.sidecar(config), **report})
    if bool(config.get("figures", True)):
        figures.suite_figure(report, out / f"verify_{suite_name}.png")
    for g in report["gates"]:
        mark = "PASS" if g["pass"] else "FAIL"
        print(f"[{mark}] {suite_name}/{g['name']}: statistic={g['statistic']:.6g} "
              f"{g['direction']} threshold={g['threshold']:.6g}")
    print(f"wrote {path}")
    return EXIT_OK if report["pass"] else EXIT_VERIFY


def cmd_ternary(args) -> int:
    config = _load_config(args.config)
    out = _outdir(args)
    src = config.get("input")
    if src is None:
        raise CliError(EXIT_PARSE, "ternary config needs an 'input' CSV path")
    src = Path(src)
    if not src.is_absolute():
        src = Path(args.config).parent / src
    if not src.exists():
        raise CliError(EXIT_PARSE, f"input file not found: {src}")
    with open(src) as fh:
        header = fh.readline().strip().split(",")
    try:
        if header[:1] == ["t"]:
            traj = io.read_trajectory_csv(src)
            if traj.n != 3:
                raise WrongDimension("ternary rendering needs exactly 3 types")
            svg = ternary.trajectory_svg(traj.states)
        else:
            portrait = io.read_portrait_csv(src)
            svg = ternary.portrait_svg(portrait)
    except WrongDimension as exc:
        raise CliError(EXIT_DIMENSION, str(exc))
    path = out / (config.get("name", src.stem) + ".svg")
    path.write_text(svg)
    io.write_json(out / (path.stem + ".json"), io.sidecar(config, source=str(src)))
    print(f"wrote {path}")
    return EXIT_OK


COMMANDS = {
    "matrix-analyze": cmd_matrix_analyze,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "ternary": cmd_ternary,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="simplexdyn",
        description="Replicator dynamics and diffusions on the simplex")
    parser.add_argument("--version", action="version",
                        version=f"simplexdyn {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", default=None, help="output directory")
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except SimplexDynError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION


if __name__ == "__main__":
    sys.exit(main())
