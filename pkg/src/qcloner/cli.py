"""Command-line interface: train, scan, test, permanent.

Angles are degrees in every flag, file, and printout; signal phases are
radians.  Exit codes: 0 success (or converged), 1 usage/config error,
2 training finished without convergence.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import datetime
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .fock import permanent
from .model import PhaseCovariantCloner, evaluate_test_set, scan_landscape
from .optics import GateParams

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_CONVERGED = 2


class CliError(Exception):
    """Usage or configuration problem; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="qcloner",
                     description="Train and probe a simulated linear-optical quantum cloner.")
    parser.add_argument("--version", action="version", version=f"qcloner {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="run the online training loop")
    train.add_argument("--config", help="INI config file (or a manifest.json to replay)")
    train.add_argument("--model", type=int, choices=(1, 2))
    train.add_argument("--noise", choices=("exact", "shot"))
    train.add_argument("--seed", type=int)
    train.add_argument("--counts", type=float, help="mean total coincidences per run (shot mode)")
    train.add_argument("--fixed-omega", type=float, help="ancilla angle in degrees (model 1)")
    train.add_argument("--max-evals", type=int)
    train.add_argument("--size-tol", type=float, help="simplex size tolerance in degrees")
    train.add_argument("--test-size", type=int)
    train.add_argument("--out-dir", default=".")

    scan = sub.add_parser("scan", help="exact cost landscape over the splitter angles")
    scan.add_argument("--phi-min", type=float, default=0.0)
    scan.add_argument("--phi-max", type=float, default=90.0)
    scan.add_argument("--theta-min", type=float, default=0.0)
    scan.add_argument("--theta-max", type=float, default=90.0)
    scan.add_argument("--step", type=float, default=1.0, help="grid step in degrees")
    scan.add_argument("--omega", type=float, default=0.0, help="fixed ancilla angle in degrees")
    scan.add_argument("--eta-samples", type=int, default=16)
    scan.add_argument("--out", default="grid.csv")

    test = sub.add_parser("test", help="evaluate fixed angles on a random test set")
    test.add_argument("--phi", type=float, required=True)
    test.add_argument("--theta", type=float, required=True)
    group = test.add_mutually_exclusive_group(required=True)
    group.add_argument("--omega", type=float, help="ancilla angle in degrees")
    group.add_argument("--model1", action="store_true",
                       help="use the model-1 fixed ancilla (see --fixed-omega)")
    test.add_argument("--fixed-omega", type=float, default=0.0)
    test.add_argument("--noise", choices=("exact", "shot"), default="exact")
    test.add_argument("--counts", type=float, default=400.0)
    test.add_argument("--seed", type=int, default=0)
    test.add_argument("--size", type=int, default=40, help="test-set size")
    test.add_argument("--json", help="also write the statistics to this JSON file")

    perm = sub.add_parser("permanent", help="permanent of a complex matrix from CSV")
    perm.add_argument("matrix_file", help="CSV rows of alternating re,im pairs")

    return parser


# -- train --------------------------------------------------------------

_EXPERIMENT_KEYS = {
    "model": int, "noise": str, "seed": int, "mean_counts": float,
    "fixed_omega_deg": float, "test_set_size": int,
}
_OPTIMIZER_KEYS = {
    "size_tolerance_deg": float, "max_evaluations": int, "reflection": float,
    "expansion": float, "contraction": float, "shrink": float,
}


def _load_config(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise CliError(f"config file not found: {path}")
    if p.suffix == ".json":
        with open(p) as fh:
            data = json.load(fh)
        return dict(data.get("config", data))

    ini = configparser.ConfigParser()
    try:
        read = ini.read(p)
    except configparser.Error as exc:
        raise CliError(f"{path}: {exc}") from exc
    if not read:
        raise CliError(f"config file not readable: {path}")
    out = {}
    for section, keys in (("experiment", _EXPERIMENT_KEYS), ("optimizer", _OPTIMIZER_KEYS)):
        if not ini.has_section(section):
            continue
        for key, value in ini.items(section):
            if key == "initial_simplex_deg":
                out[key] = _parse_simplex(value, where=f"{path} [{section}]")
                continue
            if key not in keys:
                raise CliError(f"{path} [{section}]: unknown key '{key}'")
            try:
                out[key] = keys[key](value)
            except ValueError as exc:
                raise CliError(f"{path} [{section}] {key}: {exc}") from exc
    return out


def _parse_simplex(text: str, where: str = "--simplex"):
    vertices = []
    for chunk in text.strip().split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            vertices.append([float(v) for v in chunk.split(",")])
        except ValueError as exc:
            raise CliError(f"{where}: bad simplex vertex '{chunk}'") from exc
    return vertices


def _cmd_train(args) -> int:
    params = {}
    if args.config:
        params.update(_load_config(args.config))
    for flag, key in (("model", "model"), ("noise", "noise"), ("seed", "seed"),
                      ("counts", "mean_counts"), ("fixed_omega", "fixed_omega_deg"),
                      ("max_evals", "max_evaluations"), ("size_tol", "size_tolerance_deg"),
                      ("test_size", "test_set_size")):
        value = getattr(args, flag)
        if value is not None:
            params[key] = value

    try:
        cloner = PhaseCovariantCloner(**params)
        cloner.fit()
    except (ValueError, TypeError) as exc:
        raise CliError(str(exc)) from exc

    stats = cloner.evaluate()
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    trace_path = out_dir / "trace.csv"
    summary_path = out_dir / "summary.json"
    manifest_path = out_dir / "manifest.json"

    cloner.trace_.write_csv(trace_path)
    summary = {
        "final_params": {
            "phi_deg": cloner.phi_deg_,
            "theta_deg": cloner.theta_deg_,
            "omega_deg": cloner.omega_deg_,
        },
        "mean_f1": stats["mean_f1"],
        "std_f1": stats["std_f1"],
        "mean_f2": stats["mean_f2"],
        "std_f2": stats["std_f2"],
        "converged": cloner.converged_,
        "evaluations": cloner.n_evaluations_,
    }
    with open(summary_path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    manifest = {
        "tool": "qcloner",
        "version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "seed": cloner.get_params()["seed"],
        "config": cloner.get_params(),
        "outputs": {
            "trace_csv": str(trace_path),
            "summary_json": str(summary_path),
        },
    }
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=list)
        fh.write("\n")

    print(f"learned angles (deg): phi={cloner.phi_deg_:.4f} "
          f"theta={cloner.theta_deg_:.4f} omega={cloner.omega_deg_:.4f}")
    print(f"test set: F1 = {stats['mean_f1']:.4f} +- {stats['std_f1']:.4f}, "
          f"F2 = {stats['mean_f2']:.4f} +- {stats['std_f2']:.4f}")
    print(f"converged: {cloner.converged_} after {cloner.n_evaluations_} evaluations")
    print(f"wrote {trace_path}, {summary_path}, {manifest_path}")
    return EXIT_OK if cloner.converged_ else EXIT_NOT_CONVERGED


# -- scan ---------------------------------------------------------------

def _grid_axis(lo: float, hi: float, step: float, name: str) -> np.ndarray:
    if hi <= lo:
        raise CliError(f"inverted or empty {name} range: {lo}..{hi}")
    if step <= 0:
        raise CliError("step must be positive")
    values = np.arange(lo, hi + step / 2, step)
    if values.size < 2:
        raise CliError(f"{name} axis has {values.size} grid point(s); need at least 2 "
                       "(reduce --step or widen the range)")
    return values


def _cmd_scan(args) -> int:
    phi = _grid_axis(args.phi_min, args.phi_max, args.step, "phi")
    theta = _grid_axis(args.theta_min, args.theta_max, args.step, "theta")
    if args.eta_samples < 1:
        raise CliError("--eta-samples must be positive")
    result = scan_landscape(phi, theta, omega_deg=args.omega, eta_samples=args.eta_samples)

    with open(args.out, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["phi_deg", "theta_deg", "cost"])
        for i, p in enumerate(result.phi_deg):
            for j, t in enumerate(result.theta_deg):
                writer.writerow([repr(float(p)), repr(float(t)), repr(float(result.cost[i, j]))])

    pmin, tmin = result.argmin_deg
    print(f"grid: {phi.size} x {theta.size} points, omega = {args.omega} deg")
    print(f"minimum cost {result.min_cost:.6f} at phi={pmin:.2f} theta={tmin:.2f} (deg)")
    print(f"max min-fidelity {result.max_min_fidelity:.6f} at "
          f"phi={result.argmax_fidelity_deg[0]:.2f} theta={result.argmax_fidelity_deg[1]:.2f}")
    print(f"wrote {args.out}")
    return EXIT_OK


# -- test ---------------------------------------------------------------

def _cmd_test(args) -> int:
    omega = args.fixed_omega if args.model1 else args.omega
    params = GateParams.from_degrees(args.phi, args.theta, omega)
    if args.size < 1:
        raise CliError("--size must be at least 1")
    stats = evaluate_test_set(params, noise=args.noise, mean_counts=args.counts,
                              n_instances=args.size, rng=np.random.default_rng(args.seed))
    print(f"angles (deg): phi={args.phi} theta={args.theta} omega={omega}")
    print(f"F1 = {stats['mean_f1']:.4f} +- {stats['std_f1']:.4f}")
    print(f"F2 = {stats['mean_f2']:.4f} +- {stats['std_f2']:.4f}")
    if stats["degenerate_std"]:
        print("note: single-instance test set; std reported as 0 by convention")
    if args.json:
        payload = dict(stats)
        payload["params_deg"] = {"phi": args.phi, "theta": args.theta, "omega": omega}
        with open(args.json, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"wrote {args.json}")
    return EXIT_OK


# -- permanent ----------------------------------------------------------

def _read_complex_matrix(path: str) -> np.ndarray:
    p = Path(path)
    if not p.is_file():
        raise CliError(f"matrix file not found: {path}")
    rows = []
    with open(p, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            cells = [c.strip() for c in row if c.strip() != ""]
            if not cells:
                continue
            if len(cells) % 2 != 0:
                raise CliError(f"{path}:{lineno}: odd number of values; "
                               "rows must hold re,im pairs")
            try:
                values = [float(c) for c in cells]
            except ValueError as exc:
                raise CliError(f"{path}:{lineno}: {exc}") from exc
            rows.append([complex(values[k], values[k + 1]) for k in range(0, len(values), 2)])
    if not rows:
        raise CliError(f"{path}: no matrix rows found")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise CliError(f"{path}: ragged rows; all rows must hold the same number of pairs")
    if len(rows) != width:
        raise CliError(f"{path}: matrix is {len(rows)}x{width}, must be square")
    return np.array(rows, dtype=np.complex128)


def _cmd_permanent(args) -> int:
    matrix = _read_complex_matrix(args.matrix_file)
    try:
        value = permanent(matrix)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    print(f"permanent: {value.real + 0.0!r} {value.imag + 0.0!r}")
    print(f"|permanent|^2: {abs(value) ** 2!r}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {
            "train": _cmd_train,
            "scan": _cmd_scan,
            "test": _cmd_test,
            "permanent": _cmd_permanent,
        }[args.command]
        return handler(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
