"""Command-line front end.

Subcommands:

* ``run <scenario.json> [--out DIR] [--sweep PARAM=a:b:n]`` integrates the
  scenario and writes a trajectory CSV plus a JSON report;
* ``list-systems [--json]`` prints the catalog of built-in systems;
* ``check <scenario.json> [--out DIR]`` runs the structure checks only.

Exit codes: 0 success, 2 degenerate implicit dynamics, 3 structure-check
failure, 4 unknown system, 5 malformed scenario.
"""

import argparse
import concurrent.futures
import json
import math
import sys
from pathlib import Path

import numpy as np

from .checks import CHECK_NAMES, run_checks
from .errors import DegenerateDynamicsError, DiracMechError, ScenarioError
from .solver import admissibility_report, integrate, project_initial
from .systems import CATALOG, build_problem, build_system

SCHEMA_VERSION = "diracmech/scenario-v1"

EXIT_OK = 0
EXIT_DEGENERATE = 2
EXIT_CHECK_FAILED = 3
EXIT_UNKNOWN_SYSTEM = 4
EXIT_MALFORMED = 5

_SCENARIO_KEYS = {"schema", "system", "params", "constraint", "formalism",
                  "initial", "time", "checks", "output", "seed",
                  "hamiltonian_source"}


class Scenario:
    """Parsed scenario document; ``from_dict``/``to_dict`` round-trip exactly."""

    def __init__(self, system, initial, time, formalism="lagrangian",
                 params=None, constraint=None, checks=(), output=None,
                 seed=0, hamiltonian_source="legendre"):
        self.system = system
        self.params = dict(params or {})
        self.constraint = constraint
        self.formalism = formalism
        self.initial = [float(v) for v in initial]
        self.time = dict(time)
        self.checks = list(checks)
        self.output = dict(output or {"trajectory": "trajectory.csv",
                                      "report": "report.json"})
        self.seed = int(seed)
        self.hamiltonian_source = hamiltonian_source

    @classmethod
    def from_dict(cls, doc):
        if not isinstance(doc, dict):
            raise ScenarioError("scenario document must be a JSON object")
        unknown = set(doc) - _SCENARIO_KEYS
        if unknown:
            raise ScenarioError(f"unknown scenario fields: {sorted(unknown)}")
        if doc.get("schema") != SCHEMA_VERSION:
            raise ScenarioError(
                f"scenario schema must be '{SCHEMA_VERSION}' (got {doc.get('schema')!r})"
            )
        for key in ("system", "initial", "time"):
            if key not in doc:
                raise ScenarioError(f"scenario is missing required field '{key}'")
        time = doc["time"]
        if not isinstance(time, dict) or not {"t0", "t1", "dt"} <= set(time):
            raise ScenarioError("time must carry t0, t1, and dt")
        if float(time["dt"]) <= 0.0:
            raise ScenarioError("time.dt must be positive")
        method = time.get("method", "rk4")
        if method not in ("rk4", "implicit-midpoint"):
            raise ScenarioError(f"unknown integration method '{method}'")
        formalism = doc.get("formalism", "lagrangian")
        if formalism not in ("lagrangian", "hamiltonian", "pmp"):
            raise ScenarioError(f"unknown formalism '{formalism}'")
        checks = doc.get("checks", [])
        bad = [c for c in checks if c not in CHECK_NAMES]
        if bad:
            raise ScenarioError(f"unknown checks: {bad}")
        constraint = doc.get("constraint")
        if constraint is not None and not isinstance(constraint, dict):
            raise ScenarioError("constraint must be an object with 1-based index lists")
        try:
            return cls(
                system=doc["system"], params=doc.get("params"),
                constraint=constraint, formalism=formalism,
                initial=doc["initial"],
                time={"t0": float(time["t0"]), "t1": float(time["t1"]),
                      "dt": float(time["dt"]), "method": method},
                checks=checks, output=doc.get("output"), seed=doc.get("seed", 0),
                hamiltonian_source=doc.get("hamiltonian_source", "legendre"),
            )
        except (TypeError, ValueError) as err:
            raise ScenarioError(f"scenario has non-numeric entries: {err}") from err

    def to_dict(self):
        doc = {
            "schema": SCHEMA_VERSION,
            "system": self.system,
            "formalism": self.formalism,
            "initial": list(self.initial),
            "time": dict(self.time),
        }
        if self.params:
            doc["params"] = dict(self.params)
        if self.constraint is not None:
            doc["constraint"] = dict(self.constraint)
        if self.checks:
            doc["checks"] = list(self.checks)
        doc["output"] = dict(self.output)
        if self.seed:
            doc["seed"] = self.seed
        if self.hamiltonian_source != "legendre":
            doc["hamiltonian_source"] = self.hamiltonian_source
        return doc

    @classmethod
    def load(cls, path):
        try:
            with open(path, "r", encoding="utf-8") as handle:
                doc = json.load(handle)
        except (OSError, json.JSONDecodeError) as err:
            raise ScenarioError(f"cannot read scenario {path}: {err}") from err
        return cls.from_dict(doc)


def scenario_schema():
    """Hand-maintained JSON schema of the scenario document."""
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": "diracmech scenario",
        "type": "object",
        "required": ["schema", "system", "initial", "time"],
        "additionalProperties": False,
        "properties": {
            "schema": {"const": SCHEMA_VERSION},
            "system": {"enum": sorted(CATALOG)},
            "params": {"type": "object", "additionalProperties": {"type": "number"}},
            "constraint": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "fiber": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                    "base": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                },
                "description": "1-based fiber/base indices pinned to zero",
            },
            "formalism": {"enum": ["lagrangian", "hamiltonian", "pmp"]},
            "initial": {"type": "array", "items": {"type": "number"}},
            "time": {
                "type": "object",
                "required": ["t0", "t1", "dt"],
                "properties": {
                    "t0": {"type": "number"},
                    "t1": {"type": "number"},
                    "dt": {"type": "number", "exclusiveMinimum": 0},
                    "method": {"enum": ["rk4", "implicit-midpoint"]},
                },
            },
            "checks": {"type": "array", "items": {"enum": sorted(CHECK_NAMES)}},
            "output": {
                "type": "object",
                "properties": {
                    "trajectory": {"type": "string"},
                    "report": {"type": "string"},
                },
            },
            "seed": {"type": "integer"},
            "hamiltonian_source": {"enum": ["legendre", "closed"]},
        },
    }


def _fmt(value):
    return f"{value:.17g}"


def write_trajectory_csv(path, trajectory, angle_state_indices=()):
    """Plain CSV: t, states, rates, monitors, wrapped copies of angle columns."""
    prob = trajectory.problem
    header = ["t"] + prob.state_labels + prob.rate_labels + sorted(trajectory.monitors)
    wrapped = [(i, prob.state_labels[i]) for i in angle_state_indices]
    header += [f"{label}_wrapped" for _, label in wrapped]
    lines = [",".join(header)]
    monitor_names = sorted(trajectory.monitors)
    for k in range(len(trajectory)):
        row = [_fmt(trajectory.times[k])]
        row += [_fmt(v) for v in trajectory.states[k]]
        row += [_fmt(v) for v in trajectory.rates[k]]
        row += [_fmt(trajectory.monitors[name][k]) for name in monitor_names]
        row += [_fmt(math.remainder(trajectory.states[k][i], 2 * math.pi) % (2 * math.pi))
                for i, _ in wrapped]
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _angle_state_indices(bundle, formalism):
    if formalism in ("lagrangian", "hamiltonian"):
        return tuple(bundle.angle_bases)
    return ()


def _execute(scenario, out_dir, check_only=False):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = {"schema": "diracmech/report-v1", "system": scenario.system,
              "formalism": scenario.formalism, "exit_code": EXIT_OK}
    report_path = out_dir / scenario.output.get("report", "report.json")

    def finish(code):
        report["exit_code"] = code
        report_path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n",
                               encoding="utf-8")
        return code

    if scenario.system not in CATALOG:
        print(f"error: unknown system '{scenario.system}'", file=sys.stderr)
        return EXIT_UNKNOWN_SYSTEM
    spec = CATALOG[scenario.system]
    if scenario.formalism not in spec.formalisms:
        print(
            f"error: system {scenario.system} supports formalisms {spec.formalisms}",
            file=sys.stderr,
        )
        return EXIT_MALFORMED

    try:
        bundle = build_system(scenario.system, scenario.params, scenario.constraint)
        problem = build_problem(bundle, scenario.formalism,
                                hamiltonian_source=scenario.hamiltonian_source,
                                seed=scenario.seed)
    except ScenarioError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_MALFORMED

    checks = run_checks(bundle, scenario.checks, seed=scenario.seed)
    report["checks"] = _jsonable(checks)
    failed = [name for name, result in checks.items() if not result.get("passed", True)]
    if failed:
        print(f"structure checks failed: {failed}", file=sys.stderr)
        return finish(EXIT_CHECK_FAILED)
    if check_only:
        return finish(EXIT_OK)

    initial = list(scenario.initial)
    if bundle.time_dependent:
        initial = [scenario.time["t0"]] + initial
    if len(initial) != problem.state_dim:
        print(
            f"error: initial state has length {len(initial)}, "
            f"problem expects {problem.state_dim}",
            file=sys.stderr,
        )
        return EXIT_MALFORMED

    t0, t1, dt = scenario.time["t0"], scenario.time["t1"], scenario.time["dt"]
    try:
        state0 = project_initial(problem, np.asarray(initial, dtype=float), t=t0)
        trajectory = integrate(problem, state0, t0, t1, dt,
                               method=scenario.time.get("method", "rk4"))
    except DegenerateDynamicsError as err:
        report["degeneracy"] = {
            "message": str(err),
            "singular_values": [float(s) for s in np.atleast_1d(err.singular_values)]
            if err.singular_values is not None else None,
        }
        print(f"degenerate implicit dynamics: {err}", file=sys.stderr)
        return finish(EXIT_DEGENERATE)

    csv_path = out_dir / scenario.output.get("trajectory", "trajectory.csv")
    write_trajectory_csv(csv_path, trajectory,
                         _angle_state_indices(bundle, scenario.formalism))

    report["newton"] = {
        "max_iterations": int(np.max(trajectory.newton_iterations)),
        "max_residual": float(np.max(trajectory.residual_norms)),
    }
    if problem.velocity_pair is not None:
        adm = admissibility_report(bundle.dirac, trajectory)
        report["admissibility"] = {"max": adm.max}
    if "energy" in trajectory.monitors:
        report["energy_drift"] = trajectory.monitor_drift("energy")
    elif "hamiltonian" in trajectory.monitors and not bundle.time_dependent:
        report["energy_drift"] = trajectory.monitor_drift("hamiltonian")
    report["trajectory"] = {"path": csv_path.name, "steps": len(trajectory) - 1}
    return finish(EXIT_OK)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj]
    return obj


def _parse_sweep(spec):
    try:
        name, rest = spec.split("=", 1)
        a, b, count = rest.split(":")
        return name, float(a), float(b), int(count)
    except ValueError as err:
        raise ScenarioError(f"malformed sweep '{spec}', expected PARAM=a:b:n") from err


def cmd_run(args):
    scenario = Scenario.load(args.scenario)
    if args.sweep is None:
        return _execute(scenario, args.out)
    name, lo, hi, count = _parse_sweep(args.sweep)
    if count < 1:
        raise ScenarioError("sweep needs at least one sample")
    values = np.linspace(lo, hi, count)
    codes = []
    with concurrent.futures.ThreadPoolExecutor() as pool:
        futures = []
        for value in values:
            doc = scenario.to_dict()
            doc.setdefault("params", {})[name] = float(value)
            sub = Scenario.from_dict(doc)
            sub_dir = Path(args.out) / f"{name}={value:.6g}"
            futures.append(pool.submit(_execute, sub, sub_dir))
        for future in futures:
            codes.append(future.result())
    return max(codes)


def cmd_list_systems(args):
    if args.json:
        doc = {
            "scenario_schema": scenario_schema(),
            "systems": [
                {
                    "name": spec.name,
                    "description": spec.description,
                    "params": spec.params,
                    "formalisms": list(spec.formalisms),
                    "initial": spec.initial_doc,
                }
                for spec in CATALOG.values()
            ],
        }
        print(json.dumps(doc, indent=2, sort_keys=True))
        return EXIT_OK
    for spec in CATALOG.values():
        print(f"{spec.name} -- {spec.description}")
        params = ", ".join(f"{k}={v:g}" for k, v in spec.params.items())
        print(f"    params: {params}")
        print(f"    formalisms: {', '.join(spec.formalisms)}")
        for formalism, doc in spec.initial_doc.items():
            print(f"    initial [{formalism}]: {doc}")
    return EXIT_OK


def cmd_check(args):
    scenario = Scenario.load(args.scenario)
    return _execute(scenario, args.out, check_only=True)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="diracmech",
        description="integrate implicit mechanics scenarios and check their structures",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate a scenario")
    p_run.add_argument("scenario")
    p_run.add_argument("--out", default=".", help="output directory")
    p_run.add_argument("--sweep", default=None, metavar="PARAM=a:b:n",
                       help="fan one parameter over n values")
    p_run.set_defaults(func=cmd_run)

    p_list = sub.add_parser("list-systems", help="print the system catalog")
    p_list.add_argument("--json", action="store_true",
                        help="machine-readable catalog and scenario schema")
    p_list.set_defaults(func=cmd_list_systems)

    p_check = sub.add_parser("check", help="run structure checks only")
    p_check.add_argument("scenario")
    p_check.add_argument("--out", default=".", help="output directory")
    p_check.set_defaults(func=cmd_check)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_MALFORMED
    except DiracMechError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
