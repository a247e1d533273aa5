"""Command-line front end.

    cavitylab steady|sweep|compare|noise-check|superpose --config PATH [--out PATH] [--seed N]

Results go to stdout (or ``--out``), diagnostics to stderr. Exit codes:
0 success, 1 numerical failure, 2 bad config, 3 truncation guard tripped,
4 noise-check acceptance failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

from .analytic import ModeStats, commutator_formula, superposition_commutator, superposition_mean_photons
from .engines import ENGINES, SteadyStateReport, run_engine
from .errors import CavityLabError, DomainError, TruncationError
from .lindblad import two_mode_superposition_check
from .model import ModelParams, TruncationSpec, parse_config, regime_report
from .stochastic import estimate_correlation

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_CONFIG = 2
EXIT_TRUNCATION = 3
EXIT_NOISE_FAIL = 4

CSV_HEADER = (
    "axis_value", "engine", "eta_a", "eta_b", "sigma_re", "aa_dag",
    "adag_a", "nbar", "commutator", "edge_population", "converged",
)
ORACLE_UNITY_TOL = 1e-6
AXES = ("epsilon", "g", "kappa")


def _read_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read config {path}: {exc}") from exc


def _engines(raw: Any, default: Sequence[str]) -> tuple[str, ...]:
    if raw is None:
        return tuple(default)
    if not isinstance(raw, list) or not raw or not all(isinstance(e, str) for e in raw):
        raise DomainError("engines must be a non-empty list of strings")
    unknown = [e for e in raw if e not in ENGINES]
    if unknown:
        raise DomainError(f"unknown engines: {', '.join(unknown)}")
    # canonical order, duplicates dropped
    return tuple(e for e in ENGINES if e in raw)


def _params_dict(p: ModelParams) -> dict[str, float]:
    return {"g": p.g, "kappa": p.kappa, "epsilon": p.epsilon, "gamma_c": p.gamma_c}


def _dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        _atomic_write(Path(out), text)


# -- steady / compare -------------------------------------------------------

def cmd_steady(config: Any) -> dict[str, Any]:
    cfg = parse_config(config, allowed_extra=("engines",))
    engines = _engines(cfg.extra.get("engines"), ENGINES)
    p = cfg.params
    reports = {name: run_engine(name, p, cfg.truncation).to_dict() for name in engines}
    return {"params": _params_dict(p), "regime": regime_report(p).value, "engines": reports}


def _diff(x: Any, y: Any) -> float | str:
    if isinstance(x, str) or isinstance(y, str):
        return "decoupled"
    return x - y


def cmd_compare(config: Any) -> dict[str, Any]:
    cfg = parse_config(config, allowed_extra=("engines",))
    engines = _engines(cfg.extra.get("engines"), ENGINES)
    if set(engines) != set(ENGINES):
        raise DomainError("compare needs all three engines")
    p = cfg.params
    reports = {name: run_engine(name, p, cfg.truncation).to_dict() for name in ENGINES}
    an, mo, orc = reports["analytic"], reports["moments"], reports["oracle"]
    discrepancy = {
        f"{other}_minus_analytic": {
            key: _diff(reports[other][key], an[key])
            for key in ("nbar", "eta_a", "commutator_expectation")
        }
        for other in ("moments", "oracle")
    }
    flags = {
        "analytic_commutator_differs_from_one": an["commutator_expectation"] != 1.0,
        "oracle_commutator_is_one": abs(orc["commutator_expectation"] - 1.0) <= ORACLE_UNITY_TOL,
    }
    flags["paper_vs_exact_gap"] = (
        flags["analytic_commutator_differs_from_one"] and flags["oracle_commutator_is_one"]
    )
    return {
        "params": _params_dict(p),
        "regime": regime_report(p).value,
        "engines": reports,
        "discrepancy": discrepancy,
        "flags": flags,
    }


def format_compare_table(result: dict[str, Any]) -> str:
    keys = ("eta_a", "sigma_re", "aa_dag", "adag_a", "nbar", "commutator_expectation")
    lines = [f"{'quantity':<24}" + "".join(f"{e:>18}" for e in ENGINES)]
    for key in keys:
        cells = []
        for e in ENGINES:
            v = result["engines"][e][key]
            cells.append(f"{v:>18}" if isinstance(v, str) else f"{v:>18.10g}")
        lines.append(f"{key:<24}" + "".join(cells))
    return "\n".join(lines) + "\n"


# -- sweep -------------------------------------------------------------------

@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple[float, ...]
    base: ModelParams
    engines: tuple[str, ...]
    truncation: TruncationSpec

    def points(self) -> list[ModelParams]:
        return [self.base.replace(**{self.axis: v}) for v in self.values]


def parse_sweep(config: Any) -> SweepSpec:
    if not isinstance(config, dict):
        raise DomainError("config must be a JSON object")
    cfg = parse_config(config, allowed_extra=("axis", "values", "engines"))
    axis = cfg.extra.get("axis")
    if axis not in AXES:
        raise DomainError(f"axis must be one of {AXES}, got {axis!r}")
    values = cfg.extra.get("values")
    if not isinstance(values, list) or not values:
        raise DomainError("values must be a non-empty list")
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
        raise DomainError("values must be numbers")
    vals = tuple(float(v) for v in values)
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise DomainError("values must be strictly increasing")
    spec = SweepSpec(axis, vals, cfg.params, _engines(cfg.extra.get("engines"), ("analytic",)), cfg.truncation)
    spec.points()  # every point must validate
    return spec


def _fmt(x: Any) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, bool):
        return "true" if x else "false"
    return f"{x + 0.0:.12g}"  # + 0.0 folds -0.0 into 0


def _row(axis_value: float, r: SteadyStateReport) -> list[str]:
    if r.decoupled:
        atomic = ["decoupled"] * 3
    else:
        atomic = [_fmt(r.eta_a), _fmt(r.eta_b), _fmt(complex(r.sigma).real)]  # type: ignore[arg-type]
    return [
        _fmt(axis_value), r.engine, *atomic, _fmt(r.aa_dag), _fmt(r.adag_a), _fmt(r.nbar),
        _fmt(r.commutator_expectation), _fmt(r.edge_population), _fmt(r.converged),
    ]


def _discrepancy_row(axis_value: float, orc: SteadyStateReport, an: SteadyStateReport) -> list[str]:
    eta = "decoupled" if (orc.decoupled or an.decoupled) else _fmt(orc.eta_a - an.eta_a)  # type: ignore[operator]
    return [
        _fmt(axis_value), "oracle-analytic", eta, "", "", "", "",
        _fmt(orc.nbar - an.nbar), _fmt(orc.commutator_expectation - an.commutator_expectation), "", "",
    ]


def _threads() -> int:
    raw = os.environ.get("CAVITYLAB_THREADS")
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError as exc:
        raise DomainError(f"CAVITYLAB_THREADS must be an integer, got {raw!r}") from exc


def cmd_sweep(spec: SweepSpec) -> str:
    """Run every engine at every axis value and return the CSV text."""

    def point(p: ModelParams) -> dict[str, SteadyStateReport]:
        return {e: run_engine(e, p, spec.truncation) for e in spec.engines}

    points = spec.points()
    workers = min(_threads(), len(points))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(point, points))  # map preserves axis order
    else:
        results = [point(p) for p in points]

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for value, reports in zip(spec.values, results):
        for e in spec.engines:
            writer.writerow(_row(value, reports[e]))
        if "oracle" in reports and "analytic" in reports:
            writer.writerow(_discrepancy_row(value, reports["oracle"], reports["analytic"]))
    return buf.getvalue()


# -- noise-check -------------------------------------------------------------

NOISE_DEFAULTS = {"dt": 1e-3, "steps": 10_000, "trials": 200}


def cmd_noise_check(config: Any, seed: int = 0) -> tuple[dict[str, Any], bool]:
    cfg = parse_config(config, allowed_extra=("dt", "steps", "trials", "seed"))
    opts = {**NOISE_DEFAULTS, **cfg.extra}
    for key in ("steps", "trials"):
        if isinstance(opts[key], bool) or not isinstance(opts[key], int) or opts[key] < 1:
            raise DomainError(f"{key} must be a positive integer, got {opts[key]!r}")
    seed = int(opts.get("seed", seed))
    p = cfg.params
    est = estimate_correlation(p, dt=float(opts["dt"]), steps=opts["steps"], trials=opts["trials"], seed=seed)
    target = p.kappa / 2.0
    passed = abs(est.estimate - target) <= 3.0 * est.stderr
    report = {
        "params": _params_dict(p),
        "dt": float(opts["dt"]),
        "steps": opts["steps"],
        "trials": opts["trials"],
        "seed": seed,
        "target": target,
        "midpoint": {"estimate": est.estimate, "stderr": est.stderr},
        "ito": {"estimate": est.ito, "stderr": est.ito_stderr},
        "endpoint": {"estimate": est.endpoint, "stderr": est.endpoint_stderr},
        "pass": passed,
    }
    return report, passed


# -- superpose ---------------------------------------------------------------

def _amplitude(raw: Any) -> complex:
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return complex(raw)
    if isinstance(raw, list) and len(raw) == 2 and all(isinstance(v, (int, float)) for v in raw):
        return complex(raw[0], raw[1])
    raise DomainError(f"amplitude must be a number or [re, im], got {raw!r}")


DEFAULT_SUPERPOSE_CASES = [
    {"label": "zero_mean", "a": 0, "b": 0},
    {"label": "equal_real", "a": 0.3, "b": 0.3},
    {"label": "one_and_i", "a": 1, "b": [0, 1]},
]


def cmd_superpose(config: Any) -> tuple[dict[str, Any], bool]:
    if not isinstance(config, dict):
        raise DomainError("config must be a JSON object")
    allowed = {"n_max", "cases", "g", "kappa", "epsilon"}
    unknown = sorted(set(config) - allowed)
    if unknown:
        raise DomainError(f"unknown config keys: {', '.join(unknown)}")
    spec = TruncationSpec(n_max=config.get("n_max", 3))
    raw_cases = config.get("cases", DEFAULT_SUPERPOSE_CASES)
    if not isinstance(raw_cases, list) or not raw_cases:
        raise DomainError("cases must be a non-empty list")
    cases = []
    for i, c in enumerate(raw_cases):
        if not isinstance(c, dict) or set(c) - {"label", "a", "b"} or not {"a", "b"} <= set(c):
            raise DomainError(f"case {i} must have keys a, b and optional label")
        cases.append((str(c.get("label", f"case{i}")), _amplitude(c["a"]), _amplitude(c["b"])))

    mode_commutator = 1.0
    if any(k in config for k in ("g", "kappa", "epsilon")):
        p = ModelParams(config.get("g"), config.get("kappa"), config.get("epsilon"))
        mode_commutator = commutator_formula(p)

    check = two_mode_superposition_check(spec, tuple(cases))
    rows = []
    consistent = True
    for case in check.cases:
        sa = ModeStats(case.alpha, abs(case.alpha) ** 2, mode_commutator)
        sb = ModeStats(case.beta, abs(case.beta) ** 2, 1.0)
        formula = superposition_mean_photons(sa, sb)
        consistent &= formula.additive == case.additive
        rows.append({
            "label": case.label,
            "a": [case.alpha.real, case.alpha.imag],
            "b": [case.beta.real, case.beta.imag],
            "formula_cross_term": formula.cross_term,
            "formula_mean_photons": formula.value,
            "formula_additive": formula.additive,
            "matrix_cross_term": case.cross_term,
            "matrix_factorized_cross_term": case.factorized_cross_term,
            "matrix_additive": case.additive,
        })
    ok = check.exact_identity and consistent
    report = {
        "n_max": spec.n_max,
        "commutator_identity_exact": check.exact_identity,
        "commutator_identity_float_deviation": check.float_deviation,
        "formula_commutator_sum": superposition_commutator(
            ModeStats(0j, 0.0, mode_commutator), ModeStats(0j, 0.0, 1.0)
        ),
        "cases": rows,
        "pass": ok,
    }
    return report, ok


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cavitylab", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=("steady", "sweep", "compare", "noise-check", "superpose"))
    ap.add_argument("--config", required=True, help="JSON config file")
    ap.add_argument("--out", default=None, help="write results here instead of stdout")
    ap.add_argument("--seed", type=int, default=0, help="master RNG seed (noise-check)")
    ap.add_argument("--table", action="store_true", help="compare: print a text table instead of JSON")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if not 0 <= args.seed < 2**64:
        print("error: --seed must fit in an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_CONFIG
    try:
        config = _read_json(args.config)
        if args.command == "steady":
            _emit(_dumps(cmd_steady(config)), args.out)
        elif args.command == "compare":
            result = cmd_compare(config)
            _emit(format_compare_table(result) if args.table else _dumps(result), args.out)
        elif args.command == "sweep":
            _emit(cmd_sweep(parse_sweep(config)), args.out)
        elif args.command == "noise-check":
            report, passed = cmd_noise_check(config, seed=args.seed)
            _emit(_dumps(report), args.out)
            if not passed:
                print("noise-check: midpoint estimate outside 3 standard errors of kappa/2", file=sys.stderr)
                return EXIT_NOISE_FAIL
        elif args.command == "superpose":
            report, ok = cmd_superpose(config)
            _emit(_dumps(report), args.out)
            if not ok:
                print("superpose: identity or cross-term check failed", file=sys.stderr)
                return EXIT_NUMERICAL
    except DomainError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TruncationError as exc:
        print(f"truncation error: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except CavityLabError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (TypeError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
