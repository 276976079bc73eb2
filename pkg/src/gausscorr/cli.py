"""Command-line front end: ``gausscorr <subcommand> [options]``.

Every run is described by a ``RunConfig``.  Values come from three layers,
later ones winning: built-in defaults, an optional ``--config`` file of
``key = value`` lines (keys are flag names without the leading dashes), and
the command line.  Each emitted file embeds the full configuration and the
tool version; nothing time-dependent is written, so equal configurations give
byte-identical output.

Exit status: 0 when every asserted check passes, 1 when a check fails (a JSON
failure summary goes to stderr), 2 for usage errors, 3 for internal errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from . import extremal as ex
from . import gauss_core as gc
from .errors import DomainError, GaussCorrError, InfeasibleError, OutOfScopeError
from .polygon import ConvexPolygon
from .profiles import ConcaveProfile, load_profile, random_profile
from .quadrature import DEFAULT_TOL
from .reduction import linearize
from .verify import (GaussianVector, _clean, mc_generator, search_problem2, sidak_instance,
                     verify_sidak, verify_theorem1, verify_theorem1a)

TOOL = "gausscorr"
DEFAULT_SEED = 20240917
OUT_DIR_ENV = "GAUSSCORR_OUT_DIR"

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3

BOUNDS_COLUMNS = ("x", "err_upper_new", "err_upper_komatsu", "err_lower")
LINEAR_TOL = 1e-8

SUBCOMMANDS = ("bounds-table", "check-props", "linearize", "scan-extremal", "final-case",
               "verify-theorem1", "verify-theorem1a", "verify-sidak", "search-problem2")
DEFAULT_FORMAT = {"bounds-table": "csv", "verify-theorem1": "jsonl", "verify-theorem1a": "jsonl",
                  "verify-sidak": "jsonl"}
DEFAULT_TRIALS = {"verify-theorem1": 50, "verify-theorem1a": 3, "verify-sidak": 5,
                  "search-problem2": 200}
DEFAULT_GRIDS = {
    "bounds-table": {"x": list(gc.TABLE_XS)},
    "scan-extremal": {"m": list(ex.DEFAULT_M), "c": list(ex.DEFAULT_C), "w": list(ex.DEFAULT_W),
                      "n": [ex.GRID_POINTS]},
    "final-case": {"m": [0.5, 1.0, 2.0], "h": [-2.0, -1.0, -0.5], "delta": [-0.2, 0.1, 0.5, 1.0],
                   "stretch": [0.0, 0.5, 2.0], "h_pos": [0.0, 0.5, 1.0]},
    "verify-theorem1": {"w": list(ex.DEFAULT_W)},
}


class UsageError(Exception):
    """Bad flags, config entries or input files."""


@dataclass
class RunConfig:
    """Everything that determines a run's output."""

    subcommand: str
    quadrature_tol: float = DEFAULT_TOL
    seed: int = DEFAULT_SEED
    trials: int | None = None
    out: str | None = None
    format: str = "json"
    grids: dict = field(default_factory=dict)
    profile: str | None = None
    polygon: str | None = None
    instance: str | None = None
    w: float | None = None
    direction: list[float] | None = None
    interval: list[float] | None = None
    mc: int | None = None
    mc_check: int = 0
    top: int = 20
    workers: int = 1
    hypothesis: str = "centroid"
    check_reference: bool = False

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise UsageError(f"unknown subcommand {self.subcommand!r}")
        if not self.quadrature_tol > 0.0:
            raise UsageError("--tol must be > 0")
        if self.trials is not None and self.trials < 1:
            raise UsageError("--trials must be >= 1")
        if self.mc is not None and self.mc < 1:
            raise UsageError("--mc must be >= 1")
        if self.workers < 1:
            raise UsageError("--workers must be >= 1")
        if self.format not in ("csv", "json", "jsonl"):
            raise UsageError(f"unknown format {self.format!r}")

    def grid(self, key: str) -> list:
        return list(self.grids.get(key, DEFAULT_GRIDS.get(self.subcommand, {}).get(key, [])))

    def to_dict(self) -> dict:
        return _clean(asdict(self))


@dataclass
class Outcome:
    """What a subcommand produced: records to emit, a summary and failed checks."""

    records: list[dict]
    summary: dict
    failures: list[dict]
    columns: tuple[str, ...] | None = None


# --- argument parsing -------------------------------------------------------------------

def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _pair(text: str) -> list[float]:
    vals = _floats(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}")
    return vals


def parse_grid_spec(text: str) -> dict[str, list[float]]:
    """``"m=0,0.5;c=-1,1;n=9"`` to ``{"m": [0, 0.5], "c": [-1, 1], "n": [9]}``."""
    grids: dict[str, list[float]] = {}
    for part in str(text).split(";"):
        if not part.strip():
            continue
        key, sep, values = part.partition("=")
        if not sep or not key.strip():
            raise argparse.ArgumentTypeError(f"grid entry {part!r} is not key=values")
        vals = _floats(values)
        if not vals:
            raise argparse.ArgumentTypeError(f"grid entry {key.strip()!r} has no values")
        grids[key.strip()] = vals
    return grids


def _bool(text: str) -> bool:
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"expected a boolean, got {text!r}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--config", help="key = value file mirroring the flags; flags override it")
    g.add_argument("--tol", type=float, default=DEFAULT_TOL, help="quadrature tolerance (default 1e-10)")
    g.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"master seed (default {DEFAULT_SEED})")
    g.add_argument("--trials", type=int, help="number of random instances")
    g.add_argument("--out", help=f"output file; default is ${OUT_DIR_ENV}/<subcommand>.<format> or stdout")
    g.add_argument("--format", choices=("csv", "json", "jsonl"))
    g.add_argument("--grid-spec", type=parse_grid_spec, help="grids as 'key=v1,v2;key=v'")
    g.add_argument("--workers", type=int, default=1, help="threads for Monte Carlo chunks")

    parser = _Parser(prog=TOOL, description="Gaussian tail bounds and correlation-inequality checks.")
    parser.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("bounds-table", parents=[common], help="relative errors of the Mills ratio bounds")
    p.add_argument("--check-reference", action="store_true",
                   help="fail unless the 2-digit rounding matches the published table")
    sub.add_parser("check-props", parents=[common], help="Mills ratio and hazard rate invariants")
    p = sub.add_parser("linearize", parents=[common], help="mass- and moment-matching line for a profile")
    p.add_argument("--profile", required=True, help="profile JSON file")
    p.add_argument("--interval", type=_pair, help="a,b (default -1,1)")
    sub.add_parser("scan-extremal", parents=[common], help="monotonicity scans of extremal regions")
    sub.add_parser("final-case", parents=[common], help="layer-average checks for tilted half-planes")

    p = sub.add_parser("verify-theorem1", parents=[common], help="profile or polygon against centred layers")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--profile", help="profile JSON file")
    src.add_argument("--polygon", help="polygon JSON file")
    p.add_argument("--w", type=float, help="layer weight (default: the w grid)")
    p.add_argument("--direction", type=_pair, help="slicing direction for polygons, e.g. 1,0")

    p = sub.add_parser("verify-theorem1a", parents=[common], help="Gaussian-vector form by Monte Carlo")
    p.add_argument("--instance", help="JSON with covariance, thresholds, y_index and optional mean")
    p.add_argument("--w", type=float, help="band probability (default 0.5)")
    p.add_argument("--mc", type=int, help="samples per instance (default 1e5)")
    p.add_argument("--hypothesis", choices=("centroid", "conditional"), default="centroid")

    p = sub.add_parser("verify-sidak", parents=[common], help="symmetric layers by Monte Carlo")
    p.add_argument("--instance", help="JSON with directions and radii")
    p.add_argument("--mc", type=int, help="samples per instance (default 1e6)")

    p = sub.add_parser("search-problem2", parents=[common], help="random centroid-matched polygon pairs")
    p.add_argument("--mc-check", type=int, default=0, help="Monte Carlo re-check of the lowest margins")
    p.add_argument("--top", type=int, default=20, help="instances kept in the report")
    return parser


# flags whose values may start with "-" (negative numbers, comma lists)
_VALUE_FLAGS = ("--interval", "--direction", "--grid-spec", "--w", "--tol")


def _join_values(argv: list[str]) -> list[str]:
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def _apply_config_file(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not args.config:
        return args
    subparser = parser._subparsers._group_actions[0].choices[args.subcommand]
    actions = {a.dest: a for a in subparser._actions}
    try:
        with open(args.config, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from None
    defaults = {}
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lstrip("-").replace("-", "_")
        if not sep or key not in actions or key in ("config", "help"):
            raise UsageError(f"{args.config}:{n}: unknown or malformed entry {line!r}")
        action, value = actions[key], value.strip()
        if isinstance(action, argparse._StoreTrueAction):
            defaults[key] = _bool(value)
        else:
            try:
                defaults[key] = action.type(value) if action.type else value
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise UsageError(f"{args.config}:{n}: {exc}") from None
            if action.choices and defaults[key] not in action.choices:
                raise UsageError(f"{args.config}:{n}: {value!r} not in {list(action.choices)}")
    subparser.set_defaults(**defaults)
    # the profile flag is required for linearize, but a config file may supply it
    if "profile" in defaults:
        actions["profile"].required = False
    return parser.parse_args(argv)


def config_from_args(args: argparse.Namespace) -> RunConfig:
    get = lambda name, default=None: getattr(args, name, default)  # noqa: E731
    return RunConfig(
        subcommand=args.subcommand, quadrature_tol=args.tol, seed=args.seed, trials=args.trials,
        out=args.out, format=args.format or DEFAULT_FORMAT.get(args.subcommand, "json"),
        grids=args.grid_spec or {}, profile=get("profile"), polygon=get("polygon"),
        instance=get("instance"), w=get("w"), direction=get("direction"), interval=get("interval"),
        mc=get("mc"), mc_check=get("mc_check", 0), top=get("top", 20), workers=args.workers,
        hypothesis=get("hypothesis", "centroid"), check_reference=get("check_reference", False))


# --- input files ------------------------------------------------------------------------

def _read_json(path: str, what: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {what} file {path!r}: {exc}") from None


def _load_profile(path: str) -> ConcaveProfile:
    try:
        return load_profile(path)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, DomainError) as exc:
        raise UsageError(f"cannot read profile file {path!r}: {exc}") from None


def _load_polygon(path: str) -> ConvexPolygon:
    try:
        return ConvexPolygon.from_dict(_read_json(path, "polygon"))
    except (KeyError, TypeError, DomainError) as exc:
        raise UsageError(f"bad polygon file {path!r}: {exc}") from None


def _seed_for(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


# --- subcommands -------------------------------------------------------------------------

def run_bounds_table(cfg: RunConfig) -> Outcome:
    rows = gc.error_table(cfg.grid("x"))
    records = [{"x": r.x, "err_upper_new": r.err_upper_new,
                "err_upper_komatsu": r.err_upper_komatsu, "err_lower": r.err_lower} for r in rows]
    failures = []
    if cfg.check_reference:
        for r in rows:
            ref = gc.REFERENCE_TABLE.get(r.x)
            if ref is None:
                continue
            for col, got, want in zip(BOUNDS_COLUMNS[1:], r.rounded(), ref):
                if got != want:
                    failures.append({"check": "reference", "x": r.x, "column": col,
                                     "rounded": gc.format_sig(got), "reference": gc.format_sig(want)})
    return Outcome(records, {"rows": len(rows), "reference_checked": cfg.check_reference},
                   failures, BOUNDS_COLUMNS)


def run_check_props(cfg: RunConfig) -> Outcome:
    suites = {"sandwich": gc.check_sandwich(),
              "differential": gc.check_mills_ode(),
              "differential_wide": gc.check_mills_ode(np.linspace(-8.0, 60.0, 6801), normalise=True),
              "hazard": gc.check_hazard()}
    records = [{"suite": name, **asdict(chk)} for name, checks in suites.items() for chk in checks]
    failures = [r for r in records if not r["passed"]]
    return Outcome(records, {"checks": len(records), "failed": len(failures)}, failures)


def run_linearize(cfg: RunConfig) -> Outcome:
    profile = _load_profile(cfg.profile)
    a, b = cfg.interval or (-1.0, 1.0)
    res = linearize(profile, (a, b), cfg.quadrature_tol)
    rec = res.to_dict()
    checks = {"mass_residual": abs(res.mass_residual) <= LINEAR_TOL,
              "moment_residual": abs(res.moment_residual) <= LINEAR_TOL,
              "endpoints": res.endpoint_ok, "slopes": res.slope_ok,
              "intersections": res.nonlinear_ok}
    rec["checks"] = checks
    failures = [{"check": k} for k, ok in checks.items() if not ok]
    return Outcome([rec], {"m0": res.m0, "h0": res.h0}, failures)


def run_scan_extremal(cfg: RunConfig) -> Outcome:
    n = int(cfg.grid("n")[0]) if cfg.grid("n") else ex.GRID_POINTS
    summary = ex.run_scans(cfg.grid("m"), cfg.grid("c"), cfg.grid("w"), n)
    d = summary.to_dict()
    records = d.pop("reports")
    failures = [{"check": r["label"], "params": r["params"]} for r in records if not r["passed"]]
    if not summary.passed and not failures:
        failures.append({"check": "summary", **{k: v for k, v in d.items() if k != "passed"}})
    return Outcome(records, d, failures)


def run_final_case(cfg: RunConfig) -> Outcome:
    records, failures, skipped = [], [], 0
    for m in cfg.grid("m"):
        for h in cfg.grid("h"):
            if not (m > 0.0 and h < 0.0):
                raise UsageError("final-case grids need m > 0 and h < 0")
            x0 = ex.final_case_geometry(m, h, 0.0).x0
            for delta in cfg.grid("delta"):
                a = x0 - delta
                for stretch in cfg.grid("stretch"):
                    b = max(2.0 * x0 - a, a) + stretch
                    if b <= a:
                        b = a + max(stretch, 0.5)
                    try:
                        rep = ex.final_case_check(m, h, a, b)
                    except OutOfScopeError:
                        skipped += 1
                        continue
                    rec = {"check": "layer-average", **rep.to_dict()}
                    records.append(rec)
                    if not rep.passed:
                        failures.append({"check": "layer-average", "m": m, "h": h, "a": a, "b": b})
        for h in cfg.grid("h_pos"):
            d_grid = np.linspace(0.05, 6.0, 120)
            rep = ex.halfplane_average_check(m, h, d_grid)
            records.append({"check": "average-decrease", "m": m, "h": h, "passed": rep.passed,
                            "min_step": rep.min_step})
            if not rep.passed:
                failures.append({"check": "average-decrease", "m": m, "h": h})
    return Outcome(_clean(records), {"checks": len(records), "skipped": skipped,
                                     "failed": len(failures)}, failures)


def _report_failures(reports) -> list[dict]:
    return [{"status": r.status, "margin": r.margin, "instance": r.instance}
            for r in reports if r.status == "fail"]


def run_verify_theorem1(cfg: RunConfig) -> Outcome:
    weights = [cfg.w] if cfg.w is not None else cfg.grid("w")
    bodies: list = []
    if cfg.profile:
        bodies = [_load_profile(cfg.profile)]
    elif cfg.polygon:
        bodies = [_load_polygon(cfg.polygon)]
    else:
        trials = cfg.trials or DEFAULT_TRIALS[cfg.subcommand]
        bodies = [random_profile(_seed_for(cfg.seed, i)) for i in range(trials)]
    reports, skipped = [], []
    for idx, body in enumerate(bodies):
        for w in weights:
            if not 0.0 < w < 1.0:
                raise UsageError(f"layer weight must lie in (0, 1), got {w}")
            try:
                reports.append(verify_theorem1(body, w, direction=cfg.direction,
                                               quad_tol=cfg.quadrature_tol))
            except InfeasibleError as exc:
                if len(bodies) == 1 and len(weights) == 1:
                    raise UsageError(f"no layer of weight {w} matches this body: {exc}") from None
                skipped.append({"index": idx, "w": w, "reason": str(exc)})
    summary = {"reports": len(reports), "skipped": len(skipped),
               "min_margin": min((r.margin for r in reports), default=math.nan)}
    return Outcome([r.to_dict() for r in reports], _clean(summary), _report_failures(reports))


def _random_gaussian_instance(seed: int, index: int, dim: int = 3):
    rng = mc_generator(seed, 100, index)
    A = rng.normal(size=(dim, dim))
    cov = A @ A.T + 0.1 * np.eye(dim)
    thresholds = rng.normal(loc=0.5, scale=0.7, size=dim - 1)
    return GaussianVector(cov), thresholds, int(rng.integers(dim))


def run_verify_theorem1a(cfg: RunConfig) -> Outcome:
    mc = cfg.mc or 100_000
    w = 0.5 if cfg.w is None else cfg.w
    if cfg.instance:
        data = _read_json(cfg.instance, "instance")
        try:
            X = GaussianVector(np.asarray(data["covariance"]), data.get("mean"))
            instances = [(X, data["thresholds"], int(data["y_index"]))]
        except (KeyError, TypeError, DomainError) as exc:
            raise UsageError(f"bad instance file: {exc}") from None
    else:
        instances = [_random_gaussian_instance(cfg.seed, i)
                     for i in range(cfg.trials or DEFAULT_TRIALS[cfg.subcommand])]
    reports, skipped = [], []
    for i, (X, thr, k) in enumerate(instances):
        try:
            reports.append(verify_theorem1a(X, thr, k, w, mc, _seed_for(cfg.seed, i),
                                            hypothesis=cfg.hypothesis, workers=cfg.workers))
        except InfeasibleError as exc:
            skipped.append({"index": i, "reason": str(exc)})
    counts = {s: sum(r.status == s for r in reports) for s in ("pass", "fail", "inconclusive")}
    return Outcome([r.to_dict() for r in reports], {**counts, "skipped": len(skipped)},
                   _report_failures(reports))


def run_verify_sidak(cfg: RunConfig) -> Outcome:
    mc = cfg.mc or 1_000_000
    if cfg.instance:
        data = _read_json(cfg.instance, "instance")
        try:
            instances = [(np.asarray(data["directions"], dtype=float), np.asarray(data["radii"], dtype=float))]
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"bad instance file: {exc}") from None
    else:
        instances = [sidak_instance(mc_generator(cfg.seed, 200, i))
                     for i in range(cfg.trials or DEFAULT_TRIALS[cfg.subcommand])]
    reports = [verify_sidak(U, t, mc, _seed_for(cfg.seed, i), cfg.workers)
               for i, (U, t) in enumerate(instances)]
    summary = {"reports": len(reports), "failed": sum(not r.passed for r in reports)}
    return Outcome([r.to_dict() for r in reports], summary, _report_failures(reports))


def run_search_problem2(cfg: RunConfig) -> Outcome:
    rep = search_problem2(cfg.trials or DEFAULT_TRIALS[cfg.subcommand], cfg.seed,
                          mc_check=cfg.mc_check)
    d = rep.to_dict(cfg.top)
    records = d.pop("instances")
    # exploratory: negative margins are findings, not failed checks
    return Outcome(records, d, [])


HANDLERS = {
    "bounds-table": run_bounds_table, "check-props": run_check_props,
    "linearize": run_linearize, "scan-extremal": run_scan_extremal,
    "final-case": run_final_case, "verify-theorem1": run_verify_theorem1,
    "verify-theorem1a": run_verify_theorem1a, "verify-sidak": run_verify_sidak,
    "search-problem2": run_search_problem2,
}


# --- emission ----------------------------------------------------------------------------

def _csv_cell(v):
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return repr(v) if isinstance(v, float) else v


def render(cfg: RunConfig, outcome: Outcome) -> str:
    """Serialise an outcome with the configuration and version embedded."""
    header = {"tool": TOOL, "version": __version__, "config": cfg.to_dict()}
    passed = not outcome.failures
    if cfg.format == "json":
        doc = {**header, "passed": passed, "summary": outcome.summary, "records": outcome.records}
        return json.dumps(_clean(doc), sort_keys=True, indent=2) + "\n"
    if cfg.format == "jsonl":
        lines = [json.dumps(_clean({**header, "record": "header", "passed": passed,
                                    "summary": outcome.summary}), sort_keys=True)]
        lines += [json.dumps(_clean(r), sort_keys=True) for r in outcome.records]
        return "\n".join(lines) + "\n"
    buf = io.StringIO()
    buf.write(f"# {TOOL} {__version__} config={json.dumps(cfg.to_dict(), sort_keys=True)}\n")
    columns = outcome.columns or tuple(dict.fromkeys(k for r in outcome.records for k in r))
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in outcome.records:
        writer.writerow([_csv_cell(_clean(r.get(c, ""))) for c in columns])
    return buf.getvalue()


def _destination(cfg: RunConfig) -> str | None:
    if cfg.out:
        return cfg.out
    out_dir = os.environ.get(OUT_DIR_ENV)
    if out_dir:
        return os.path.join(out_dir, f"{cfg.subcommand}.{cfg.format}")
    return None


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    """Parse ``argv``, run the subcommand, emit its report and return the exit status."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    argv = _join_values(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        try:
            args = _apply_config_file(parser, argv)
        except SystemExit as exc:  # --help and --version
            return EXIT_OK if not exc.code else EXIT_USAGE
        cfg = config_from_args(args)
        outcome = HANDLERS[cfg.subcommand](cfg)
        text = render(cfg, outcome)
        dest = _destination(cfg)
        if dest is None:
            stdout.write(text)
        else:
            os.makedirs(os.path.dirname(os.path.abspath(dest)), exist_ok=True)
            with open(dest, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    except (UsageError, DomainError) as exc:
        stderr.write(json.dumps({"status": "usage-error", "message": str(exc)}) + "\n")
        return EXIT_USAGE
    except (GaussCorrError, Exception) as exc:  # noqa: BLE001
        stderr.write(json.dumps({"status": "internal-error", "type": type(exc).__name__,
                                 "message": str(exc)}) + "\n")
        return EXIT_INTERNAL
    if outcome.failures:
        stderr.write(json.dumps(_clean({"status": "fail", "subcommand": cfg.subcommand,
                                        "failed": len(outcome.failures),
                                        "failures": outcome.failures}), sort_keys=True) + "\n")
        return EXIT_FAIL
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
