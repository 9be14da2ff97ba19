"""Command-line entry point: ``pairldp <command> [options]``.

Run parameters come from an optional INI file (``--config``) and command
flags, flags winning.  The file layout::

    [run]
    command = ldp-verify
    seed = 7
    format = csv

    [kernel]
    spec = gaussian:theta=0.5

    [params]
    event = "marginal_mean>=0.5"
    n = [2, 4, 8]
    samples = 100000

Values in ``[run]`` and ``[params]`` are JSON (bare words fall back to
strings).  Every output carries the SHA-256 digest of the resolved
(command, kernel, params, seed); output path and worker count are left out
because they do not change results.

Exit codes: 0 success, 1 numerical failure or failed check, 2 bad
configuration or arguments.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import io
import json
import os
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from . import props as props_mod
from .energy import RateContext, average_rate, energy_K, marginal_rate, negdef_check
from .experiment import EventSpec, InfeasibleEventError, decay_rate, exact_decay
from .kernel import ConvergenceError, check_assumptions, infimum_k, parse_kernel
from .measure import AtomicMeasure, ProductMeasure
from .sampler import McmcConfig, log_partition_gaussian, sample_gaussian_exact, sample_mcmc
from .varadhan import SimplexGrid, parse_functional, parse_grid, varadhan_sup

OUTPUT_DIR_ENV = "PAIRLDP_OUTPUT_DIR"


class ConfigError(ValueError):
    """Unparseable or inconsistent configuration (exit 2)."""


# --------------------------------------------------------------------------
# parameter schema

def _floats(v):
    if isinstance(v, str):
        return [float(s) for s in v.split(",") if s.strip()]
    return [float(s) for s in (v if isinstance(v, (list, tuple)) else [v])]


def _ints(v):
    out = []
    for s in (v.split(",") if isinstance(v, str) else v if isinstance(v, (list, tuple)) else [v]):
        if isinstance(s, str) and not s.strip():
            continue
        f = float(s)
        if f != int(f):
            raise ValueError(f"{s!r} is not an integer")
        out.append(int(f))
    return out


def _strs(v):
    return [s.strip() for s in v.split(",") if s.strip()] if isinstance(v, str) else [str(s) for s in v]


def _bool(v):
    if isinstance(v, bool):
        return v
    if isinstance(v, str) and v.lower() in ("true", "1", "yes", "on", "false", "0", "no", "off"):
        return v.lower() in ("true", "1", "yes", "on")
    raise ValueError(f"{v!r} is not a boolean")


def _grid(v):
    return list(parse_grid(v))


REQUIRED = object()

# name -> (coercer, default, help)
SCHEMA: dict[str, dict[str, tuple[Callable, Any, str]]] = {
    "check-kernel": {
        "alphas": (_floats, [0.5, 1.0], "alpha values for M_alpha = sup over the box of alpha*k - k"),
        "resolution": (int, 50, "grid points per ring"),
    },
    "i0": {"tol": (float, 1e-9, "optimiser tolerance")},
    "rate": {
        "nu": (str, REQUIRED, "CSV (atom,weight) for the first factor"),
        "nu2": (str, None, "CSV for the second factor (default: same as --nu)"),
    },
    "marginal-rate": {"nu": (str, REQUIRED, "CSV (atom,weight)")},
    "average-rate": {"nu": (str, REQUIRED, "CSV (atom,weight)")},
    "negdef": {
        "trials": (int, 1000, "random trials"),
        "points": (int, 5, "points per trial"),
    },
    "varadhan": {
        "functional": (str, REQUIRED, "components joined by ';', e.g. 'clamp_x:lo=-1,hi=1;const:c=0.2'"),
        "grid": (_grid, "-2:2:9", "support atoms: lo:hi:num or a comma list"),
        "right_grid": (_grid, None, "atoms for the second factor (default: --grid)"),
        "restarts": (int, 20, "random starts"),
        "max_iters": (int, 2000, "mirror-ascent iterations per start"),
        "step_rule": (str, "sqrt", "sqrt or constant"),
        "polish_rounds": (int, 50, "exact block-ascent rounds"),
    },
    "sample": {
        "n": (int, REQUIRED, "ensemble size"),
        "method": (str, "auto", "exact (gaussian only), mcmc or auto"),
        "steps": (int, None, "MCMC steps (default 10n^2 + 400n)"),
        "burn_in": (int, None, "MCMC burn-in steps (default 10n^2)"),
        "proposal_scale": (float, None, "random-walk scale (default 1/sqrt(n))"),
        "adapt": (_bool, False, "tune the scale during burn-in"),
        "thinning": (int, 1, "MCMC thinning"),
    },
    "logz": {"n": (_ints, REQUIRED, "comma list of n")},
    "ldp-verify": {
        "event": (str, REQUIRED, "e.g. 'marginal_mean>=0.5'"),
        "n": (_ints, REQUIRED, "comma list of n"),
        "samples": (int, 100000, "Monte-Carlo samples per n"),
        "exact": (_bool, False, "exact gaussian tail only, no sampling"),
    },
    "props": {
        "trials": (int, None, "trials per property (default: each check's own)"),
        "only": (_strs, None, "comma list of property names"),
    },
}

NEEDS_KERNEL = set(SCHEMA) - {"props"}
TABULAR = {"sample", "logz", "ldp-verify", "props"}


@dataclass
class RunConfig:
    command: str
    kernel: Optional[str] = None
    params: dict = field(default_factory=dict)
    seed: int = 0
    output: Optional[str] = None
    format: Optional[str] = None

    def canonical(self) -> str:
        body = {"command": self.command, "kernel": self.kernel, "params": self.params, "seed": self.seed}
        return json.dumps(body, sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode("utf-8")).hexdigest()

    def to_ini(self) -> str:
        cp = _parser()
        cp["run"] = {"command": json.dumps(self.command), "seed": json.dumps(self.seed)}
        if self.format is not None:
            cp["run"]["format"] = json.dumps(self.format)
        if self.output is not None:
            cp["run"]["output"] = json.dumps(self.output)
        if self.kernel is not None:
            cp["kernel"] = {"spec": self.kernel}
        cp["params"] = {k: json.dumps(v) for k, v in sorted(self.params.items())}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def from_ini(cls, text: str) -> "RunConfig":
        cp = _parser()
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"config file: {exc}") from exc
        unknown = set(cp.sections()) - {"run", "kernel", "params"}
        if unknown:
            raise ConfigError(f"unknown config sections {sorted(unknown)}")
        run = {k: _value(v) for k, v in cp["run"].items()} if cp.has_section("run") else {}
        bad = set(run) - {"command", "seed", "format", "output"}
        if bad:
            raise ConfigError(f"unknown [run] keys {sorted(bad)}")
        params = {k: _value(v) for k, v in cp["params"].items()} if cp.has_section("params") else {}
        kernel = cp["kernel"].get("spec") if cp.has_section("kernel") else None
        return cls(run.get("command", ""), kernel, params, run.get("seed", 0), run.get("output"), run.get("format"))


def _parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # keep key case
    return cp


def _value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _resolve(cfg: RunConfig) -> RunConfig:
    """Check the command, fill defaults and coerce every parameter."""
    if cfg.command not in SCHEMA:
        raise ConfigError(f"unknown command {cfg.command!r}; choose from {sorted(SCHEMA)}")
    schema = SCHEMA[cfg.command]
    extra = set(cfg.params) - set(schema)
    if extra:
        raise ConfigError(f"unknown parameters for {cfg.command}: {sorted(extra)}")
    params = {}
    for name, (coerce, default, _) in schema.items():
        if name in cfg.params and cfg.params[name] is not None:
            try:
                params[name] = coerce(cfg.params[name])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"parameter {name}: {exc}") from exc
        elif default is REQUIRED:
            raise ConfigError(f"{cfg.command} needs --{name.replace('_', '-')}")
        else:
            params[name] = coerce(default) if default is not None else None
    if cfg.command in NEEDS_KERNEL and not cfg.kernel:
        raise ConfigError(f"{cfg.command} needs --kernel")
    try:
        seed = int(cfg.seed)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"seed: {exc}") from exc
    if seed < 0:
        raise ConfigError("seed must be non-negative")
    fmt = cfg.format or ("csv" if cfg.command in TABULAR else "json")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json (got {fmt!r})")
    kernel = cfg.kernel if cfg.command in NEEDS_KERNEL else None
    return RunConfig(cfg.command, kernel, params, seed, cfg.output, fmt)


# --------------------------------------------------------------------------
# results

@dataclass
class Result:
    """Either a record (``fields``) or a table (``columns`` + ``rows``)."""

    fields: dict = field(default_factory=dict)
    columns: tuple = ()
    rows: list = field(default_factory=list)
    csv_text: Optional[str] = None  # pre-rendered table, header included
    failure: Optional[str] = None
    sidecar: Optional[dict] = None


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        return float(v)
    return v


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (dict, list, tuple)):
        return json.dumps(_jsonable(v), sort_keys=True)
    return str(v)


def render(cfg: RunConfig, res: Result) -> str:
    digest = cfg.digest()
    if cfg.format == "json":
        body = dict(res.fields)
        if res.columns:
            body["columns"] = list(res.columns)
            body["rows"] = [dict(zip(res.columns, r)) for r in res.rows]
        if res.sidecar is not None:
            body["sampler"] = res.sidecar
        rec = {"command": cfg.command, "kernel": cfg.kernel, "seed": cfg.seed, "config_digest": digest,
               "params": cfg.params, "result": body}
        return json.dumps(_jsonable(rec), indent=2, sort_keys=True) + "\n"
    head = f"# command={cfg.command} kernel={cfg.kernel or ''} seed={cfg.seed} config_digest={digest}\n"
    if res.csv_text is not None:
        return head + res.csv_text
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if res.columns:
        w.writerow(res.columns)
        w.writerows([[_cell(v) for v in r] for r in res.rows])
    else:
        w.writerow(("field", "value"))
        w.writerows([(k, _cell(v)) for k, v in sorted(res.fields.items())])
    return head + buf.getvalue()


# --------------------------------------------------------------------------
# commands

def _load_measure(path: str) -> AtomicMeasure:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read measure file {path!r}: {exc.strerror}") from exc
    try:
        if path.endswith(".json"):
            return AtomicMeasure.from_json(text)
        return AtomicMeasure.from_csv(text)
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"measure file {path!r}: {exc}") from exc


def _measure_digest(*nus: AtomicMeasure) -> str:
    return hashlib.sha256("".join(nu.to_json() for nu in nus).encode("utf-8")).hexdigest()


def _kernel(cfg: RunConfig):
    try:
        return parse_kernel(cfg.kernel)
    except ValueError as exc:
        raise ConfigError(f"kernel {cfg.kernel!r}: {exc}") from exc


def cmd_check_kernel(cfg, kern, workers):
    p = cfg.params
    rep = check_assumptions(kern, alphas=tuple(p["alphas"]), resolution=p["resolution"])
    res = Result(fields=rep.to_dict())
    if not rep.all_passed:
        res.failure = "kernel assumptions failed: " + ", ".join(rep.failed())
    return res


def cmd_i0(cfg, kern, workers):
    tol = cfg.params["tol"]
    value, arg = infimum_k(kern, tol=tol)
    return Result(fields={"I0": value, "argmin": list(arg), "tolerance": tol})


def cmd_rate(cfg, kern, workers):
    nu1 = _load_measure(cfg.params["nu"])
    nu2 = _load_measure(cfg.params["nu2"]) if cfg.params["nu2"] else nu1
    ctx = RateContext.from_kernel(kern)
    K = energy_K(kern, ProductMeasure(nu1, nu2))
    return Result(fields={"value": K - ctx.I0, "energy_K": K, "I0": ctx.I0, "tolerance": ctx.I0_tol,
                          "measure_digest": _measure_digest(nu1, nu2)})


def cmd_marginal_rate(cfg, kern, workers):
    nu = _load_measure(cfg.params["nu"])
    ctx = RateContext.from_kernel(kern)
    return Result(fields={"value": marginal_rate(ctx, nu), "I0": ctx.I0, "tolerance": 1e-6,
                          "measure_digest": _measure_digest(nu)})


def cmd_average_rate(cfg, kern, workers):
    nu = _load_measure(cfg.params["nu"])
    ctx = RateContext.from_kernel(kern, check_negdef=True)
    return Result(fields={"value": average_rate(ctx, nu), "I0": ctx.I0, "tolerance": ctx.I0_tol,
                          "negative_definite": ctx.negative_definite, "measure_digest": _measure_digest(nu)})


def cmd_negdef(cfg, kern, workers):
    p = cfg.params
    out = negdef_check(kern, p["trials"], p["points"], cfg.seed)
    fields = {"passed": out.passed, "trials": p["trials"], "points": p["points"], "witness": None}
    res = Result(fields=fields)
    if not out.passed:
        w = out.witness
        fields["witness"] = {"points": w.points, "coefficients": w.coefficients, "value": w.value}
        res.failure = f"negative definiteness violated: quadratic form {w.value:.6g} > 0 with sum c = 0"
    return res


def cmd_varadhan(cfg, kern, workers):
    p = cfg.params
    try:
        f = parse_functional(p["functional"], kern)
        grid = SimplexGrid(tuple(p["grid"]), restarts=p["restarts"], max_iters=p["max_iters"],
                           step_rule=p["step_rule"], polish_rounds=p["polish_rounds"], seed=cfg.seed,
                           right_points=None if p["right_grid"] is None else tuple(p["right_grid"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    I0, _ = infimum_k(kern)
    out = varadhan_sup(kern, f, grid)
    return Result(fields={"sup": out.value, "L_phi": out.value + I0, "I0": I0,
                          "argmax": out.argmax.to_dict(), "sup_bound": f.sup_bound})


def cmd_sample(cfg, kern, workers):
    p = cfg.params
    n = p["n"]
    method = p["method"]
    if method == "auto":
        method = "exact" if kern.kind == "gaussian" else "mcmc"
    if method not in ("exact", "mcmc"):
        raise ConfigError(f"method must be exact, mcmc or auto (got {method!r})")
    side = {"kernel": kern.spec, "seed": cfg.seed, "n": n, "method": method}
    if method == "exact":
        if kern.kind != "gaussian":
            raise ConfigError("the exact sampler exists only for the gaussian kernel")
        ens = sample_gaussian_exact(kern.params["theta"], n, cfg.seed)
    else:
        base = McmcConfig.default(n, seed=cfg.seed)
        burn = p["burn_in"] if p["burn_in"] is not None else base.burn_in
        steps = p["steps"] if p["steps"] is not None else burn + (base.steps - base.burn_in)
        try:
            mc = McmcConfig(steps, burn, p["proposal_scale"], p["thinning"], cfg.seed, p["adapt"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        ens, diag = sample_mcmc(kern, n, mc)
        side["mcmc"] = {"steps": steps, "burn_in": burn, "acceptance_rate": diag.acceptance_rate[0],
                        "energy_mean": diag.energy_mean[0], "energy_std": diag.energy_std[0],
                        "final_energy": diag.final_energy[0], "proposal_scale": diag.proposal_scale[0],
                        "flags": diag.flags}
        for flag in diag.flags:
            print(f"warning: {flag}", file=sys.stderr)
    rows = [(i, float(a), float(b)) for i, (a, b) in enumerate(zip(ens.x, ens.y))]
    return Result(columns=("index", "x", "y"), rows=rows, sidecar=side)


def cmd_logz(cfg, kern, workers):
    if kern.kind != "gaussian":
        raise ConfigError("logz has a closed form only for the gaussian kernel")
    th = kern.params["theta"]
    rows = []
    for n in cfg.params["n"]:
        lz = log_partition_gaussian(th, n)
        rows.append((n, lz, lz / (n * n)))
    return Result(columns=("n", "log_Z", "log_Z_over_n2"), rows=rows)


def cmd_ldp_verify(cfg, kern, workers):
    p = cfg.params
    try:
        event = EventSpec.parse(p["event"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if p["exact"]:
        if kern.kind != "gaussian":
            raise ConfigError("--exact needs the gaussian kernel")
        rep = exact_decay(kern.params["theta"], event, p["n"])
    else:
        rep = decay_rate(kern, event, p["n"], p["samples"], rng_seed=cfg.seed, workers=workers)
    res = Result(fields=rep.to_dict(), csv_text=rep.to_csv())
    res.fields.pop("seed", None)
    return res


def cmd_props(cfg, kern, workers):
    p = cfg.params
    names = p["only"]
    if names:
        bad = set(names) - set(props_mod.SUITE)
        if bad:
            raise ConfigError(f"unknown properties {sorted(bad)}; choose from {sorted(props_mod.SUITE)}")
    results = props_mod.run_suite(seed=cfg.seed, trials=p["trials"], names=names)
    rows = [(r.name, r.passed, r.trials, r.detail) for r in results]
    failed = [r.name for r in results if not r.passed]
    passed = len(results) - len(failed)
    print(f"properties: {passed} passed, {len(failed)} failed", file=sys.stderr)
    res = Result(columns=("property", "passed", "trials", "detail"), rows=rows)
    if failed:
        res.failure = "properties failed: " + ", ".join(failed)
    return res


SUMMARIES = {
    "check-kernel": "verify the kernel assumptions numerically",
    "i0": "infimum of k over the plane",
    "rate": "I(nu1 x nu2) = K - I0 for product measures",
    "marginal-rate": "inf of I over measures with first marginal nu",
    "average-rate": "rate of the average of the two marginals",
    "negdef": "randomised negative-definiteness test",
    "varadhan": "sup over product measures of Phi - K",
    "sample": "draw one ensemble (exact or MCMC)",
    "logz": "log partition function of the gaussian ensemble",
    "ldp-verify": "Monte-Carlo or exact decay rates against predictions",
    "props": "run the randomised property suite",
}

COMMANDS = {
    "check-kernel": cmd_check_kernel,
    "i0": cmd_i0,
    "rate": cmd_rate,
    "marginal-rate": cmd_marginal_rate,
    "average-rate": cmd_average_rate,
    "negdef": cmd_negdef,
    "varadhan": cmd_varadhan,
    "sample": cmd_sample,
    "logz": cmd_logz,
    "ldp-verify": cmd_ldp_verify,
    "props": cmd_props,
}


# --------------------------------------------------------------------------
# argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="pairldp", description="Pair-interaction ensembles and their n^2-speed rate functions.")
    sub = ap.add_subparsers(dest="command", metavar="command")
    S = argparse.SUPPRESS
    for name, schema in SCHEMA.items():
        sp = sub.add_parser(name, help=SUMMARIES[name], description=SUMMARIES[name])
        sp.add_argument("--config", default=None, help="INI run configuration")
        if name in NEEDS_KERNEL:
            sp.add_argument("--kernel", default=S, help="e.g. gaussian:theta=0.5 or loggas:beta=2")
        sp.add_argument("--seed", default=S, help="integer seed")
        sp.add_argument("--output", default=S, help=f"output path (default: stdout, or ${OUTPUT_DIR_ENV})")
        sp.add_argument("--format", default=S, choices=("csv", "json"))
        sp.add_argument("--workers", type=int, default=None, help="parallel workers for replicas")
        for key, (coerce, default, hlp) in schema.items():
            flag = "--" + key.replace("_", "-")
            if coerce is _bool:
                sp.add_argument(flag, dest=key, default=S, action="store_const", const=True, help=hlp)
            else:
                sp.add_argument(flag, dest=key, default=S, help=hlp)
    return ap


def _attach_negative_values(argv):
    """``--grid -1:1:5`` -> ``--grid=-1:1:5``: argparse would take the value for a flag."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if (tok.startswith("--") and "=" not in tok and nxt is not None and nxt.startswith("-")
                and not nxt.startswith("--") and nxt != "-h"):
            out.append(f"{tok}={nxt}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def parse_args(argv) -> tuple[RunConfig, Optional[int]]:
    ns = vars(build_parser().parse_args(_attach_negative_values(list(argv))))
    command = ns.pop("command")
    if command is None:
        raise ConfigError("missing command")
    path = ns.pop("config")
    workers = ns.pop("workers")
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from exc
        cfg = RunConfig.from_ini(text)
        if cfg.command and cfg.command != command:
            raise ConfigError(f"config is for {cfg.command!r}, not {command!r}")
        cfg.command = command
    else:
        cfg = RunConfig(command)
    for key in ("kernel", "seed", "output", "format"):
        if key in ns:
            setattr(cfg, key, ns.pop(key))
    cfg.params.update(ns)
    return _resolve(cfg), workers


def _output_path(cfg: RunConfig) -> Optional[Path]:
    if cfg.output:
        return Path(cfg.output)
    d = os.environ.get(OUTPUT_DIR_ENV)
    if d:
        return Path(d) / f"{cfg.command}-{cfg.digest()[:12]}.{cfg.format}"
    return None


def run(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg, workers = parse_args(argv)
    except ConfigError as exc:
        print(f"pairldp: configuration error: {exc}", file=sys.stderr)
        return 2
    if workers is None:
        workers = os.cpu_count() or 1
    if workers < 1:
        print("pairldp: configuration error: --workers must be positive", file=sys.stderr)
        return 2
    try:
        kern = _kernel(cfg) if cfg.command in NEEDS_KERNEL else None
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = _show_warning
            res = COMMANDS[cfg.command](cfg, kern, workers)
    except ConfigError as exc:
        print(f"pairldp: configuration error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, InfeasibleEventError, FloatingPointError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"pairldp: {cfg.command} failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1

    text = render(cfg, res)
    path = _output_path(cfg)
    if path is None:
        sys.stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        if res.sidecar is not None and cfg.format == "csv":
            side = {**res.sidecar, "config_digest": cfg.digest()}
            Path(str(path) + ".json").write_text(json.dumps(_jsonable(side), indent=2, sort_keys=True) + "\n")
        print(f"wrote {path}", file=sys.stderr)
    if res.failure:
        print(f"pairldp: check failed: {res.failure}", file=sys.stderr)
        return 1
    return 0


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"warning: {category.__name__}: {message}", file=sys.stderr)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
