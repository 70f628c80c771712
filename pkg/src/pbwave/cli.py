"""Command line front-end.

    pbwave eval scalar --grid "x1=-2:2:41,x3=-1:3:41" --u 2 --t 1
    pbwave eval em --pol 0,0,1 --format json --out field.json
    pbwave action --test-function x3-bump --signal const
    pbwave probe waveop --seed 3
    pbwave classify --y 0,0,1 --u 0.5

Settings come from built-in defaults, then an optional flat JSON file
(``--config``), then explicit flags. Output files carry no timestamps so
identical settings give byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from . import oracles, probes, sources
from .beams import green_euclidean, kappa_sign, wavelet
from .em import em_field, polarization
from .errors import ConfigError, NotTimelikeWarning, PBWaveError, QuadratureFailure
from .geometry import CausalClass, ComplexEvent, classify_causal
from .signals import make_signal
from .testfunctions import builtin_test_functions, get_test_function

SCHEMA_VERSION = 1
CSV_TAG = f"# pbwave-grid schema={SCHEMA_VERSION}"
AXES = ("x1", "x2", "x3", "t")

EXIT_OK, EXIT_CONFIG, EXIT_EVAL, EXIT_VERIFY = 0, 2, 3, 4

DEFAULTS = {
    "y": [0.0, 0.0, 1.0],
    "u": 2.0,
    "t": 0.0,
    "grid": "x1=-2:2:21,x3=-1:3:21",
    "signal": "cauchy",
    "kappa": "+",
    "pol": [1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    "eps_ladder": None,
    "tol_rel": 1e-10,
    "tol_abs": 1e-13,
    "format": "csv",
    "out": "-",
    "seed": 0,
    "test_function": "all",
    "n_points": None,
}
# keys that do not influence the numbers and are left out of the echoed config
_NOT_ECHOED = ("out", "config")

ACTION_LADDER = [1e-1, 1e-2, 1e-3]
MINKOWSKI_LADDER = [0.1, 0.05, 0.025]


# ---------------------------------------------------------------- parsing


def _floats(value, name, n=None):
    if isinstance(value, str):
        parts = [s for s in value.replace(";", ",").split(",") if s.strip()]
    elif isinstance(value, (list, tuple)):
        parts = list(value)
    else:
        parts = [value]
    try:
        out = [float(v) for v in parts]
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected numbers, got {value!r}") from None
    if n is not None and len(out) != n:
        raise ConfigError(f"{name}: expected {n} numbers, got {len(out)}")
    if not all(math.isfinite(v) for v in out):
        raise ConfigError(f"{name}: values must be finite")
    return out


def parse_grid(spec, t_default=0.0):
    """Parse ``"x1=-2:2:5,x3=0:4:5,t=2"`` into ordered axis definitions.

    ``name=lo:hi:n`` samples n >= 2 points; ``name=value`` fixes a
    coordinate. Unmentioned spatial coordinates are 0, t defaults to
    ``t_default``. Returns ``(sampled, fixed)``: a list of (name, values)
    in the order given and a dict of fixed values.
    """
    fixed = {"x1": 0.0, "x2": 0.0, "x3": 0.0, "t": float(t_default)}
    sampled = []
    seen = set()
    for item in (s.strip() for s in str(spec).split(",")):
        if not item:
            continue
        name, sep, rhs = item.partition("=")
        name = name.strip()
        if not sep or name not in AXES:
            raise ConfigError(f"grid: bad axis entry {item!r} (axes: {', '.join(AXES)})")
        if name in seen:
            raise ConfigError(f"grid: axis {name} given twice")
        seen.add(name)
        bits = rhs.split(":")
        try:
            if len(bits) == 1:
                fixed[name] = float(bits[0])
                continue
            if len(bits) != 3:
                raise ValueError
            lo, hi, n = float(bits[0]), float(bits[1]), int(bits[2])
        except ValueError:
            raise ConfigError(f"grid: cannot parse {item!r}; use lo:hi:n or a value") from None
        if n < 2:
            raise ConfigError(f"grid: axis {name} needs at least 2 samples")
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ConfigError(f"grid: axis {name} bounds must be finite")
        sampled.append((name, np.linspace(lo, hi, n)))
        fixed.pop(name)
    if not sampled:
        raise ConfigError("grid: at least one sampled axis is required")
    return sampled, fixed


def _pol(value):
    vals = _floats(value, "pol")
    if len(vals) == 3:
        vals = vals + [0.0, 0.0, 0.0]
    if len(vals) != 6:
        raise ConfigError("pol: give p_e as 3 numbers or p_e and p_m as 6")
    p = polarization(vals[:3], vals[3:])
    if not np.any(p):
        raise ConfigError("pol: polarization must be nonzero")
    return p


def _kappa(value, allow_diff=False):
    if allow_diff and str(value).lower() in ("e", "diff", "4"):
        return "diff"
    try:
        return kappa_sign(value)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"kappa: {exc}") from None


def _signal(value):
    try:
        return make_signal(value)
    except (ValueError, PBWaveError) as exc:
        raise ConfigError(f"signal: {exc}") from None


def _load_config_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ConfigError("config: top level must be an object")
    data = {k.replace("-", "_"): v for k, v in data.items()}
    unknown = sorted(set(data) - set(DEFAULTS))
    if unknown:
        raise ConfigError(f"config: unknown keys {unknown}")
    for k, v in data.items():
        if isinstance(v, (dict,)):
            raise ConfigError(f"config: key {k!r} must be a scalar or list (flat document)")
    return data


def resolve_config(args):
    """Merge defaults, the JSON file and explicit flags (flag wins)."""
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(_load_config_file(args.config))
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    cfg["y"] = _floats(cfg["y"], "y", 3)
    cfg["u"] = _floats(cfg["u"], "u", 1)[0]
    cfg["t"] = _floats(cfg["t"], "t", 1)[0]
    for key in ("tol_rel", "tol_abs"):
        cfg[key] = _floats(cfg[key], key, 1)[0]
        if cfg[key] <= 0:
            raise ConfigError(f"{key} must be positive")
    if cfg["eps_ladder"] is not None:
        cfg["eps_ladder"] = _floats(cfg["eps_ladder"], "eps_ladder")
        if not cfg["eps_ladder"] or min(cfg["eps_ladder"]) <= 0:
            raise ConfigError("eps_ladder: values must be positive")
    try:
        cfg["seed"] = int(cfg["seed"])
    except (TypeError, ValueError):
        raise ConfigError(f"seed: expected an integer, got {cfg['seed']!r}") from None
    if cfg["n_points"] is not None:
        try:
            cfg["n_points"] = int(cfg["n_points"])
        except (TypeError, ValueError):
            raise ConfigError("n_points: expected an integer") from None
        if cfg["n_points"] < 1:
            raise ConfigError("n_points must be positive")
    if cfg["format"] not in ("csv", "json"):
        raise ConfigError(f"format: expected csv or json, got {cfg['format']!r}")
    cfg["signal"] = str(cfg["signal"])
    cfg["kappa"] = str(cfg["kappa"])
    cfg["grid"] = str(cfg["grid"])
    cfg["pol"] = _floats(cfg["pol"], "pol")
    if np.linalg.norm(cfg["y"]) == 0:
        raise ConfigError("y must be nonzero")
    return cfg


def _echo(cfg):
    return {k: v for k, v in sorted(cfg.items()) if k not in _NOT_ECHOED}


def _warn_timelike(cfg):
    a = float(np.linalg.norm(cfg["y"]))
    if abs(cfg["u"]) <= a:
        print(f"pbwave: warning: |u|={abs(cfg['u']):g} <= |y|={a:g}, configuration is not "
              "timelike (no pulse guarantee)", file=sys.stderr)


# ---------------------------------------------------------------- grids


def worker_count(n_tasks):
    env = os.environ.get("PBWAVE_THREADS")
    if env is None:
        cap = min(4, os.cpu_count() or 1)
    else:
        try:
            cap = int(env)
        except ValueError:
            raise ConfigError(f"PBWAVE_THREADS must be an integer, got {env!r}") from None
        if cap < 1:
            raise ConfigError("PBWAVE_THREADS must be >= 1")
    return max(1, min(cap, n_tasks))


def _grid_points(sampled, fixed):
    """Row-major list of coordinate rows; one block per value of the first sampled axis."""
    names = [n for n, _ in sampled]
    mesh = np.meshgrid(*[v for _, v in sampled], indexing="ij")
    coords = {n: m.ravel() for n, m in zip(names, mesh)}
    size = mesh[0].size
    for n, v in fixed.items():
        coords[n] = np.full(size, v)
    table = np.stack([coords[a] for a in AXES], axis=-1)
    return np.array_split(table, len(sampled[0][1]))


def _evaluate_block(fn, block, width):
    """Evaluate ``fn(x, t) -> (m, width)``; fall back to points when the block fails."""
    x, t = block[:, :3], block[:, 3]
    status = np.array(["ok"] * len(block), dtype=object)
    try:
        with np.errstate(all="ignore"):
            vals = np.asarray(fn(x, t), dtype=float).reshape(len(block), width)
        bad = ~np.all(np.isfinite(vals), axis=-1)
    except PBWaveError:
        vals = np.zeros((len(block), width))
        bad = np.zeros(len(block), dtype=bool)
        for i in range(len(block)):
            try:
                with np.errstate(all="ignore"):
                    vals[i] = np.asarray(fn(x[i:i + 1], t[i:i + 1]), dtype=float).reshape(width)
                bad[i] = not np.all(np.isfinite(vals[i]))
            except PBWaveError:
                bad[i] = True
    vals[bad] = 0.0
    status[bad] = "singular"
    return vals, status


def evaluate_grid(fn, sampled, fixed, width):
    blocks = _grid_points(sampled, fixed)
    with ThreadPoolExecutor(max_workers=worker_count(len(blocks))) as pool:
        results = list(pool.map(lambda b: _evaluate_block(fn, b, width), blocks))
    coords = np.concatenate(blocks)
    vals = np.concatenate([r[0] for r in results])
    status = np.concatenate([r[1] for r in results])
    return coords, vals, status


def _fmt(v):
    return format(float(v), ".17g")


def render_grid(kind, cfg, sampled, fixed, columns, coords, vals, status, fmt):
    axes = {n: {"lo": float(v[0]), "hi": float(v[-1]), "n": int(v.size)} for n, v in sampled}
    if fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "generator": f"pbwave {__version__}",
            "kind": kind,
            "config": _echo(cfg),
            "axes": axes,
            "fixed": {k: float(v) for k, v in fixed.items()},
            "columns": list(AXES) + columns + ["status"],
            "rows": [[*map(float, c), *map(float, v), s]
                     for c, v, s in zip(coords, vals, status)],
        }
        return json.dumps(doc, indent=1) + "\n"
    lines = [
        f"{CSV_TAG} kind={kind} generator=pbwave-{__version__}",
        "# config: " + json.dumps(_echo(cfg), sort_keys=True),
        "# axes: " + json.dumps(axes),
        ",".join(list(AXES) + columns + ["status"]),
    ]
    for c, v, s in zip(coords, vals, status):
        lines.append(",".join([*map(_fmt, c), *map(_fmt, v), s]))
    return "\n".join(lines) + "\n"


def _emit(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _emit_json(doc, cfg):
    doc = {"schema_version": SCHEMA_VERSION, "generator": f"pbwave {__version__}", **doc}
    _emit(json.dumps(doc, indent=1) + "\n", cfg["out"])


# ---------------------------------------------------------------- commands


def scalar_function(cfg):
    """Vectorised evaluator (x, t) -> [Re, Im, |.|] for the configured beam."""
    y, u = np.asarray(cfg["y"]), cfg["u"]
    kappa = _kappa(cfg["kappa"], allow_diff=True)
    g = _signal(cfg["signal"])
    if kappa == "diff" and g.kind != "cauchy":
        raise ConfigError("kappa=diff (G+ - G- = G4) is only defined for the cauchy signal")

    def fn(x, t):
        z = ComplexEvent.from_parts(x, t, y, u)
        w = green_euclidean(z) if kappa == "diff" else wavelet(z, g, kappa)
        return np.stack([w.real, w.imag, np.abs(w)], axis=-1)

    return fn


def em_function(cfg):
    y, u = np.asarray(cfg["y"]), cfg["u"]
    kappa = _kappa(cfg["kappa"])
    g = _signal(cfg["signal"])
    p = _pol(cfg["pol"])

    def fn(x, t):
        F = em_field(ComplexEvent.from_parts(x, t, y, u), p, kappa, g).F
        E, B = F.real, F.imag
        return np.concatenate([E, B, np.linalg.norm(E, axis=-1)[:, None],
                               np.linalg.norm(B, axis=-1)[:, None]], axis=-1)

    return fn


def cmd_eval(cfg, field):
    _warn_timelike(cfg)
    sampled, fixed = parse_grid(cfg["grid"], cfg["t"])
    if field == "scalar":
        fn, columns = scalar_function(cfg), ["re", "im", "abs"]
    else:
        fn = em_function(cfg)
        columns = ["E1", "E2", "E3", "B1", "B2", "B3", "absE", "absB"]
    coords, vals, status = evaluate_grid(fn, sampled, fixed, len(columns))
    text = render_grid(field, cfg, sampled, fixed, columns, coords, vals, status, cfg["format"])
    _emit(text, cfg["out"])
    return EXIT_OK


def _c(z):
    z = complex(z)
    return [z.real, z.imag]


def _rel(a, b):
    a, b = complex(a), complex(b)
    return abs(a - b) / abs(a) if abs(a) > 0 else None


def _guarded(fn):
    try:
        return {"value": _c(fn())}
    except QuadratureFailure as exc:
        out = {"error": str(exc)}
        if exc.estimate is not None:
            out["estimate"] = _c(exc.estimate)
            out["error_bound"] = float(exc.error)
        return out
    except PBWaveError as exc:
        return {"error": f"{type(exc).__name__}: {exc}"}


def action_entry(f, cfg):
    """Closed form, truncated forms on the eps ladder and the quadrature oracle for one f."""
    y = np.asarray(cfg["y"])
    g = _signal(cfg["signal"])
    kappa = _kappa(cfg["kappa"])
    tau = complex(cfg["t"], cfg["u"])
    static = g.kind == "const"
    ladder = cfg["eps_ladder"] or ACTION_LADDER
    spec = oracles.QuadratureSpec(tol_rel=cfg["tol_rel"], tol_abs=cfg["tol_abs"])

    entry = {"test_function": f.name}
    entry["limit"] = _guarded(lambda: sources.action_limit(f, y, tau, g))
    entry["regularized"] = [
        {"eps": e, **_guarded(lambda e=e: sources.action_regularized(f, y, tau, g, kappa, e))}
        for e in ladder
    ]
    if static:
        entry["oracle"] = _guarded(lambda: oracles.action_bruteforce_static(f, y, spec))
        entry["cylindrical"] = _guarded(lambda: sources.action_static_delta(f, y))
    else:
        entry["oracle"] = _guarded(
            lambda: oracles.action_bruteforce_spacetime(f, y, tau, g, kappa, spec))
        if g.kind == "cauchy":
            entry["cylindrical"] = _guarded(lambda: sources.action_spacetime_delta(f, y, tau))

    rel, absolute = {}, {}

    def compare(label, ref, other):
        if "value" in ref and "value" in other:
            a, b = complex(*ref["value"]), complex(*other["value"])
            rel[label] = _rel(a, b)
            absolute[label] = abs(a - b)

    for r in entry["regularized"]:
        compare(f"limit_vs_regularized@{r['eps']:g}", entry["limit"], r)
    for key in ("oracle", "cylindrical"):
        if key in entry:
            compare(f"limit_vs_{key}", entry["limit"], entry[key])
    if entry["regularized"]:
        compare("oracle_vs_regularized", entry["oracle"], entry["regularized"][-1])
    entry["relative_differences"] = rel
    entry["absolute_differences"] = absolute
    return entry


def cmd_action(cfg):
    _warn_timelike(cfg)
    name = cfg["test_function"]
    try:
        fns = list(builtin_test_functions().values()) if name == "all" \
            else [get_test_function(name)]
    except KeyError as exc:
        raise ConfigError(str(exc.args[0])) from None
    g = _signal(cfg["signal"])
    if g.kind != "const" and g.deriv2 is None:
        raise ConfigError("action: the quadrature oracle needs a signal with a second derivative")
    entries = [action_entry(f, cfg) for f in fns]
    _emit_json({"kind": "action", "config": _echo(cfg), "entries": entries}, cfg)
    return EXIT_OK


def run_probe(kind, cfg):
    rng = np.random.default_rng(cfg["seed"])
    y, u = cfg["y"], cfg["u"]
    if kind == "minkowski":
        return probes.minkowski_probe(y=y, u=u, sign=_kappa(cfg["kappa"]),
                                      eps_list=cfg["eps_ladder"] or MINKOWSKI_LADDER)
    if kind == "farzone":
        return probes.farzone_probe(a=float(np.linalg.norm(y)))
    if kind == "waveop":
        return probes.waveop_probe(rng, n=cfg["n_points"] or 1000, y=y, u=u,
                                   signal=_signal(cfg["signal"]), kappa=_kappa(cfg["kappa"]))
    if kind == "maxwell-sign":
        return probes.maxwell_sign_probe(rng, n=cfg["n_points"] or 100, y=y, u=u,
                                         sign=_kappa(cfg["kappa"]), p=_pol(cfg["pol"]),
                                         signal=_signal(cfg["signal"]))
    raise ConfigError(f"unknown probe {kind!r}")


def cmd_probe(cfg, kind):
    _warn_timelike(cfg)
    report = run_probe(kind, cfg)
    _emit_json({"kind": f"probe:{kind}", "config": _echo(cfg), "report": report}, cfg)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def classify_report(y, u):
    y = np.asarray(y, dtype=float)
    a = float(np.linalg.norm(y))
    cls = classify_causal(y, u)
    notes = []
    if cls is CausalClass.SPACELIKE:
        notes.append("spacelike: poor beam quality, no pulse guarantee")
    elif cls is CausalClass.LIGHTLIKE:
        notes.append("lightlike: degenerate boundary case")
    return {
        "y": y.tolist(),
        "u": float(u),
        "class": cls.name.lower().replace("_", "-"),
        "timelike": cls.timelike,
        "eccentricity": a / abs(u) if cls.timelike else None,
        "in_causal_tube": cls.timelike,
        "warnings": notes,
    }


def cmd_classify(cfg):
    report = classify_report(cfg["y"], cfg["u"])
    for note in report["warnings"]:
        print(f"warning: {note}", file=sys.stderr)
    _emit_json({"kind": "classify", **report}, cfg)
    return EXIT_OK


# ---------------------------------------------------------------- entry point


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--y", help="imaginary spatial shift, e.g. 0,0,1")
    common.add_argument("--u", help="imaginary time shift")
    common.add_argument("--t", help="real time (when not a grid axis)")
    common.add_argument("--grid", help='grid spec, e.g. "x1=-2:2:41,x3=-1:3:41,t=1"')
    common.add_argument("--signal", help="cauchy | const | dcauchy:m")
    common.add_argument("--kappa", help="+ or - (scalar eval also accepts diff for G4)")
    common.add_argument("--pol", help="p_e (3 numbers) or p_e,p_m (6 numbers)")
    common.add_argument("--eps-ladder", dest="eps_ladder", help="comma-separated eps values")
    common.add_argument("--tol-rel", dest="tol_rel", type=float)
    common.add_argument("--tol-abs", dest="tol_abs", type=float)
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--config", help="flat JSON file with any of the settings above")
    common.add_argument("--seed", type=int)
    common.add_argument("--test-function", dest="test_function",
                        help="library name or 'all' (action)")
    common.add_argument("--n-points", dest="n_points", type=int,
                        help="sample count for randomised probes")

    parser = argparse.ArgumentParser(prog="pbwave", description="Pulsed-beam wavelets: "
                                     "field grids, source actions and verification probes.")
    parser.add_argument("--version", action="version", version=f"pbwave {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    ev = sub.add_parser("eval", parents=[common], help="evaluate a field on a grid")
    ev.add_argument("field", choices=("scalar", "em"))
    sub.add_parser("action", parents=[common], help="source action on test functions")
    pr = sub.add_parser("probe", parents=[common], help="run a verification probe")
    pr.add_argument("kind", choices=("minkowski", "farzone", "waveop", "maxwell-sign"))
    sub.add_parser("classify", parents=[common], help="causal class of (y, u)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    warnings.simplefilter("ignore", NotTimelikeWarning)
    try:
        cfg = resolve_config(args)
        if args.command == "eval":
            return cmd_eval(cfg, args.field)
        if args.command == "action":
            return cmd_action(cfg)
        if args.command == "probe":
            return cmd_probe(cfg, args.kind)
        return cmd_classify(cfg)
    except ConfigError as exc:
        print(f"pbwave: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PBWaveError as exc:
        print(f"pbwave: evaluation error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_EVAL


if __name__ == "__main__":
    sys.exit(main())
