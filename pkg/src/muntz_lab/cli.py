"""Command line front end: ``muntz-lab <subcommand> [options]``.

Settings come from built-in defaults, then an optional ``--config`` file of
``key = value`` lines (keys are the long flag names without dashes, e.g.
``eps = 0.1``), then the command line.  Exit status is 0 when every checked
property holds, 1 when a check fails, 2 for usage errors and 3 when a
computation cannot be completed.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

from .bernstein import (
    CSV_HEADER as BERNSTEIN_CSV_HEADER,
    DEFAULT_SAFETY,
    BernsteinError,
    bernstein_constant,
    k_sequence,
)
from .core import (
    CertificationError,
    MuntzError,
    MuntzPolynomial,
    MuntzSequence,
    check_muntz_condition,
    monomial,
    normalized,
    sup_norm_certified,
    validate_sequence,
)
from .embedding import (
    EMBEDDING_CSV_HEADER,
    build_grid,
    default_anchors,
    embedding_csv_rows,
    spacing_violations,
    verify_sandwich,
)
from .geometry import (
    DEFECT_CSV_HEADER,
    half_ball_check,
    lasq_empirical_defect,
    oh_defect_probe,
    small_ball_radius,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_COMPUTE = 0, 1, 2, 3

# per-command defaults; anything not listed defaults to None
DEFAULTS = {
    "muntz-check": {"family": "geometric:2", "n": 5},
    "norm": {"seq": "0,1,2", "lo": 0.0, "hi": 1.0, "tol": 1e-6},
    "bernstein": {"seq": "0,1", "a": 0.5},
    "grid": {"family": "geometric:2", "n": 5, "eps": 0.1, "m": 8, "safety": DEFAULT_SAFETY},
    "verify-embedding": {"family": "geometric:2", "n": 5, "eps": 0.1, "m": 8,
                         "trials": 1000, "safety": DEFAULT_SAFETY},
    "lasq": {"seq": "1,2,4", "x": 0.9, "trials": 10000, "refine": 200,
             "safety": DEFAULT_SAFETY},
    "half-ball": {"seq": "1,2,4", "x": 0.9, "trials": 10000, "safety": DEFAULT_SAFETY},
    "oh-probe": {"seq": "1,2,4", "trials": 1000},
}
RANDOMIZED = {"verify-embedding", "lasq", "half-ball", "oh-probe"}

_FLOAT_KEYS = {"eps", "x", "a", "tol", "safety", "lo", "hi"}
_INT_KEYS = {"n", "m", "trials", "seed", "refine"}


class UsageError(Exception):
    pass


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seq", help="comma-separated exponents, e.g. 0,1,2,4")
    p.add_argument("--family", help="explicit, power:S or geometric:R")
    p.add_argument("--n", type=int, help="use exponents with index <= N")
    p.add_argument("--constant", action="store_true", default=None,
                   help="prepend the constant exponent when generating from --family")
    p.add_argument("--eps", type=float)
    p.add_argument("--x", type=float)
    p.add_argument("--a", type=float, help="right end of [0, a] for bernstein and half-ball")
    p.add_argument("--m", type=int, help="number of anchors 1 - 2**-i")
    p.add_argument("--anchors", help="comma-separated anchors (overrides --m)")
    p.add_argument("--constants", help="comma-separated derivative constants K_i")
    p.add_argument("--safety", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--refine", type=int, help="local refinement sweeps")
    p.add_argument("--seed", type=int)
    p.add_argument("--coef", help="comma-separated coefficients")
    p.add_argument("--lo", type=float)
    p.add_argument("--hi", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--json", action="store_true", default=None, help="print JSON to stdout")
    p.add_argument("--csv", help="write CSV output to this path")
    p.add_argument("--config", help="key = value settings file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="muntz-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in DEFAULTS:
        _add_common(sub.add_parser(name))
    return parser


def read_config(path: str) -> dict:
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        try:
            if key in _FLOAT_KEYS:
                out[key] = float(value)
            elif key in _INT_KEYS:
                out[key] = int(value)
            elif key in ("json", "constant"):
                out[key] = value.lower() in ("1", "true", "yes", "on")
            else:
                out[key] = value
        except ValueError:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {value!r}") from None
    return out


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, config file and flags into a plain settings dict."""
    user = {}
    if args.config:
        try:
            user.update(read_config(args.config))
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
    for key, value in vars(args).items():
        if key not in ("command", "config") and value is not None:
            user[key] = value
    cfg = dict(DEFAULTS[args.command])
    # user-given exponents or family replace the default sequence entirely
    if {"seq", "family"} & user.keys():
        for key in ("seq", "family", "n"):
            cfg.pop(key, None)
    cfg.update(user)
    cfg["command"] = args.command
    return cfg


def _floats(text: str, what: str) -> list[float]:
    try:
        return [float(s) for s in str(text).split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"cannot parse {what}: {text!r}") from None


def parse_family(text: str | None) -> tuple[str, float | None]:
    if not text or text == "explicit":
        return "explicit", None
    name, _, param = text.partition(":")
    if name not in ("power", "geometric") or not param:
        raise UsageError(f"family must be explicit, power:S or geometric:R, got {text!r}")
    return name, _floats(param, "family parameter")[0]


def sequence_from(cfg: dict) -> tuple[MuntzSequence, int]:
    family, param = parse_family(cfg.get("family"))
    try:
        if cfg.get("seq"):
            seq = validate_sequence(_floats(cfg["seq"], "--seq"), family, param)
        elif family == "explicit":
            raise UsageError("give --seq or a power/geometric --family")
        else:
            if cfg.get("n") is None:
                raise UsageError("--n is required to generate a family")
            make = MuntzSequence.power if family == "power" else MuntzSequence.geometric
            seq = make(param, cfg["n"], bool(cfg.get("constant")))
        n = cfg.get("n")
        if n is None:
            n = len(seq) - 1 if seq.includes_constant else len(seq)
        seq.prefix_size(n)
    except MuntzError as exc:
        raise UsageError(str(exc)) from None
    return seq, n


def _require(cfg: dict, key: str, lo=None, hi=None, open_lo=True, open_hi=True):
    v = cfg.get(key)
    if v is None:
        raise UsageError(f"--{key} is required")
    if lo is not None and (v < lo or (open_lo and v == lo)):
        raise UsageError(f"--{key}={v} out of range")
    if hi is not None and (v > hi or (open_hi and v == hi)):
        raise UsageError(f"--{key}={v} out of range")
    return v


def _write_csv(path: str, header: list, rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _emit(cfg: dict, payload: dict, lines: list[str]) -> None:
    if cfg.get("json"):
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        print("\n".join(lines))


def cmd_muntz_check(cfg: dict) -> int:
    seq, n = sequence_from(cfg)
    seq = seq.prefix(n)
    rep = check_muntz_condition(seq)
    _emit(cfg, {"command": "muntz-check", "sequence": seq.to_dict(), **rep.to_dict()},
          [f"partial_sum {rep.partial_sum:.10g}", f"verdict {rep.verdict} ({rep.rationale})"])
    if cfg.get("csv"):
        _write_csv(cfg["csv"], ["partial_sum", "verdict"], [[rep.partial_sum, rep.verdict]])
    return EXIT_OK


def _polynomial(cfg: dict) -> MuntzPolynomial:
    seq, _ = sequence_from(cfg)
    if not cfg.get("coef"):
        raise UsageError("--coef is required")
    try:
        return MuntzPolynomial(seq, tuple(_floats(cfg["coef"], "--coef")))
    except MuntzError as exc:
        raise UsageError(str(exc)) from None


def cmd_norm(cfg: dict) -> int:
    p = _polynomial(cfg)
    lo, hi = cfg["lo"], cfg["hi"]
    if not 0 <= lo <= hi <= 1:
        raise UsageError("need 0 <= lo <= hi <= 1")
    tol = _require(cfg, "tol", 0.0)
    cert = sup_norm_certified(p, (lo, hi), tol)
    _emit(cfg, {"command": "norm", "polynomial": p.to_dict(), "certificate": cert.to_dict()},
          [f"sup norm on [{lo}, {hi}] in [{cert.lower:.12g}, {cert.upper:.12g}]",
           f"witness t = {cert.witness_t:.12g}"])
    if cfg.get("csv"):
        _write_csv(cfg["csv"], ["lo", "hi", "lower", "upper", "witness_t"],
                   [[lo, hi, cert.lower, cert.upper, cert.witness_t]])
    return EXIT_OK


def cmd_bernstein(cfg: dict) -> int:
    seq, n = sequence_from(cfg)
    a = _require(cfg, "a", 0.0, 1.0)
    if n < 1:
        raise UsageError("--n must be at least 1")
    try:
        est = bernstein_constant(seq, n, a)
    except MuntzError as exc:
        raise UsageError(str(exc)) from None
    _emit(cfg, {"command": "bernstein", **est.to_dict()},
          [f"N {n}  a {a}", f"lower {est.lower:.6f}", f"upper_heuristic {est.upper_heuristic:.6f}",
           f"converged {est.converged}",
           "witness " + ", ".join(f"{c:.6g}" for c in est.witness.coefficients)])
    if cfg.get("csv"):
        _write_csv(cfg["csv"], BERNSTEIN_CSV_HEADER, [est.csv_row()])
    return EXIT_OK


def _anchors(cfg: dict) -> list[float]:
    if cfg.get("anchors"):
        return _floats(cfg["anchors"], "--anchors")
    m = _require(cfg, "m")
    if m < 1:
        raise UsageError("--m must be at least 1")
    return default_anchors(m)


def cmd_grid(cfg: dict) -> int:
    seq, n = sequence_from(cfg)
    eps = _require(cfg, "eps", 0.0, 1.0)
    anchors = _anchors(cfg)
    if cfg.get("constants"):
        constants = _floats(cfg["constants"], "--constants")
    else:
        constants = k_sequence(seq, n, anchors, cfg["safety"])
    try:
        grid = build_grid(seq, n, eps, anchors, constants)
    except MuntzError as exc:
        raise UsageError(str(exc)) from None
    bad = spacing_violations(grid)
    _emit(cfg, {"command": "grid", "grid": grid.to_dict(), "spacing_violations": len(bad)},
          [f"{len(grid.points)} points over {len(grid.anchors) - 1} bands, last anchor "
           f"{grid.anchors[-1]}", f"spacing violations {len(bad)}"])
    if cfg.get("csv"):
        if cfg.get("coef"):
            f = MuntzPolynomial(seq, tuple(_floats(cfg["coef"], "--coef")))
            _write_csv(cfg["csv"], ["index", "s", "f(s)"], embedding_csv_rows(f, grid))
        else:
            _write_csv(cfg["csv"], ["index", "s"],
                       [[i, float(s)] for i, s in enumerate(grid.points)])
    return EXIT_FAIL if bad else EXIT_OK


def _trials(cfg: dict) -> int:
    t = _require(cfg, "trials")
    if t < 1:
        raise UsageError("--trials must be at least 1")
    return t


def cmd_verify_embedding(cfg: dict) -> int:
    seq, n = sequence_from(cfg)
    eps = _require(cfg, "eps", 0.0, 1.0)
    trials = _trials(cfg)
    m = _require(cfg, "m")
    if m < 1:
        raise UsageError("--m must be at least 1")
    constants = _floats(cfg["constants"], "--constants") if cfg.get("constants") else None
    try:
        rep = verify_sandwich(seq, n, eps, trials, cfg["seed"], m, cfg["safety"],
                              constants=constants)
    except MuntzError as exc:
        raise UsageError(str(exc)) from None
    _emit(cfg, {"command": "verify-embedding", "sequence": seq.prefix(n).to_dict(),
                **rep.to_dict()},
          [f"trials {rep.trials}  epsilon {eps}", f"min_ratio {rep.min_ratio:.9f}",
           f"max_ratio {rep.max_ratio:.12f}", f"violations {rep.violations}",
           f"band_violations {rep.band_violations}"])
    if cfg.get("csv"):
        _write_csv(cfg["csv"], EMBEDDING_CSV_HEADER, [rep.csv_row()])
    return EXIT_OK if rep.passed and rep.band_violations == 0 else EXIT_FAIL


def _defect_out(cfg: dict, rep, extra: list[str]) -> None:
    _emit(cfg, {"command": cfg["command"], **rep.to_dict()},
          extra + [f"extremal_value {rep.extremal_value:.9f}", f"violations {rep.violations}"])
    if cfg.get("csv"):
        _write_csv(cfg["csv"], DEFECT_CSV_HEADER, [rep.csv_row()])


def cmd_lasq(cfg: dict) -> int:
    seq, n = sequence_from(cfg)
    x = _require(cfg, "x", 0.0, 1.0)
    trials = _trials(cfg)
    try:
        rep = lasq_empirical_defect(seq, n, x, trials, cfg["seed"], cfg["refine"],
                                    cfg["safety"])
    except MuntzError as exc:
        raise UsageError(str(exc)) from None
    _defect_out(cfg, rep, [f"a {rep.a:.9g}  epsilon_star {rep.threshold_epsilon_star:.9g}",
                           f"threshold {1 + rep.threshold_epsilon_star - 1e-4:.9f}"])
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_half_ball(cfg: dict) -> int:
    seq, n = sequence_from(cfg)
    trials = _trials(cfg)
    try:
        if cfg.get("a") is not None:
            a = _require(cfg, "a", 0.0, 1.0, open_lo=False, open_hi=False)
            c_used = None
        else:
            x = _require(cfg, "x", 0.0, 1.0)
            a, c_used = small_ball_radius(seq, n, x, cfg["safety"])
        rep = half_ball_check(seq, n, a, trials, cfg["seed"])
    except MuntzError as exc:
        raise UsageError(str(exc)) from None
    if c_used is not None:
        rep = replace(rep, x=cfg["x"])
    head = [f"a {a:.9g}" + (f"  c_used {c_used:.9g}" if c_used is not None else "")]
    _defect_out(cfg, rep, head)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_oh_probe(cfg: dict) -> int:
    seq, n = sequence_from(cfg)
    trials = _trials(cfg)
    try:
        if cfg.get("coef"):
            xp = normalized(_polynomial(cfg))
        else:
            # default x = t**lam_first on the constant-free span
            seq = seq.prefix(n).constant_free()
            n = len(seq)
            xp = monomial(seq, 0)
        rep = oh_defect_probe([xp], seq, n, trials, cfg["seed"])
    except MuntzError as exc:
        raise UsageError(str(exc)) from None
    _defect_out(cfg, rep, ["observed sup over y of min ||x +- y|| (reported, not asserted)"])
    return EXIT_OK


COMMANDS = {
    "muntz-check": cmd_muntz_check,
    "norm": cmd_norm,
    "bernstein": cmd_bernstein,
    "grid": cmd_grid,
    "verify-embedding": cmd_verify_embedding,
    "lasq": cmd_lasq,
    "half-ball": cmd_half_ball,
    "oh-probe": cmd_oh_probe,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        if args.command in RANDOMIZED and cfg.get("seed") is None:
            raise UsageError("--seed is required for randomized commands")
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"muntz-lab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BernsteinError, CertificationError) as exc:
        print(f"muntz-lab {args.command}: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
