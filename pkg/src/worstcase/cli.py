"""Command-line front end: ``generate``, ``run``, ``verify``, ``sweep`` and ``plot``.

Exit codes: 0 all verifications pass, 1 verification mismatch, 2 usage or
configuration error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Optional

from . import hermite
from .analysis import (
    ComplexityReport,
    check_crs_membership,
    check_malpha_membership,
    estimate_smoothness,
    fit_complexity_slope,
    trace_from_csv,
    verify_lower_bound_run,
)
from .errors import IncompleteTraceError, InvalidConfigError, InvalidInputError, WorstCaseError
from .generators import FAMILIES, generate, rate
from .methods import METHODS, MethodConfig
from .methods.trace import write_trace_csv
from .plotting import write_figure
from .storage import atomic_write_text, csv_text

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
SLOPE_TOL = 0.1
GENERATOR_ARGS = {
    "malpha": {"theta_rule", "lambda_rule", "kappa_rg", "kappa_lambda"},
    "newton2d": {"nu_rule", "kappa_rg"},
    "sd": set(),
    "crs": {"sigma_bar", "kappa_rg", "eta", "theta_rule", "lambda_rule", "kappa2"},
}
GENERATOR_KEYS = set().union(*GENERATOR_ARGS.values())


class IOFailure(Exception):
    pass


@dataclass
class ExperimentSpec:
    """Everything one CLI command needs; built from a ``key=value`` file and flags."""

    family: str = "malpha"
    methods: tuple = ("newton",)
    eps: tuple = (0.1,)
    alphas: tuple = (1.0,)
    params: dict = field(default_factory=dict)
    out: str = "."
    plot: bool = False
    preset: Optional[str] = None
    seed: int = 0  # reserved for sampling layouts; the constructions are deterministic

    def validate(self) -> "ExperimentSpec":
        if self.family not in FAMILIES:
            raise InvalidConfigError(f"unknown family {self.family!r}, expected one of {FAMILIES}")
        for m in self.methods:
            if m not in METHODS:
                raise InvalidConfigError(f"unknown method {m!r}, expected one of {METHODS}")
        if not self.eps or not self.alphas or not self.methods:
            raise InvalidConfigError("eps, alpha and method lists must be non-empty")
        for e in self.eps:
            if not 0.0 < e < 1.0:
                raise InvalidConfigError(f"eps must lie in (0, 1), got {e}")
        for a in self.alphas:
            if not 0.0 <= a <= 1.0:
                raise InvalidConfigError(f"alpha must lie in [0, 1], got {a}")
        return self


def read_config(path) -> dict:
    """Parse a flat ``key=value`` file; ``#`` starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IOFailure(f"cannot read config {path}: {exc}") from exc
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidConfigError(f"{path}:{n}: expected key=value")
        key, value = (p.strip() for p in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _floats(v) -> tuple:
    if isinstance(v, str):
        v = [p for p in v.replace(",", " ").split() if p]
    try:
        return tuple(float(p) for p in v)
    except ValueError as exc:
        raise InvalidConfigError(f"not a number list: {v!r}") from exc


def build_spec(args) -> ExperimentSpec:
    cfg = read_config(args.config) if getattr(args, "config", None) else {}
    spec = ExperimentSpec()
    names = {f.name for f in fields(ExperimentSpec)}
    params = {}
    for key, value in cfg.items():
        if key in ("method", "methods"):
            spec.methods = tuple(p for p in value.replace(",", " ").split() if p)
        elif key == "eps":
            spec.eps = _floats(value)
        elif key in ("alpha", "alphas"):
            spec.alphas = _floats(value)
        elif key == "plot":
            spec.plot = value.lower() in ("1", "true", "yes", "on")
        elif key == "seed":
            spec.seed = int(value)
        elif key in names:
            setattr(spec, key, value)
        else:
            params[key] = value
    if getattr(args, "family", None):
        spec.family = args.family
    if getattr(args, "method", None):
        spec.methods = (args.method,)
    if getattr(args, "eps", None) is not None:
        spec.eps = tuple(args.eps) if isinstance(args.eps, list) else (args.eps,)
    if getattr(args, "alpha", None) is not None:
        spec.alphas = tuple(args.alpha) if isinstance(args.alpha, list) else (args.alpha,)
    if getattr(args, "eps_h", None) is not None:
        params["eps_h"] = args.eps_h
    if getattr(args, "out", None):
        spec.out = args.out
    if getattr(args, "preset", None):
        spec.preset = args.preset
    if getattr(args, "svg", None):
        spec.plot = True
    spec.params = params
    return spec.validate()


def _method_overrides(spec: ExperimentSpec) -> dict:
    keys = {f.name for f in fields(MethodConfig)} - {"method", "eps"}
    params = {k: v for k, v in spec.params.items() if k not in GENERATOR_KEYS}
    unknown = set(params) - keys
    if unknown:
        raise InvalidConfigError(f"unknown parameters {sorted(unknown)}")
    if not params:
        return {}
    coerced = MethodConfig.from_mapping({"method": "newton", "eps": 0.5, **params}).to_dict()
    return {k: coerced[k] for k in params}


def _generator_kwargs(spec: ExperimentSpec) -> dict:
    out = {}
    for k, v in spec.params.items():
        if k not in GENERATOR_KEYS:
            continue
        if isinstance(v, str) and k not in ("theta_rule", "lambda_rule", "nu_rule"):
            v = float(v)
        out[k] = v
    if spec.preset == "figure":
        out.setdefault("lambda_rule", "figure")
    return out


def _path(spec, name):
    return os.path.join(spec.out, name)


def _write(fn, *a):
    try:
        fn(*a)
    except OSError as exc:
        raise IOFailure(str(exc)) from exc


def _load_objective(path):
    try:
        return hermite.load(path)
    except OSError as exc:
        raise IOFailure(f"cannot read {path}: {exc}") from exc
    except (ValueError, InvalidInputError) as exc:
        raise IOFailure(f"cannot parse {path}: {exc}") from exc


def cmd_generate(args) -> int:
    spec = build_spec(args)
    eps, alpha = spec.eps[0], spec.alphas[0]
    kw = _generator_kwargs(spec)
    allowed = GENERATOR_ARGS[spec.family]
    bad = set(kw) - allowed
    if bad:
        raise InvalidConfigError(f"{spec.family} does not take {sorted(bad)}")
    if spec.family == "malpha":
        obj, gt = generate("malpha", eps, alpha, **kw)
    else:
        obj, gt = generate(spec.family, eps, **kw)
    _write(hermite.save, obj, _path(spec, "fn.json"))
    if isinstance(gt, tuple):
        _write(gt[0].write_csv, _path(spec, "trace.csv"))
        _write(gt[1].write_csv, _path(spec, "trace_y.csv"))
        K = gt[0].k_target
    else:
        _write(gt.write_csv, _path(spec, "trace.csv"))
        K = gt.k_target
    if spec.plot:
        _write(lambda p: write_figure(obj, p, eps=eps), args.svg or _path(spec, "figure.svg"))
    print(f"{spec.family}: eps={eps} K={K} segments={len(obj.segments)} -> {spec.out}")
    return EXIT_OK


def cmd_run(args) -> int:
    spec = build_spec(args)
    eps, alpha, method = spec.eps[0], spec.alphas[0], spec.methods[0]
    overrides = _method_overrides(spec)
    rep = verify_lower_bound_run(spec.family, method, eps, alpha, preset=spec.preset, **overrides)
    dim = 2 if spec.family == "newton2d" else 1
    _write(hermite.save, rep.objective, _path(spec, "fn.json"))
    _write(write_trace_csv, rep.trace, args.trace or _path(spec, "trace.csv"), dim)
    report = ComplexityReport(runs=[rep])
    _write(atomic_write_text, _path(spec, "report.json"), report.to_json() + "\n")
    status = "PASS" if rep.passed else "FAIL"
    print(f"{status} {spec.family}/{method} eps={eps} alpha={rep.alpha}: count {rep.count}, predicted {rep.predicted}, "
          f"reason {rep.termination_reason}, final |g| {rep.final_gnorm!r}")
    if not rep.passed:
        print(f"mismatch: count {rep.count} vs predicted {rep.predicted} "
              f"(difference {rep.count - rep.predicted}); prior gradients above tolerance: {rep.prior_above_tol}",
              file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_verify(args) -> int:
    obj = _load_objective(args.fn)
    alpha = args.alpha if args.alpha is not None else 1.0
    try:
        trace = trace_from_csv(args.trace, obj)
    except OSError as exc:
        raise IOFailure(f"cannot read {args.trace}: {exc}") from exc
    except (ValueError, KeyError) as exc:
        raise IOFailure(f"cannot parse {args.trace}: {exc}") from exc
    report = ComplexityReport()
    if args.check == "crs":
        report.membership["crs"] = check_crs_membership(
            trace, args.sigma_bar, args.kappa_rg, args.eta, args.kappa1, args.kappa2
        )
    else:
        report.membership["malpha"] = check_malpha_membership(
            trace, alpha, args.kappa_rg, args.kappa_rs, args.kappa_lambda, args.kappa_s
        )
    report.smoothness = estimate_smoothness(obj, alpha)
    text = report.to_json()
    if args.out:
        _write(atomic_write_text, os.path.join(args.out, "verify.json"), text + "\n")
    for name, m in report.membership.items():
        print(f"{'PASS' if m.passed else 'FAIL'} {name} membership; first violation: {m.first_violation}"
              + (f"; global: {m.global_checks}" if m.global_checks else ""))
    sm = report.smoothness
    print(f"{'PASS' if sm.certificate_dominates else 'FAIL'} smoothness: sampled Hölder {sm.holder_sample:.6g} "
          f"<= certificate {sm.holder_certificate:.6g}; range [{sm.f_min:.6g}, {sm.f_max:.6g}]")
    return EXIT_OK if report.passed else EXIT_MISMATCH


def _sweep_cell(family, method, eps, alpha, preset, overrides):
    rep = verify_lower_bound_run(family, method, eps, alpha, preset=preset, **overrides)
    return rep


def cmd_sweep(args) -> int:
    spec = build_spec(args)
    if len(set(spec.eps)) < 3:
        raise InvalidConfigError("a sweep needs at least three distinct eps values for a slope fit")
    overrides = _method_overrides(spec)
    method = spec.methods[0]
    family_alpha = {"newton2d": 0.0, "sd": 0.0, "crs": 1.0}
    alphas = sorted({family_alpha.get(spec.family, a) for a in spec.alphas})
    cells = sorted({(a, e) for a in alphas for e in spec.eps}, key=lambda c: (c[0], -c[1]))
    with ThreadPoolExecutor() as pool:
        futures = {c: pool.submit(_sweep_cell, spec.family, method, c[1], c[0], spec.preset, overrides) for c in cells}
        results = {c: fut.result() for c, fut in futures.items()}
    rows, ok = [], True
    fits = {}
    for a in alphas:
        pts = [(e, results[(a, e)].count) for (aa, e) in cells if aa == a]
        fits[a] = fit_complexity_slope(pts, a)
    for (a, e) in cells:
        rep, fit = results[(a, e)], fits[a]
        ok = ok and rep.passed
        rows.append([e, a, rep.count, rep.predicted, rep.count / rep.predicted, rep.passed,
                     fit.slope, fit.intercept, rate(a)])
    for a, fit in fits.items():
        slope_ok = abs(fit.slope - rate(a)) <= SLOPE_TOL
        ok = ok and slope_ok
        print(f"{'PASS' if slope_ok else 'FAIL'} alpha={a}: slope {fit.slope:.4f} (predicted {rate(a):.4f}), "
              f"count/predicted in [{fit.min_ratio:.6g}, {fit.max_ratio:.6g}]")
    header = ["eps", "alpha", "count", "predicted", "ratio", "passed", "slope", "intercept", "predicted_slope"]
    _write(atomic_write_text, _path(spec, "sweep.csv"), csv_text(header, rows))
    return EXIT_OK if ok else EXIT_MISMATCH


def _parse_range(text):
    if not text:
        return None
    try:
        a, b = (float(p) for p in text.split(":"))
    except ValueError as exc:
        raise InvalidConfigError(f"range must look like a:b, got {text!r}") from exc
    return (a, b)


def cmd_plot(args) -> int:
    obj = _load_objective(args.fn)
    out = args.svg or "figure.svg"
    _write(lambda p: write_figure(obj, p, eps=args.eps, xrange=_parse_range(args.range),
                                  zoom_iterations=args.zoom), out)
    print(f"wrote {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="worstcase", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, multi=False):
        sp.add_argument("--family", choices=FAMILIES)
        sp.add_argument("--eps", type=float, nargs="+" if multi else None)
        sp.add_argument("--alpha", type=float, nargs="+" if multi else None)
        sp.add_argument("--config", help="flat key=value file; flags override its entries")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--preset", choices=("figure",), help="multiplier preset of the general family")

    g = sub.add_parser("generate", help="write fn.json and the ground-truth trace")
    common(g)
    g.add_argument("--svg", help="also write the six-panel figure here")
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("run", help="run a method on its matching family and check the count")
    common(r)
    r.add_argument("--method", choices=METHODS)
    r.add_argument("--eps-h", type=float)
    r.add_argument("--trace", help="trace CSV path (default OUT/trace.csv)")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="class membership and smoothness of a trace and objective")
    v.add_argument("--fn", required=True)
    v.add_argument("--trace", required=True)
    v.add_argument("--alpha", type=float)
    v.add_argument("--check", choices=("malpha", "crs"), default="malpha")
    v.add_argument("--kappa-rg", type=float, default=0.0)
    v.add_argument("--kappa-rs", type=float, default=math.inf)
    v.add_argument("--kappa-lambda", type=float)
    v.add_argument("--kappa-s", type=float, default=1.0)
    v.add_argument("--sigma-bar", type=float, default=1.0)
    v.add_argument("--eta", type=float, default=0.5)
    v.add_argument("--kappa1", type=float, default=0.0)
    v.add_argument("--kappa2", type=float, default=0.0)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="counts over an (eps, alpha) grid with slope fits")
    common(s, multi=True)
    s.add_argument("--method", choices=METHODS)
    s.add_argument("--eps-h", type=float)
    s.set_defaults(func=cmd_sweep)

    pl = sub.add_parser("plot", help="six-panel SVG of f, f', f''")
    pl.add_argument("--fn", required=True)
    pl.add_argument("--svg")
    pl.add_argument("--eps", type=float, help="guide lines at +-eps (default: inferred)")
    pl.add_argument("--range", help="x range of the top row as a:b (default [0, x_K])")
    pl.add_argument("--zoom", type=int, default=10, help="iterations shown in the bottom row")
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InvalidConfigError, IncompleteTraceError, InvalidInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except WorstCaseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
