"""Command-line interface.

Exit codes: 0 success, 1 domain error, 2 input/output or parse error.  Errors
are written to stderr as JSON objects ``{"error": ..., "message": ...}``.
Floats are printed with 17 significant digits.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from . import cm, laplace, qdichotomy, zoo
from ._parallel import parallel_map
from .classical import (
    ClassicalDichotomy,
    build_channels,
    interconvertible_classical,
    lorenz_curve,
    minimal_form,
    relative_majorizes,
)
from .errors import DichotomyError, NotPure

SUBCOMMANDS = (
    "divergence", "minimal-form", "channels", "lorenz", "check-convert", "decide-from-divergences",
    "interconvertible", "simulate-classical", "cm-check", "thermo", "sample",
)


class ParseError(Exception):
    """Malformed or unreadable input."""


# ---------------------------------------------------------------------------
# Serialisation


def format_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats at 17 significant digits and infinities as strings."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, Fraction):
        return json.dumps(f"{obj.numerator}/{obj.denominator}")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in seq) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def matrix_json(M: np.ndarray) -> dict:
    M = np.asarray(M, dtype=complex)
    return {"dim": M.shape[0], "re": M.real.tolist(), "im": M.imag.tolist()}


# ---------------------------------------------------------------------------
# Input


def _read_json(path: str) -> Any:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc


def parse_matrix(obj: Any, where: str) -> np.ndarray:
    try:
        n = int(obj["dim"])
        re = np.array(obj["re"], dtype=float)
        im = np.array(obj.get("im", np.zeros((n, n))), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{where}: malformed matrix ({exc})") from exc
    if re.shape != (n, n) or im.shape != (n, n):
        raise ParseError(f"{where}: expected {n}x{n} 're' and 'im' arrays")
    return re + 1j * im


def _parse_entries(v: Any, where: str) -> list:
    if not isinstance(v, list):
        raise ParseError(f"{where}: expected a list")
    out = []
    for x in v:
        if isinstance(x, bool) or not isinstance(x, (int, float, str)):
            raise ParseError(f"{where}: bad entry {x!r}")
        if isinstance(x, str):
            try:
                x = Fraction(x.strip())
            except (ValueError, ZeroDivisionError) as exc:
                raise ParseError(f"{where}: bad rational {x!r}") from exc
        out.append(x)
    return out


def load_dichotomy(path: str):
    """Classical ``{"p", "q"}`` or quantum ``{"rho", "sigma"}`` dichotomy from a JSON file."""
    obj = _read_json(path)
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: expected a JSON object")
    if "p" in obj and "q" in obj:
        p = _parse_entries(obj["p"], f"{path}:p")
        q = _parse_entries(obj["q"], f"{path}:q")
        if any(isinstance(x, float) for x in p + q):
            return ClassicalDichotomy.normalized(p, q)
        return ClassicalDichotomy(tuple(p), tuple(q))
    if "rho" in obj and "sigma" in obj:
        return qdichotomy.QuantumDichotomy(parse_matrix(obj["rho"], f"{path}:rho"),
                                           parse_matrix(obj["sigma"], f"{path}:sigma"))
    raise ParseError(f"{path}: expected keys p/q or rho/sigma")


def load_classical(path: str) -> ClassicalDichotomy:
    d = load_dichotomy(path)
    if not isinstance(d, ClassicalDichotomy):
        raise ParseError(f"{path}: expected a classical dichotomy with keys p and q")
    return d


def load_quantum(path: str) -> qdichotomy.QuantumDichotomy:
    d = load_dichotomy(path)
    return qdichotomy.QuantumDichotomy.from_classical(d) if isinstance(d, ClassicalDichotomy) else d


def load_samples(path: str) -> laplace.DivergenceSamples:
    obj = _read_json(path)
    if not isinstance(obj, dict) or not {"interval", "alphas", "values"} <= set(obj):
        raise ParseError(f"{path}: expected keys interval, alphas, values")
    return laplace.DivergenceSamples.from_json(obj)


# ---------------------------------------------------------------------------
# Run configuration


@dataclass
class RunConfig:
    subcommand: str
    input_paths: list
    alpha_grid: list = field(default_factory=list)
    family: zoo.Family | None = None
    output_path: str | None = None
    format: str = "json"
    seed: int = 0
    options: dict = field(default_factory=dict)


def _family_range_ok(family: zoo.Family, alpha: float, for_g: bool = False) -> bool:
    if for_g:
        return alpha > 0
    tag = family.tag
    if tag in ("petz", "maximal", "log-euclidean"):
        return 0 <= alpha <= 2
    if tag == "sandwiched":
        return alpha >= 0.5
    if tag == "measured":
        return alpha > 0
    return alpha >= 0


class DomainError(DichotomyError):
    pass


def _validate_grid(cfg: RunConfig, for_g: bool = False) -> None:
    if not cfg.alpha_grid:
        raise DomainError("no alpha values given")
    bad = [a for a in cfg.alpha_grid if not _family_range_ok(cfg.family, a, for_g)]
    if bad:
        raise DomainError(f"alpha values {bad} outside the admissible range of {cfg.family}")


def _divergence_record(v: zoo.DivergenceValue) -> dict:
    return {"alpha": v.alpha, "value": v.value, "dpi_valid": v.dpi_valid,
            "limit_used": v.limit_used, "lower_bound": v.lower_bound, "flags": list(v.flags)}


def _cmd_divergence(cfg: RunConfig):
    d = load_dichotomy(cfg.input_paths[0])
    _validate_grid(cfg)
    vals = parallel_map(lambda a: zoo.divergence(d, cfg.family, a), sorted(cfg.alpha_grid))
    if cfg.format == "csv":
        return _csv(["alpha", "value", "dpi_valid"], [[v.alpha, v.value, int(v.dpi_valid)] for v in vals])
    return {"family": str(cfg.family), "results": [_divergence_record(v) for v in vals]}


def _cmd_minimal_form(cfg: RunConfig):
    return minimal_form(load_classical(cfg.input_paths[0])).to_json()


def _cmd_channels(cfg: RunConfig):
    d = load_classical(cfg.input_paths[0])
    T, R = build_channels(d)
    return {"T": T.to_json(), "R": R.to_json()}


def _cmd_lorenz(cfg: RunConfig):
    curve = lorenz_curve(load_classical(cfg.input_paths[0]), simplify=cfg.options.get("simplify", False))
    if cfg.format == "json":
        return {"points": [[x, y] for x, y in curve.points]}
    rows = [[float(x), float(y), f"{x.numerator}/{x.denominator}", f"{y.numerator}/{y.denominator}"]
            for x, y in curve.points]
    return _csv(["x", "y", "x_exact", "y_exact"], rows)


def _cmd_check_convert(cfg: RunConfig):
    d1, d2 = load_classical(cfg.input_paths[0]), load_classical(cfg.input_paths[1])
    a, b = relative_majorizes(d1, d2), relative_majorizes(d2, d1)
    return {"convertible_1_to_2": a, "convertible_2_to_1": b, "interconvertible": a and b}


def _cmd_decide(cfg: RunConfig):
    s1, s2 = load_samples(cfg.input_paths[0]), load_samples(cfg.input_paths[1])
    dec = laplace.decide_conversion_from_divergences(s1, s2)
    return {"convertible_1_to_2": dec.convertible_1_to_2, "convertible_2_to_1": dec.convertible_2_to_1,
            "interconvertible": dec.interconvertible,
            "minimal_forms": [mf.to_json() for mf in dec.minimal_forms]}


def _cmd_interconvertible(cfg: RunConfig):
    d1, d2 = load_dichotomy(cfg.input_paths[0]), load_dichotomy(cfg.input_paths[1])
    if isinstance(d1, ClassicalDichotomy) and isinstance(d2, ClassicalDichotomy):
        res = interconvertible_classical(d1, d2)
        out = {"path": "classical", "interconvertible": res.interconvertible}
        if res.interconvertible:
            out["forward"] = res.forward.to_json()
            out["backward"] = res.backward.to_json()
        return out
    q1 = d1 if isinstance(d1, qdichotomy.QuantumDichotomy) else qdichotomy.QuantumDichotomy.from_classical(d1)
    q2 = d2 if isinstance(d2, qdichotomy.QuantumDichotomy) else qdichotomy.QuantumDichotomy.from_classical(d2)
    if not (q1.is_pure() and q2.is_pure()):
        raise NotPure("quantum interconversion is implemented for pure rho only")
    pair = qdichotomy.pure_state_channels(q1, q2)
    out = {"path": "pure-state", "interconvertible": pair is not None}
    if pair is not None:
        out["forward_kraus"] = [matrix_json(K) if K.shape[0] == K.shape[1] else
                                {"rows": K.shape[0], "cols": K.shape[1], "re": K.real.tolist(), "im": K.imag.tolist()}
                                for K in pair.forward]
        out["backward_kraus"] = [matrix_json(K) if K.shape[0] == K.shape[1] else
                                 {"rows": K.shape[0], "cols": K.shape[1], "re": K.real.tolist(), "im": K.imag.tolist()}
                                 for K in pair.backward]
        out["residuals"] = list(pair.residuals)
    return out


def _cmd_simulate(cfg: RunConfig):
    d = load_quantum(cfg.input_paths[0])
    method = cfg.options.get("method", "ns")
    if method == "ns":
        p, q = qdichotomy.nussbaum_szkola_vectors(d)
    else:
        p, q = qdichotomy.maximal_simulation_vectors(d)
    return {"method": method, "p": [float(x) for x in p], "q": [float(x) for x in q]}


def _cmd_cm_check(cfg: RunConfig):
    d = load_dichotomy(cfg.input_paths[0])
    _validate_grid(cfg, for_g=True)
    max_order = cfg.options.get("max_order", 4)
    if isinstance(d, ClassicalDichotomy):
        d = qdichotomy.QuantumDichotomy.from_classical(d)
    if cfg.format == "csv":
        rows = cm.derivative_curves(d, cfg.family, sorted(cfg.alpha_grid), max_order)
        return cm.curves_to_csv(rows, max_order)
    return cm.cm_check(d, cfg.family, cfg.alpha_grid, max_order).to_json()


def _cmd_thermo(cfg: RunConfig):
    state = _read_json(cfg.input_paths[0])
    ham = _read_json(cfg.input_paths[1])
    if not isinstance(ham, dict) or "beta" not in ham:
        raise ParseError(f"{cfg.input_paths[1]}: Hamiltonian needs a 'beta' entry")
    rho = parse_matrix(state, cfg.input_paths[0])
    H = parse_matrix(ham, cfg.input_paths[1])
    try:
        beta = float(ham["beta"])
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad beta: {exc}") from exc
    omega = qdichotomy.gibbs_state(H, beta)
    d = qdichotomy.QuantumDichotomy(rho, omega)
    log_z = qdichotomy.log_partition(H, beta)
    _validate_grid(cfg)
    vals = parallel_map(lambda a: zoo.divergence(d, cfg.family, a), sorted(cfg.alpha_grid))
    rows = [{"alpha": v.alpha, "divergence": v.value, "free_energy": (v.value - log_z) / beta,
             "dpi_valid": v.dpi_valid} for v in vals]
    if cfg.format == "csv":
        return _csv(["alpha", "divergence", "free_energy"], [[r["alpha"], r["divergence"], r["free_energy"]] for r in rows])
    return {"family": str(cfg.family), "beta": beta, "log_partition": log_z, "results": rows}


def _cmd_sample(cfg: RunConfig):
    d = load_classical(cfg.input_paths[0])
    o = cfg.options
    dps = o.get("dps", laplace.DEFAULT_DPS)
    return laplace.sample_divergences(d, tuple(o.get("interval", (0.05, 0.95))), o.get("count"),
                                      None if dps == 0 else dps).to_json()


def _csv(header: list, rows: list) -> str:
    def cell(v):
        return format(v, ".17g") if isinstance(v, float) else str(v)
    return "\n".join([",".join(header)] + [",".join(cell(v) for v in r) for r in rows]) + "\n"


_DISPATCH = {
    "divergence": _cmd_divergence,
    "minimal-form": _cmd_minimal_form,
    "channels": _cmd_channels,
    "lorenz": _cmd_lorenz,
    "check-convert": _cmd_check_convert,
    "decide-from-divergences": _cmd_decide,
    "interconvertible": _cmd_interconvertible,
    "simulate-classical": _cmd_simulate,
    "cm-check": _cmd_cm_check,
    "thermo": _cmd_thermo,
    "sample": _cmd_sample,
}


def _error(kind: str, exc: BaseException) -> None:
    sys.stderr.write(json.dumps({"error": kind, "type": type(exc).__name__, "message": str(exc)}) + "\n")


def run(cfg: RunConfig) -> int:
    """Execute one subcommand; returns the process exit code."""
    try:
        result = _DISPATCH[cfg.subcommand](cfg)
        text = result if isinstance(result, str) else dumps(result) + "\n"
    except ParseError as exc:
        _error("parse", exc)
        return 2
    except (DichotomyError, ValueError, ArithmeticError) as exc:
        _error("domain", exc)
        return 1
    try:
        if cfg.output_path in (None, "-"):
            sys.stdout.write(text)
        else:
            with open(cfg.output_path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
    except OSError as exc:
        _error("io", exc)
        return 2
    return 0


# ---------------------------------------------------------------------------
# Argument parsing


def _alpha_grid(args) -> list[float]:
    grid = list(args.alpha or [])
    if args.alpha_range:
        start, stop, num = args.alpha_range
        grid += [float(x) for x in np.linspace(float(start), float(stop), int(num))]
    return sorted(set(grid))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dichotomy", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="subcommand", required=True)

    def common(p, n_inputs, alphas=False, family=None, fmt="json"):
        p.add_argument("inputs", nargs=n_inputs, metavar="INPUT")
        p.add_argument("-o", "--output", default=None, help="output file (default stdout)")
        p.add_argument("--format", choices=("json", "csv"), default=fmt)
        p.add_argument("--seed", type=int, default=0)
        if alphas:
            p.add_argument("--alpha", type=float, nargs="+", help="alpha values")
            p.add_argument("--alpha-range", nargs=3, metavar=("START", "STOP", "NUM"),
                           help="NUM equispaced alphas from START to STOP")
        if family:
            p.add_argument("--family", default=family,
                           help='classical, petz, sandwiched, maximal, alpha-z:<z>, log-euclidean, '
                                'measured:<restarts>:<seed>')
        return p

    common(sub.add_parser("divergence", help="Renyi divergences over an alpha sweep"), 1, True, "sandwiched")
    common(sub.add_parser("minimal-form", help="minimal form of a classical dichotomy"), 1)
    common(sub.add_parser("channels", help="stochastic maps to and from the minimal form"), 1)
    p = common(sub.add_parser("lorenz", help="Lorenz curve breakpoints"), 1, fmt="csv")
    p.add_argument("--simplify", action="store_true", help="drop points interior to straight segments")
    common(sub.add_parser("check-convert", help="relative majorization in both directions"), 2)
    common(sub.add_parser("decide-from-divergences", help="convertibility from divergence samples"), 2)
    common(sub.add_parser("interconvertible", help="exact classical or pure-state interconversion"), 2)
    p = common(sub.add_parser("simulate-classical", help="Nussbaum-Szkola or maximal classical simulation"), 1)
    p.add_argument("--method", choices=("ns", "maximal"), default="ns")
    p = common(sub.add_parser("cm-check", help="complete-monotonicity test of g"), 1, True, "sandwiched")
    p.add_argument("--max-order", type=int, default=4)
    common(sub.add_parser("thermo", help="generalised free energies against a Gibbs state"), 2, True, "sandwiched")
    p = common(sub.add_parser("sample", help="sample divergences of a classical dichotomy"), 1)
    p.add_argument("--interval", type=float, nargs=2, default=(0.05, 0.95))
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--dps", type=int, default=laplace.DEFAULT_DPS, help="digits; 0 for double precision")
    return ap


def config_from_args(args) -> RunConfig:
    options = {k: getattr(args, k) for k in ("simplify", "method", "max_order", "interval", "count", "dps")
               if hasattr(args, k)}
    family = None
    if hasattr(args, "family"):
        family = zoo.Family.parse(args.family)
        if family.tag == "measured" and ":" not in args.family:
            family = zoo.Family("measured", restarts=family.restarts, seed=args.seed)
    grid = _alpha_grid(args) if hasattr(args, "alpha") else []
    return RunConfig(args.subcommand, list(args.inputs), grid, family, args.output, args.format, args.seed, options)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        cfg = config_from_args(args)
    except (ValueError, DichotomyError) as exc:
        _error("parse", exc)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
