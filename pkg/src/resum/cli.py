"""Command-line front end.

    resum eval --model hurwitz:a=1,b=1 --point -3
    resum coeffs --model logmix:b=2 --k 1..5
    resum corpus
    resum jumps --model hurwitz:a=1,b=0.5 --t 1.5,2,4
    resum singularity --model hurwitz:a=1,b=0.5
    resum borel --model-file alt.json --x 5,10,20
    resum scan --model hurwitz:a=1,b=1 --radii 10,100,1000 --directions 3.14159

Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .analysis import decay_scan, jump_check, singularity_type
from .errors import DomainError, OnCutError, ResumError
from .model import BUILTINS, CoefficientModel, builtin_model, coefficient_quadrature
from .reconstruct import GlobalFunction, borel_sum, eval_entire, eval_finite_radius

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3
DEFAULT_TOL = 1e-8
MAX_GRID = 10 ** 6
EVAL_COLUMNS = ("re_z", "im_z", "re_f", "im_f", "abs_err")


class ValidationError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


# parsing -----------------------------------------------------------------

def parse_number(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ValidationError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise ValidationError(f"not a finite number: {text!r}")
    return value


def parse_complex(text: str) -> complex:
    """Complex literal; ``i`` is accepted for the imaginary unit."""
    s = text.strip().replace(" ", "").replace("I", "j").replace("i", "j")
    if s.endswith("j") and (len(s) == 1 or s[-2] in "+-"):
        s = s[:-1] + "1j"
    try:
        value = complex(s)
    except ValueError:
        raise ValidationError(f"not a complex number: {text!r}") from None
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ValidationError(f"not a finite complex number: {text!r}")
    return value


def parse_model_spec(text: str) -> CoefficientModel:
    """``name`` or ``name:key=value,key=value``."""
    name, _, rest = text.partition(":")
    name = name.strip()
    if name not in BUILTINS:
        raise ValidationError(f"unknown model {name!r}; builtins are {', '.join(BUILTINS)}")
    params = {}
    if rest.strip():
        for item in rest.split(","):
            key, eq, value = item.partition("=")
            if not eq or not key.strip():
                raise ValidationError(f"bad model parameter {item!r}; expected key=value")
            params[key.strip()] = parse_number(value)
    try:
        return builtin_model(name, **params)
    except DomainError as exc:
        raise ValidationError(str(exc)) from None


def load_model_file(path: str) -> tuple[CoefficientModel, complex]:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON ({exc})") from None
    try:
        model = CoefficientModel.from_dict(data)
    except DomainError as exc:
        raise ValidationError(f"{path}: {exc}") from None
    f0 = data.get("f0", 0.0)
    if isinstance(f0, list) and len(f0) == 2 and all(isinstance(v, (int, float)) for v in f0):
        f0 = complex(f0[0], f0[1])
    elif isinstance(f0, (int, float)) and not isinstance(f0, bool):
        f0 = complex(f0)
    else:
        raise ValidationError(f"{path}: 'f0' must be a number or [re, im]")
    return model, f0


def parse_grid(text: str) -> list[complex]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValidationError("grid must be re0:re1:n,im0:im1:m")
    axes = []
    for part in parts:
        bits = part.split(":")
        if len(bits) != 3:
            raise ValidationError("grid must be re0:re1:n,im0:im1:m")
        lo, hi = parse_number(bits[0]), parse_number(bits[1])
        try:
            n = int(bits[2])
        except ValueError:
            raise ValidationError(f"grid count {bits[2]!r} is not an integer") from None
        if n < 1:
            raise ValidationError("grid counts must be >= 1")
        axes.append(np.linspace(lo, hi, n) if n > 1 else np.array([lo]))
    if axes[0].size * axes[1].size > MAX_GRID:
        raise ValidationError(f"grid has more than {MAX_GRID} points")
    return [complex(x, y) for x in axes[0] for y in axes[1]]


def parse_k(text: str) -> list[int]:
    out = []
    for item in text.split(","):
        lo, sep, hi = item.partition("..")
        try:
            ks = range(int(lo), int(hi) + 1) if sep else [int(lo)]
        except ValueError:
            raise ValidationError(f"bad k specification {item!r}") from None
        out.extend(ks)
    if not out or min(out) < 1:
        raise ValidationError("k values must be integers >= 1")
    if len(out) > 10_000:
        raise ValidationError("too many k values")
    return out


def parse_list(text: str) -> list[float]:
    return [parse_number(v) for v in text.split(",") if v.strip()]


def resolve_tol(value: Optional[float]) -> float:
    if value is None:
        env = os.environ.get("RESUM_TOL")
        value = parse_number(env) if env else DEFAULT_TOL
    if not 1e-14 <= value <= 1e-2:
        raise ValidationError("tol must lie in [1e-14, 1e-2]")
    return value


# output --------------------------------------------------------------------

def fmt(value) -> str:
    """Shortest round-trip text for a float (at most 17 significant digits)."""
    if isinstance(value, (bool, str)):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def emit(rows: Sequence[Sequence], columns: Sequence[str], fmt_name: str = "csv",
         path: Optional[str] = None, meta: Optional[dict] = None) -> str:
    """Render rows as CSV or JSON and write them to ``path`` (stdout if None)."""
    if not rows:
        raise ValidationError("no results to emit")
    if fmt_name == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
        text = buf.getvalue()
    elif fmt_name == "json":
        def plain(v):
            if isinstance(v, (bool, str)):
                return v
            if isinstance(v, (int, np.integer)):
                return int(v)
            v = float(v)
            return v if math.isfinite(v) else repr(v)
        doc = {"metadata": dict(meta or {}, version=__version__),
               "results": [{c: plain(v) for c, v in zip(columns, row)} for row in rows]}
        text = json.dumps(doc, indent=2) + "\n"
    else:
        raise ValidationError(f"unknown format {fmt_name!r}")
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


# commands ----------------------------------------------------------------

def _model_from_args(args) -> tuple[CoefficientModel, complex, str]:
    if args.model and args.model_file:
        raise ValidationError("give either --model or --model-file, not both")
    if args.model_file:
        model, f0 = load_model_file(args.model_file)
        label = args.model_file
    elif args.model:
        model, f0 = parse_model_spec(args.model), 0j
        label = args.model
    else:
        raise ValidationError("a model is required (--model or --model-file)")
    if getattr(args, "f0", None) is not None:
        f0 = parse_complex(args.f0)
    return model, f0, label


def cmd_eval(args, tol):
    model, f0, label = _model_from_args(args)
    points = [parse_complex(p) for p in (args.point or [])]
    if args.grid:
        points.extend(parse_grid(args.grid))
    if not points:
        raise ValidationError("give at least one --point or a --grid")
    g = GlobalFunction(model, f0, args.kind)
    fn = eval_entire if args.kind == "entire" else eval_finite_radius
    rows = []
    for z in points:
        res = fn(g, z, tol, full_output=True)
        rows.append((z.real, z.imag, res.value.real, res.value.imag, res.abs_error_estimate))
    return rows, EVAL_COLUMNS, {"model": label, "tol": tol}


def cmd_coeffs(args, tol):
    model, _, label = _model_from_args(args)
    rows = []
    for k in parse_k(args.k):
        res = coefficient_quadrature(model, k, tol)
        rows.append((k, res.value.real, res.value.imag, res.abs_error_estimate))
    return rows, ("k", "re_c", "im_c", "abs_err"), {"model": label, "tol": tol}


CORPUS = (
    ("hurwitz:a=1,b=1", 30), ("hurwitz:a=1,b=2", 30), ("hurwitz:a=2,b=0.5", 30),
    ("logmix:b=2", 20), ("logmix:b=1", 20), ("stirling_f3", 20),
    ("exp_sqrt:gamma=1", 25), ("exp_sqrt:gamma=-1", 25),
)


def corpus_rows(tol: float):
    """Every builtin against its closed-form coefficients and, for models of
    radius 1, the truncated series inside |z| <= 1/2."""
    rows = []
    zs = [0.5 * np.exp(2j * math.pi * n / 7) for n in range(7)] + [0.25j]
    for spec, kmax in CORPUS:
        model = parse_model_spec(spec)
        coeff_err = 0.0
        cs = []
        for k in range(1, kmax + 1):
            exact = model.closed_form(k)
            cs.append(exact)
            got = coefficient_quadrature(model, k, tol * 1e-2).value
            coeff_err = max(coeff_err, abs(got - exact) / abs(exact))
        limit = 1e3 * tol
        rows.append((spec, "coefficients", coeff_err, limit, bool(coeff_err < limit)))
        if abs(model.terms[0].a) == 1:
            nmax = int(math.ceil(math.log(tol * 1e-2) / math.log(0.5))) + 10
            while len(cs) < nmax:
                cs.append(model.closed_form(len(cs) + 1))
            g = GlobalFunction(model)
            err = max(abs(eval_finite_radius(g, z, tol * 1e-2)
                          - sum(c * z ** (k + 1) for k, c in enumerate(cs))) for z in zs)
            rows.append((spec, "series_in_disk", float(err), limit, bool(err < limit)))
    return rows


def cmd_corpus(args, tol):
    rows = corpus_rows(tol)
    return rows, ("model", "check", "max_residual", "limit", "passed"), {"tol": tol}


def cmd_jumps(args, tol):
    model, f0, label = _model_from_args(args)
    ts = parse_list(args.t)
    if not ts:
        raise ValidationError("give cut points with --t")
    rows = []
    for t in ts:
        rep = jump_check(GlobalFunction(model, f0), args.j, t, tol=min(tol, 1e-10))
        rows.append((t, rep.side_plus.real, rep.side_plus.imag, rep.side_minus.real,
                     rep.side_minus.imag, rep.predicted_jump.real, rep.predicted_jump.imag,
                     rep.residual))
    cols = ("t", "re_plus", "im_plus", "re_minus", "im_minus", "re_jump", "im_jump", "residual")
    return rows, cols, {"model": label, "tol": tol}


def cmd_singularity(args, tol):
    model, f0, label = _model_from_args(args)
    radii = parse_list(args.radii)
    if not radii or any(r <= 0 for r in radii):
        raise ValidationError("radii must be positive")
    probe = singularity_type(GlobalFunction(model, f0), args.j, radii, min(tol, 1e-10))
    rows = [(r, o.real, o.imag, rem.real, rem.imag, abs(f))
            for r, o, rem, f in zip(radii, probe.offsets, probe.remainder_values,
                                    probe.function_values)]
    cols = ("r", "re_offset", "im_offset", "re_remainder", "im_remainder", "abs_f")
    return rows, cols, {"model": label, "tol": tol, "bounded": probe.boundedness_flag}


def cmd_borel(args, tol):
    model, f0, label = _model_from_args(args)
    xs = parse_list(args.x)
    if not xs:
        raise ValidationError("give x values with --x")
    g = GlobalFunction(model, f0, "borel")
    rows = []
    for x in xs:
        v = borel_sum(g, x, tol, form=args.form)
        rows.append((x, v.real, v.imag))
    return rows, ("x", "re_value", "im_value"), {"model": label, "tol": tol, "form": args.form}


def cmd_scan(args, tol):
    model, f0, label = _model_from_args(args)
    scan = decay_scan(GlobalFunction(model, f0, args.kind), parse_list(args.radii),
                      parse_list(args.directions), tol)
    return list(scan.rows), ("R", "theta", "abs_f_over_z"), {"model": label, "tol": tol}


COMMANDS = {"eval": cmd_eval, "coeffs": cmd_coeffs, "corpus": cmd_corpus, "jumps": cmd_jumps,
            "singularity": cmd_singularity, "borel": cmd_borel, "scan": cmd_scan}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="resum", description="Global reconstruction from Taylor coefficients.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, model=True):
        if model:
            p.add_argument("--model", help="builtin spec, e.g. hurwitz:a=1,b=1")
            p.add_argument("--model-file", help="JSON model file")
        p.add_argument("--tol", type=float, default=None,
                       help=f"tolerance (default {DEFAULT_TOL}, or $RESUM_TOL)")
        p.add_argument("--output", "-o", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("eval", help="evaluate f at points or on a grid")
    common(p)
    p.add_argument("--point", action="append", help="complex point, repeatable (e.g. -3, 2+2i)")
    p.add_argument("--grid", help="re0:re1:n,im0:im1:m")
    p.add_argument("--kind", choices=("finite_radius", "entire"), default="finite_radius")
    p.add_argument("--f0", default=None, help="constant term f(0)")

    p = sub.add_parser("coeffs", help="Taylor coefficients from the model")
    common(p)
    p.add_argument("--k", default="1..5", help="e.g. 1..5 or 1,3,7")

    p = sub.add_parser("corpus", help="check every builtin against its closed form")
    common(p, model=False)

    p = sub.add_parser("jumps", help="jump across a cut vs the density")
    common(p)
    p.add_argument("--t", default="1.2,1.5,2,3.7,8", help="cut points a_j t, comma separated")
    p.add_argument("--j", type=int, default=0, help="term index")

    p = sub.add_parser("singularity", help="remainder near the branch point a_j")
    common(p)
    p.add_argument("--radii", default="1e-1,1e-2,1e-3,1e-4")
    p.add_argument("--j", type=int, default=0, help="term index")

    p = sub.add_parser("borel", help="Borel sum of sum c_k k! x^(-k-1)")
    common(p)
    p.add_argument("--x", required=True, help="comma separated positive reals")
    p.add_argument("--form", choices=("ei", "laplace"), default="ei")
    p.add_argument("--f0", default=None, help="constant term f(0)")

    p = sub.add_parser("scan", help="|f(z)/z| along rays")
    common(p)
    p.add_argument("--radii", default="10,100,1000")
    p.add_argument("--directions", default="3.141592653589793")
    p.add_argument("--kind", choices=("finite_radius", "entire"), default="finite_radius")
    return parser


def _glue_values(argv: Sequence[str]) -> list[str]:
    """``--point -3+0i`` would be read as an option; glue numeric values on."""
    out = []
    it = iter(argv)
    for item in it:
        if item in _COMPLEX_FLAGS:
            nxt = next(it, None)
            out.append(item if nxt is None else f"{item}={nxt}")
        else:
            out.append(item)
    return out


_COMPLEX_FLAGS = ("--point", "--f0", "--grid", "--x", "--t", "--radii", "--directions")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(_glue_values(sys.argv[1:] if argv is None else argv))
    except SystemExit as exc:  # usage errors, --help and --version
        return exc.code if isinstance(exc.code, int) else EXIT_VALIDATION
    try:
        tol = resolve_tol(args.tol)
        rows, columns, meta = COMMANDS[args.command](args, tol)
        emit(rows, columns, args.format, args.output, meta)
    except (ValidationError, DomainError, OnCutError) as exc:
        print(f"resum: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"resum: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ResumError, NotImplementedError, FloatingPointError) as exc:
        print(f"resum: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if args.command == "corpus" and not all(r[-1] for r in rows):
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
