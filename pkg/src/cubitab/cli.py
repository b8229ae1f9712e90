"""Command-line interface.

Machine-readable results go to stdout (JSON by default, CSV or text via
--format), diagnostics to stderr.  Exit codes: 0 success, 1 domain or
capacity error, 2 usage error.  The report paths can render figures next
to their delimited output (--figure / --figures).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import tabulate
from .density import (
    KAPPA_DEFAULT,
    PredictionInterval,
    density,
    mp,
    predict_count,
    setting_density_check,
)
from .discshape import decompose
from .errors import CubitabError
from .genus import genus_number
from .maier import build_matrix, pipeline_check
from .progression import (
    ProgressionCertificate,
    SettingParams,
    construct_setting,
    verify_certificate,
)


@dataclass
class Config:
    """Validated knobs shared by the subcommands."""

    sign: str = "-"
    bound: int = 0
    modulus: int | None = None
    residue: int | None = None
    epsilon: Fraction = Fraction(1, 3)
    k: int = 1
    H: int = 1
    kappa: float = KAPPA_DEFAULT
    workers: int = 1
    cache_path: str | None = None
    capacity: int = tabulate.DEFAULT_CAPACITY
    output_format: str = "json"

    def __post_init__(self):
        if self.sign not in ("+", "-"):
            raise CubitabError(f"sign must be '+' or '-', got {self.sign!r}")
        if self.workers < 1:
            raise CubitabError(f"workers must be at least 1, got {self.workers}")
        if self.capacity < 1:
            raise CubitabError(f"capacity must be positive, got {self.capacity}")
        if not 0 < self.kappa < 1:
            raise CubitabError(f"kappa must lie in (0, 1), got {self.kappa}")
        if self.output_format not in ("json", "csv", "text"):
            raise CubitabError(f"unknown output format {self.output_format!r}")

    @classmethod
    def from_args(cls, args) -> "Config":
        return cls(
            sign=getattr(args, "sign", "-") or "-",
            bound=getattr(args, "bound", 0) or 0,
            modulus=getattr(args, "m", None),
            residue=getattr(args, "a", None),
            kappa=getattr(args, "kappa", KAPPA_DEFAULT),
            workers=args.workers,
            cache_path=_cache_dir(args),
            capacity=args.capacity,
            output_format=args.format,
        )


def _parse_fraction(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a fraction: {text!r}") from exc
    return value


def _emit(obj, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(obj, sort_keys=True, default=str))
    elif fmt == "text":
        if isinstance(obj, dict):
            for key, val in obj.items():
                print(f"{key}: {val}")
        else:
            print(obj)
    elif fmt == "csv":
        if isinstance(obj, dict):
            print(",".join(str(k) for k in obj))
            print(",".join(str(v) for v in obj.values()))
        else:
            print(obj)
    else:
        raise CubitabError(f"unknown output format {fmt!r}")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", "-f", choices=("json", "csv", "text"), default="json")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--cache", default=None, help="cache directory (env CUBITAB_CACHE)")
    parser.add_argument("--capacity", type=int, default=tabulate.DEFAULT_CAPACITY)


def _cache_dir(args) -> str | None:
    if args.cache is not None:
        return args.cache
    import os

    return os.environ.get("CUBITAB_CACHE")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cubitab",
        description="cubic fields by discriminant: tabulation, genus bounds, "
        "progression certificates, densities, Maier matrices",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="tabulate fields up to a bound")
    p.add_argument("--sign", choices=("+", "-"), required=True)
    p.add_argument("--X", type=int, required=True, dest="bound")
    p.add_argument("--out", default=None, help="write JSONL table here instead of stdout")
    _add_common(p)

    p = sub.add_parser("count", help="counting function, optionally in a progression")
    p.add_argument("--sign", choices=("+", "-"), required=True)
    p.add_argument("--X", type=int, required=True, dest="bound")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--a", type=int, default=None)
    p.add_argument("--figure", default=None, help="render the counting figure to this PNG")
    _add_common(p)

    p = sub.add_parser("classify", help="discriminant shape decomposition")
    p.add_argument("--delta", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("genus", help="genus number and class number lower bound")
    p.add_argument("--delta", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("density", help="density of cubic discriminants in a class")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--predict-X", type=int, default=None, dest="predict_bound")
    p.add_argument("--sign", choices=("+", "-"), default="+")
    _add_common(p)

    p = sub.add_parser("setting", help="construct a progression certificate")
    p.add_argument("--epsilon", type=_parse_fraction, required=True, metavar="P/Q")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--H", type=int, required=True)
    p.add_argument("--sign", choices=("+", "-"), default="-")
    strengthen = p.add_mutually_exclusive_group()
    strengthen.add_argument("--strengthen", dest="strengthen", action="store_true", default=True)
    strengthen.add_argument("--no-strengthen", dest="strengthen", action="store_false")
    p.add_argument("--verify", action="store_true", help="include the verification report")
    p.add_argument("--density-check", action="store_true", help="include the density report")
    p.add_argument("--out", default=None, help="write certificate JSON here")
    _add_common(p)

    p = sub.add_parser("maier", help="Maier matrix over a progression")
    p.add_argument("--sign", choices=("+", "-"), default="-")
    p.add_argument("--a", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--delta", type=_parse_fraction, default=Fraction(0), metavar="P/Q")
    p.add_argument("--cert", default=None, help="certificate JSON file: run the full pipeline")
    p.add_argument("--kappa", type=float, default=KAPPA_DEFAULT)
    p.add_argument("--epsilon", type=_parse_fraction, default=None, metavar="P/Q")
    p.add_argument("--csv", default=None, help="dump the multiplicity matrix as CSV")
    p.add_argument("--figures", default=None, help="render figures into this directory")
    _add_common(p)

    p = sub.add_parser("verify-import", help="cross-check an external field table")
    p.add_argument("--path", required=True)
    p.add_argument("--table-format", choices=("csv", "jsonl"), default="csv")
    p.add_argument("--sign", choices=("+", "-"), required=True)
    p.add_argument("--X", type=int, required=True, dest="bound")
    _add_common(p)

    p = sub.add_parser("cache-info", help="list cached tables")
    _add_common(p)

    return parser


def _run(args) -> int:
    cfg = Config.from_args(args)
    fmt = cfg.output_format
    cache = cfg.cache_path
    if args.command == "enumerate":
        table = tabulate.enumerate_fields(
            args.sign,
            args.bound,
            workers=args.workers,
            cache_dir=cache,
            capacity=args.capacity,
        )
        if args.out:
            tabulate.write_table(table, args.out)
            _emit({"sign": table.sign, "X": table.bound, "count": len(table.records), "out": args.out}, fmt)
        else:
            for rec in table.records:
                print(json.dumps({"disc": rec.disc, "form": list(rec.form)}, sort_keys=True))
        return 0

    if args.command == "count":
        table = tabulate.enumerate_fields(
            args.sign, args.bound, workers=args.workers, cache_dir=cache, capacity=args.capacity
        )
        if (args.m is None) != (args.a is None):
            raise CubitabError("--m and --a go together")
        if args.m is not None:
            value = tabulate.count_progression(args.sign, args.bound, args.m, args.a, table=table)
            out = {"sign": args.sign, "X": args.bound, "m": args.m, "a": args.a, "count": value}
        else:
            value = tabulate.count(args.sign, args.bound, table=table)
            out = {"sign": args.sign, "X": args.bound, "count": value}
        if args.figure:
            from . import plots

            out["figure"] = str(plots.counting_figure(table, args.figure))
        _emit(out, fmt)
        return 0

    if args.command == "classify":
        _emit(decompose(args.delta).to_dict(), fmt)
        return 0

    if args.command == "genus":
        shape = decompose(args.delta)
        if not shape.admissible:
            raise CubitabError(
                f"{args.delta} is not an admissible cubic discriminant "
                f"({shape.failure_reason})"
            )
        _emit(genus_number(shape).to_dict(), fmt)
        return 0

    if args.command == "density":
        value = density(args.m, args.a)
        out = value.to_dict()
        if args.predict_bound is not None:
            pred = predict_count(args.sign, args.predict_bound, args.m, args.a)
            if isinstance(pred, PredictionInterval):
                out["prediction"] = {
                    "lower": mp.nstr(pred.lower, 10),
                    "upper": mp.nstr(pred.upper, 10) if pred.upper is not None else None,
                }
            else:
                out["prediction"] = mp.nstr(pred, 10)
        _emit(out, fmt)
        return 0

    if args.command == "setting":
        params = SettingParams(sign=args.sign, epsilon=args.epsilon, k=args.k, H=args.H)
        cert = construct_setting(params, strengthen_qr=args.strengthen)
        payload = json.loads(cert.to_json())
        code = 0
        if args.verify:
            report = verify_certificate(cert)
            payload["verification"] = report.to_dict()
            code = 0 if report.passed else 1
        if args.density_check:
            dens = setting_density_check(cert)
            payload["density_check"] = dens.to_dict()
            if not dens.passed:
                code = 1
        if args.out:
            Path(args.out).write_text(cert.to_json() + "\n", encoding="utf-8")
        _emit(payload, fmt)
        return code

    if args.command == "maier":
        if args.cert:
            cert = ProgressionCertificate.from_json(Path(args.cert).read_text(encoding="utf-8"))
            report = pipeline_check(
                cert,
                args.rows,
                capacity=args.capacity,
                workers=args.workers,
                kappa=args.kappa,
            )
            matrix = report.matrix
            out = report.to_dict()
        else:
            if args.a is None or args.m is None:
                raise CubitabError("either --cert or both --a and --m are required")
            matrix = build_matrix(
                args.sign,
                args.a,
                args.m,
                args.k,
                args.rows,
                args.delta,
                capacity=args.capacity,
                workers=args.workers,
                kappa=args.kappa,
                epsilon=float(args.epsilon) if args.epsilon is not None else None,
            )
            out = matrix.to_dict()
        if args.csv:
            matrix.write_csv(args.csv)
            out["csv"] = args.csv
        if args.figures:
            from . import plots

            top = matrix.a + matrix.rows * matrix.m + matrix.k
            table = tabulate.enumerate_fields(
                matrix.sign, top, workers=args.workers, cache_dir=cache, capacity=args.capacity
            )
            figdir = Path(args.figures)
            out["figures"] = [
                str(plots.maier_figure(matrix, figdir / "maier_matrix.png")),
                str(plots.counting_figure(table, figdir / "counting.png")),
                str(plots.multiplicity_figure(table, figdir / "multiplicity.png")),
            ]
        _emit(out, fmt)
        return 0

    if args.command == "verify-import":
        imported = tabulate.import_table(args.path, fmt=args.table_format)
        computed = tabulate.enumerate_fields(
            args.sign, args.bound, workers=args.workers, cache_dir=cache, capacity=args.capacity
        )
        report = tabulate.cross_check(imported, computed)
        _emit(report.to_dict(), fmt)
        return 0 if report.clean else 1

    if args.command == "cache-info":
        _emit({"entries": tabulate.cache_info(cache)}, fmt)
        return 0

    raise CubitabError(f"unknown command {args.command!r}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except (CubitabError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
