"""Command-line interface.

Subcommands:
  validate     parse + validate a config, print diagnostics
  analyze      batch wellness reports over a directory of user logs
  decompose    trend/seasonal/remainder table for one user and category
  memberships  dense membership samples of a variable's terms for plotting

Exit codes: 0 success, 1 usage or configuration error, 2 data error.
All file output is UTF-8 with LF line endings.
"""

from __future__ import annotations

import argparse
import glob
import logging
import os
import sys
from datetime import date

import numpy as np

from .dsl import DslError, parse_config, validate
from .fuzzy import DEFAULT_RESOLUTION, FuzzyError
from .ingest import IngestError, category_series, load_user_log
from .pipeline import (InsufficientCoverageError, PipelineError, StlParams,
                       WellnessReport, build_pipeline, default_config_text,
                       load_label_map)
from .stl import decompose_or_mean

logger = logging.getLogger(__name__)

ENV_CONFIG = "FUZZWELL_CONFIG"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

REPORT_HEADER = "uuid,total,health,productive,social,mood1,mood2,mood3"


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        raise UsageError(message)


def _read_config_text(path: str | None) -> tuple[str, bool]:
    """Config text plus whether it is the shipped default."""
    if path is None:
        path = os.environ.get(ENV_CONFIG) or None
    if path is None:
        return default_config_text(), True
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read(), False
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None


def _parse_day(text: str) -> int:
    """A window endpoint: ISO date or integer epoch-day index."""
    try:
        return int(text)
    except ValueError:
        pass
    try:
        d = date.fromisoformat(text)
    except ValueError:
        raise UsageError(f"bad window endpoint {text!r}: expected an ISO "
                         f"date or a day index") from None
    return d.toordinal() - date(1970, 1, 1).toordinal()


def _parse_window(text: str | None) -> tuple[int | None, int | None] | None:
    if text is None:
        return None
    if ":" not in text:
        raise UsageError(f"bad window {text!r}: expected START:END")
    start_s, end_s = text.split(":", 1)
    start = _parse_day(start_s) if start_s else None
    end = _parse_day(end_s) if end_s else None
    return (start, end)


def _out_stream(path: str | None):
    if path is None:
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline="\n"), True


def _stl_params(args: argparse.Namespace) -> StlParams:
    kwargs = {}
    if getattr(args, "period", None) is not None:
        kwargs["period"] = args.period
    for name in ("inner_iters", "outer_iters", "seasonal_window", "trend_window"):
        value = getattr(args, name, None)
        if value is not None:
            kwargs[name] = value
    return StlParams(**kwargs)


def _user_files(data_dir: str) -> list[str]:
    if not os.path.isdir(data_dir):
        raise UsageError(f"data directory {data_dir!r} does not exist")
    files = sorted(glob.glob(os.path.join(data_dir, "*.csv"))
                   + glob.glob(os.path.join(data_dir, "*.csv.gz")))
    if not files:
        raise DataError(f"no user .csv files in {data_dir!r}")
    return files


# ---------------------------------------------------------------------------
# Subcommands

def cmd_validate(args: argparse.Namespace) -> int:
    text, is_default = _read_config_text(args.config)
    try:
        doc = parse_config(text)
    except DslError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    diags = validate(doc, args.resolution)
    for d in diags:
        print(str(d))
    errors = sum(1 for d in diags if d.severity == "error")
    warnings = len(diags) - errors
    print(f"{errors} error(s), {warnings} warning(s)")
    return EXIT_OK if errors == 0 else EXIT_USAGE


def _format_report_csv(reports: list[WellnessReport]) -> list[str]:
    lines = [REPORT_HEADER]
    for r in reports:
        moods = list(r.moods[:3]) + [""] * (3 - len(r.moods[:3]))
        lines.append(f"{r.uuid},{r.total:.3f},{r.components.health:.3f},"
                     f"{r.components.productive:.3f},{r.components.social:.3f},"
                     f"{moods[0]},{moods[1]},{moods[2]}")
    return lines


def _format_report_table(reports: list[WellnessReport]) -> list[str]:
    head = f"{'uuid':<38} {'total':>8} {'health':>8} {'product':>8} {'social':>8}  moods"
    lines = [head, "-" * len(head)]
    for r in reports:
        lines.append(f"{r.uuid:<38} {r.total:>8.3f} {r.components.health:>8.3f} "
                     f"{r.components.productive:>8.3f} {r.components.social:>8.3f}"
                     f"  {', '.join(r.moods)}")
    return lines


def cmd_analyze(args: argparse.Namespace) -> int:
    text, is_default = _read_config_text(args.config)
    try:
        label_map = load_label_map(args.labels) if args.labels else None
        pipeline = build_pipeline(
            None if is_default else text,
            label_map=label_map,
            resolution=args.resolution,
            coverage_min=args.coverage_min,
            stl_params=_stl_params(args))
    except (DslError, PipelineError, IngestError) as exc:
        raise UsageError(str(exc)) from None

    window = _parse_window(args.window)
    files = _user_files(args.data)
    reports: list[WellnessReport] = []
    failures = 0
    for path in files:
        try:
            log = load_user_log(path)
            reports.append(pipeline.analyze_user(log, window))
        except (IngestError, PipelineError, FuzzyError) as exc:
            failures += 1
            print(f"skipped {os.path.basename(path)}: {exc}", file=sys.stderr)
    if not reports:
        raise DataError(f"all {failures} user file(s) failed")

    reports.sort(key=lambda r: r.uuid)
    lines = (_format_report_table(reports) if args.format == "table"
             else _format_report_csv(reports))
    stream, owned = _out_stream(args.out)
    try:
        stream.write("\n".join(lines) + "\n")
    finally:
        if owned:
            stream.close()
    if failures:
        print(f"{failures} user file(s) skipped", file=sys.stderr)
    return EXIT_OK


def cmd_decompose(args: argparse.Namespace) -> int:
    text, is_default = _read_config_text(args.config)
    try:
        label_map = load_label_map(args.labels) if args.labels else None
        pipeline = build_pipeline(
            None if is_default else text,
            label_map=label_map,
            resolution=args.resolution,
            coverage_min=args.coverage_min,
            stl_params=_stl_params(args))
    except (DslError, PipelineError, IngestError) as exc:
        raise UsageError(str(exc)) from None
    if args.category not in pipeline.category_variables:
        raise UsageError(f"unknown category {args.category!r}; expected one "
                         f"of {sorted(pipeline.category_variables)}")

    files = [f for f in _user_files(args.data)
             if os.path.basename(f).split(".", 1)[0] == args.uuid]
    if not files:
        raise DataError(f"no log file for uuid {args.uuid!r} in {args.data!r}")
    window = _parse_window(args.window)
    try:
        log = load_user_log(files[0])
        cs = category_series(log, pipeline.label_map, args.coverage_min)
        w0, w1 = pipeline.clip_window(cs, window)
        sl = slice(w0 - cs.start_day, w1 - cs.start_day + 1)
        included = cs.included[sl]
        if not included.any():
            raise InsufficientCoverageError(
                f"no day reaches coverage >= {args.coverage_min}")
        frac = cs.fractions[args.category][sl]
        idx = np.arange(frac.shape[0], dtype=np.float64)
        filled = frac if included.all() else np.interp(
            idx, idx[included], frac[included])
        dec = decompose_or_mean(filled, pipeline.stl_params.period,
                                **pipeline.stl_params.kwargs())
    except (IngestError, PipelineError, ValueError) as exc:
        raise DataError(str(exc)) from None

    lines = ["value,trend,seasonal,remainder"]
    for v, t, s, r in zip(filled, dec.trend, dec.seasonal, dec.remainder):
        lines.append(f"{v:.12g},{t:.12g},{s:.12g},{r:.12g}")
    stream, owned = _out_stream(args.out)
    try:
        stream.write("\n".join(lines) + "\n")
    finally:
        if owned:
            stream.close()
    return EXIT_OK


def cmd_memberships(args: argparse.Namespace) -> int:
    text, _ = _read_config_text(args.config)
    try:
        doc = parse_config(text)
    except DslError as exc:
        raise UsageError(str(exc)) from None
    try:
        var = doc.variable(args.variable)
    except KeyError as exc:
        raise UsageError(str(exc)) from None
    universe = var.universe(args.resolution)
    xs = universe.grid()
    columns = [t.mf.sample(universe) for t in var.terms]
    lines = ["x," + ",".join(t.name for t in var.terms)]
    for i in range(xs.shape[0]):
        row = ",".join(f"{col[i]:.12g}" for col in columns)
        lines.append(f"{xs[i]:.12g},{row}")
    stream, owned = _out_stream(args.out)
    try:
        stream.write("\n".join(lines) + "\n")
    finally:
        if owned:
            stream.close()
    return EXIT_OK


# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser, data: bool = False) -> None:
    p.add_argument("--config", metavar="PATH",
                   help=f"rule config (.fzc); falls back to ${ENV_CONFIG}, "
                        f"then the shipped default")
    p.add_argument("--labels", metavar="PATH",
                   help="label-map JSON; default is the shipped map")
    p.add_argument("--resolution", type=int, default=DEFAULT_RESOLUTION,
                   help="universe sample resolution (default %(default)s)")
    if data:
        p.add_argument("--data", metavar="DIR", required=True,
                       help="directory of per-user label CSVs")
        p.add_argument("--window", metavar="START:END",
                       help="analysis window, ISO dates or day indices; "
                            "either side may be empty")
        p.add_argument("--coverage-min", type=float, default=0.1,
                       dest="coverage_min",
                       help="minimum daily reporting coverage (default "
                            "%(default)s)")
        p.add_argument("--period", type=int, help="seasonal period in days "
                                                  "(default 7)")
        p.add_argument("--inner-iters", type=int, dest="inner_iters")
        p.add_argument("--outer-iters", type=int, dest="outer_iters")
        p.add_argument("--seasonal-window", type=int, dest="seasonal_window")
        p.add_argument("--trend-window", type=int, dest="trend_window")
    p.add_argument("--out", metavar="PATH", help="output file (default stdout)")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fuzzwell",
                     description="Fuzzy wellness analysis over activity logs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a config file")
    _add_common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("analyze", help="batch wellness reports")
    _add_common(p, data=True)
    p.add_argument("--format", choices=("csv", "table"), default="csv")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("decompose",
                       help="trend/seasonal/remainder table for one series")
    _add_common(p, data=True)
    p.add_argument("--uuid", required=True, help="user identifier")
    p.add_argument("--category", required=True,
                   help="category name, e.g. online")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("memberships",
                       help="sampled membership curves of one variable")
    _add_common(p)
    p.add_argument("variable", help="variable name from the config")
    p.set_defaults(func=cmd_memberships)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
