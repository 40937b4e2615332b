"""``costeq`` command line.

Exit codes: 0 success, 1 domain error (bad selection, degenerate data,
invalid plan), 2 usage or format error (bad flags, unreadable or malformed
input files).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Iterable, TextIO

from . import __version__
from .cec import compute_cec, from_csv, from_json, savings_summary, to_csv, to_json
from .errors import CostEqError, FormatError, ValidationError
from .experiments import AGGREGATIONS, aggregate_best, parse_results_csv, parse_selector, select_series, to_samples
from .isotonic import DIRECTIONS, INCREASING
from .mixing import POLICIES, MixtureSpec, mixture_rates, parse_tasks, sample_stream, subsample_sizes
from .pipelines import METHODS, PRESETS, build_plan, expand_sources, plan_to_dict, plan_to_jobs
from .svg import PlotStyle, render_svg
from .textify import (
    Direction,
    example_from_json,
    from_jsonl_line,
    from_tsv_line,
    parse_example,
    serialize_example,
    serialize_kg_triple,
    triple_from_fields,
    write_pairs,
)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _open_out(path: str | None) -> TextIO:
    if path is None or path == "-":
        return sys.stdout
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", encoding="utf-8", newline="")


def _emit(text: str, path: str | None) -> None:
    out = _open_out(path)
    try:
        out.write(text)
    finally:
        if out is not sys.stdout:
            out.close()


def _emit_lines(lines: Iterable[str], path: str | None) -> None:
    out = _open_out(path)
    try:
        for line in lines:
            out.write(line + "\n")
    finally:
        if out is not sys.stdout:
            out.close()


def _style(args: argparse.Namespace, labels: Iterable[str] = ()) -> PlotStyle:
    return PlotStyle(
        width=args.width,
        height=args.height,
        show_diagonal=not args.no_diagonal,
        show_top_axis=not args.no_top_axis,
        dashed_extrapolation=not args.no_dashed,
        log_scale=args.log,
        labels=tuple(args.label or labels),
        title=args.title or "",
    )


def _parse_grid(text: str) -> str | list[float]:
    if text in ("auto", "dense"):
        return text
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"--grid must be 'auto', 'dense' or comma-separated costs, got {text!r}") from None


def cmd_cec(args: argparse.Namespace) -> int:
    records = parse_results_csv(_read_text(args.results))
    if not records:
        raise FormatError(f"{args.results}: no data rows")
    series = aggregate_best(records, how=args.how)
    control = select_series(series, parse_selector(args.control))
    grid = _parse_grid(args.grid)
    curves = []
    for sel in args.treatment:
        treatment = select_series(series, parse_selector(sel))
        curves.append(
            compute_cec(to_samples(control), to_samples(treatment), grid, direction=args.direction, label=sel)
        )
    text = to_json(curves) if args.format == "json" else to_csv(curves)
    _emit(text, args.out)
    if args.svg:
        _emit(render_svg(curves, _style(args)), args.svg)
    if args.figure:
        from .figures import save_figure

        save_figure(curves, args.figure, _style(args))
    if args.summary:
        for c in curves:
            s = savings_summary(c)
            agg = f"{s.aggregate:.4g}" if s.comparable else "no comparable region"
            print(f"{c.label}: geometric-mean cost ratio {agg}", file=sys.stderr)
    return EXIT_OK


def _load_tables(paths: list[str]) -> list:
    curves = []
    for path in paths:
        text = _read_text(path)
        if path.endswith(".json") or text.lstrip().startswith(("[", "{")):
            loaded = from_json(text)
        else:
            loaded = from_csv(text, default_label=Path(path).stem if path != "-" else "")
        curves.extend(loaded)
    return curves


def cmd_plot(args: argparse.Namespace) -> int:
    curves = _load_tables(args.tables)
    style = _style(args)
    if args.figure:
        from .figures import save_figure

        save_figure(curves, args.figure, style)
    if args.out is not None or not args.figure:
        _emit(render_svg(curves, style), args.out)
    return EXIT_OK


def _input_lines(path: str) -> Iterable[tuple[int, str]]:
    for i, line in enumerate(_read_text(path).splitlines(), start=1):
        if line.strip():
            yield i, line


def cmd_preprocess(args: argparse.Namespace) -> int:
    if args.parse:
        out = []
        for lineno, line in _input_lines(args.input):
            pair = from_tsv_line(line) if args.format == "tsv" else from_jsonl_line(line)
            ex = parse_example(*pair)
            out.append(
                json.dumps(
                    {"task": ex.task, "features": [list(f) for f in ex.features], "target": ex.target},
                    ensure_ascii=False,
                )
            )
        _emit_lines(out, args.out)
        return EXIT_OK

    pairs = []
    for lineno, line in _input_lines(args.input):
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"line {lineno}: invalid JSON ({exc.msg})") from None
        pairs.append(serialize_example(example_from_json(doc)))
    _emit_lines(write_pairs(pairs, args.format), args.out)
    return EXIT_OK


def cmd_kg(args: argparse.Namespace) -> int:
    pairs = []
    for lineno, line in _input_lines(args.input):
        if line.lstrip().startswith("{"):
            try:
                doc = json.loads(line)
                fields = [doc.get("graph", args.graph), doc["subject"], doc["relation"], doc["object"]]
            except (json.JSONDecodeError, KeyError) as exc:
                raise FormatError(f"line {lineno}: bad triple record ({exc})") from None
        else:
            fields = line.split("\t")
            if args.graph and len(fields) == 3:
                fields = [args.graph, *fields]
        if fields[0] is None:
            raise ValidationError(f"line {lineno}: no graph given; pass --graph or a 4-field line")
        pairs.extend(serialize_kg_triple(triple_from_fields(fields), args.direction))
    _emit_lines(write_pairs(pairs, args.format), args.out)
    return EXIT_OK


def cmd_mix(args: argparse.Namespace) -> int:
    if args.spec:
        spec = MixtureSpec.from_json(_read_text(args.spec))
    elif args.tasks:
        spec = MixtureSpec(parse_tasks(args.tasks), args.policy, args.seed)
    else:
        raise ValidationError("give --tasks or --spec")
    if args.rates:
        _emit_lines((f"{t}\t{p!r}" for t, p in mixture_rates(spec)), args.out)
    elif args.dump_spec:
        _emit(spec.to_json() + "\n", args.out)
    else:
        _emit_lines(sample_stream(spec, args.n), args.out)
    return EXIT_OK


def _parse_sizes(text: str | None) -> dict[str, int] | None:
    if not text:
        return None
    return dict(parse_tasks(text))


def cmd_plan(args: argparse.Namespace) -> int:
    sources = expand_sources(args.sources or "", args.target)
    plan = build_plan(
        args.method,
        sources,
        args.target,
        args.preset,
        policy=args.policy,
        sizes=_parse_sizes(args.dataset_sizes),
        seed=args.seed,
    )
    if args.jobs:
        if args.train_sizes:
            sizes = [int(s) for s in args.train_sizes.split(",") if s.strip()]
        elif args.full_size:
            sizes = subsample_sizes(args.full_size, args.start, args.ratio)
        else:
            raise ValidationError("--jobs needs --train-sizes or --full-size")
        doc = plan_to_jobs(plan, sizes)
    else:
        doc = plan_to_dict(plan)
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return EXIT_OK


def _add_style_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--width", type=int, default=640)
    p.add_argument("--height", type=int, default=480)
    p.add_argument("--no-diagonal", action="store_true", help="omit the y=x reference line")
    p.add_argument("--no-top-axis", action="store_true", help="omit the control-benefit top axis")
    p.add_argument("--no-dashed", action="store_true", help="draw extrapolated segments solid")
    p.add_argument("--log", action="store_true", help="log-scale both cost axes")
    p.add_argument("--label", action="append", help="series label (repeat, in order)")
    p.add_argument("--title")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="costeq", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cec", help="cost equivalent curves from a results CSV")
    p.add_argument("results", help="results CSV ('-' for stdin)")
    p.add_argument("--control", required=True, help="series selector, e.g. method=single-task")
    p.add_argument("--treatment", required=True, action="append", help="series selector (repeatable)")
    p.add_argument("--grid", default="auto", help="'auto', 'dense' or comma-separated control costs")
    p.add_argument("--how", choices=AGGREGATIONS, default="best")
    p.add_argument("--direction", choices=DIRECTIONS, default=INCREASING)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="table destination (default stdout)")
    p.add_argument("--svg", help="also write an SVG chart here")
    p.add_argument("--figure", help="also write a matplotlib figure here (png, pdf, ...)")
    p.add_argument("--summary", action="store_true", help="print cost ratios to stderr")
    _add_style_flags(p)
    p.set_defaults(func=cmd_cec)

    p = sub.add_parser("plot", help="render CEC tables as SVG")
    p.add_argument("tables", nargs="+", help="CEC tables (CSV or JSON)")
    p.add_argument("--out", help="SVG destination (default stdout)")
    p.add_argument("--figure", help="write a matplotlib figure here as well")
    _add_style_flags(p)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("preprocess", help="serialize JSON-lines examples to text-to-text pairs")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--format", choices=("tsv", "jsonl"), default="tsv")
    p.add_argument("--parse", action="store_true", help="read pairs and recover example records")
    p.add_argument("--out")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("kg", help="serialize knowledge-graph triples")
    p.add_argument("input", nargs="?", default="-", help="TSV graph/subject/relation/object or JSON lines")
    p.add_argument("--direction", choices=[d.value for d in Direction], default=Direction.FORWARD.value)
    p.add_argument("--graph", choices=("atomic", "conceptnet"), help="graph for 3-field lines")
    p.add_argument("--format", choices=("tsv", "jsonl"), default="tsv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_kg)

    p = sub.add_parser("mix", help="mixing rates and seeded task streams")
    p.add_argument("--tasks", help="task count, or id[:size] list, e.g. anli:169654,piqa:16113")
    p.add_argument("--spec", help="MixtureSpec JSON document")
    p.add_argument("--policy", choices=POLICIES, default="equal")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=0, help="stream length")
    p.add_argument("--rates", action="store_true", help="print rates instead of a stream")
    p.add_argument("--dump-spec", action="store_true", help="print the MixtureSpec JSON")
    p.add_argument("--out")
    p.set_defaults(func=cmd_mix)

    p = sub.add_parser("plan", help="transfer-training plan or job list as JSON")
    p.add_argument("method", choices=METHODS)
    p.add_argument("--target", required=True)
    p.add_argument("--sources", help="comma-separated ids, or 'rainbow' for the other RAINBOW tasks")
    p.add_argument("--preset", choices=tuple(PRESETS), default="investigatory")
    p.add_argument("--policy", choices=POLICIES, default="equal")
    p.add_argument("--dataset-sizes", help="id:size list for size-weighted mixing")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", action="store_true", help="expand into one job per assignment and size")
    p.add_argument("--train-sizes", help="comma-separated target training sizes")
    p.add_argument("--full-size", type=int, help="generate geometric sizes up to this size")
    p.add_argument("--start", type=int, default=16)
    p.add_argument("--ratio", type=float, default=4.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_plan)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"costeq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"costeq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CostEqError, LookupError) as exc:
        msg = exc.args[0] if isinstance(exc, LookupError) and exc.args else exc
        print(f"costeq: error: {msg}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
