"""Command-line interface: impute, mine-patterns, mask, eval, sweep, sdg.

Exit codes: 0 success, 1 usage or configuration error, 2 data error.
Partial web failures are recorded in the report and do not affect the exit
code.  ``--config file.json`` supplies run settings (field names mirror
RunConfig); explicit flags win over the file.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .depgraph import build_dependency_graph, export_dot
from .evalharness import evaluate, sweep
from .patterns import mine_patterns, save_patterns
from .pipeline import RunConfig, impute
from .providers import HttpProvider, LocalCorpusProvider
from .rules import RuleParseError, RuleSet, parse_rules_file
from .tabular import (
    MaskSpec,
    TableError,
    load_table,
    mask_random,
    read_ground_truth,
    write_ground_truth,
    write_table,
)

USAGE_ERROR = 1
DATA_ERROR = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 instead of argparse's 2
        raise _UsageError(message)


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--corpus", help="JSONL corpus for the local provider")
    p.add_argument("--url-template", help="live provider URL with {query}")
    p.add_argument("--pages", type=int, default=None)
    p.add_argument("--k", type=float, default=None, help="internal fill threshold")
    p.add_argument("--K", type=float, default=None, help="keyword-group threshold")
    p.add_argument("--Q", type=int, default=None, help="pattern support threshold")
    p.add_argument("--sample", type=int, default=None)
    p.add_argument(
        "--dict",
        action="append",
        default=[],
        metavar="ATTR=PATH",
        help="supplementary dictionary file, repeatable",
    )
    p.add_argument("--patterns", help="pattern cache path (read if present, written)")
    p.add_argument("--config", help="JSON config file; flags override it")
    p.add_argument("--reiterate", action="store_true", default=None)


def _build_parser() -> _Parser:
    parser = _Parser(prog="webimpute", description="web-assisted table imputation")
    parser.add_argument("--version", action="version", version=f"webimpute {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("impute", help="fill missing cells of a table")
    p.add_argument("--table", required=True)
    p.add_argument("--rules", required=True)
    _add_run_flags(p)
    p.add_argument("--out", required=True, help="imputed table CSV")
    p.add_argument("--report", help="run report JSON")

    p = sub.add_parser("mine-patterns", help="mine text patterns for one attribute pair")
    p.add_argument("--table", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--pair", required=True, metavar="A1,A2")
    p.add_argument("--min-support", type=int, required=True)
    p.add_argument("--sample", type=int, default=5)
    p.add_argument("--pages", type=int, default=5)
    p.add_argument("--out", required=True)

    p = sub.add_parser("mask", help="mask a complete table for an experiment")
    p.add_argument("--table", required=True)
    p.add_argument("--ratio", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--protect", action="append", default=[], metavar="ATTR")
    p.add_argument("--rules", help="optional rules for the imputability check")
    p.add_argument("--out", required=True, help="masked table CSV")
    p.add_argument("--truth", required=True, help="ground truth JSON")

    p = sub.add_parser("eval", help="score an imputed table against ground truth")
    p.add_argument("--table", required=True, help="imputed table CSV")
    p.add_argument("--truth", required=True)
    p.add_argument("--report", help="metrics JSON (default: stdout)")

    p = sub.add_parser("sweep", help="mask/impute/eval over a ratio x seed grid")
    p.add_argument("--table", required=True)
    p.add_argument("--rules", required=True)
    _add_run_flags(p)
    p.add_argument("--ratios", required=True, help="comma-separated, e.g. 0.05,0.2")
    p.add_argument("--seeds", default="1,2,3,4,5", help="comma-separated (default 1-5)")
    p.add_argument("--protect", action="append", default=[], metavar="ATTR")
    p.add_argument("--out", required=True, help="per-run metrics CSV")
    p.add_argument("--report", help="plain-text summary (default: stdout)")
    p.add_argument("--parallel", action="store_true")

    p = sub.add_parser("sdg", help="export the dependency graph as DOT")
    p.add_argument("--rules", required=True)
    p.add_argument("--table", required=True)
    p.add_argument("--dot", required=True)
    return parser


def _load_config(args) -> RunConfig:
    base = {}
    if getattr(args, "config", None):
        base = json.loads(Path(args.config).read_text(encoding="utf-8"))
    overrides = {
        "bayes_threshold": args.k,
        "group_threshold": args.K,
        "pattern_support": args.Q,
        "pages": args.pages,
        "sample": args.sample,
        "pattern_cache": args.patterns,
        "reiterate": args.reiterate,
    }
    for key, value in overrides.items():
        if value is not None:
            base[key] = value
    dictionaries = dict(base.get("dictionaries", {}))
    for item in args.dict:
        attr, sep, path = item.partition("=")
        if not sep or not attr or not path:
            raise _UsageError(f"--dict expects ATTR=PATH, got {item!r}")
        dictionaries[attr] = path
    base["dictionaries"] = dictionaries
    try:
        return RunConfig.from_dict(base)
    except (TypeError, ValueError) as exc:
        raise _UsageError(f"bad configuration: {exc}") from None


def _build_provider(args, config: RunConfig):
    if getattr(args, "corpus", None):
        return LocalCorpusProvider.from_jsonl(args.corpus, page_size=config.page_size)
    if getattr(args, "url_template", None):
        return HttpProvider(args.url_template)
    settings = dict(config.provider or {})
    kind = settings.pop("kind", None)
    if kind == "local":
        return LocalCorpusProvider.from_jsonl(
            settings["corpus"], page_size=config.page_size
        )
    if kind == "http":
        return HttpProvider(**settings)
    raise _UsageError("need --corpus, --url-template, or a provider in --config")


def _cmd_impute(args) -> int:
    config = _load_config(args)
    provider = _build_provider(args, config)
    table = load_table(args.table)
    ruleset = RuleSet.estimate(parse_rules_file(args.rules), table)
    imputed, report = impute(table, ruleset, config, provider)
    write_table(imputed, args.out)
    if args.report:
        report.write(args.report)
    counts = report.counts
    print(
        f"{report.initial_missing} missing: "
        + ", ".join(f"{k}={v}" for k, v in sorted(counts.items()))
    )
    return 0


def _cmd_mine_patterns(args) -> int:
    table = load_table(args.table)
    provider = LocalCorpusProvider.from_jsonl(args.corpus)
    a1, sep, a2 = args.pair.partition(",")
    if not sep or not a1.strip() or not a2.strip():
        raise _UsageError(f"--pair expects A1,A2, got {args.pair!r}")
    patterns = mine_patterns(
        provider,
        table,
        (a1.strip(), a2.strip()),
        min_support=args.min_support,
        sample=args.sample,
        pages=args.pages,
    )
    save_patterns(patterns, args.out)
    print(f"{len(patterns)} pattern(s) -> {args.out}")
    return 0


def _cmd_mask(args) -> int:
    table = load_table(args.table)
    rules = parse_rules_file(args.rules) if args.rules else None
    spec = MaskSpec(ratio=args.ratio, seed=args.seed, protected_attrs=frozenset(args.protect))
    masked, truth = mask_random(table, spec, rules=rules)
    write_table(masked, args.out)
    write_ground_truth(truth, args.truth)
    print(f"masked {len(truth)} cells -> {args.out}")
    return 0


def _cmd_eval(args) -> int:
    imputed = load_table(args.table)
    truth = read_ground_truth(args.truth)
    metrics = evaluate(truth, imputed)
    text = json.dumps(metrics.to_dict(), indent=2, sort_keys=True) + "\n"
    if args.report:
        Path(args.report).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _parse_list(text: str, kind, flag: str) -> list:
    try:
        return [kind(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise _UsageError(f"{flag} expects comma-separated values, got {text!r}") from None


def _cmd_sweep(args) -> int:
    config = _load_config(args)
    provider = _build_provider(args, config)
    table = load_table(args.table)
    ruleset = RuleSet.estimate(parse_rules_file(args.rules), table)
    ratios = _parse_list(args.ratios, float, "--ratios")
    seeds = _parse_list(args.seeds, int, "--seeds")
    if not ratios or not seeds:
        raise _UsageError("--ratios and --seeds must be non-empty")
    result = sweep(
        table, ruleset, config, provider, ratios, seeds,
        protected=args.protect, parallel=args.parallel,
    )
    Path(args.out).write_text(result.to_csv(), encoding="utf-8")
    summary = result.summary()
    if args.report:
        Path(args.report).write_text(summary, encoding="utf-8")
    sys.stdout.write(summary)
    return 0


def _cmd_sdg(args) -> int:
    table = load_table(args.table)
    ruleset = RuleSet.estimate(parse_rules_file(args.rules), table)
    graph = build_dependency_graph(ruleset)
    Path(args.dot).write_text(export_dot(graph), encoding="utf-8")
    print(f"{len(graph.nodes)} nodes, {len(graph.edges)} edges -> {args.dot}")
    return 0


_COMMANDS = {
    "impute": _cmd_impute,
    "mine-patterns": _cmd_mine_patterns,
    "mask": _cmd_mask,
    "eval": _cmd_eval,
    "sweep": _cmd_sweep,
    "sdg": _cmd_sdg,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("run 'webimpute --help' for usage", file=sys.stderr)
        return USAGE_ERROR
    except FileNotFoundError as exc:
        print(f"error: missing input file: {exc.filename or exc}", file=sys.stderr)
        return DATA_ERROR
    except (TableError, RuleParseError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
