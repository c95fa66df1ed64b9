"""``balancekit`` command line: extract, partition, report, export."""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from datetime import date
from pathlib import Path

from . import io as bio
from .core import (NEGATIVE, POSITIVE, build_cluster_graph, connected_components, imbalance,
                   imbalance_percent, relaxed_imbalance)
from .errors import BalanceKitError, EmptySelectionError, ValidationError
from .evaluation import (benchmark, filtering_report, long_format_csv, nmi, reports_to_csv,
                         reports_to_json)
from .extraction import Selection, extract, parliamentary_year, read_votes_csv
from .solvers import SolverConfig, exact_cc, ils_cc, ils_rcc, k_sweep

PROG = "balancekit"
SEED_ENV = "BALANCEKIT_SEED"
METHODS = ("exact-cc", "ils-cc", "ils-rcc", "k-sweep")
SWEEP_SUFFIXES = ("cc", "rcc-k", "rcc-k1", "rcc-k2")


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 42
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def instance_id(selection: Selection, filtering: bool) -> str:
    payload = json.dumps({"selection": selection.describe(), "filtering": filtering},
                         sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:12]


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _iso(text):
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an ISO date: {text!r}") from None


def _selection_from_args(args) -> Selection:
    date_range = None
    if args.year is not None:
        if args.date_from or args.date_to:
            raise ValidationError("--year cannot be combined with --from/--to")
        date_range = parliamentary_year(args.year, args.year_start_month)
    elif args.date_from or args.date_to:
        date_range = (args.date_from or date.min, args.date_to or date.max)
    return Selection(
        domains=tuple(args.domain) if args.domain else None,
        groups=tuple(args.group) if args.group else None,
        countries=tuple(args.country) if args.country else None,
        date_range=date_range,
    )


def cmd_extract(args) -> int:
    table = read_votes_csv(args.votes)
    selection = _selection_from_args(args)
    filtering = not args.no_filtering
    try:
        graph, raw, thresholds, selected = extract(table, selection, filtering)
    except EmptySelectionError:
        raise EmptySelectionError(
            f"empty selection: no active MEP for filter {json.dumps(selection.describe())}") from None
    ident = args.instance_id or instance_id(selection, filtering)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    graph_path = out / f"{ident}.graph"
    bio.write_graph(graph, graph_path)
    (out / f"{ident}.similarity.csv").write_text(raw.to_csv(), encoding="utf-8")
    meps = {m.mep_id: m for m in selected.meps}
    comps = connected_components(graph)
    provenance = {
        "instance_id": ident,
        "source": str(args.votes),
        "selection": selection.describe(),
        "filtering": filtering,
        "thresholds": {"theta_minus": thresholds.theta_minus, "theta_plus": thresholds.theta_plus},
        "counts": {
            "meps": graph.n,
            "texts": len(selected.texts),
            "links_pos": graph.count(POSITIVE),
            "links_neg": graph.count(NEGATIVE),
            "weight_pos": graph.total_weight(POSITIVE),
            "weight_neg": graph.total_weight(NEGATIVE),
            "components": len(comps),
            "giant_component": len(comps[0]) if comps else 0,
        },
        "vertices": [
            {"id": i, "mep_id": mid, "name": meps[mid].name,
             "country": meps[mid].country, "group": meps[mid].group}
            for i, mid in enumerate(raw.mep_ids)
        ],
    }
    (out / f"{ident}.json").write_text(_dump(provenance), encoding="utf-8")
    print(graph_path)
    return 0


def _solver_config(args) -> SolverConfig:
    config = SolverConfig(rng_seed=default_seed())
    if args.config:
        config = SolverConfig.from_file(args.config, config)
    changes = {}
    for flag, name in (("max_iterations", "max_iterations"),
                       ("perturbation_strength", "perturbation_strength"),
                       ("restarts", "restarts"), ("time_budget", "time_budget"),
                       ("seed", "rng_seed")):
        value = getattr(args, flag, None)
        if value is not None:
            changes[name] = value
    k = getattr(args, "k", None)
    if k is not None:
        changes["k_max"] = k
    return config.with_(**changes)


def _write_result(result, prefix: Path, graph) -> dict:
    bio.write_partition(result.partition, prefix.with_name(prefix.name + ".partition"))
    envelope = result.envelope()
    envelope["objective_percent"] = (imbalance_percent(graph, result.objective)
                                     if graph.edge_count else None)
    prefix.with_name(prefix.name + ".json").write_text(_dump(envelope), encoding="utf-8")
    return envelope


def cmd_partition(args) -> int:
    graph = bio.read_graph(args.graph)
    config = _solver_config(args)
    prefix = Path(args.out)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    if args.method == "exact-cc":
        results = {"": exact_cc(graph, config, max_vertices=args.max_vertices)}
    elif args.method == "ils-cc":
        results = {"": ils_cc(graph, config)}
    elif args.method == "ils-rcc":
        if config.k_max is None:
            raise ValidationError("ils-rcc requires --k")
        results = {"": ils_rcc(graph, config)}
    else:
        results = dict(zip(SWEEP_SUFFIXES, k_sweep(graph, config)))
    summary = {}
    for suffix, result in results.items():
        target = prefix.with_name(f"{prefix.name}-{suffix}") if suffix else prefix
        summary[suffix or args.method] = _write_result(result, target, graph)
    if args.method == "k-sweep":
        prefix.with_name(prefix.name + ".json").write_text(_dump(summary), encoding="utf-8")
    print(_dump(summary if args.method == "k-sweep" else summary[args.method]), end="")
    return 0


def _emit_reports(reports, out_prefix):
    if out_prefix is None:
        print(reports_to_csv(reports), end="")
        return
    prefix = Path(out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    prefix.with_name(prefix.name + ".csv").write_text(reports_to_csv(reports), encoding="utf-8")
    prefix.with_name(prefix.name + ".json").write_text(reports_to_json(reports), encoding="utf-8")
    prefix.with_name(prefix.name + ".long.csv").write_text(long_format_csv(reports),
                                                           encoding="utf-8")
    print(prefix.with_name(prefix.name + ".csv"))


def cmd_report(args) -> int:
    if args.report == "nmi":
        value = nmi(bio.read_partition(args.first), bio.read_partition(args.second))
        print(_dump({"nmi": value}), end="")
    elif args.report == "imbalance":
        graph = bio.read_graph(args.graph)
        part = bio.read_partition(args.partition)
        cc, rcc = imbalance(graph, part), relaxed_imbalance(graph, part)
        pct = graph.edge_count > 0
        print(_dump({
            "imbalance": cc, "relaxed_imbalance": rcc,
            "imbalance_percent": imbalance_percent(graph, cc) if pct else None,
            "relaxed_imbalance_percent": imbalance_percent(graph, rcc) if pct else None,
            "cluster_count": part.cluster_count,
        }), end="")
    elif args.report == "filtering":
        rep = filtering_report(bio.read_graph(args.unfiltered), bio.read_graph(args.filtered),
                               bio.read_partition(args.p_unf), bio.read_partition(args.p_f),
                               args.instance_id)
        _emit_reports([rep], args.out)
    else:
        graph = bio.read_graph(args.graph)
        sizes = [int(x) for x in args.sizes.split(",") if x.strip()]
        reports = benchmark(sizes, graph, _solver_config(args), Path(args.graph).stem)
        _emit_reports(reports, args.out)
    return 0


def _labels(provenance):
    if not provenance:
        return None
    data = json.loads(Path(provenance).read_text(encoding="utf-8"))
    return [v.get("name") or v.get("mep_id") for v in data["vertices"]]


def cmd_export(args) -> int:
    graph = bio.read_graph(args.graph)
    cg = build_cluster_graph(graph, bio.read_partition(args.partition))
    if args.format == "dot":
        text = bio.cluster_graph_to_dot(cg, Path(args.partition).stem)
    else:
        text = bio.cluster_graph_to_json(cg, _labels(args.provenance))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(args.out)
    else:
        print(text, end="")
    return 0


def _add_solver_flags(p):
    p.add_argument("--config", help="solver config file (key = value lines)")
    p.add_argument("--seed", type=int, help=f"RNG seed (default 42, or ${SEED_ENV})")
    p.add_argument("--max-iterations", type=int)
    p.add_argument("--perturbation-strength", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--time-budget", type=float, help="seconds per solve")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=PROG, description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="vote CSV -> signed graph")
    p.add_argument("votes", help="vote CSV file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--domain", action="append", help="policy domain (repeatable)")
    p.add_argument("--group", action="append", help="political group (repeatable)")
    p.add_argument("--country", action="append", help="member country (repeatable)")
    p.add_argument("--year", type=int, help="parliamentary year starting in YEAR")
    p.add_argument("--year-start-month", type=int, default=7)
    p.add_argument("--from", dest="date_from", type=_iso)
    p.add_argument("--to", dest="date_to", type=_iso)
    p.add_argument("--no-filtering", action="store_true", help="skip the near-zero filter")
    p.add_argument("--instance-id", help="override the selection fingerprint")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("partition", help="solve CC / RCC on a graph file")
    p.add_argument("graph")
    p.add_argument("--method", required=True, choices=METHODS)
    p.add_argument("--k", type=int, help="k_max for ils-rcc")
    p.add_argument("--max-vertices", type=int, help="refuse exact-cc above this size")
    p.add_argument("--out", required=True, help="output path prefix")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("report", help="NMI, imbalance, filtering and benchmark reports")
    rsub = p.add_subparsers(dest="report", required=True)
    r = rsub.add_parser("nmi")
    r.add_argument("first")
    r.add_argument("second")
    r = rsub.add_parser("imbalance")
    r.add_argument("graph")
    r.add_argument("partition")
    r = rsub.add_parser("filtering")
    r.add_argument("--unfiltered", required=True)
    r.add_argument("--filtered", required=True)
    r.add_argument("--p-unf", required=True)
    r.add_argument("--p-f", required=True)
    r.add_argument("--instance-id", default="")
    r.add_argument("--out", help="output prefix (.csv, .json, .long.csv); stdout CSV if omitted")
    r = rsub.add_parser("benchmark")
    r.add_argument("graph")
    r.add_argument("--sizes", required=True, help="comma-separated sample sizes")
    r.add_argument("--out", help="output prefix (.csv, .json, .long.csv); stdout CSV if omitted")
    _add_solver_flags(r)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("export", help="cluster graph as DOT or JSON")
    p.add_argument("graph")
    p.add_argument("partition")
    p.add_argument("--format", choices=("dot", "json"), default="dot")
    p.add_argument("--provenance", help="extraction sidecar JSON for vertex labels")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (BalanceKitError, OSError) as exc:
        message = " ".join(str(exc).split())
        print(f"{PROG}: error: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
