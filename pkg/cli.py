#!/usr/bin/env python3
"""
antisort - command-line front end
Subcommands: sort, enumerate, check, layers, bench, dijkstra.

Machine-readable results (key=value lines or CSV) go to stdout or --out and
are byte-identical for identical inputs; the rich console view goes to
stderr. Exit codes: 0 ok, 1 failed verdict, 2 usage or input error.
"""

import argparse
import logging
import random
import sys
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, Field
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from bench import SUITES, limits_verdict, run_bench, write_csv
from chordal import count_peos
from core import ComparisonOracle, Verdict, bits_of_count, check_antimatroid_axioms, count_permutations, enumerate_language
from dijkstra import (
    EXHAUSTIVE_LIMIT,
    WeightedDigraph,
    check_distance_ordering_equivalence,
    check_transcript_equivalence,
    dijkstra_order,
    equivalence_suite,
)
from errors import (
    AntisortError,
    ContractError,
    InstanceParseError,
    MergeMismatchError,
    NotFullError,
    StallError,
)
from instance_file import Instance, parse_instance, parse_order_text, read_order
from optimal import bottleneck_sequence, compute_layers, optimal_sort
from settings import get_settings
from sorter import sample_permutation, topological_heapsort, validate_cds

logger = logging.getLogger("antisort")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


class RunConfig(BaseModel):
    """Everything that determines a run; identical configs give identical machine output"""
    mode: Literal["plain", "optimal"] = "plain"
    order: Optional[str] = None
    order_file: Optional[str] = None
    seed: int = 0
    validate_cds: bool = False
    transcript: bool = False
    bf_limit: int = Field(default_factory=lambda: get_settings().bf_limit, ge=0)
    out: Optional[str] = None

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        values = {
            "mode": getattr(args, "mode", "plain"),
            "order": getattr(args, "order", None),
            "order_file": getattr(args, "order_file", None),
            "seed": getattr(args, "seed", 0),
            "validate_cds": getattr(args, "validate", False),
            "transcript": getattr(args, "transcript", False),
            "out": getattr(args, "out", None),
        }
        if args.bf_limit is not None:
            values["bf_limit"] = args.bf_limit
        return cls(**values)


console = Console(stderr=True)


def emit(lines: List[str], config: RunConfig):
    """Write machine-readable lines to --out or stdout"""
    text = "".join(line + "\n" for line in lines)
    if config.out:
        Path(config.out).write_text(text, encoding="utf-8")
        console.print(f"✅ Results written to {config.out}")
    else:
        sys.stdout.write(text)


def _itb_bits(instance: Instance, config: RunConfig) -> Optional[float]:
    """ITB when the instance is small enough to count exactly"""
    if instance.n > config.bf_limit:
        return None
    count = count_permutations(instance.ground_truth())
    return bits_of_count(count) if count else None


def hidden_order(instance: Instance, config: RunConfig) -> tuple:
    if config.order is not None:
        return parse_order_text(config.order, instance.alphabet)
    if config.order_file is not None:
        return read_order(config.order_file, instance.alphabet)
    return tuple(sample_permutation(instance.make_cds(), random.Random(config.seed)))


def _verdict_lines(results) -> List[str]:
    lines = []
    for name, verdict in results:
        lines.append(f"{name}={'ok' if verdict else 'fail'}")
        if not verdict:
            lines.append(f"{name}.message={verdict.message}")
            if verdict.witness is not None:
                lines.append(f"{name}.witness={verdict.witness}")
    return lines


def _show_verdicts(title: str, results):
    table = Table(title=title)
    table.add_column("check")
    table.add_column("status")
    table.add_column("detail")
    for name, verdict in results:
        table.add_row(name, "✅" if verdict else "❌", verdict.message)
    console.print(table)


def cmd_sort(args) -> int:
    config = RunConfig.from_args(args)
    instance = parse_instance(args.instance)
    try:
        return _sort(instance, config)
    except StallError as e:
        console.print(f"❌ {e}")
        console.print(f"   stuck after: {instance.alphabet.format_word(e.prefix) or 'ε'}")
        return EXIT_FAILED


def _sort(instance: Instance, config: RunConfig) -> int:
    alphabet = instance.alphabet
    order = hidden_order(instance, config)
    itb = _itb_bits(instance, config)
    lines = []

    if config.validate_cds:
        if instance.n > config.bf_limit:
            console.print(f"⚠️  n={instance.n} is above the brute-force limit; skipping CDS validation")
        else:
            verdict = validate_cds(instance.make_cds(), instance.ground_truth(), config.bf_limit)
            lines.extend(_verdict_lines([("validate_cds", verdict)]))
            if not verdict:
                emit(lines, config)
                return EXIT_FAILED

    oracle = ComparisonOracle(order, record=config.validate_cds)
    transcript = None
    if config.mode == "optimal":
        if config.transcript:
            console.print("⚠️  transcripts are recorded in plain mode only")
        report = optimal_sort(instance.make_cds, oracle, itb_bits=itb)
    else:
        report, transcript = topological_heapsort(instance.make_cds(), oracle,
                                                  record_transcript=config.transcript, itb_bits=itb)

    correct = tuple(report.output) == tuple(order)
    lines.extend(report.machine_lines(alphabet))
    lines.append(f"correct={'true' if correct else 'false'}")
    if config.validate_cds:
        lines.append(f"answers_consistent={'true' if oracle.replay() else 'false'}")
    if transcript is not None:
        for i, queue in enumerate(transcript.queues):
            lines.append(f"Q{i}={alphabet.format_set(sorted(queue))}")
        verdict = transcript.check(report.output)
        lines.extend(_verdict_lines([("transcript", verdict)]))
        correct = correct and bool(verdict)
    emit(lines, config)

    table = Table(title=f"sort ({report.mode})")
    table.add_column("field")
    table.add_column("value")
    table.add_row("output", alphabet.format_word(report.output) or "ε")
    table.add_row("comparisons", str(report.comparisons))
    table.add_row("cds steps / work", f"{report.cds_steps} / {report.cds_work}")
    table.add_row("itb bits", "-" if report.itb_bits is None else f"{report.itb_bits:.3f}")
    table.add_row("ratio", "-" if report.ratio is None else f"{report.ratio:.3f}")
    table.add_row("wall / cds time", f"{report.wall_time * 1000:.2f} ms / {report.cds_time * 1000:.2f} ms")
    console.print(table)
    console.print("✅ Output matches the hidden order" if correct else "❌ Output differs from the hidden order")
    return EXIT_OK if correct else EXIT_FAILED


def cmd_enumerate(args) -> int:
    config = RunConfig.from_args(args)
    instance = parse_instance(args.instance)
    language = enumerate_language(instance.ground_truth(), limit=config.bf_limit)
    words = sorted(instance.alphabet.format_word(word) or "ε" for word in language.permutations())
    emit(words, config)
    console.print(f"✅ {len(words)} permutations")
    return EXIT_OK


def instance_checks(instance: Instance, limit: int) -> List[tuple]:
    """Verdicts for the axioms, the CDS and the layer bounds of a small instance"""
    S = instance.ground_truth()
    language = enumerate_language(S, limit=limit)
    results = [
        ("antimatroid_axioms", check_antimatroid_axioms(language, limit)),
        ("validate_cds", validate_cds(instance.make_cds(), S, limit)),
    ]
    permutations = language.permutations()
    if not permutations:
        results.append(("full", Verdict.failed("no word uses every element")))
        return results
    results.append(("full", Verdict.passed(f"{len(permutations)} permutations")))

    count = len(permutations)
    layers = compute_layers(instance.make_cds())
    beta = bottleneck_sequence(layers)
    results.append(("layer_bound", Verdict(ok=count >= 2 ** layers.lower_bound_bits(),
                                           message=f"|P|={count}, n-k={layers.lower_bound_bits()}")))
    results.append(("bottleneck_bound", Verdict(ok=count >= 2 ** beta.lower_bound_bits(),
                                                message=f"|P|={count}, (n-t)/2={beta.lower_bound_bits()}")))
    missing = next((word for word in permutations
                    if [x for x in word if x in beta.bottlenecks] != list(beta.bottlenecks)), None)
    results.append(("bottleneck_order", Verdict(ok=missing is None,
                                                message="bottlenecks appear in order in every permutation", witness=missing)))
    if instance.kind == "chordal" and instance.n:
        peos = count_peos(instance.payload, limit)
        results.append(("peo_count", Verdict(ok=peos == count and peos >= 2 ** (instance.n - 1),
                                             message=f"{peos} perfect elimination orderings")))
    return results


def cmd_check(args) -> int:
    config = RunConfig.from_args(args)
    instance = parse_instance(args.instance)
    results = instance_checks(instance, config.bf_limit)
    emit(_verdict_lines(results), config)
    _show_verdicts(f"check {instance.kind}", results)
    return EXIT_OK if all(verdict for _, verdict in results) else EXIT_FAILED


def cmd_layers(args) -> int:
    config = RunConfig.from_args(args)
    instance = parse_instance(args.instance)
    alphabet = instance.alphabet
    layers = compute_layers(instance.make_cds())
    beta = bottleneck_sequence(layers)
    lines = [f"L{i}={alphabet.format_set(layer)}" for i, layer in enumerate(layers.layers, start=1)]
    lines.append(f"k={layers.k}")
    lines.append(f"bottlenecks={alphabet.format_word(beta.bottlenecks)}")
    lines.append(f"t={beta.t}")
    emit(lines, config)
    console.print(f"✅ {layers.k} layers, {beta.t} bottlenecks")
    return EXIT_OK


def cmd_bench(args) -> int:
    config = RunConfig.from_args(args)
    suites = args.suite or list(SUITES)
    results = run_bench(config.seed, suites, quick=args.quick)
    emit(write_csv(results), config)

    table = Table(title="measured constants")
    table.add_column("suite")
    table.add_column("rows")
    table.add_column("worst constant")
    table.add_column("ceiling")
    table.add_column("status")
    ok = True
    for result in results:
        passed = result.ok
        if result.name == "limits":
            verdict = limits_verdict(result)
            passed = bool(verdict)
            if not verdict:
                console.print(f"❌ {verdict.message}")
        ok = ok and passed
        ceiling = "-" if result.ceiling is None else f"{result.ceiling:.1f}"
        table.add_row(result.name, str(len(result.rows)), f"{result.worst:.3f}", ceiling, "✅" if passed else "❌")
    console.print(table)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_dijkstra(args) -> int:
    config = RunConfig.from_args(args)
    rng = random.Random(config.seed)
    lines = []
    if args.instance:
        instance = parse_instance(args.instance)
        if instance.kind == "weighted-digraph":
            graph = instance.payload.graph
            weighted = instance.payload
        elif instance.kind == "digraph":
            graph = instance.payload
            weighted = WeightedDigraph(graph.n, [(u, v, 1) for u, v in graph.arcs()], graph.root)
        else:
            raise InstanceParseError(f"dijkstra needs a digraph or weighted-digraph instance, not {instance.kind}")
        result = dijkstra_order(weighted)
        alphabet = instance.alphabet
        lines.append(f"order={alphabet.format_word(result.order)}")
        lines.extend(f"dist.{alphabet.name_of(v)}={result.distances[v]}" for v in sorted(result.distances))
        lines.append(f"decrease_keys={result.decrease_keys}")
        lines.append(f"comparisons={result.comparisons}")
        results = [("transcripts", check_transcript_equivalence(weighted))]
        if graph.n <= min(EXHAUSTIVE_LIMIT, config.bf_limit):
            results.insert(0, ("search_orders", check_distance_ordering_equivalence(graph, rng)))
    else:
        results = equivalence_suite(rng, small_graphs=args.trials, transcript_graphs=args.trials)
    lines.extend(_verdict_lines(results))
    emit(lines, config)
    _show_verdicts("dijkstra", results)
    return EXIT_OK if all(verdict for _, verdict in results) else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="antisort", description="Sorting under antimatroid constraints")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")
    parser.add_argument("--bf-limit", type=int, default=None, help="Brute-force alphabet-size limit")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_out(p):
        p.add_argument("--out", help="Write machine-readable output to this file")
        return p

    sort = with_out(sub.add_parser("sort", help="Sort a hidden order under the instance's constraints"))
    sort.add_argument("instance", help="Instance file")
    sort.add_argument("--mode", choices=["plain", "optimal"], default="plain")
    source = sort.add_mutually_exclusive_group()
    source.add_argument("--order", help="Hidden order as a word over the alphabet")
    source.add_argument("--order-file", help="File holding the hidden order")
    sort.add_argument("--seed", type=int, default=0, help="Seed for sampling a hidden order")
    sort.add_argument("--validate", action="store_true", help="Check the CDS against brute force first")
    sort.add_argument("--transcript", action="store_true", help="Print the queue transcript")
    sort.set_defaults(handler=cmd_sort)

    enum = with_out(sub.add_parser("enumerate", help="List every permutation of the language"))
    enum.add_argument("instance")
    enum.set_defaults(handler=cmd_enumerate)

    check = with_out(sub.add_parser("check", help="Axiom, CDS and layer-bound verdicts"))
    check.add_argument("instance")
    check.set_defaults(handler=cmd_check)

    layers = with_out(sub.add_parser("layers", help="Layers and bottlenecks"))
    layers.add_argument("instance")
    layers.set_defaults(handler=cmd_layers)

    bench = with_out(sub.add_parser("bench", help="Measured-constant suites as CSV"))
    bench.add_argument("--suite", action="append", choices=list(SUITES), help="Run only this suite (repeatable)")
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--quick", action="store_true", help="Smaller sizes")
    bench.set_defaults(handler=cmd_bench)

    dijkstra = with_out(sub.add_parser("dijkstra", help="Dijkstra orderings versus vertex search"))
    dijkstra.add_argument("instance", nargs="?", help="digraph or weighted-digraph instance")
    dijkstra.add_argument("--seed", type=int, default=0)
    dijkstra.add_argument("--trials", type=int, default=20, help="Random graphs per suite part")
    dijkstra.set_defaults(handler=cmd_dijkstra)
    return parser


def setup_logging(verbose: bool):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=console, show_path=False)],
        force=True,
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)
    try:
        return args.handler(args)
    except (StallError, ContractError, MergeMismatchError, NotFullError) as e:
        console.print(f"❌ {e}")
        return EXIT_FAILED
    except AntisortError as e:
        console.print(f"❌ {e}")
        return EXIT_USAGE
    except OSError as e:
        console.print(f"❌ {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
