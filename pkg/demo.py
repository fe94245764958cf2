#!/usr/bin/env python3
"""
Demo script for antimatroid-heapsort
Walks through the small example, the optimal pipeline, the chordal backend,
the families where heapsort falls short, and the Dijkstra equivalence.
"""

import argparse
import random
import sys

from bench import bottleneck_chain
from chordal import count_peos
from core import ComparisonOracle, enumerate_language
from dijkstra import check_transcript_equivalence, dijkstra_order, random_weights
from errors import AntisortError
from instance_file import example_two_instance, parse_text
from limits import demonstrate_suboptimality
from optimal import bottleneck_sequence, compute_layers, optimal_sort
from representations import ErcCds, random_rooted_graph
from sorter import sample_permutation, topological_heapsort


def demo_example_two() -> str:
    """Enumerate the three-element example and sort every member of it"""
    instance = example_two_instance()
    alphabet = instance.alphabet
    lines = ["🔤 Example: c needs a or b", "=" * 50]
    words = enumerate_language(instance.ground_truth()).permutations()
    lines.append(f"Permutations: {', '.join(sorted(alphabet.format_word(w) for w in words))}")
    for word in words:
        report, _ = topological_heapsort(instance.make_cds(), ComparisonOracle(word))
        status = "✅" if tuple(report.output) == tuple(word) else "❌"
        lines.append(f"{status} hidden {alphabet.format_word(word)}: {report.comparisons} comparisons")
    return "\n".join(lines)


def demo_optimal(seed: int = 0) -> str:
    """Plain versus optimal comparisons on bottleneck chains of growing length"""
    rng = random.Random(seed)
    lines = ["⚡ Bottleneck chains (4 unordered pairs each)", "=" * 50]
    for n in (64, 256, 1024):
        ercs = bottleneck_chain(n, 4)
        hidden = sample_permutation(ErcCds(ercs), rng)
        plain, _ = topological_heapsort(ErcCds(ercs), ComparisonOracle(hidden))
        layers = compute_layers(ErcCds(ercs))
        optimal = optimal_sort(ErcCds(ercs), ComparisonOracle(hidden), itb_bits=4.0)
        lines.append(f"n={n}: {layers.k} layers, {bottleneck_sequence(layers).t} bottlenecks, "
                     f"plain {plain.comparisons} / optimal {optimal.comparisons} comparisons")
    return "\n".join(lines)


def demo_chordal() -> str:
    """Perfect elimination orderings of a small path, counted two ways"""
    instance = parse_text("graph chordal\nalphabet a b c\na b\nb c\n")
    alphabet = instance.alphabet
    words = enumerate_language(instance.ground_truth()).permutations()
    lines = ["🌳 Path a-b-c", "=" * 50,
             f"Elimination orderings: {count_peos(instance.payload)}",
             f"Simplicial-pruning language: {', '.join(alphabet.format_word(w) for w in words)}"]
    return "\n".join(lines)


def demo_negative_results(seed: int = 0) -> str:
    """Ratio of comparisons to the ITB on the families where heapsort is not optimal"""
    rng = random.Random(seed)
    lines = ["📉 Where topological heapsort falls short", "=" * 50]
    for row in demonstrate_suboptimality(rng, trials=4):
        lines.append(f"{row.family:>12} n={row.n:<4} itb={row.itb_bits:7.2f} "
                     f"comparisons={row.comparisons:9.2f} ratio={row.ratio:6.2f}")
    return "\n".join(lines)


def demo_dijkstra(seed: int = 0) -> str:
    """Dijkstra on the working-set heap against heapsort over the search antimatroid"""
    rng = random.Random(seed)
    graph = random_weights(random_rooted_graph(12, rng), rng)
    result = dijkstra_order(graph)
    verdict = check_transcript_equivalence(graph)
    lines = ["🧭 Dijkstra versus vertex search", "=" * 50,
             f"Order: {result.order}",
             f"Decrease-keys: {result.decrease_keys}, comparisons: {result.comparisons}",
             f"{'✅' if verdict else '❌'} Transcripts: {verdict.message}"]
    return "\n".join(lines)


SECTIONS = {
    "example": demo_example_two,
    "optimal": demo_optimal,
    "chordal": demo_chordal,
    "limits": demo_negative_results,
    "dijkstra": demo_dijkstra,
}


def main(argv=None) -> int:
    """Main demo function"""
    parser = argparse.ArgumentParser(description="antimatroid-heapsort demo")
    parser.add_argument("--section", choices=list(SECTIONS), action="append",
                        help="Run only this section (repeatable)")
    args = parser.parse_args(argv)

    print("🚀 Welcome to the antimatroid-heapsort demo!")
    print("=" * 60)
    try:
        for name in args.section or list(SECTIONS):
            print()
            print(SECTIONS[name]())
    except AntisortError as e:
        print(f"\n❌ Demo error: {str(e)}")
        return 1
    print("\n✅ Demo completed!")
    return 0


if __name__ == "__main__":
    sys.exit(main())
