"""Command-line entry point.

Subcommands: extract-triplets, build, prune, export, eval, all. Every
command writes a run manifest next to its outputs recording the config
snapshot, input/output digests, and per-stage wall clock, so a run can be
replayed bit-exactly (pass the manifest to --config).

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time
from contextlib import contextmanager
from pathlib import Path

from . import __version__
from .config import CorpusConfig, load_config
from .corpus import (CorpusFormatError, dump_corpus, load_corpus,
                     load_synonym_lexicon, normalize_phrase)
from .evaluation import (compare_gold, load_gold_rules, node_perplexity,
                         tree_perplexity)
from .hierarchy import build_tree, serialize_tree
from .lda import posterior_estimates
from .ontology import (build_triplet_graph, export_ontology, filter_corpus,
                       filter_ontology, link_relations, load_ontology, prune)
from .triplets import (document_from_sentences, extract_pattern_triplets,
                       extract_structural_triplets, parse_itemized_text,
                       passive_inverse)


_DEFAULT_THREADS = max(1, os.cpu_count() or 1)


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            h.update(block)
    return "sha256:" + h.hexdigest()


class _Run:
    """Collects stage timings and file digests for the manifest."""

    def __init__(self, command: str, config: CorpusConfig):
        self.command = command
        self.config = config
        self.inputs: dict[str, str] = {}
        self.outputs: dict[str, str] = {}
        self.timings: dict[str, float] = {}

    @contextmanager
    def stage(self, name: str):
        start = time.perf_counter()
        yield
        self.timings[name] = round(time.perf_counter() - start, 6)

    def record_input(self, path: str | Path | None):
        if path is not None:
            self.inputs[str(path)] = _sha256(Path(path))

    def write_output(self, path: str | Path, data: str | bytes):
        path = Path(path)
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
        if isinstance(data, str):
            path.write_text(data, encoding="utf-8")
        else:
            path.write_bytes(data)
        self.outputs[str(path)] = _sha256(path)

    def record_output(self, path: str | Path):
        self.outputs[str(path)] = _sha256(Path(path))

    def write_manifest(self, path: str | Path):
        manifest = {
            "tool": "ontotree",
            "version": __version__,
            "command": self.command,
            "config": self.config.as_dict(),
            "inputs": self.inputs,
            "outputs": self.outputs,
            "timings_s": self.timings,
        }
        Path(path).write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _add_config_flags(parser):
    parser.add_argument("--config", metavar="PATH",
                        help="JSON or TOML config file (or a previous run manifest)")
    parser.add_argument("--alpha", type=float, help="document-topic prior")
    parser.add_argument("--eta", type=float, help="topic-relation prior")
    parser.add_argument("--gamma", type=float, help="partition penalty factor")
    parser.add_argument("--max-depth", type=int, help="tree depth cap")
    parser.add_argument("--iterations", type=int, help="sampler sweeps per node")
    parser.add_argument("--acrp-max-passes", type=int,
                        help="partition pass cap for topic-count estimation")
    parser.add_argument("--seed-rng", type=int, help="run seed (default 0)")


def _resolve_config(args) -> CorpusConfig:
    config = load_config(args.config) if args.config else CorpusConfig()
    overrides = {}
    for flag, field in (("alpha", "alpha"), ("eta", "eta"), ("gamma", "gamma"),
                        ("max_depth", "max_depth"),
                        ("iterations", "gibbs_iterations"),
                        ("acrp_max_passes", "acrp_max_passes"),
                        ("seed_rng", "rng_seed")):
        value = getattr(args, flag, None)
        if value is not None:
            overrides[field] = value
    return config.replace(**overrides) if overrides else config


def _prune_corpus(corpus, seeds, steps):
    graph = build_triplet_graph(corpus.triplets())
    reached, kept = prune(graph, [normalize_phrase(s) for s in seeds], steps)
    return filter_corpus(corpus, kept), reached


def _cmd_extract(args) -> int:
    run = _Run("extract-triplets", _resolve_config(args))
    run.record_input(args.input)
    text = Path(args.input).read_text(encoding="utf-8")
    doc_id = args.doc_id or Path(args.input).stem
    with run.stage("extract"):
        if args.mode == "structural":
            itemized = parse_itemized_text(text, doc_id=doc_id,
                                           spaces_per_indent=args.spaces_per_indent)
            triplets, document = extract_structural_triplets(itemized)
        else:
            sentences = []
            triplets = []
            for line in text.splitlines():
                if not line.strip():
                    continue
                found = extract_pattern_triplets(line, doc_id=doc_id)
                if args.passive_inverse:
                    inverses = []
                    for t in found:
                        try:
                            inverses.append(passive_inverse(t))
                        except ValueError:
                            pass
                    found = found + inverses
                sentences.append((line, found))
                triplets.extend(found)
            document = document_from_sentences(sentences, doc_id=doc_id)
    from .corpus import Corpus
    run.write_output(args.out, dump_corpus(Corpus([document])))
    run.write_manifest(str(args.out) + ".manifest.json")
    print(f"extracted {len(triplets)} triplets -> {args.out}")
    return 0


def _cmd_build(args) -> int:
    config = _resolve_config(args)
    run = _Run("build", config)
    run.record_input(args.corpus)
    run.record_input(args.synonyms)
    with run.stage("load"):
        corpus = load_corpus(args.corpus)
        lexicon = load_synonym_lexicon(args.synonyms) if args.synonyms else None
    reached = None
    if args.seed and not args.prune_after:
        with run.stage("prune"):
            corpus, reached = _prune_corpus(corpus, args.seed, args.steps)
    with run.stage("build"):
        tree = build_tree(corpus, config, lexicon=lexicon, threads=args.threads)
    with run.stage("link"):
        ontology = link_relations(tree, corpus)
        if args.seed and args.prune_after:
            graph = build_triplet_graph(corpus.triplets())
            reached, _ = prune(graph, [normalize_phrase(s) for s in args.seed], args.steps)
            ontology = filter_ontology(ontology, reached)
    ontology_out = args.ontology_out or str(Path(args.out).with_suffix("")) + ".ontology.json"
    run.write_output(args.out, serialize_tree(tree))
    run.write_output(ontology_out, export_ontology(ontology, "json"))
    run.write_manifest(str(args.out) + ".manifest.json")
    print(f"tree: depth {tree.depth}, {sum(1 for _ in tree.nodes())} nodes -> {args.out}")
    print(f"ontology: {len(ontology.classes)} classes, "
          f"{len(ontology.assertions)} assertions "
          f"({ontology.dropped_triplets} triplets unmatched) -> {ontology_out}")
    if reached is not None:
        print(f"pruned to {len(reached)} phrases around seeds")
    return 0


def _cmd_prune(args) -> int:
    run = _Run("prune", _resolve_config(args))
    run.record_input(args.corpus)
    with run.stage("load"):
        corpus = load_corpus(args.corpus)
    with run.stage("prune"):
        pruned, reached = _prune_corpus(corpus, args.seed, args.steps)
    run.write_output(args.out, dump_corpus(pruned))
    run.write_manifest(str(args.out) + ".manifest.json")
    print(f"kept {pruned.n_tokens}/{corpus.n_tokens} tokens, "
          f"{len(reached)} phrases reached -> {args.out}")
    return 0


def _cmd_export(args) -> int:
    run = _Run("export", _resolve_config(args))
    run.record_input(args.ontology)
    with run.stage("export"):
        ontology = load_ontology(args.ontology)
        data = export_ontology(ontology, args.format)
    run.write_output(args.out, data)
    run.write_manifest(str(args.out) + ".manifest.json")
    print(f"wrote {args.format} export -> {args.out}")
    return 0


def _write_prf_outputs(run, report, out):
    out = Path(out)
    rows = [("true_positives", report.true_positives),
            ("false_positives", report.false_positives),
            ("false_negatives", report.false_negatives),
            ("precision", report.precision),
            ("recall", report.recall),
            ("f_measure", report.f_measure)]
    text = "metric,value\n" + "".join(f"{k},{v}\n" for k, v in rows)
    run.write_output(out, text)
    from .report import save_prf_plot
    figure = out.with_suffix(".png")
    save_prf_plot(report, figure)
    run.record_output(figure)


def _write_perplexity_outputs(run, trace, out):
    out = Path(out)
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sweep", "perplexity"])
        for i, value in enumerate(trace, start=1):
            writer.writerow([i, f"{value:.10g}"])
    run.record_output(out)
    from .report import save_perplexity_plot
    figure = out.with_suffix(".png")
    save_perplexity_plot(trace, figure)
    run.record_output(figure)


def _trace_recorder(config, trace):
    def callback(state, _sweep):
        estimates = posterior_estimates(state, config.alpha, config.eta)
        trace.append(node_perplexity(state, estimates))
    return callback


def _cmd_eval(args) -> int:
    config = _resolve_config(args)
    run = _Run("eval", config)
    if args.gold:
        if not args.ontology:
            raise CorpusFormatError("--gold evaluation needs --ontology")
        run.record_input(args.gold)
        run.record_input(args.ontology)
        with run.stage("compare"):
            report = compare_gold(load_ontology(args.ontology), load_gold_rules(args.gold))
        print(f"p={report.precision:.3f} r={report.recall:.3f} f={report.f_measure:.3f}")
        print(f"tp={report.true_positives} fp={report.false_positives} "
              f"fn={report.false_negatives}")
        if args.out:
            _write_prf_outputs(run, report, args.out)
            run.write_manifest(str(args.out) + ".manifest.json")
        return 0
    if args.perplexity:
        if not args.corpus:
            raise CorpusFormatError("--perplexity evaluation needs --corpus")
        run.record_input(args.corpus)
        trace: list[float] = []
        with run.stage("build"):
            corpus = load_corpus(args.corpus)
            tree = build_tree(corpus, config, threads=args.threads,
                              root_sweep_callback=_trace_recorder(config, trace))
        with run.stage("perplexity"):
            summary = tree_perplexity(tree)
        for level, value in summary["levels"].items():
            print(f"level {level}: perplexity={value:.6g}")
        if summary["overall"] is not None:
            print(f"overall: perplexity={summary['overall']:.6g}")
        if args.out:
            _write_perplexity_outputs(run, trace, args.out)
            run.write_manifest(str(args.out) + ".manifest.json")
        return 0
    raise CorpusFormatError("eval needs --gold or --perplexity")


def _cmd_all(args) -> int:
    config = _resolve_config(args)
    run = _Run("all", config)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    run.record_input(args.corpus)
    run.record_input(args.synonyms)
    run.record_input(args.gold)
    with run.stage("load"):
        corpus = load_corpus(args.corpus)
        lexicon = load_synonym_lexicon(args.synonyms) if args.synonyms else None
    if args.seed:
        with run.stage("prune"):
            corpus, reached = _prune_corpus(corpus, args.seed, args.steps)
            print(f"pruned to {len(reached)} phrases, {corpus.n_tokens} tokens")
    trace: list[float] = []
    with run.stage("build"):
        tree = build_tree(corpus, config, lexicon=lexicon, threads=args.threads,
                          root_sweep_callback=_trace_recorder(config, trace))
    with run.stage("link"):
        ontology = link_relations(tree, corpus)
    run.write_output(out_dir / "tree.json", serialize_tree(tree))
    run.write_output(out_dir / "ontology.json", export_ontology(ontology, "json"))
    run.write_output(out_dir / "ontology.ttl", export_ontology(ontology, "turtle"))
    with run.stage("perplexity"):
        summary = tree_perplexity(tree)
        _write_perplexity_outputs(run, trace, out_dir / "perplexity.csv")
    for level, value in summary["levels"].items():
        print(f"level {level}: perplexity={value:.6g}")
    if args.gold:
        with run.stage("compare"):
            report = compare_gold(ontology, load_gold_rules(args.gold))
        print(f"p={report.precision:.3f} r={report.recall:.3f} f={report.f_measure:.3f}")
        _write_prf_outputs(run, report, out_dir / "prf.csv")
    run.write_manifest(out_dir / "manifest.json")
    print(f"run complete -> {out_dir}")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="ontotree",
                     description="Extract terminological ontologies from annotated corpora.")
    parser.add_argument("--version", action="version", version=f"ontotree {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("extract-triplets", help="extract triplets from text")
    p.add_argument("--mode", choices=["structural", "pattern"], required=True)
    p.add_argument("--input", required=True, help="UTF-8 text input")
    p.add_argument("--out", required=True, help="output corpus JSONL")
    p.add_argument("--doc-id", help="document id (default: input stem)")
    p.add_argument("--spaces-per-indent", type=int, default=2)
    p.add_argument("--passive-inverse", action="store_true",
                   help="also emit passive inversions (pattern mode)")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("build", help="build the topic tree and ontology")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True, help="tree JSON output")
    p.add_argument("--ontology-out", help="ontology JSON output (default: <out>.ontology.json)")
    p.add_argument("--synonyms", help="synonym lexicon JSON")
    p.add_argument("--seed", action="append", help="pruning seed phrase (repeatable)")
    p.add_argument("--steps", type=int, help="pruning rounds (default: exhaustive)")
    p.add_argument("--prune-after", action="store_true",
                   help="filter the ontology after building instead of the corpus before")
    p.add_argument("--threads", type=int, default=_DEFAULT_THREADS,
                   help="sibling expansion workers (results are thread-count independent)")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("prune", help="restrict a corpus to a seed neighborhood")
    p.add_argument("--corpus", required=True)
    p.add_argument("--seed", action="append", required=True)
    p.add_argument("--steps", type=int)
    p.add_argument("--out", required=True, help="pruned corpus JSONL")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_prune)

    p = sub.add_parser("export", help="re-export an ontology")
    p.add_argument("--ontology", required=True, help="ontology JSON from build")
    p.add_argument("--format", choices=["json", "turtle"], default="json")
    p.add_argument("--out", required=True)
    _add_config_flags(p)
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("eval", help="evaluate an ontology or model fit")
    p.add_argument("--gold", help="gold rule JSON (with --ontology)")
    p.add_argument("--ontology", help="ontology JSON to score")
    p.add_argument("--perplexity", action="store_true",
                   help="report per-level perplexity (with --corpus)")
    p.add_argument("--corpus")
    p.add_argument("--out", help="report CSV path; a .png figure lands beside it")
    p.add_argument("--threads", type=int, default=_DEFAULT_THREADS,
                   help="sibling expansion workers (results are thread-count independent)")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("all", help="load, prune, build, export, evaluate")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--gold")
    p.add_argument("--synonyms")
    p.add_argument("--seed", action="append")
    p.add_argument("--steps", type=int)
    p.add_argument("--threads", type=int, default=_DEFAULT_THREADS,
                   help="sibling expansion workers (results are thread-count independent)")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_all)
    return parser


def run(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "func", None):
        parser.print_help()
        return 1
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError) as exc:
        message = str(exc) or exc.__class__.__name__
        print(f"ontotree {args.command}: error: {message}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(run())


if __name__ == "__main__":
    entrypoint()
