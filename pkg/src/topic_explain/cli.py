"""Command-line entry point: ``topic-explain {attribute,lda-train,explain,compare}``.

Every flag can also come from a YAML ``--config`` file. Top-level keys apply
to any subcommand with a matching option; a section named after the
subcommand overrides them. Flags given on the command line win over both.

Exit codes: 0 success, 1 validation error, 2 I/O error, 3 internal error.
Set ``TOPIC_EXPLAIN_LOG_LEVEL`` (e.g. ``INFO``, ``DEBUG``) for more logging.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from ._io import atomic_write_text
from .aggregate import AggregationPath, GlobalTopicExplanation, WeightingScheme, explain
from .attribution import dumps_attributions, load_attributions
from .compare import compare
from .errors import InvariantViolation, TopicExplainError, ValidationError
from .report import FORMATS, render_report
from .shapley import ToyModel, exact_shapley, sampled_shapley
from .text_core import build_vocabulary, count_documents
from .topics import (
    compute_stopwords,
    dumps_topic_matrix,
    lda_membership,
    lda_train,
    lexicon_membership,
    load_lexicon,
    load_topic_matrix,
    read_corpus,
)
from .topics import lda as lda_defaults

logger = logging.getLogger("topic_explain")

EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_INTERNAL = 0, 1, 2, 3
LOG_ENV = "TOPIC_EXPLAIN_LOG_LEVEL"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _add_lda_options(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("LDA training")
    g.add_argument("--topics", type=int, default=lda_defaults.DEFAULT_TOPICS, help="number of topics (default: %(default)s)")
    g.add_argument("--alpha", type=float, default=lda_defaults.DEFAULT_ALPHA, help="document-topic Dirichlet concentration (default: %(default)s)")
    g.add_argument(
        "--alpha-mode", choices=lda_defaults.ALPHA_MODES, default="total",
        help="'total': each topic gets alpha/T (MALLET convention); 'per-topic': each topic gets alpha (default: %(default)s)",
    )
    g.add_argument("--beta", type=float, default=lda_defaults.DEFAULT_BETA, help="topic-word Dirichlet prior (default: %(default)s)")
    g.add_argument("--iterations", type=int, default=lda_defaults.DEFAULT_ITERATIONS, help="Gibbs sweeps (default: %(default)s)")
    g.add_argument("--seed", type=int, default=0, help="random seed (default: %(default)s)")
    g.add_argument(
        "--stopwords-k", type=int, default=lda_defaults.DEFAULT_STOPWORDS_K,
        help="drop the k most frequent corpus words before training; 0 disables (default: %(default)s)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="topic-explain", description="Topic-level global explanations and model comparison.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", type=Path, help="YAML file supplying defaults for any flag")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("attribute", help="Shapley attributions for sentences under a toy model")
    p.add_argument("--model", type=Path, help="toy model JSON: weights, bias, interactions")
    p.add_argument("--sentences", type=Path, help="one sentence per line, whitespace tokenized")
    p.add_argument("--mode", choices=("exact", "sampled"), default="exact", help="(default: %(default)s)")
    p.add_argument("--samples", type=int, default=2000, help="permutations per sentence in sampled mode (default: %(default)s)")
    p.add_argument("--seed", type=int, default=0, help="random seed for sampled mode (default: %(default)s)")
    p.add_argument("--class-label", help="explained class; defaults to the model file's class_label")
    p.add_argument("--out", type=Path, help="output JSONL path ('-' for stdout)")
    p.set_defaults(func=cmd_attribute, required=("model", "sentences", "out"))

    p = sub.add_parser("lda-train", help="train an LDA topic model by collapsed Gibbs sampling")
    p.add_argument("--corpus", type=Path, help="one document per line, whitespace-separated words")
    _add_lda_options(p)
    p.add_argument("--out", type=Path, help="topic matrix CSV (topic_id,word,p_word_given_topic)")
    p.add_argument("--top-words", type=Path, help="top-words listing path (default: <out>.top_words.txt)")
    p.add_argument("--top-n", type=int, default=20, help="words per topic in the listing (default: %(default)s)")
    p.set_defaults(func=cmd_lda, required=("corpus", "out"))

    p = sub.add_parser("explain", help="aggregate attributions into a global topic explanation")
    p.add_argument("--attributions", type=Path, help="attribution JSONL file")
    src = p.add_argument_group("membership source (exactly one)")
    src.add_argument("--lexicon", type=Path, help="LIWC-style .dic lexicon")
    src.add_argument("--topic-matrix", type=Path, help="topic matrix CSV, e.g. from lda-train")
    src.add_argument("--corpus", type=Path, help="train LDA on this corpus first (uses the LDA options)")
    _add_lda_options(p)
    p.add_argument("--scheme", choices=("inverse-frequency", "sum"), default="inverse-frequency",
                   help="word weighting C(w): 1/count(w) or 1 (default: %(default)s)")
    p.add_argument("--path", choices=("global-word", "local-additive"), default="global-word",
                   help="aggregation route (default: %(default)s)")
    p.add_argument("--class-label", help="keep only records for this explained class")
    p.add_argument("--model-id", help="model name recorded in the output (default: attributions file stem)")
    p.add_argument("--dataset-id", default="", help="dataset name recorded in the output")
    p.add_argument("--lenient", action="store_true", default=False, help="skip malformed attribution lines instead of failing")
    p.add_argument("--out", type=Path, help="explanation JSON path ('-' for stdout)")
    p.set_defaults(func=cmd_explain, required=("attributions", "out"))

    p = sub.add_parser("compare", help="compare two explanations and write reports")
    p.add_argument("--a", type=Path, help="explanation JSON for model A")
    p.add_argument("--b", type=Path, help="explanation JSON for model B")
    p.add_argument("--k", type=int, default=3, help="rows per ranked table (default: %(default)s)")
    p.add_argument("--formats", default="json,csv,text,svg", help="comma-separated subset of json,csv,text,svg (default: %(default)s)")
    p.add_argument("--lexicon", type=Path, help="lexicon used for the explanations (enables SVG word clouds)")
    p.add_argument("--topic-matrix", type=Path, help="topic matrix used for the explanations (enables SVG word clouds)")
    p.add_argument("--exclude-other", action="store_true", default=False, help="leave the OTHER bucket out of rankings")
    p.add_argument("--out", type=Path, help="output directory")
    p.set_defaults(func=cmd_compare, required=("a", "b", "out"))
    return parser


def _load_config(path: Path | None, command: str) -> tuple[dict, dict]:
    """Return (top-level keys, keys from the ``command`` section)."""
    if path is None:
        return {}, {}
    with open(path, encoding="utf-8") as fh:
        doc = yaml.safe_load(fh) or {}
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: config must be a key-value mapping")
    commands = {"attribute", "lda-train", "explain", "compare"}
    flat = {k: v for k, v in doc.items() if k not in commands}
    section = doc.get(command) or {}
    if not isinstance(section, dict):
        raise ValidationError(f"{path}: section {command!r} must be a mapping")

    def dests(d):
        return {str(k).replace("-", "_"): v for k, v in d.items()}

    return dests(flat), dests(section)


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    flat, section = _load_config(args.config, args.command)
    if flat or section:
        sub = parser._subparsers._group_actions[0].choices[args.command]
        actions = {a.dest: a for a in sub._actions if a.dest not in ("help", "func", "required")}
        unknown = sorted(set(section) - set(actions))
        if unknown:
            raise ValidationError(f"{args.config}: unknown keys in section {args.command!r}: {unknown}")
        merged = {k: v for k, v in flat.items() if k in actions}
        merged.update(section)
        for dest, value in merged.items():
            action = actions[dest]
            if action.type is not None and value is not None and not isinstance(value, bool):
                value = action.type(value)
            if action.choices is not None and value not in action.choices:
                raise ValidationError(f"{args.config}: {dest}={value!r} not in {list(action.choices)}")
            sub.set_defaults(**{dest: value})
        args = parser.parse_args(argv)
    missing = [f"--{d.replace('_', '-')}" for d in args.required if getattr(args, d, None) is None]
    if missing:
        raise ValidationError(f"{args.command}: missing required option(s): {', '.join(missing)}")
    return args


def _write_output(path: Path, text: str) -> None:
    if str(path) == "-":
        sys.stdout.write(text)
    else:
        atomic_write_text(path, text)
        logger.info("wrote %s", path)


def cmd_attribute(args) -> None:
    model = ToyModel.load(args.model)
    label = args.class_label or model.class_label
    instances = []
    with open(args.sentences, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            tokens = line.split()
            if not tokens:
                continue
            iid = f"s{lineno:04d}"
            if args.mode == "exact":
                inst = exact_shapley(model, tokens, label, instance_id=iid)
            else:
                child = int(np.random.SeedSequence([args.seed, lineno]).generate_state(1)[0])
                inst = sampled_shapley(model, tokens, args.samples, child, label, instance_id=iid)
            instances.append(inst)
    if not instances:
        raise ValidationError(f"{args.sentences}: no sentences")
    _write_output(args.out, dumps_attributions(instances))


def _train_from_args(args, corpus_path: Path):
    with open(corpus_path, encoding="utf-8") as fh:
        docs = read_corpus(fh)
    stop = frozenset()
    if args.stopwords_k > 0:
        stop = compute_stopwords(count_documents(docs), args.stopwords_k)
    return lda_train(
        docs, args.topics, args.alpha, args.beta, args.iterations, args.seed, stop, args.alpha_mode
    )


def _top_words_listing(model, n: int) -> str:
    lines = []
    for t, label in enumerate(model.labels):
        words = " ".join(w for w, _ in model.top_words(t, n))
        lines.append(f"{label}\t{words}")
    return "\n".join(lines) + "\n"


def cmd_lda(args) -> None:
    model = _train_from_args(args, args.corpus)
    _write_output(args.out, dumps_topic_matrix(model))
    listing = args.top_words or args.out.with_name(args.out.name + ".top_words.txt")
    _write_output(listing, _top_words_listing(model, args.top_n))


def cmd_explain(args) -> None:
    sources = [s for s in ("lexicon", "topic_matrix", "corpus") if getattr(args, s) is not None]
    if len(sources) != 1:
        raise ValidationError("explain needs exactly one of --lexicon, --topic-matrix, --corpus")
    instances = load_attributions(args.attributions, lenient=args.lenient)
    labels = sorted({i.class_label for i in instances})
    if args.class_label is not None:
        instances = [i for i in instances if i.class_label == args.class_label]
        if not instances:
            raise ValidationError(f"no attribution records for class {args.class_label!r} (have {labels})")
        class_label = args.class_label
    elif len(labels) == 1:
        class_label = labels[0]
    else:
        raise ValidationError(f"attributions cover several classes {labels}; pick one with --class-label")

    config = {
        "attributions": str(args.attributions),
        "scheme": args.scheme,
        "path": args.path,
        "class_label": class_label,
        "lenient": args.lenient,
    }
    if args.lexicon is not None:
        vocab, _ = build_vocabulary(instances)
        membership = lexicon_membership(load_lexicon(args.lexicon), vocab)
        config["lexicon"] = str(args.lexicon)
    elif args.topic_matrix is not None:
        membership = lda_membership(load_topic_matrix(args.topic_matrix))
        config["topic_matrix"] = str(args.topic_matrix)
    else:
        membership = lda_membership(_train_from_args(args, args.corpus))
        config["corpus"] = str(args.corpus)
        for key in ("topics", "alpha", "alpha_mode", "beta", "iterations", "seed", "stopwords_k"):
            config[key] = getattr(args, key)

    scheme = WeightingScheme.INVERSE_FREQUENCY if args.scheme == "inverse-frequency" else WeightingScheme.SUM
    path = AggregationPath.GLOBAL_WORD if args.path == "global-word" else AggregationPath.LOCAL_ADDITIVE
    result = explain(
        instances, membership, path, scheme,
        model_id=args.model_id or args.attributions.stem,
        dataset_id=args.dataset_id,
        class_label=class_label,
        config=config,
    )
    _write_output(args.out, result.dumps())


def cmd_compare(args) -> None:
    formats = [f.strip() for f in args.formats.split(",") if f.strip()]
    bad = set(formats) - set(FORMATS)
    if bad:
        raise ValidationError(f"unknown formats {sorted(bad)}; choose from {list(FORMATS)}")
    if args.lexicon is not None and args.topic_matrix is not None:
        raise ValidationError("give at most one of --lexicon, --topic-matrix")
    a = GlobalTopicExplanation.loads(Path(args.a).read_text(encoding="utf-8"))
    b = GlobalTopicExplanation.loads(Path(args.b).read_text(encoding="utf-8"))
    report = compare(a, b, k=args.k, exclude_other=args.exclude_other)
    model = None
    if args.lexicon is not None:
        model = load_lexicon(args.lexicon)
    elif args.topic_matrix is not None:
        model = load_topic_matrix(args.topic_matrix)
    for path in render_report(report, args.out, formats, model):
        logger.info("wrote %s", path)


def main(argv=None) -> int:
    level = os.environ.get(LOG_ENV, "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    try:
        args = parse_args(argv)
        args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_VALIDATION
    except InvariantViolation as exc:
        logger.error("internal invariant violated: %s", exc)
        return EXIT_INTERNAL
    except (ValidationError, yaml.YAMLError) as exc:
        logger.error("%s", exc)
        return EXIT_VALIDATION
    except OSError as exc:
        logger.error("%s", exc)
        return EXIT_IO
    except TopicExplainError as exc:
        logger.error("%s", exc)
        return EXIT_VALIDATION
    except Exception:
        logger.exception("unexpected internal error")
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
