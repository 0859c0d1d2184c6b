"""Command-line entry point: ``socialsem <subcommand> ...``.

Every subcommand prints one ``RESULT key=value ...`` line on success. Commands
that write an artifact also write ``<artifact>.meta``, a JSON record of the
version, seed and full configuration.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path


from . import __version__
from .corpus import GENDERS, load_conll_corpus, load_profiling_corpus, write_conll
from .crf import CrfParams, load_nested, save_nested, tag_sentences, train_nested
from .evaluation import (
    classification_f1,
    evaluate_level,
    format_folds,
    format_report_table,
    format_report_tsv,
    kfold_split,
)
from .linker import PROPER_NOUN_PREFIXES, format_links, link_sentences, load_kb
from .profiler import (
    ProfilerParams,
    load_model,
    ltlm_train,
    make_batches,
    predict_profiles,
    save_model,
    train_profiler,
)
from .profiler.pipeline import ltlm_features

log = logging.getLogger("socialsem")


class CliError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument types


def _ranged(kind, lo=None, hi=None, lo_open=False):
    def parse(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid {kind.__name__} value: {text!r}") from None
        if lo is not None and (v < lo or (lo_open and v == lo)):
            raise argparse.ArgumentTypeError(f"must be {'>' if lo_open else '>='} {lo}: {text}")
        if hi is not None and v > hi:
            raise argparse.ArgumentTypeError(f"must be <= {hi}: {text}")
        return v
    return parse


positive_int = _ranged(int, 1)
positive_float = _ranged(float, 0.0, lo_open=True)


def _fraction(text):
    v = _ranged(float, 0.0)(text)
    if v >= 0.5:
        raise argparse.ArgumentTypeError(f"must be < 0.5: {text}")
    return v


# ---------------------------------------------------------------------------
# helpers


def _result(**kv) -> None:
    def fmt(v):
        if isinstance(v, float):
            return f"{v:.6f}"
        return str(v)
    print("RESULT " + " ".join(f"{k}={fmt(v)}" for k, v in kv.items()))


def _write_meta(output: Path, args: argparse.Namespace, **extra) -> None:
    config = {k: (str(v) if isinstance(v, Path) else v)
              for k, v in sorted(vars(args).items()) if k not in ("func", "verbose")}
    meta = {"tool": "socialsem", "version": __version__, "subcommand": args.command,
            "seed": args.seed, "config": config}
    meta.update(extra)
    Path(str(output) + ".meta").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n",
                                           encoding="utf-8")


def _profiler_params(args) -> ProfilerParams:
    return ProfilerParams(
        n_trees=args.trees, max_depth=args.max_depth, min_leaf=args.min_leaf,
        drop_fraction=args.drop_fraction, do_elimination=not args.no_elimination,
        eig_tol=args.tol,
    )


def _crf_params(args) -> CrfParams:
    return CrfParams(sigma=args.sigma, gtol=args.gtol, max_iter=args.max_iter,
                     min_count=args.min_count)


# ---------------------------------------------------------------------------
# profiling


def cmd_profile_train(args) -> None:
    corpus = load_profiling_corpus(args.corpus, args.threads)
    t0 = time.perf_counter()
    model = train_profiler(corpus, _profiler_params(args), args.seed)
    save_model(model, args.model)
    _write_meta(args.model, args, n_documents=len(corpus))
    _result(documents=len(corpus), features=int(model.mask.sum()),
            seconds=round(time.perf_counter() - t0, 3), model=args.model)


def cmd_ltlm_train(args) -> None:
    corpus = load_profiling_corpus(args.corpus, args.threads)
    t0 = time.perf_counter()
    params = _profiler_params(args)
    model = ltlm_train(corpus, args.batches, params, args.seed, args.threads)
    save_model(model, args.model)
    _write_meta(args.model, args, n_documents=len(corpus))
    if args.features_out:
        plan = make_batches(corpus, args.batches, args.seed)
        F = ltlm_features(corpus, plan, params.eig_tol, args.threads)
        ids = [corpus.documents[i].doc_id for i in plan.order]
        from .wordspace import dump_matrix
        dump_matrix(F, args.features_out, ids)
        _write_meta(args.features_out, args, rows=F.shape[0], cols=F.shape[1])
    _result(documents=len(corpus), batches=args.batches, features=int(model.mask.sum()),
            seconds=round(time.perf_counter() - t0, 3), model=args.model)


def cmd_profile_predict(args) -> None:
    model = load_model(args.model)
    corpus = load_profiling_corpus(args.corpus, args.threads)
    preds = predict_profiles(model, corpus, args.batches, args.threads)
    lines = ["doc_id\tgender\tage_group"]
    lines += [f"{d.doc_id}\t{g}\t{a}" for d, (g, a) in zip(corpus.documents, preds)]
    Path(args.output).write_text("\n".join(lines) + "\n", encoding="utf-8")
    _write_meta(args.output, args)
    _result(documents=len(corpus), output=args.output)


def _profile_scores(gold_g, gold_a, preds, age_labels) -> dict:
    g = classification_f1(gold_g, [p[0] for p in preds], GENDERS)
    a = classification_f1(gold_a, [p[1] for p in preds], age_labels)
    return {"gender_f1": g["macro"], "gender_acc": g["accuracy"],
            "age_f1": a["macro"], "age_acc": a["accuracy"]}


def cmd_profile_eval(args) -> None:
    corpus = load_profiling_corpus(args.corpus, args.threads)
    if args.model:
        model = load_model(args.model)
        preds = predict_profiles(model, corpus, args.batches, args.threads)
        scores = _profile_scores(corpus.genders, corpus.age_groups, preds, corpus.age_labels)
        _result(documents=len(corpus), **scores)
        return
    # k-fold cross-validation; training uses batches the size of a test fold
    plan = kfold_split(len(corpus), args.folds, args.seed)
    params = _profiler_params(args)
    preds: list = [None] * len(corpus)
    for i in range(plan.k):
        train_idx, test_idx = plan.train_test(i)
        train = corpus.subset(train_idx)
        n_batches = args.batches or max(1, round(len(train_idx) / len(test_idx)))
        model = ltlm_train(train, n_batches, params, args.seed, args.threads)
        fold_pred = predict_profiles(model, corpus.subset(test_idx), 1, args.threads)
        for j, p in zip(test_idx, fold_pred):
            preds[j] = p
        log.info("fold %d/%d done", i + 1, plan.k)
    scores = _profile_scores(corpus.genders, corpus.age_groups, preds, corpus.age_labels)
    if args.output:
        lines = ["doc_id\tfold\tgender\tage_group\tpred_gender\tpred_age_group"]
        fold_of = {j: f for f, idx in enumerate(plan.folds) for j in idx}
        for j, d in enumerate(corpus.documents):
            lines.append(f"{d.doc_id}\t{fold_of[j]}\t{d.gender}\t{d.age_group}\t"
                         f"{preds[j][0]}\t{preds[j][1]}")
        Path(args.output).write_text("\n".join(lines) + "\n", encoding="utf-8")
        _write_meta(args.output, args, scores=scores)
    _result(documents=len(corpus), folds=plan.k, **scores)


# ---------------------------------------------------------------------------
# NER


def cmd_ner_train(args) -> None:
    sentences = load_conll_corpus(args.train)
    if not sentences:
        raise CliError(f"{args.train}: no sentences")
    t0 = time.perf_counter()
    model = train_nested(sentences, args.levels, _crf_params(args))
    save_nested(model, args.model)
    _write_meta(args.model, args, sentences=len(sentences))
    _result(sentences=len(sentences), levels=args.levels,
            features=sum(len(m.features) for m in model.levels),
            seconds=round(time.perf_counter() - t0, 3), model=args.model)


def cmd_ner_tag(args) -> None:
    model = load_nested(args.model)
    sentences = load_conll_corpus(args.input)
    tagged = tag_sentences(model, sentences, append=not args.replace)
    write_conll(tagged, args.output)
    _write_meta(args.output, args, sentences=len(sentences))
    _result(sentences=len(sentences), levels=model.n_levels, output=args.output)


def cmd_ner_eval(args) -> None:
    gold = load_conll_corpus(args.gold)
    pred = load_conll_corpus(args.pred)
    if len(gold) != len(pred):
        raise CliError(f"{len(gold)} gold sentences but {len(pred)} predicted")
    n_gold = min((len(t.tags) for s in gold for t in s.tokens), default=0)
    n_pred = min((len(t.tags) for s in pred for t in s.tokens), default=0)
    levels = args.levels or n_gold
    if not 1 <= levels <= min(n_gold, n_pred):
        raise CliError(f"cannot score {levels} levels: gold has {n_gold}, predictions have {n_pred}")
    # predictions are the last `levels` tag columns of the predicted file
    offset = n_pred - levels
    scores = []
    for k in range(levels):
        g = [s.level(k) for s in gold]
        p = [s.level(offset + k) for s in pred]
        scores.append(evaluate_level(g, p, k + 1))
    pooled = evaluate_level(
        [s.level(k) for k in range(levels) for s in gold],
        [s.level(offset + k) for k in range(levels) for s in pred], 0,
    )
    sys.stdout.write(format_report_table(scores))
    if args.report:
        Path(args.report).write_text(format_report_tsv(scores), encoding="utf-8")
        _write_meta(args.report, args)
    per_level = {f"f1_level{s.level}": s.f1 for s in scores}
    _result(precision=pooled.precision, recall=pooled.recall, f1=pooled.f1,
            approx_match=pooled.approximate_match, **per_level)


def cmd_link(args) -> None:
    kb = load_kb(args.kb)
    sentences = load_conll_corpus(args.input)
    n_cols = min((len(t.tags) for s in sentences for t in s.tokens), default=0)
    if not 1 <= args.level <= n_cols:
        raise CliError(f"tag level {args.level} not present (input has {n_cols} tag columns)")
    prefixes = tuple(p for p in args.proper_noun_prefixes.split(",") if p)
    rows = link_sentences(kb, sentences, args.level - 1, args.nil_on_zero, prefixes)
    Path(args.output).write_text(format_links(rows), encoding="utf-8")
    _write_meta(args.output, args)
    nil = sum(d.is_nil for _, d in rows)
    _result(entities=len(rows), linked=len(rows) - nil, nil=nil, output=args.output)


def cmd_kfold(args) -> None:
    if args.n is None:
        if args.corpus is None:
            raise CliError("give --n or --corpus")
        n = len(load_profiling_corpus(args.corpus, args.threads))
    else:
        n = args.n
    plan = kfold_split(n, args.k, args.seed)
    Path(args.output).write_text(format_folds(plan), encoding="utf-8")
    _write_meta(args.output, args)
    sizes = sorted({len(f) for f in plan.folds})
    _result(n=n, k=plan.k, min_size=sizes[0], max_size=sizes[-1], output=args.output)


# ---------------------------------------------------------------------------
# parser


def _profiler_options(p) -> None:
    p.add_argument("--trees", type=positive_int, default=100, help="trees per forest (default 100)")
    p.add_argument("--max-depth", type=positive_int, default=16)
    p.add_argument("--min-leaf", type=positive_int, default=2)
    p.add_argument("--drop-fraction", type=_fraction, default=0.05,
                   help="fraction of features removed per elimination pass (default 0.05)")
    p.add_argument("--no-elimination", action="store_true", help="skip KS feature elimination")
    p.add_argument("--tol", type=positive_float, default=1e-10, help="eigensolver tolerance")


def _crf_options(p) -> None:
    p.add_argument("--sigma", type=positive_float, default=1.0, help="L2 prior width (default 1.0)")
    p.add_argument("--gtol", type=positive_float, default=1e-4)
    p.add_argument("--max-iter", type=positive_int, default=200)
    p.add_argument("--min-count", type=positive_int, default=1, help="feature frequency cutoff")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="socialsem",
                                     description="Author profiling, nested NER and entity linking.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42, help="random seed (default 42)")
    common.add_argument("--threads", type=positive_int, default=1, help="worker threads (default 1)")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_, description=help_)
        p.set_defaults(func=func)
        return p

    p = add("profile-train", cmd_profile_train, "train a gender/age profiler on a whole corpus")
    p.add_argument("--corpus", type=Path, required=True, help="manifest TSV")
    p.add_argument("--model", type=Path, required=True, help="output model file")
    _profiler_options(p)

    p = add("ltlm-train", cmd_ltlm_train, "train a profiler from stratified batches")
    p.add_argument("--corpus", type=Path, required=True)
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--batches", type=positive_int, required=True, help="number of batches N")
    p.add_argument("--features-out", type=Path, help="also write the concatenated feature matrix")
    _profiler_options(p)

    p = add("profile-predict", cmd_profile_predict, "predict gender and age group per document")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--corpus", type=Path, required=True)
    p.add_argument("--output", type=Path, required=True, help="predictions TSV")
    p.add_argument("--batches", type=positive_int, help="prediction batches (default: match training)")

    p = add("profile-eval", cmd_profile_eval,
            "score a saved model on a labelled corpus, or run k-fold cross-validation")
    p.add_argument("--corpus", type=Path, required=True)
    p.add_argument("--model", type=Path, help="evaluate this model instead of cross-validating")
    p.add_argument("--folds", type=_ranged(int, 2), default=10)
    p.add_argument("--batches", type=positive_int,
                   help="training batches per fold (default: fold-sized batches)")
    p.add_argument("--output", type=Path, help="per-document predictions TSV")
    _profiler_options(p)

    p = add("ner-train", cmd_ner_train, "train a nested CRF tagger")
    p.add_argument("--train", type=Path, required=True, help="CoNLL training file")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--levels", type=_ranged(int, 1, 3), default=1)
    _crf_options(p)

    p = add("ner-tag", cmd_ner_tag, "tag a CoNLL file; predicted levels are appended as columns")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--output", type=Path, required=True)
    p.add_argument("--replace", action="store_true", help="replace existing tag columns")

    p = add("ner-eval", cmd_ner_eval, "score predicted tag columns against gold")
    p.add_argument("--gold", type=Path, required=True)
    p.add_argument("--pred", type=Path, required=True,
                   help="tagged file; its last LEVELS tag columns are scored")
    p.add_argument("--levels", type=_ranged(int, 1, 3), help="levels to score (default: all gold levels)")
    p.add_argument("--report", type=Path, help="write the per-level report as TSV")

    p = add("link", cmd_link, "link tagged entities to a knowledge base")
    p.add_argument("--kb", type=Path, required=True, help="TSV surface, link id, description")
    p.add_argument("--input", type=Path, required=True, help="tagged CoNLL file")
    p.add_argument("--output", type=Path, required=True)
    p.add_argument("--level", type=_ranged(int, 1, 3), default=1, help="tag column holding entities")
    p.add_argument("--nil-on-zero", action="store_true", help="emit NIL when every score is 0")
    p.add_argument("--proper-noun-prefixes", default=",".join(PROPER_NOUN_PREFIXES))

    p = add("kfold", cmd_kfold, "write a seeded k-fold assignment")
    p.add_argument("--n", type=positive_int, help="number of items")
    p.add_argument("--corpus", type=Path, help="take n from a manifest instead")
    p.add_argument("--k", type=_ranged(int, 2), default=10)
    p.add_argument("--output", type=Path, required=True)
    return parser


def run(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    if not argv:
        parser.print_usage(sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    log.info("seed=%d threads=%d", args.seed, args.threads)
    try:
        args.func(args)
    except Exception as exc:  # one-line diagnostic, no traceback
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"socialsem {args.command}: error: {msg}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
