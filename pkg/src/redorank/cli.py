"""Command line entry point: ``redorank <subcommand> ...``.

Exit codes: 0 success, 2 config or usage error, 3 external service error,
4 data error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .adarank import TrainConfig, load_model, rerank, save_model, train
from .config import AppConfig, load_config
from .dataset import FixtureClient, HttpClient, RanksetSpec, ResponseMapping, build_rankset, read_dataset
from .dataset import read_features, write_dataset, write_features
from .errors import ConfigError, DataError, ParseError, RedorankError
from .evaluation import (
    EvalConfig,
    ablation_csv,
    evaluate_model,
    evaluate_scores,
    metrics_csv,
    per_query_csv,
    run_ablation,
    summarize,
)
from .metrics import Measure
from .model import FEATURE_SCHEMA, FeatureTable
from .objectionability import ForestParams, TermLists, load_forest, save_forest, train_forest
from .objectionability.features import features_from_terms, read_training_csv
from .pipeline import FeaturePipeline
from .scorers import ConstantStub, LookupTable, ReadabilityConfig, RemoteService
from .textproc import (
    LemmaRules,
    SpellDictionary,
    TextConfig,
    data_path,
    default_dictionary,
    default_text_config,
    load_stopwords,
)

logger = logging.getLogger("redorank")


# ---------------------------------------------------------------- builders


def build_text_config(cfg: AppConfig) -> TextConfig:
    p = cfg.paths
    if not any((p.stopwords, p.dictionary, p.lemma_rules, p.lemma_exceptions)):
        return default_text_config()
    dictionary = SpellDictionary.from_file(p.dictionary) if p.dictionary else default_dictionary()
    rules = LemmaRules.from_files(
        p.lemma_rules or data_path("lemma_rules.tsv"),
        p.lemma_exceptions or data_path("lemma_exceptions.tsv"),
        dictionary,
    )
    return TextConfig(load_stopwords(p.stopwords), rules, dictionary)


def build_term_lists(cfg: AppConfig, text: TextConfig) -> TermLists:
    directory = cfg.paths.term_lists or data_path("termlists")
    return TermLists.from_dir(directory).lemmatized(text.lemma_rules)


def build_readability(cfg: AppConfig, text: TextConfig) -> ReadabilityConfig:
    vocab = cfg.paths.familiar_vocab or data_path("familiar_words.txt")
    return ReadabilityConfig.from_file(vocab, lemma_rules=text.lemma_rules)


def build_edu_scorer(cfg: AppConfig):
    e = cfg.edu
    if e.kind == "lookup":
        return LookupTable.from_csv(e.lookup_file, default=e.default)
    if e.kind == "remote":
        return RemoteService(e.endpoint, e.timeout, e.retries, e.backoff, e.max_in_flight)
    return ConstantStub(e.value)


def build_search_client(cfg: AppConfig):
    s = cfg.search
    if s is None:
        raise ConfigError("config has no [search] section")
    if s.kind == "fixture":
        return FixtureClient(s.fixture_dir, s.max_results)
    return HttpClient(
        endpoint=s.endpoint,
        api_key_env=s.api_key_env,
        key_param=s.key_param,
        query_param=s.query_param,
        count_param=s.count_param,
        extra_params=dict(s.extra_params),
        mapping=ResponseMapping(**s.mapping.model_dump()),
        max_results=s.max_results,
        rate=s.rate,
        retries=s.retries,
        backoff=s.backoff,
        timeout=s.timeout,
    )


def parse_features(raw: str | None, default: Sequence[str] | None = None) -> tuple[str, ...] | None:
    if raw is None:
        return tuple(default) if default is not None else None
    names = tuple(f.strip() for f in raw.split(",") if f.strip())
    if not names:
        raise ConfigError("--features needs at least one feature name")
    return names


def resolve_measure(base: str, measure: str | None, k: int | None) -> str:
    """Combine a configured measure id with optional --measure / --k overrides."""
    name, _, cut = (measure or base).partition("@")
    if measure is not None and not cut:
        cut = base.partition("@")[2] or "10"
    if k is not None:
        cut = str(k)
    mid = f"{name}@{cut}" if cut else name
    try:
        Measure.parse(mid)
    except ValueError as exc:
        raise ConfigError(f"bad measure {mid!r}: {exc}") from exc
    return mid


def _write(path: str | Path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def _eval_config(cfg: AppConfig, k: int | None = None) -> EvalConfig:
    return EvalConfig(k or cfg.metrics.k, cfg.metrics.gain, cfg.metrics.relevant_label)


def _known_bad(dataset: str | None) -> set[tuple[str, str]] | None:
    if dataset is None:
        return None
    return {(j.query_id, r.doc_id) for j in read_dataset(dataset) for r in j.resources if r.is_known_bad}


# ---------------------------------------------------------------- commands


def cmd_build_dataset(args, cfg: AppConfig) -> int:
    if cfg.rankset is None:
        raise ConfigError("config has no [rankset] section")
    seed = args.seed if args.seed is not None else cfg.rankset.seed
    spec = RanksetSpec(cfg.rankset.ideal_corpus, cfg.rankset.bad_pool, cfg.search.max_results if cfg.search else 20, seed)
    client = build_search_client(cfg)
    dropped: list[tuple[str, str]] = []
    lists = build_rankset(spec, client, dropped, n_jobs=cfg.search.n_jobs)
    write_dataset(lists, args.out)
    for qid, reason in dropped:
        print(f"dropped {qid}: {reason}", file=sys.stderr)
    print(f"queries: {len(lists)}, dropped: {len(dropped)}")
    return 0


def cmd_extract_features(args, cfg: AppConfig) -> int:
    features = parse_features(args.features, FEATURE_SCHEMA)
    judge = args.judge_model or cfg.paths.judge_model
    if "s_bad" in features and judge is None:
        raise ConfigError("s_bad requested but no judge model given (--judge-model or paths.judge_model)")
    text = build_text_config(cfg)
    pipeline = FeaturePipeline(
        text=text,
        term_lists=build_term_lists(cfg, text),
        readability=build_readability(cfg, text),
        edu=build_edu_scorer(cfg),
        forest=load_forest(judge) if judge is not None else None,
        features=features,
        force_bad_cost=args.force_bad_cost,
    )
    lists = read_dataset(args.dataset)
    rows = [row for judged in lists for row in pipeline.rows(judged)]
    write_features(rows, args.out, features)
    print(f"queries: {len(lists)}, rows: {len(rows)}")
    return 0


def _snippet_training_data(path: str, cfg: AppConfig):
    text = build_text_config(cfg)
    lists = build_term_lists(cfg, text)
    X, y = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if not {"snippet", "class"} <= set(reader.fieldnames or []):
            raise ParseError(f"{path}: needs 'snippet' and 'class' columns", 1)
        for lineno, rec in enumerate(reader, 2):
            cls = rec["class"].strip().lower()
            if cls not in ("bad", "ok", "1", "0"):
                raise ParseError(f"{path}: unknown class {rec['class']!r}", lineno)
            X.append(features_from_terms(text.normalize(rec["snippet"]), lists, text.dictionary).as_vector())
            y.append(1 if cls in ("bad", "1") else 0)
    return X, y


def cmd_train_judge(args, cfg: AppConfig) -> int:
    j = cfg.judge
    if args.snippets:
        X, y = _snippet_training_data(args.data, cfg)
    else:
        try:
            X, y = read_training_csv(args.data)
        except FileNotFoundError as exc:
            raise ConfigError(f"file not found: {args.data}") from exc
    params = ForestParams(
        n_trees=args.n_trees or j.n_trees,
        max_depth=j.max_depth,
        max_leaf_nodes=j.max_leaf_nodes,
        min_samples_leaf=j.min_samples_leaf,
        min_samples_split=j.min_samples_split,
    )
    seed = args.seed if args.seed is not None else j.seed
    forest = train_forest(X, y, params, seed=seed, n_jobs=j.n_jobs)
    save_forest(forest, args.out)
    acc = float((forest.predict(X) == y).mean()) if len(y) else float("nan")
    print(f"rows: {len(y)}, trees: {len(forest.trees)}, train accuracy: {acc:.4f}")
    return 0


def _train_config(args, cfg: AppConfig, schema: Sequence[str]) -> TrainConfig:
    t = cfg.train
    mask = parse_features(args.features, t.features)
    try:
        return TrainConfig(
            max_rounds=args.max_rounds or t.max_rounds,
            tolerance=t.tolerance,
            measure=resolve_measure(t.measure, args.measure, args.k),
            feature_mask=mask,
            gain_mapping=cfg.metrics.gain,
            seed=args.seed if args.seed is not None else t.seed,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_train_ranker(args, cfg: AppConfig) -> int:
    table = read_features(args.feature_file)
    config = _train_config(args, cfg, table.schema)
    model = train(list(table.by_query().values()), config, table.schema)
    save_model(model, args.out)
    last = model.training_log[-1].train_measure if model.training_log else float("nan")
    print(f"rounds: {len(model.terms)}, train {model.measure_id}: {last:.6f}, stop: {model.stop_reason}")
    return 0


def cmd_rerank(args, cfg: AppConfig) -> int:
    model = load_model(args.model)
    table = read_features(args.feature_file)
    by_query = table.by_query()
    out = []
    for judged in read_dataset(args.dataset):
        rows = {r.doc_id: r for r in by_query.get(judged.query_id, [])}
        out.append(rerank(model, judged, rows))
    write_dataset(out, args.out)
    print(f"queries: {len(out)}")
    return 0


def read_run(path: str | Path) -> dict[tuple[str, str], float]:
    """External run file: one ``query_id doc_id score`` triple per line."""
    scores = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except FileNotFoundError as exc:
        raise ConfigError(f"file not found: {path}") from exc
    for lineno, line in enumerate(lines, 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError("expected 'query_id doc_id score'", lineno)
        try:
            scores[(parts[0], parts[1])] = float(parts[2])
        except ValueError as exc:
            raise ParseError(f"bad score {parts[2]!r}", lineno) from exc
    return scores


def cmd_eval(args, cfg: AppConfig) -> int:
    table: FeatureTable = read_features(args.feature_file)
    queries = table.by_query()
    ecfg = _eval_config(cfg, args.k)
    bad = _known_bad(args.dataset)
    kw = {} if bad is None else {"is_bad": lambda r: (r.query_id, r.doc_id) in bad}
    if args.model:
        results = evaluate_model(load_model(args.model), queries, ecfg, **kw)
    else:
        run = read_run(args.run)

        def scorer(rows):
            try:
                return [run[(r.query_id, r.doc_id)] for r in rows]
            except KeyError as exc:
                raise DataError(f"run file has no score for {exc.args[0]}") from exc

        results = evaluate_scores(queries, scorer, ecfg, **kw)
    _write(args.out, metrics_csv(summarize(results)))
    if args.per_query:
        _write(args.per_query, per_query_csv(results))
    print(f"queries: {len(results)}")
    return 0


def cmd_ablate(args, cfg: AppConfig) -> int:
    table = read_features(args.feature_file)
    t = cfg.train
    base = TrainConfig(max_rounds=args.max_rounds or t.max_rounds, tolerance=t.tolerance, gain_mapping=cfg.metrics.gain)
    seed = args.seed if args.seed is not None else cfg.ablate.seed
    ratio = args.train_ratio if args.train_ratio is not None else cfg.ablate.train_ratio
    outcomes = run_ablation(
        table.by_query(), table.schema, ratio, seed, base, _eval_config(cfg), train_k=args.k or 10
    )
    _write(args.out, ablation_csv(outcomes))
    if args.per_query:
        parts = [per_query_csv(o.results, o.variant.algorithm) for o in outcomes]
        # one header, then every variant's rows
        _write(args.per_query, parts[0] + "".join(p.split("\n", 1)[1] for p in parts[1:]))
    print(f"variants: {len(outcomes)}, test queries: {len(outcomes[0].results)}")
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="redorank", description="Classroom-oriented search result re-ranking.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging (-vv for debug)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="TOML config file")
        p.add_argument("--out", required=True, help="output path")
        p.set_defaults(func=func)
        return p

    p = add("build-dataset", cmd_build_dataset, "build judged lists from an ideal corpus and a search client")
    p.add_argument("--seed", type=int)

    p = add("extract-features", cmd_extract_features, "score every resource of a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--features", help="comma-separated subset of " + ",".join(FEATURE_SCHEMA))
    p.add_argument("--judge-model", help="objectionability forest (overrides paths.judge_model)")
    p.add_argument("--force-bad-cost", action="store_true", help="cost 1.0 for known-bad resources")

    p = add("train-judge", cmd_train_judge, "train the objectionability forest")
    p.add_argument("--data", required=True, help="CSV of 16 feature columns plus 'class'")
    p.add_argument("--snippets", action="store_true", help="--data holds 'snippet,class' rows instead")
    p.add_argument("--seed", type=int)
    p.add_argument("--n-trees", type=int)

    p = add("train-ranker", cmd_train_ranker, "train a boosted ranker on a feature file")
    p.add_argument("--feature-file", required=True)
    p.add_argument("--measure", help="ndcg or ncs_dcg, optionally with @k")
    p.add_argument("--k", type=int)
    p.add_argument("--features")
    p.add_argument("--seed", type=int)
    p.add_argument("--max-rounds", type=int)

    p = add("rerank", cmd_rerank, "reorder a dataset with a trained ranker")
    p.add_argument("--model", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--feature-file", required=True)

    p = add("eval", cmd_eval, "evaluate a ranker or an external run file")
    p.add_argument("--feature-file", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--model")
    src.add_argument("--run", help="'query_id doc_id score' lines")
    p.add_argument("--dataset", help="take known-bad flags from this dataset instead of label 0")
    p.add_argument("--per-query", help="also write per-query values here")
    p.add_argument("--k", type=int)

    p = add("ablate", cmd_ablate, "train and compare the ablation variants")
    p.add_argument("--feature-file", required=True)
    p.add_argument("--per-query")
    p.add_argument("--seed", type=int)
    p.add_argument("--train-ratio", type=float)
    p.add_argument("--k", type=int, help="cutoff of the training measure")
    p.add_argument("--max-rounds", type=int)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=(logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)],
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except RedorankError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ConfigError.exit_code


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
