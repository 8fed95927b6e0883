"""Command-line interface: build indexes, suggest rows/columns, evaluate, serve.

    tablepop index build --corpus corpus.ndjson --kb kb.ndjson \
        [--redirects redirects.tsv] [--exclude exclude.txt] --out index_dir
    tablepop suggest rows --index index_dir --kb kb.ndjson --seed seed.json
    tablepop suggest columns --index index_dir --seed seed.json
    tablepop evaluate --task rows --index index_dir --kb kb.ndjson \
        --split split.json [--config config.json] --out report.json
    tablepop serve --index index_dir --kb kb.ndjson --bind 127.0.0.1:8080

Seed files hold a single JSON object: ``{"caption": str, "entities": [str],
"labels": [str]}``.  Suggestion output is TSV with one line per suggestion
and a column per component score.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

from . import evaluation
from .columns import ColumnCandidateConfig, ColumnRankingConfig, rank_columns
from .index import build_index, load_index, save_index, sha256_file
from .kb import load_kb, load_redirects
from .ranking import suggestions_to_tsv
from .rows import RowCandidateConfig, RowRankingConfig, rank_rows
from .service import ROW_COMPONENT_ALIASES, open_kb_path
from .tables import SeedTable, parse_corpus

logger = logging.getLogger(__name__)

_ROW_COMPONENT_COLUMNS = ("entity_similarity", "label_likelihood", "caption_likelihood")
_COLUMN_COMPONENT_COLUMNS = ("coverage", "caption", "label_overlap", "n_tables")


def _read_seed(path: str) -> SeedTable:
    with open(path, encoding="utf-8") as fh:
        return SeedTable.from_dict(json.load(fh))


def _read_exclusions(path: str | None) -> frozenset[str]:
    if path is None:
        return frozenset()
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return frozenset(line.strip() for line in lines if line.strip())


def _cmd_index_build(args: argparse.Namespace) -> int:
    redirects = None
    if args.redirects:
        with open(args.redirects, "rb") as fh:
            redirects = load_redirects(fh)
    with open(args.kb, "rb") as fh:
        kb = load_kb(fh)
    exclude = _read_exclusions(args.exclude)
    n_errors = 0

    def count_error(err) -> None:
        nonlocal n_errors
        n_errors += 1
        logger.warning("corpus line %d: %s", err.line, err.message)

    with open(args.corpus, "rb") as fh:
        tables = list(
            parse_corpus(fh, redirects=redirects, known_entities=kb, on_error=count_error)
        )
    index = build_index(tables, kb, exclude=exclude, k1=args.k1, b=args.b)
    manifest = save_index(
        index,
        args.out,
        corpus_sha256=sha256_file(args.corpus),
        kb_sha256=sha256_file(args.kb),
        exclude_sha256=sha256_file(args.exclude) if args.exclude else None,
    )
    print(
        f"indexed {manifest['n_tables']} tables "
        f"({manifest['n_excluded']} excluded, {n_errors} malformed records) -> {args.out}"
    )
    return 0


def _parse_components(raw: str | None, aliases: dict[str, str] | None = None) -> frozenset[str] | None:
    if raw is None:
        return None
    names = [n.strip() for n in raw.split(",") if n.strip()]
    if aliases is not None:
        return frozenset(aliases[n] for n in names)
    return frozenset(names)


def _cmd_suggest_rows(args: argparse.Namespace) -> int:
    index = load_index(args.index)
    kb = open_kb_path(args.kb)
    seed = _read_seed(args.seed)
    overrides: dict = {}
    components = _parse_components(args.components, ROW_COMPONENT_ALIASES)
    if components is not None:
        overrides["components"] = components
    for name in ("lambda_e", "lambda_l", "lambda_c"):
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    if args.kb_similarity is not None:
        overrides["kb_similarity"] = args.kb_similarity
    rank_cfg = RowRankingConfig(**overrides)
    suggestions = rank_rows(seed, RowCandidateConfig(), rank_cfg, index=index, kb=kb)
    sys.stdout.write(suggestions_to_tsv(suggestions[: args.top], _ROW_COMPONENT_COLUMNS))
    return 0


def _cmd_suggest_columns(args: argparse.Namespace) -> int:
    index = load_index(args.index)
    seed = _read_seed(args.seed)
    overrides: dict = {"baseline": args.baseline}
    components = _parse_components(args.components)
    if components is not None:
        overrides["components"] = components
    rank_cfg = ColumnRankingConfig(**overrides)
    suggestions = rank_columns(seed, ColumnCandidateConfig(), rank_cfg, index=index)
    columns = ("label_benefit",) if args.baseline else _COLUMN_COMPONENT_COLUMNS
    sys.stdout.write(suggestions_to_tsv(suggestions[: args.top], columns))
    return 0


def _configs_from_file(task: str, path: str | None):
    obj = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    cand_obj = dict(obj.get("candidates", {}))
    rank_obj = dict(obj.get("ranking", {}))
    for section in (cand_obj, rank_obj):
        for key in ("methods", "components"):
            if key in section:
                section[key] = frozenset(section[key])
    if task == "rows":
        return RowCandidateConfig(**cand_obj), RowRankingConfig(**rank_obj), obj
    return ColumnCandidateConfig(**cand_obj), ColumnRankingConfig(**rank_obj), obj


def _parse_sweep(raw: str) -> tuple[str, list[float]]:
    name, _, spec = raw.partition("=")
    field = {"lambda-e": "lambda_e", "lambda-l": "lambda_l", "lambda-c": "lambda_c"}.get(name)
    if field is None:
        raise ValueError(f"unknown sweep parameter {name!r}")
    try:
        start_s, stop_s, step_s = spec.split(":")
        start, stop, step = float(start_s), float(stop_s), float(step_s)
    except ValueError as exc:
        raise ValueError(f"sweep spec must be start:stop:step, got {spec!r}") from exc
    if step <= 0:
        raise ValueError("sweep step must be > 0")
    values = []
    i = 0
    while (value := round(start + i * step, 10)) <= stop + 1e-9:
        values.append(min(value, stop))
        i += 1
    return field, values


def _cmd_evaluate(args: argparse.Namespace) -> int:
    index = load_index(args.index)
    kb = open_kb_path(args.kb) if args.kb else None
    with open(args.split, encoding="utf-8") as fh:
        split = evaluation.EvaluationSplit.from_dict(json.load(fh))
    if split.task != args.task:
        raise SystemExit(f"split is for task {split.task!r}, not {args.task!r}")
    cand_cfg, rank_cfg, config_obj = _configs_from_file(args.task, args.config)
    depth = int(config_obj.get("depth", evaluation.DEFAULT_DEPTH))
    subset = config_obj.get("subset", "test")
    seed_sizes = config_obj.get("seed_sizes")

    def run(cfg) -> dict:
        return evaluation.run_evaluation(
            tables=index.tables,
            split=split,
            index=index,
            cand_cfg=cand_cfg,
            rank_cfg=cfg,
            kb=kb,
            depth=depth,
            seed_sizes=seed_sizes,
            subset=subset,
        )

    if args.sweep:
        field, values = _parse_sweep(args.sweep)
        reports = {
            repr(value): run(dataclasses.replace(rank_cfg, **{field: value}))
            for value in values
        }
        payload = {"sweep": {"parameter": field, "values": values}, "reports": reports}
    else:
        payload = run(rank_cfg)

    rendered = evaluation.report_to_json(payload)
    if args.out:
        Path(args.out).write_text(rendered, encoding="utf-8")
    else:
        sys.stdout.write(rendered)
    if not args.sweep:
        for size, block in sorted(payload["seed_sizes"].items(), key=lambda kv: int(kv[0])):
            print(
                f"seed_size={size} MAP={block['map']} MRR={block['mrr']} "
                f"recall={block['mean_recall']} evaluated={block['evaluated']}",
                file=sys.stderr,
            )
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    if not args.index or not args.kb:
        raise SystemExit("serve requires --index and --kb (or TABLEPOP_INDEX/TABLEPOP_KB)")
    host, _, port_s = args.bind.rpartition(":")
    if not host or not port_s.isdigit():
        raise SystemExit(f"--bind must be host:port, got {args.bind!r}")
    cors = tuple(o.strip() for o in args.cors.split(",") if o.strip()) if args.cors else ()
    app = create_app(
        args.index, args.kb, top_k_cap=args.top_k_cap, cors_origins=cors
    )
    uvicorn.run(app, host=host, port=int(port_s), log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tablepop")
    sub = parser.add_subparsers(dest="command", required=True)

    p_index = sub.add_parser("index", help="index management")
    index_sub = p_index.add_subparsers(dest="index_command", required=True)
    p_build = index_sub.add_parser("build", help="build and persist an index")
    p_build.add_argument("--corpus", required=True)
    p_build.add_argument("--kb", required=True)
    p_build.add_argument("--redirects")
    p_build.add_argument("--exclude")
    p_build.add_argument("--out", required=True)
    p_build.add_argument("--k1", type=float, default=1.2)
    p_build.add_argument("--b", type=float, default=0.75)
    p_build.set_defaults(func=_cmd_index_build)

    p_suggest = sub.add_parser("suggest", help="rank suggestions for a seed table")
    suggest_sub = p_suggest.add_subparsers(dest="suggest_command", required=True)
    p_rows = suggest_sub.add_parser("rows", help="suggest entities for new rows")
    p_rows.add_argument("--index", required=True)
    p_rows.add_argument("--kb", required=True)
    p_rows.add_argument("--seed", required=True)
    p_rows.add_argument("--components", help="comma list: esim,label,caption")
    p_rows.add_argument("--lambda-e", dest="lambda_e", type=float)
    p_rows.add_argument("--lambda-l", dest="lambda_l", type=float)
    p_rows.add_argument("--lambda-c", dest="lambda_c", type=float)
    p_rows.add_argument("--kb-similarity", choices=("relations", "wlm", "jaccard"))
    p_rows.add_argument("--top", type=int, default=100)
    p_rows.set_defaults(func=_cmd_suggest_rows)

    p_cols = suggest_sub.add_parser("columns", help="suggest new column headings")
    p_cols.add_argument("--index", required=True)
    p_cols.add_argument("--seed", required=True)
    p_cols.add_argument("--components", help="comma list: caption,labels,entities")
    p_cols.add_argument("--baseline", choices=("acsdb",))
    p_cols.add_argument("--top", type=int, default=100)
    p_cols.set_defaults(func=_cmd_suggest_columns)

    p_eval = sub.add_parser("evaluate", help="run the simulation protocol")
    p_eval.add_argument("--task", choices=("rows", "columns"), required=True)
    p_eval.add_argument("--index", required=True)
    p_eval.add_argument("--kb")
    p_eval.add_argument("--split", required=True)
    p_eval.add_argument("--config")
    p_eval.add_argument("--out")
    p_eval.add_argument("--sweep", help="e.g. lambda-e=0:1:0.1")
    p_eval.set_defaults(func=_cmd_evaluate)

    p_serve = sub.add_parser("serve", help="run the HTTP suggestion service")
    p_serve.add_argument("--index", default=os.environ.get("TABLEPOP_INDEX"))
    p_serve.add_argument("--kb", default=os.environ.get("TABLEPOP_KB"))
    p_serve.add_argument("--bind", default=os.environ.get("TABLEPOP_BIND", "127.0.0.1:8080"))
    p_serve.add_argument(
        "--top-k-cap", type=int, default=int(os.environ.get("TABLEPOP_TOPK_CAP", "500"))
    )
    p_serve.add_argument("--cors", default=os.environ.get("TABLEPOP_CORS", ""))
    p_serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
