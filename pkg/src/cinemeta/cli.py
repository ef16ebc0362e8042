"""Command line front end: ingest, export, eval, query.

Exit codes: 0 success, 1 configuration or IO problem, 2 evaluation error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import evaluate as ev
from . import fusion, pipeline
from .formats.sidecar import SidecarError, read_catalog
from .model import PredicateError, parse_predicate
from .profile import ProfileError, load_profile


def _cmd_ingest(args: argparse.Namespace) -> int:
    config = pipeline.load_config(args.config)
    summary = pipeline.run_ingest(config)
    print(f"catalog: {summary['catalog']}")
    print(f"export:  {summary['export']}")
    print(f"clips:   {len(summary['clips'])}")
    return 0


def _cmd_export(args: argparse.Namespace) -> int:
    profile = load_profile(Path(args.profile).read_text(encoding="utf-8"))
    records = read_catalog(args.catalog)
    pipeline.export_records(records, profile, args.out)
    print(f"wrote {args.out} ({len(records)} clips)")
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    pred = read_catalog(args.pred)
    truth = read_catalog(args.truth)
    report = ev.evaluate(pred, truth, include_objects=args.include_objects)
    sys.stdout.write(ev.format_report(report))
    json_path = args.json or str(Path(args.pred).with_suffix(".report.json"))
    Path(json_path).write_text(
        json.dumps(ev.report_to_dict(report), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    return 0


def _cmd_query(args: argparse.Namespace) -> int:
    predicate = parse_predicate(args.where)
    for clip_id in fusion.catalog_query(args.catalog, predicate):
        print(clip_id)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cinemeta",
        description="Dailies metadata: ingest clips, export ALE/CSV/JSON, "
        "query the catalog, score against truth.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="run the full pipeline over a clip set")
    p.add_argument("--config", required=True, help="run config JSON")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("export", help="re-export an existing catalog")
    p.add_argument("--catalog", required=True)
    p.add_argument("--profile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("eval", help="score a prediction catalog against truth")
    p.add_argument("--pred", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--json", help="where to write the JSON report")
    p.add_argument("--include-objects", action="store_true")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("query", help="list clip ids matching a predicate")
    p.add_argument("--catalog", required=True)
    p.add_argument("--where", default="", help='e.g. "CameraMove=pan,Time=Day"')
    p.set_defaults(func=_cmd_query)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ev.EvalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (
        pipeline.PipelineError,
        ProfileError,
        SidecarError,
        PredicateError,
        fusion.FusionError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
