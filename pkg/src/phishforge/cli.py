"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 runtime error. Every command that
takes --seed is bit-reproducible; when --seed is omitted a random one is
drawn and logged so the run can be reproduced after the fact.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
from pathlib import Path

from . import catalog, metrics
from .applicability import analyze_applicability
from .dom import parse_document
from .fetch import FetchError, FetchPolicy
from .pipeline import (
    ExplicitSelection,
    GenerationRecipe,
    RandomSelection,
    batch_generate,
    generate,
    load_input,
    write_bundle,
)
from .spoof import SpoofError, SpoofRuleSet, spoof_url_detailed

SCHEMA_VERSION = "1"
_ENV_OUTPUT_DIR = "PHISHFORGE_OUTPUT_DIR"


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse defaults to exit 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _emit(payload: dict, as_json: bool, human: str) -> None:
    if as_json:
        print(json.dumps({"schema_version": SCHEMA_VERSION, **payload}, sort_keys=True))
    else:
        print(human)


def _resolve_seed(args: argparse.Namespace) -> int:
    if args.seed is not None:
        return args.seed
    seed = random.SystemRandom().getrandbits(64)
    print(f"note: --seed not given; using {seed}", file=sys.stderr)
    return seed


def _policy(args: argparse.Namespace) -> FetchPolicy:
    return FetchPolicy(
        timeout_s=getattr(args, "timeout", 10.0),
        max_asset_bytes=getattr(args, "max_asset_bytes", 5_000_000),
        max_assets=getattr(args, "max_assets", 100),
    )


def _rules(args: argparse.Namespace) -> SpoofRuleSet:
    path = getattr(args, "rules", None)
    return SpoofRuleSet.from_file(path) if path else SpoofRuleSet.default()


def _recipe(args: argparse.Namespace, seed: int) -> GenerationRecipe:
    if getattr(args, "features", None):
        ids = tuple(f.strip().upper() for f in args.features.split(",") if f.strip())
        selection: object = ExplicitSelection(ids)
    else:
        selection = RandomSelection(
            getattr(args, "content", None), getattr(args, "visual", None)
        )
    params = json.loads(args.params) if getattr(args, "params", None) else {}
    return GenerationRecipe(
        selection=selection,
        seed=seed,
        params=params,
        spoof_rules=_rules(args),
        spoof_min_edits=getattr(args, "min_edits", 1),
    )


def _out_dir(args: argparse.Namespace) -> Path:
    if args.out:
        return Path(args.out)
    return Path(os.environ.get(_ENV_OUTPUT_DIR, "out"))


# -- commands -------------------------------------------------------------


def cmd_features(args: argparse.Namespace) -> int:
    rows = catalog.catalog_listing(args.category)
    if args.json:
        print(json.dumps({"schema_version": SCHEMA_VERSION, "features": rows}, sort_keys=True))
        return 0
    for row in rows:
        print(f"{row['id']:>4}  {row['category']:<8} {row['name']}")
        print(f"      {row['description']}")
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    snapshot = load_input(args.input, _policy(args), localize=False)
    report = analyze_applicability(parse_document(snapshot.markup))
    if args.json:
        print(json.dumps({"schema_version": SCHEMA_VERSION, **report.to_dict()}, sort_keys=True))
        return 0
    for row in report.to_dict()["features"]:
        flag = "yes" if row["applicable"] else "no"
        print(f"{row['id']:>4}  applicable={flag:<4} evidence={row['evidence_count']}")
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args)
    snapshot = load_input(args.input, _policy(args), localize=True)
    bundle = generate(snapshot, _recipe(args, seed))
    out = _out_dir(args) / f"{seed:016x}"
    entry = write_bundle(bundle, out)
    _emit(
        {
            "bundle_path": str(out),
            "spoofed_url": bundle.spoofed_url,
            "seed": seed,
            "features": entry["features"],
        },
        args.json,
        f"bundle: {out}\nspoofed url: {bundle.spoofed_url}\nfeatures: {','.join(entry['features'])}",
    )
    return 0


def cmd_batch(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args)
    inputs = [
        line.strip()
        for line in Path(args.list_file).read_text(encoding="utf-8").splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    ]
    manifest = batch_generate(inputs, _recipe(args, seed), _out_dir(args), _policy(args))
    manifest_path = _out_dir(args) / "manifest.json"
    _emit(
        {"manifest": str(manifest_path), "totals": manifest.totals},
        args.json,
        f"manifest: {manifest_path}\ntotals: {manifest.totals}",
    )
    return 0


def cmd_spoof(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args)
    url, result = spoof_url_detailed(
        args.url, _rules(args), random.Random(seed), args.min_edits, args.max_edits
    )
    edits = ", ".join(f"{e.kind}:{e.before or '(attach)'}->{e.after}" for e in result.edits)
    _emit(
        {"spoofed_url": url, "seed": seed, **result.to_dict()},
        args.json,
        f"{result.original_domain} -> {result.spoofed_domain}\nspoofed url: {url}\nedits: {edits}",
    )
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    counts = metrics.tally(metrics.read_verdicts(args.verdicts))
    report = metrics.score(counts)
    cells = report.to_dict()
    _emit(
        {
            "counts": {"tp": counts.tp, "fp": counts.fp, "tn": counts.tn, "fn": counts.fn},
            **cells,
        },
        args.json,
        "\n".join(
            [
                f"tp={counts.tp} fp={counts.fp} tn={counts.tn} fn={counts.fn}",
                *(f"{name}: {value}" for name, value in cells.items()),
            ]
        ),
    )
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from .service import ServiceConfig, run_service

    config = ServiceConfig(
        work_dir=Path(args.work_dir) if args.work_dir else None,
        ttl_s=args.ttl,
        policy=_policy(args),
        banner=not args.no_banner,
        dev_cors=args.dev_cors,
        ui_dir=Path(args.ui_dir) if args.ui_dir else None,
    )
    run_service(args.host, args.port, config, allow_nonlocal=args.allow_nonlocal)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="phishforge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common_generation(p: argparse.ArgumentParser) -> None:
        p.add_argument("--features", help="comma-separated feature ids, e.g. C1,C7,V1")
        p.add_argument("--random", action="store_true", help="random feature selection (default)")
        p.add_argument("--content", type=int, help="random mode: content feature count")
        p.add_argument("--visual", type=int, help="random mode: visual feature count")
        p.add_argument("--seed", type=int)
        p.add_argument("--params", help="per-feature parameter overrides as JSON")
        p.add_argument("--min-edits", dest="min_edits", type=int, default=1)
        p.add_argument("--rules", help="spoof rule file (kind<TAB>before<TAB>after)")
        p.add_argument("--timeout", type=float, default=10.0)
        p.add_argument("--out")
        p.add_argument("--json", action="store_true")

    p = sub.add_parser("features", help="list the feature catalog")
    p.add_argument("--category", choices=["content", "visual"])
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("analyze", help="report applicable features for a page")
    p.add_argument("input", help="URL or local HTML file")
    p.add_argument("--timeout", type=float, default=10.0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("generate", help="generate one bundle")
    p.add_argument("input", help="URL or local HTML file")
    common_generation(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("batch", help="generate a corpus from a list of inputs")
    p.add_argument("list_file", help="file with one URL or path per line")
    common_generation(p)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("spoof", help="print a lookalike URL with its edit list")
    p.add_argument("url")
    p.add_argument("--min-edits", dest="min_edits", type=int, default=1)
    p.add_argument("--max-edits", dest="max_edits", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--rules")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_spoof)

    p = sub.add_parser("score", help="score detector verdicts (id,actual,predicted)")
    p.add_argument("--verdicts", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("serve", help="run the interactive service (loopback by default)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8440)
    p.add_argument("--work-dir", dest="work_dir")
    p.add_argument("--ui-dir", dest="ui_dir")
    p.add_argument("--ttl", type=int, default=3600)
    p.add_argument("--timeout", type=float, default=10.0)
    p.add_argument("--no-banner", dest="no_banner", action="store_true")
    p.add_argument("--dev-cors", dest="dev_cors", action="store_true")
    p.add_argument("--allow-nonlocal", dest="allow_nonlocal", action="store_true")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (FetchError, SpoofError, metrics.VerdictError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # anything else is still a runtime failure
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
