"""Command-line front door: batch explain and the protocol server.

Exit codes: 0 success, 2 usage error, 3 provider failure. The mock
provider is the default so everything works offline; --provider remote
opts into a live endpoint.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .layout import GridMetrics
from .model import ExplanationStatus, ProviderConfig, ProviderKind, make_suggestion
from .pipeline import collect
from .providers import ProviderUnavailable, provider_for
from .render import annotated_text, explanation_document
from .server import serve_stdio, serve_websocket
from .session import content_hash

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PROVIDER = 3


def _add_provider_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--provider", choices=["mock", "remote"], default="mock")
    parser.add_argument("--model", default="gpt-3.5-turbo-instruct")
    parser.add_argument("--temperature", type=float, default=0.5)
    parser.add_argument("--max-tokens", type=int, default=1000)
    parser.add_argument("--endpoint-url", default="")
    parser.add_argument(
        "--api-key-env",
        default="CODEGLOSS_API_KEY",
        help="name of the environment variable holding the API key",
    )
    parser.add_argument(
        "--no-stream",
        action="store_true",
        help="disable streamed block responses",
    )


def _add_grid_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--viewport-cols", type=int, default=120)
    parser.add_argument("--label-max-width", type=int, default=40)
    parser.add_argument("--label-padding", type=int, default=1)
    parser.add_argument("--margin-gap", type=int, default=2)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="codegloss",
        description="Anchored explanations for just-generated code.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    explain = sub.add_parser("explain", help="explain a file or stdin")
    explain.add_argument("input", help="path to a source file, or - for stdin")
    explain.add_argument(
        "--granularity", choices=["expressions", "blocks", "both"], default="both"
    )
    explain.add_argument(
        "--output", choices=["json", "annotated-text"], default="json"
    )
    _add_provider_flags(explain)
    _add_grid_flags(explain)

    serve = sub.add_parser("serve", help="run the interactive protocol server")
    mode = serve.add_mutually_exclusive_group(required=True)
    mode.add_argument("--stdio", action="store_true", help="serve one session on stdio")
    mode.add_argument("--listen", metavar="HOST:PORT", help="serve websocket sessions")
    _add_provider_flags(serve)
    _add_grid_flags(serve)

    return parser


def _provider_config(args: argparse.Namespace) -> ProviderConfig:
    return ProviderConfig(
        provider_kind=ProviderKind.MOCK if args.provider == "mock" else ProviderKind.REMOTE,
        model_id=args.model,
        temperature=args.temperature,
        max_tokens=args.max_tokens,
        stream=not args.no_stream,
        endpoint_url=args.endpoint_url,
        api_key_env_var=args.api_key_env,
    )


def _grid_metrics(args: argparse.Namespace) -> GridMetrics:
    return GridMetrics(
        viewport_cols=args.viewport_cols,
        label_max_width_cols=args.label_max_width,
        label_padding_cols=args.label_padding,
        margin_gap_cols=args.margin_gap,
    )


def _read_input(path: str) -> str | None:
    if path == "-":
        return sys.stdin.read()
    p = Path(path)
    if not p.is_file():
        return None
    return p.read_text(encoding="utf-8")


def _run_explain(args: argparse.Namespace) -> int:
    content = _read_input(args.input)
    if content is None:
        print(f"codegloss: cannot read input file: {args.input}", file=sys.stderr)
        return EXIT_USAGE
    lines = content.splitlines()
    if not lines:
        print(f"codegloss: input is empty: {args.input}", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = _provider_config(args)
        metrics = _grid_metrics(args)
    except ValueError as exc:
        print(f"codegloss: {exc}", file=sys.stderr)
        return EXIT_USAGE
    digest = content_hash(lines)
    suggestion = make_suggestion(
        suggestion_id=f"cli:{digest[:12]}",
        doc_id=args.input,
        doc_content_hash=digest,
        anchor_line=0,
        lines=lines,
    )
    try:
        provider = provider_for(cfg)
        es = collect(suggestion, cfg, provider, args.granularity)
    except ProviderUnavailable as exc:
        print(f"codegloss: provider unavailable: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    if es.status is ExplanationStatus.FAILED:
        reasons = "; ".join(reason for _, reason in es.failures) or "no results"
        print(f"codegloss: provider failed: {reasons}", file=sys.stderr)
        return EXIT_PROVIDER
    if args.output == "json":
        document = explanation_document(suggestion, es, metrics)
        print(json.dumps(document, sort_keys=True, indent=2))
    else:
        sys.stdout.write(annotated_text(suggestion, es, metrics, args.granularity))
    return EXIT_OK


def _run_serve(args: argparse.Namespace) -> int:
    try:
        cfg = _provider_config(args)
        metrics = _grid_metrics(args)
    except ValueError as exc:
        print(f"codegloss: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.stdio:
        serve_stdio(provider_config=cfg, metrics=metrics)
        return EXIT_OK
    host, _, port_text = args.listen.rpartition(":")
    if not host or not port_text.isdigit():
        print(f"codegloss: --listen expects HOST:PORT, got {args.listen!r}", file=sys.stderr)
        return EXIT_USAGE
    serve_websocket(host, int(port_text), provider_config=cfg, metrics=metrics)
    return EXIT_OK


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    if args.subcommand == "explain":
        return _run_explain(args)
    return _run_serve(args)


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
