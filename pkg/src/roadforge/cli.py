"""Command line entry point: ``roadforge fit <input> ...``.

Exit status is 0 on success, 1 when the input cannot be parsed and 2 when a
polyline fails inside the pipeline.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import PROJECTIONS, PipelineConfig
from .core import RoadForgeError
from .curvature import METHODS
from .io import FORMATS, ParseError, export_model, ingest
from .pipeline import run_pipeline, summary
from .plotting import plot_stages

log = logging.getLogger("roadforge")

EXIT_OK, EXIT_PARSE, EXIT_PIPELINE = 0, 1, 2


def _numbered(path: Path | None, k: int, total: int) -> Path | None:
    if path is None or total == 1:
        return path
    return path.with_name(f"{path.stem}-{k}{path.suffix}")


def build_parser() -> argparse.ArgumentParser:
    d = PipelineConfig()
    parser = argparse.ArgumentParser(prog="roadforge", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit road primitives to every polyline in a file")
    fit.add_argument("input", type=Path)
    fit.add_argument("--format", choices=FORMATS, help="input format (default: from the file suffix)")
    fit.add_argument("--projection", choices=PROJECTIONS, default=d.projection,
                     help="project lon/lat input to local metres (implied by csv-lonlat)")
    fit.add_argument("--q", type=int, default=d.q, help="curvature window half-width in points")
    fit.add_argument("--method", choices=METHODS, default=d.method)
    fit.add_argument("--vote-w", type=int, default=d.vote_w, help="odd turn-voting window")
    fit.add_argument("--straight-delta", type=float, default=d.straight_delta,
                     help="curvature below which a point is straight (1/m)")
    fit.add_argument("--error-bound", type=float, default=d.error_bound, help="maximum deviation (m)")
    fit.add_argument("--half-width", type=float, default=d.half_width, help="road half width (m)")
    fit.add_argument("--sample-step", type=float, default=d.sample_step, help="edge sampling step (m)")
    fit.add_argument("--svg", type=Path, help="write a stage plot here")
    fit.add_argument("--out", type=Path, help="write the model JSON here")
    return parser


def cmd_fit(args) -> int:
    projection = "local-tangent-plane" if args.format == "csv-lonlat" else args.projection
    try:
        config = PipelineConfig(
            q=args.q,
            method=args.method,
            vote_w=args.vote_w,
            straight_delta=args.straight_delta,
            error_bound=args.error_bound,
            half_width=args.half_width,
            sample_step=args.sample_step,
            projection=projection,
        )
    except ValueError as exc:
        log.error("invalid configuration: %s", exc)
        return EXIT_PIPELINE

    try:
        polylines = ingest(args.input, args.format, projection)
    except ParseError as exc:
        log.error("%s", exc)
        return EXIT_PARSE

    status = EXIT_OK
    for k, poly in enumerate(polylines):
        try:
            model, artifacts = run_pipeline(poly, config)
            out = _numbered(args.out, k, len(polylines))
            if out is not None:
                export_model(model, out)
            svg = _numbered(args.svg, k, len(polylines))
            if svg is not None:
                plot_stages(poly, artifacts, model, svg, config.half_width, config.sample_step)
        except RoadForgeError as exc:
            log.error("%s", exc)
            status = EXIT_PIPELINE
            continue
        print(json.dumps(summary(model, poly)), flush=True)
    return status


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    return cmd_fit(args)


if __name__ == "__main__":
    sys.exit(main())
