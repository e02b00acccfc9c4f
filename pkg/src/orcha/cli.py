"""Command line interface: render charts, serve the authoring API."""

from __future__ import annotations

import argparse
import os
import sys
import tempfile

from .config import load_config
from .model import ChartError, ChartSpec, parse_labels, parse_links, parse_streams, validate
from .render import layout_spec, render_layout


def _read(path: str | None) -> str:
    if path is None:
        return ""
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def cmd_render(args) -> int:
    config = load_config(
        args.config,
        overrides={
            "width": args.width, "height": args.height,
            "step": args.step, "seed": args.seed,
        },
    )
    try:
        spec = ChartSpec(
            streams=parse_streams(_read(args.streams)),
            links=parse_links(_read(args.links)) if args.links else [],
            labels=parse_labels(_read(args.labels)) if args.labels else [],
        )
        violations = validate(spec, step=config.step)
        if violations:
            for v in violations:
                print(f"error: {v}", file=sys.stderr)
            return 1
        graph, state = layout_spec(spec, config)
        doc = render_layout(spec, graph, state, config)
    except ChartError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    # write atomically so a failed render never leaves a partial file
    out_dir = os.path.dirname(os.path.abspath(args.out)) or "."
    fd, tmp = tempfile.mkstemp(dir=out_dir, suffix=".svg.part")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(doc.data)
        os.replace(tmp, args.out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    print(
        f"nodes={len(graph.nodes)} edges={len(graph.edges)} ticks={state.tick_count}",
        file=sys.stderr,
    )
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    config = load_config(args.config)
    serve(port=args.port, data_dir=args.data, config=config, host=args.host)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="orcha", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_render = sub.add_parser("render", help="render CSV tables to a styled SVG")
    p_render.add_argument("--streams", required=True, help="streams CSV file")
    p_render.add_argument("--links", help="links CSV file")
    p_render.add_argument("--labels", help="labels CSV file")
    p_render.add_argument("--out", required=True, help="output SVG path")
    p_render.add_argument("--config", help="JSON config file")
    p_render.add_argument("--width", type=float, help="canvas width px")
    p_render.add_argument("--height", type=float, help="canvas height px")
    p_render.add_argument("--step", type=float, help="time discretization step")
    p_render.add_argument("--seed", type=int, help="layout/style seed")
    p_render.set_defaults(func=cmd_render)

    p_serve = sub.add_parser("serve", help="run the authoring HTTP service")
    p_serve.add_argument("--port", type=int, required=True)
    p_serve.add_argument("--data", required=True, help="directory with the chart CSV files")
    p_serve.add_argument("--config", help="JSON config file")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.set_defaults(func=cmd_serve)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
