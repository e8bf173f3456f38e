"""Command-line interface: generalize | metrics | sweep | serve.

Exit codes: 0 success, 2 input/parse error, 3 layout failure. Every run is
reproducible from its arguments, config file and input file alone.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from chartgen.config import EngineConfig, config_from_dict
from chartgen.layout import DEFAULT_TEXT_MODEL, layout_elements
from chartgen.metrics import (
    CONFLICT_PARTNER_LAYERS,
    area_ratio,
    build_density_grid,
    evaluate_constraints,
    grid_dims,
    total_collision_area,
)
from chartgen.model import ChartSpec, ChartSpecError, LayoutError, assign_importance

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_LAYOUT = 3

CONFIG_ENV_VAR = "CHARTGEN_CONFIG"


def _fail(code: int, message: str) -> int:
    print(f"chartgen: {message}", file=sys.stderr)
    return code


def _load_spec(path: str) -> ChartSpec:
    from chartgen.model import parse_chart_spec

    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ChartSpecError("", f"cannot read {path}: {exc.strerror or exc}") from exc
    return parse_chart_spec(text)


def _load_config(path: str | None, seed: int | None) -> EngineConfig:
    config_path = path or os.environ.get(CONFIG_ENV_VAR)
    config = EngineConfig()
    if config_path:
        try:
            data = json.loads(Path(config_path).read_text(encoding="utf-8"))
            config = config_from_dict(data)
        except (OSError, json.JSONDecodeError, ValueError, TypeError) as exc:
            raise ChartSpecError("", f"bad config {config_path}: {exc}") from exc
    if seed is not None:
        config = config_from_dict({"seed": seed}, base=config)
    return config


def _check_size(width: int, height: int) -> None:
    if width < 2 or height < 2:
        raise LayoutError(f"target {width}x{height} is too small to lay out (minimum 2x2)")


def cmd_generalize(args: argparse.Namespace) -> int:
    from chartgen.pipeline import generalize
    from chartgen.svg import render

    try:
        spec = _load_spec(args.input)
        config = _load_config(args.config, args.seed)
        _check_size(args.width, args.height)
        chart = generalize(spec, (float(args.width), float(args.height)), config)
    except ChartSpecError as exc:
        return _fail(EXIT_PARSE, str(exc))
    except LayoutError as exc:
        return _fail(EXIT_LAYOUT, str(exc))
    out_path = Path(args.out) if args.out else Path(args.input).with_suffix("").with_name(
        f"{Path(args.input).stem}_{args.width}x{args.height}.svg"
    )
    out_path.write_text(render(chart), encoding="utf-8")
    out_path.with_suffix(".json").write_text(chart.to_json() + "\n", encoding="utf-8")
    print(f"wrote {out_path} and {out_path.with_suffix('.json')}")
    return EXIT_OK


def cmd_metrics(args: argparse.Namespace) -> int:
    try:
        spec = _load_spec(args.input)
        config = _load_config(args.config, None)
        _check_size(args.width, args.height)
    except ChartSpecError as exc:
        return _fail(EXIT_PARSE, str(exc))
    except LayoutError as exc:
        return _fail(EXIT_LAYOUT, str(exc))
    target = (float(args.width), float(args.height))
    elements = layout_elements(assign_importance(spec), target, DEFAULT_TEXT_MODEL)
    visible = [e for e in elements if e.visible]
    grid = build_density_grid(visible, target, grid_dims(target, config.cell_size_px))
    report = evaluate_constraints(elements, grid, target, config)
    per_layer: dict[str, dict[str, float]] = {}
    for e in visible:
        bucket = per_layer.setdefault(e.layer.value, {"count": 0, "areaRatio": 0.0})
        bucket["count"] += 1
        bucket["areaRatio"] += area_ratio(e, target)
    # Collision is measured over the legibility-relevant layers; framing
    # elements overlap the plot area by construction and are not clutter.
    clutter = [e for e in visible if e.layer in CONFLICT_PARTNER_LAYERS]
    payload = {
        "target": {"width": target[0], "height": target[1]},
        "densityGrid": {
            "dims": list(grid.dims),
            "cellSize": list(grid.cell_size),
            "maxCellDensity": grid.max_density,
            "meanCellDensity": grid.mean_density,
        },
        "collisionArea": total_collision_area(
            clutter, capacity=config.quadtree_capacity, max_depth=config.quadtree_max_depth
        ),
        "areaRatios": per_layer,
        "report": report.to_dict(),
    }
    print(json.dumps(payload, sort_keys=True))
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    from chartgen.pipeline import size_sweep
    from chartgen.svg import render

    try:
        spec = _load_spec(args.input)
        config = _load_config(args.config, args.seed)
        targets = []
        for token in args.sizes.split(","):
            w, _, h = token.strip().partition("x")
            width, height = int(w), int(h)
            _check_size(width, height)
            targets.append((float(width), float(height)))
    except ChartSpecError as exc:
        return _fail(EXIT_PARSE, str(exc))
    except (LayoutError, ValueError) as exc:
        return _fail(EXIT_LAYOUT, str(exc))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.input).stem
    for item in size_sweep(spec, targets, config):
        w, h = int(item.target[0]), int(item.target[1])
        if item.chart is None:
            print(f"{w}x{h}: ERROR {item.error}", file=sys.stderr)
            continue
        svg_path = out_dir / f"{stem}_{w}x{h}.svg"
        svg_path.write_text(render(item.chart), encoding="utf-8")
        svg_path.with_suffix(".json").write_text(item.chart.to_json() + "\n", encoding="utf-8")
        visible = len(item.chart.visible_elements())
        print(f"{w}x{h}: satisfied={item.chart.report.satisfied} visible={visible} -> {svg_path}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    from chartgen.server import run_server

    try:
        config = _load_config(args.config, None)
    except ChartSpecError as exc:
        return _fail(EXIT_PARSE, str(exc))
    run_server(args.host, args.port, config)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chartgen", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generalize", help="generalize a chart document to one target size")
    p.add_argument("input", help="chart document (JSON)")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--config", help=f"engine config JSON (or ${CONFIG_ENV_VAR})")
    p.add_argument("--out", help="output SVG path (JSON written alongside)")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.set_defaults(func=cmd_generalize)

    p = sub.add_parser("metrics", help="print spatial metrics without running operators")
    p.add_argument("input")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--config")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("sweep", help="generalize to several sizes in one run")
    p.add_argument("input")
    p.add_argument("--sizes", required=True, help="comma-separated WxH list, e.g. 750x1334,324x394")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("serve", help="HTTP service exposing POST /generalize")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8040)
    p.add_argument("--config")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
