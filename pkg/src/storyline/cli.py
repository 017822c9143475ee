"""Command-line driver: read a temporal network, write SVG / layout JSON / metrics."""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import datasets, ingest
from .estimator import ALIGN_WEIGHT_MODES, ORDERING_METHODS, StorylineLayout
from .exceptions import StageError, StorylineError
from .render import StyleConfig, assign_colors, export_layout_json, render_svg

FORMATS = ("events-json", "events-csv", "graphs-json", "dialogue", "rankings", "poll-csv")


@dataclass
class PipelineConfig:
    input: str | None = None
    format: str = "events-csv"
    fixture: str | None = None
    breaks: list[float] | None = None
    window_count: int | None = None
    continuation: bool = False
    discretize: bool = False
    cyclic: bool | None = None
    continuity_weight: float = 1.0
    epsilon: int = 2
    ordering: str | None = None
    order_file: str | None = None
    align_weight_mode: str | None = None
    align_weight_file: str | None = None
    x_policy: str = "auto"
    style: str | None = None
    out_svg: str | None = None
    out_json: str | None = None
    metrics: bool = False
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "PipelineConfig":
        return cls(**{k: v for k, v in vars(ns).items() if k in cls.__dataclass_fields__})


def _parse_breaks(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"breaks must be comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="storyline-layout",
        description="Lay out a temporal network as a storyline drawing.",
    )
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="input file ('-' for stdin)")
    src.add_argument("--fixture", choices=sorted(datasets.FIXTURES), help="use a bundled fixture instead of --input")
    p.add_argument("--format", choices=FORMATS, default="events-csv")

    win = p.add_mutually_exclusive_group()
    win.add_argument("--breaks", type=_parse_breaks, help="comma-separated window boundaries")
    win.add_argument("--window-count", type=int, help="number of equal-length windows")
    p.add_argument("--continue", dest="continuation", action="store_true",
                   help="keep each storyline alive between its first and last appearance")
    p.add_argument("--discretize", action="store_true", help="drop nodes without edges from each window")
    p.add_argument("--cyclic", action="store_true", default=None, help="treat the last window as adjacent to the first")
    p.add_argument("--continuity-weight", type=float, default=1.0)
    p.add_argument("--epsilon", type=int, default=2, help="closeness threshold for --format rankings")

    p.add_argument("--ordering", choices=ORDERING_METHODS)
    p.add_argument("--order-file", help='JSON {"orders": [[...], ...]} for --ordering given')
    p.add_argument("--align-weight-mode", choices=ALIGN_WEIGHT_MODES)
    p.add_argument("--align-weight-file", help='JSON {"weights": {...}, "default": w}')
    p.add_argument("--x-policy", choices=("auto", "midpoint", "event-time"), default="auto")

    p.add_argument("--style", help="style JSON overriding colours and sizes")
    p.add_argument("--out-svg")
    p.add_argument("--out-json")
    p.add_argument("--metrics", action="store_true", help="print layout metrics as JSON on stdout")
    return p


def _read_input(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    return Path(path).read_bytes()


def _load(cfg: PipelineConfig):
    """Return the input data and the format's suggested estimator options."""
    if cfg.fixture:
        return datasets.load_fixture(cfg.fixture)
    raw = _read_input(cfg.input)
    fmt = cfg.format
    if fmt == "events-csv":
        return ingest.parse_events(raw, "csv"), {}
    if fmt == "events-json":
        return ingest.parse_events(raw, "json"), {}
    if fmt == "graphs-json":
        return ingest.parse_graph_sequence(raw), {}
    if fmt == "dialogue":
        return ingest.dialogue_events(ingest.parse_dialogue(raw)), {}
    if fmt == "rankings":
        matrices, labels = ingest.parse_rankings(raw)
        return ingest.rankings_to_graphs(matrices, cfg.epsilon, labels), {}
    gs, orders = ingest.parse_poll_csv(raw)
    return gs, {"ordering": "given", "given_order": orders, "align_weight_mode": "rank-increase"}


def _read_json(path: str):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def run_pipeline(cfg: PipelineConfig, stdout=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    try:
        try:
            X, suggested = _load(cfg)
            params = dict(suggested)
            if cfg.ordering is not None:
                params["ordering"] = cfg.ordering
            if cfg.order_file:
                params["given_order"] = _read_json(cfg.order_file)
            if cfg.align_weight_mode is not None:
                params["align_weight_mode"] = cfg.align_weight_mode
            if cfg.align_weight_file:
                params["align_weights"] = _read_json(cfg.align_weight_file)
                params.setdefault("align_weight_mode", "file")
            style = StyleConfig.from_dict(_read_json(cfg.style)) if cfg.style else StyleConfig()
        except (OSError, ValueError, StorylineError) as exc:
            raise StageError("ingest", exc) from exc

        est = StorylineLayout(
            breaks=cfg.breaks,
            window_count=cfg.window_count,
            continuation=cfg.continuation,
            discretize=cfg.discretize,
            cyclic=cfg.cyclic,
            continuity_weight=cfg.continuity_weight,
            x_policy=cfg.x_policy,
            **params,
        ).fit(X)

        start = time.perf_counter()
        try:
            layout = est.layout_
            colors = assign_colors(layout, style)
            if cfg.out_svg:
                Path(cfg.out_svg).write_bytes(render_svg(layout, colors, style))
            if cfg.out_json:
                Path(cfg.out_json).write_bytes(export_layout_json(layout, colors))
        except (OSError, ValueError) as exc:
            raise StageError("render", exc) from exc
        est.metrics_.stage_millis["render"] = (time.perf_counter() - start) * 1000.0
    except StageError as exc:
        print(f"storyline-layout: error in {exc.stage} stage: {exc.cause}", file=sys.stderr)
        return 1

    if cfg.metrics:
        stdout.write(json.dumps(est.metrics_.to_dict(), sort_keys=False) + "\n")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return run_pipeline(PipelineConfig.from_args(args))


if __name__ == "__main__":
    sys.exit(main())
