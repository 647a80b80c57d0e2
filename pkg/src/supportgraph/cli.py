"""Command-line front end.

Subcommands: align, infer, graph, eval, serve.  Exit codes: 0 ok,
2 bad input files, 3 bad configuration, 4 solver failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import graph_eval, pipeline, sceneio, solver
from .config import EngineConfig, load_config
from .model import SchemaError

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONFIG = 3
EXIT_SOLVER = 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


def _load_config(args) -> EngineConfig:
    try:
        return load_config(args.config)
    except (ValueError, OSError) as exc:
        raise CliError(EXIT_CONFIG, f"config: {exc}") from exc


def _load_scene(path: str):
    try:
        return sceneio.load_scene(path)
    except SchemaError as exc:
        raise CliError(EXIT_INPUT, f"scene: {exc}") from exc


def _load_priors(path: str):
    try:
        return sceneio.load_priors(path)
    except SchemaError as exc:
        raise CliError(EXIT_CONFIG, f"priors: {exc}") from exc


def _write_or_print(doc: dict, out: str | None):
    text = json.dumps(doc, indent=1)
    if out:
        Path(out).write_text(text)
    else:
        print(text)


def cmd_align(args) -> int:
    config = _load_config(args)
    bundle = _load_scene(args.scene)
    detections, regions, alignment = pipeline.prepare_regions(bundle, config)
    doc = {
        "scene_id": bundle.scene_id,
        "triad": alignment.triad.tolist(),
        "score": alignment.score,
        "fallback": alignment.fallback,
        "objects": [
            {"detection_id": r.detection_id, "bounds": list(r.bounds), "pixels": int(r.n_pixels)}
            for r in regions
        ],
        "config": config.to_dict(),
    }
    _write_or_print(doc, args.out)
    return EXIT_OK


def solution_to_doc(result: pipeline.InferenceResult, config: EngineConfig) -> dict:
    names = result.problem.class_names
    return {
        "scene_id": result.bundle.scene_id,
        "scene_type": result.scene_type,
        "energy": result.solution.energy,
        "breakdown": {
            "support": result.solution.breakdown.support,
            "classification": result.solution.breakdown.classification,
            "class_pair": result.solution.breakdown.class_pair,
            "distance": result.solution.breakdown.distance,
            "structural": result.solution.breakdown.structural,
        },
        "saturated": result.solution.saturated,
        "warnings": list(result.solution.warnings),
        "assignments": [
            {
                "detection_id": a.detection_id,
                "class": names[a.class_index],
                "supporter": (
                    "ground-self"
                    if a.supporter == -2
                    else "hidden"
                    if a.supporter == -1
                    else result.problem.detection_ids[a.supporter]
                ),
                "support_type": (None if a.support_type is None else ("below", "behind")[a.support_type]),
            }
            for a in result.solution.assignments
        ],
        "solver": {"nodes": result.stats.nodes, "root_bound": result.stats.root_bound},
        "config": config.to_dict(),
    }


def cmd_infer(args) -> int:
    config = _load_config(args)
    bundle = _load_scene(args.scene)
    priors = _load_priors(args.priors)
    try:
        result = pipeline.run_inference(bundle, priors, config, check_with_oracle=args.oracle)
    except AssertionError as exc:
        raise CliError(EXIT_SOLVER, f"solver: {exc}") from exc
    except ValueError as exc:
        raise CliError(EXIT_INPUT, f"pipeline: {exc}") from exc
    if args.dump_lp:
        model = solver.build_ip(result.problem, config.energy)
        solver.dump_lp(model, args.dump_lp)
    doc = solution_to_doc(result, config)
    if args.oracle:
        doc["oracle"] = "objective match"
        print("oracle: objective match", file=sys.stderr)
    _write_or_print(doc, args.out)
    return EXIT_OK


def cmd_graph(args) -> int:
    config = _load_config(args)
    bundle = _load_scene(args.scene)
    priors = _load_priors(args.priors)
    try:
        result = pipeline.run_inference(bundle, priors, config)
    except ValueError as exc:
        raise CliError(EXIT_INPUT, f"pipeline: {exc}") from exc
    graph = pipeline.result_to_graph(result, config)
    out = Path(args.out) if args.out else Path(f"{bundle.scene_id}.graph.json")
    sceneio.save_graph(graph, out, "json")
    sceneio.save_graph(graph, out.with_suffix(".dot"), "dot")
    print(f"wrote {out} and {out.with_suffix('.dot')}", file=sys.stderr)
    return EXIT_OK


def cmd_eval(args) -> int:
    if len(args.hypothesis) != len(args.ground_truth):
        raise CliError(EXIT_INPUT, "eval: need matching hypothesis/ground-truth lists")
    pairs = []
    for hyp_path, gt_path in zip(args.hypothesis, args.ground_truth):
        try:
            pairs.append((sceneio.load_graph(hyp_path), sceneio.load_graph(gt_path)))
        except SchemaError as exc:
            raise CliError(EXIT_INPUT, f"graph: {exc}") from exc
    try:
        report = graph_eval.batch_report(pairs)
    except ValueError as exc:
        raise CliError(EXIT_INPUT, f"eval: {exc}") from exc
    print(report.format_table())
    if args.out:
        Path(args.out).write_text(json.dumps(report.to_dict(), indent=1))
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .serve import create_app

    config = _load_config(args)
    app = create_app(
        scenes_dir=Path(args.scenes),
        graphs_dir=Path(args.graphs),
        priors_path=Path(args.priors),
        config=config,
        frontend_dir=Path(args.frontend) if args.frontend else None,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="supportgraph",
        description="Support-relation inference and semantic scene graphs for RGBD indoor scenes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("align", help="room-coordinate alignment report for a scene")
    p.add_argument("scene")
    p.add_argument("--config")
    p.add_argument("--out")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("infer", help="run support inference on a scene")
    p.add_argument("scene")
    p.add_argument("--priors", required=True)
    p.add_argument("--config")
    p.add_argument("--out")
    p.add_argument("--oracle", action="store_true", help="cross-check against exhaustive search")
    p.add_argument("--dump-lp", help="write the relaxation in LP text format")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("graph", help="infer and write the scene graph (JSON + DOT)")
    p.add_argument("scene")
    p.add_argument("--priors", required=True)
    p.add_argument("--config")
    p.add_argument("--out")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("eval", help="compare hypothesis graphs against ground truth")
    p.add_argument("--hypothesis", nargs="+", required=True)
    p.add_argument("--ground-truth", nargs="+", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", help="local annotation/inspection service")
    p.add_argument("--scenes", required=True)
    p.add_argument("--graphs", required=True)
    p.add_argument("--priors", required=True)
    p.add_argument("--config")
    p.add_argument("--frontend", help="directory of built frontend assets to serve")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
