"""Command-line entry points.

Subcommands: plan (battery spec -> trial plan), simulate (plan + performer
params -> session log), fit (log -> law coefficients), report (logs ->
device comparison), chart (descriptors -> taxonomy chart), serve (gateway
for a live UI). Outputs default into $CTRLBENCH_DATA_DIR when --out is
omitted. All pipelines are reproducible: the same inputs and seeds produce
byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import serde
from .battery import AcquisitionTask, TrialPlan, plan_from_spec
from .errors import ParseError, WorkbenchError
from .gateway import Gateway
from .laws import Observation, fit_linear_law, fit_meyer
from .session import (
    FORMAT_VERSION,
    SessionRecord,
    comparison_report,
    export_log,
    import_log,
    session_from_records,
)
from .simulate import SimConfig, simulate_plan
from .taxonomy import DeviceDescriptor, build_chart, load_device

DATA_DIR_ENV = "CTRLBENCH_DATA_DIR"


def _data_dir() -> Path:
    return Path(os.environ.get(DATA_DIR_ENV, "."))


def _out_path(arg: str | None, default_name: str) -> Path:
    path = Path(arg) if arg else _data_dir() / default_name
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def save_plan(plan: TrialPlan, path: Path) -> None:
    line = serde.dumps({"v": FORMAT_VERSION, "type": "plan", "payload": serde.plan_to_jsonable(plan)})
    path.write_text(line + "\n", encoding="utf-8")


def load_plan(path) -> TrialPlan:
    text = Path(path).read_text(encoding="utf-8").strip()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc.msg}", line=exc.lineno) from exc
    if not isinstance(doc, dict) or doc.get("type") != "plan":
        raise ParseError(f"{path}: not a plan record")
    if doc.get("v") != FORMAT_VERSION:
        raise ParseError(f"{path}: unsupported plan version {doc.get('v')!r}")
    return serde.plan_from_jsonable(doc["payload"])


def _cmd_plan(args) -> int:
    spec = serde.load_json(args.spec)
    plan = plan_from_spec(spec)
    out = _out_path(args.out, "plan.ndjson")
    save_plan(plan, out)
    print(f"wrote {len(plan.trials)} trials ({plan.n_blocks} blocks) to {out}")
    return 0


def _load_sim_params(path) -> tuple[SimConfig, DeviceDescriptor | None]:
    doc = serde.load_json(path)
    device = None
    if "device" in doc:
        device = serde.device_from_jsonable(doc["device"])
    cfg = SimConfig(
        a=float(doc.get("a", 0.0)),
        b=float(doc.get("b", 0.1)),
        n=doc.get("n"),
        noise_sd=float(doc.get("noise_sd", 0.0)),
        seed=int(doc.get("seed", 0)),
        repetitions=int(doc.get("repetitions", 1)),
        sample_rate=float(doc.get("sample_rate", 125.0)),
    )
    return cfg, device


def _cmd_simulate(args) -> int:
    plan = load_plan(args.plan)
    cfg, device = _load_sim_params(args.params)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if device is None:
        device = DeviceDescriptor(plan.device or "device")
    session_id = args.session_id or f"sim-{device.name}-{cfg.seed:08d}"
    records = simulate_plan(plan, cfg)
    record = session_from_records(session_id, device, plan, records)
    out = _out_path(args.out, f"{session_id}.ndjson")
    out.write_bytes(export_log(record))
    print(f"wrote session {session_id} ({len(record.trials)} trials) to {out}")
    return 0


def _observations_from_log(record: SessionRecord, model: str) -> list[Observation]:
    pairs: dict[float, list[float]] = {}
    for task, trial_id in zip(record.plan.trials, record.plan.trial_ids):
        metric = record.trial_metrics.get(trial_id)
        if metric is None:
            continue
        if model in ("fitts", "meyer") and metric.get("kind") == "movement":
            if not metric["hit"] or metric["mt"] is None:
                continue
            if model == "meyer" and isinstance(task, AcquisitionTask):
                difficulty = task.amplitude / task.width
            else:
                difficulty = metric["difficulty"]
            pairs.setdefault(difficulty, []).append(metric["mt"])
        elif model == "steering" and metric.get("kind") == "steering":
            if metric["completed"] and metric["time"] > 0:
                pairs.setdefault(metric["difficulty"], []).append(metric["time"])
    return [Observation(d, sum(ts) / len(ts)) for d, ts in sorted(pairs.items())]


def _cmd_fit(args) -> int:
    record = import_log(Path(args.log).read_bytes())
    observations = _observations_from_log(record, args.model)
    if len(observations) < 2:
        print(f"error: log holds {len(observations)} usable conditions for model "
              f"{args.model!r}; need at least 2", file=sys.stderr)
        return 2
    if args.model == "meyer":
        result = fit_meyer(observations, n_max=args.n_max)
    else:
        result = fit_linear_law(observations)
    ip = "undefined" if result.ip is None else f"{result.ip:.6g}"
    n_part = f" n={result.params.n}" if result.params.n is not None else ""
    print(f"model={args.model}{n_part} a={result.params.a:.6g} s  "
          f"b={result.params.b:.6g} s/unit  r2={result.r_squared:.6g}  "
          f"ip={ip} bits/s  ({result.n_points} conditions)")
    if args.out:
        doc = {
            "model": args.model,
            "a": result.params.a,
            "b": result.params.b,
            "n": result.params.n,
            "r_squared": result.r_squared,
            "sse": result.sse,
            "ip": result.ip,
            "n_points": result.n_points,
        }
        _out_path(args.out, "fit.json").write_text(serde.dumps(doc) + "\n", encoding="utf-8")
    return 0


def _cmd_report(args) -> int:
    records = [import_log(Path(p).read_bytes()) for p in args.logs]
    report = comparison_report(records, model=args.model)
    print(report.to_text())
    if args.out:
        out = _out_path(args.out, "report.json")
        out.write_text(serde.dumps(report.to_jsonable()) + "\n", encoding="utf-8")
        print(f"wrote report to {out}")
    return 0


def _cmd_chart(args) -> int:
    devices = [load_device(p) for p in args.devices]
    chart = build_chart(devices)
    rendered = chart.to_svg() if args.format == "svg" else chart.to_text()
    if args.out:
        out = _out_path(args.out, f"chart.{args.format}")
        out.write_text(rendered, encoding="utf-8")
        print(f"wrote chart to {out}")
    else:
        print(rendered, end="")
    return 0


def _cmd_serve(args) -> int:
    plan = load_plan(args.plan)
    if args.device:
        device = load_device(args.device)
    else:
        device = DeviceDescriptor(plan.device or "device")
    gateway = Gateway(plan, device, port=args.port, out_dir=args.out_dir)
    host, port = gateway.address
    print(f"gateway listening on {host}:{port} "
          f"({len(plan.trials)} trials planned for {device.name})", flush=True)
    try:
        gateway.serve_forever()
    except KeyboardInterrupt:
        gateway.stop()
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctrlbench",
        description="Workbench for evaluating input controllers on HCI and musical tasks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="expand a battery spec into a trial plan")
    p.add_argument("--spec", required=True, help="battery spec JSON file")
    p.add_argument("--out", help="output plan file (.ndjson)")
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("simulate", help="run a simulated performer over a plan")
    p.add_argument("--plan", required=True)
    p.add_argument("--params", required=True, help="performer params JSON (a, b, noise_sd, ...)")
    p.add_argument("--seed", type=int, default=None, help="override the params seed")
    p.add_argument("--session-id", default=None)
    p.add_argument("--out", help="output session log")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("fit", help="fit a movement law to a session log")
    p.add_argument("--log", required=True)
    p.add_argument("--model", choices=("fitts", "meyer", "steering"), default="fitts")
    p.add_argument("--n-max", type=int, default=10, help="sub-movement search bound (meyer)")
    p.add_argument("--out", help="also write the fit as JSON")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("report", help="cross-device comparison from session logs")
    p.add_argument("--logs", required=True, nargs="+")
    p.add_argument("--model", choices=("fitts", "meyer"), default="fitts")
    p.add_argument("--out", help="write the machine-readable report JSON")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("chart", help="taxonomy chart from device descriptors")
    p.add_argument("--devices", required=True, nargs="+")
    p.add_argument("--format", choices=("text", "svg"), default="text")
    p.add_argument("--out", help="write the chart to a file instead of stdout")
    p.set_defaults(func=_cmd_chart)

    p = sub.add_parser("serve", help="serve a plan to a live performer UI")
    p.add_argument("--plan", required=True)
    p.add_argument("--port", type=int, default=0, help="TCP port (0 picks a free one)")
    p.add_argument("--device", help="device descriptor JSON for the session")
    p.add_argument("--out-dir", help="directory for finished session logs")
    p.set_defaults(func=_cmd_serve)
    return parser


def run_command(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except WorkbenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: missing file: {exc.filename}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_command())
