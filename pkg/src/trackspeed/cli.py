"""Command-line front door.

Subcommands: calibrate (force stream -> profile), simulate (synthetic
trials end to end), analyze (trial logs -> CSV + histogram JSON),
gen-traces (task definitions as JSON), plot-mappings (technique curve
table), serve (session service for interactive clients).

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import calibration, engine, metrics, synthuser, tasks
from .errors import TrackspeedError
from .mapping import (
    Technique,
    TechniqueConfig,
    eval_constant,
    eval_forcepinch,
    eval_gogo,
    eval_prism,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; the documented contract is 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class DataError(Exception):
    pass


def _read_force_stream(path: str) -> list[calibration.ForceSample]:
    samples = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    data = json.loads(line)
                    samples.append(calibration.ForceSample(float(data["t"]), float(data["raw"])))
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                    raise DataError(f"{path}: malformed line {lineno}: {exc}") from exc
    except OSError as exc:
        raise DataError(str(exc)) from exc
    return samples


def cmd_calibrate(args) -> int:
    stream = _read_force_stream(args.input)
    try:
        anchors = calibration.cluster_force_levels(stream)
        profile = calibration.build_force_mapping(anchors, args.gain)
    except TrackspeedError as exc:
        raise DataError(f"calibration failed: {exc}") from exc
    calibration.save_profile(profile, args.output)
    print(f"profile written to {args.output} (anchors {anchors[0]:.6g}, "
          f"{anchors[1]:.6g}, {anchors[2]:.6g})")
    return EXIT_OK


def _load_profile(path: str) -> calibration.CalibrationProfile:
    try:
        return calibration.load_profile(path)
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        raise DataError(f"cannot load profile {path}: {exc}") from exc


def _parse_seeds(args) -> list[int]:
    if args.seeds:
        try:
            return [int(s) for s in args.seeds.split(",") if s.strip() != ""]
        except ValueError as exc:
            raise DataError(f"bad --seeds value: {exc}") from exc
    return list(range(args.seed_base, args.seed_base + args.trials))


def cmd_simulate(args) -> int:
    technique = Technique(args.technique)
    profile = None
    if technique is Technique.FORCEPINCH:
        if not args.profile:
            raise DataError("MissingProfile: the forcepinch technique needs --profile")
        profile = _load_profile(args.profile)
    elif args.profile:
        profile = _load_profile(args.profile)

    cfg = TechniqueConfig(technique=technique, base_gain_c=args.gain)
    strategy = synthuser.ForceStrategy(args.strategy)
    user = synthuser.UserParams(reach=args.reach)
    seeds = _parse_seeds(args)
    os.makedirs(args.out_dir, exist_ok=True)

    replay = None
    if args.stream:
        try:
            with open(args.stream, "r", encoding="utf-8") as fh:
                replay = synthuser.stream_from_jsonl(fh.read())
        except (OSError, json.JSONDecodeError, KeyError) as exc:
            raise DataError(f"cannot read stream {args.stream}: {exc}") from exc
        seeds = seeds[:1]  # a replayed stream drives exactly one trial

    rows = []
    for seed in seeds:
        task = tasks.make_task(args.task, seed=seed, shape=args.shape)
        noise = synthuser.NoiseModel(tremor_amplitude=args.noise, seed=seed)
        stream = replay if replay is not None else synthuser.make_task_stream(
            task, cfg, profile, strategy, noise, user
        )
        session = engine.start_session(task, cfg, profile=profile, seed=seed)
        engine.run_stream(session, stream)
        stem = f"{technique.value}_{args.task}_{seed}"
        engine.write_trial_log(session, os.path.join(args.out_dir, f"trial_{stem}.jsonl"))
        if args.save_streams:
            with open(os.path.join(args.out_dir, f"stream_{stem}.jsonl"), "w",
                      encoding="utf-8") as fh:
                fh.write(synthuser.stream_to_jsonl(stream))
        m = metrics.compute_trial_metrics(task, session.trial_log, cfg.base_gain_c)
        rows.append(metrics.metrics_csv_row(technique.value, args.task, seed, m))

    csv_path = args.csv or os.path.join(args.out_dir, "metrics.csv")
    _write_csv(csv_path, rows)
    print(f"{len(rows)} trials -> {args.out_dir} (metrics: {csv_path})")
    return EXIT_OK


def _write_csv(path: str, rows: list[list[str]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(metrics.CSV_COLUMNS)
        writer.writerows(rows)


def cmd_analyze(args) -> int:
    rows = []
    hists = {}
    for path in args.logs:
        try:
            header, records = engine.read_trial_log(path)
        except (OSError, ValueError) as exc:
            raise DataError(f"{path}: {exc}") from exc
        task_data = header.get("task")
        if not task_data:
            raise DataError(f"{path}: header carries no task definition")
        try:
            task = tasks.task_from_json(task_data)
            m = metrics.compute_trial_metrics(task, records, header.get("c", 1.0))
        except (TrackspeedError, ValueError, KeyError) as exc:
            raise DataError(f"{path}: {exc}") from exc
        rows.append(
            metrics.metrics_csv_row(
                header.get("technique", ""), task_data.get("kind", ""), header.get("seed"), m
            )
        )
        hists[os.path.basename(path)] = {
            "speed_histogram": m.speed_histogram,
            "position_histogram": m.position_histogram,
        }

    _write_csv(args.csv, rows)
    if args.hist_json:
        with open(args.hist_json, "w", encoding="utf-8") as fh:
            json.dump(hists, fh, indent=2, sort_keys=True)
            fh.write("\n")
    if args.summary_json:
        with open(args.summary_json, "w", encoding="utf-8") as fh:
            json.dump(_summarize_rows(rows), fh, indent=2, sort_keys=True)
            fh.write("\n")
    print(f"{len(rows)} logs -> {args.csv}")
    return EXIT_OK


_SUMMARY_FIELDS = ["error_distance", "operation_time", "num_operations",
                   "hand_travel", "object_travel", "overshoot_count"]


def _summarize_rows(rows: list[list[str]]) -> dict:
    """Per-(technique, task) means with t-distribution 95% half-widths."""
    groups: dict[tuple[str, str], list[list[str]]] = {}
    for row in rows:
        groups.setdefault((row[0], row[1]), []).append(row)
    out = {}
    for (technique, task_kind), members in sorted(groups.items()):
        entry = {"n": len(members)}
        for name in _SUMMARY_FIELDS:
            idx = metrics.CSV_COLUMNS.index(name)
            values = [float(r[idx]) for r in members]
            if len(values) >= 2:
                mean, half = metrics.mean_ci95(values)
            else:
                mean, half = values[0], None
            entry[name] = {"mean": mean, "ci95_half_width": half}
        out[f"{technique}/{task_kind}"] = entry
    return out


def cmd_gen_traces(args) -> int:
    task = tasks.make_task(args.task, seed=args.seed, shape=args.shape)
    data = task.to_json()
    if isinstance(task, tasks.TracePath):
        data["polyline"] = [list(p) for p in task.polyline]
        data["closed"] = task.closed
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_plot_mappings(args) -> int:
    if args.gain <= 0:
        raise DataError("gain must be positive")
    cfg = TechniqueConfig(technique=Technique.CONSTANT, base_gain_c=args.gain)
    n = args.samples
    rows = []
    for x in np.linspace(0.0, 1.0, n):
        rows.append(("constant", float(x), eval_constant(cfg)))
    for d in np.linspace(0.0, 0.6, n):
        rows.append(("gogo", float(d), eval_gogo(float(d), cfg)))
    for v in np.linspace(0.0, 0.9, n):
        rows.append(("prism", float(v), eval_prism(float(v), cfg)))
    for f in np.linspace(0.0, 1.0, n):
        rows.append(("forcepinch", float(f), eval_forcepinch(float(f), cfg)))

    out = args.out or "-"
    fh = sys.stdout if out == "-" else open(out, "w", encoding="utf-8", newline="")
    try:
        writer = csv.writer(fh)
        writer.writerow(["technique", "input", "speed"])
        for technique, x, s in rows:
            writer.writerow([technique, repr(x), repr(s)])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_serve(args) -> int:
    from .server import SessionServer

    try:
        server = SessionServer(host=args.host, port=args.port, log_dir=args.log_dir)
    except OSError as exc:
        raise DataError(f"cannot bind {args.host}:{args.port}: {exc}") from exc
    print(f"session service on {server.server_address[0]}:{server.port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


def _apply_config_defaults(args, parser_defaults: dict) -> None:
    """Config-file values fill in any argument left at its built-in default."""
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read config {args.config}: {exc}") from exc
    if not isinstance(config, dict):
        raise DataError("config file must hold a JSON object")
    for key, value in config.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise DataError(f"unknown config key: {key}")
        if getattr(args, attr) == parser_defaults.get(attr):
            setattr(args, attr, value)


def build_parser() -> _Parser:
    parser = _Parser(prog="trackspeed", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    parser.sub_map = {}

    p = parser.sub_map["calibrate"] = sub.add_parser(
        "calibrate", help="build a force profile from a raw stream"
    )
    p.add_argument("--input", required=True, help="force samples, JSON lines {t, raw}")
    p.add_argument("--output", required=True, help="profile JSON path")
    p.add_argument("--gain", type=float, default=1.0, help="base gain c")
    p.set_defaults(func=cmd_calibrate)

    p = parser.sub_map["simulate"] = sub.add_parser("simulate", help="run synthetic trials end to end")
    p.add_argument("--technique", choices=[t.value for t in Technique], default="constant")
    p.add_argument("--task", choices=["slider", "trace", "placement"], default="slider")
    p.add_argument("--shape", default="circle", help="trace shape")
    p.add_argument("--gain", type=float, default=0.5, help="base gain c")
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--seeds", default=None, help="comma-separated explicit seeds")
    p.add_argument("--noise", type=float, default=0.0005, help="tremor std-dev per tick (m)")
    p.add_argument(
        "--strategy",
        choices=[s.value for s in synthuser.ForceStrategy],
        default=synthuser.ForceStrategy.CONSTANT_HEAVY.value,
    )
    p.add_argument("--profile", default=None, help="calibration profile JSON")
    p.add_argument("--reach", type=float, default=None,
                   help="max hand displacement per grab (m)")
    p.add_argument("--out-dir", default="trials")
    p.add_argument("--csv", default=None, help="metrics CSV path")
    p.add_argument("--stream", default=None,
                   help="replay this input-stream JSONL instead of generating one")
    p.add_argument("--save-streams", action="store_true",
                   help="also write the generated input streams as JSONL")
    p.add_argument("--config", default=None, help="JSON config file; flags override")
    p.set_defaults(func=cmd_simulate)

    p = parser.sub_map["analyze"] = sub.add_parser("analyze", help="compute metrics from trial logs")
    p.add_argument("logs", nargs="*", help="trial log files (JSON lines)")
    p.add_argument("--csv", default="metrics.csv")
    p.add_argument("--hist-json", default=None)
    p.add_argument("--summary-json", default=None,
                   help="per-(technique, task) means and 95% CIs")
    p.set_defaults(func=cmd_analyze)

    p = parser.sub_map["gen-traces"] = sub.add_parser("gen-traces", help="emit a task definition as JSON")
    p.add_argument("--task", choices=["slider", "trace", "placement"], required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shape", default="circle")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen_traces)

    p = parser.sub_map["plot-mappings"] = sub.add_parser("plot-mappings", help="tracking-speed curve table for all techniques")
    p.add_argument("--gain", type=float, default=0.5)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.set_defaults(func=cmd_plot_mappings)

    p = parser.sub_map["serve"] = sub.add_parser("serve", help="session service for interactive clients")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=7641)
    p.add_argument("--log-dir", default=None, help="write completed trial logs here")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if getattr(args, "config", None):
        defaults = {a.dest: a.default for a in parser.sub_map[args.command]._actions}
        try:
            _apply_config_defaults(args, defaults)
        except DataError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_DATA
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except TrackspeedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
