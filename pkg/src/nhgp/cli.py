"""Command-line pipeline: generate data, train models, evaluate, reproduce.

Every command is a pure function of (config, input files, seed); outputs are
written atomically so reruns with the same seed produce identical bytes.
Logs go to stderr; data never mixes with logs.
"""

from __future__ import annotations

import argparse
import importlib.resources
import json
import os
import sys
import time

import numpy as np

from ._io import atomic_write_text, dump_csv_text, dump_json_text
from .errors import (
    DivergenceError,
    IllConditionedKernelError,
    InvalidInputError,
    NhgpError,
    OptimizationFailedError,
)
from .evaluate import EvalConfig, build_report
from .regression import GpModel, KernelKind, train_model
from .simulate import DataGenConfig, generate_dataset, load_dataset
from .systems import make_system

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2


class ConfigError(NhgpError):
    pass


def _log(stage: str, **kv) -> None:
    ts = time.strftime("%Y-%m-%dT%H:%M:%S")
    pairs = " ".join(f"{k}={v}" for k, v in kv.items())
    print(f"{ts} stage={stage} {pairs}", file=sys.stderr)


def default_config() -> dict:
    text = (
        importlib.resources.files("nhgp")
        .joinpath("configs/benchmark.json")
        .read_text()
    )
    return json.loads(text)


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    return cfg


def _require(cfg: dict, key: str, where: str):
    if key not in cfg:
        raise ConfigError(f"missing config field '{where}.{key}'")
    return cfg[key]


def _build_system(cfg: dict):
    sys_cfg = _require(cfg, "system", "config")
    name = _require(sys_cfg, "name", "system")
    return make_system(name, sys_cfg.get("params", {}))


def _build_data_config(cfg: dict, seed_override=None) -> DataGenConfig:
    data = _require(cfg, "data", "config")
    seed = seed_override if seed_override is not None else cfg.get("seed", 0)
    return DataGenConfig(
        initial_conditions=_require(data, "initial_conditions", "data"),
        dt=data.get("dt", 0.05),
        horizon=data.get("horizon", 25.0),
        n_train=data.get("n_train", 120),
        sigma_state=data.get("sigma_state", 0.05),
        sigma_obs=data.get("sigma_obs", 0.03),
        seed=seed,
    )


def _build_eval_config(cfg: dict) -> EvalConfig:
    ev = _require(cfg, "evaluation", "config")
    return EvalConfig(
        test_initial_condition=_require(ev, "test_initial_condition", "evaluation"),
        rollout_initial_condition=_require(
            ev, "rollout_initial_condition", "evaluation"
        ),
        horizon=ev.get("horizon", 25.0),
        dt=ev.get("dt", 0.05),
    )


def _out_dir(cfg: dict, override) -> str:
    out = override or cfg.get("output_dir", "nhgp_out")
    os.makedirs(out, exist_ok=True)
    return out


def cmd_generate(cfg: dict, out: str, seed_override=None) -> str:
    system = _build_system(cfg)
    data_cfg = _build_data_config(cfg, seed_override)
    _log("generate", system=system.name, n_train=data_cfg.n_train,
         seed=data_cfg.seed)
    data = generate_dataset(system, data_cfg)
    n = data.inputs.shape[1]
    header = ["t"] + [f"q{i}" for i in range(n)] + [f"y{i}" for i in range(n)]
    rows = [
        [float(t)] + [float(v) for v in q] + [float(v) for v in y]
        for t, q, y in zip(data.times, data.inputs, data.outputs)
    ]
    csv_path = os.path.join(out, "dataset.csv")
    atomic_write_text(csv_path, dump_csv_text(header, rows))
    atomic_write_text(os.path.join(out, "dataset.meta.json"),
                      dump_json_text(data.meta))
    _log("generate", written=csv_path, rows=len(rows))
    return csv_path


def cmd_train(cfg: dict, dataset_path: str, out: str) -> list:
    system = _build_system(cfg)
    meta_path = os.path.join(os.path.dirname(dataset_path), "dataset.meta.json")
    data = load_dataset(
        dataset_path, meta_path if os.path.exists(meta_path) else None
    )
    model_cfgs = _require(cfg, "models", "config")
    written = []
    failures = []
    for mc in model_cfgs:
        kind_name = _require(mc, "kind", "models[]")
        try:
            kind = KernelKind(kind_name)
        except ValueError as exc:
            raise ConfigError(
                f"unknown model kind '{kind_name}' "
                f"(options: {', '.join(k.value for k in KernelKind)})"
            ) from exc
        budget = mc.get("optimizer_budget", 2000)
        _log("train", kind=kind.value, budget=budget)
        try:
            model = train_model(
                data, kind, system, budget=budget,
                meta={"seed": data.meta.get("seed"), "optimizer_budget": budget},
            )
        except NhgpError as exc:
            _log("train", kind=kind.value, error=repr(exc))
            failures.append((kind.value, exc))
            continue
        path = os.path.join(out, f"model_{kind.value}.json")
        atomic_write_text(path, dump_json_text(model.to_dict()))
        _log("train", kind=kind.value, written=path)
        written.append(path)
    if failures and not written:
        raise failures[0][1]
    return written


def cmd_evaluate(cfg: dict, model_paths: list, out: str) -> list:
    if not model_paths:
        raise ConfigError("no model files given")
    system = _build_system(cfg)
    models = [("nominal", system.nominal_field)]
    for path in model_paths:
        if not os.path.exists(path):
            raise ConfigError(f"model file not found: {path}")
        with open(path) as fh:
            model = GpModel.from_dict(json.load(fh))
        models.append((model.kind.value, model))
    eval_cfg = _build_eval_config(cfg)
    _log("evaluate", models=len(models), horizon=eval_cfg.horizon)
    reports = build_report(system, models, eval_cfg, out_dir=out,
                           eval_meta={"seed": cfg.get("seed")})
    _print_summary(reports)
    return reports


def _print_summary(reports) -> None:
    labels = [r.model_label for r in reports]
    fields = [
        ("Mean field err.", "mean_field_error"),
        ("Mean constr. viol.", "mean_constraint_violation"),
        ("Max constr. viol.", "max_constraint_violation"),
        ("Mean planar err.", "mean_planar_error"),
        ("Final planar err.", "final_planar_error"),
    ]
    width = max(len(lbl) for lbl in labels) + 2
    print("Metric".ljust(22) + "".join(lbl.rjust(max(width, 14)) for lbl in labels))
    for title, attr in fields:
        row = "".join(
            f"{getattr(r, attr):>{max(width, 14)}.6g}" for r in reports
        )
        print(title.ljust(22) + row)


def cmd_reproduce(out: str, cfg: dict | None = None) -> list:
    cfg = cfg or default_config()
    dataset_path = cmd_generate(cfg, out)
    model_paths = cmd_train(cfg, dataset_path, out)
    return cmd_evaluate(cfg, model_paths, out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nhgp",
        description="Constraint-preserving GP benchmark for the vertical rolling disk",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="path to a run config JSON")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", help="output directory")

    p = sub.add_parser("generate", help="write the training dataset")
    common(p)
    p = sub.add_parser("train", help="train configured models on a dataset")
    common(p)
    p.add_argument("--dataset", required=True, help="dataset CSV path")
    p = sub.add_parser("evaluate", help="compute metrics and figure data")
    common(p)
    p.add_argument("--models", nargs="+", required=True, help="model JSON paths")
    p = sub.add_parser("reproduce", help="full generate/train/evaluate pipeline")
    common(p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems; remap to the documented code
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = load_config(args.config) if args.config else default_config()
        if args.seed is not None:
            cfg["seed"] = args.seed
        out = _out_dir(cfg, args.out)
        if args.command == "generate":
            cmd_generate(cfg, out)
        elif args.command == "train":
            cmd_train(cfg, args.dataset, out)
        elif args.command == "evaluate":
            cmd_evaluate(cfg, args.models, out)
        elif args.command == "reproduce":
            cmd_reproduce(out, cfg)
        return EXIT_OK
    except (ConfigError, InvalidInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IllConditionedKernelError, OptimizationFailedError,
            DivergenceError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
