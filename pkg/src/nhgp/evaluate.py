"""Benchmark metrics and report generation.

Three metric families: pointwise field prediction error, constraint
violation of the predicted field, and planar tracking error between rolled
out trajectories.  A consistency sweep measures how the sup-error of the
constrained estimator decays with training-set size.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from ._io import atomic_write_text, dump_csv_text, dump_json_text
from .errors import InvalidInputError
from .kernels import KernelHyperparams
from .regression import Dataset, GpModel, KernelKind, fit_vector_gp
from .simulate import Trajectory, integrate
from .systems import ConstraintSystem


def _predict_batch(model, points: np.ndarray) -> np.ndarray:
    if hasattr(model, "predict_batch"):
        return model.predict_batch(points)
    return np.stack([np.asarray(model(q), dtype=float) for q in points])


def _as_field(model):
    if hasattr(model, "predict"):
        return model.predict
    return model


def field_error(model, system: ConstraintSystem, test_points):
    """Euclidean distance between predicted and true field per test point."""
    points = np.atleast_2d(np.asarray(test_points, dtype=float))
    if len(points) == 0:
        raise InvalidInputError("empty test set")
    pred = _predict_batch(model, points)
    truth = np.stack([system.true_field(q) for q in points])
    per_point = np.linalg.norm(pred - truth, axis=1)
    return per_point, float(np.mean(per_point))


def constraint_violation(model, system: ConstraintSystem, test_points):
    """Norm of A(q) applied to the predicted field per test point."""
    points = np.atleast_2d(np.asarray(test_points, dtype=float))
    if len(points) == 0:
        raise InvalidInputError("empty test set")
    pred = _predict_batch(model, points)
    per_point = np.array([
        np.linalg.norm(system.constraint_matrix(q) @ f)
        for q, f in zip(points, pred)
    ])
    return per_point, float(np.mean(per_point)), float(np.max(per_point))


def planar_error(traj_true: Trajectory, traj_model: Trajectory):
    """Distance between the (x, y) tracks of two trajectories on a shared
    time grid; returns per-time values, mean, and the final value."""
    if traj_true.times.shape != traj_model.times.shape or not np.allclose(
        traj_true.times, traj_model.times, atol=1e-12, rtol=0.0
    ):
        raise InvalidInputError("trajectories must share the same time grid")
    d = traj_true.states[:, :2] - traj_model.states[:, :2]
    per_time = np.linalg.norm(d, axis=1)
    return per_time, float(np.mean(per_time)), float(per_time[-1])


@dataclass
class MetricsReport:
    model_label: str
    mean_field_error: float
    mean_constraint_violation: float
    max_constraint_violation: float
    mean_planar_error: float
    final_planar_error: float
    eval_meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "model_label": self.model_label,
            "mean_field_error": self.mean_field_error,
            "mean_constraint_violation": self.mean_constraint_violation,
            "max_constraint_violation": self.max_constraint_violation,
            "mean_planar_error": self.mean_planar_error,
            "final_planar_error": self.final_planar_error,
            "eval_meta": self.eval_meta,
        }


@dataclass
class EvalConfig:
    test_initial_condition: list
    rollout_initial_condition: list
    horizon: float = 25.0
    dt: float = 0.05


@dataclass
class ConsistencyConfig:
    hp: KernelHyperparams
    dims: tuple
    angle_low: float = -2.0
    angle_high: float = 2.0
    grid_size: int = 200
    grid_seed: int = 12345
    kernel_kind: KernelKind = KernelKind.NONHOLONOMIC_AMBIENT


def _random_configs(system, rng, count, low, high):
    q = np.zeros((count, system.n))
    ang = list(system.angular_indices)
    q[:, ang] = rng.uniform(low, high, size=(count, len(ang)))
    return q


def consistency_sweep(system: ConstraintSystem, sample_sizes, seeds,
                      cfg: ConsistencyConfig, target_field=None):
    """Sup-error of the constrained GP over a fixed test grid, for each
    (training size, seed) pair.  Targets are noiseless evaluations of
    ``target_field`` (default: the system's true field)."""
    if list(sample_sizes) != sorted(sample_sizes):
        raise InvalidInputError("sample sizes must be increasing")
    target = target_field or system.true_field
    grid_rng = np.random.default_rng(cfg.grid_seed)
    grid = _random_configs(system, grid_rng, cfg.grid_size,
                           cfg.angle_low, cfg.angle_high)
    truth = np.stack([np.asarray(target(q), dtype=float) for q in grid])
    rows = []
    for n in sample_sizes:
        for seed in seeds:
            rng = np.random.default_rng(seed)
            x = _random_configs(system, rng, n, cfg.angle_low, cfg.angle_high)
            y = np.stack([np.asarray(target(q), dtype=float) for q in x])
            data = Dataset(inputs=x, outputs=y, meta={"seed": seed})
            model = fit_vector_gp(data, cfg.kernel_kind, system,
                                  [cfg.hp], dims=cfg.dims)
            pred = model.predict_batch(grid)
            sup = float(np.max(np.linalg.norm(pred - truth, axis=1)))
            rows.append({"n": n, "seed": seed, "sup_error": sup})
    return rows


def build_report(system: ConstraintSystem, models, eval_cfg: EvalConfig,
                 out_dir=None, eval_meta=None):
    """Compute all metric families for each (label, model) pair.

    Test points are states along a true trajectory from the test initial
    condition; rollouts start from the rollout initial condition with the
    same integrator settings.  With ``out_dir`` set, writes ``report.json``
    and per-figure CSV series.
    """
    if not models:
        raise InvalidInputError("empty model list")
    test_traj = integrate(system.true_field,
                          np.asarray(eval_cfg.test_initial_condition, dtype=float),
                          eval_cfg.dt, eval_cfg.horizon, field_label="true")
    test_points = test_traj.states
    q0 = np.asarray(eval_cfg.rollout_initial_condition, dtype=float)
    true_roll = integrate(system.true_field, q0, eval_cfg.dt,
                          eval_cfg.horizon, field_label="true")

    reports = []
    planar_series = {}
    enh_series = {}
    ef_series = {}
    rollouts = {"true": true_roll}
    meta = dict(eval_meta or {})
    meta.setdefault("test_initial_condition",
                    list(map(float, eval_cfg.test_initial_condition)))
    meta.setdefault("horizon", eval_cfg.horizon)
    meta.setdefault("dt", eval_cfg.dt)
    for label, model in models:
        ef, ef_mean = field_error(model, system, test_points)
        enh, enh_mean, enh_max = constraint_violation(model, system, test_points)
        roll = integrate(_as_field(model), q0, eval_cfg.dt,
                         eval_cfg.horizon, field_label=label)
        delta, delta_mean, delta_final = planar_error(true_roll, roll)
        reports.append(MetricsReport(
            model_label=label,
            mean_field_error=ef_mean,
            mean_constraint_violation=enh_mean,
            max_constraint_violation=enh_max,
            mean_planar_error=delta_mean,
            final_planar_error=delta_final,
            eval_meta=meta,
        ))
        planar_series[label] = delta
        enh_series[label] = enh
        ef_series[label] = ef
        rollouts[label] = roll

    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        labels = [lbl for lbl, _ in models]
        atomic_write_text(
            os.path.join(out_dir, "report.json"),
            dump_json_text([r.to_dict() for r in reports]),
        )
        header = ["t"]
        cols = [true_roll.times]
        for lbl in ["true"] + labels:
            header += [f"x_{lbl}", f"y_{lbl}"]
            cols += [rollouts[lbl].states[:, 0], rollouts[lbl].states[:, 1]]
        atomic_write_text(
            os.path.join(out_dir, "fig_trajectories.csv"),
            dump_csv_text(header, [list(map(float, row)) for row in zip(*cols)]),
        )
        atomic_write_text(
            os.path.join(out_dir, "fig_planar_error.csv"),
            dump_csv_text(
                ["t"] + [f"delta_{lbl}" for lbl in labels],
                [list(map(float, row)) for row in zip(
                    true_roll.times, *[planar_series[lbl] for lbl in labels]
                )],
            ),
        )
        atomic_write_text(
            os.path.join(out_dir, "fig_constraint_violation.csv"),
            dump_csv_text(
                ["t"] + [f"enh_{lbl}" for lbl in labels],
                [list(map(float, row)) for row in zip(
                    test_traj.times, *[enh_series[lbl] for lbl in labels]
                )],
            ),
        )
        atomic_write_text(
            os.path.join(out_dir, "fig_field_error.csv"),
            dump_csv_text(
                ["t"] + [f"ef_{lbl}" for lbl in labels],
                [list(map(float, row)) for row in zip(
                    test_traj.times, *[ef_series[lbl] for lbl in labels]
                )],
            ),
        )
    return reports
