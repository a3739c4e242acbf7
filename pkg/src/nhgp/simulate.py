"""Fixed-step trajectory integration and training-data generation.

Classical RK4 with a fixed step keeps every run bit-reproducible; data
generation samples states along true trajectories, perturbs the angular
coordinates, and observes the true field at the perturbed states plus
isotropic Gaussian noise.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError, InsufficientDataError, InvalidInputError
from .regression import Dataset
from .systems import ConstraintSystem


@dataclass
class Trajectory:
    times: np.ndarray   # (M,)
    states: np.ndarray  # (M, n)
    field_label: str = ""

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.atleast_2d(np.asarray(self.states, dtype=float))
        if len(self.times) != len(self.states):
            raise InvalidInputError("times and states must have equal length")


@dataclass
class DataGenConfig:
    initial_conditions: list
    dt: float = 0.05
    horizon: float = 25.0
    n_train: int = 120
    sigma_state: float = 0.05
    sigma_obs: float = 0.03
    seed: int = 0

    def __post_init__(self):
        if self.dt <= 0 or self.n_train < 1:
            raise InvalidInputError("dt must be positive and n_train >= 1")
        if self.sigma_state < 0 or self.sigma_obs < 0:
            raise InvalidInputError("noise levels must be nonnegative")


def _rk4_step(f, q, dt):
    k1 = f(q)
    k2 = f(q + 0.5 * dt * k1)
    k3 = f(q + 0.5 * dt * k2)
    k4 = f(q + dt * k3)
    return q + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(vector_field, q0, dt: float, t_end: float,
              field_label: str = "") -> Trajectory:
    """Classical 4th-order Runge-Kutta with fixed step ``dt``.

    A final partial step lands exactly on ``t_end``.
    """
    if dt <= 0 or t_end < dt:
        raise InvalidInputError("require dt > 0 and t_end >= dt")
    q = np.asarray(q0, dtype=float).copy()
    times = [0.0]
    states = [q.copy()]
    t = 0.0
    # tolerate roundoff so t_end an exact multiple of dt takes no extra step
    while t < t_end - 1e-12:
        step = min(dt, t_end - t)
        q = _rk4_step(vector_field, q, step)
        t = min(t + step, t_end)
        if not np.all(np.isfinite(q)):
            raise DivergenceError(
                f"non-finite state at t={t:.6g}", last_valid_time=times[-1]
            )
        times.append(t)
        states.append(q.copy())
    return Trajectory(np.array(times), np.stack(states), field_label)


def _stride_indices(total: int, count: int) -> np.ndarray:
    return (np.arange(count) * total) // count


def generate_dataset(system: ConstraintSystem, cfg: DataGenConfig) -> Dataset:
    """Sample noisy observations of the true field along true trajectories.

    Noise streams are drawn in a fixed order (state perturbations first,
    then observation noise) so a seed fully determines the dataset.
    """
    trajectories = [
        integrate(system.true_field, np.asarray(ic, dtype=float), cfg.dt,
                  cfg.horizon, field_label="true")
        for ic in cfg.initial_conditions
    ]
    states = np.concatenate([tr.states for tr in trajectories])
    times = np.concatenate([tr.times for tr in trajectories])
    if cfg.n_train > len(states):
        raise InsufficientDataError(
            f"requested {cfg.n_train} samples but trajectories provide {len(states)}"
        )
    idx = _stride_indices(len(states), cfg.n_train)
    q = states[idx].copy()
    t = times[idx].copy()

    rng = np.random.default_rng(cfg.seed)
    if cfg.sigma_state > 0 and system.angular_indices:
        ang = list(system.angular_indices)
        q[:, ang] += rng.normal(0.0, cfg.sigma_state, size=(len(q), len(ang)))
    y = np.stack([system.true_field(qi) for qi in q])
    if cfg.sigma_obs > 0:
        y += rng.normal(0.0, cfg.sigma_obs, size=y.shape)

    meta = {
        "system": system.name,
        "seed": cfg.seed,
        "sigma_state": cfg.sigma_state,
        "sigma_obs": cfg.sigma_obs,
        "dt": cfg.dt,
        "horizon": cfg.horizon,
        "n_train": cfg.n_train,
        "initial_conditions": [list(map(float, ic)) for ic in cfg.initial_conditions],
        "source": "subsampled true trajectories with angular state noise",
    }
    return Dataset(inputs=q, outputs=y, times=t, meta=meta)


def save_dataset(data: Dataset, csv_path, meta_path=None) -> None:
    """One row per sample: t, q..., y...; metadata goes to a JSON sidecar."""
    n = data.inputs.shape[1]
    header = ["t"] + [f"q{i}" for i in range(n)] + [f"y{i}" for i in range(n)]
    times = data.times if data.times is not None else np.zeros(len(data))
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for t, q, y in zip(times, data.inputs, data.outputs):
            writer.writerow([repr(float(t))] + [repr(float(v)) for v in q]
                            + [repr(float(v)) for v in y])
    if meta_path is not None:
        with open(meta_path, "w") as fh:
            json.dump(data.meta, fh, sort_keys=True, indent=2)
            fh.write("\n")


def load_dataset(csv_path, meta_path=None) -> Dataset:
    with open(csv_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader]
    n = (len(header) - 1) // 2
    arr = np.asarray(rows)
    meta = {}
    if meta_path is not None:
        with open(meta_path) as fh:
            meta = json.load(fh)
    return Dataset(
        inputs=arr[:, 1:1 + n], outputs=arr[:, 1 + n:1 + 2 * n],
        times=arr[:, 0], meta=meta,
    )


def save_trajectory(traj: Trajectory, csv_path) -> None:
    n = traj.states.shape[1]
    header = ["t"] + [f"q{i}" for i in range(n)]
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for t, q in zip(traj.times, traj.states):
            writer.writerow([repr(float(t))] + [repr(float(v)) for v in q])
