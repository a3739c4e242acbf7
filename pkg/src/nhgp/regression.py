"""Gaussian process posterior inference for constrained vector fields.

Three model kinds share one training surface:

* ``STANDARD_AMBIENT``: independent scalar GP per ambient output (the
  isotropic matrix kernel is block-diagonal after reordering, so per-output
  channels are exact).
* ``NONHOLONOMIC_AMBIENT``: one stacked solve against the block Gram matrix
  of the projected kernel; predictions are admissible for every input by
  construction.
* ``ADAPTED_COORDINATES``: observations are mapped to adapted velocities via
  the basis pseudoinverse, scalar channels are fit there, and predictions are
  mapped back through the basis.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.optimize

from .errors import (
    IllConditionedKernelError,
    InvalidInputError,
    OptimizationFailedError,
)
from .kernels import (
    KernelHyperparams,
    check_active_dims,
    nonholonomic_kernel,
    se_ard_kernel_matrix,
)
from .systems import ConstraintSystem, make_system

JITTER_BASE = 1e-10
JITTER_MAX = 1e-6


class KernelKind(enum.Enum):
    STANDARD_AMBIENT = "standard_ambient"
    NONHOLONOMIC_AMBIENT = "nonholonomic_ambient"
    ADAPTED_COORDINATES = "adapted_coordinates"


@dataclass
class Dataset:
    """Training inputs with noisy ambient observations."""

    inputs: np.ndarray   # (N, n)
    outputs: np.ndarray  # (N, n)
    times: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.inputs = np.atleast_2d(np.asarray(self.inputs, dtype=float))
        self.outputs = np.atleast_2d(np.asarray(self.outputs, dtype=float))
        if self.inputs.shape[0] != self.outputs.shape[0] or self.inputs.shape[0] < 1:
            raise InvalidInputError("inputs and outputs must pair up, N >= 1")
        if not (np.all(np.isfinite(self.inputs)) and np.all(np.isfinite(self.outputs))):
            raise InvalidInputError("dataset contains non-finite entries")
        if self.times is not None:
            self.times = np.asarray(self.times, dtype=float)

    def __len__(self):
        return self.inputs.shape[0]


def _cholesky_with_jitter(k: np.ndarray, noise_variance: float):
    """Lower Cholesky of ``K + noise I + jitter I`` with escalating jitter.

    The projected kernel's Gram blocks are rank deficient, so a small
    diagonal boost is required even for modest noise levels.
    """
    dim = k.shape[0]
    scale = max(np.trace(k) / dim, np.finfo(float).tiny)
    jitter = JITTER_BASE * scale
    while True:
        try:
            l = np.linalg.cholesky(k + (noise_variance + jitter) * np.eye(dim))
            return l, jitter
        except np.linalg.LinAlgError:
            if jitter >= JITTER_MAX * scale:
                raise IllConditionedKernelError(
                    "Cholesky failed after jitter escalation"
                )
            jitter *= 10.0


@dataclass
class ScalarGpChannel:
    """One fitted scalar-output GP channel."""

    inputs: np.ndarray
    hp: KernelHyperparams
    dims: tuple[int, ...]
    alpha: np.ndarray
    chol: np.ndarray | None = None
    jitter: float = 0.0

    def predict(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return se_ard_kernel_matrix(x, self.inputs, self.hp, self.dims) @ self.alpha


def fit_scalar_channel(inputs, targets, hp: KernelHyperparams, dims) -> ScalarGpChannel:
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    targets = np.asarray(targets, dtype=float)
    dims = check_active_dims(dims, inputs.shape[1])
    k = se_ard_kernel_matrix(inputs, inputs, hp, dims)
    l, jitter = _cholesky_with_jitter(k, hp.noise_variance)
    alpha = scipy.linalg.cho_solve((l, True), targets)
    return ScalarGpChannel(inputs, hp, dims, alpha, l, jitter)


def log_marginal_likelihood(inputs, targets, hp: KernelHyperparams, dims) -> float:
    """Gaussian log evidence of the targets under the kernel-plus-noise model."""
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    targets = np.asarray(targets, dtype=float)
    dims = check_active_dims(dims, inputs.shape[1])
    n = len(targets)
    k = se_ard_kernel_matrix(inputs, inputs, hp, dims)
    l, _ = _cholesky_with_jitter(k, hp.noise_variance)
    alpha = scipy.linalg.cho_solve((l, True), targets)
    return float(
        -0.5 * targets @ alpha
        - np.sum(np.log(np.diag(l)))
        - 0.5 * n * np.log(2.0 * np.pi)
    )


def _hp_to_log(hp: KernelHyperparams) -> np.ndarray:
    return np.log(np.concatenate([
        [hp.signal_variance],
        hp.length_scales,
        [max(hp.noise_variance, 1e-12)],
    ]))


def _hp_from_log(theta: np.ndarray) -> KernelHyperparams:
    v = np.exp(theta)
    return KernelHyperparams(
        signal_variance=float(v[0]),
        length_scales=tuple(v[1:-1]),
        noise_variance=float(v[-1]),
    )


# search box for length scales, in log space.  The scalar kernel acts on
# angular chart coordinates and the training inputs lie along trajectories
# where the angles are nearly collinear, so length scales beyond the angular
# half-period are not identifiable; the box keeps the simplex off that ridge.
LOG_LS_MIN = np.log(1e-2)
LOG_LS_MAX = np.log(np.pi)


def _optimize_log_objective(objective, init_theta, budget):
    """Nelder-Mead in log-parameter space with deterministic restarts.

    Length-scale components (all but the first and last) are confined to
    [LOG_LS_MIN, LOG_LS_MAX]; the initial point itself is still evaluated
    as the incumbent even if it falls outside.
    """
    state = {"evals": 0, "best": np.inf, "best_theta": None, "any_finite": False}

    def consider(theta):
        if state["evals"] >= budget:
            return np.inf
        state["evals"] += 1
        val = objective(theta)
        if np.isfinite(val):
            state["any_finite"] = True
            if val < state["best"]:
                state["best"] = val
                state["best_theta"] = np.array(theta)
        return val

    def wrapped(theta):
        ls = theta[1:-1]
        if np.any(ls < LOG_LS_MIN) or np.any(ls > LOG_LS_MAX):
            return 1e300
        val = consider(theta)
        return val if np.isfinite(val) else 1e300

    consider(init_theta)
    init_theta = np.array(init_theta)
    init_theta[1:-1] = np.clip(init_theta[1:-1], LOG_LS_MIN + 0.05,
                               LOG_LS_MAX - 0.05)
    # deterministic restart ladder over the length scales; the half-range
    # initialization overshoots badly when inputs span many characteristic
    # periods, so most restarts shrink
    d = len(init_theta)
    starts = []
    for factor in (1.0, 0.5, 0.25, 0.125, 2.0):
        shift = np.zeros(d)
        shift[1:-1] = np.log(factor)
        starts.append(init_theta + shift)
    per_start = max((budget - 1) // len(starts), 1)
    for start in starts:
        if state["evals"] >= budget:
            break
        scipy.optimize.minimize(
            wrapped,
            start,
            method="Nelder-Mead",
            options={"maxfev": per_start, "xatol": 1e-4, "fatol": 1e-8},
        )
    if not state["any_finite"]:
        raise OptimizationFailedError("no finite objective value encountered")
    return state["best_theta"]


def optimize_hyperparams(inputs, targets, dims, init: KernelHyperparams,
                         budget: int = 2000) -> KernelHyperparams:
    """Maximize the log marginal likelihood over log-hyperparameters.

    Deterministic given ``init`` and ``budget``; never returns a point worse
    than ``init``.  ``budget`` counts objective evaluations.
    """
    if budget < 1:
        raise InvalidInputError("budget must be >= 1")
    if budget == 1:
        return init

    def objective(theta):
        try:
            return -log_marginal_likelihood(inputs, targets, _hp_from_log(theta), dims)
        except (IllConditionedKernelError, FloatingPointError, ValueError):
            return np.inf

    best = _optimize_log_objective(objective, _hp_to_log(init), budget)
    return _hp_from_log(best)


def optimize_hyperparams_shared(inputs, targets_list, dims, init: KernelHyperparams,
                                budget: int = 2000) -> KernelHyperparams:
    """Single hyperparameter set maximizing the summed evidence over several
    target channels that share one scalar kernel."""
    if budget < 1:
        raise InvalidInputError("budget must be >= 1")
    if budget == 1:
        return init

    def objective(theta):
        try:
            hp = _hp_from_log(theta)
            return -sum(
                log_marginal_likelihood(inputs, t, hp, dims) for t in targets_list
            )
        except (IllConditionedKernelError, FloatingPointError, ValueError):
            return np.inf

    best = _optimize_log_objective(objective, _hp_to_log(init), budget)
    return _hp_from_log(best)


def _stacked_projectors(system: ConstraintSystem, inputs: np.ndarray) -> np.ndarray:
    return np.stack([system.projector(q) for q in inputs])


def nonholonomic_gram(system: ConstraintSystem, inputs: np.ndarray,
                      hp: KernelHyperparams, dims) -> np.ndarray:
    """Block Gram of the projected kernel, assembled with cached projectors.

    Agrees with the generic block-by-block assembly to roundoff.
    """
    n = system.n
    big_n = inputs.shape[0]
    p = _stacked_projectors(system, inputs)
    k = se_ard_kernel_matrix(inputs, inputs, hp, dims)
    blocks = np.einsum("iab,jbc->ijac", p, p) * k[:, :, None, None]
    return blocks.transpose(0, 2, 1, 3).reshape(big_n * n, big_n * n)


class GpModel:
    """Fitted vector-valued GP; immutable after construction."""

    def __init__(self, kind: KernelKind, system: ConstraintSystem, dims,
                 training_inputs, channels=None, alpha=None, chol=None,
                 jitter: float = 0.0, meta: dict | None = None):
        self.kind = kind
        self.system = system
        self.dims = check_active_dims(dims, system.n)
        self.training_inputs = np.atleast_2d(np.asarray(training_inputs, dtype=float))
        self.channels = channels
        self.alpha = alpha
        self.chol = chol
        self.jitter = jitter
        self.meta = dict(meta or {})
        if kind is KernelKind.NONHOLONOMIC_AMBIENT:
            p = _stacked_projectors(system, self.training_inputs)
            a = self.alpha.reshape(len(self.training_inputs), system.n)
            # representer weights P(q_i) alpha_i, one row per training point
            self._weights = np.einsum("iab,ib->ia", p, a)

    @property
    def per_channel_hp(self):
        return [c.hp for c in self.channels] if self.channels else []

    def predict(self, q) -> np.ndarray:
        return self.predict_batch(np.atleast_2d(np.asarray(q, dtype=float)))[0]

    def predict_batch(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        sys = self.system
        if self.kind is KernelKind.STANDARD_AMBIENT:
            return np.column_stack([c.predict(x) for c in self.channels])
        if self.kind is KernelKind.ADAPTED_COORDINATES:
            nu = np.column_stack([c.predict(x) for c in self.channels])
            return np.stack([sys.basis(q) @ v for q, v in zip(x, nu)])
        hp = self.channels[0].hp
        s = se_ard_kernel_matrix(x, self.training_inputs, hp, self.dims) @ self._weights
        return np.stack([sys.projector(q) @ v for q, v in zip(x, s)])

    def predict_blockwise(self, q) -> np.ndarray:
        """Direct block-sum evaluation of the ambient projected-kernel
        predictor; exists to cross-check the factored representer path."""
        if self.kind is not KernelKind.NONHOLONOMIC_AMBIENT:
            raise InvalidInputError("blockwise evaluation is ambient-only")
        q = np.asarray(q, dtype=float)
        hp = self.channels[0].hp
        n = self.system.n
        a = self.alpha.reshape(len(self.training_inputs), n)
        out = np.zeros(n)
        for qi, ai in zip(self.training_inputs, a):
            out += nonholonomic_kernel(q, qi, hp, self.dims, self.system) @ ai
        return out

    def to_dict(self) -> dict:
        doc = {
            "kernel_kind": self.kind.value,
            "system": {"name": self.system.name, "params": self.system.params_dict()},
            "active_dims": list(self.dims),
            "training_inputs": self.training_inputs.tolist(),
            "meta": self.meta,
        }
        if self.kind is KernelKind.NONHOLONOMIC_AMBIENT:
            hp = self.channels[0].hp
            doc["channels"] = [{
                "signal_variance": hp.signal_variance,
                "length_scales": list(hp.length_scales),
                "noise_variance": hp.noise_variance,
                "dual_coefficients": self.alpha.tolist(),
            }]
        else:
            doc["channels"] = [{
                "signal_variance": c.hp.signal_variance,
                "length_scales": list(c.hp.length_scales),
                "noise_variance": c.hp.noise_variance,
                "dual_coefficients": c.alpha.tolist(),
            } for c in self.channels]
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "GpModel":
        kind = KernelKind(doc["kernel_kind"])
        system = make_system(doc["system"]["name"], doc["system"]["params"])
        inputs = np.asarray(doc["training_inputs"], dtype=float)
        dims = tuple(doc["active_dims"])
        channels = []
        for ch in doc["channels"]:
            hp = KernelHyperparams(
                signal_variance=ch["signal_variance"],
                length_scales=tuple(ch["length_scales"]),
                noise_variance=ch["noise_variance"],
            )
            channels.append(ScalarGpChannel(
                inputs, hp, dims, np.asarray(ch["dual_coefficients"], dtype=float)
            ))
        alpha = None
        if kind is KernelKind.NONHOLONOMIC_AMBIENT:
            alpha = channels[0].alpha
        return cls(kind, system, dims, inputs, channels=channels, alpha=alpha,
                   meta=doc.get("meta", {}))


def save_model(model: GpModel, path) -> None:
    with open(path, "w") as fh:
        json.dump(model.to_dict(), fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_model(path) -> GpModel:
    with open(path) as fh:
        return GpModel.from_dict(json.load(fh))


def adapted_targets(system: ConstraintSystem, inputs: np.ndarray,
                    outputs: np.ndarray) -> np.ndarray:
    """Map ambient observations to adapted velocities via the basis left
    inverse at each input."""
    return np.stack([
        system.adapted_pseudoinverse(q) @ y for q, y in zip(inputs, outputs)
    ])


def fit_vector_gp(data: Dataset, kernel_kind: KernelKind,
                  system: ConstraintSystem, hp_per_channel,
                  dims=None, meta: dict | None = None) -> GpModel:
    """Fit a vector-valued GP with fixed hyperparameters.

    ``hp_per_channel``: one entry per ambient output (standard), per adapted
    velocity component (adapted), or a single entry (ambient projected
    kernel).
    """
    dims = check_active_dims(
        system.angular_indices if dims is None else dims, system.n
    )
    inputs, outputs = data.inputs, data.outputs
    if kernel_kind is KernelKind.STANDARD_AMBIENT:
        if len(hp_per_channel) != system.n:
            raise InvalidInputError("need one hyperparameter set per output")
        channels = [
            fit_scalar_channel(inputs, outputs[:, c], hp_per_channel[c], dims)
            for c in range(system.n)
        ]
        return GpModel(kernel_kind, system, dims, inputs, channels=channels, meta=meta)
    if kernel_kind is KernelKind.ADAPTED_COORDINATES:
        nu = adapted_targets(system, inputs, outputs)
        m = system.n - system.k
        if len(hp_per_channel) != m:
            raise InvalidInputError("need one hyperparameter set per adapted channel")
        channels = [
            fit_scalar_channel(inputs, nu[:, c], hp_per_channel[c], dims)
            for c in range(m)
        ]
        return GpModel(kernel_kind, system, dims, inputs, channels=channels, meta=meta)
    hp = hp_per_channel[0]
    gram = nonholonomic_gram(system, inputs, hp, dims)
    l, jitter = _cholesky_with_jitter(gram, hp.noise_variance)
    alpha = scipy.linalg.cho_solve((l, True), outputs.reshape(-1))
    channel = ScalarGpChannel(inputs, hp, dims, alpha, l, jitter)
    return GpModel(kernel_kind, system, dims, inputs, channels=[channel],
                   alpha=alpha, chol=l, jitter=jitter, meta=meta)


def default_init_hyperparams(inputs, targets, dims) -> KernelHyperparams:
    """Heuristic starting point: signal variance from the target spread,
    length scales from half the input range, small relative noise."""
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    targets = np.asarray(targets, dtype=float)
    var = max(float(np.var(targets)), 1e-6)
    scales = []
    for d in dims:
        span = float(np.ptp(inputs[:, d]))
        scales.append(max(0.5 * span, 1e-3))
    return KernelHyperparams(
        signal_variance=var,
        length_scales=tuple(scales),
        noise_variance=0.01 * var,
    )


def train_model(data: Dataset, kernel_kind: KernelKind,
                system: ConstraintSystem, dims=None, budget: int = 2000,
                init_per_channel=None, meta: dict | None = None) -> GpModel:
    """Optimize hyperparameters per channel, then fit."""
    dims = check_active_dims(
        system.angular_indices if dims is None else dims, system.n
    )
    inputs = data.inputs
    if kernel_kind is KernelKind.STANDARD_AMBIENT:
        targets = [data.outputs[:, c] for c in range(system.n)]
    else:
        nu = adapted_targets(system, inputs, data.outputs)
        targets = [nu[:, c] for c in range(system.n - system.k)]
    inits = init_per_channel or [
        default_init_hyperparams(inputs, t, dims) for t in targets
    ]
    if kernel_kind is KernelKind.NONHOLONOMIC_AMBIENT:
        hp = optimize_hyperparams_shared(inputs, targets, dims, inits[0], budget)
        hps = [hp]
    else:
        hps = [
            optimize_hyperparams(inputs, t, dims, h, budget)
            for t, h in zip(targets, inits)
        ]
    return fit_vector_gp(data, kernel_kind, system, hps, dims=dims, meta=meta)
