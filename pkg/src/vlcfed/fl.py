"""Federated regression training: a 13-10-1 network trained with FedAvg.

Each participant runs full-batch gradient descent on its shard against the
mean squared error J_n = (1/D_n) * sum_i 0.5 * (pred_i - y_i)^2, then the
server averages parameters weighted by shard size. Inputs and targets are
standardized with statistics of the training partition only; the accuracy
metric (coefficient of determination) is computed on the original target
scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import SimConfig
from .dataset import DataShard

N_INPUTS = 13
N_HIDDEN = 10


class NoParticipantsError(ValueError):
    """Training was requested for an empty selection."""


class UndefinedMetricError(ValueError):
    """R^2 is undefined when the ground truth is constant."""


@dataclass
class MlpModel:
    w1: np.ndarray  # (13, 10)
    b1: np.ndarray  # (10,)
    w2: np.ndarray  # (10, 1)
    b2: np.ndarray  # (1,)

    @classmethod
    def init_random(cls, seed: int, scale: float = 0.5) -> "MlpModel":
        rng = np.random.default_rng(seed)
        return cls(
            w1=rng.uniform(-scale, scale, size=(N_INPUTS, N_HIDDEN)),
            b1=rng.uniform(-scale, scale, size=N_HIDDEN),
            w2=rng.uniform(-scale, scale, size=(N_HIDDEN, 1)),
            b2=rng.uniform(-scale, scale, size=1),
        )

    @classmethod
    def zeros(cls) -> "MlpModel":
        return cls(
            w1=np.zeros((N_INPUTS, N_HIDDEN)),
            b1=np.zeros(N_HIDDEN),
            w2=np.zeros((N_HIDDEN, 1)),
            b2=np.zeros(1),
        )

    def params(self) -> tuple[np.ndarray, ...]:
        return (self.w1, self.b1, self.w2, self.b2)

    def copy(self) -> "MlpModel":
        return MlpModel(self.w1.copy(), self.b1.copy(), self.w2.copy(), self.b2.copy())


def _sigmoid(z: np.ndarray) -> np.ndarray:
    # Split by sign to stay overflow-free for large |z|.
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def forward(model: MlpModel, x) -> float:
    """Prediction for a single 13-feature input."""
    return float(forward_batch(model, np.asarray(x, dtype=float)[None, :])[0])


def forward_batch(model: MlpModel, x: np.ndarray) -> np.ndarray:
    """Predictions for an (n, 13) batch; sigmoid hidden layer, linear output."""
    hidden = _sigmoid(x @ model.w1 + model.b1)
    return (hidden @ model.w2)[:, 0] + model.b2[0]


def mse_loss(model: MlpModel, x: np.ndarray, y: np.ndarray) -> float:
    """(1/n) * sum of squared-error halves over the batch."""
    err = forward_batch(model, x) - y
    return float(0.5 * np.mean(err * err))


def loss_gradients(model: MlpModel, x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, ...]:
    """Analytic gradients of mse_loss w.r.t. (w1, b1, w2, b2)."""
    n = x.shape[0]
    hidden = _sigmoid(x @ model.w1 + model.b1)
    pred = (hidden @ model.w2)[:, 0] + model.b2[0]
    err = (pred - y) / n                       # dJ/dpred_i
    gw2 = (hidden.T @ err)[:, None]
    gb2 = np.array([err.sum()])
    dhidden = np.outer(err, model.w2[:, 0])
    dz = dhidden * hidden * (1.0 - hidden)     # sigmoid derivative
    gw1 = x.T @ dz
    gb1 = dz.sum(axis=0)
    return gw1, gb1, gw2, gb2


def local_train(model: MlpModel, shard: DataShard, epochs: int, lr: float) -> MlpModel:
    """Full-batch gradient descent on one shard; returns a new model."""
    if shard.size == 0:
        raise ValueError(f"user {shard.owner}: cannot train on an empty shard")
    if lr < 0:
        raise ValueError(f"learning rate must be >= 0, got {lr!r}")
    out = model.copy()
    for _ in range(epochs):
        gw1, gb1, gw2, gb2 = loss_gradients(out, shard.x, shard.y)
        out.w1 -= lr * gw1
        out.b1 -= lr * gb1
        out.w2 -= lr * gw2
        out.b2 -= lr * gb2
    return out


def aggregate(models: list[MlpModel], shard_sizes: list[int]) -> MlpModel:
    """Parameter-wise average weighted by shard size."""
    if not models:
        raise ValueError("nothing to aggregate")
    if len(models) != len(shard_sizes):
        raise ValueError(
            f"got {len(models)} models but {len(shard_sizes)} shard sizes"
        )
    total = float(sum(shard_sizes))
    if total <= 0:
        raise ValueError("total sample count must be > 0")
    out = MlpModel.zeros()
    for model, size in zip(models, shard_sizes):
        w = size / total
        out.w1 += w * model.w1
        out.b1 += w * model.b1
        out.w2 += w * model.w2
        out.b2 += w * model.b2
    return out


def r_squared(predictions, truth) -> float:
    """Coefficient of determination, 1 - SS_res / SS_tot."""
    pred = np.asarray(predictions, dtype=float)
    y = np.asarray(truth, dtype=float)
    if pred.shape != y.shape or y.size == 0:
        raise ValueError("predictions and truth must be equal-length and non-empty")
    if np.all(y == y[0]):
        raise UndefinedMetricError("R^2 is undefined for a constant ground truth")
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    return 1.0 - ss_res / ss_tot


def required_global_rounds(local_accuracy: float) -> int:
    """Iteration-budget bookkeeping: ceil(1 / (1 - local_accuracy))."""
    if not 0.0 < local_accuracy < 1.0:
        raise ValueError(f"local_accuracy must lie in (0, 1), got {local_accuracy!r}")
    q = 1.0 / (1.0 - local_accuracy)
    return int(math.ceil(q - 1e-9))  # absorb float noise so 1/0.1 stays 10


@dataclass(frozen=True)
class Standardizer:
    x_mean: np.ndarray
    x_std: np.ndarray
    y_mean: float
    y_std: float

    @classmethod
    def fit(cls, x: np.ndarray, y: np.ndarray) -> "Standardizer":
        x_std = x.std(axis=0)
        x_std = np.where(x_std > 0, x_std, 1.0)  # constant features pass through
        y_std = float(y.std())
        return cls(x.mean(axis=0), x_std, float(y.mean()), y_std if y_std > 0 else 1.0)

    def transform_x(self, x: np.ndarray) -> np.ndarray:
        return (x - self.x_mean) / self.x_std

    def transform_y(self, y: np.ndarray) -> np.ndarray:
        return (y - self.y_mean) / self.y_std

    def inverse_y(self, y: np.ndarray) -> np.ndarray:
        return y * self.y_std + self.y_mean


@dataclass
class TrainingReport:
    r2_per_round: list[float] = field(default_factory=list)
    loss_per_round: list[float] = field(default_factory=list)

    @property
    def final_r2(self) -> float:
        return self.r2_per_round[-1] if self.r2_per_round else float("nan")


def run_federated_training(
    selection,
    shards: list[DataShard],
    test_set,
    config: SimConfig,
    seed: int,
) -> TrainingReport:
    """Train the global model over the selected users' shards.

    Standardization statistics come from the union of all shards (they are
    the training partition and are identical across selection variants, which
    keeps paired comparisons on one seed apples-to-apples). The recorded
    loss is the shard-size-weighted training loss; the recorded metric is
    test R^2 on the raw target scale.
    """
    participants = sorted(selection.all_ids)
    if not participants:
        raise NoParticipantsError("no users selected for training")
    by_owner = {s.owner: s for s in shards}
    missing = [n for n in participants if n not in by_owner]
    if missing:
        raise ValueError(f"no shard for selected users {missing}")

    scaler = Standardizer.fit(
        np.concatenate([s.x for s in shards], axis=0),
        np.concatenate([s.y for s in shards]),
    )
    local_shards = [
        DataShard(
            owner=n,
            x=scaler.transform_x(by_owner[n].x),
            y=scaler.transform_y(by_owner[n].y),
        )
        for n in participants
    ]
    sizes = [s.size for s in local_shards]
    train_x = np.concatenate([s.x for s in local_shards], axis=0)
    train_y = np.concatenate([s.y for s in local_shards])
    test_x = scaler.transform_x(test_set.features)
    test_y = test_set.targets

    model = MlpModel.init_random(seed)
    report = TrainingReport()
    for _ in range(config.global_rounds):
        locals_ = [
            local_train(model, shard, config.local_epochs, config.learning_rate)
            for shard in local_shards
        ]
        model = aggregate(locals_, sizes)
        report.loss_per_round.append(mse_loss(model, train_x, train_y))
        pred = scaler.inverse_y(forward_batch(model, test_x))
        report.r2_per_round.append(r_squared(pred, test_y))
    return report
