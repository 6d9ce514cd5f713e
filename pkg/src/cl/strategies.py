"""
Strategies Module
=================

Continual-learning strategies over the ``nn`` model: Baseline, LWF, EWC,
CLeaR and DER. A strategy owns its state across tasks and plugs into
``nn.train_task`` through four hooks:

* ``begin_task``  - called before the first epoch of a task
* ``train_epoch`` - one pass over the task's training split
* ``loss_terms``  - the composite objective for one mini-batch
* ``on_task_end`` - consolidation once the task's best model is known
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple, Type

import numpy as np

from ..nn import (
    Dataset,
    Model,
    TermList,
    TrainConfig,
    apply_gradients,
    backward,
    evaluate_mse,
    forward_batch,
    loss_value,
    predict,
)
from .fisher import fisher_diagonal
from .hyperparams import Hyperparams
from .losses import (
    Anchor,
    baseline_terms,
    der_terms,
    ewc_terms,
    lwf_terms,
    quadratic_penalty,
)
from .reservoir import ReservoirBuffer


def _anchor_to_dict(anchor: Anchor) -> Dict[str, List[float]]:
    return {'theta': anchor[0].tolist(), 'importance': anchor[1].tolist()}


def _anchor_from_dict(data: Dict[str, List[float]]) -> Anchor:
    return np.array(data['theta'], dtype=float), np.array(data['importance'], dtype=float)


class BaselineStrategy:
    """Plain MSE on the current task; no protection against forgetting."""

    name = 'baseline'

    def __init__(self, hyper: Optional[Hyperparams] = None):
        self.hyper = hyper or Hyperparams()
        self.tasks_seen = 0

    # -- hooks ---------------------------------------------------------

    def begin_task(self, model: Model, train_set: Dataset, val_set: Dataset) -> None:
        pass

    def loss_terms(self, model: Model, X: np.ndarray, y: np.ndarray,
                   rng: np.random.Generator) -> TermList:
        return baseline_terms(X, y)

    def observe_batch(self, model: Model, X: np.ndarray, y: np.ndarray,
                      rng: np.random.Generator) -> None:
        """Called on every batch of a task's first epoch, before the update."""

    def train_epoch(self, model: Model, train_set: Dataset, config: TrainConfig,
                    rng: np.random.Generator, epoch: int) -> float:
        """Shuffled mini-batch gradient descent; returns the mean batch loss."""
        order = rng.permutation(len(train_set))
        losses = []
        for start in range(0, len(order), config.batch_size):
            index = np.sort(order[start:start + config.batch_size])
            X, y = train_set.X[index], train_set.y[index]
            if epoch == 1:
                self.observe_batch(model, X, y, rng)
            terms = self.loss_terms(model, X, y, rng)
            losses.append(loss_value(model, terms))
            apply_gradients(model, backward(model, terms), config.learning_rate)
        return float(np.mean(losses))

    def on_task_end(self, model: Model, train_set: Dataset) -> None:
        self.tasks_seen += 1

    # -- persistence ---------------------------------------------------

    def state_dict(self) -> Dict[str, Any]:
        return {'tasks_seen': self.tasks_seen}

    def load_state_dict(self, state: Dict[str, Any]) -> None:
        self.tasks_seen = int(state.get('tasks_seen', 0))


class LwfStrategy(BaselineStrategy):
    """Learning without forgetting: distill every frozen past model on current inputs."""

    name = 'lwf'

    def __init__(self, hyper: Optional[Hyperparams] = None):
        super().__init__(hyper)
        self.snapshots: List[Model] = []

    def loss_terms(self, model, X, y, rng):
        return lwf_terms(X, y, self.snapshots, self.hyper.lwf_lambda)

    def on_task_end(self, model, train_set):
        super().on_task_end(model, train_set)
        if self.hyper.lwf_previous_only:
            self.snapshots = []
        self.snapshots.append(model.copy())

    def state_dict(self):
        state = super().state_dict()
        state['snapshots'] = [m.flatten().tolist() for m in self.snapshots]
        return state

    def load_state_dict(self, state):
        super().load_state_dict(state)
        template = Model.zeros()
        self.snapshots = [template.with_flat(np.array(flat)) for flat in state.get('snapshots', [])]


class EwcStrategy(BaselineStrategy):
    """Elastic weight consolidation with one anchor per completed task."""

    name = 'ewc'

    def __init__(self, hyper: Optional[Hyperparams] = None):
        super().__init__(hyper)
        self.anchors: List[Anchor] = []

    def loss_terms(self, model, X, y, rng):
        return ewc_terms(X, y, self.anchors, self.hyper.ewc_lambda)

    def on_task_end(self, model, train_set):
        super().on_task_end(model, train_set)
        theta = model.flatten()
        theta.flags.writeable = False
        importance = fisher_diagonal(model, train_set)
        importance.flags.writeable = False
        self.anchors.append((theta, importance))

    def state_dict(self):
        state = super().state_dict()
        state['anchors'] = [_anchor_to_dict(a) for a in self.anchors]
        return state

    def load_state_dict(self, state):
        super().load_state_dict(state)
        self.anchors = [_anchor_from_dict(a) for a in state.get('anchors', [])]


@dataclass
class ClearState:
    anchor: Optional[Anchor] = None
    mse_min: Optional[float] = None
    threshold: Optional[float] = None
    novelty: List[Tuple[np.ndarray, float]] = field(default_factory=list)
    familiarity: List[Tuple[np.ndarray, float]] = field(default_factory=list)
    flushes: int = 0
    retrains: int = 0
    mse_min_history: List[float] = field(default_factory=list)

    @property
    def buffered(self) -> int:
        return len(self.novelty) + len(self.familiarity)


class ClearStrategy(BaselineStrategy):
    """
    CLeaR: samples are routed by their loss into a novelty buffer (loss above
    alpha * mse_min) or a familiarity buffer. A full buffer pauses training,
    retrains on the novel samples and lowers mse_min from the familiar ones.
    The loss carries an EWC penalty anchored at the most recent task only.
    """

    name = 'clear'

    def __init__(self, hyper: Optional[Hyperparams] = None):
        super().__init__(hyper)
        self.state = ClearState()

    def _anchors(self) -> List[Anchor]:
        return [self.state.anchor] if self.state.anchor is not None else []

    def loss_terms(self, model, X, y, rng):
        return ewc_terms(X, y, self._anchors(), self.hyper.clear_lambda)

    def sample_loss(self, model: Model, x: np.ndarray, y: float) -> float:
        pred = forward_batch(model, x[None, :])[0][0]
        penalty = quadratic_penalty(model.flatten(), self._anchors(), self.hyper.clear_lambda)
        return float(np.square(pred - y) + penalty)

    def set_mse_min(self, value: float) -> None:
        self.state.mse_min = float(value)
        self.state.threshold = self.hyper.clear_alpha * self.state.mse_min
        self.state.mse_min_history.append(self.state.mse_min)

    def begin_task(self, model, train_set, val_set):
        self.state.novelty = []
        self.state.familiarity = []
        if self.state.mse_min is None:
            self.set_mse_min(evaluate_mse(model, val_set))

    def clear_step(self, model: Model, x: np.ndarray, y: float, config: TrainConfig,
                   rng: np.random.Generator) -> ClearState:
        """Route one sample and flush the buffers when they reach the limit."""
        state = self.state
        loss = self.sample_loss(model, x, y)
        # ties stay familiar
        if loss > state.threshold:
            state.novelty.append((x, y))
        else:
            state.familiarity.append((x, y))
        if state.buffered >= self.hyper.clear_buffer:
            self._flush(model, config, rng)
        return state

    def _flush(self, model: Model, config: TrainConfig, rng: np.random.Generator) -> None:
        state = self.state
        state.flushes += 1
        if state.novelty:
            state.retrains += 1
            self.retrain(model, Dataset(np.array([s[0] for s in state.novelty]),
                                        np.array([s[1] for s in state.novelty])), config, rng)
        if state.familiarity:
            lowest = min(self.sample_loss(model, x, y) for x, y in state.familiarity)
            if lowest < state.mse_min:
                self.set_mse_min(lowest)
        state.novelty = []
        state.familiarity = []

    def retrain(self, model: Model, novel: Dataset, config: TrainConfig,
                rng: np.random.Generator) -> None:
        epochs = min(self.hyper.clear_retrain_epochs, config.epochs)
        for _ in range(epochs):
            BaselineStrategy.train_epoch(self, model, novel, config, rng, epoch=2)

    def train_epoch(self, model, train_set, config, rng, epoch):
        """Route each batch through the buffers, then take the usual SGD step.

        A flush inside ``clear_step`` pauses the task for a novelty retrain;
        the batch update resumes from the retrained weights.
        """
        order = rng.permutation(len(train_set))
        losses = []
        for start in range(0, len(order), config.batch_size):
            index = np.sort(order[start:start + config.batch_size])
            X, y = train_set.X[index], train_set.y[index]
            for x_i, y_i in zip(X, y):
                self.clear_step(model, x_i, float(y_i), config, rng)
            terms = self.loss_terms(model, X, y, rng)
            losses.append(loss_value(model, terms))
            apply_gradients(model, backward(model, terms), config.learning_rate)
        return float(np.mean(losses))

    def on_task_end(self, model, train_set):
        super().on_task_end(model, train_set)
        self.state.anchor = (model.flatten(), fisher_diagonal(model, train_set))

    def state_dict(self):
        state = super().state_dict()
        s = self.state
        state.update({
            'anchor': _anchor_to_dict(s.anchor) if s.anchor is not None else None,
            'mse_min': s.mse_min,
            'threshold': s.threshold,
            'flushes': s.flushes,
            'retrains': s.retrains,
            'mse_min_history': list(s.mse_min_history),
            'novelty': [{'x': x.tolist(), 'y': y} for x, y in s.novelty],
            'familiarity': [{'x': x.tolist(), 'y': y} for x, y in s.familiarity],
        })
        return state

    def load_state_dict(self, state):
        super().load_state_dict(state)
        self.state = ClearState(
            anchor=_anchor_from_dict(state['anchor']) if state.get('anchor') else None,
            mse_min=state.get('mse_min'),
            threshold=state.get('threshold'),
            flushes=int(state.get('flushes', 0)),
            retrains=int(state.get('retrains', 0)),
            mse_min_history=list(state.get('mse_min_history', [])),
            novelty=[(np.array(s['x']), float(s['y'])) for s in state.get('novelty', [])],
            familiarity=[(np.array(s['x']), float(s['y'])) for s in state.get('familiarity', [])],
        )


class DerStrategy(BaselineStrategy):
    """Dark experience replay with a reservoir of (x, y, raw output) triples."""

    name = 'der'

    def __init__(self, hyper: Optional[Hyperparams] = None):
        super().__init__(hyper)
        self.buffer = ReservoirBuffer(self.hyper.der_buffer)
        self.replay_size = 128

    def update_buffer(self, x: np.ndarray, y: float, raw_output: float,
                      rng: np.random.Generator) -> ReservoirBuffer:
        self.buffer.add(x, y, raw_output, rng)
        return self.buffer

    def observe_batch(self, model, X, y, rng):
        raw = predict(model, X)
        for xi, yi, zi in zip(X, y, raw):
            self.update_buffer(xi, float(yi), float(zi), rng)

    def loss_terms(self, model, X, y, rng):
        if len(self.buffer) == 0:
            return der_terms(X, y, None, None, self.hyper.der_alpha, self.hyper.der_beta)
        size = min(self.replay_size, len(X))
        X1, _, z1 = self.buffer.sample(size, rng)
        X2, y2, _ = self.buffer.sample(size, rng)
        return der_terms(X, y, (X1, z1), (X2, y2), self.hyper.der_alpha, self.hyper.der_beta)

    def state_dict(self):
        state = super().state_dict()
        state['buffer'] = self.buffer.state_dict()
        return state

    def load_state_dict(self, state):
        super().load_state_dict(state)
        if 'buffer' in state:
            self.buffer = ReservoirBuffer.from_state(state['buffer'])


STRATEGIES: Dict[str, Type[BaselineStrategy]] = {
    'baseline': BaselineStrategy,
    'lwf': LwfStrategy,
    'ewc': EwcStrategy,
    'clear': ClearStrategy,
    'der': DerStrategy,
}


def create_strategy(name: str, hyper: Optional[Hyperparams] = None) -> BaselineStrategy:
    """Instantiate a strategy by its registry name."""
    try:
        cls = STRATEGIES[name]
    except KeyError:
        raise ValueError(f"Unknown strategy '{name}'. Choose one of: {', '.join(STRATEGIES)}")
    return cls(hyper)
