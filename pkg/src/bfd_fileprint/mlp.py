"""Feed-forward multilayer perceptron trained by backpropagation.

One implementation serves both the five-layer auto-associative
compressor and the three-layer classifier. The loss is the plain sum of
squared output errors, with no 1/2 factor.
"""

from dataclasses import dataclass, field

import numpy as np

from bfd_fileprint.config import TrainingConfig
from bfd_fileprint.errors import BadArchitecture, DimensionMismatch, NonFiniteLoss, OutOfRange
from bfd_fileprint.mappings import ACTIVATIONS


@dataclass(frozen=True)
class LayerSpec:
    size: int
    activation: str = "linear"    # ignored for the input layer

    def __post_init__(self):
        if self.size < 1:
            raise BadArchitecture(f"Layer size must be >= 1, got {self.size}")
        if self.activation not in ACTIVATIONS:
            raise BadArchitecture(f"Unknown activation '{self.activation}', expected one of {ACTIVATIONS}")


@dataclass
class MlpNetwork:
    """Weights are stored fan_out x fan_in; weights[l] feeds layers[l + 1]."""

    layers: tuple[LayerSpec, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def __post_init__(self):
        self.layers = tuple(self.layers)
        if len(self.layers) < 2:
            raise BadArchitecture(f"A network needs at least 2 layers, got {len(self.layers)}")
        if len(self.weights) != len(self.layers) - 1 or len(self.biases) != len(self.layers) - 1:
            raise BadArchitecture("Need one weight matrix and bias vector per connection layer")
        self.weights = [np.asarray(w, dtype=np.float64) for w in self.weights]
        self.biases = [np.asarray(b, dtype=np.float64) for b in self.biases]
        for l, (w, b) in enumerate(zip(self.weights, self.biases)):
            expected = (self.layers[l + 1].size, self.layers[l].size)
            if w.shape != expected:
                raise DimensionMismatch(f"Weight matrix {l} has shape {w.shape}, expected {expected}")
            if b.shape != (expected[0],):
                raise DimensionMismatch(f"Bias vector {l} has shape {b.shape}, expected ({expected[0]},)")

    @property
    def input_size(self) -> int:
        return self.layers[0].size

    @property
    def output_size(self) -> int:
        return self.layers[-1].size

    def copy(self) -> "MlpNetwork":
        return MlpNetwork(
            self.layers,
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
        )

    def is_finite(self) -> bool:
        return all(np.isfinite(w).all() for w in self.weights) and all(np.isfinite(b).all() for b in self.biases)


@dataclass
class Gradients:
    weights: list[np.ndarray]
    biases: list[np.ndarray]


@dataclass
class TrainingReport:
    epochs_run: int
    final_mse: float
    initial_mse: float
    mse_history: list[float] = field(default_factory=list)
    perturbations_applied: int = 0


def _activate(name: str, z: np.ndarray) -> np.ndarray:
    if name == "tanh":
        return np.tanh(z)
    if name == "logistic":
        return 1.0 / (1.0 + np.exp(-np.clip(z, -500.0, 500.0)))
    return z


def _derivative_from_output(name: str, a: np.ndarray) -> np.ndarray:
    """Activation derivative expressed through the activation value."""
    if name == "tanh":
        return 1.0 - a * a
    if name == "logistic":
        return a * (1.0 - a)
    return np.ones_like(a)


def init_network(specs: list[LayerSpec], seed: int) -> MlpNetwork:
    """Uniform weights in [-1/sqrt(fan_in), 1/sqrt(fan_in)], zero biases."""
    specs = tuple(specs)
    if len(specs) < 2:
        raise BadArchitecture(f"A network needs at least 2 layers, got {len(specs)}")
    rng = np.random.default_rng(seed)
    weights = []
    biases = []
    for fan_in_layer, fan_out_layer in zip(specs[:-1], specs[1:]):
        bound = 1.0 / np.sqrt(fan_in_layer.size)
        weights.append(rng.uniform(-bound, bound, size=(fan_out_layer.size, fan_in_layer.size)))
        biases.append(np.zeros(fan_out_layer.size))
    return MlpNetwork(specs, weights, biases)


def forward(net: MlpNetwork, x) -> list[np.ndarray]:
    """Per-layer activations; activation[0] is the input.

    Accepts a single vector or a matrix whose rows are samples.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim not in (1, 2) or x.shape[-1] != net.input_size:
        raise DimensionMismatch(f"Input of shape {x.shape} does not fit input layer of size {net.input_size}")
    activations = [x]
    for w, b, spec in zip(net.weights, net.biases, net.layers[1:]):
        activations.append(_activate(spec.activation, activations[-1] @ w.T + b))
    return activations


def loss(output, target) -> float:
    """Sum of squared component differences."""
    output = np.asarray(output, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if output.shape != target.shape:
        raise DimensionMismatch(f"Output shape {output.shape} differs from target shape {target.shape}")
    diff = output - target
    return float(np.sum(diff * diff))


def backprop_gradients(net: MlpNetwork, x, target) -> Gradients:
    """Exact gradients of loss(forward(x), target) for one sample."""
    target = np.asarray(target, dtype=np.float64)
    activations = forward(net, x)
    if activations[0].ndim != 1:
        raise DimensionMismatch("backprop_gradients takes a single sample")
    if target.shape != (net.output_size,):
        raise DimensionMismatch(f"Target of shape {target.shape} does not fit output layer of size {net.output_size}")

    n_conn = len(net.weights)
    grad_w: list[np.ndarray] = [None] * n_conn
    grad_b: list[np.ndarray] = [None] * n_conn
    out = activations[-1]
    delta = 2.0 * (out - target) * _derivative_from_output(net.layers[-1].activation, out)
    for l in range(n_conn - 1, -1, -1):
        grad_w[l] = np.outer(delta, activations[l])
        grad_b[l] = delta
        if l > 0:
            delta = (net.weights[l].T @ delta) * _derivative_from_output(net.layers[l].activation, activations[l])
    return Gradients(grad_w, grad_b)


def mean_squared_error(net: MlpNetwork, inputs: np.ndarray, targets: np.ndarray) -> float:
    """Per-sample loss averaged over all rows."""
    diff = forward(net, inputs)[-1] - targets
    return float(np.mean(np.sum(diff * diff, axis=1)))


def _check_training_data(net: MlpNetwork, inputs, targets) -> tuple[np.ndarray, np.ndarray]:
    inputs = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
    targets = np.atleast_2d(np.asarray(targets, dtype=np.float64))
    if inputs.shape[0] != targets.shape[0]:
        raise DimensionMismatch(f"{inputs.shape[0]} input rows but {targets.shape[0]} target rows")
    if inputs.shape[0] == 0:
        raise DimensionMismatch("Training data has no rows")
    if inputs.shape[1] != net.input_size:
        raise DimensionMismatch(f"Inputs have {inputs.shape[1]} columns, network expects {net.input_size}")
    if targets.shape[1] != net.output_size:
        raise DimensionMismatch(f"Targets have {targets.shape[1]} columns, network outputs {net.output_size}")
    return inputs, targets


def train(net: MlpNetwork, inputs, targets, config: TrainingConfig | None = None) -> TrainingReport:
    """Per-sample gradient descent with momentum, in place on `net`.

    The initial network is evaluated first; if it already meets
    mse_goal nothing is updated. Otherwise every epoch is one pass over
    the rows in their given order followed by an evaluation. When the
    relative MSE improvement over plateau_window epochs falls below
    plateau_rel_improvement, seeded uniform noise of perturb_magnitude is
    added to every weight matrix.

    Raises:
        NonFiniteLoss: when the epoch MSE stops being finite.
    """
    config = config or TrainingConfig()
    inputs, targets = _check_training_data(net, inputs, targets)
    rng = np.random.default_rng(config.seed)

    initial_mse = mean_squared_error(net, inputs, targets)
    if not np.isfinite(initial_mse):
        raise NonFiniteLoss("Initial MSE is not finite")
    history = [initial_mse]
    report = TrainingReport(epochs_run=1, final_mse=initial_mse, initial_mse=initial_mse, mse_history=history)
    if initial_mse <= config.mse_goal:
        return report

    history.clear()
    vel_w = [np.zeros_like(w) for w in net.weights]
    vel_b = [np.zeros_like(b) for b in net.biases]
    last_perturbation = 0
    lr = config.learning_rate
    mu = config.momentum

    for epoch in range(1, config.max_epochs + 1):
        for x, t in zip(inputs, targets):
            grads = backprop_gradients(net, x, t)
            for l in range(len(net.weights)):
                vel_w[l] = mu * vel_w[l] - lr * grads.weights[l]
                vel_b[l] = mu * vel_b[l] - lr * grads.biases[l]
                net.weights[l] += vel_w[l]
                net.biases[l] += vel_b[l]

        mse = mean_squared_error(net, inputs, targets)
        if not np.isfinite(mse):
            raise NonFiniteLoss(f"MSE became non-finite at epoch {epoch}; the learning rate {lr} diverges")
        history.append(mse)
        if mse <= config.mse_goal:
            break

        window = config.plateau_window
        if config.perturb_magnitude > 0 and len(history) > window and epoch - last_perturbation >= window:
            previous = history[-1 - window]
            improvement = (previous - mse) / max(abs(previous), np.finfo(float).tiny)
            if improvement < config.plateau_rel_improvement:
                for w in net.weights:
                    w += rng.uniform(-config.perturb_magnitude, config.perturb_magnitude, size=w.shape)
                report.perturbations_applied += 1
                last_perturbation = epoch

    report.epochs_run = len(history)
    report.final_mse = history[-1]
    return report


def encode(net: MlpNetwork, x, bottleneck_layer: int) -> np.ndarray:
    """Activation of the designated layer (0 = input)."""
    if not 0 <= bottleneck_layer < len(net.layers):
        raise OutOfRange(f"Layer index {bottleneck_layer} outside [0, {len(net.layers) - 1}]")
    return forward(net, x)[bottleneck_layer]


def truncate(net: MlpNetwork, last_layer: int) -> MlpNetwork:
    """Sub-network from the input through `last_layer` (an encoder)."""
    if not 1 <= last_layer < len(net.layers):
        raise OutOfRange(f"Layer index {last_layer} outside [1, {len(net.layers) - 1}]")
    return MlpNetwork(
        net.layers[: last_layer + 1],
        [w.copy() for w in net.weights[:last_layer]],
        [b.copy() for b in net.biases[:last_layer]],
    )
