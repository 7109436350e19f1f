"""Fixed-architecture multilayer perceptron with manual backpropagation.

Every learned object in the package (bounded score nets, softmax policy nets,
nuisance regressions, linear-logistic propensities) is an instance of the same
family: dense layers with ReLU hidden activations and one of three output
heads (scalar tanh, row-wise softmax, or raw affine). Parameters live in a
single flat float64 vector laid out layer by layer, weights before biases,
row-major, so gradients, optimizers, and samplers can treat the model as a
plain vector function.

All functions here are pure: they never mutate their inputs and are safe to
call concurrently on shared arrays.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

HEAD_TANH = "tanh"
HEAD_SOFTMAX = "softmax"
HEAD_IDENTITY = "identity"

_HEADS = (HEAD_TANH, HEAD_SOFTMAX, HEAD_IDENTITY)


@dataclass(frozen=True)
class MlpArchitecture:
    """Shape descriptor for the MLP family.

    ``head`` is one of ``"tanh"`` (requires output_dim 1), ``"softmax"``
    (requires output_dim >= 2), or ``"identity"``.
    """

    input_dim: int
    hidden_dims: tuple[int, ...] = (128, 128)
    output_dim: int = 1
    head: str = HEAD_TANH

    def __post_init__(self):
        object.__setattr__(self, "hidden_dims", tuple(int(h) for h in self.hidden_dims))
        if self.input_dim < 1 or self.output_dim < 1:
            raise ValueError("input_dim and output_dim must be positive")
        if any(h < 1 for h in self.hidden_dims):
            raise ValueError("hidden widths must be positive")
        if self.head not in _HEADS:
            raise ValueError(f"unknown head {self.head!r}")
        if self.head == HEAD_TANH and self.output_dim != 1:
            raise ValueError("tanh head requires output_dim = 1")
        if self.head == HEAD_SOFTMAX and self.output_dim < 2:
            raise ValueError("softmax head requires output_dim >= 2")

    @property
    def layer_dims(self) -> list[tuple[int, int]]:
        """(fan_in, fan_out) per affine layer, input to output order."""
        dims = [self.input_dim, *self.hidden_dims, self.output_dim]
        return [(dims[i], dims[i + 1]) for i in range(len(dims) - 1)]

    @property
    def param_count(self) -> int:
        return sum(fi * fo + fo for fi, fo in self.layer_dims)


@dataclass(frozen=True)
class Batch:
    """Covariates plus loss-specific targets and optional per-row weights."""

    x: np.ndarray
    targets: np.ndarray | None = None
    weights: np.ndarray | None = None

    def __post_init__(self):
        n = self.x.shape[0]
        if self.targets is not None and self.targets.shape[0] != n:
            raise ValueError("targets row count differs from x")
        if self.weights is not None:
            if self.weights.shape[0] != n:
                raise ValueError("weights row count differs from x")
            if np.any(self.weights < 0):
                raise ValueError("weights must be nonnegative")

    @property
    def n(self) -> int:
        return self.x.shape[0]


def init_params(arch: MlpArchitecture, rng: np.random.Generator) -> np.ndarray:
    """Draw a fresh flat parameter vector.

    Weights are uniform on [-s, s] with s = sqrt(6 / (fan_in + fan_out)) per
    layer; biases start at zero. Deterministic given the generator state.
    """
    chunks = []
    for fan_in, fan_out in arch.layer_dims:
        s = np.sqrt(6.0 / (fan_in + fan_out))
        w = rng.uniform(-s, s, size=(fan_in, fan_out))
        chunks.append(w.ravel())
        chunks.append(np.zeros(fan_out))
    return np.concatenate(chunks)


def unflatten(arch: MlpArchitecture, params: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    """Split a flat parameter vector into per-layer (W, b) views."""
    if params.shape != (arch.param_count,):
        raise ValueError(
            f"parameter vector has length {params.shape}, architecture needs {arch.param_count}"
        )
    layers = []
    pos = 0
    for fan_in, fan_out in arch.layer_dims:
        w = params[pos : pos + fan_in * fan_out].reshape(fan_in, fan_out)
        pos += fan_in * fan_out
        b = params[pos : pos + fan_out]
        pos += fan_out
        layers.append((w, b))
    return layers


def _apply_head(arch: MlpArchitecture, z: np.ndarray) -> np.ndarray:
    if arch.head == HEAD_TANH:
        return np.tanh(z)
    if arch.head == HEAD_SOFTMAX:
        # max subtraction keeps exp in range; rows then sum to 1 up to roundoff
        shifted = z - z.max(axis=1, keepdims=True)
        e = np.exp(shifted)
        return e / e.sum(axis=1, keepdims=True)
    return z


def forward(arch: MlpArchitecture, params: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Evaluate the network on a batch, returning the post-head output."""
    out, _ = _forward_cached(arch, params, x)
    return out


def _forward_cached(arch, params, x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != arch.input_dim:
        raise ValueError(f"x has shape {x.shape}, expected (n, {arch.input_dim})")
    layers = unflatten(arch, np.asarray(params, dtype=np.float64))
    activations = [x]
    h = x
    for li, (w, b) in enumerate(layers):
        z = h @ w + b
        h = np.maximum(z, 0.0) if li < len(layers) - 1 else z
        activations.append(h)
    return _apply_head(arch, h), activations


def backward(
    arch: MlpArchitecture,
    params: np.ndarray,
    batch: Batch | np.ndarray,
    loss_grad_at_output: np.ndarray,
) -> np.ndarray:
    """Gradient of the scalar total loss with respect to the flat parameters.

    ``loss_grad_at_output`` holds d(total loss)/d(output) for the post-head
    output, shape (n, output_dim). The head Jacobian, the affine layers, and
    the ReLU masks are chained exactly; the result matches central finite
    differences to roundoff for smooth configurations.
    """
    x = batch.x if isinstance(batch, Batch) else batch
    out, acts = _forward_cached(arch, params, x)
    g = np.asarray(loss_grad_at_output, dtype=np.float64)
    if g.shape != out.shape:
        raise ValueError(f"loss gradient has shape {g.shape}, expected {out.shape}")

    if arch.head == HEAD_TANH:
        gz = g * (1.0 - out**2)
    elif arch.head == HEAD_SOFTMAX:
        # d(softmax)/dz contracted with upstream: p * (g - <g, p>)
        inner = (g * out).sum(axis=1, keepdims=True)
        gz = out * (g - inner)
    else:
        gz = g

    layers = unflatten(arch, np.asarray(params, dtype=np.float64))
    grads: list[np.ndarray | None] = [None] * len(layers)
    for li in range(len(layers) - 1, -1, -1):
        w, _ = layers[li]
        h_in = acts[li]
        gw = h_in.T @ gz
        gb = gz.sum(axis=0)
        grads[li] = np.concatenate([gw.ravel(), gb])
        if li > 0:
            gh = gz @ w.T
            gz = gh * (acts[li] > 0.0)
    return np.concatenate(grads)


def save_params(directory: str | Path, arch: MlpArchitecture, params: np.ndarray) -> None:
    """Persist a parameter vector as a little-endian float64 blob + JSON sidecar."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    vec = np.ascontiguousarray(np.asarray(params, dtype="<f8"))
    if vec.shape != (arch.param_count,):
        raise ValueError("parameter vector does not match the architecture")
    (directory / "params.bin").write_bytes(vec.tobytes())
    sidecar = {
        "input_dim": arch.input_dim,
        "hidden_dims": list(arch.hidden_dims),
        "output_dim": arch.output_dim,
        "head": arch.head,
        "dim": int(vec.size),
        "dtype": "<f8",
    }
    (directory / "arch.json").write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")


def load_params(directory: str | Path) -> tuple[MlpArchitecture, np.ndarray]:
    directory = Path(directory)
    sidecar = json.loads((directory / "arch.json").read_text())
    arch = MlpArchitecture(
        input_dim=sidecar["input_dim"],
        hidden_dims=tuple(sidecar["hidden_dims"]),
        output_dim=sidecar["output_dim"],
        head=sidecar["head"],
    )
    vec = np.frombuffer((directory / "params.bin").read_bytes(), dtype="<f8").copy()
    if vec.size != sidecar["dim"] or vec.size != arch.param_count:
        raise ValueError("blob length does not match the declared architecture")
    return arch, vec
