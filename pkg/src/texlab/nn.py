"""Dense feed-forward network container and the Adam optimizer."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .errors import ConfigError, ShapeMismatchError

_HIDDEN_ACTS = ("tanh", "leaky_relu", "sigmoid")
_OUTPUT_ACTS = ("tanh", "sigmoid", "softmax", "linear")


def _act(name: str, v: ad.Var) -> ad.Var:
    if name == "tanh":
        return ad.tanh(v)
    if name == "sigmoid":
        return ad.sigmoid(v)
    if name == "leaky_relu":
        return ad.leaky_relu(v)
    if name == "softmax":
        return ad.softmax(v)
    return v


def _act_np(name: str, x: np.ndarray) -> np.ndarray:
    if name == "tanh":
        return np.tanh(x)
    if name == "sigmoid":
        return 0.5 * (np.tanh(0.5 * x) + 1.0)
    if name == "leaky_relu":
        return np.where(x > 0, x, 0.2 * x)
    if name == "softmax":
        z = x - x.max(axis=-1, keepdims=True)
        e = np.exp(z)
        return e / e.sum(axis=-1, keepdims=True)
    return x


@dataclass
class Mlp:
    """A multilayer perceptron with one activation kind per role.

    ``params`` maps ``w0, b0, w1, b1, ...`` to arrays owned by this model;
    optimizers update them in place. Fitting mutates only this instance,
    prediction is read-only.
    """

    sizes: tuple
    hidden: str
    output: str
    params: dict

    @classmethod
    def create(cls, sizes, hidden: str = "leaky_relu", output: str = "linear",
               seed: int = 0, dtype=np.float32) -> "Mlp":
        sizes = tuple(int(s) for s in sizes)
        if len(sizes) < 2 or any(s < 1 for s in sizes):
            raise ConfigError(f"layer sizes must be positive, got {sizes}")
        if hidden not in _HIDDEN_ACTS:
            raise ConfigError(f"unknown hidden activation {hidden!r}")
        if output not in _OUTPUT_ACTS:
            raise ConfigError(f"unknown output activation {output!r}")
        rng = np.random.default_rng(seed)
        params = {}
        for i, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
            std = np.sqrt(2.0 / (fan_in + fan_out))
            params[f"w{i}"] = (rng.standard_normal((fan_in, fan_out)) * std).astype(dtype)
            params[f"b{i}"] = np.zeros(fan_out, dtype=dtype)
        return cls(sizes, hidden, output, params)

    @property
    def layer_count(self) -> int:
        return len(self.sizes) - 1

    def param_vars(self) -> dict:
        """Fresh gradient-requiring leaves for one training step."""
        return {k: ad.Var(v) for k, v in self.params.items()}

    def forward(self, x, params: dict | None = None, logits: bool = False) -> ad.Var:
        """Graph-mode forward pass on a [n, d] batch.

        Without ``params`` the weights enter the graph as constants, so
        gradients flow through the network but not into it.
        """
        v = x if isinstance(x, ad.Var) else ad.constant(np.asarray(x))
        pv = params if params is not None else {k: ad.constant(p) for k, p in self.params.items()}
        last = self.layer_count - 1
        for i in range(self.layer_count):
            v = ad.add(ad.matmul(v, pv[f"w{i}"]), pv[f"b{i}"])
            if i < last:
                v = _act(self.hidden, v)
        if not logits:
            v = _act(self.output, v)
        return v

    def forward_np(self, x: np.ndarray, logits: bool = False) -> np.ndarray:
        """Plain numpy forward pass (no graph, no gradients)."""
        v = np.asarray(x)
        last = self.layer_count - 1
        for i in range(self.layer_count):
            v = v @ self.params[f"w{i}"] + self.params[f"b{i}"]
            if i < last:
                v = _act_np(self.hidden, v)
        if not logits:
            v = _act_np(self.output, v)
        return v

    def astype(self, dtype) -> "Mlp":
        return Mlp(self.sizes, self.hidden, self.output,
                   {k: v.astype(dtype) for k, v in self.params.items()})


class Adam:
    """Adam with bias correction; update denominators use sqrt(v_hat) + eps."""

    def __init__(self, params: dict, lr: float = 1e-3, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.step_count = 0

    def step(self, grads: dict) -> None:
        """Apply one update in place; parameters with no gradient stay put."""
        self.step_count += 1
        t = self.step_count
        c1 = 1.0 - self.beta1 ** t
        c2 = 1.0 - self.beta2 ** t
        for name, p in self.params.items():
            g = grads.get(name)
            if g is None:
                continue
            g = np.asarray(g, dtype=p.dtype)
            if g.shape != p.shape:
                raise ShapeMismatchError(
                    f"gradient shape {g.shape} != parameter shape {p.shape} for {name!r}"
                )
            m = self.m[name]
            v = self.v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)

    def state_tensors(self) -> dict:
        out = {}
        for k in self.params:
            out[f"m.{k}"] = self.m[k]
            out[f"v.{k}"] = self.v[k]
        return out

    def load_state(self, tensors: dict, step: int) -> None:
        for k in self.params:
            m, v = tensors.get(f"m.{k}"), tensors.get(f"v.{k}")
            if m is None or v is None or m.shape != self.params[k].shape:
                raise ShapeMismatchError(f"optimizer state missing or misshapen for {k!r}")
            self.m[k] = m.astype(self.params[k].dtype)
            self.v[k] = v.astype(self.params[k].dtype)
        self.step_count = int(step)


def mlp_tensors(mlp: Mlp) -> dict:
    return dict(mlp.params)


def mlp_meta(mlp: Mlp) -> dict:
    return {"sizes": list(mlp.sizes), "hidden": mlp.hidden, "output": mlp.output}


def mlp_from_parts(meta: dict, tensors: dict) -> Mlp:
    sizes = tuple(int(s) for s in meta["sizes"])
    mlp = Mlp(sizes, str(meta["hidden"]), str(meta["output"]), {})
    for i in range(len(sizes) - 1):
        for key, want in ((f"w{i}", (sizes[i], sizes[i + 1])), (f"b{i}", (sizes[i + 1],))):
            arr = tensors.get(key)
            if arr is None or tuple(arr.shape) != want:
                raise ShapeMismatchError(f"tensor {key!r} missing or misshapen")
            mlp.params[key] = arr
    return mlp
