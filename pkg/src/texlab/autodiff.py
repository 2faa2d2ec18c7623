"""Reverse-mode automatic differentiation over dense numpy arrays.

The graph is built dynamically: each operation returns a node carrying its
value, its parent nodes, and one vector-Jacobian closure per parent.
``backward`` walks the nodes once in reverse topological order. Every op
checks its result for NaN/inf so training blowups surface at their source.

Nodes whose subtree contains no gradient-requiring leaf are never expanded,
which is how frozen networks (e.g. a fixed perceptual model inside a
generator update) cost only their forward pass.
"""

from __future__ import annotations

import numpy as np

from .errors import NonFiniteError, NotScalarError, ShapeMismatchError


def _check_finite(arr: np.ndarray) -> None:
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError("non-finite value produced")


class Var:
    """One node of the computation graph: a value plus backprop plumbing."""

    __slots__ = ("data", "grad", "needs_grad", "_parents", "_vjps")

    def __init__(self, data, needs_grad: bool = True):
        arr = np.asarray(data)
        if arr.dtype.kind != "f":
            arr = arr.astype(np.float64)
        _check_finite(arr)
        self.data = arr
        self.grad = None
        self.needs_grad = needs_grad
        self._parents = ()
        self._vjps = ()

    @property
    def shape(self):
        return self.data.shape

    def __repr__(self):
        return f"Var(shape={self.data.shape}, needs_grad={self.needs_grad})"

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, other)


def constant(data) -> Var:
    """A graph leaf that never accumulates gradients."""
    return Var(data, needs_grad=False)


def _wrap(x) -> Var:
    return x if isinstance(x, Var) else constant(x)


def _node(data, parents, vjps) -> Var:
    out = Var.__new__(Var)
    arr = np.asarray(data)
    _check_finite(arr)
    out.data = arr
    out.grad = None
    out.needs_grad = any(p.needs_grad for p in parents)
    out._parents = tuple(parents)
    out._vjps = tuple(vjps)
    return out


def _unbroadcast(grad: np.ndarray, shape) -> np.ndarray:
    """Sum a gradient down to ``shape`` after numpy broadcasting."""
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


def _topo(root: Var) -> list:
    order, visited, stack = [], set(), [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            if p.needs_grad and id(p) not in visited:
                stack.append((p, False))
    return order


def backward(out: Var) -> None:
    """Accumulate d(out)/d(leaf) into ``grad`` for every reachable node."""
    if out.data.size != 1:
        raise NotScalarError(f"backward needs a scalar output, got shape {out.data.shape}")
    order = _topo(out)
    out.grad = np.ones_like(out.data)
    for node in reversed(order):
        g = node.grad
        if g is None:
            continue
        for parent, vjp in zip(node._parents, node._vjps):
            if not parent.needs_grad:
                continue
            pg = vjp(g)
            parent.grad = pg if parent.grad is None else parent.grad + pg


# ---------------------------------------------------------------------------
# operations


def add(a, b) -> Var:
    a, b = _wrap(a), _wrap(b)
    return _node(
        a.data + b.data,
        (a, b),
        (
            lambda g: _unbroadcast(g, a.data.shape),
            lambda g: _unbroadcast(g, b.data.shape),
        ),
    )


def sub(a, b) -> Var:
    a, b = _wrap(a), _wrap(b)
    return _node(
        a.data - b.data,
        (a, b),
        (
            lambda g: _unbroadcast(g, a.data.shape),
            lambda g: _unbroadcast(-g, b.data.shape),
        ),
    )


def mul(a, b) -> Var:
    a, b = _wrap(a), _wrap(b)
    return _node(
        a.data * b.data,
        (a, b),
        (
            lambda g: _unbroadcast(g * b.data, a.data.shape),
            lambda g: _unbroadcast(g * a.data, b.data.shape),
        ),
    )


def div(a, b) -> Var:
    a, b = _wrap(a), _wrap(b)
    return _node(
        a.data / b.data,
        (a, b),
        (
            lambda g: _unbroadcast(g / b.data, a.data.shape),
            lambda g: _unbroadcast(-g * a.data / (b.data * b.data), b.data.shape),
        ),
    )


def neg(a) -> Var:
    a = _wrap(a)
    return _node(-a.data, (a,), (lambda g: -g,))


def matmul(a, b) -> Var:
    a, b = _wrap(a), _wrap(b)
    if a.data.ndim != 2 or b.data.ndim != 2 or a.data.shape[1] != b.data.shape[0]:
        raise ShapeMismatchError(
            f"matmul needs 2-d operands with matching inner dim, got {a.data.shape} @ {b.data.shape}"
        )
    return _node(
        a.data @ b.data,
        (a, b),
        (lambda g: g @ b.data.T, lambda g: a.data.T @ g),
    )


def tanh(x) -> Var:
    x = _wrap(x)
    y = np.tanh(x.data)
    return _node(y, (x,), (lambda g: g * (1.0 - y * y),))


def sigmoid(x) -> Var:
    x = _wrap(x)
    # tanh formulation stays finite for large |x|
    y = 0.5 * (np.tanh(0.5 * x.data) + 1.0)
    return _node(y, (x,), (lambda g: g * y * (1.0 - y),))


def leaky_relu(x, slope: float = 0.2) -> Var:
    x = _wrap(x)
    pos = x.data > 0
    y = np.where(pos, x.data, slope * x.data)
    return _node(y, (x,), (lambda g: g * np.where(pos, 1.0, slope),))


def exp(x) -> Var:
    x = _wrap(x)
    y = np.exp(x.data)
    return _node(y, (x,), (lambda g: g * y,))


def log(x) -> Var:
    x = _wrap(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        y = np.log(x.data)
    return _node(y, (x,), (lambda g: g / x.data,))


def sqrt(x) -> Var:
    x = _wrap(x)
    y = np.sqrt(x.data)
    return _node(y, (x,), (lambda g: g / (2.0 * y),))


def square(x) -> Var:
    x = _wrap(x)
    return _node(x.data * x.data, (x,), (lambda g: g * (2.0 * x.data),))


def softmax(x) -> Var:
    """Softmax along the last axis."""
    x = _wrap(x)
    z = x.data - x.data.max(axis=-1, keepdims=True)
    e = np.exp(z)
    y = e / e.sum(axis=-1, keepdims=True)

    def vjp(g):
        return y * (g - (g * y).sum(axis=-1, keepdims=True))

    return _node(y, (x,), (vjp,))


def log_softmax(x) -> Var:
    """Numerically stable log of softmax along the last axis.

    The max shift is treated as a constant; the identity
    lse(x) = m + ln(sum exp(x - m)) holds for any m, so values and
    gradients are exact.
    """
    x = _wrap(x)
    shift = constant(x.data.max(axis=-1, keepdims=True))
    z = sub(x, shift)
    return sub(z, log(vsum(exp(z), axis=-1, keepdims=True)))


def vsum(x, axis=None, keepdims: bool = False) -> Var:
    x = _wrap(x)
    y = x.data.sum(axis=axis, keepdims=keepdims)

    def vjp(g):
        if axis is None:
            return np.broadcast_to(g, x.data.shape).copy()
        gg = g if keepdims else np.expand_dims(g, axis)
        return np.broadcast_to(gg, x.data.shape).copy()

    return _node(y, (x,), (vjp,))


def vmean(x, axis=None, keepdims: bool = False) -> Var:
    x = _wrap(x)
    y = x.data.mean(axis=axis, keepdims=keepdims)
    count = x.data.size if axis is None else x.data.shape[axis]

    def vjp(g):
        if axis is None:
            return (np.broadcast_to(g, x.data.shape) / count).astype(x.data.dtype, copy=False)
        gg = g if keepdims else np.expand_dims(g, axis)
        return (np.broadcast_to(gg, x.data.shape) / count).astype(x.data.dtype, copy=False)

    return _node(y, (x,), (vjp,))


def concat(parts, axis: int = -1) -> Var:
    parts = [_wrap(p) for p in parts]
    data = np.concatenate([p.data for p in parts], axis=axis)
    sizes = [p.data.shape[axis] for p in parts]
    offsets = np.cumsum([0] + sizes)

    def make_vjp(i):
        def vjp(g):
            sl = [slice(None)] * g.ndim
            sl[axis] = slice(offsets[i], offsets[i + 1])
            return g[tuple(sl)]

        return vjp

    return _node(data, parts, tuple(make_vjp(i) for i in range(len(parts))))


def reshape(x, shape) -> Var:
    x = _wrap(x)
    y = x.data.reshape(shape)
    return _node(y, (x,), (lambda g: g.reshape(x.data.shape),))


def clip(x, lo: float, hi: float) -> Var:
    """Clamp values into [lo, hi]; gradient passes through the interior."""
    x = _wrap(x)
    y = np.clip(x.data, lo, hi)
    inside = (x.data >= lo) & (x.data <= hi)
    return _node(y, (x,), (lambda g: g * inside,))


# ---------------------------------------------------------------------------
# finite differences


def gradient_check(fn, params: dict, h: float = 1e-5, sample: int | None = None, seed: int = 0) -> float:
    """Worst error between reverse-mode and central-difference gradients.

    ``fn`` maps a dict of name -> Var to a scalar Var; ``params`` maps the
    same names to arrays (promoted to float64). ``sample`` caps how many
    coordinates are probed per tensor (None = all of them). The error is
    |a - b| / max(1, |a|, |b|), so near-zero gradients compare absolutely.
    """
    base = {k: np.array(v, dtype=np.float64) for k, v in params.items()}
    leaves = {k: Var(v) for k, v in base.items()}
    out = fn(leaves)
    backward(out)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for name, arr in base.items():
        g = leaves[name].grad
        g = np.zeros_like(arr) if g is None else np.asarray(g, dtype=np.float64)
        flat = arr.reshape(-1)
        gflat = g.reshape(-1)
        if sample is None or sample >= flat.size:
            coords = range(flat.size)
        else:
            coords = rng.choice(flat.size, size=sample, replace=False)
        for i in coords:
            orig = flat[i]
            flat[i] = orig + h
            f_plus = float(fn({k: constant(v) for k, v in base.items()}).data)
            flat[i] = orig - h
            f_minus = float(fn({k: constant(v) for k, v in base.items()}).data)
            flat[i] = orig
            fd = (f_plus - f_minus) / (2.0 * h)
            ad_g = float(gflat[i])
            err = abs(ad_g - fd) / max(1.0, abs(ad_g), abs(fd))
            worst = max(worst, err)
    return worst
