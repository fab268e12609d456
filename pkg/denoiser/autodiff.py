"""Reverse-mode differentiation over a fixed set of float64 array operations.

Each :class:`Tensor` remembers its parents and, for each parent, a function
mapping the upstream gradient to that parent's gradient. ``backward`` walks
the graph in reverse topological order and accumulates. Every forward result
and every backward contribution is checked for NaN/Inf and reported with the
scope path (or leaf name) of the tensor involved.
"""

import contextlib
import contextvars
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from utils.errors import ConfigError, NumericError

_scope: contextvars.ContextVar[Tuple[str, ...]] = contextvars.ContextVar("autodiff_scope", default=())

LAYER_NORM_EPS = 1e-5


@contextlib.contextmanager
def scope(name: str):
    """Prefix for the tensor path reported by non-finite errors."""
    token = _scope.set(_scope.get() + (name,))
    try:
        yield
    finally:
        _scope.reset(token)


def current_path(op: str) -> str:
    return ".".join(_scope.get() + (op,))


class Tensor:
    __slots__ = ("value", "grad", "name", "_parents", "_vjps")

    def __init__(
        self,
        value,
        parents: Sequence["Tensor"] = (),
        vjps: Sequence[Callable[[np.ndarray], np.ndarray]] = (),
        name: Optional[str] = None,
    ):
        self.value = np.asarray(value, dtype=np.float64)
        self.grad: Optional[np.ndarray] = None
        self.name = name
        self._parents = tuple(parents)
        self._vjps = tuple(vjps)

    @property
    def shape(self):
        return self.value.shape

    def __repr__(self):
        return f"Tensor(name={self.name!r}, shape={self.shape})"

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, scale(other, -1.0))

    def __mul__(self, other):
        return mul(self, other)

    def __matmul__(self, other):
        return matmul(self, other)

    def backward(self, seed: Optional[np.ndarray] = None) -> None:
        """Accumulate d(seed · self)/d(leaf) into every reachable leaf's ``grad``."""
        if seed is None:
            if self.value.size != 1:
                raise ConfigError(f"backward without a seed needs a scalar, got shape {self.shape}")
            seed = np.ones_like(self.value)
        seed = np.asarray(seed, dtype=np.float64)
        if seed.shape != self.shape:
            raise ConfigError(f"seed shape {seed.shape} does not match tensor shape {self.shape}")

        topo, visited = [], set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                topo.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if id(parent) not in visited:
                    stack.append((parent, False))

        grads = {id(self): seed}
        for node in reversed(topo):
            upstream = grads.pop(id(node), None)
            if upstream is None:
                continue
            if not node._parents:
                node.grad = upstream if node.grad is None else node.grad + upstream
                continue
            for parent, vjp in zip(node._parents, node._vjps):
                key = id(parent)
                contribution = vjp(upstream)
                total = contribution if key not in grads else grads[key] + contribution
                if not np.all(np.isfinite(total)):
                    raise NumericError("non-finite gradient in backward pass", where=parent.name or node.name)
                grads[key] = total


def as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _result(value: np.ndarray, op: str, parents, vjps) -> Tensor:
    if not np.all(np.isfinite(value)):
        raise NumericError("non-finite value in forward pass", where=current_path(op))
    return Tensor(value, parents, vjps, name=current_path(op))


def _unbroadcast(grad: np.ndarray, shape) -> np.ndarray:
    """Sum ``grad`` down to ``shape`` after numpy broadcasting."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    return _result(
        a.value + b.value,
        "add",
        (a, b),
        (lambda g: _unbroadcast(g, a.shape), lambda g: _unbroadcast(g, b.shape)),
    )


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    return _result(
        a.value * b.value,
        "mul",
        (a, b),
        (lambda g: _unbroadcast(g * b.value, a.shape), lambda g: _unbroadcast(g * a.value, b.shape)),
    )


def scale(a, factor: float) -> Tensor:
    a = as_tensor(a)
    return _result(a.value * factor, "scale", (a,), (lambda g: g * factor,))


def row_products(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """a @ b with every output entry summed over k in increasing order.

    The rounding of row i depends on a[i] and b alone, never on how many
    rows ``a`` has (BLAS picks kernels by matrix height).
    """
    return (a[:, :, None] * b[None, :, :]).sum(axis=1)


def matmul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.value.ndim != 2 or b.value.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ConfigError(f"matmul needs (m, k) @ (k, n), got {a.shape} @ {b.shape}")
    return _result(
        row_products(a.value, b.value),
        "matmul",
        (a, b),
        (lambda g: g @ b.value.T, lambda g: a.value.T @ g),
    )


def transpose(a) -> Tensor:
    a = as_tensor(a)
    return _result(a.value.T, "transpose", (a,), (lambda g: g.T,))


def tanh(a) -> Tensor:
    a = as_tensor(a)
    out = np.tanh(a.value)
    return _result(out, "tanh", (a,), (lambda g: g * (1.0 - out ** 2),))


def take_rows(table, index: np.ndarray) -> Tensor:
    """Rows ``table[index]`` (embedding lookup); repeated rows accumulate."""
    table = as_tensor(table)
    index = np.asarray(index, dtype=np.int64)

    def vjp(g):
        out = np.zeros_like(table.value)
        np.add.at(out, index, g)
        return out

    return _result(table.value[index], "take_rows", (table,), (vjp,))


def layer_norm(a) -> Tensor:
    """Row-wise (x − mean) / √(var + eps), without affine parameters."""
    a = as_tensor(a)
    mean = a.value.mean(axis=-1, keepdims=True)
    centered = a.value - mean
    inv_std = 1.0 / np.sqrt((centered ** 2).mean(axis=-1, keepdims=True) + LAYER_NORM_EPS)
    out = centered * inv_std
    width = a.shape[-1]

    def vjp(g):
        g_mean = g.mean(axis=-1, keepdims=True)
        gy_mean = (g * out).mean(axis=-1, keepdims=True)
        return inv_std * (g - g_mean - out * gy_mean)

    if width == 0:
        raise ConfigError("layer_norm over an empty axis")
    return _result(out, "layer_norm", (a,), (vjp,))


def causal_softmax(logits) -> Tensor:
    """Row-wise softmax where row i sees only columns j <= i.

    Masked weights are exact zeros, so later columns never reach earlier rows.
    Each row is normalized over its own visible prefix only.
    """
    logits = as_tensor(logits)
    rows, cols = logits.shape
    weights = np.zeros((rows, cols))
    for i in range(rows):
        visible = logits.value[i, :i + 1]
        e = np.exp(visible - visible.max())
        weights[i, :i + 1] = e / e.sum()

    def vjp(g):
        inner = (g * weights).sum(axis=-1, keepdims=True)
        return weights * (g - inner)

    return _result(weights, "causal_softmax", (logits,), (vjp,))


def causal_attention(q, k, v) -> Tensor:
    """softmax(q kᵀ/√d + M) v with M = −∞ above the diagonal."""
    q, k, v = as_tensor(q), as_tensor(k), as_tensor(v)
    d = q.shape[-1]
    if d == 0:
        raise ConfigError("attention width d must be positive")
    if k.shape != q.shape or v.shape[0] != q.shape[0]:
        raise ConfigError(f"attention shapes disagree: q {q.shape}, k {k.shape}, v {v.shape}")
    with scope("attention"):
        logits = scale(matmul(q, transpose(k)), 1.0 / np.sqrt(d))
        return matmul(causal_softmax(logits), v)
