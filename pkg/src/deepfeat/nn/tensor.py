"""Reverse-mode autodiff over numpy arrays.

A ``Tensor`` wraps one ndarray and remembers how it was produced; calling
``backward()`` on a scalar result walks the recorded graph once (iterative
topological order, no recursion) and accumulates gradients into every node
that requires them. Training runs in float32; gradient checking builds the
same graphs in float64.
"""

from __future__ import annotations

from typing import Callable, Iterable, Optional

import numpy as np

DEFAULT_DTYPE = np.float32


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(
        self,
        data,
        requires_grad: bool = False,
        dtype=None,
        _parents: tuple = (),
        _backward: Optional[Callable[[], None]] = None,
    ):
        if isinstance(data, np.ndarray):
            self.data = data.astype(dtype) if dtype is not None else data
        else:
            self.data = np.asarray(data, dtype=dtype or DEFAULT_DTYPE)
        self.grad: Optional[np.ndarray] = None
        self.requires_grad = requires_grad
        self._parents = _parents
        self._backward = _backward

    @property
    def shape(self) -> tuple:
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    def item(self) -> float:
        return float(self.data)

    def accumulate(self, g: np.ndarray) -> None:
        """Add an incoming gradient contribution (shape must already match)."""
        if self.grad is None:
            # Own the buffer: the same array may be routed to several nodes.
            self.grad = np.array(g, dtype=self.data.dtype)
        else:
            self.grad += g

    def zero_grad(self) -> None:
        if self.grad is not None and self.grad.shape == self.data.shape:
            self.grad.fill(0)
        else:
            self.grad = np.zeros_like(self.data)

    def detach(self) -> "Tensor":
        return Tensor(self.data, requires_grad=False)

    def backward(self, grad: Optional[np.ndarray] = None) -> None:
        if grad is None:
            if self.data.size != 1:
                raise ValueError("backward() without a gradient needs a scalar output")
            grad = np.ones_like(self.data)
        # Iterative post-order DFS; graphs from unrolled recurrences can be
        # deeper than the interpreter stack allows.
        topo: list[Tensor] = []
        visited: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                topo.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if id(p) not in visited:
                    stack.append((p, False))
        self.accumulate(grad.astype(self.data.dtype, copy=False))
        for node in reversed(topo):
            if node._backward is not None and node.grad is not None:
                node._backward()

    # Light operator sugar so composite layers read naturally. Each defers
    # to the op registry in ops.py (imported lazily to avoid a cycle).
    def __add__(self, other):
        from . import ops

        return ops.add(self, _wrap(other, self.dtype))

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        from . import ops

        return ops.sub(self, _wrap(other, self.dtype))

    def __rsub__(self, other):
        from . import ops

        return ops.sub(_wrap(other, self.dtype), self)

    def __mul__(self, other):
        from . import ops

        return ops.mul(self, _wrap(other, self.dtype))

    def __rmul__(self, other):
        return self.__mul__(other)

    def __matmul__(self, other):
        from . import ops

        return ops.matmul(self, other)

    def __neg__(self):
        from . import ops

        return ops.mul(self, _wrap(-1.0, self.dtype))

    def __repr__(self) -> str:
        return f"Tensor(shape={self.data.shape}, dtype={self.data.dtype}, grad={'set' if self.grad is not None else 'none'})"


def _wrap(x, dtype) -> Tensor:
    if isinstance(x, Tensor):
        return x
    return Tensor(np.asarray(x, dtype=dtype))


class Parameter(Tensor):
    """Trainable tensor with a name and an eagerly allocated gradient buffer."""

    __slots__ = ("name",)

    def __init__(self, data, name: str = "", dtype=None):
        super().__init__(data, requires_grad=True, dtype=dtype)
        self.name = name
        self.grad = np.zeros_like(self.data)

    @property
    def value(self) -> np.ndarray:
        return self.data


def parameters_of(obj) -> Iterable[Parameter]:
    """Yield every Parameter reachable from an object's attributes (depth-first).

    Understands plain attributes, lists/tuples and dicts; used by the
    training loop for the parameter census and optimizer wiring.
    """
    seen: set[int] = set()

    def walk(o):
        if id(o) in seen:
            return
        seen.add(id(o))
        if isinstance(o, Parameter):
            yield o
            return
        if isinstance(o, Tensor):
            return
        if isinstance(o, (list, tuple)):
            for v in o:
                yield from walk(v)
            return
        if isinstance(o, dict):
            for v in o.values():
                yield from walk(v)
            return
        d = getattr(o, "__dict__", None)
        if d is not None:
            for v in d.values():
                yield from walk(v)
        slots = getattr(type(o), "__slots__", None)
        if slots:
            for s in slots:
                try:
                    yield from walk(getattr(o, s))
                except AttributeError:
                    pass

    yield from walk(obj)
