"""Small fully connected value network with hand-written backpropagation.

Parameter layout: for each layer ``l`` (input to output), the weight matrix
``W_l`` of shape ``(fan_in, fan_out)`` in row-major order, followed by the
bias ``b_l`` of length ``fan_out``. All layers are concatenated into one flat
``float64`` array.
"""

from __future__ import annotations

import numpy as np

ACTIVATIONS = ("relu", "linear")


class MLP:
    def __init__(self, sizes, activations=None, params=None):
        self.sizes = [int(s) for s in sizes]
        if len(self.sizes) < 2:
            raise ValueError("need at least an input and an output size")
        n_layers = len(self.sizes) - 1
        if activations is None:
            activations = ["relu"] * (n_layers - 1) + ["linear"]
        if len(activations) != n_layers or any(a not in ACTIVATIONS for a in activations):
            raise ValueError(f"bad activations {activations!r} for {n_layers} layers")
        self.activations = list(activations)
        self._slices = []
        offset = 0
        for fan_in, fan_out in zip(self.sizes[:-1], self.sizes[1:]):
            w = slice(offset, offset + fan_in * fan_out)
            offset += fan_in * fan_out
            b = slice(offset, offset + fan_out)
            offset += fan_out
            self._slices.append((w, b, fan_in, fan_out))
        self.n_params = offset
        if params is None:
            params = np.zeros(offset)
        params = np.asarray(params, dtype=np.float64)
        if params.shape != (offset,):
            raise ValueError(f"expected {offset} parameters, got {params.shape}")
        self.params = params.copy()

    @classmethod
    def initialized(cls, sizes, rng: np.random.Generator, activations=None) -> "MLP":
        """He-uniform weights and zero biases."""
        net = cls(sizes, activations)
        for (w, _b, fan_in, _fan_out) in net._slices:
            bound = np.sqrt(6.0 / fan_in)
            net.params[w] = rng.uniform(-bound, bound, size=w.stop - w.start)
        return net

    def layers(self, params=None):
        p = self.params if params is None else params
        for (w, b, fan_in, fan_out), act in zip(self._slices, self.activations):
            yield p[w].reshape(fan_in, fan_out), p[b], act

    def copy(self) -> "MLP":
        return MLP(self.sizes, self.activations, self.params)

    def __call__(self, x) -> np.ndarray:
        out, _ = self.forward(x)
        return out

    def forward(self, x):
        """Return outputs and the per-layer cache needed by ``backward``."""
        a = np.atleast_2d(np.asarray(x, dtype=np.float64))
        cache = []
        for W, b, act in self.layers():
            z = a @ W + b
            cache.append((a, z))
            a = np.maximum(z, 0.0) if act == "relu" else z
        return a, cache

    def backward(self, cache, grad_out) -> np.ndarray:
        """Gradient of the loss w.r.t. the flat parameters given dLoss/dOutput."""
        grad = np.empty(self.n_params)
        delta = np.asarray(grad_out, dtype=np.float64)
        layers = list(self.layers())
        for i in range(len(layers) - 1, -1, -1):
            W, _b, act = layers[i]
            a_in, z = cache[i]
            if act == "relu":
                delta = delta * (z > 0)
            w_sl, b_sl, _, _ = self._slices[i]
            grad[w_sl] = (a_in.T @ delta).ravel()
            grad[b_sl] = delta.sum(axis=0)
            delta = delta @ W.T
        return grad


class Adam:
    def __init__(self, n_params: int, lr: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = np.zeros(n_params)
        self.v = np.zeros(n_params)
        self.t = 0

    def step(self, params: np.ndarray, grad: np.ndarray) -> None:
        """Update ``params`` in place."""
        self.t += 1
        self.m = self.beta1 * self.m + (1 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1 - self.beta2) * grad * grad
        m_hat = self.m / (1 - self.beta1**self.t)
        v_hat = self.v / (1 - self.beta2**self.t)
        params -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)
