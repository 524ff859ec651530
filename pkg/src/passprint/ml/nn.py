"""Fully connected ReLU network with sigmoid outputs, trained by Adam."""
from __future__ import annotations

import numpy as np


def init_params(sizes, rng: np.random.Generator) -> list[np.ndarray]:
    """He-initialised [W1, b1, W2, b2, ...] with W_k of shape (fan_in, fan_out)."""
    params = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        params.append(rng.normal(0.0, np.sqrt(2.0 / fan_in), (fan_in, fan_out)))
        params.append(np.zeros(fan_out))
    return params


def logits(params, X) -> np.ndarray:
    h = X
    n_layers = len(params) // 2
    for k in range(n_layers):
        h = h @ params[2 * k] + params[2 * k + 1]
        if k < n_layers - 1:
            h = np.maximum(h, 0.0)
    return h


def sigmoid(z):
    return np.where(z >= 0, 1 / (1 + np.exp(-np.abs(z))), np.exp(-np.abs(z)) / (1 + np.exp(-np.abs(z))))


def bce_with_logits(z, Y) -> float:
    """Binary cross-entropy summed over labels, averaged over samples."""
    per = np.maximum(z, 0) - z * Y + np.log1p(np.exp(-np.abs(z)))
    return float(per.sum() / len(z))


def loss_and_grads(params, X, Y):
    acts = [X]
    pre = []
    h = X
    n_layers = len(params) // 2
    for k in range(n_layers):
        z = h @ params[2 * k] + params[2 * k + 1]
        pre.append(z)
        h = np.maximum(z, 0.0) if k < n_layers - 1 else z
        acts.append(h)
    z = pre[-1]
    loss = bce_with_logits(z, Y)
    delta = (sigmoid(z) - Y) / len(X)
    grads = [None] * len(params)
    for k in range(n_layers - 1, -1, -1):
        grads[2 * k] = acts[k].T @ delta
        grads[2 * k + 1] = delta.sum(axis=0)
        if k:
            delta = (delta @ params[2 * k].T) * (pre[k - 1] > 0)
    return loss, grads


def numerical_grads(params, X, Y, eps=1e-6, dtype=np.longdouble):
    """Central finite differences of ``bce_with_logits`` w.r.t. every parameter.

    The loss is evaluated in extended precision so that a small step (which
    rarely straddles a ReLU kink) is not swamped by rounding noise.
    """
    params = [p.astype(dtype) for p in params]
    X = np.asarray(X).astype(dtype)
    Y = np.asarray(Y).astype(dtype)
    out = []
    for p in params:
        g = np.zeros(p.shape)
        flat, gflat = p.reshape(-1), g.reshape(-1)
        for i in range(flat.size):
            old = flat[i]
            flat[i] = old + eps
            up = _loss(params, X, Y)
            flat[i] = old - eps
            down = _loss(params, X, Y)
            flat[i] = old
            gflat[i] = float((up - down) / (2 * eps))
        out.append(g)
    return out


def _loss(params, X, Y):
    z = logits(params, X)
    return (np.maximum(z, 0) - z * Y + np.log1p(np.exp(-np.abs(z)))).sum() / len(z)


def fit(X, Y, hidden=(128, 64), lr=1e-3, batch=64, epochs=100, seed=0,
        beta1=0.9, beta2=0.999, adam_eps=1e-8):
    """Adam on mini-batches; returns (params, per-epoch training loss)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    sizes = [X.shape[1], *hidden, Y.shape[1]]
    params = init_params(sizes, rng)
    m = [np.zeros_like(p) for p in params]
    v = [np.zeros_like(p) for p in params]
    step = 0
    history = []
    n = len(X)
    for _ in range(epochs):
        order = rng.permutation(n)
        for lo in range(0, n, batch):
            idx = order[lo:lo + batch]
            _, grads = loss_and_grads(params, X[idx], Y[idx])
            step += 1
            for p, g, mk, vk in zip(params, grads, m, v):
                mk *= beta1
                mk += (1 - beta1) * g
                vk *= beta2
                vk += (1 - beta2) * g * g
                mhat = mk / (1 - beta1 ** step)
                vhat = vk / (1 - beta2 ** step)
                p -= lr * mhat / (np.sqrt(vhat) + adam_eps)
        history.append(bce_with_logits(logits(params, X), Y))
    return params, history
