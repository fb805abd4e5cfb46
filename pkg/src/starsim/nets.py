"""Plain-numpy multilayer perceptrons with exact reverse-mode gradients.

Both policy and value networks share one structure: a trunk of
linear -> layer-norm -> ReLU blocks feeding one or more linear heads.
Policy heads squash through tanh, the value head stays linear. The backward
pass returns gradients in containers of the same shape as the parameters, so
update rules and finite-difference checks can walk both in lockstep.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass

import numpy as np

LN_EPS = 1e-8


@dataclass
class TrunkLayer:
    w: np.ndarray  # (d_out, d_in)
    b: np.ndarray  # (d_out,)
    ln_scale: np.ndarray  # (d_out,)
    ln_shift: np.ndarray  # (d_out,)


@dataclass
class Head:
    w: np.ndarray  # (d_out, d_in)
    b: np.ndarray  # (d_out,)


@dataclass
class MlpNet:
    trunk: list
    heads: list
    squash: bool  # tanh on head outputs


def _uniform_fan_in(rng: np.random.Generator, d_out: int, d_in: int):
    bound = 1.0 / np.sqrt(d_in)
    w = rng.uniform(-bound, bound, size=(d_out, d_in))
    b = rng.uniform(-bound, bound, size=d_out)
    return w, b


def make_mlp(
    rng: np.random.Generator,
    in_dim: int,
    hidden_widths: list[int],
    head_dims: list[int],
    squash: bool,
) -> MlpNet:
    trunk = []
    d = in_dim
    for width in hidden_widths:
        w, b = _uniform_fan_in(rng, width, d)
        trunk.append(TrunkLayer(w, b, np.ones(width), np.zeros(width)))
        d = width
    heads = []
    for out in head_dims:
        w, b = _uniform_fan_in(rng, out, d)
        heads.append(Head(w, b))
    return MlpNet(trunk=trunk, heads=heads, squash=squash)


def zero_like_net(net: MlpNet) -> MlpNet:
    out = copy.deepcopy(net)
    for arr in param_arrays(out):
        arr[...] = 0.0
    return out


def clone_net(net: MlpNet) -> MlpNet:
    return copy.deepcopy(net)


def param_arrays(net: MlpNet) -> list:
    """All parameter arrays in a fixed order (shared by gradients)."""
    arrays = []
    for layer in net.trunk:
        arrays.extend([layer.w, layer.b, layer.ln_scale, layer.ln_shift])
    for head in net.heads:
        arrays.extend([head.w, head.b])
    return arrays


def layer_norm_forward(z: np.ndarray, scale: np.ndarray, shift: np.ndarray):
    m = z.mean(axis=1, keepdims=True)
    centered = z - m
    v = (centered**2).mean(axis=1, keepdims=True)
    inv_std = 1.0 / np.sqrt(v + LN_EPS)
    zhat = centered * inv_std
    return zhat * scale + shift, (zhat, inv_std)


def layer_norm_backward(dout: np.ndarray, scale: np.ndarray, cache):
    zhat, inv_std = cache
    dscale = (dout * zhat).sum(axis=0)
    dshift = dout.sum(axis=0)
    dzhat = dout * scale
    mean_d = dzhat.mean(axis=1, keepdims=True)
    mean_dz = (dzhat * zhat).mean(axis=1, keepdims=True)
    dz = (dzhat - mean_d - zhat * mean_dz) * inv_std
    return dz, dscale, dshift


def mlp_forward(net: MlpNet, x: np.ndarray):
    """Batched forward pass; x is (B, in_dim). Returns (output, cache)."""
    h = x
    trunk_caches = []
    for layer in net.trunk:
        z = h @ layer.w.T + layer.b
        ln_out, ln_cache = layer_norm_forward(z, layer.ln_scale, layer.ln_shift)
        out = np.maximum(ln_out, 0.0)
        trunk_caches.append((h, ln_cache, ln_out))
        h = out
    head_caches = []
    outputs = []
    for head in net.heads:
        pre = h @ head.w.T + head.b
        y = np.tanh(pre) if net.squash else pre
        head_caches.append((h, y))
        outputs.append(y)
    return np.concatenate(outputs, axis=1), (trunk_caches, head_caches)


def mlp_backward(net: MlpNet, cache, dy: np.ndarray):
    """Exact gradients of sum(dy * output) w.r.t. params and input.

    Returns (grads, dx) where grads mirrors the net structure.
    """
    trunk_caches, head_caches = cache
    grads = MlpNet(trunk=[], heads=[], squash=net.squash)

    offset = 0
    dh = None
    for head, (h_in, y) in zip(net.heads, head_caches):
        width = head.w.shape[0]
        dy_head = dy[:, offset:offset + width]
        offset += width
        dpre = dy_head * (1.0 - y**2) if net.squash else dy_head
        grads.heads.append(Head(w=dpre.T @ h_in, b=dpre.sum(axis=0)))
        contrib = dpre @ head.w
        dh = contrib if dh is None else dh + contrib

    for layer, (x_in, ln_cache, ln_out) in zip(
        reversed(net.trunk), reversed(trunk_caches)
    ):
        d_ln_out = dh * (ln_out > 0)
        dz, dscale, dshift = layer_norm_backward(d_ln_out, layer.ln_scale, ln_cache)
        grads.trunk.append(
            TrunkLayer(w=dz.T @ x_in, b=dz.sum(axis=0), ln_scale=dscale, ln_shift=dshift)
        )
        dh = dz @ layer.w
    grads.trunk.reverse()
    return grads, dh
