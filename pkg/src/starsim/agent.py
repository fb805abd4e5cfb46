"""Deterministic policy-gradient agent: actor, critic, targets, replay.

The actor is a two-headed squashing network (phase head and assignment head,
N outputs each); the critic scores state-action pairs with a linear output.
Updates are plain stochastic gradient steps on the mean squared Bellman error
(critic, descent) and on the mean critic value of on-policy actions (actor,
ascent), with Polyak-averaged target copies of both networks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .nets import MlpNet, clone_net, make_mlp, mlp_backward, mlp_forward, param_arrays


@dataclass
class AgentHyperparams:
    discount: float = 0.6
    actor_lr: float = 1e-4
    critic_lr: float = 1e-3
    soft_tau: float = 0.005
    batch_size: int = 64
    buffer_capacity: int = 10000
    hidden_width: int = 128
    hidden_layers: int = 2
    noise_start: float = 0.5
    noise_end: float = 0.05
    update_every: int = 1  # environment steps between gradient updates

    def __post_init__(self):
        if not 0.0 <= self.discount <= 1.0:
            raise ValueError("discount must lie in [0, 1]")
        if self.actor_lr <= 0 or self.critic_lr <= 0:
            raise ValueError("step sizes must be positive")
        if not 0.0 < self.soft_tau < 1.0:
            raise ValueError("soft-update factor must lie in (0, 1)")


@dataclass
class Experience:
    state: np.ndarray
    action: np.ndarray
    reward: float
    next_state: np.ndarray


class ReplayBuffer:
    """Fixed-capacity ring held in flat arrays; oldest row is overwritten first."""

    def __init__(self, capacity: int = 10000):
        if capacity <= 0:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._size = 0
        self._cursor = 0
        self._states = None
        self._actions = None
        self._rewards = None
        self._next_states = None

    def __len__(self) -> int:
        return self._size

    def _allocate(self, state_dim: int, action_dim: int) -> None:
        self._states = np.empty((self.capacity, state_dim))
        self._actions = np.empty((self.capacity, action_dim))
        self._rewards = np.empty(self.capacity)
        self._next_states = np.empty((self.capacity, state_dim))

    def push(self, exp: Experience) -> None:
        if self._states is None:
            self._allocate(exp.state.size, exp.action.size)
        i = self._cursor
        self._states[i] = exp.state
        self._actions[i] = exp.action
        self._rewards[i] = exp.reward
        self._next_states[i] = exp.next_state
        self._cursor = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def _draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if n > self._size:
            raise ValueError(f"buffer holds {self._size} < {n} requested")
        return rng.choice(self._size, size=n, replace=False)

    def sample_arrays(self, rng: np.random.Generator, n: int):
        idx = self._draw(rng, n)
        return (self._states[idx], self._actions[idx], self._rewards[idx],
                self._next_states[idx])

    def sample(self, rng: np.random.Generator, n: int) -> list:
        idx = self._draw(rng, n)
        return [
            Experience(self._states[i].copy(), self._actions[i].copy(),
                       float(self._rewards[i]), self._next_states[i].copy())
            for i in idx
        ]

    def items(self) -> list:
        return [
            Experience(self._states[i].copy(), self._actions[i].copy(),
                       float(self._rewards[i]), self._next_states[i].copy())
            for i in range(self._size)
        ]


def make_actor(rng, state_dim: int, n_elements: int, hyper: AgentHyperparams) -> MlpNet:
    widths = [hyper.hidden_width] * hyper.hidden_layers
    return make_mlp(rng, state_dim, widths, [n_elements, n_elements], squash=True)


def make_critic(rng, state_dim: int, action_dim: int, hyper: AgentHyperparams) -> MlpNet:
    widths = [hyper.hidden_width] * hyper.hidden_layers
    return make_mlp(rng, state_dim + action_dim, widths, [1], squash=False)


def _as_batch(x: np.ndarray) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, float)
    if x.ndim == 1:
        return x.reshape(1, -1), True
    return x, False


def actor_forward(actor: MlpNet, state: np.ndarray) -> np.ndarray:
    """Policy output in [-1, 1]^(2N); accepts a single state or a batch."""
    batch, single = _as_batch(state)
    out, _ = mlp_forward(actor, batch)
    return out[0] if single else out


def critic_forward(critic: MlpNet, state: np.ndarray, action: np.ndarray) -> np.ndarray | float:
    """Scalar value estimate; accepts single vectors or batches."""
    s, single = _as_batch(state)
    a, _ = _as_batch(action)
    out, _ = mlp_forward(critic, np.concatenate([s, a], axis=1))
    values = out[:, 0]
    return float(values[0]) if single else values


def target_return(
    reward: np.ndarray | float,
    next_state: np.ndarray,
    target_actor: MlpNet,
    target_critic: MlpNet,
    eta: float,
) -> np.ndarray | float:
    """Bootstrapped return r + eta * Q'(s', pi'(s')); episodes never terminate."""
    next_action = actor_forward(target_actor, next_state)
    return reward + eta * critic_forward(target_critic, next_state, next_action)


def critic_loss(critic: MlpNet, states, actions, targets) -> float:
    """Mean squared Bellman error over a batch."""
    targets = np.asarray(targets, float)
    if targets.size == 0:
        raise ValueError("empty batch")
    preds = critic_forward(critic, np.atleast_2d(states), np.atleast_2d(actions))
    return float(np.mean((targets - preds) ** 2))


def critic_loss_gradients(critic: MlpNet, states, actions, targets):
    """(loss, grads) of the mean squared Bellman error w.r.t. critic params."""
    states = np.atleast_2d(np.asarray(states, float))
    actions = np.atleast_2d(np.asarray(actions, float))
    targets = np.asarray(targets, float)
    if targets.size == 0:
        raise ValueError("empty batch")
    out, cache = mlp_forward(critic, np.concatenate([states, actions], axis=1))
    err = out[:, 0] - targets
    loss = float(np.mean(err**2))
    upstream = (2.0 * err / targets.size).reshape(-1, 1)
    grads, _ = mlp_backward(critic, cache, upstream)
    return loss, grads


def actor_objective_gradients(actor: MlpNet, critic: MlpNet, states):
    """(mean critic value, ascent grads) for actions chosen by the actor.

    Chains the critic's action gradient through the actor, which is the
    deterministic policy-gradient update direction.
    """
    states = np.atleast_2d(np.asarray(states, float))
    batch = states.shape[0]
    actions, actor_cache = mlp_forward(actor, states)
    q, critic_cache = mlp_forward(critic, np.concatenate([states, actions], axis=1))
    objective = float(np.mean(q[:, 0]))
    _, d_input = mlp_backward(critic, critic_cache, np.ones((batch, 1)) / batch)
    d_action = d_input[:, states.shape[1]:]
    grads, _ = mlp_backward(actor, actor_cache, d_action)
    return objective, grads


def update_critic(critic: MlpNet, states, actions, targets, lr: float) -> float:
    """One SGD step down the Bellman error; returns the pre-step loss."""
    loss, grads = critic_loss_gradients(critic, states, actions, targets)
    for p, g in zip(param_arrays(critic), param_arrays(grads)):
        p -= lr * g
    return loss


def update_actor(actor: MlpNet, critic: MlpNet, states, lr: float) -> float:
    """One gradient-ascent step on the mean critic value; critic is untouched."""
    objective, grads = actor_objective_gradients(actor, critic, states)
    for p, g in zip(param_arrays(actor), param_arrays(grads)):
        p += lr * g
    return objective


def soft_update(target: MlpNet, online: MlpNet, tau: float) -> None:
    """Polyak step: target <- tau * online + (1 - tau) * target, in place."""
    for t, o in zip(param_arrays(target), param_arrays(online)):
        if t.shape != o.shape:
            raise ValueError(f"parameter shape mismatch {t.shape} vs {o.shape}")
        t *= 1.0 - tau
        t += tau * o


def explore(action: np.ndarray, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Gaussian exploration noise, clipped back into the action box."""
    noisy = np.asarray(action, float) + sigma * rng.standard_normal(np.shape(action))
    return np.clip(noisy, -1.0, 1.0)


def noise_sigma(step: int, total_steps: int, start: float, end: float) -> float:
    """Linear decay from start to end over the first half of training."""
    half = max(1, total_steps // 2)
    if step >= half:
        return end
    return start + (end - start) * (step / half)


def flops_estimate(n_elements: int, width: int) -> int:
    """Forward-pass floating-point operations of the two-layer policy network.

    Counts the trunk on the (6 + 2N)-dimensional state of the six-user setup
    plus the two N-wide output heads.
    """
    trunk = 2 * ((6 + 2 * n_elements) * width + width**2)
    heads = 2 * (2 * width * n_elements)
    return trunk + heads


class DdpgAgent:
    """Owns the four networks, the buffer and the update schedule."""

    def __init__(self, rng: np.random.Generator, state_dim: int, n_elements: int,
                 hyper: AgentHyperparams | None = None):
        self.hyper = hyper or AgentHyperparams()
        self.state_dim = state_dim
        self.n_elements = n_elements
        self.actor = make_actor(rng, state_dim, n_elements, self.hyper)
        self.critic = make_critic(rng, state_dim, 2 * n_elements, self.hyper)
        self.target_actor = clone_net(self.actor)
        self.target_critic = clone_net(self.critic)
        self.buffer = ReplayBuffer(self.hyper.buffer_capacity)

    def act(self, state: np.ndarray) -> np.ndarray:
        return actor_forward(self.actor, state)

    def record(self, state, action, reward, next_state) -> None:
        self.buffer.push(Experience(np.asarray(state, float), np.asarray(action, float),
                                    float(reward), np.asarray(next_state, float)))

    def ready(self) -> bool:
        return len(self.buffer) >= self.hyper.batch_size

    def train_step(self, rng: np.random.Generator) -> float | None:
        """One replay-batch update of critic, actor and both targets."""
        if not self.ready():
            return None
        states, actions, rewards, next_states = self.buffer.sample_arrays(
            rng, self.hyper.batch_size
        )
        targets = target_return(rewards, next_states, self.target_actor,
                                self.target_critic, self.hyper.discount)
        loss = update_critic(self.critic, states, actions, targets, self.hyper.critic_lr)
        update_actor(self.actor, self.critic, states, self.hyper.actor_lr)
        soft_update(self.target_actor, self.actor, self.hyper.soft_tau)
        soft_update(self.target_critic, self.critic, self.hyper.soft_tau)
        return loss


CHECKPOINT_VERSION = 1


def _net_arrays(prefix: str, net: MlpNet) -> dict:
    out = {}
    for i, layer in enumerate(net.trunk):
        out[f"{prefix}.trunk{i}.w"] = layer.w
        out[f"{prefix}.trunk{i}.b"] = layer.b
        out[f"{prefix}.trunk{i}.ln_scale"] = layer.ln_scale
        out[f"{prefix}.trunk{i}.ln_shift"] = layer.ln_shift
    for i, head in enumerate(net.heads):
        out[f"{prefix}.head{i}.w"] = head.w
        out[f"{prefix}.head{i}.b"] = head.b
    return out


def save_checkpoint(path, agent: DdpgAgent) -> None:
    """Versioned dump of every parameter array, portable across platforms."""
    arrays = {"version": np.array([CHECKPOINT_VERSION])}
    arrays.update(_net_arrays("actor", agent.actor))
    arrays.update(_net_arrays("critic", agent.critic))
    arrays.update(_net_arrays("target_actor", agent.target_actor))
    arrays.update(_net_arrays("target_critic", agent.target_critic))
    np.savez(path, **arrays)


def load_checkpoint(path, agent: DdpgAgent) -> None:
    """Restore parameters in place; shapes must match the agent's networks."""
    with np.load(path) as data:
        version = int(data["version"][0])
        if version != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {version}")
        for prefix, net in [("actor", agent.actor), ("critic", agent.critic),
                            ("target_actor", agent.target_actor),
                            ("target_critic", agent.target_critic)]:
            stored = _net_arrays(prefix, net)
            for key, arr in stored.items():
                incoming = data[key]
                if incoming.shape != arr.shape:
                    raise ValueError(f"checkpoint shape mismatch at {key}")
                arr[...] = incoming
