import numpy as np
import pytest

from starsim.agent import (
    AgentHyperparams,
    DdpgAgent,
    Experience,
    ReplayBuffer,
    actor_forward,
    actor_objective_gradients,
    critic_forward,
    critic_loss,
    critic_loss_gradients,
    explore,
    flops_estimate,
    load_checkpoint,
    make_actor,
    make_critic,
    noise_sigma,
    save_checkpoint,
    soft_update,
    target_return,
    update_actor,
    update_critic,
)
from starsim.nets import (
    clone_net,
    layer_norm_forward,
    make_mlp,
    mlp_forward,
    param_arrays,
    zero_like_net,
)
from starsim.numerics import rng_stream

TINY = AgentHyperparams(hidden_width=6, hidden_layers=2)


def finite_difference(params, objective, h=1e-5):
    grads = []
    for p in params:
        g = np.zeros_like(p)
        it = np.nditer(p, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            old = p[idx]
            p[idx] = old + h
            up = objective()
            p[idx] = old - h
            down = objective()
            p[idx] = old
            g[idx] = (up - down) / (2 * h)
        grads.append(g)
    return grads


def assert_grads_close(analytic, numeric, rel=1e-4, floor=1e-6):
    for a, n in zip(analytic, numeric):
        tol = np.maximum(rel * np.abs(n), floor)
        assert (np.abs(a - n) <= tol).all()


def test_actor_zero_params_outputs_zero():
    actor = zero_like_net(make_actor(rng_stream(0), 5, 3, TINY))
    out = actor_forward(actor, np.ones(5))
    assert np.array_equal(out, np.zeros(6))


def test_actor_output_range():
    actor = make_actor(rng_stream(1), 5, 3, TINY)
    rng = rng_stream(2)
    for _ in range(20):
        out = actor_forward(actor, 10 * rng.standard_normal(5))
        assert (np.abs(out) <= 1.0).all()


def test_hand_computed_forward():
    net = make_mlp(rng_stream(3), 2, [2], [2], squash=True)
    layer = net.trunk[0]
    layer.w[...] = np.eye(2)
    layer.b[...] = [0.5, -0.5]
    layer.ln_scale[...] = [2.0, 2.0]
    layer.ln_shift[...] = [0.1, 0.1]
    head = net.heads[0]
    head.w[...] = [[0.5, 1.0], [-0.25, 1.0]]
    head.b[...] = [0.0, 0.05]
    out, _ = mlp_forward(net, np.array([[1.0, -1.0]]))
    # z = [1.5, -1.5]; normalized to [1, -1]; scaled/shifted to [2.1, -1.9];
    # relu keeps [2.1, 0]; head gives [1.05, -0.475] before tanh
    assert out[0, 0] == pytest.approx(np.tanh(1.05), abs=1e-7)
    assert out[0, 1] == pytest.approx(np.tanh(-0.475), abs=1e-7)


def test_critic_zero_params_outputs_zero():
    critic = zero_like_net(make_critic(rng_stream(4), 4, 2, TINY))
    assert critic_forward(critic, np.ones(4), np.ones(2)) == 0.0


def test_critic_scalar_output_per_batch_row():
    critic = make_critic(rng_stream(5), 4, 2, TINY)
    vals = critic_forward(critic, np.ones((7, 4)), np.ones((7, 2)))
    assert vals.shape == (7,)


def test_layer_norm_statistics():
    rng = rng_stream(6)
    z = rng.standard_normal((32, 16)) * 3 + 1
    out, _ = layer_norm_forward(z, np.ones(16), np.zeros(16))
    assert np.abs(out.mean(axis=1)).max() < 1e-6
    assert np.abs(out.var(axis=1) - 1.0).max() < 1e-6


def test_target_return_cases():
    actor = make_actor(rng_stream(7), 4, 2, TINY)
    critic = make_critic(rng_stream(8), 4, 4, TINY)
    s = np.ones(4)
    assert target_return(3.0, s, actor, critic, 0.0) == pytest.approx(3.0)
    fixed = zero_like_net(critic)
    fixed.heads[0].b[...] = 2.0
    assert target_return(1.0, s, actor, fixed, 0.6) == pytest.approx(2.2)
    zero = zero_like_net(critic)
    assert target_return(0.7, s, actor, zero, 0.9) == pytest.approx(0.7)


def test_critic_loss_cases():
    critic = zero_like_net(make_critic(rng_stream(9), 2, 2, TINY))
    states = np.zeros((2, 2))
    actions = np.zeros((2, 2))
    assert critic_loss(critic, states, actions, np.zeros(2)) == 0.0
    assert critic_loss(critic, states[:1], actions[:1], np.array([1.0])) == pytest.approx(1.0)
    assert critic_loss(critic, states, actions, np.array([1.0, -1.0])) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        critic_loss(critic, states[:0], actions[:0], np.array([]))


def test_critic_gradients_match_finite_differences():
    rng = rng_stream(10)
    critic = make_critic(rng, 3, 2, TINY)
    states = rng.standard_normal((4, 3))
    actions = rng.uniform(-1, 1, (4, 2))
    targets = rng.standard_normal(4)
    _, grads = critic_loss_gradients(critic, states, actions, targets)
    numeric = finite_difference(
        param_arrays(critic), lambda: critic_loss(critic, states, actions, targets)
    )
    assert_grads_close(param_arrays(grads), numeric)


def test_critic_gradient_zero_at_perfect_fit():
    critic = zero_like_net(make_critic(rng_stream(11), 2, 1, TINY))
    states = np.ones((3, 2))
    actions = np.ones((3, 1))
    targets = np.zeros(3)
    _, grads = critic_loss_gradients(critic, states, actions, targets)
    for g in param_arrays(grads):
        assert np.allclose(g, 0.0)


def test_linear_network_matches_least_squares_gradient():
    rng = rng_stream(12)
    critic = make_mlp(rng, 3, [], [1], squash=False)  # pure linear map
    states = rng.standard_normal((8, 2))
    actions = rng.uniform(-1, 1, (8, 1))
    targets = rng.standard_normal(8)
    x = np.concatenate([states, actions], axis=1)
    _, grads = critic_loss_gradients(critic, states, actions, targets)
    pred = x @ critic.heads[0].w.T[:, 0] + critic.heads[0].b[0]
    err = pred - targets
    expected_dw = 2.0 * err @ x / len(err)
    expected_db = 2.0 * err.mean()
    assert np.allclose(grads.heads[0].w.ravel(), expected_dw, rtol=1e-12)
    assert grads.heads[0].b[0] == pytest.approx(expected_db, rel=1e-12)


def test_actor_gradients_match_finite_differences():
    rng = rng_stream(13)
    actor = make_actor(rng, 3, 2, TINY)
    critic = make_critic(rng, 3, 4, TINY)
    states = rng.standard_normal((4, 3))

    def objective():
        actions = actor_forward(actor, states)
        return float(np.mean(critic_forward(critic, states, actions)))

    _, grads = actor_objective_gradients(actor, critic, states)
    numeric = finite_difference(param_arrays(actor), objective)
    assert_grads_close(param_arrays(grads), numeric)


def test_update_critic():
    rng = rng_stream(14)
    critic = make_critic(rng, 2, 1, TINY)
    states = rng.standard_normal((4, 2))
    actions = rng.uniform(-1, 1, (4, 1))
    targets = rng.standard_normal(4)
    before = [p.copy() for p in param_arrays(critic)]
    update_critic(critic, states, actions, targets, lr=0.0)
    for p, b in zip(param_arrays(critic), before):
        assert np.array_equal(p, b)
    loss_before = critic_loss(critic, states, actions, targets)
    update_critic(critic, states, actions, targets, lr=1e-3)
    assert critic_loss(critic, states, actions, targets) < loss_before


def test_update_critic_scalar_trace():
    critic = make_mlp(rng_stream(15), 1, [], [1], squash=False)
    critic.heads[0].w[...] = 0.5
    critic.heads[0].b[...] = 0.0
    states = np.array([[2.0]])
    actions = np.zeros((1, 0))
    targets = np.array([3.0])
    # pred = 1.0, err = -2.0, dw = 2*err*x = -8, db = -4
    update_critic(critic, states, actions, targets, lr=0.1)
    assert critic.heads[0].w[0, 0] == pytest.approx(0.5 + 0.8)
    assert critic.heads[0].b[0] == pytest.approx(0.4)


def test_update_actor_moves_toward_higher_value():
    rng = rng_stream(16)
    actor = make_actor(rng, 3, 1, TINY)
    # critic is a fixed linear function of the action: Q = sum(action)
    critic = make_mlp(rng, 5, [], [1], squash=False)
    critic.heads[0].w[...] = np.array([[0.0, 0.0, 0.0, 1.0, 1.0]])
    critic.heads[0].b[...] = 0.0
    states = rng.standard_normal((6, 3))
    before = actor_forward(actor, states).sum()
    snapshot = [p.copy() for p in param_arrays(actor)]
    update_actor(actor, critic, states, lr=0.0)
    for p, b in zip(param_arrays(actor), snapshot):
        assert np.array_equal(p, b)
    update_actor(actor, critic, states, lr=1e-2)
    assert actor_forward(actor, states).sum() > before


def test_soft_update():
    online = make_actor(rng_stream(17), 3, 2, TINY)
    target = zero_like_net(online)
    soft_update(target, online, 0.0)
    assert all(np.allclose(t, 0) for t in param_arrays(target))
    soft_update(target, online, 1.0)
    for t, o in zip(param_arrays(target), param_arrays(online)):
        assert np.allclose(t, o)
    target = zero_like_net(online)
    online.heads[0].b[...] = 1.0
    soft_update(target, online, 0.005)
    assert target.heads[0].b[0] == pytest.approx(0.005)


def test_soft_update_contracts_gap_exactly():
    online = make_actor(rng_stream(18), 3, 2, TINY)
    target = clone_net(online)
    for t in param_arrays(target):
        t += 1.0
    tau = 0.125
    gap = lambda: max(
        np.abs(t - o).max() for t, o in zip(param_arrays(target), param_arrays(online))
    )
    g0 = gap()
    for i in range(1, 4):
        soft_update(target, online, tau)
        assert gap() == pytest.approx(g0 * (1 - tau) ** i, rel=1e-12)


def test_buffer_ring_semantics():
    buf = ReplayBuffer(capacity=3)
    for i in range(4):
        buf.push(Experience(np.array([float(i)]), np.array([0.0]), float(i), np.array([0.0])))
    assert len(buf) == 3
    stored = sorted(e.reward for e in buf.items())
    assert stored == [1.0, 2.0, 3.0]  # oldest (0) evicted


def test_buffer_full_sample_returns_each_once():
    buf = ReplayBuffer(capacity=8)
    for i in range(5):
        buf.push(Experience(np.array([float(i)]), np.array([0.0]), float(i), np.array([0.0])))
    batch = buf.sample(rng_stream(19), 5)
    assert sorted(e.reward for e in batch) == [0.0, 1.0, 2.0, 3.0, 4.0]
    with pytest.raises(ValueError):
        buf.sample(rng_stream(20), 6)


def test_buffer_sampling_is_uniform():
    buf = ReplayBuffer(capacity=10)
    for i in range(10):
        buf.push(Experience(np.array([float(i)]), np.array([0.0]), float(i), np.array([0.0])))
    rng = rng_stream(21)
    counts = np.zeros(10)
    draws = 100_000
    for _ in range(draws):
        counts[int(buf.sample(rng, 1)[0].reward)] += 1
    assert np.abs(counts / draws - 0.1).max() < 0.01


def test_explore():
    action = np.zeros(8)
    assert np.array_equal(explore(action, 0.0, rng_stream(22)), action)
    rng = rng_stream(23)
    noisy = explore(np.ones(1000), 2.0, rng)
    assert (np.abs(noisy) <= 1.0).all()
    sample = explore(np.zeros(100_000), 0.1, rng)
    interior = sample[np.abs(sample) < 1.0]
    assert np.std(interior) == pytest.approx(0.1, rel=0.03)


def test_noise_schedule():
    assert noise_sigma(0, 1000, 0.5, 0.05) == pytest.approx(0.5)
    assert noise_sigma(250, 1000, 0.5, 0.05) == pytest.approx(0.275)
    assert noise_sigma(500, 1000, 0.5, 0.05) == 0.05
    assert noise_sigma(999, 1000, 0.5, 0.05) == 0.05


def test_flops_estimate():
    assert flops_estimate(144, 128) == 181_760
    assert flops_estimate(0, 64) == 2 * (6 * 64 + 64**2)
    assert flops_estimate(144, 256) > 2 * flops_estimate(144, 128)


def test_train_step_updates_targets_only_through_soft_update():
    rng = rng_stream(24)
    hyper = AgentHyperparams(hidden_width=8, hidden_layers=2, batch_size=4,
                             buffer_capacity=32, soft_tau=0.25)
    agent = DdpgAgent(rng, state_dim=4, n_elements=2, hyper=hyper)
    for i in range(6):
        agent.record(rng.standard_normal(4), rng.uniform(-1, 1, 4), float(i),
                     rng.standard_normal(4))
    targets_before = [p.copy() for p in param_arrays(agent.target_actor)]
    agent.train_step(rng)
    for t, before, o in zip(param_arrays(agent.target_actor), targets_before,
                            param_arrays(agent.actor)):
        expected = (1 - hyper.soft_tau) * before + hyper.soft_tau * o
        assert np.allclose(t, expected, rtol=1e-12)


def test_checkpoint_round_trip(tmp_path):
    rng = rng_stream(25)
    agent = DdpgAgent(rng, state_dim=4, n_elements=2, hyper=TINY)
    path = tmp_path / "ckpt.npz"
    save_checkpoint(path, agent)
    other = DdpgAgent(rng_stream(26), state_dim=4, n_elements=2, hyper=TINY)
    load_checkpoint(path, other)
    for a, b in zip(param_arrays(agent.actor), param_arrays(other.actor)):
        assert np.array_equal(a, b)
    bad = DdpgAgent(rng_stream(27), state_dim=5, n_elements=2, hyper=TINY)
    with pytest.raises(ValueError):
        load_checkpoint(path, bad)
