import math
import random

import numpy as np
import pytest

from spikemine import (
    ConfigError,
    NetworkConfig,
    StrongEdge,
    embed_pattern,
    parse_network_config,
    simulate,
    update_rates,
)
from spikemine.simulator import neuron_labels, write_network_config


def fast_config(**overrides):
    base = dict(num_neurons=8, weight_bound=0.0, duration=5.0, seed=3)
    base.update(overrides)
    return NetworkConfig(**base)


class TestRateUpdate:
    def test_midpoint(self):
        cfg = NetworkConfig()
        (rate,) = update_rates([cfg.rate_offset], cfg)
        assert rate == pytest.approx(cfg.lambda_max / 2, rel=1e-12)

    def test_resting_rate(self):
        cfg = NetworkConfig()
        (rate,) = update_rates([0.0], cfg)
        assert rate == pytest.approx(cfg.lambda_max / (1 + math.exp(cfg.rate_offset)), rel=1e-12)
        assert rate == pytest.approx(7.0, rel=5e-3)  # calibrated default

    def test_matches_reference_formula(self):
        cfg = NetworkConfig(lambda_max=777.0, rate_offset=2.5)
        rng = random.Random(1)
        inputs = [rng.uniform(-30, 30) for _ in range(200)]
        got = update_rates(inputs, cfg)
        for x, g in zip(inputs, got):
            ref = cfg.lambda_max / (1 + math.exp(-x + cfg.rate_offset))
            assert g == pytest.approx(ref, rel=1e-12)

    def test_bounded_open_interval(self):
        cfg = NetworkConfig()
        # strictly inside (0, lambda_max) wherever float64 resolves the sigmoid
        inner = update_rates(np.linspace(-30, 30, 1001) + cfg.rate_offset, cfg)
        assert np.all(inner > 0) and np.all(inner < cfg.lambda_max)
        # far outside, the product saturates but never overshoots
        outer = update_rates(np.linspace(-300, 300, 1001), cfg)
        assert np.all(outer >= 0) and np.all(outer <= cfg.lambda_max)


class TestSimulate:
    def test_seed_determinism(self):
        cfg = fast_config(weight_bound=0.4)
        a = simulate(cfg).sequence
        b = simulate(cfg).sequence
        assert a.events == b.events
        c = simulate(fast_config(weight_bound=0.4, seed=4)).sequence
        assert c.events != a.events

    def test_resting_spike_count_zero_weights(self):
        # offset chosen for a 20 Hz resting rate: 26 neurons x 50 s ~ 26k spikes
        cfg = NetworkConfig(num_neurons=26, weight_bound=0.0, duration=50.0, seed=11,
                            rate_offset=math.log(5000.0 / 20.0 - 1.0))
        run = simulate(cfg)
        assert 26_000 * 0.85 <= run.total_spikes <= 26_000 * 1.15
        # per-neuron counts near the binomial expectation of the resting rate
        steps = cfg.steps
        p = -math.expm1(-cfg.resting_rate * cfg.delta_t)
        mean, sigma = steps * p, math.sqrt(steps * p * (1 - p))
        per = {label: 0 for label in cfg.labels}
        for ev in run.sequence:
            per[ev.etype] += 1
        for label, n in per.items():
            assert abs(n - mean) <= 4 * sigma, f"{label}: {n} vs {mean:.0f}"

    def test_tiny_rate_is_nearly_silent(self):
        run = simulate(fast_config(lambda_max=0.001))
        assert run.total_spikes == 0

    def test_refractory_gap(self):
        cfg = fast_config(num_neurons=3, lambda_max=50_000.0, rate_offset=-5.0,
                          refractory_steps=4, duration=2.0)
        run = simulate(cfg)
        assert run.total_spikes > 0
        last = {}
        for ev in run.sequence:
            if ev.etype in last:
                assert ev.time - last[ev.etype] >= 4
            last[ev.etype] = ev.time

    def test_strong_edge_drives_target(self):
        cfg = NetworkConfig(
            num_neurons=2, weight_bound=0.0, duration=20.0, seed=5,
            strong_edges=(StrongEdge(0, 1, 11.0, 5),),
        )
        run = simulate(cfg)
        a_times = {ev.time for ev in run.sequence if ev.etype == "A"}
        b_times = {ev.time for ev in run.sequence if ev.etype == "B"}
        driven = sum(1 for t in a_times if t + 5 in b_times)
        assert driven >= 0.9 * len(a_times) > 0

    def test_uniform_rate_mode_scale(self):
        cfg = NetworkConfig(num_neurons=26, rate_mode="uniform", lambda_max=40.0,
                            duration=10.0, seed=9)
        run = simulate(cfg)
        # E[p] = 1 - (1 - e^-x)/x per bin at x = lambda_max*dt
        x = cfg.lambda_max * cfg.delta_t
        expected = cfg.steps * 26 * (1 - (1 - math.exp(-x)) / x)
        assert 0.8 * expected <= run.total_spikes <= 1.2 * expected

    def test_sequence_tick_matches_step(self):
        run = simulate(fast_config(delta_t=0.002, duration=1.0))
        assert run.sequence.tick_seconds == run.config.delta_t or float(
            run.sequence.tick_seconds
        ) == run.config.delta_t


class TestPatterns:
    def test_example1_diamond(self):
        cfg = embed_pattern(NetworkConfig(), "example1")
        labels = cfg.labels
        edges = {(labels[e.src], labels[e.dst], e.delay_steps) for e in cfg.strong_edges}
        assert edges == {
            ("A", "B", 5), ("B", "C", 5), ("B", "E", 5), ("C", "D", 5), ("E", "F", 5),
        }
        assert all(e.weight == cfg.relay_weight for e in cfg.strong_edges)

    def test_example2_weight_classes(self):
        cfg = embed_pattern(NetworkConfig(), "example2")
        labels = cfg.labels
        by_edge = {(labels[e.src], labels[e.dst]): e.weight for e in cfg.strong_edges}
        assert by_edge[("A", "B")] == cfg.strong_weight   # fan-out into a group
        assert by_edge[("B", "E")] == cfg.group_weight    # group-convergent fan-in
        assert by_edge[("J", "K")] == cfg.strong_weight

    def test_example2_group_chain(self):
        cfg = embed_pattern(NetworkConfig(), "example2")
        assert len(cfg.strong_edges) == 3 + 3 + 4 + 4 + 2

    def test_example3_heterogeneous_delays(self):
        cfg = embed_pattern(NetworkConfig(), "example3")
        labels = cfg.labels
        delays = {(labels[e.src], labels[e.dst]): e.delay_steps for e in cfg.strong_edges}
        assert delays[("X", "A")] == 5 and delays[("A", "D")] == 3
        assert delays[("D", "E")] == 7 and delays[("E", "F")] == 3

    def test_chain_k(self):
        cfg = embed_pattern(NetworkConfig(), "chain-10")
        assert len(cfg.strong_edges) == 9
        srcs = sorted(e.src for e in cfg.strong_edges)
        assert srcs == list(range(9))

    def test_none_clears(self):
        cfg = embed_pattern(embed_pattern(NetworkConfig(), "example1"), "none")
        assert cfg.strong_edges == ()

    def test_unknown_pattern(self):
        with pytest.raises(ConfigError):
            embed_pattern(NetworkConfig(), "zigzag")

    def test_pattern_must_fit_network(self):
        with pytest.raises(ConfigError):
            embed_pattern(NetworkConfig(num_neurons=6), "example3")  # X = index 23
        with pytest.raises(ConfigError):
            embed_pattern(NetworkConfig(num_neurons=4), "chain-5")


class TestConfigFile:
    def test_roundtrip(self, tmp_path):
        cfg = embed_pattern(
            NetworkConfig(num_neurons=12, seed=42, weight_seed=7, duration=3.5), "example2"
        )
        path = tmp_path / "net.cfg"
        write_network_config(cfg, path)
        again = parse_network_config(path)
        assert again == cfg

    def test_error_carries_line_number(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("num_neurons = 26\nwhat = 3\n")
        with pytest.raises(ConfigError, match=":2:"):
            parse_network_config(path)

    def test_bad_value(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("num_neurons = soup\n")
        with pytest.raises(ConfigError, match=":1:"):
            parse_network_config(path)

    def test_bad_edge(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("edge = A,B,11\n")
        with pytest.raises(ConfigError, match="FROM,TO,WEIGHT,DELAY_MS"):
            parse_network_config(path)

    def test_edge_indices_validated(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("num_neurons = 3\nedge = A,Z,5,5\n")
        with pytest.raises(ConfigError):
            parse_network_config(path)


def test_labels():
    assert neuron_labels(3) == ("A", "B", "C")
    assert neuron_labels(30)[0] == "N0"
    assert len(set(neuron_labels(30))) == 30
