import numpy as np
import pytest

from wfpc.adversary import CAUTIOUS, NONE, AdversaryConfig, adversary_opinion, build_population
from wfpc.protocol import ProtocolConfig
from wfpc.sim import ExperimentConfig, run_once
from wfpc.weights import InvalidParameterError, zipf_weights


def test_no_adversary():
    pop = build_population(AdversaryConfig(0.0), 10, s=1)
    assert pop.n_honest == 10 and not pop.adversarial.any()
    np.testing.assert_allclose(pop.weights.values, zipf_weights(1, 10).values, atol=1e-15)


def test_quarter_of_a_thousand():
    pop = build_population(AdversaryConfig(0.25), 1000, s=1)
    assert pop.adversarial.sum() == 250
    np.testing.assert_allclose(pop.weights.values[pop.adversarial], 0.001, rtol=0, atol=1e-15)
    assert pop.weights.values[pop.honest].sum() == pytest.approx(0.75, abs=1e-12)


def test_one_of_ten():
    pop = build_population(AdversaryConfig(0.1), 10, s=1)
    assert pop.adversarial.tolist() == [False] * 9 + [True]
    np.testing.assert_allclose(pop.weights.values[9], 0.1, atol=1e-15)
    np.testing.assert_allclose(pop.weights.values[:9], 0.9 * zipf_weights(1, 9).values, atol=1e-15)
    assert pop.roles[-1] == "adversarial"


def test_rounding_preserves_adversarial_mass():
    pop = build_population(AdversaryConfig(0.33), 10, s=0)
    assert pop.adversarial.sum() == 3
    assert pop.weights.values[pop.adversarial].sum() == pytest.approx(0.33, abs=1e-12)


def test_explicit_honest_weights():
    pop = build_population(AdversaryConfig(0.5), 4, honest=zipf_weights(0, 2))
    np.testing.assert_allclose(pop.weights.values, [0.25] * 4)
    with pytest.raises(InvalidParameterError):
        build_population(AdversaryConfig(0.5), 4, honest=zipf_weights(0, 3))


@pytest.mark.parametrize("q", [1.0, 1.2, -0.1])
def test_rejects_q(q):
    with pytest.raises(InvalidParameterError):
        AdversaryConfig(q)


def test_strategy_none_ignores_q():
    pop = build_population(AdversaryConfig(0.4, NONE), 10)
    assert not pop.adversarial.any()
    with pytest.raises(InvalidParameterError):
        AdversaryConfig(0.1, "berserk")


@pytest.mark.parametrize(
    "opinions, weights, expected",
    [
        ([1, 0], [0.5, 0.25], 0),
        ([1, 1, 1], [0.2, 0.3, 0.5], 0),
        ([0, 0], [0.2, 0.3], 1),
        ([1, 0, 1, 0], [0.25, 0.25, 0.125, 0.125], 0),
        ([0, 1], [0.6, 0.4], 1),
    ],
)
def test_minority_opinion(opinions, weights, expected):
    assert adversary_opinion(opinions, weights) == expected


def test_adversary_replies_lag_one_round():
    cfg = ExperimentConfig(ProtocolConfig(N=50, k=10), AdversaryConfig(0.2, CAUTIOUS), repetitions=1)
    for seed in range(5):
        rec = run_once(cfg, seed, trace=True)
        pop = build_population(cfg.adversary, 50, cfg.s)
        honest_mass = pop.weights.values[pop.honest]
        before = np.vstack([rec.trace["initial"], rec.trace["opinions"][:-1]])
        expected = [adversary_opinion(row, honest_mass) for row in before]
        assert rec.trace["adversary"].tolist() == expected
        # opinion 1 starts out holding more than p0 of the honest mass
        assert expected[0] == 0


def test_none_matches_honest_only_run():
    base = ExperimentConfig(ProtocolConfig(N=30, k=8), AdversaryConfig(0.0), repetitions=1)
    none = ExperimentConfig(ProtocolConfig(N=30, k=8), AdversaryConfig(0.3, NONE), repetitions=1)
    a, b = run_once(base, 17), run_once(none, 17)
    assert a.queries.tobytes() == b.queries.tobytes()
    assert np.array_equal(a.final_opinions, b.final_opinions)
    assert a.rounds == b.rounds
