import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rimaug import LambdaDistribution, distribution_mean, parse_spec, sample_lambda
from rimaug.distributions import make_rng, spawn
from rimaug.errors import ConfigError, DomainError


@pytest.mark.parametrize(
    "text, mean",
    [("uniform", 0.5), ("beta:2,5", 2 / 7), ("beta:2,2", 0.5), ("beta:0.5,0.5", 0.5), ("constant:0", 0.0),
     ("constant:0.25", 0.25)],
)
def test_means(text, mean):
    assert distribution_mean(parse_spec(text)) == pytest.approx(mean, rel=1e-15)


@pytest.mark.parametrize("text", ["uniform", "beta:2,5", "constant:0.3"])
def test_string_round_trip(text):
    assert parse_spec(str(parse_spec(text))) == parse_spec(text)


@pytest.mark.parametrize("text", ["gauss", "beta:1", "beta:-1,2", "constant:1", "constant:-0.1", "beta:a,b"])
def test_bad_specs(text):
    with pytest.raises((ConfigError, DomainError)):
        parse_spec(text)


@pytest.mark.parametrize("text", ["uniform", "beta:2,5", "beta:0.5,0.5"])
def test_sample_support_and_mean(text):
    spec = parse_spec(text)
    lam = sample_lambda(spec, (200000,), make_rng(11))
    assert lam.min() >= 0.0 and lam.max() < 1.0
    se = lam.std() / np.sqrt(lam.size)
    assert abs(lam.mean() - spec.mean) < 5 * se


def test_second_moment():
    spec = parse_spec("beta:2,5")
    lam = sample_lambda(spec, 200000, make_rng(1))
    assert np.mean(lam**2) == pytest.approx(spec.second_moment, rel=0.01)


def test_constant_zero_is_identity():
    spec = LambdaDistribution.constant(0.0)
    assert spec.is_identity
    assert np.all(sample_lambda(spec, (3, 4), make_rng(0)) == 0.0)


@given(st.integers(0, 2**32 - 1))
def test_seeded_draws_are_reproducible(seed):
    a = sample_lambda("uniform", 5, make_rng(seed))
    b = sample_lambda("uniform", 5, make_rng(seed))
    assert np.array_equal(a, b)


def test_spawned_streams_differ():
    g1, g2 = spawn(7, 2)
    assert not np.array_equal(g1.random(4), g2.random(4))
    h1, _ = spawn(7, 2)
    g1b, _ = spawn(7, 2)
    assert np.array_equal(h1.random(4), g1b.random(4))
