import math

import numpy as np
import pytest

from momentmatch import specimens
from momentmatch.core import Variant
from momentmatch.errors import NoInteriorMaximumError
from momentmatch.inference import grad_log_partition, log_partition
from momentmatch.learning import Status, fit
from momentmatch.oracle import brute_force_expectation, mle_oracle_1d, naive_log_partition
from momentmatch.specimens import rows


def test_naive_log_partition(bernoulli):
    assert naive_log_partition(bernoulli, {}, [1.0]) == pytest.approx(1.3132617, abs=1e-7)
    assert naive_log_partition(bernoulli, {}, [0.0]) == pytest.approx(math.log(2), abs=1e-15)
    assert naive_log_partition(bernoulli, {}, [1000.0]) == math.inf
    assert log_partition(bernoulli, {}, [1000.0]) == pytest.approx(1000.0)


def test_brute_force_expectation(bernoulli, mixture):
    np.testing.assert_allclose(brute_force_expectation(bernoulli, {}, [0.0]), [0.5])
    # x=1: T(1,0) = [0,0,1], T(1,1) = [1,1,0], u uniform
    np.testing.assert_allclose(brute_force_expectation(mixture, {"x": 1}, [0.0, 0.0, 0.0]), [0.5, 0.5, 0.5])
    # arbitrary f: probability that u = 1
    got = brute_force_expectation(mixture, {}, [0.0, 0.0, 0.0], lambda c: [c["u"]])
    np.testing.assert_allclose(got, [0.5])


def test_oracle_agreement_random():
    rng = np.random.default_rng(99)
    for k in range(50):
        variant = list(Variant)[k % 4]
        spec = specimens.random_family(rng, variant)
        theta = rng.uniform(-3, 3, spec.stat_dim)
        clamp = {n: int(rng.integers(c)) for n, c in zip(spec.names, spec.shape) if rng.random() < 0.4}
        assert abs(naive_log_partition(spec, clamp, theta) - log_partition(spec, clamp, theta)) <= 1e-10
        np.testing.assert_allclose(
            brute_force_expectation(spec, clamp, theta), grad_log_partition(spec, clamp, theta), rtol=0, atol=1e-10
        )


def test_mle_oracle_1d(bernoulli):
    assert mle_oracle_1d(bernoulli, rows(bernoulli, 1, 1, 1, 0), (-10, 10, 2001)) == pytest.approx(math.log(3), abs=1e-8)
    assert mle_oracle_1d(bernoulli, rows(bernoulli, 1, 0)) == pytest.approx(0.0, abs=1e-8)
    with pytest.raises(NoInteriorMaximumError):
        mle_oracle_1d(bernoulli, rows(bernoulli, 1, 1, 1))
    with pytest.raises(ValueError):
        mle_oracle_1d(specimens.logistic(), rows(specimens.logistic(), (0, 1)))


def test_fit_matches_oracle_1d():
    rng = np.random.default_rng(5)
    checked = 0
    for _ in range(20):
        variant = [Variant.PLAIN, Variant.CONDITIONAL][checked % 2]
        spec = specimens.random_family(rng, variant, max_dim=1)
        data = specimens.random_dataset(rng, spec, 12)
        try:
            expected = mle_oracle_1d(spec, data, (-30, 30, 601))
        except NoInteriorMaximumError:
            continue
        res = fit(spec, data)
        assert res.status is Status.CONVERGED
        assert res.theta_hat[0] == pytest.approx(expected, abs=1e-5)
        checked += 1
    assert checked >= 10
