import numpy as np
import pytest

from marketsc.core import Dataset, LinearClassifier, demand_profile
from marketsc.errors import InputError
from marketsc.evaluation import (
    evaluate,
    evaluate_short_long,
    long_term_price,
    plain_accuracy,
    social_burden,
    welfare,
)
from marketsc.pricing import exact_price

H = LinearClassifier([1.0], -1.0)


def _one(x, b, label=1):
    return Dataset(np.array([[x]]), np.array([b]), np.array([label]))


def test_welfare_examples():
    assert welfare(H, _one(0.0, 0.1), 10.0) == 0.0
    assert welfare(H, _one(2.0, 2.0), 1.0) == 1.0
    assert welfare(H, _one(0.0, 2.0), 1.0) == pytest.approx(0.5)


def test_welfare_needs_budget():
    with pytest.raises(InputError):
        welfare(H, _one(0.0, 0.0), 1.0)


def test_burden_examples():
    assert social_burden(H, _one(3.0, 1.0), 2.0) == 0.0
    assert social_burden(LinearClassifier([1.0], -2.0), _one(0.0, 4.0), 0.5) == pytest.approx(0.25)
    assert social_burden(H, _one(0.0, 1.0), 0.0) == 0.0
    with pytest.raises(InputError):
        social_burden(H, _one(0.0, 1.0, label=0), 1.0)


def test_burden_ignores_budgets():
    # far too poor to move, still counted at full cost
    assert social_burden(LinearClassifier([1.0], -2.0), _one(0.0, 0.01), 1.0) == pytest.approx(200.0)


def test_three_user_hand_case():
    # x = 0, 0.5, 2 with labels 1, 0, 1 and budgets 0.5, 1, 1 at price 1:
    # user 0 needs 1 > 0.5 (stays), user 1 needs 0.5 <= 1 (moves), user 2 already positive
    S = Dataset(np.array([[0.0], [0.5], [2.0]]), np.array([0.5, 1.0, 1.0]), np.array([1, 0, 1]))
    m = evaluate(H, S, 1.0)
    assert m.accuracy == pytest.approx(1 / 3)
    assert m.n_movers == 1
    assert m.crossed_pos_ratio == 0.0 and m.crossed_neg_ratio == 1.0
    assert m.welfare == pytest.approx((1.0 + 1.0 - 0.5) / 2.5)
    assert m.burden == pytest.approx(1.0 / 1.5)


def test_infinite_price_equals_plain_accuracy():
    rng = np.random.default_rng(0)
    S = Dataset(rng.uniform(0, 2, (50, 1)), rng.lognormal(size=50), rng.integers(0, 2, 50))
    assert evaluate(H, S, 1e15).accuracy == plain_accuracy(H, S)


def test_free_price_everyone_positive():
    rng = np.random.default_rng(1)
    S = Dataset(rng.uniform(0, 2, (50, 1)), rng.lognormal(size=50), rng.integers(0, 2, 50))
    assert evaluate(H, S, 0.0).accuracy == pytest.approx(S.labels.mean())


def test_ratios_and_ranges():
    rng = np.random.default_rng(2)
    S = Dataset(rng.uniform(0, 2, (80, 1)), rng.lognormal(size=80), rng.integers(0, 2, 80))
    m = evaluate(H, S, long_term_price(H, S))
    assert 0 <= m.welfare <= 1 and m.burden >= 0
    assert 0 <= m.crossed_pos_ratio <= 1 and 0 <= m.crossed_neg_ratio <= 1
    assert m.n_movers == exact_price(demand_profile(H, S)).buyers


def test_short_equals_long_on_same_data():
    rng = np.random.default_rng(3)
    S = Dataset(rng.uniform(0, 2, (40, 1)), rng.lognormal(size=40), rng.integers(0, 2, 40))
    short, long_ = evaluate_short_long(H, S, long_term_price(H, S))
    assert short == long_


def test_doubling_distances_halves_long_price():
    rng = np.random.default_rng(4)
    X = rng.uniform(0, 1, (40, 1))
    S = Dataset(X, rng.lognormal(size=40), rng.integers(0, 2, 40))
    T = Dataset(1 - 2 * (1 - X), S.budgets, S.labels)  # distance to x = 1 doubles
    rho = long_term_price(H, S)
    _, long_ = evaluate_short_long(H, T, rho)
    assert long_.rho_used == pytest.approx(rho / 2, rel=1e-12)
    assert long_.n_movers == evaluate(H, S, rho).n_movers


def test_empty_test_demand_equals_premarket():
    S = Dataset(np.array([[2.0], [3.0]]), np.ones(2), np.array([1, 0]))
    short, long_ = evaluate_short_long(H, S, 0.7)
    assert short.accuracy == long_.accuracy == plain_accuracy(H, S)


def test_empty_dataset_rejected():
    with pytest.raises(InputError):
        evaluate(H, Dataset(np.empty((0, 1)), np.empty(0), np.empty(0, dtype=int)), 1.0)
