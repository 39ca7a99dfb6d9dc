import numpy as np
import pytest

from marketsc.core import (
    Dataset,
    DemandProfile,
    LinearClassifier,
    UserRecord,
    demand_all,
    demand_profile,
    demand_units,
    gini,
    predict,
)
from marketsc.errors import (
    DegenerateClassifierError,
    DimensionMismatchError,
    InputError,
    RecordInvariantError,
    UndefinedInequalityError,
)
from oracles import gini_pairs, point_to_hyperplane


@pytest.mark.parametrize("x, expected", [((2, 0), 1), ((1, 0), 1), ((0, 0), -1)])
def test_predict_boundary_counts_as_positive(x, expected):
    assert predict(LinearClassifier([1.0, 0.0], -1.0), x) == expected


def test_predict_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        predict(LinearClassifier([1.0, 0.0], 0.0), [1.0, 2.0, 3.0])


@pytest.mark.parametrize("w, tau, x, u", [
    ((3, 4), -10, (0, 0), 2.0),
    ((1, 0), -1, (2, 0), 0.0),
    ((1, 0), 0, (0.5, 0), 0.0),
])
def test_demand_units_examples(w, tau, x, u):
    assert demand_units(LinearClassifier(w, tau), x) == pytest.approx(u, abs=1e-15)


def test_demand_matches_projection_distance():
    rng = np.random.default_rng(3)
    for _ in range(50):
        w, tau, x = rng.normal(size=4), rng.normal(), rng.normal(size=4)
        h = LinearClassifier(w, tau)
        expect = point_to_hyperplane(x, w, tau) if h.scores(x[None])[0] < 0 else 0.0
        assert demand_units(h, x) == pytest.approx(expect, rel=1e-12, abs=1e-14)


def test_zero_weights_are_degenerate():
    h = LinearClassifier([0.0, 0.0], 1.0)
    with pytest.raises(DegenerateClassifierError):
        demand_units(h, [1.0, 1.0])
    with pytest.raises(DegenerateClassifierError):
        demand_all(h, np.ones((3, 2)))


def test_demand_profile_drops_positive_users():
    S = Dataset(np.array([[0.0], [0.5], [2.0]]), np.ones(3), np.array([0, 1, 1]))
    prof = demand_profile(LinearClassifier([1.0], -1.0), S)
    np.testing.assert_allclose(prof.units, [1.0, 0.5])
    np.testing.assert_allclose(prof.normalized, [1.0, 0.5])
    assert prof.origin.tolist() == [0, 1]
    assert prof.source_size == 3


def test_demand_profile_normalizes_by_budget():
    S = Dataset(np.array([[0.0], [0.5]]), np.array([2.0, 1.0]), np.array([0, 1]))
    prof = demand_profile(LinearClassifier([1.0], -1.0), S)
    np.testing.assert_allclose(prof.normalized, [0.5, 0.5])


def test_demand_profile_all_positive_is_empty():
    S = Dataset(np.array([[3.0], [4.0]]), np.ones(2), np.array([1, 1]))
    prof = demand_profile(LinearClassifier([1.0], -1.0), S)
    assert len(prof) == 0 and prof.source_size == 2


def test_demand_profile_of_empty_dataset():
    S = Dataset(np.empty((0, 2)), np.empty(0), np.empty(0, dtype=int))
    assert len(demand_profile(LinearClassifier([1.0, 1.0], 0.0), S)) == 0


def test_zero_budget_users_never_enter_the_profile():
    S = Dataset(np.array([[0.0], [0.2]]), np.array([0.0, 1.0]), np.array([0, 1]))
    prof = demand_profile(LinearClassifier([1.0], -1.0), S)
    assert prof.origin.tolist() == [1]
    assert prof.source_size == 2


@pytest.mark.parametrize("b, g", [((5, 5, 5, 5), 0.0), ((0, 3.7), 0.5), ((1, 2, 3, 4), 0.25)])
def test_gini_examples(b, g):
    assert gini(b) == pytest.approx(g, abs=1e-15)


def test_gini_against_pairwise_formula():
    rng = np.random.default_rng(0)
    for n in (1, 2, 7, 40):
        b = rng.lognormal(size=n)
        assert gini(b) == pytest.approx(gini_pairs(b), rel=1e-12, abs=1e-15)


def test_gini_rejects_all_zero_and_negative():
    with pytest.raises(UndefinedInequalityError):
        gini([0.0, 0.0])
    with pytest.raises(InputError):
        gini([])
    with pytest.raises(InputError):
        gini([1.0, -1.0])


def test_dataset_shape_and_label_checks():
    with pytest.raises(DimensionMismatchError):
        Dataset(np.ones((3, 2)), np.ones(2), np.zeros(3, dtype=int))
    with pytest.raises(InputError):
        Dataset(np.ones((2, 1)), np.ones(2), np.array([0, 2]))


def test_dataset_strict_validation_names_the_row():
    S = Dataset(np.array([[1.0], [-0.5]]), np.ones(2), np.array([0, 1]))
    with pytest.raises(RecordInvariantError) as err:
        S.validate(strict=True)
    assert err.value.row == 1
    S.validate(strict=False)
    T = Dataset(np.ones((2, 1)), np.array([1.0, 0.0]), np.array([0, 1]))
    with pytest.raises(RecordInvariantError):
        T.validate(strict=True)


def test_dataset_records_round_trip():
    recs = [UserRecord(np.array([1.0, 2.0]), 3.0, 1), UserRecord(np.array([0.0, 1.0]), 1.5, 0)]
    S = Dataset.from_records(recs)
    assert len(S) == 2 and S.dim == 2
    assert S.y.tolist() == [1, -1]
    back = list(S)
    assert back[0].signed_label == 1 and back[1].budget == 1.5


def test_demand_profile_rejects_nonpositive_points():
    with pytest.raises(InputError):
        DemandProfile.from_pairs([1.0, 0.0])
    with pytest.raises(InputError):
        DemandProfile.from_pairs([1.0, 2.0], [1.0, 0.0])
