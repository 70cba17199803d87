import math

import numpy as np
import pytest

import sbfe


def test_formulas():
    assert sbfe.uar([9, 7], [1, 3]) == 0.8
    assert abs(sbfe.local_criterion([0.5, 0.7, 0.9]) - math.sqrt(2 / 75)) < 1e-9
    assert sbfe.subset_size(100) == 10
    assert sbfe.removal_count(200, 10, 0.05) == 10
    assert sbfe.entropy([5, 5]) == 1.0


def test_errors_are_value_errors():
    with pytest.raises(sbfe.SbfeError):
        sbfe.uar([3, 0], [1, 0])
    with pytest.raises(ValueError):
        sbfe.Dataset(np.zeros((2, 1)), [0, 0])


def test_selection_recovers_planted_features():
    data, relevant, _, _ = sbfe.generate_synth(
        samples_per_class=60, n_relevant=2, n_irrelevant=8, separation=3.0, seed=4
    )
    assert data.n_samples == 120
    config = sbfe.SelectionConfig()
    config.target_count = 2
    config.seed = 1
    result = sbfe.run_selection(data, config)
    assert result.selected_ids == relevant
    assert len(result.removal_order()) == 8
    assert result.trace[0].iterations >= 5


def test_dataset_round_trip_from_numpy():
    x = np.arange(12, dtype=float).reshape(6, 2)
    d = sbfe.Dataset(x, [0, 1, 0, 1, 0, 1])
    assert np.array_equal(d.samples, x)
    assert d.column(1) == [1.0, 3.0, 5.0, 7.0, 9.0, 11.0]
    assert d.class_names == ["0", "1"]


def test_appearance_model():
    pos = np.zeros((1, 2))
    neg = np.array([[3.0, 4.0]])
    model = sbfe.build_model(pos, neg, [0, 1])
    assert sbfe.region_score(model, np.zeros(2)) == 5.0
    again = sbfe.AppearanceModel.from_json(model.to_json())
    assert again.negative_filter == model.negative_filter


def test_mutual_information():
    assert abs(sbfe.mutual_information([0, 1, 0, 1], [0, 1, 0, 1], 2) - 1.0) < 1e-12
