"""Tests of heatmap combination and summarization."""

from __future__ import annotations

import numpy as np
import pytest

from patrol.saliency.heatmap import (
    NO_REGIONS_TEXT,
    Heatmap,
    ShapeMismatch,
    combine_feature_maps,
    summarize_heatmap,
)


def test_weighted_sum_is_rectified():
    a = ((1.0, -2.0), (0.5, 0.0))
    b = ((1.0, 1.0), (-1.0, 2.0))
    h = combine_feature_maps((0.5, 1.0), (a, b), source_frame=3)
    assert h.source_frame == 3
    np.testing.assert_allclose(h.to_array(), [[1.5, 0.0], [0.0, 2.0]])


def test_negative_weights_are_allowed():
    h = combine_feature_maps((-1.0,), (((1.0, -1.0),),))
    assert h.grid == ((0.0, 1.0),)


@pytest.mark.parametrize(
    "weights, maps",
    [
        ((1.0,), ()),
        ((1.0, 2.0), (((1.0,),),)),
        ((1.0, 1.0), (((1.0, 2.0),), ((1.0,), (2.0,)))),
    ],
)
def test_mismatched_inputs_are_rejected(weights, maps):
    with pytest.raises(ShapeMismatch):
        combine_feature_maps(weights, maps)


def test_summary_of_empty_heatmap():
    summary = summarize_heatmap(Heatmap(grid=((0.0, 0.0), (0.0, 0.0)), source_frame=2))
    assert summary.text == NO_REGIONS_TEXT
    assert summary.regions == ()
    assert summary.source_frame == 2


def test_regions_are_ranked_by_activation():
    grid = (
        (0.9, 0.0, 0.0, 0.0),
        (0.0, 0.0, 0.0, 0.0),
        (0.0, 0.0, 0.6, 0.6),
        (0.0, 0.0, 0.6, 0.6),
    )
    summary = summarize_heatmap(Heatmap(grid=grid), activation_threshold=0.5)
    assert summary.total_regions == 2
    strongest, second = summary.regions
    assert (strongest.centroid_row, strongest.centroid_col) == (0.0, 0.0)
    assert strongest.cell_count == 1
    assert second.cell_count == 4
    assert (second.centroid_row, second.centroid_col) == (2.5, 2.5)
    assert summary.text == "2 salient regions; strongest at (0,0) covering 6.2% of frame"


def test_regions_are_truncated():
    grid = ((1.0, 0.0, 1.0, 0.0, 1.0),)
    summary = summarize_heatmap(Heatmap(grid=grid), max_regions=2)
    assert summary.total_regions == 3
    assert len(summary.regions) == 2
    assert summary.text.startswith("3 salient regions")


def test_single_region_text():
    summary = summarize_heatmap(Heatmap(grid=((0.0, 2.0), (0.0, 2.0))))
    assert summary.text == "1 salient region; strongest at (0.5,1) covering 50.0% of frame"


@pytest.mark.parametrize("threshold, regions", [(0.0, 1), (1.5, 1), (0.5, 0)])
def test_invalid_summary_parameters(threshold, regions):
    h = Heatmap(grid=((1.0,),))
    with pytest.raises(ValueError):
        summarize_heatmap(h, activation_threshold=threshold, max_regions=regions)


def _scalar_heatmap(weights, maps):
    rows, cols = len(maps[0]), len(maps[0][0])
    return [
        [max(0.0, sum(w * m[i][j] for w, m in zip(weights, maps))) for j in range(cols)]
        for i in range(rows)
    ]


def _random_instance(rng):
    k = int(rng.integers(1, 5))
    shape = (int(rng.integers(1, 7)), int(rng.integers(1, 7)))
    weights = tuple(float(w) for w in rng.uniform(-2.0, 2.0, size=k))
    maps = tuple(
        tuple(tuple(float(x) for x in row) for row in rng.uniform(-3.0, 3.0, size=shape))
        for _ in range(k)
    )
    return weights, maps


def test_random_heatmaps_match_scalar_sum():
    rng = np.random.default_rng(17)
    for _ in range(500):
        weights, maps = _random_instance(rng)
        h = combine_feature_maps(weights, maps).to_array()

        np.testing.assert_allclose(h, _scalar_heatmap(weights, maps), rtol=1e-12, atol=1e-12)
        assert np.all(h >= 0.0)

        # relu(x) - relu(-x) == x recovers the linear combination
        negated = combine_feature_maps(tuple(-w for w in weights), maps).to_array()
        linear = np.tensordot(np.asarray(weights), np.asarray(maps), axes=1)
        np.testing.assert_allclose(h - negated, linear, rtol=1e-12, atol=1e-12)

        order = rng.permutation(len(weights))
        permuted = combine_feature_maps(
            tuple(weights[i] for i in order), tuple(maps[i] for i in order)
        ).to_array()
        np.testing.assert_allclose(permuted, h, rtol=1e-12, atol=1e-12)


def test_random_regions_cover_the_salient_cells():
    rng = np.random.default_rng(19)
    for _ in range(200):
        grid = rng.uniform(0.0, 1.0, size=(int(rng.integers(1, 9)), int(rng.integers(1, 9))))
        summary = summarize_heatmap(
            Heatmap(grid=tuple(tuple(float(x) for x in row) for row in grid)),
            activation_threshold=0.6,
            max_regions=grid.size,
        )
        salient = int(np.count_nonzero(grid >= 0.6 * grid.max()))
        assert sum(r.cell_count for r in summary.regions) == salient
        assert summary.total_regions == len(summary.regions)
        means = [r.mean_activation for r in summary.regions]
        assert means == sorted(means, reverse=True)
