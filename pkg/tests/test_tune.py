"""
Tests for grid construction, feasibility selection and tuning runs
"""

import numpy as np
import pytest

from arclust.analytics.core import DissimParams, Family
from arclust.analytics.kernelize import KernelSpec
from arclust.analytics.tune import GridCell, build_grid, resolve_matrix, select_best, tune


def _cell(index, unfairness, silhouette, **kwargs):
    return GridCell(
        "average",
        2,
        index,
        DissimParams.delta3(float(index)),
        unfairness=unfairness,
        avg_silhouette=silhouette,
        **kwargs,
    )


class TestSelectBest:
    def test_lowest_unfairness_above_threshold(self):
        cells = [_cell(0, 0.5, 0.6), _cell(1, 0.1, 0.1), _cell(2, 0.2, 0.4)]
        assert select_best(cells, 0.3).param_index == 2

    def test_no_feasible_cell(self):
        cells = [_cell(0, 0.5, 0.1), _cell(1, 0.1, 0.2)]
        assert select_best(cells, 0.3) is None

    def test_threshold_is_inclusive(self):
        assert select_best([_cell(0, 0.4, 0.3)], 0.3).param_index == 0

    def test_ties_go_to_lowest_index(self):
        cells = [_cell(3, 0.2, 0.9), _cell(1, 0.2, 0.5), _cell(2, 0.2, 0.7)]
        assert select_best(cells, 0.0).param_index == 1

    def test_failed_and_baseline_cells_never_win(self):
        cells = [
            _cell(0, 0.0, 0.9, baseline=True),
            GridCell("average", 2, 1, DissimParams.delta3(1.0), success=False, error="boom"),
            _cell(2, 0.3, 0.5),
        ]
        assert select_best(cells, 0.0).param_index == 2

    def test_matches_exhaustive_search(self):
        rng = np.random.default_rng(2024)
        for _ in range(300):
            size = int(rng.integers(1, 12))
            unfair = rng.choice(np.linspace(0, 1, 6), size=size)
            sil = rng.uniform(-1, 1, size=size)
            tau = float(rng.uniform(-1, 1))
            cells = [_cell(i, float(unfair[i]), float(sil[i])) for i in range(size)]

            feasible = [i for i in range(size) if sil[i] >= tau]
            chosen = select_best(cells, tau)
            if not feasible:
                assert chosen is None
            else:
                expected = min(feasible, key=lambda i: (unfair[i], i))
                assert chosen.param_index == expected


class TestBuildGrid:
    def test_delta2_cartesian_order(self):
        grid = build_grid("delta2", {"u": [0.0, 1.0, 2.0], "v": [5.0, 20.0]}, p=1)
        assert len(grid) == 6
        assert [(g.u, g.v) for g in grid[:3]] == [(0.0, 5.0), (0.0, 20.0), (1.0, 5.0)]
        assert all(g.family == Family.DELTA2 for g in grid)

    def test_delta3(self):
        grid = build_grid(Family.DELTA3, {"u": [0.0, 0.5]}, p=3)
        assert [g.u for g in grid] == [0.0, 0.5]

    def test_delta1_interaction_ladder(self):
        grid = build_grid(
            "delta1", {"v0": [1.0, 2.0], "v_tilde": ["two_class_repel_first"]}, p=2
        )
        assert len(grid) == 2
        np.testing.assert_array_equal(grid[0].u_matrix, np.zeros((2, 2)))
        np.testing.assert_array_equal(grid[1].v_matrix, [[2.0, -2.0], [-2.0, 0.0]])

    def test_delta1_inline_matrices(self):
        grid = build_grid("delta1", {"u_matrix": ["0", "1"], "v_matrix": ["0", "0.5"]}, p=1)
        assert [(g.u_matrix[0, 0], g.v_matrix[0, 0]) for g in grid] == [
            (0.0, 0.0),
            (0.0, 0.5),
            (1.0, 0.0),
            (1.0, 0.5),
        ]

    def test_delta4(self):
        grid = build_grid(
            "delta4",
            {"u": [0.0, 0.5], "v": [20.0], "w": [0.05], "v_matrix": ["two_class_repel_first"]},
            p=2,
        )
        assert len(grid) == 2
        assert grid[1].u == 0.5 and grid[1].w == 0.05

    def test_missing_values(self):
        with pytest.raises(ValueError, match="'v'"):
            build_grid("delta2", {"u": [1.0]}, p=1)

    def test_delta1_needs_interaction(self):
        with pytest.raises(ValueError, match="v_tilde"):
            build_grid("delta1", {"u_matrix": ["0"]}, p=1)


class TestResolveMatrix:
    def test_scalar_is_scaled_identity(self):
        np.testing.assert_array_equal(resolve_matrix("2", 3), 2.0 * np.eye(3))

    def test_preset(self):
        np.testing.assert_array_equal(
            resolve_matrix("two_class_repel_first", 2), [[1.0, -1.0], [-1.0, 0.0]]
        )

    def test_interaction_is_symmetrized(self):
        matrix = resolve_matrix("0,1;0,0", 2, interaction=True)
        np.testing.assert_array_equal(matrix, [[0.0, 0.5], [0.5, 0.0]])

    def test_wrong_shape(self):
        with pytest.raises(ValueError, match="2x2"):
            resolve_matrix("1,2,3", 2)


class TestTune:
    def _grid(self):
        return [DissimParams.delta3(0.0), DissimParams.delta3(0.5), DissimParams.delta3(4.0)]

    def test_cells_and_selection(self, blobs):
        result = tune(blobs, ["average", "kmeans_mds"], self._grid(), k=[2, 3], tau=0.5, seed=3)
        assert len(result.cells) == 3 * 2 * 2
        assert set(result.best) == {("average", 2), ("average", 3), ("kmeans_mds", 2), ("kmeans_mds", 3)}
        assert all(cell.success for cell in result.cells)

        chosen = result.best[("average", 3)]
        group = [c for c in result.cells if c.method == "average" and c.k == 3]
        assert chosen is select_best(group, 0.5)
        assert chosen.avg_silhouette >= 0.5

    def test_embedded_silhouette_for_partitional_methods(self, blobs):
        result = tune(blobs, ["average", "kmeans_mds"], self._grid()[:1], k=3, seed=3)
        by_method = {cell.method: cell for cell in result.cells}
        assert by_method["average"].embedded_silhouette is None
        assert by_method["kmeans_mds"].embedded_silhouette == pytest.approx(
            by_method["kmeans_mds"].avg_silhouette
        )
        assert "embedded_silhouette[1]" in by_method["kmeans_mds"].to_row()

    def test_baselines(self, blobs):
        result = tune(blobs, ["complete"], self._grid()[1:], k=3)
        reference = result.baselines[("complete", 3)]
        assert reference.baseline and reference.param_index == -1
        assert reference.params.u == 0.0
        assert reference.unfairness == pytest.approx(0.0, abs=1e-12)
        assert tune(blobs, ["complete"], self._grid(), k=3, baseline=False).baselines == {}

    def test_deterministic_across_workers(self, blobs):
        first = tune(blobs, ["kmeans_mds", "single"], self._grid(), k=[2, 3], seed=9, n_jobs=1)
        second = tune(blobs, ["kmeans_mds", "single"], self._grid(), k=[2, 3], seed=9, n_jobs=3)
        assert [c.to_row() for c in first.cells] == [c.to_row() for c in second.cells]

    def test_failures_become_cells(self, blobs):
        result = tune(
            blobs, ["charged_ward"], self._grid()[:2], k=2, kernel=KernelSpec("linear")
        )
        assert all(not cell.success for cell in result.cells)
        assert "Euclidean" in result.cells[0].error
        assert result.best[("charged_ward", 2)] is None
        assert result.infeasible() == [("charged_ward", 2)]

    def test_to_dict(self, blobs):
        payload = tune(blobs, ["average"], self._grid(), k=2, tau=-1.0).to_dict()
        assert payload["family"] == "delta3"
        assert len(payload["grid"]) == 3
        assert payload["best"][0]["param_index"] is not None
        assert payload["summary"][0]["feasible"] is True

    @pytest.mark.parametrize(
        "kwargs, message",
        [
            ({"grid": []}, "empty"),
            ({"tau": 1.5}, "tau"),
            ({"methods": ["ward"]}, "Unknown methods"),
            ({"n_jobs": 0}, "n_jobs"),
            (
                {"grid": [DissimParams.delta3(0.0), DissimParams.delta2(0.0, 1.0)]},
                "mixes families",
            ),
        ],
    )
    def test_validation(self, blobs, kwargs, message):
        arguments = {"methods": ["average"], "grid": self._grid(), "k": 2}
        arguments.update(kwargs)
        with pytest.raises(ValueError, match=message):
            tune(blobs, **arguments)
