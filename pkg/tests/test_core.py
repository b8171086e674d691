"""
Tests for datasets, codification, parameters and partitions
"""

import logging

import numpy as np
import pytest

from arclust.analytics.core import (
    INTERACTION_PRESETS,
    Codification,
    DataError,
    Dataset,
    DissimParams,
    Family,
    Partition,
    Scheme,
    build_interaction,
    cluster_proportions,
    encode_classes,
)


class TestDataset:
    def test_shapes_and_defaults(self):
        data = Dataset(x=np.zeros((3, 2)), s=[1.0, -1.0, 1.0])
        assert (data.n, data.d, data.p) == (3, 2, 1)
        assert data.ids == ("0", "1", "2")
        assert not data.x.flags.writeable

    def test_rejects_row_mismatch(self):
        with pytest.raises(DataError, match="records"):
            Dataset(x=np.zeros((3, 2)), s=np.zeros((2, 1)))

    def test_rejects_nan(self):
        x = np.zeros((2, 2))
        x[1, 0] = np.nan
        with pytest.raises(DataError, match="NaN"):
            Dataset(x=x, s=np.zeros((2, 1)))

    def test_rejects_duplicate_ids(self):
        with pytest.raises(DataError, match="unique"):
            Dataset(x=np.zeros((2, 1)), s=np.zeros((2, 1)), ids=("a", "a"))

    def test_signed_class_matrix_lists_positive_first(self):
        data = Dataset(x=np.zeros((4, 1)), s=[[-1.0], [1.0], [1.0], [-1.0]])
        matrix, names = data.class_matrix()
        assert names == ("1", "-1")
        np.testing.assert_array_equal(matrix, [[0, 1], [1, 0], [1, 0], [0, 1]])
        assert data.record_classes() == ("-1", "1", "1", "-1")

    def test_counts_class_matrix(self):
        data = Dataset(x=np.zeros((2, 1)), s=[[3.0, 1.0], [0.0, 2.0]], s_columns=("a", "b"))
        matrix, names = data.class_matrix()
        assert names == ("a", "b")
        np.testing.assert_array_equal(matrix, data.s)
        assert data.record_classes() == ("a", "b")

    def test_categorical_labels_take_precedence(self):
        data = Dataset(
            x=np.zeros((3, 1)),
            s=[[1, 0], [0, 1], [1, 0]],
            class_labels=("circle", "square", "circle"),
        )
        _, names = data.class_matrix()
        assert names == ("circle", "square")


class TestEncodeClasses:
    def test_signed_first_category_is_positive(self):
        s = encode_classes(["b", "a", "b"], Codification(Scheme.SIGNED))
        np.testing.assert_array_equal(s, [[-1], [1], [-1]])

    def test_signed_rejects_three_categories(self):
        with pytest.raises(DataError, match="binary"):
            encode_classes(["a", "b", "c"], Codification("signed"))

    def test_signed_rejects_a_single_category(self):
        with pytest.raises(DataError, match="got 1 categories"):
            encode_classes(["a", "a", "a"], Codification(Scheme.SIGNED))

    def test_one_hot_with_explicit_order(self):
        s = encode_classes(["x", "y"], Codification("one_hot", categories=("y", "x")))
        np.testing.assert_array_equal(s, [[0, 1], [1, 0]])

    def test_one_hot_limit(self):
        with pytest.raises(DataError, match="at most 2"):
            encode_classes(["a", "b", "c"], Codification("one_hot", q=2))

    def test_unknown_category(self):
        with pytest.raises(DataError, match="Unknown categories"):
            encode_classes(["a", "z"], Codification("one_hot", categories=("a", "b")))

    def test_counts_must_be_integers(self):
        with pytest.raises(DataError, match="integer"):
            encode_classes([[1.5, 2.0]], Codification("counts"))

    def test_counts_must_be_non_negative(self):
        with pytest.raises(DataError, match="non-negative"):
            encode_classes([[-1.0, 2.0]], Codification("counts"))

    def test_fractions_normalize_rows(self):
        s = encode_classes([[1, 3], [2, 2]], Codification("fractions"))
        np.testing.assert_allclose(s, [[0.25, 0.75], [0.5, 0.5]])

    def test_fractions_reject_empty_rows(self):
        with pytest.raises(DataError, match="positive total"):
            encode_classes([[0, 0]], Codification("fractions"))

    def test_raw_keeps_values(self):
        s = encode_classes([0.5, -2.0], Codification("raw"))
        np.testing.assert_array_equal(s, [[0.5], [-2.0]])


class TestDissimParams:
    def test_required_fields(self):
        with pytest.raises(ValueError, match="requires 'v'"):
            DissimParams(Family.DELTA2, u=1.0)
        with pytest.raises(ValueError, match="requires 'v_matrix'"):
            DissimParams(Family.DELTA4, u=1.0, v=1.0, w=1.0)

    def test_rejects_asymmetric_matrix(self):
        with pytest.raises(ValueError, match="symmetric"):
            DissimParams.delta1(np.zeros((2, 2)), [[0, 1], [0, 0]])

    def test_rejects_negative_strength(self):
        with pytest.raises(ValueError, match="u must be"):
            DissimParams.delta3(-0.5)

    def test_constant_rescaling_warning(self, caplog):
        with caplog.at_level(logging.WARNING):
            DissimParams.delta2(1.0, 0.0)
        assert "constant rescaling" in caplog.text

    def test_delta4_strength_above_one_warns(self, caplog):
        with caplog.at_level(logging.WARNING):
            DissimParams.delta4(0.98, 20.0, 0.05, [[1.0, -1.0], [-1.0, 0.0]])
        assert "attracted pairs negative" not in caplog.text
        with caplog.at_level(logging.WARNING):
            DissimParams.delta4(2.0, 20.0, 0.05, [[1.0, -1.0], [-1.0, 0.0]])
        assert "attracted pairs negative" in caplog.text

    def test_check_dimension(self):
        params = DissimParams.delta1(np.zeros((2, 2)), np.eye(2))
        params.check_dimension(2)
        with pytest.raises(DataError, match="2x2"):
            params.check_dimension(3)

    def test_unperturbed(self):
        assert DissimParams.delta2(2.0, 3.0).unperturbed() == DissimParams.delta2(0.0, 3.0)
        zero = DissimParams.delta1([[1.0]], [[4.4]]).unperturbed()
        assert zero.is_unperturbed()
        assert not DissimParams.delta3(0.1).is_unperturbed()

    def test_dict_round_trip(self):
        params = DissimParams.delta4(0.5, 2.0, 0.1, [[1, -1], [-1, 0]])
        restored = DissimParams.from_dict(params.to_dict())
        assert restored.family == Family.DELTA4
        assert restored.u == 0.5 and restored.w == 0.1
        np.testing.assert_array_equal(restored.v_matrix, params.v_matrix)

    def test_label(self):
        assert DissimParams.delta2(0.5, 20.0).label() == "delta2 u=0.5 v=20"
        assert DissimParams.delta1([[0.0]], [[4.4]]).label() == "delta1 U=0 V=4.4"


class TestInteraction:
    def test_preset_shapes(self):
        for name, matrix in INTERACTION_PRESETS.items():
            matrix = np.array(matrix)
            assert matrix.shape[0] == matrix.shape[1], name

    def test_scaling(self):
        interaction = build_interaction("two_class_repel_first", v0=0.5)
        np.testing.assert_array_equal(interaction.v, [[0.5, -0.5], [-0.5, 0.0]])
        np.testing.assert_array_equal(interaction.symmetric_v(), interaction.v)

    def test_asymmetric_guideline_is_symmetrized(self, caplog):
        with caplog.at_level(logging.WARNING):
            v = build_interaction("crdc_1", v0=2.0).symmetric_v()
        np.testing.assert_array_equal(v, v.T)
        assert v[0, 1] == pytest.approx(-1.0)
        assert "not symmetric" in caplog.text

    def test_scale_is_homogeneous(self, rng):
        for _ in range(100):
            p = int(rng.integers(1, 7))
            guideline = rng.integers(-1, 2, size=(p, p))
            if rng.uniform() < 0.5:
                guideline = np.triu(guideline) + np.triu(guideline, 1).T
            v0, factor = rng.uniform(0.01, 5.0), rng.uniform(0.01, 5.0)
            base = build_interaction(guideline, v0=v0)
            scaled = build_interaction(guideline, v0=factor * v0)

            np.testing.assert_allclose(scaled.v, factor * base.v, rtol=1e-12)
            np.testing.assert_allclose(scaled.symmetric_v(), factor * base.symmetric_v(), rtol=1e-12)
            s1, s2 = rng.uniform(0, 1, size=p), rng.uniform(0, 1, size=p)
            assert s1 @ scaled.symmetric_v() @ s2 == pytest.approx(
                factor * (s1 @ base.symmetric_v() @ s2), rel=1e-9, abs=1e-12
            )

    def test_rejects_bad_entries(self):
        with pytest.raises(ValueError, match="-1, 0 or 1"):
            build_interaction([[2, 0], [0, 1]])

    def test_rejects_non_positive_scale(self):
        with pytest.raises(ValueError, match="v0"):
            build_interaction([[1, 0], [0, 1]], v0=0.0)

    def test_unknown_preset(self):
        with pytest.raises(ValueError, match="Unknown interaction preset"):
            build_interaction("crdc_9")


class TestPartition:
    def test_from_labels_compacts_in_order_of_appearance(self):
        partition = Partition.from_labels([5, 5, 2, 7, 2])
        np.testing.assert_array_equal(partition.labels, [0, 0, 1, 2, 1])
        assert partition.k == 3
        np.testing.assert_array_equal(partition.sizes(), [2, 2, 1])

    def test_from_labels_with_classes(self):
        classes = np.array([[1, 0], [0, 1], [1, 0], [1, 0]])
        partition = Partition.from_labels([0, 0, 1, 1], classes=classes)
        np.testing.assert_allclose(partition.proportions, [[0.5, 0.5], [1.0, 0.0]])

    def test_rejects_empty_cluster(self):
        with pytest.raises(ValueError, match="at least once"):
            Partition(np.array([0, 0, 2]), 3)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError, match="0..k-1"):
            Partition(np.array([0, 1, 2]), 2)

    def test_proportions_with_counts(self):
        labels = np.array([0, 1, 1])
        counts = np.array([[2.0, 2.0], [1.0, 0.0], [0.0, 3.0]])
        np.testing.assert_allclose(
            cluster_proportions(labels, 2, counts), [[0.5, 0.5], [0.25, 0.75]]
        )
