"""Normalization, correlation, column elimination, PCA."""

import numpy as np
import pytest

from neuralfp.preprocess import (
    ReductionError,
    correlation_matrix,
    fit_normalizer,
    fit_pca,
    fit_pipeline,
    reduce_dependent_columns,
    reduction_report,
)


class TestNormalizer:
    def test_population_std_by_hand(self):
        X = np.array([[0.0, 2.0], [2.0, 2.0], [4.0, 2.0]])
        norm = fit_normalizer(X)
        assert norm.mean.tolist() == [2.0, 2.0]
        # population std of column 0 is sqrt(8/3); column 1 is constant
        assert norm.std[0] == pytest.approx(np.sqrt(8.0 / 3.0))
        assert norm.constant.tolist() == [False, True]
        Xn = norm.transform(X)
        expect = 2.0 / np.sqrt(8.0 / 3.0)  # = sqrt(1.5)
        assert Xn[:, 0] == pytest.approx([-expect, 0.0, expect])
        assert not Xn[:, 1].any()

    def test_requires_two_rows(self):
        with pytest.raises(ReductionError, match="2 rows"):
            fit_normalizer(np.ones((1, 4)))

    def test_epsilon_threshold(self):
        X = np.zeros((4, 1))
        X[:, 0] = 5.0
        X[0, 0] = 5.0 + 1e-12
        assert fit_normalizer(X).constant[0]


class TestCorrelation:
    def test_small_exact(self):
        X = np.array([[0.0, 2.0], [2.0, 2.0], [4.0, 2.0]])
        Xn = fit_normalizer(X).transform(X)
        R = correlation_matrix(Xn)
        assert R[0, 0] == pytest.approx(1.0)
        assert R[0, 1] == 0.0 and R[1, 1] == 0.0

    def test_independent_columns_nearly_uncorrelated(self):
        rng = np.random.default_rng(123)
        X = rng.uniform(-1.0, 1.0, size=(10000, 4))
        Xn = fit_normalizer(X).transform(X)
        R = correlation_matrix(Xn)
        assert np.allclose(np.diag(R), 1.0)
        off = R[~np.eye(4, dtype=bool)]
        assert np.max(np.abs(off)) < 0.05

    def test_symmetry(self):
        rng = np.random.default_rng(5)
        Xn = fit_normalizer(rng.normal(size=(50, 6))).transform(rng.normal(size=(50, 6)))
        R = correlation_matrix(Xn)
        assert np.array_equal(R, R.T)


class TestColumnElimination:
    def build(self):
        rng = np.random.default_rng(17)
        a = rng.normal(size=200)
        b = rng.normal(size=200)
        X = np.column_stack([
            a,                  # 0: kept
            2.0 * a + 1.0,      # 1: affine copy, dropped
            b,                  # 2: kept
            -a,                 # 3: negated copy, dropped
            np.full(200, 7.0),  # 4: constant, dropped
            a + b,              # 5: linear combination, dropped
        ])
        Xn = fit_normalizer(X).transform(X)
        return correlation_matrix(Xn)

    def test_duplicates_and_constants_dropped(self):
        assert reduce_dependent_columns(self.build()) == [0, 2]

    def test_first_witness_survives(self):
        # same data with the duplicate in front: the lower index wins
        R = self.build()
        perm = [1, 0, 2, 3, 4, 5]
        Rp = R[np.ix_(perm, perm)]
        assert reduce_dependent_columns(Rp) == [0, 2]

    def test_all_constant_rejected_by_pipeline(self):
        with pytest.raises(ReductionError, match="constant or dependent"):
            fit_pipeline(np.full((10, 3), 2.0))


class TestPca:
    def corr(self, n=4000, seed=11):
        rng = np.random.default_rng(seed)
        z = rng.normal(size=(n, 3))
        X = np.column_stack([
            z[:, 0],
            z[:, 0] + 0.05 * z[:, 1],
            z[:, 1],
            z[:, 2],
            0.5 * z[:, 2] + 0.1 * z[:, 0],
        ])
        Xn = fit_normalizer(X).transform(X)
        return correlation_matrix(Xn)

    def test_orthonormal_basis_descending_spectrum(self):
        basis, w, kept_share = fit_pca(self.corr(), variance=0.98)
        assert np.allclose(basis.T @ basis, np.eye(basis.shape[1]), atol=1e-12)
        assert np.all(np.diff(w) <= 1e-12)
        assert kept_share >= 0.98

    def test_smallest_sufficient_prefix(self):
        R = self.corr()
        basis, w, share = fit_pca(R, variance=0.98)
        k = basis.shape[1]
        total = w.sum()
        assert np.cumsum(w)[k - 1] / total >= 0.98
        if k > 1:
            assert np.cumsum(w)[k - 2] / total < 0.98

    def test_component_variances_match_eigenvalues(self):
        rng = np.random.default_rng(11)
        z = rng.normal(size=(4000, 3))
        X = np.column_stack([z[:, 0], z[:, 0] + 0.05 * z[:, 1], z[:, 1], z[:, 2]])
        pipe = fit_pipeline(X, variance=0.999)
        Y = pipe.apply(X)
        got = Y.var(axis=0)
        assert got == pytest.approx(pipe.eigenvalues[: Y.shape[1]], rel=1e-6)


class TestPipeline:
    def data(self):
        # two tightly correlated pairs, one constant, one exact duplicate,
        # one independent straggler
        rng = np.random.default_rng(29)
        z = rng.normal(size=(500, 5))
        X = np.column_stack([
            z[:, 0],
            z[:, 0] + 0.15 * z[:, 1],
            np.full(500, 3.0),
            z[:, 2],
            z[:, 2] + 0.15 * z[:, 3],
            2.0 * z[:, 2],
            z[:, 4],
        ])
        return X

    def test_centroid_maps_to_zero(self):
        X = self.data()
        pipe = fit_pipeline(X)
        assert pipe.apply(X.mean(axis=0)) == pytest.approx(np.zeros(pipe.output_dim), abs=1e-12)

    def test_affine_linearity(self):
        X = self.data()
        pipe = fit_pipeline(X)
        mu = X.mean(axis=0)
        rng = np.random.default_rng(1)
        a, b = rng.normal(size=X.shape[1]), rng.normal(size=X.shape[1])
        lhs = pipe.apply(mu + a + b)
        rhs = pipe.apply(mu + a) + pipe.apply(mu + b)
        assert lhs == pytest.approx(rhs, abs=1e-9)

    def test_projection_width_and_batch_shape(self):
        X = self.data()
        pipe = fit_pipeline(X)
        assert pipe.output_dim < len(pipe.kept) <= X.shape[1]
        out = pipe.apply(X[:7])
        assert out.shape == (7, pipe.output_dim)
        assert pipe.apply(X[0]).shape == (pipe.output_dim,)

    def test_deterministic_refit(self):
        X = self.data()
        p1, p2 = fit_pipeline(X), fit_pipeline(X)
        assert p1.kept == p2.kept
        assert np.array_equal(p1.basis, p2.basis)

    def test_report_mentions_counts_and_labels(self):
        X = self.data()
        pipe = fit_pipeline(X)
        labels = [f"feat {i}" for i in range(X.shape[1])]
        report = reduction_report(pipe, labels)
        assert f"columns kept {len(pipe.kept)} of 7" in report
        assert "feat 0" in report
