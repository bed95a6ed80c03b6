import numpy as np
import pytest

from qrcd import (
    ConstantColumn,
    DataError,
    Dataset,
    EmptyFile,
    MissingColumn,
    ParseError,
    build_least_squares,
    load_csv,
    normalize,
    synthesize,
    synthesize_regression,
    with_intercept,
    write_csv,
)


def write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadCsv:
    def test_small_file(self, tmp_path):
        path = write(tmp_path, "a,b,y\n1,2,3\n4,5,6\n7,8,9\n10,11,12\n")
        ds = load_csv(path, "y")
        assert ds.feature_names == ("a", "b")
        assert ds.n_rows == 4 and ds.n_features == 2
        assert ds.targets.tolist() == [3.0, 6.0, 9.0, 12.0]
        assert ds.features[:, 0].tolist() == [1.0, 4.0, 7.0, 10.0]

    def test_default_target_is_last_column(self, tmp_path):
        path = write(tmp_path, "a,b,y\n1,2,3\n4,5,6\n7,8,9\n")
        assert load_csv(path).target_name == "y"

    def test_target_not_last(self, tmp_path):
        path = write(tmp_path, "y,a\n1,2\n3,4\n5,6\n")
        ds = load_csv(path, "y")
        assert ds.targets.tolist() == [1.0, 3.0, 5.0]
        assert ds.feature_names == ("a",)

    def test_nan_cell_named_in_error(self, tmp_path):
        path = write(tmp_path, "a,y\n1,2\nNaN,4\n5,6\n")
        with pytest.raises(ParseError) as err:
            load_csv(path, "y")
        assert "line 3" in str(err.value) and "'a'" in str(err.value)

    def test_non_numeric_cell(self, tmp_path):
        path = write(tmp_path, "a,y\n1,2\nfoo,4\n")
        with pytest.raises(ParseError):
            load_csv(path, "y")

    def test_missing_column(self, tmp_path):
        path = write(tmp_path, "a,b\n1,2\n")
        with pytest.raises(MissingColumn):
            load_csv(path, "zz")

    def test_short_row(self, tmp_path):
        path = write(tmp_path, "a,b,y\n1,2,3\n4,5\n")
        with pytest.raises(MissingColumn):
            load_csv(path, "y")

    def test_empty_file(self, tmp_path):
        with pytest.raises(EmptyFile):
            load_csv(write(tmp_path, ""))
        with pytest.raises(EmptyFile):
            load_csv(write(tmp_path, "a,y\n"))

    def test_row_order_preserved(self, tmp_path):
        path = write(tmp_path, "a,y\n9,1\n3,2\n7,3\n")
        assert load_csv(path, "y").features[:, 0].tolist() == [9.0, 3.0, 7.0]


class TestNormalize:
    def test_hand_example(self):
        ds = Dataset(feature_names=("a",), features=[[1.0], [2.0], [3.0]],
                     targets=[10.0, 20.0, 30.0])
        out = normalize(ds)
        # sample std of (1, 2, 3) is 1 (divisor n-1 = 2)
        assert out.features[:, 0].tolist() == [-1.0, 0.0, 1.0]
        assert out.normalization_stats["a"] == (2.0, 1.0)
        mean_y, std_y = out.normalization_stats["y"]
        assert mean_y == 20.0 and std_y == pytest.approx(10.0)

    def test_columns_standardized(self):
        rng = np.random.default_rng(0)
        ds = Dataset(feature_names=("a", "b"), features=rng.normal(5, 3, (50, 2)),
                     targets=rng.normal(-2, 7, 50))
        out = normalize(ds)
        for col in (out.features[:, 0], out.features[:, 1], out.targets):
            assert abs(col.mean()) < 1e-9
            assert abs(col.std(ddof=1) - 1.0) < 1e-9

    def test_idempotent(self):
        rng = np.random.default_rng(1)
        ds = Dataset(feature_names=("a",), features=rng.normal(3, 2, (20, 1)),
                     targets=rng.normal(size=20))
        once = normalize(ds)
        twice = normalize(once)
        assert np.allclose(once.features, twice.features, atol=1e-9)
        assert np.allclose(once.targets, twice.targets, atol=1e-9)

    def test_constant_column(self):
        ds = Dataset(feature_names=("a",), features=[[5.0], [5.0], [5.0]],
                     targets=[1.0, 2.0, 3.0])
        with pytest.raises(ConstantColumn):
            normalize(ds)


class TestWithIntercept:
    def test_shape_and_content(self):
        ds = Dataset(feature_names=("a",), features=[[2.0], [3.0]], targets=[1.0, 2.0])
        design = with_intercept(ds)
        assert design.tolist() == [[1.0, 2.0], [1.0, 3.0]]

    def test_intercept_only(self):
        ds = Dataset(feature_names=(), features=np.empty((3, 0)), targets=[1.0, 2.0, 3.0])
        design = with_intercept(ds)
        assert design.tolist() == [[1.0], [1.0], [1.0]]

    def test_power_plant_shape(self):
        rng = np.random.default_rng(2)
        ds = Dataset(feature_names=("t", "p", "h", "v"),
                     features=rng.normal(size=(30, 4)), targets=rng.normal(size=30))
        assert with_intercept(ds).shape == (30, 5)


class TestSynthesize:
    def test_condition_one_is_isotropic(self):
        A, _, _ = synthesize(50, 4, 1.0, seed=0)
        gram = A.T @ A
        assert np.allclose(gram, np.eye(4), atol=1e-10)

    def test_condition_number_hits_target(self):
        A, y, _ = synthesize(100, 5, 10.0, seed=7)
        obj = build_least_squares(A, y)
        assert 9.9 <= obj.condition_g <= 10.1
        # independent oracle for the extremes
        eigs = np.linalg.eigvalsh(A.T @ A)
        assert eigs[-1] / eigs[0] == pytest.approx(10.0, rel=1e-9)

    def test_deterministic(self):
        a1 = synthesize(40, 3, 5.0, seed=9)
        a2 = synthesize(40, 3, 5.0, seed=9)
        for left, right in zip(a1, a2):
            assert np.array_equal(left, right)

    def test_scale_moves_spectrum(self):
        A, _, _ = synthesize(60, 4, 4.0, seed=3, scale=10.0)
        eigs = np.linalg.eigvalsh(A.T @ A)
        assert eigs[0] == pytest.approx(100.0, rel=1e-9)
        assert eigs[-1] == pytest.approx(400.0, rel=1e-9)

    def test_validation(self):
        with pytest.raises(ValueError):
            synthesize(5, 6, 2.0, seed=0)
        with pytest.raises(ValueError):
            synthesize(10, 1, 2.0, seed=0)
        with pytest.raises(ValueError):
            synthesize(10, 3, 0.5, seed=0)


class TestSynthesizeRegression:
    @pytest.mark.parametrize("d,g", [(5, 10.0), (3, 4.0), (2, 6.0)])
    def test_pipeline_condition(self, d, g):
        ds, x_true = synthesize_regression(100, d, g, seed=7)
        assert ds.n_features == d - 1
        assert len(x_true) == d
        obj = build_least_squares(with_intercept(ds), ds.targets)
        assert obj.condition_g == pytest.approx(g, rel=0.01)

    def test_features_are_centered(self):
        ds, _ = synthesize_regression(200, 5, 8.0, seed=1)
        assert np.abs(ds.features.mean(axis=0)).max() < 1e-12

    def test_deterministic(self):
        d1, x1 = synthesize_regression(50, 4, 3.0, seed=5)
        d2, x2 = synthesize_regression(50, 4, 3.0, seed=5)
        assert np.array_equal(d1.features, d2.features)
        assert np.array_equal(d1.targets, d2.targets)
        assert np.array_equal(x1, x2)


class TestRoundTrip:
    def test_csv_round_trips_to_15_digits(self, tmp_path):
        rng = np.random.default_rng(11)
        ds = Dataset(feature_names=("a", "b"),
                     features=rng.normal(size=(20, 2)) * 1e3,
                     targets=rng.normal(size=20) * 1e-3)
        path = tmp_path / "out.csv"
        write_csv(ds, path)
        back = load_csv(path, "y")
        assert np.allclose(back.features, ds.features, rtol=1e-15, atol=0)
        assert np.allclose(back.targets, ds.targets, rtol=1e-15, atol=0)

    def test_round_trip_is_exact_for_17g(self, tmp_path):
        # 17 significant digits reproduce doubles bit for bit
        rng = np.random.default_rng(12)
        ds = Dataset(feature_names=("a",), features=rng.normal(size=(10, 1)),
                     targets=rng.normal(size=10))
        path = tmp_path / "out.csv"
        write_csv(ds, path)
        back = load_csv(path, "y")
        assert np.array_equal(back.features, ds.features)
        assert np.array_equal(back.targets, ds.targets)


class TestDatasetValidation:
    def test_too_few_rows(self):
        with pytest.raises(DataError):
            Dataset(feature_names=("a", "b"), features=[[1.0, 2.0], [3.0, 4.0]],
                    targets=[1.0, 2.0])

    def test_mismatched_names(self):
        with pytest.raises(DataError):
            Dataset(feature_names=("a",), features=[[1.0, 2.0]] * 3, targets=[1.0] * 3)
