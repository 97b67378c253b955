import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from faircart.dataset import (ColumnSpec, Dataset, HoldoutPlan, holdout_indices, holdout_split,
                              load_column_specs, load_csv, load_features, parse_column_specs,
                              specs_to_doc, write_rows)
from faircart.errors import ConfigError, DataError


def write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


BASIC = [ColumnSpec("x", "numeric"), ColumnSpec("c", "categorical"),
         ColumnSpec("s", "sensitive", privileged_label="M"), ColumnSpec("y", "target", positive_label="yes")]


def test_one_hot_three_rows(tmp_path):
    p = write(tmp_path, "x,c,s,y\n1.5,a,M,yes\n2,b,F,no\n-3,a,F,yes\n")
    d = load_csv(p, BASIC)
    assert d.feature_names == ("x", "c=a", "c=b")
    expected = np.array([[1.5, 1, 0], [2, 0, 1], [-3, 1, 0]], dtype=float)
    np.testing.assert_array_equal(d.features, expected)
    np.testing.assert_array_equal(d.features[:, 1:].sum(axis=1), 1)
    np.testing.assert_array_equal(d.sensitive, [1, 0, 0])
    np.testing.assert_array_equal(d.target, [1, 0, 1])


def test_pass_threshold_target(tmp_path):
    p = write(tmp_path, "G3,sex\n9,F\n10,M\n15,F\n0,M\n")
    specs = [ColumnSpec("G3", "target", pass_threshold=10), ColumnSpec("sex", "sensitive", privileged_label="M")]
    d = load_csv(p, specs)
    np.testing.assert_array_equal(d.target, [0, 1, 1, 0])
    assert d.features.shape == (4, 0)


def test_constant_positive_target(tmp_path):
    p = write(tmp_path, "x,s,y\n1,1,ok\n2,0,ok\n3,1,ok\n")
    specs = [ColumnSpec("x", "numeric"), ColumnSpec("s", "sensitive"), ColumnSpec("y", "target", positive_label="ok")]
    np.testing.assert_array_equal(load_csv(p, specs).target, [1, 1, 1])


def test_missing_rows_dropped(tmp_path, caplog):
    p = write(tmp_path, "x,c,s,y\n1,a,M,yes\n,b,F,no\n3,?,F,yes\n4,b,M,no\n")
    d = load_csv(p, BASIC)
    assert d.n == 2
    np.testing.assert_array_equal(d.row_ids, [0, 3])
    assert "dropped 2 of 4 rows" in caplog.text


def test_unlisted_columns_ignored(tmp_path):
    p = write(tmp_path, "junk,x,c,s,y\nzz,1,a,M,yes\nqq,2,b,F,no\n")
    assert load_csv(p, BASIC).feature_names == ("x", "c=a", "c=b")


def test_errors(tmp_path):
    with pytest.raises(DataError):
        load_csv(tmp_path / "nope.csv", BASIC)
    p = write(tmp_path, "x,c,s,y\n1,a,M,yes\n")
    with pytest.raises(ConfigError):
        load_csv(p, BASIC + [ColumnSpec("zzz", "numeric")])
    p2 = write(tmp_path, "x,s,y\n1,1,2\n2,0,0\n", "nb.csv")
    with pytest.raises(DataError, match="not binary"):
        load_csv(p2, [ColumnSpec("x", "numeric"), ColumnSpec("s", "sensitive"), ColumnSpec("y", "target")])
    p3 = write(tmp_path, "x,c,s,y\n,a,M,yes\n", "empty.csv")
    with pytest.raises(DataError, match="no rows"):
        load_csv(p3, BASIC)


def test_spec_validation():
    with pytest.raises(ConfigError):
        parse_column_specs({"columns": [{"name": "y", "kind": "target"}]})
    with pytest.raises(ConfigError):
        parse_column_specs({"columns": [{"name": "y", "kind": "banana"}]})
    with pytest.raises(ConfigError):
        parse_column_specs({"cols": []})
    specs = parse_column_specs(specs_to_doc(BASIC))
    assert specs == BASIC


def test_load_column_specs_file(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps(specs_to_doc(BASIC)))
    assert load_column_specs(p) == BASIC
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        load_column_specs(p)


def test_align_to_schema_and_features_only(tmp_path):
    p = write(tmp_path, "x,c,s,y\n1,b,M,yes\n2,z,F,no\n")
    d = load_csv(p, BASIC, feature_names=("c=a", "x", "c=b"))
    np.testing.assert_array_equal(d.features, [[0, 1, 1], [0, 2, 0]])
    q = write(tmp_path, "x,c\n1,a\n5,b\n", "u.csv")
    X, rows = load_features(q, BASIC, ("x", "c=a", "c=b"))
    np.testing.assert_array_equal(X, [[1, 1, 0], [5, 0, 1]])
    np.testing.assert_array_equal(rows, [0, 1])


def test_dataset_invariants():
    with pytest.raises(DataError):
        Dataset(np.zeros((3, 1)), ("a",), [0, 1], [0, 1, 1])
    with pytest.raises(DataError):
        Dataset(np.zeros((2, 1)), ("a",), [0, 2], [0, 1])
    with pytest.raises(DataError):
        Dataset(np.zeros((2, 2)), ("a", "a"), [0, 1], [0, 1])
    d = Dataset(np.zeros((2, 1)), ("a",), [0, 1], [0, 1])
    with pytest.raises(ValueError):
        d.features[0, 0] = 1.0


def make(n, seed=0):
    rng = np.random.default_rng(seed)
    return Dataset(rng.normal(size=(n, 2)), ("a", "b"), rng.integers(0, 2, n), rng.integers(0, 2, n))


def test_holdout_sizes_70_30():
    tr, te = holdout_split(make(2000), HoldoutPlan(0.7, 5))
    assert (tr.n, te.n) == (1400, 600)


def test_holdout_deterministic():
    d = make(500)
    a = holdout_indices(d, HoldoutPlan(0.7, 11))
    b = holdout_indices(d, HoldoutPlan(0.7, 11))
    c = holdout_indices(d, HoldoutPlan(0.7, 12))
    np.testing.assert_array_equal(a[0], b[0])
    assert not np.array_equal(a[0], c[0])


def test_duplicated_rows_split_evenly():
    base = make(101, seed=4)
    dup = Dataset.concat([base, base])
    tr, te = holdout_split(dup, HoldoutPlan(0.5, 3, stratified=True))
    for y in (0, 1):
        for s in (0, 1):
            a = np.sum((tr.target == y) & (tr.sensitive == s))
            b = np.sum((te.target == y) & (te.sensitive == s))
            assert abs(int(a) - int(b)) <= 1


def test_holdout_errors():
    with pytest.raises(DataError):
        holdout_split(make(9), HoldoutPlan(0.7, 0))
    with pytest.raises(ConfigError):
        HoldoutPlan(1.0, 0)
    with pytest.raises(DataError):
        holdout_split(make(10), HoldoutPlan(0.01, 0))


@settings(max_examples=60, deadline=None)
@given(st.integers(10, 400), st.floats(0.05, 0.95), st.integers(0, 2**32 - 1), st.booleans())
def test_holdout_is_a_partition(n, frac, seed, strat):
    d = make(n, seed % 1000)
    try:
        tr, te = holdout_indices(d, HoldoutPlan(frac, seed, strat))
    except DataError:
        return
    both = np.sort(np.concatenate([tr, te]))
    np.testing.assert_array_equal(both, np.arange(n))
    assert tr.size == round(frac * n)
    if strat:
        cell = 2 * d.target + d.sensitive
        for c in range(4):
            k = np.sum(cell == c)
            assert abs(np.sum(cell[tr] == c) - frac * n * k / n) < 1 + 1e-9


def test_write_rows_roundtrip(tmp_path):
    src = write(tmp_path, "x,s,y\n1,1,1\n2,0,0\n3,1,0\n")
    write_rows(src, tmp_path / "o.csv", [0, 2])
    assert (tmp_path / "o.csv").read_text() == "x,s,y\n1,1,1\n3,1,0\n"


def test_features_only_rejects_missing(tmp_path):
    q = write(tmp_path, "x,c\n1,a\nna,b\n", "u.csv")
    with pytest.raises(DataError, match="missing"):
        load_features(q, BASIC, ("x", "c=a", "c=b"))
