import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fdbench.fdata import (
    FormatError,
    FunctionalDataset,
    FunctionalFeature,
    SplitIndex,
    Task,
    TaskError,
    kfold_stratified,
    load_csv_task,
    load_task,
    load_ucr_tsv,
    make_functional_dataset,
    stratified_subsample,
    stratified_train_counts,
    write_ucr_tsv,
)


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_minimal_ucr_file(tmp_path):
    task = load_ucr_tsv(write(tmp_path, "m.tsv", "1 0.0 0.0\n2 1.0 1.0\n"))
    assert task.n_obs == 2 and task.n_classes == 2
    assert task.dataset.functional("series").length == 2
    assert task.levels == ("1", "2")


def test_labels_in_first_appearance_order(tmp_path):
    task = load_ucr_tsv(write(tmp_path, "m.tsv", "b\t1\t2\na\t3\t4\nb\t5\t6\n"))
    assert task.levels == ("b", "a")
    assert task.target.tolist() == [0, 1, 0]


def test_comma_separated(tmp_path):
    task = load_ucr_tsv(write(tmp_path, "m.csv.txt", "1,0.5,0.25\n2,1,2\n"))
    np.testing.assert_array_equal(task.dataset.functional("series").values, [[0.5, 0.25], [1, 2]])


def test_ragged_rows_name_the_line(tmp_path):
    with pytest.raises(FormatError, match="line 2"):
        load_ucr_tsv(write(tmp_path, "m.tsv", "1 0 0\n2 1 1 1\n"))


def test_non_numeric_cell(tmp_path):
    with pytest.raises(ValueError, match="line 1"):
        load_ucr_tsv(write(tmp_path, "m.tsv", "1 0 x\n2 1 1\n"))


def test_single_class_rejected(tmp_path):
    with pytest.raises(TaskError):
        load_ucr_tsv(write(tmp_path, "m.tsv", "1 0 0\n1 1 1\n"))


@pytest.mark.parametrize("name,n,c,L", [("GunPoint", 200, 2, 150), ("Beef", 60, 5, 470),
                                        ("ItalyPowerDemand", 1096, 2, 24), ("CBF", 930, 3, 128)])
def test_ucr_dataset_shapes(name, n, c, L):
    from conftest import DATA

    task = load_ucr_tsv(DATA / name)
    assert (task.n_obs, task.n_classes, task.dataset.functional("series").length) == (n, c, L)


def test_round_trip_17_digits(tmp_path, gunpoint):
    out = tmp_path / "gp.tsv"
    write_ucr_tsv(gunpoint, out)
    again = load_ucr_tsv(out)
    np.testing.assert_array_equal(again.dataset.functional("series").values,
                                  gunpoint.dataset.functional("series").values)
    assert again.levels == gunpoint.levels


def test_feature_invariants():
    with pytest.raises(ValueError):
        FunctionalFeature("f", np.ones((3, 1)))
    with pytest.raises(ValueError):
        FunctionalFeature("f", np.ones((3, 3)), grid=[1, 3, 2])
    with pytest.raises(ValueError):
        FunctionalFeature("f", np.array([[1.0, np.nan]]))
    with pytest.raises(ValueError):
        FunctionalDataset({"f": np.ones(3)}, [FunctionalFeature("f", np.ones((3, 2)))])
    with pytest.raises(ValueError):
        FunctionalDataset({"s": np.ones(4)}, [FunctionalFeature("f", np.ones((3, 2)))])


def test_task_requires_every_class():
    ds = FunctionalDataset({}, [FunctionalFeature("f", np.ones((2, 2)))])
    with pytest.raises(TaskError):
        Task("t", ds, np.array([0, 0]), "classification", ("a", "b"))


def test_arrays_are_read_only(gunpoint):
    with pytest.raises(ValueError):
        gunpoint.dataset.functional("series").values[0, 0] = 1.0


def fuel_like_table(n=5):
    rng = np.random.default_rng(0)
    cols = {"heatan": rng.normal(size=n), "h20": rng.normal(size=n)}
    for k in range(3, 368):
        cols[f"c{k}"] = rng.normal(size=n)
    return cols


def test_make_functional_dataset_fuel_layout():
    table = fuel_like_table()
    ds = make_functional_dataset(table, {"UVVIS": (3, 136), "NIR": (137, 367)})
    assert ds.functional("UVVIS").length == 134
    assert ds.functional("NIR").length == 231
    assert sorted(ds.scalar_features) == ["h20", "heatan"]
    np.testing.assert_array_equal(ds.functional("UVVIS").values[2],
                                  [table[f"c{k}"][2] for k in range(3, 137)])


def test_make_functional_dataset_degenerate_and_small():
    table = {"a": [1.0, 2.0], "b": [3.0, 4.0], "c": [5.0, 6.0], "d": [7.0, 8.0]}
    assert make_functional_dataset(table, {}).functional_features == ()
    ds = make_functional_dataset(table, {"f": (2, 4)})
    assert list(ds.scalar_features) == ["a"] and ds.functional("f").length == 3
    with pytest.raises(ValueError):
        make_functional_dataset(table, {"f": (2, 3), "g": (3, 4)})
    with pytest.raises(ValueError):
        make_functional_dataset(table, {"f": (2, 2)})
    with pytest.raises(ValueError):
        make_functional_dataset(table, {"f": (3, 5)})


def test_csv_with_sidecar(tmp_path):
    csv = write(tmp_path, "d.csv", "y,s,x1,x2,x3\na,1,0.1,0.2,0.3\nb,2,0.4,0.5,0.6\na,3,0.7,0.8,0.9\n")
    write(tmp_path, "d.json", '{"target": "y", "task_kind": "classification", "features": {"curve": [3, 5]}}')
    task = load_task(csv)
    assert task.n_classes == 2 and task.dataset.functional("curve").length == 3
    assert list(task.dataset.scalar_features) == ["s"]
    task2 = load_csv_task(csv, tmp_path / "d.json")
    np.testing.assert_array_equal(task.target, task2.target)


def test_split_index_validation():
    with pytest.raises(TaskError):
        SplitIndex(np.array([0, 1]), np.array([1, 2]))
    with pytest.raises(TaskError):
        SplitIndex(np.array([], dtype=int), np.array([1]))
    assert SplitIndex([2, 0], [1]).digest() == SplitIndex([0, 2], [1]).digest()


def test_subsample_proportions():
    labels = ["A"] * 6 + ["B"] * 4
    split = stratified_subsample(labels, 0.5, 1, 0)[0]
    lab = np.array(labels)[split.train]
    assert (lab == "A").sum() == 3 and (lab == "B").sum() == 2


def test_subsample_gunpoint_size(gunpoint):
    for s in stratified_subsample(gunpoint, 0.25, 20, 1):
        assert len(s.train) == 50 and len(s.test) == 150


def test_subsample_determinism():
    labels = list("AAABBBBCCCCC") * 3
    a = stratified_subsample(labels, 0.4, 5, 1)
    b = stratified_subsample(labels, 0.4, 5, 1)
    c = stratified_subsample(labels, 0.4, 5, 2)
    assert all(x.digest() == y.digest() for x, y in zip(a, b))
    assert any(x.digest() != y.digest() for x, y in zip(a, c))
    assert len({s.digest() for s in a}) == 5


def test_subsample_infeasible_names_class():
    with pytest.raises(TaskError, match="'z'"):
        stratified_subsample(["a", "a", "z"], 0.5, 1, 0)


def test_train_counts_largest_remainder():
    assert stratified_train_counts([6, 4], 0.5).tolist() == [3, 2]
    # quotas 1.5, 1.5, 1.5: total round(4.5) = 4, extra unit to the first class
    assert stratified_train_counts([3, 3, 3], 0.5).tolist() == [2, 1, 1]
    assert stratified_train_counts([2, 100], 0.01).tolist() == [1, 1]


def test_kfold_examples():
    folds = kfold_stratified(["a", "a", "a", "b", "b", "b"], 3, 0)
    labels = np.array(list("aaabbb"))
    for f in folds:
        assert sorted(labels[f.test]) == ["a", "b"]
    labels = np.array(list("AAAABBB"))
    folds = kfold_stratified(labels, 3, 5)
    assert sorted((labels[f.test] == "A").sum() for f in folds) == [1, 1, 2]
    assert sorted((labels[f.test] == "B").sum() for f in folds) == [1, 1, 1]
    with pytest.raises(ValueError):
        kfold_stratified(labels, 8, 0)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=6, max_size=60), st.integers(2, 5), st.integers(0, 10**6))
def test_kfold_partition_property(labels, k, seed):
    if k > len(labels):
        return
    folds = kfold_stratified(labels, k, seed)
    tests = np.concatenate([f.test for f in folds])
    assert sorted(tests.tolist()) == list(range(len(labels)))
    lab = np.array(labels)
    for c in set(labels):
        counts = [(lab[f.test] == c).sum() for f in folds]
        assert max(counts) - min(counts) <= 1


def test_make_dataset_preserves_row_order():
    rng = np.random.default_rng(1)
    table = {f"c{i}": rng.normal(size=7) for i in range(1, 6)}
    ds = make_functional_dataset(table, {"f": ["c2", "c3", "c4"]})
    for i in range(7):
        assert ds.functional("f").values[i].tolist() == [table[c][i] for c in ("c2", "c3", "c4")]
