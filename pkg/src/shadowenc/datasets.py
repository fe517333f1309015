"""Dataset loading: the bundled Iris table and the (user-supplied) credit
card transaction file, sliced by 1-based row IDs into classifier training
and test sets."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .chc import TrainingSet

DATA_DIR_ENV = "SHADOWENC_DATA"

IRIS_FEATURES = ("sepal_length", "sepal_width", "petal_length", "petal_width")
IRIS_SPECIES = ("setosa", "versicolor", "virginica")

# default ID slices: first four rows of each species train, next four test
IRIS_DEFAULT_SPLITS = {
    ("setosa", "versicolor"): {
        "train": (tuple(range(1, 5)), tuple(range(51, 55))),
        "test": (tuple(range(5, 9)), tuple(range(55, 59))),
    },
    ("versicolor", "virginica"): {
        "train": (tuple(range(51, 55)), tuple(range(101, 105))),
        "test": (tuple(range(55, 59)), tuple(range(105, 109))),
    },
}

CREDIT_FEATURES = ("V1", "V2", "V3", "V4")
CREDIT_DEFAULT_NORMAL_TRAIN = (1, 2, 3, 4)
CREDIT_DEFAULT_FRAUD_TRAIN = (524, 624, 4921, 6109)
CREDIT_DEFAULT_NORMAL_TEST = (5, 6, 7, 8)
CREDIT_DEFAULT_FRAUD_TEST = (6330, 6332, 6335, 6337)


class DataError(Exception):
    """Missing files, malformed tables or unknown record IDs."""


@dataclass
class Dataset:
    """Rows of (1-based id, feature vector, class label)."""

    ids: np.ndarray
    features: np.ndarray
    class_labels: list
    feature_names: tuple


@dataclass
class TestCase:
    record_id: int
    features: np.ndarray
    true_label: int  # +1 / -1
    class_name: str


def bundled_iris_path() -> Path:
    return Path(resources.files("shadowenc").joinpath("data/iris.csv"))


def default_data_dir() -> Path | None:
    env = os.environ.get(DATA_DIR_ENV)
    return Path(env) if env else None


def _read_csv(path, required: tuple) -> list[dict]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"data file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in required if c not in (reader.fieldnames or ())]
        if missing:
            raise DataError(f"{path} is missing columns {missing}")
        return list(reader)


def load_iris_table(path=None) -> Dataset:
    if path is None:
        path = bundled_iris_path()
    rows = _read_csv(path, ("id",) + IRIS_FEATURES + ("species",))
    ids = np.array([int(r["id"]) for r in rows])
    if len(set(ids.tolist())) != len(ids):
        raise DataError("duplicate iris IDs")
    feats = np.array([[float(r[c]) for c in IRIS_FEATURES] for r in rows])
    labels = [r["species"] for r in rows]
    return Dataset(ids, feats, labels, IRIS_FEATURES)


def _pick(ds: Dataset, wanted_ids, expect_class=None) -> np.ndarray:
    index = {int(i): k for k, i in enumerate(ds.ids)}
    out = []
    for rid in wanted_ids:
        if rid not in index:
            raise DataError(f"record ID {rid} not present in the dataset")
        k = index[rid]
        if expect_class is not None and ds.class_labels[k] != expect_class:
            raise DataError(
                f"record ID {rid} is {ds.class_labels[k]!r}, expected {expect_class!r}"
            )
        out.append(ds.features[k])
    return np.array(out)


def load_iris(
    path=None,
    species_pair: tuple = ("setosa", "versicolor"),
    train_ids: tuple | None = None,
    test_ids: tuple | None = None,
) -> tuple[TrainingSet, list[TestCase]]:
    """Training set (plus block = first species) and labeled test cases.

    ``train_ids``/``test_ids`` are (plus-class ids, minus-class ids) pairs;
    defaults follow the standard first-four / next-four slices per species.
    """
    pair = tuple(species_pair)
    for sp in pair:
        if sp not in IRIS_SPECIES:
            raise DataError(f"unknown species {sp!r}")
    if train_ids is None or test_ids is None:
        if pair not in IRIS_DEFAULT_SPLITS:
            raise DataError(f"no default split for pair {pair}; pass explicit IDs")
        train_ids = train_ids or IRIS_DEFAULT_SPLITS[pair]["train"]
        test_ids = test_ids or IRIS_DEFAULT_SPLITS[pair]["test"]
    overlap = (set(train_ids[0]) | set(train_ids[1])) & (set(test_ids[0]) | set(test_ids[1]))
    if overlap:
        raise DataError(f"train/test IDs overlap: {sorted(overlap)}")
    ds = load_iris_table(path)
    train = TrainingSet(
        _pick(ds, train_ids[0], pair[0]),
        _pick(ds, train_ids[1], pair[1]),
        plus_name=pair[0],
        minus_name=pair[1],
    )
    tests = []
    for sign, ids, name in ((+1, test_ids[0], pair[0]), (-1, test_ids[1], pair[1])):
        for rid, vec in zip(ids, _pick(ds, ids, name)):
            tests.append(TestCase(rid, vec, sign, name))
    return train, tests


def load_creditcard_table(path, feature_subset: tuple = CREDIT_FEATURES) -> Dataset:
    """Read the Kaggle-format transaction CSV.  IDs are 1-based row numbers
    in file order; the class label is "normal" or "fraud"."""
    rows = _read_csv(path, tuple(feature_subset) + ("Class",))
    ids = np.arange(1, len(rows) + 1)
    feats = np.array([[float(r[c]) for c in feature_subset] for r in rows])
    labels = ["fraud" if int(float(r["Class"])) == 1 else "normal" for r in rows]
    return Dataset(ids, feats, labels, tuple(feature_subset))


def load_creditcard(
    path,
    feature_subset: tuple = CREDIT_FEATURES,
    normal_train_ids: tuple = CREDIT_DEFAULT_NORMAL_TRAIN,
    fraud_train_ids: tuple = CREDIT_DEFAULT_FRAUD_TRAIN,
    normal_test_ids: tuple = CREDIT_DEFAULT_NORMAL_TEST,
    fraud_test_ids: tuple = CREDIT_DEFAULT_FRAUD_TEST,
) -> tuple[TrainingSet, list[TestCase]]:
    """Fraud-detection split: normal transactions are the +1 class."""
    train_all = set(normal_train_ids) | set(fraud_train_ids)
    test_all = set(normal_test_ids) | set(fraud_test_ids)
    if train_all & test_all:
        raise DataError(f"train/test IDs overlap: {sorted(train_all & test_all)}")
    ds = load_creditcard_table(path, feature_subset)
    train = TrainingSet(
        _pick(ds, normal_train_ids, "normal"),
        _pick(ds, fraud_train_ids, "fraud"),
        plus_name="normal",
        minus_name="fraud",
    )
    tests = []
    for sign, ids, name in ((+1, normal_test_ids, "normal"), (-1, fraud_test_ids, "fraud")):
        for rid, vec in zip(ids, _pick(ds, ids, name)):
            tests.append(TestCase(rid, vec, sign, name))
    return train, tests
