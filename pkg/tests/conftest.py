import numpy as np
import pytest
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent
WDBC_PATH = REPO_ROOT / "data" / "wdbc.csv"


@pytest.fixture(scope="session")
def wdbc_path() -> Path:
    assert WDBC_PATH.exists(), "run scripts/make_wdbc_csv.py first"
    return WDBC_PATH


@pytest.fixture(scope="session")
def wdbc(wdbc_path):
    from qksvm.data import load_wdbc

    return load_wdbc(wdbc_path)


def make_blobs(n_per_class=10, centers=((1.25, 1.25), (-1.25, -1.25)), sigma=0.5, seed=0, d=2):
    """Two Gaussian blobs; defaults keep them separable with a gap of a few
    sigma while leaving the standardized classes close enough that integer
    dual multipliers stay useful (an all-zero multiplier vector is genuinely
    optimal once the standardized class gap exceeds 2)."""
    rng = np.random.default_rng(seed)
    pos = rng.normal(centers[0], sigma, size=(n_per_class, d))
    neg = rng.normal(centers[1], sigma, size=(n_per_class, d))
    features = np.vstack([pos, neg])
    labels = np.array([1] * n_per_class + [-1] * n_per_class)
    order = rng.permutation(2 * n_per_class)
    return features[order], labels[order]
