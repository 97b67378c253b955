import numpy as np
import pytest

from faircart import Dataset, SynthConfig, generate

ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def random_dataset(rng: np.random.Generator, n: int, p: int = 3, levels: int | None = None,
                   constant_s: bool = False) -> Dataset:
    """Random data; ``levels`` rounds features to force repeated values."""
    X = rng.normal(size=(n, p))
    if levels:
        X = np.round(X * levels / 3) / levels
    s = np.ones(n, dtype=np.int64) if constant_s else rng.integers(0, 2, n)
    logits = X[:, 0] + 0.8 * s - 0.4
    y = (rng.random(n) < 1 / (1 + np.exp(-logits))).astype(np.int64)
    return Dataset(X, tuple(f"f{j}" for j in range(p)), s, y)


@pytest.fixture(scope="session")
def synth():
    return generate(SynthConfig(n=2000, seed=3))


@pytest.fixture
def rng():
    return np.random.default_rng(20241015)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
