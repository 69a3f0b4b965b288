import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def dark_photo(name: str, shape=None) -> np.ndarray:
    """Bundled scikit-image photograph pushed into low light (gamma 2.2, x0.6)."""
    from skimage import data, transform

    img = getattr(data, name)().astype(np.float64)
    if shape is not None:
        img = transform.resize(img, shape, preserve_range=True, order=1, anti_aliasing=True)
    return np.round(255.0 * (img / 255.0) ** 2.2 * 0.6)


# (criterion number, description, passed, seconds), filled by test_acceptance.py
ACCEPTANCE_RESULTS: list[tuple[int, str, bool, float]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, desc, ok, secs in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {num}. {desc} ({secs:.2f} s)")
