import numpy as np
import pytest

from gradlight.gradient import GradientField
from gradlight.image import IntensityRange
from gradlight.testkit import difference_matrix, make_instance, oracle_objective, qp_oracle

R = IntensityRange()


def test_difference_matrix_rows():
    d = difference_matrix(2, 2)
    assert d.shape == (4, 4)
    np.testing.assert_array_equal(d.sum(axis=1), 0)


def test_oracle_zero_field():
    u, obj = qp_oracle(GradientField.zeros(4, 4), R)
    assert obj == 0.0 and np.ptp(u) == 0 and R.contains(u)


@pytest.mark.parametrize("seed", range(3))
def test_oracle_integrable(seed):
    _, q = make_instance(seed, 6, 5, "integrable")
    u, obj = qp_oracle(q, R)
    assert obj <= 1e-9
    assert oracle_objective(u, q) == pytest.approx(obj, abs=1e-12)


def test_oracle_size_cap():
    with pytest.raises(ValueError):
        qp_oracle(GradientField.zeros(17, 4), R)


@pytest.mark.parametrize("kind", ["integrable", "random", "saturating"])
def test_deterministic(kind):
    a_img, a_q = make_instance(7, 5, 4, kind)
    b_img, b_q = make_instance(7, 5, 4, kind)
    np.testing.assert_array_equal(a_img, b_img)
    np.testing.assert_array_equal(a_q.gh, b_q.gh)
    np.testing.assert_array_equal(a_q.gv, b_q.gv)
    assert a_q.shape == (4, 5)


def test_random_field_bounds():
    _, q = make_instance(3, 8, 8, "random")
    assert np.abs(q.gh).max() <= 64 and np.abs(q.gv).max() <= 64


def test_saturating_exits_range():
    _, q = make_instance(1, 8, 8, "saturating")
    # integrate along the first row, then down every column
    top = np.concatenate([[0.0], np.cumsum(q.gh[0])])
    img = np.vstack([top, top + np.cumsum(q.gv, axis=0)])
    assert np.ptp(img) > 255.0
    # horizontal differences of the path integral agree with the field: it is integrable
    np.testing.assert_allclose(np.diff(img, axis=1), q.gh, atol=1e-9)


def test_invalid_kind():
    with pytest.raises(ValueError):
        make_instance(0, 2, 2, "smooth")


@pytest.mark.parametrize("kind", ["random", "saturating"])
def test_oracle_objective_has_plateaued(kind):
    # continuing far past the stopping rule must not find a better objective
    _, q = make_instance(11, 8, 8, kind)
    _, obj = qp_oracle(q, R)
    _, longer = qp_oracle(q, R, max_iter=100_000, min_change=0.0)
    assert longer >= obj * (1 - 1e-9)
