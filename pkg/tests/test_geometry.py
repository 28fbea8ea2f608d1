from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cencon import Configuration, DimensionError, InputError, config_dimension, kernel_vector, signed_minor
from cencon.errors import DegenerateConfigurationError
from cencon.geometry import embed_config, pair_index, pairs

from conftest import random_config, regular_simplex, unit_square


def test_pair_order_is_lexicographic():
    assert pairs(4) == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    for idx, (i, j) in enumerate(pairs(6)):
        assert pair_index(i, j, 6) == idx
        assert pair_index(j, i, 6) == idx


def test_coincident_bodies_rejected():
    with pytest.raises(DegenerateConfigurationError):
        Configuration([[0, 0], [1, 0], [0, 0]])


def test_non_finite_rejected():
    with pytest.raises(InputError):
        Configuration([[0, np.nan], [1, 0]])


def test_configuration_matrix_layout():
    x = unit_square()
    mat = embed_config(x)
    assert mat.shape == (4, 4)
    np.testing.assert_array_equal(mat[0], 1.0)
    np.testing.assert_array_equal(mat[1:3], x.points.T)
    np.testing.assert_array_equal(mat[3], 0.0)


@pytest.mark.parametrize(
    "x, expected",
    [
        (unit_square(), 2),
        (regular_simplex(4), 3),
        (Configuration([[0.0], [1.0], [3.0], [7.0]]), 1),
        (Configuration([[0, 0, 0], [1, 1, 1], [2, 2, 2]]), 1),
    ],
)
def test_config_dimension_examples(x, expected):
    assert config_dimension(x) == expected


def test_square_kernel_vector():
    delta = kernel_vector(unit_square())
    np.testing.assert_allclose(np.abs(delta), 1.0, atol=1e-14)
    # consecutive vertices carry opposite signs
    assert np.all(delta[:-1] * delta[1:] < 0)
    np.testing.assert_allclose(embed_config(unit_square()) @ delta, 0.0, atol=1e-14)


def test_kernel_vector_needs_codimension_one():
    with pytest.raises(DimensionError):
        kernel_vector(regular_simplex(4))
    with pytest.raises(DimensionError):
        kernel_vector(Configuration([[0.0], [1.0], [2.0], [5.0]]))


def test_signed_minor_sign_convention():
    x = unit_square()
    # removing bodies with label sum 1 and 2 flips the sign once
    ref = Configuration(x.points[[1, 2, 3]])
    mat = np.ones((3, 3))
    mat[1:] = ref.points.T
    assert signed_minor(x, [0]) == pytest.approx(-np.linalg.det(mat))


def test_signed_minor_validation():
    x = unit_square()
    with pytest.raises(InputError):
        signed_minor(x, [2, 1])
    with pytest.raises(InputError):
        signed_minor(x, [4])


def test_full_minor_for_simplex_is_volume():
    x = regular_simplex(3, side=np.sqrt(2))
    # twice the area of an equilateral triangle of side sqrt 2
    assert abs(signed_minor(x, [])) == pytest.approx(np.sqrt(3), rel=1e-12)


def test_kernel_vector_rigid_motion_invariant(rng):
    x = random_config(rng, 5, 3, ambient=3)
    rot, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    if np.linalg.det(rot) < 0:
        rot[:, 0] *= -1
    y = Configuration(x.points @ rot.T + 2.5)
    np.testing.assert_allclose(kernel_vector(y), kernel_vector(x), rtol=1e-9, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(3, 7), seed=st.integers(0, 2**32 - 1))
def test_kernel_vector_spans_kernel(n, seed):
    x = random_config(np.random.default_rng(seed), n, n - 2, ambient=n + 1)
    delta = kernel_vector(x)
    mat = embed_config(x)
    assert np.linalg.norm(mat @ delta) <= 1e-9 * np.linalg.norm(delta) * max(1, np.abs(x.points).max())
    # the minors sum to zero: first row of the configuration matrix is all ones
    assert abs(delta.sum()) <= 1e-9 * np.abs(delta).max()


@settings(max_examples=40, deadline=None)
@given(n=st.integers(3, 6), data=st.data())
def test_dimension_of_random_flats(n, data):
    k = data.draw(st.integers(1, n - 1))
    seed = data.draw(st.integers(0, 2**32 - 1))
    x = random_config(np.random.default_rng(seed), n, k)
    assert config_dimension(x) == k


def test_signed_minors_of_every_order_are_finite(rng):
    x = random_config(rng, 5, 3)
    for size in range(0, 4):
        for removed in combinations(range(5), size):
            assert np.isfinite(signed_minor(x, removed))
