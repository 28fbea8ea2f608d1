import numpy as np
import pytest

from cencon import Configuration, Exponent

NEWTON = Exponent(-3)


def unit_square():
    return Configuration([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def triangle_center():
    """Unit equilateral triangle with a fourth body at its centre."""
    ang = np.pi / 2 + 2 * np.pi * np.arange(3) / 3
    pts = np.vstack([np.c_[np.cos(ang), np.sin(ang)], [[0.0, 0.0]]])
    return Configuration(pts)


def equilateral(side=1.0):
    return Configuration(side * np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2]]))


def regular_simplex(n, side=1.0):
    """``n`` points in ``R^(n-1)`` with all mutual distances equal to ``side``."""
    pts = np.eye(n) * side / np.sqrt(2)
    return Configuration(pts)


def random_config(rng, n, k, ambient=None):
    """Generic ``n`` points spanning an affine ``k``-flat inside ``R^ambient``."""
    ambient = max(k, n - 1) if ambient is None else ambient
    basis, _ = np.linalg.qr(rng.normal(size=(ambient, k)))
    coeffs = rng.normal(size=(n, k))
    offset = rng.normal(size=ambient)
    return Configuration(coeffs @ basis.T + offset)


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)
