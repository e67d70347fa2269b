import numpy as np
import pytest

from dispflow import DiscreteCurve, make_initial, project_tangent, renormalize


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_point(rng, radius=1.0):
    p = rng.standard_normal(3)
    return renormalize(p, radius)


def random_tangent(rng, p, radius=1.0, unit=False):
    v = project_tangent(p, rng.standard_normal(3), radius)
    if unit:
        v = v / np.linalg.norm(v)
    return v


def random_curve(n=64, seed=0, radius=1.0, decay=0.7) -> DiscreteCurve:
    """Random smooth closed curve; same seed gives the same underlying map
    on every grid size (fixed Fourier band)."""
    return make_initial("random_smooth", {"decay": decay}, n, radius, seed)


def random_tangent_field(rng, curve: DiscreteCurve) -> np.ndarray:
    v = rng.standard_normal((curve.n, 3))
    return project_tangent(curve.points, v, curve.radius)


def great_circle(n=64, radius=1.0) -> DiscreteCurve:
    return make_initial("great_circle", {}, n, radius, 0)
