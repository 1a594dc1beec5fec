import numpy as np
import pytest

from esstriad.mat3core import skew
from esstriad.synthesis import random_camera_triple, triplet_from_cameras


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def compatible_triplet(seed, mode="general"):
    return triplet_from_cameras(random_camera_triple(mode, seed=seed))


def random_invertible(rng, min_det=0.3):
    while True:
        b = rng.normal(size=(3, 3))
        if abs(np.linalg.det(b)) > min_det:
            return b


def fundamental_compatible(rng):
    """Compatible fundamental triplet from general projective cameras."""
    bs = [random_invertible(rng) for _ in range(3)]
    cs = [rng.normal(size=3) for _ in range(3)]
    f12 = bs[0].T @ skew(cs[0] - cs[1]) @ bs[1]
    f23 = bs[1].T @ skew(cs[1] - cs[2]) @ bs[2]
    f31 = bs[2].T @ skew(cs[2] - cs[0]) @ bs[0]
    return f12, f23, f31


def calibrated_forward_model(seed, ks, lam=(1.0, 1.0, 1.0)):
    """Fundamental triplet F_ij = lam_i lam_j K_i^-T E_ij K_j^-1 from a
    compatible essential triplet, plus the true dual candidates C_i."""
    t = compatible_triplet(seed)
    kinv = [np.linalg.inv(k) for k in ks]
    pairs = ((0, 1), (1, 2), (2, 0))
    fs = []
    for (i, j), e in zip(pairs, t.blocks()):
        fs.append(lam[i] * lam[j] * kinv[i].T @ e @ kinv[j])
    cs = [lam[i] / np.linalg.det(ks[i]) * ks[i] @ ks[i].T for i in range(3)]
    return fs, cs
