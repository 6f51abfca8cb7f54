import numpy as np
import pytest

from progbench.scenes import synthetic_scene


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def scene():
    return synthetic_scene(5, 64, 48)


def write_png_corpus(directory, count, width=96, height=64, seed0=0):
    from progbench.imaging import save_png

    directory.mkdir(parents=True, exist_ok=True)
    for i in range(count):
        save_png(directory / f"img_{i:03d}.png", synthetic_scene(seed0 + i, width, height))
    return directory
