"""Hypothesis strategies built on seeded numpy generators."""

import numpy as np
from hypothesis import strategies as st

from entanglekit.randstates import random_mixture, random_pure

seeds = st.integers(min_value=0, max_value=2**32 - 1)
small_dims = st.sampled_from([(2, 2), (2, 3), (3, 2), (3, 3), (2, 4)])


@st.composite
def mixed_states(draw, dims=small_dims):
    d = draw(dims)
    return random_mixture(d, seed=draw(seeds))


@st.composite
def pure_states(draw, dims=small_dims):
    d = draw(dims)
    return random_pure(d, seed=draw(seeds))


def haar_rng(seed):
    return np.random.default_rng(seed)
