"""Hypothesis strategies shared by the property tests."""

from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import strategies as st

from rigidmetric.samples import random_grid_space, random_hub_family

GRID = (Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2))


@st.composite
def grid_spaces(draw, min_size=1, max_size=6, grid=GRID, prefix="p"):
    n = draw(st.integers(min_size, max_size))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_grid_space(n, grid, random.Random(seed), prefix)


@st.composite
def hub_families(draw, max_points=10, grid=GRID):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_hub_family(random.Random(seed), grid, max_points=max_points)
