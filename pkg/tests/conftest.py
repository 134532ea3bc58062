import numpy as np
import pytest
from hypothesis import strategies as st

from intergroup.ratings import RatingScale, validate_grouped_ratings

from oracles import TABLE1


def make_table1():
    return validate_grouped_ratings(
        TABLE1,
        [0, 1, 2],
        [3, 4, 5],
        RatingScale(5),
        rater_labels=["EC1", "EC2", "EC3", "NC1", "NC2", "NC3"],
    )


@pytest.fixture(scope="session")
def table1():
    return make_table1()


def random_grouped(rng, n_range=(3, 12), m_range=(2, 4), k_range=(2, 5)):
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    m1 = int(rng.integers(m_range[0], m_range[1] + 1))
    m2 = int(rng.integers(m_range[0], m_range[1] + 1))
    k = int(rng.integers(k_range[0], k_range[1] + 1))
    raw = rng.integers(1, k + 1, size=(n, m1 + m2))
    return validate_grouped_ratings(raw.tolist(), range(m1), range(m1, m1 + m2), RatingScale(k))


@st.composite
def grouped_ratings(draw, max_n=8, max_m=4, max_k=5, min_m=1):
    k = draw(st.integers(2, max_k))
    n = draw(st.integers(3, max_n))
    m1 = draw(st.integers(min_m, max_m))
    m2 = draw(st.integers(min_m, max_m))
    cells = draw(st.lists(st.integers(1, k), min_size=n * (m1 + m2), max_size=n * (m1 + m2)))
    raw = np.array(cells).reshape(n, m1 + m2)
    return validate_grouped_ratings(raw.tolist(), range(m1), range(m1, m1 + m2), RatingScale(k))
