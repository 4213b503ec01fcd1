import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fairalloc.errors import InputError
from fairalloc.matching import is_matching, max_matching, priority_matching, saturation_vector
from oracles import brute_max_matching_size, brute_saturation_max

graphs = st.integers(0, 5).flatmap(
    lambda nl: st.integers(0, 5).flatmap(
        lambda nr: st.fixed_dictionaries(
            {u: st.lists(st.integers(0, max(nr - 1, 0)), max_size=nr, unique=True) if nr else st.just([])
             for u in range(nl)}
        )
    )
)


def test_empty_graph():
    assert max_matching({}) == {}


def test_complete_2x2():
    assert len(max_matching({0: "ab", 1: "ab"})) == 2


def test_two_agents_one_item_priority():
    assert priority_matching({0: ["g"], 1: ["g"]}, [0, 1]) == {0: "g"}
    assert priority_matching({0: ["g"], 1: ["g"]}, [1, 0]) == {1: "g"}


def test_star_prefers_cardinality():
    assert priority_matching({1: ["a", "b"], 2: ["a"]}, [1, 2]) == {1: "b", 2: "a"}


def test_sigma_must_cover_left_side():
    with pytest.raises(InputError):
        priority_matching({0: [1], 1: [1]}, [0])
    with pytest.raises(InputError):
        priority_matching({0: [1]}, [0, 0])


@given(graphs)
def test_max_matching_is_maximum(g):
    mu = max_matching(g)
    assert is_matching(g, mu)
    assert len(mu) == brute_max_matching_size(g)


@given(graphs, st.randoms(use_true_random=False))
def test_priority_matching_lexicographic_and_maximum(g, rnd):
    sigma = list(g)
    rnd.shuffle(sigma)
    mu = priority_matching(g, sigma)
    assert is_matching(g, mu)
    assert tuple(saturation_vector(mu, sigma)) == brute_saturation_max(g, sigma)
    assert len(mu) == len(max_matching(g))


def test_random_graphs_up_to_12():
    rng = random.Random(7)
    for _ in range(40):
        nl, nr = rng.randint(0, 7), rng.randint(0, 7)
        g = {u: [v for v in range(nr) if rng.random() < 0.3] for u in range(nl)}
        assert len(max_matching(g)) == brute_max_matching_size(g)
