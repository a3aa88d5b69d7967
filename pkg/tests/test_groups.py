import numpy as np
import pytest

from strel.groups import cyclic, parse_group, symmetric3


def test_cyclic():
    G = cyclic(5)
    assert G.order == 5 and G.generators == (1,)
    assert G.mul(3, 4) == 2 and G.inverse(2) == 3
    assert G.is_cyclic_prime(5) and not G.is_cyclic_prime(3)
    assert not cyclic(4).is_cyclic_prime()


def test_symmetric3_is_nonabelian():
    G = symmetric3()
    assert G.order == 6
    T = G.table
    assert not np.array_equal(T, T.T)
    assert not G.is_cyclic_prime()


def test_words_cover_group():
    G = symmetric3()
    words = G.words()
    assert sorted(x for x, _, _ in words) == list(range(1, 6))
    seen = {0}
    for x, y, gi in words:
        assert y in seen and G.mul(y, G.generators[gi]) == x
        seen.add(x)


def test_parse_group_round_trip():
    G = symmetric3()
    H = parse_group(G.spec())
    assert H == G
    assert parse_group("cyclic:3") == cyclic(3)
    assert parse_group({"order": 2, "table": [[0, 1], [1, 0]]}) == cyclic(2)


@pytest.mark.parametrize(
    "spec",
    [
        {"table": [[0, 1], [0, 1]]},  # not a Latin square
        {"table": [[1, 0], [0, 1]]},  # identity not at 0
        {"table": [[0, 1, 2], [1, 2, 0], [2, 0, 1]], "generators": [0]},  # does not generate
        "cyclic:0",
        "dihedral:4",
    ],
)
def test_bad_groups(spec):
    with pytest.raises(ValueError):
        parse_group(spec)


def test_non_associative_table_rejected():
    # a Latin square with identity 0 that is not a group law
    T = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    with pytest.raises(ValueError):
        parse_group({"table": T})
