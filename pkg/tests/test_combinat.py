import pytest

from errors import InvalidOrderError, NotAMemberError
from services.combinat import KIndexer, check_order, check_tuple, choose, enumerate_tuples, rank


class TestKIndexer:
    def test_lexicographic_order(self):
        indexer = enumerate_tuples(4, 2)
        assert list(indexer) == [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]

    def test_rank_inverts_enumeration(self):
        indexer = enumerate_tuples(6, 3)
        assert len(indexer) == 20
        for i, t in enumerate(indexer):
            assert rank(indexer, t) == i
        assert indexer[indexer.rank((2, 4, 6))] == (2, 4, 6)

    def test_full_and_single_orders(self):
        assert list(enumerate_tuples(3, 3)) == [(1, 2, 3)]
        assert list(enumerate_tuples(3, 1)) == [(1,), (2,), (3,)]

    def test_not_a_member(self):
        indexer = KIndexer(4, 2)
        with pytest.raises(NotAMemberError):
            indexer.rank((2, 1))
        with pytest.raises(InvalidOrderError):
            indexer.rank((1, 5))

    def test_index_array_is_zero_based(self):
        arr = enumerate_tuples(3, 2).index_array()
        assert arr.shape == (3, 2)
        assert arr.tolist() == [[0, 1], [0, 2], [1, 2]]

    def test_enumeration_is_cached(self):
        assert enumerate_tuples(5, 2) is enumerate_tuples(5, 2)


class TestOrderChecks:
    @pytest.mark.parametrize('n,k', [(3, 0), (3, 4), (0, 1), (2, -1)])
    def test_invalid_orders(self, n, k):
        with pytest.raises(InvalidOrderError):
            check_order(n, k)
        with pytest.raises(InvalidOrderError):
            enumerate_tuples(n, k)

    @pytest.mark.parametrize('t', [(), (2, 1), (1, 1), (0, 2), (1, 4)])
    def test_bad_tuples(self, t):
        with pytest.raises(NotAMemberError):
            check_tuple(t, 3)

    def test_choose(self):
        assert choose(5, 2) == 10
        assert choose(2, 3) == 0
        assert choose(0, 0) == 1
