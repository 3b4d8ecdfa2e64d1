"""Lexicographic k-tuples Q(k, n), the coordinate system of compound matrices.

Tuple entries are 1-based (matrix index convention), ranks are 0-based
(array storage).
"""

from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Dict, List, Sequence

import numpy as np

from errors import InvalidOrderError, NotAMemberError
from models import KTuple


class KIndexer:
    """Q(k, n) in lexicographic order with its rank map. Immutable."""

    def __init__(self, n: int, k: int):
        self.n = n
        self.k = k
        # itertools.combinations emits in lexicographic order
        self.tuples: List[KTuple] = [tuple(i + 1 for i in c) for c in combinations(range(n), k)]
        self._ranks: Dict[KTuple, int] = {t: i for i, t in enumerate(self.tuples)}

    def __len__(self):
        return len(self.tuples)

    def __getitem__(self, i: int) -> KTuple:
        return self.tuples[i]

    def __iter__(self):
        return iter(self.tuples)

    def rank(self, t: Sequence[int]) -> int:
        """0-based position of t in Q(k, n)"""
        key = tuple(int(i) for i in t)
        try:
            return self._ranks[key]
        except KeyError:
            raise NotAMemberError(f'{key} is not an element of Q({self.k},{self.n})') from None

    def index_array(self) -> np.ndarray:
        """0-based entries as an integer array of shape (C(n,k), k)"""
        if not self.tuples:
            return np.zeros((0, self.k), dtype=int)
        return np.array(self.tuples, dtype=int) - 1


def check_order(n: int, k: int):
    if n < 1:
        raise InvalidOrderError(f'dimension must be positive, got n={n}')
    if k < 1 or k > n:
        raise InvalidOrderError(f'order k={k} outside 1..{n}')


@lru_cache(maxsize=128)
def enumerate_tuples(n: int, k: int) -> KIndexer:
    check_order(n, k)
    return KIndexer(n, k)


def rank(indexer: KIndexer, t: Sequence[int]) -> int:
    return indexer.rank(t)


def check_tuple(t: Sequence[int], n: int) -> KTuple:
    """Validate t as a strictly increasing tuple over 1..n"""
    key = tuple(int(i) for i in t)
    if not key:
        raise NotAMemberError('empty tuple')
    if any(i < 1 or i > n for i in key):
        raise NotAMemberError(f'{key} has entries outside 1..{n}')
    if any(a >= b for a, b in zip(key, key[1:])):
        raise NotAMemberError(f'{key} is not strictly increasing')
    return key


def choose(n: int, k: int) -> int:
    """C(n, k), zero when k > n"""
    if k < 0 or k > n:
        return 0
    return comb(n, k)
