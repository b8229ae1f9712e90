from bisect import bisect_right

import pytest

from cubitab.tabulate import FieldTable, enumerate_fields

# Covers the asymptotic checks at 10^6 and the smallest member of the
# literal certificate's class, a + 1 = 5 * 13^2 * 37^2 = 1156805.
BIG_BOUND = 1_160_000


def restrict(table: FieldTable, bound: int) -> FieldTable:
    n = bisect_right([abs(r.disc) for r in table.records], bound)
    return FieldTable(table.sign, bound, table.records[:n])


@pytest.fixture(scope="session")
def table_neg_big():
    return enumerate_fields("-", BIG_BOUND)


@pytest.fixture(scope="session")
def table_pos_big():
    return enumerate_fields("+", BIG_BOUND)


@pytest.fixture(scope="session")
def table_neg_2000(table_neg_big):
    return restrict(table_neg_big, 2000)


@pytest.fixture(scope="session")
def table_pos_2000(table_pos_big):
    return restrict(table_pos_big, 2000)


@pytest.fixture(scope="session")
def table_pos_1e6(table_pos_big):
    return restrict(table_pos_big, 10**6)


@pytest.fixture(scope="session")
def table_neg_1e5(table_neg_big):
    return restrict(table_neg_big, 10**5)


@pytest.fixture(scope="session")
def table_pos_1e5(table_pos_big):
    return restrict(table_pos_big, 10**5)
