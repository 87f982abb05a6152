import random
from fractions import Fraction

import pytest

from qhabiro import CoeffSeq, QSeries


def seq_from_list(side, items):
    """CoeffSeq over a finite list of QSeries (zero beyond the list)."""
    data = list(items)

    def gen(k):
        return data[k] if k < len(data) else QSeries.zero()

    return CoeffSeq(side, gen)


def random_laurent(rng: random.Random, span: int = 4, lo: int = -6,
                   hi: int = 6, density: float = 0.6) -> QSeries:
    terms = {}
    for _ in range(span):
        if rng.random() < density:
            terms[rng.randint(lo, hi)] = rng.randint(-5, 5)
    return QSeries.from_terms(terms)


def series_from_str_coeffs(pairs) -> QSeries:
    """Build an exact series from {exponent: coefficient} pairs."""
    return QSeries.from_terms({Fraction(e): c for e, c in pairs.items()})


@pytest.fixture
def rng():
    return random.Random(20240817)
