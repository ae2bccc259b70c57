"""Variable selection: which divisible cell the engine splits next.

Selectors return a 0-based variable index rather than the cell itself.
"""
from __future__ import annotations

from .precision import Card, Store


def _divisible_indices(s: Store) -> list[int]:
    if not s.divisible():
        raise ValueError(f"selector called on a non-divisible store {s}")
    return [j for j, cell in enumerate(s) if cell.card() is Card.MANY]


def choose_naive(s: Store) -> int:
    """Leftmost divisible cell."""
    return _divisible_indices(s)[0]


def choose_ff(s: Store) -> int:
    """First fail: the divisible cell of least precision, leftmost on ties.

    Precision is comparable across computation domains, so mixed stores
    need no extra normalisation.
    """
    candidates = _divisible_indices(s)
    return min(candidates, key=lambda j: (s[j].precision(), j))


SELECTORS = {"naive": choose_naive, "ff": choose_ff}
