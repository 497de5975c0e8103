"""Imbalance index and balancing interchanges.

Ranks in this module are 1-based: rank 1 is the longest component of a vector.
Plain array indices (``apply_interchange``) stay 0-based.
"""

from __future__ import annotations

from typing import Iterator, Sequence

from .model import ContractViolation


def kappa(v: Sequence[int]) -> int:
    """Sum of pairwise differences between descending order statistics.

    Evaluated in linear form: the component at rank ``k`` of an ``M``-vector
    contributes with weight ``M + 1 - 2k``.
    """
    ordered = sorted(v, reverse=True)
    m = len(ordered)
    return int(sum((m + 1 - 2 * k) * val for k, val in enumerate(ordered, start=1)))


def apply_interchange(v: Sequence[int], i: int, j: int) -> tuple[int, ...]:
    """Move one unit from component ``i`` to component ``j`` (requires ``v[i] >= v[j] + 1``)."""
    if i == j or not (0 <= i < len(v) and 0 <= j < len(v)):
        raise ContractViolation(f"bad interchange indices ({i}, {j}) for length {len(v)}")
    if v[i] < v[j] + 1:
        raise ContractViolation(f"donor {v[i]} is not larger than recipient {v[j]}")
    out = list(v)
    out[i] -= 1
    out[j] += 1
    return tuple(out)


def _is_descending(v: Sequence[int]) -> bool:
    return all(a >= b for a, b in zip(v, v[1:]))


def rank_conditions_hold(sorted_v: Sequence[int], l: int, s: int) -> bool:
    """True when ``l`` is the last rank holding its value, ``s`` the first rank holding
    its value, and the value at ``l`` exceeds the value at ``s``."""
    m = len(sorted_v)
    if not (1 <= l < s <= m) or not _is_descending(sorted_v):
        return False
    xl, xs = sorted_v[l - 1], sorted_v[s - 1]
    if xl <= xs:
        return False
    last_of_block = l == m or sorted_v[l] < xl
    first_of_block = sorted_v[s - 2] > xs
    return last_of_block and first_of_block


def valid_rank_pairs(sorted_v: Sequence[int]) -> Iterator[tuple[int, int]]:
    m = len(sorted_v)
    for l in range(1, m):
        for s in range(l + 1, m + 1):
            if rank_conditions_hold(sorted_v, l, s):
                yield l, s


def interchange_ranks(sorted_v: Sequence[int], l: int, s: int) -> tuple[int, ...]:
    """Balancing interchange between ranks ``l`` and ``s`` of a descending vector."""
    return apply_interchange(sorted_v, l - 1, s - 1)


def lemma2_predicted_delta(sorted_v: Sequence[int], l: int, s: int) -> int:
    """Closed-form change of ``kappa`` caused by ``interchange_ranks(sorted_v, l, s)``.

    Raises ContractViolation unless the rank conditions hold.
    """
    if not rank_conditions_hold(sorted_v, l, s):
        raise ContractViolation(f"ranks (l={l}, s={s}) violate the interchange conditions on {tuple(sorted_v)}")
    return -2 * (s - l) if sorted_v[l - 1] >= sorted_v[s - 1] + 2 else 0


def min_kappa(dim: int, level: int) -> int:
    """Imbalance of the balanced vector ``(level, ..., level, 0)`` of length ``dim``."""
    if dim < 2 or level < 0:
        raise ContractViolation(f"min_kappa needs dim >= 2 and level >= 0, got ({dim}, {level})")
    return (dim - 1) * level
