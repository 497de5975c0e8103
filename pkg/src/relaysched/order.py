"""Preferred order on queue vectors and the monotone cost-function class.

``candidate`` is preferred to ``reference`` when a finite chain of reductions (S1),
two-component swaps (S2) and balancing interchanges (S3) turns ``reference`` into
``candidate``. The relation is decided by breadth-first search over a bounded box.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence

from .model import ContractViolation

REDUCTION = "S1"
PERMUTATION = "S2"
INTERCHANGE = "S3"


@dataclass(frozen=True)
class RelationStep:
    kind: str
    indices: tuple[int, ...]
    before: tuple[int, ...]
    after: tuple[int, ...]

    def is_valid(self) -> bool:
        b, a = self.before, self.after
        if len(b) != len(a):
            return False
        diff = [k for k in range(len(b)) if a[k] != b[k]]
        if self.kind == REDUCTION:
            return bool(diff) and all(a[k] <= b[k] for k in range(len(b)))
        if self.kind == PERMUTATION:
            if len(self.indices) != 2:
                return False
            i, j = self.indices
            return i != j and set(diff) <= {i, j} and a[i] == b[j] and a[j] == b[i]
        if self.kind == INTERCHANGE:
            i, j = self.indices
            return (set(diff) == {i, j} and b[i] >= b[j] + 1
                    and a[i] == b[i] - 1 and a[j] == b[j] + 1)
        return False


@dataclass(frozen=True)
class CostFunction:
    name: str
    evaluate: Callable[[Sequence[int]], float]

    def __call__(self, v):
        return self.evaluate(v)


total_cost = CostFunction("sum", lambda v: sum(v))
max_cost = CostFunction("max", lambda v: max(v))


def _unit_steps(v: tuple[int, ...]) -> Iterator[RelationStep]:
    m = len(v)
    for i in range(m):
        if v[i] > 0:
            w = list(v)
            w[i] -= 1
            yield RelationStep(REDUCTION, (i,), v, tuple(w))
    for i, j in itertools.combinations(range(m), 2):
        if v[i] != v[j]:
            w = list(v)
            w[i], w[j] = v[j], v[i]
            yield RelationStep(PERMUTATION, (i, j), v, tuple(w))
    for i in range(m):
        for j in range(m):
            # v[i] == v[j] + 1 only reproduces an S2 swap
            if i != j and v[i] >= v[j] + 2:
                w = list(v)
                w[i] -= 1
                w[j] += 1
                yield RelationStep(INTERCHANGE, (i, j), v, tuple(w))


def single_steps(v: Sequence[int]) -> Iterator[RelationStep]:
    """Every single S1/S2/S3 step out of ``v``, including multi-unit reductions."""
    v = tuple(v)
    m = len(v)
    for w in itertools.product(*(range(c + 1) for c in v)):
        if w != v:
            yield RelationStep(REDUCTION, tuple(k for k in range(m) if w[k] < v[k]), v, w)
    for i, j in itertools.combinations(range(m), 2):
        if v[i] != v[j]:
            w = list(v)
            w[i], w[j] = v[j], v[i]
            yield RelationStep(PERMUTATION, (i, j), v, tuple(w))
    for i in range(m):
        for j in range(m):
            if i != j and v[i] >= v[j] + 1:
                w = list(v)
                w[i] -= 1
                w[j] += 1
                yield RelationStep(INTERCHANGE, (i, j), v, tuple(w))


@dataclass
class PreferenceResult:
    """``verdict`` is True, False, or None when the search hit its bounds."""

    verdict: Optional[bool]
    witness: list = field(default_factory=list)
    explored: int = 0

    def __bool__(self):
        if self.verdict is None:
            raise ValueError("preference undecided within search bounds")
        return self.verdict


def is_preferred(candidate: Sequence[int], reference: Sequence[int], entry_bound: int,
                 step_bound: int = 64, max_states: int = 1_000_000) -> PreferenceResult:
    """Decide ``candidate`` preceq ``reference`` and return a witness chain when it holds.

    Edges are unit S1 reductions, S2 swaps and S3 interchanges; a node that already
    dominates ``candidate`` pointwise closes the chain with one multi-unit S1 step.
    No step raises an entry above the reference maximum, so the box is closed.
    """
    cand, ref = tuple(candidate), tuple(reference)
    if len(cand) != len(ref):
        raise ContractViolation("vectors must have equal dimension")
    if any(v < 0 or v > entry_bound for v in cand + ref):
        raise ContractViolation(f"entries must lie in [0, {entry_bound}]")

    def close(node):
        if node == cand:
            return []
        if all(c <= n for c, n in zip(cand, node)):
            idx = tuple(k for k in range(len(node)) if cand[k] < node[k])
            return [RelationStep(REDUCTION, idx, node, cand)]
        return None

    parent: dict = {ref: None}
    queue = deque([(ref, 0)])
    truncated = False
    while queue:
        node, depth = queue.popleft()
        tail = close(node)
        if tail is not None:
            chain = []
            cur = node
            while parent[cur] is not None:
                chain.append(parent[cur])
                cur = parent[cur].before
            return PreferenceResult(True, chain[::-1] + tail, len(parent))
        if depth >= step_bound:
            truncated = True
            continue
        for st in _unit_steps(node):
            if st.after not in parent:
                if len(parent) >= max_states:
                    return PreferenceResult(None, [], len(parent))
                parent[st.after] = st
                queue.append((st.after, depth + 1))
    return PreferenceResult(None if truncated else False, [], len(parent))


def replay_witness(reference: Sequence[int], chain: Sequence[RelationStep]) -> tuple[int, ...]:
    """Apply a witness chain to ``reference``, checking each step on the way."""
    cur = tuple(reference)
    for st in chain:
        if st.before != cur or not st.is_valid():
            raise ContractViolation(f"invalid witness step {st}")
        cur = st.after
    return cur


@dataclass
class MonotoneReport:
    cost: str
    passed: bool
    steps_checked: int
    violation: Optional[RelationStep] = None


def check_monotone(f: CostFunction, dimension: int, entry_bound: int) -> MonotoneReport:
    """Check ``f(after) <= f(before)`` on every single step inside the box.

    Monotonicity on single steps extends to the whole transitive closure.
    """
    checked = 0
    for v in itertools.product(range(entry_bound + 1), repeat=dimension):
        for st in single_steps(v):
            checked += 1
            if f(st.after) > f(st.before):
                return MonotoneReport(f.name, False, checked, st)
    return MonotoneReport(f.name, True, checked)
