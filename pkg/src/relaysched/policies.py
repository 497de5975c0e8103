"""Scheduling policies, the LCQ/SQ/LCQ algorithm and the exhaustive most-balancing oracle."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .imbalance import kappa
from .model import IDLE, ContractViolation, Control, History, SystemState, feasible_controls, is_feasible


def updated_queues(state: SystemState, control: Control) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Queue vectors after serving ``control`` and before exogenous arrivals.

    The dummy components record the dummy withdrawal: an idle SS (or RS) half of the
    slot leaves ``-1`` at index 0, since the dummy's compensating arrival only lands
    with the exogenous arrivals. Real components never go negative.
    """
    if not is_feasible(state, control):
        raise ContractViolation(f"infeasible control {tuple(control)} in state {state}")
    u1, u2, u3 = control
    x_hat = list(state.x)
    y_hat = list(state.y)
    x_hat[u1] -= 1
    if u1:
        y_hat[u2] += 1
    y_hat[u3] -= 1
    return tuple(x_hat), tuple(y_hat)


def _longest_connected(values, connected) -> int:
    best, best_val = 0, 0
    for i in range(1, len(values)):
        if connected[i] and values[i] > best_val:
            best, best_val = i, values[i]
    return best


def lcq_sq_lcq(state: SystemState) -> Control:
    """Longest connected SS queue, shortest RS queue, longest connected RS queue.

    Ties go to the lowest index, except that among equally short RS queues a
    connected one is preferred. ``u3`` is chosen on the RS lengths after the routed
    packet has been inserted.
    """
    x, y, cs, cr = state.x, state.y, state.cs, state.cr
    u1 = _longest_connected(x, cs)
    u2 = 0
    if u1:
        shortest = min(y[1:])
        ties = [j for j in range(1, len(y)) if y[j] == shortest]
        connected = [j for j in ties if cr[j]]
        u2 = connected[0] if connected else ties[0]
    after = list(y)
    if u2:
        after[u2] += 1
    u3 = _longest_connected(after, cr)
    return Control(u1, u2, u3)


@dataclass(frozen=True)
class MBVerdict:
    argmin_x: frozenset
    argmin_y: frozenset
    intersection: frozenset
    empty_intersection_flag: bool
    kappa_x: dict
    kappa_y: dict


def mb_oracle(state: SystemState, max_controls: int = 100_000) -> MBVerdict:
    """Enumerate all feasible controls and intersect the two imbalance minimizers."""
    controls = feasible_controls(state)
    if len(controls) > max_controls:
        raise ContractViolation(f"{len(controls)} feasible controls exceed the enumeration guard")
    kx, ky = {}, {}
    for c in controls:
        x_hat, y_hat = updated_queues(state, c)
        kx[c] = kappa(x_hat)
        ky[c] = kappa(y_hat)
    best_x, best_y = min(kx.values()), min(ky.values())
    ax = frozenset(c for c in controls if kx[c] == best_x)
    ay = frozenset(c for c in controls if ky[c] == best_y)
    both = ax & ay
    return MBVerdict(ax, ay, both, not both, kx, ky)


class Policy:
    """A rule mapping the history and current state to a feasible control.

    Subclasses override :meth:`decide`. ``reset`` is called at the start of every
    trajectory; stateless policies need not override it.
    """

    name = "policy"

    def reset(self) -> None:
        pass

    def decide(self, history: Optional[History], state: SystemState, rng: Optional[np.random.Generator]) -> Control:
        raise NotImplementedError


class MostBalancing(Policy):
    """LCQ/SQ/LCQ, a most-balancing policy."""

    name = "mb"

    def decide(self, history, state, rng):
        return lcq_sq_lcq(state)


class RandomFeasible(Policy):
    """Uniform choice over the feasible control set, idle included."""

    name = "random"

    def decide(self, history, state, rng):
        controls = feasible_controls(state)
        return controls[int(rng.integers(len(controls)))]


class RoundRobin(Policy):
    """Cyclic cursors over SS transmitters, RS destinations and RS transmitters.

    Each cursor advances to the next index that keeps the control feasible and idles
    only when no such index exists.
    """

    name = "rr"

    def __init__(self):
        self.reset()

    def reset(self):
        self._ss = 0
        self._dest = 0
        self._rs = 0

    @staticmethod
    def _next(cursor: int, n: int, ok: Callable[[int], bool]) -> int:
        for k in range(1, n + 1):
            cand = (cursor + k - 1) % n + 1
            if ok(cand):
                return cand
        return 0

    def decide(self, history, state, rng):
        L, K = state.L, state.K
        u1 = self._next(self._ss, L, lambda i: state.x[i] > 0 and state.cs[i])
        u2 = 0
        if u1:
            self._ss = u1
            u2 = self._next(self._dest, K, lambda j: True)
            self._dest = u2
        after = list(state.y)
        if u2:
            after[u2] += 1
        u3 = self._next(self._rs, K, lambda j: after[j] > 0 and state.cr[j])
        if u3:
            self._rs = u3
        return Control(u1, u2, u3)


class LCQRandomRoute(Policy):
    """LCQ on both transmit decisions with a uniformly random RS destination."""

    name = "lcq-rand-route"

    def decide(self, history, state, rng):
        u1 = _longest_connected(state.x, state.cs)
        u2 = int(rng.integers(1, state.K + 1)) if u1 else 0
        after = list(state.y)
        if u2:
            after[u2] += 1
        return Control(u1, u2, _longest_connected(after, state.cr))


def _shortest_nonempty_connected(values, connected) -> int:
    best, best_val = 0, None
    for i in range(1, len(values)):
        if connected[i] and values[i] > 0 and (best_val is None or values[i] < best_val):
            best, best_val = i, values[i]
    return best


class ServeShortest(Policy):
    """Anti-balancing baseline that serves the shortest queues and routes to the longest.

    Picks the shortest nonempty connected SS queue, the longest RS destination and
    the shortest nonempty connected RS transmitter. Idles only when forced.
    """

    name = "anti"

    def decide(self, history, state, rng):
        y = state.y
        u1 = _shortest_nonempty_connected(state.x, state.cs)
        u2 = 0
        if u1:
            longest = max(y[1:])
            u2 = next(j for j in range(1, len(y)) if y[j] == longest)
        after = list(y)
        if u2:
            after[u2] += 1
        return Control(u1, u2, _shortest_nonempty_connected(after, state.cr))


REGISTRY: dict[str, type[Policy]] = {
    cls.name: cls for cls in (MostBalancing, RandomFeasible, RoundRobin, LCQRandomRoute, ServeShortest)
}


def make_policy(name: str) -> Policy:
    try:
        return REGISTRY[name]()
    except KeyError:
        raise ContractViolation(f"unknown policy {name!r}; known: {', '.join(REGISTRY)}") from None
