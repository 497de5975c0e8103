"""System state, stochastic drivers and one-slot dynamics of the two-stage relay network.

Queue vectors carry a dummy component at index 0 on both stages. The SS stage has
``L`` real queues (indices ``1..L``) and the RS stage ``K`` real queues (``1..K``).
The dummy queues encode the idle action: they are always connected and always empty
at slot boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional, Sequence

import numpy as np


class ContractViolation(ValueError):
    """Raised when an operation is called outside its precondition."""


@dataclass(frozen=True)
class SystemState:
    x: tuple[int, ...]
    y: tuple[int, ...]
    cs: Optional[tuple[bool, ...]] = None
    cr: Optional[tuple[bool, ...]] = None

    @property
    def L(self) -> int:
        return len(self.x) - 1

    @property
    def K(self) -> int:
        return len(self.y) - 1

    def with_connectivity(self, cs: Sequence[bool], cr: Sequence[bool]) -> "SystemState":
        return replace(self, cs=tuple(bool(c) for c in cs), cr=tuple(bool(c) for c in cr))


def make_state(x, y, cs=None, cr=None) -> SystemState:
    """Build a state from any sequences, forcing dummy connectivity on."""
    x = tuple(int(v) for v in x)
    y = tuple(int(v) for v in y)
    if cs is None:
        cs = (True,) * len(x)
    if cr is None:
        cr = (True,) * len(y)
    cs = (True,) + tuple(bool(c) for c in cs[1:])
    cr = (True,) + tuple(bool(c) for c in cr[1:])
    return SystemState(x, y, cs, cr)


def empty_state(L: int, K: int) -> SystemState:
    return make_state([0] * (L + 1), [0] * (K + 1))


def state_violations(state: SystemState) -> list[str]:
    """List every broken state invariant (empty list means the state is valid)."""
    problems = []
    if state.x[0] != 0:
        problems.append(f"x[0] == {state.x[0]}, dummy SS queue must be 0")
    if state.y[0] != 0:
        problems.append(f"y[0] == {state.y[0]}, dummy RS queue must be 0")
    if any(v < 0 for v in state.x):
        problems.append(f"negative SS queue in {state.x}")
    if any(v < 0 for v in state.y):
        problems.append(f"negative RS queue in {state.y}")
    if state.cs is not None:
        if len(state.cs) != len(state.x) or not state.cs[0]:
            problems.append(f"bad SS connectivity {state.cs}")
    if state.cr is not None:
        if len(state.cr) != len(state.y) or not state.cr[0]:
            problems.append(f"bad RS connectivity {state.cr}")
    return problems


class Control(NamedTuple):
    """Scheduler decision: SS transmitter ``u1``, RS destination ``u2``, RS transmitter ``u3``."""

    u1: int
    u2: int
    u3: int


IDLE = Control(0, 0, 0)


@dataclass(frozen=True)
class FlowVectors:
    ws: tuple[int, ...]
    wr: tuple[int, ...]
    vr: tuple[int, ...]


def _check_range(state: SystemState, control: Control) -> None:
    u1, u2, u3 = control
    if not (0 <= u1 <= state.L and 0 <= u2 <= state.K and 0 <= u3 <= state.K):
        raise ContractViolation(f"control {tuple(control)} out of range for L={state.L}, K={state.K}")


def derive_flows(state: SystemState, control: Control) -> FlowVectors:
    """Withdrawal and insertion indicators for ``control``.

    A dummy transmission (``u1 == 0``) inserts nothing into the RS stage.
    """
    _check_range(state, control)
    u1, u2, u3 = control
    ws = tuple(int(i == u1) for i in range(state.L + 1))
    wr = tuple(int(j == u3) for j in range(state.K + 1))
    vr = tuple(int(j == u2 and j >= 1 and u1 >= 1) for j in range(state.K + 1))
    return FlowVectors(ws, wr, vr)


def is_feasible(state: SystemState, control: Control) -> bool:
    u1, u2, u3 = control
    if not (0 <= u1 <= state.L and 0 <= u2 <= state.K and 0 <= u3 <= state.K):
        return False
    if (u1 == 0) != (u2 == 0):
        return False
    if u1 != 0 and not (state.x[u1] > 0 and state.cs[u1]):
        return False
    if u3 != 0:
        # u3 acts after the u2 insertion within the same slot
        queued = state.y[u3] + (1 if u2 == u3 else 0)
        if not (queued > 0 and state.cr[u3]):
            return False
    return True


def feasible_controls(state: SystemState) -> list[Control]:
    """Every feasible control, in lexicographic order. Always contains ``IDLE``."""
    senders = [0] + [i for i in range(1, state.L + 1) if state.x[i] > 0 and state.cs[i]]
    out = []
    for u1 in senders:
        routes = [0] if u1 == 0 else range(1, state.K + 1)
        for u2 in routes:
            for u3 in range(state.K + 1):
                c = Control(u1, u2, u3)
                if u3 == 0 or is_feasible(state, c):
                    out.append(c)
    return out


def step(state: SystemState, control: Control, arrivals: Sequence[int]) -> SystemState:
    """Advance one slot: serve according to ``control``, then add ``arrivals``.

    The returned state has no connectivity; the caller draws it for the next slot.
    """
    if not is_feasible(state, control):
        raise ContractViolation(f"infeasible control {tuple(control)} in state {state}")
    if len(arrivals) != len(state.x) or any(a < 0 for a in arrivals[1:]):
        raise ContractViolation(f"bad arrival vector {tuple(arrivals)}")
    u1, u2, u3 = control
    x = list(state.x)
    y = list(state.y)
    if u1:
        x[u1] -= 1
        y[u2] += 1
    if u3:
        y[u3] -= 1
    for i in range(1, len(x)):
        x[i] += int(arrivals[i])
    x[0] = 0
    y[0] = 0
    return SystemState(tuple(x), tuple(y))


@dataclass(frozen=True)
class StochasticParams:
    """Bernoulli connectivity probability ``p`` and arrival probability ``q``.

    ``p_ss``, ``p_rs`` and ``q_ss`` optionally override the symmetric values per
    real queue (lengths ``L``, ``K`` and ``L``).
    """

    p: float
    q: float
    p_ss: Optional[tuple[float, ...]] = None
    p_rs: Optional[tuple[float, ...]] = None
    q_ss: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        probs = [self.p, self.q]
        for over in (self.p_ss, self.p_rs, self.q_ss):
            if over is not None:
                probs.extend(over)
        for v in probs:
            if not 0.0 <= v <= 1.0:
                raise ContractViolation(f"probability {v} outside [0, 1]")

    def thresholds(self, L: int, K: int) -> np.ndarray:
        """Per-uniform success thresholds in draw order: SS links, RS links, SS arrivals."""
        p_ss = self.p_ss if self.p_ss is not None else (self.p,) * L
        p_rs = self.p_rs if self.p_rs is not None else (self.p,) * K
        q_ss = self.q_ss if self.q_ss is not None else (self.q,) * L
        if len(p_ss) != L or len(p_rs) != K or len(q_ss) != L:
            raise ContractViolation("per-queue overrides do not match L, K")
        return np.array([*p_ss, *p_rs, *q_ss], dtype=float)


def driver_rng(seed: int, replication: int = 0, purpose: int = 0) -> np.random.Generator:
    """Counter-based Philox stream keyed by ``(seed, replication, purpose)``.

    ``purpose`` 0 feeds arrivals and connectivity, 1 feeds randomized policies, so
    policy randomness never perturbs the shared drivers.
    """
    ss = np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, replication, purpose])
    return np.random.Generator(np.random.Philox(ss))


def driver_block(params: StochasticParams, L: int, K: int, horizon: int, rng: np.random.Generator):
    """Draw ``horizon`` slots of drivers at once.

    Returns boolean arrays ``cs`` (horizon, L+1), ``cr`` (horizon, K+1) and integer
    arrivals (horizon, L+1). Consumes the generator exactly like ``horizon`` calls to
    :func:`sample_drivers`.
    """
    thr = params.thresholds(L, K)
    hits = rng.random((horizon, 2 * L + K)) < thr
    ones = np.ones((horizon, 1), dtype=bool)
    cs = np.hstack([ones, hits[:, :L]])
    cr = np.hstack([ones, hits[:, L:L + K]])
    a = np.hstack([np.zeros((horizon, 1), dtype=np.int64), hits[:, L + K:].astype(np.int64)])
    return cs, cr, a


def sample_drivers(params: StochasticParams, L: int, K: int, rng: np.random.Generator):
    """One slot of drivers: ``(cs, cr, arrivals)`` as tuples, dummy links forced on."""
    cs, cr, a = driver_block(params, L, K, 1, rng)
    return tuple(bool(c) for c in cs[0]), tuple(bool(c) for c in cr[0]), tuple(int(v) for v in a[0])


@dataclass
class History:
    """Elapsed slots as ``(state before control, control, arrivals)`` records."""

    initial: SystemState
    records: list = field(default_factory=list)

    def append(self, state: SystemState, control: Control, arrivals) -> None:
        self.records.append((state, control, tuple(arrivals)))

    def __len__(self) -> int:
        return len(self.records)

    def replay(self) -> SystemState:
        """Rebuild the current queue lengths from the initial state and the records."""
        state = self.initial
        for before, control, arrivals in self.records:
            state = step(state.with_connectivity(before.cs, before.cr), control, arrivals)
        return state
