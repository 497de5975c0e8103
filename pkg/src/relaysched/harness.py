"""Replicated simulation with common random numbers, empirical dominance tests and
exhaustive verification sweeps."""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .config import ConfigError, ExperimentConfig
from .imbalance import interchange_ranks, kappa, lemma2_predicted_delta, valid_rank_pairs
from .model import (Control, FlowVectors, History, SystemState, derive_flows, driver_block,
                    driver_rng, make_state, state_violations, step)
from .policies import Policy, lcq_sq_lcq, make_policy, mb_oracle


@dataclass(frozen=True)
class SlotRecord:
    t: int
    state: SystemState
    control: Control
    flows: FlowVectors
    arrivals: tuple


@dataclass
class Trajectory:
    """One replication. ``cost_x[t]`` and ``cost_y[t]`` are the real-queue totals after
    ``t`` slots (index 0 is the initial state)."""

    replication: int
    initial: SystemState
    final: SystemState
    cost_x: list
    cost_y: list
    records: list = field(default_factory=list)
    driver_digest: str = ""


def _policy(policy: Union[str, Policy]) -> Policy:
    return make_policy(policy) if isinstance(policy, str) else policy


def _drivers(config: ExperimentConfig, replication: int):
    rng = driver_rng(config.seed, replication, 0)
    cs, cr, a = driver_block(config.params(), config.L, config.K, config.horizon, rng)
    digest = hashlib.sha256(cs.tobytes() + cr.tobytes() + a.tobytes()).hexdigest()
    return cs.tolist(), cr.tolist(), a.tolist(), digest


def simulate(config: ExperimentConfig, policy: Union[str, Policy], replication: int,
             keep_records: bool = True) -> Trajectory:
    """Run one replication. Drivers depend only on ``(config.seed, replication)``."""
    policy = _policy(policy)
    policy.reset()
    cs, cr, arr, digest = _drivers(config, replication)
    policy_rng = driver_rng(config.seed, replication, 1)
    initial = config.initial_state()
    history = History(initial)
    x, y = initial.x, initial.y
    cost_x = [sum(x)]
    cost_y = [sum(y)]
    records = []
    for t in range(config.horizon):
        state = SystemState(x, y, tuple(cs[t]), tuple(cr[t]))
        control = policy.decide(history, state, policy_rng)
        nxt = step(state, control, arr[t])
        if keep_records:
            records.append(SlotRecord(t + 1, state, control, derive_flows(state, control), tuple(arr[t])))
        history.append(state, control, arr[t])
        x, y = nxt.x, nxt.y
        cost_x.append(sum(x))
        cost_y.append(sum(y))
    return Trajectory(replication, SystemState(initial.x, initial.y), SystemState(x, y), cost_x, cost_y, records, digest)


def run_replications(config: ExperimentConfig, policy: Union[str, Policy],
                     keep_records: bool = True) -> list[Trajectory]:
    if config.replications < 1:
        raise ConfigError("need at least one replication")
    return [simulate(config, policy, r, keep_records) for r in range(config.replications)]


def run_costs(config: ExperimentConfig, policy: Union[str, Policy]) -> tuple[np.ndarray, np.ndarray]:
    """Cost series of every replication as ``(replications, horizon + 1)`` arrays."""
    trajs = run_replications(config, policy, keep_records=False)
    return (np.array([tr.cost_x for tr in trajs], dtype=np.int64),
            np.array([tr.cost_y for tr in trajs], dtype=np.int64))


def audit_trajectory(traj: Trajectory) -> list[str]:
    """Invariant violations along a recorded trajectory (empty when clean)."""
    problems = []
    states = [rec.state for rec in traj.records] + [traj.final]
    for st in states:
        problems.extend(state_violations(st))
    for rec, nxt in zip(traj.records, states[1:]):
        s, f = rec.state, rec.flows
        if sum(f.ws) != 1 or sum(f.wr) != 1 or f.vr[0] != 0 or sum(f.vr) > 1:
            problems.append(f"slot {rec.t}: malformed flows {f}")
        served_x = sum(f.ws[1:])
        if sum(nxt.x) - sum(s.x) != sum(rec.arrivals[1:]) - served_x:
            problems.append(f"slot {rec.t}: SS conservation broken")
        if sum(nxt.y) - sum(s.y) != sum(f.vr[1:]) - sum(f.wr[1:]):
            problems.append(f"slot {rec.t}: RS conservation broken")
        if rec.control.u1 and (s.x[rec.control.u1] == 0 or not s.cs[rec.control.u1]):
            problems.append(f"slot {rec.t}: SS withdrawal from empty or disconnected queue")
    for a, b in zip(traj.cost_x, [sum(st.x) for st in states]):
        if a != b:
            problems.append("cost_x series disagrees with recorded states")
            break
    return problems


def ecdf(sample: np.ndarray, support: np.ndarray) -> np.ndarray:
    """Right-continuous empirical CDF of ``sample`` evaluated at ``support``."""
    s = np.sort(sample)
    return np.searchsorted(s, support, side="right") / len(s)


def dkw_radius(n: int, alpha: float) -> float:
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * n))


@dataclass
class DominanceReport:
    policy_a: str
    policy_b: str
    replications: int
    checkpoints: list
    alpha: float
    epsilon: float
    cdfs: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    summary: list = field(default_factory=list)
    note: str = ("dominance is sampled at finitely many slots and for the total-count "
                 "cost only; passing does not cover every slot or every monotone cost")

    @property
    def holds(self) -> bool:
        return not self.violations

    def records(self) -> list[dict]:
        """Flat records for line-delimited output."""
        out = [{"record": "dominance", "policy_a": self.policy_a, "policy_b": self.policy_b,
                "replications": self.replications, "checkpoints": self.checkpoints,
                "alpha": self.alpha, "epsilon": self.epsilon,
                "violations": len(self.violations), "holds": self.holds, "note": self.note}]
        out += [{"record": "violation", **v} for v in self.violations]
        out += [{"record": "summary", **s} for s in self.summary]
        return out


def dominance_from_costs(costs_a: tuple, costs_b: tuple, checkpoints, alpha: float = 0.01,
                         names=("a", "b"), min_replications: int = 1000) -> DominanceReport:
    """Test ``cost under a <=_st cost under b`` at each checkpoint on both stages.

    A violation is a threshold ``z`` where ``F_a(z) < F_b(z) - eps``. ``eps`` is the
    DKW radius at level ``alpha`` split (Bonferroni) over checkpoints and both stages.
    """
    n = costs_a[0].shape[0]
    if n < min_replications or costs_b[0].shape[0] != n:
        raise ConfigError(f"dominance test needs >= {min_replications} paired replications (got {n})")
    checkpoints = sorted(checkpoints)
    eps = dkw_radius(n, alpha / (2 * len(checkpoints)))
    report = DominanceReport(names[0], names[1], n, checkpoints, alpha, eps)
    for t in checkpoints:
        for stage, ca, cb in (("ss", costs_a[0][:, t], costs_b[0][:, t]),
                              ("rs", costs_a[1][:, t], costs_b[1][:, t])):
            support = np.union1d(ca, cb)
            fa, fb = ecdf(ca, support), ecdf(cb, support)
            report.cdfs[(stage, t)] = (support, fa, fb)
            for z, va, vb in zip(support, fa, fb):
                if va < vb - eps:
                    report.violations.append({"stage": stage, "t": int(t), "z": int(z),
                                              "cdf_a": float(va), "cdf_b": float(vb)})
            report.summary.append({"stage": stage, "t": int(t),
                                   "mean_a": float(ca.mean()), "mean_b": float(cb.mean()),
                                   "var_a": float(ca.var()), "var_b": float(cb.var())})
    return report


def empirical_dominance(config: ExperimentConfig, policy_a: str, policy_b: str,
                        checkpoints=None, alpha: Optional[float] = None) -> DominanceReport:
    """Run both policies on the same drivers and compare their cost distributions."""
    checkpoints = checkpoints or config.effective_checkpoints()
    alpha = config.alpha if alpha is None else alpha
    if config.replications < 1000:
        raise ConfigError(f"dominance test needs >= 1000 replications (got {config.replications})")
    return dominance_from_costs(run_costs(config, policy_a), run_costs(config, policy_b),
                                checkpoints, alpha, (policy_a, policy_b))


@dataclass
class Theorem1Report:
    states: int = 0
    membership_failures: int = 0
    empty_intersections: int = 0
    failure_examples: list = field(default_factory=list)
    empty_examples: list = field(default_factory=list)

    def records(self) -> list[dict]:
        return [{"record": "theorem1", "states": self.states,
                 "membership_failures": self.membership_failures,
                 "empty_intersections": self.empty_intersections,
                 "failure_examples": self.failure_examples,
                 "empty_examples": self.empty_examples}]


def _state_repr(st: SystemState) -> dict:
    return {"x": list(st.x), "y": list(st.y), "cs": [int(c) for c in st.cs], "cr": [int(c) for c in st.cr]}


def exhaustive_theorem1_sweep(L_max: int = 3, K_max: int = 3, entry_max: int = 3,
                              keep_examples: int = 5) -> Theorem1Report:
    """Check LCQ/SQ/LCQ against the enumeration oracle on every small state."""
    rep = Theorem1Report()
    for L in range(1, L_max + 1):
        for K in range(1, K_max + 1):
            for xs in itertools.product(range(entry_max + 1), repeat=L):
                for ys in itertools.product(range(entry_max + 1), repeat=K):
                    for bits in itertools.product((False, True), repeat=L + K):
                        st = make_state((0, *xs), (0, *ys), (True, *bits[:L]), (True, *bits[L:]))
                        verdict = mb_oracle(st)
                        rep.states += 1
                        if verdict.empty_intersection_flag:
                            rep.empty_intersections += 1
                            if len(rep.empty_examples) < keep_examples:
                                rep.empty_examples.append(_state_repr(st))
                            continue
                        if lcq_sq_lcq(st) not in verdict.intersection:
                            rep.membership_failures += 1
                            if len(rep.failure_examples) < keep_examples:
                                rep.failure_examples.append(_state_repr(st))
    return rep


@dataclass
class Lemma2Report:
    vectors: int = 0
    cases: int = 0
    mismatches: int = 0
    mismatch_examples: list = field(default_factory=list)

    def records(self) -> list[dict]:
        return [{"record": "lemma2", "vectors": self.vectors, "cases": self.cases,
                 "mismatches": self.mismatches, "mismatch_examples": self.mismatch_examples}]


def lemma2_exhaustive_sweep(dim_max: int = 5, entry_max: int = 6) -> Lemma2Report:
    """Compare observed and closed-form imbalance changes for every valid interchange."""
    rep = Lemma2Report()
    for dim in range(1, dim_max + 1):
        for combo in itertools.combinations_with_replacement(range(entry_max, -1, -1), dim):
            rep.vectors += 1
            base = kappa(combo)
            for l, s in valid_rank_pairs(combo):
                rep.cases += 1
                observed = kappa(interchange_ranks(combo, l, s)) - base
                predicted = lemma2_predicted_delta(combo, l, s)
                if observed != predicted:
                    rep.mismatches += 1
                    rep.mismatch_examples.append({"v": list(combo), "l": l, "s": s,
                                                  "observed": observed, "predicted": predicted})
    return rep
