import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from relaysched.imbalance import kappa
from relaysched.model import IDLE, ContractViolation, Control, empty_state, is_feasible, make_state, step
from relaysched.policies import (REGISTRY, LCQRandomRoute, MostBalancing, RandomFeasible, RoundRobin,
                                 ServeShortest, lcq_sq_lcq, make_policy, mb_oracle, updated_queues)

from .oracles import feasible_by_constraints, kappa_direct


def test_updated_queues_examples():
    s = make_state([0, 3, 1], [0, 2, 0])
    assert updated_queues(s, Control(1, 2, 1)) == ((-1 + 1, 2, 1), (0, 1, 1))
    x_hat, _ = updated_queues(s, Control(1, 1, 0))
    assert x_hat[1:] == (2, 1)


def test_updated_queues_idle_marks_dummy_withdrawal():
    s = make_state([0, 3, 1], [0, 2, 0])
    x_hat, y_hat = updated_queues(s, IDLE)
    assert x_hat[1:] == s.x[1:] and y_hat[1:] == s.y[1:]
    assert x_hat[0] == -1 and y_hat[0] == -1


def test_updated_queues_rejects_infeasible():
    with pytest.raises(ContractViolation):
        updated_queues(empty_state(1, 1), Control(1, 1, 0))


def test_lcq_sq_lcq_examples():
    s = make_state([0, 3, 1], [0, 2, 0])
    assert lcq_sq_lcq(s) == Control(1, 2, 1)
    assert lcq_sq_lcq(s) in mb_oracle(s).intersection


def test_sq_prefers_connected_among_shortest():
    s = make_state([0, 1], [0, 2, 2], cr=[1, 0, 1])
    assert lcq_sq_lcq(s).u2 == 2


def test_forced_idle_sets_u2_zero():
    assert lcq_sq_lcq(make_state([0, 0, 0], [0, 1, 0])) == Control(0, 0, 1)
    c = lcq_sq_lcq(make_state([0, 4, 2], [0, 1, 0], cs=[1, 0, 0]))
    assert c.u1 == 0 and c.u2 == 0


def test_u3_uses_post_insertion_lengths():
    s = make_state([0, 1], [0, 0, 0])
    # maximizing y alone would find no nonempty RS queue and idle
    assert lcq_sq_lcq(s) == Control(1, 1, 1)
    s = make_state([0, 1], [0, 3, 0], cr=[1, 0, 1])
    assert lcq_sq_lcq(s) == Control(1, 2, 2)


def test_mb_oracle_empty_system():
    v = mb_oracle(empty_state(2, 2))
    assert v.intersection == {IDLE} and not v.empty_intersection_flag


def test_mb_oracle_tie_between_equal_ss_queues():
    v = mb_oracle(make_state([0, 2, 2], [0, 0]))
    assert {c.u1 for c in v.argmin_x} == {1, 2}
    assert v.kappa_x[Control(1, 1, 0)] == kappa_direct([0, 1, 2]) == v.kappa_x[Control(2, 1, 1)]


def test_mb_oracle_reports_empty_intersection():
    # serving the SS queue is x-optimal but loads a disconnected RS queue
    v = mb_oracle(make_state([0, 1], [0, 0], cr=[1, 0]))
    assert v.empty_intersection_flag
    assert {c.u1 for c in v.argmin_x} == {1} and v.argmin_y == {IDLE}


def test_mb_oracle_agrees_with_constraint_enumeration():
    s = make_state([0, 2, 1], [0, 1, 3], cs=[1, 1, 0], cr=[1, 0, 1])
    v = mb_oracle(s)
    controls = feasible_by_constraints(s.x, s.y, s.cs, s.cr)
    kx = {c: kappa_direct(updated_queues(s, Control(*c))[0]) for c in controls}
    ky = {c: kappa_direct(updated_queues(s, Control(*c))[1]) for c in controls}
    assert v.argmin_x == {c for c in controls if kx[c] == min(kx.values())}
    assert v.argmin_y == {c for c in controls if ky[c] == min(ky.values())}
    assert v.intersection == v.argmin_x & v.argmin_y


def test_theorem1_small_grid():
    for L, K in itertools.product((1, 2), (1, 2)):
        for xs in itertools.product(range(3), repeat=L):
            for ys in itertools.product(range(3), repeat=K):
                for bits in itertools.product((0, 1), repeat=L + K):
                    s = make_state((0, *xs), (0, *ys), (1, *bits[:L]), (1, *bits[L:]))
                    v = mb_oracle(s)
                    if not v.empty_intersection_flag:
                        assert lcq_sq_lcq(s) in v.intersection, s


def test_lcq_tie_break_lowest_index_is_still_minimal():
    s = make_state([0, 3, 3, 1], [0, 1, 1], cr=[1, 1, 1])
    c = lcq_sq_lcq(s)
    assert c.u1 == 1 and c.u2 == 1
    v = mb_oracle(s)
    assert kappa(updated_queues(s, c)[0]) == min(v.kappa_x.values())


def test_baseline_examples():
    rng = np.random.default_rng(0)
    assert RandomFeasible().decide(None, empty_state(2, 2), rng) == IDLE
    assert ServeShortest().decide(None, make_state([0, 3, 1], [0, 0]), rng).u1 == 2
    rr = RoundRobin()
    s = make_state([0, 1, 1], [0, 0])
    assert rr.decide(None, s, rng).u1 == 1
    assert rr.decide(None, s, rng).u1 == 2
    rr.reset()
    c = rr.decide(None, s, rng)
    nxt = step(s, c, [0, 0, 0]).with_connectivity([1, 1, 1], [1, 1])
    assert c.u1 == 1 and rr.decide(None, nxt, rng).u1 == 2


def test_random_policies_reproducible():
    s = make_state([0, 2, 3, 1], [0, 1, 0, 2])
    for cls in (RandomFeasible, LCQRandomRoute):
        a = [cls().decide(None, s, np.random.default_rng(7)) for _ in range(5)]
        b = [cls().decide(None, s, np.random.default_rng(7)) for _ in range(5)]
        assert a == b


def test_registry():
    assert set(REGISTRY) == {"mb", "random", "rr", "lcq-rand-route", "anti"}
    assert isinstance(make_policy("mb"), MostBalancing)
    with pytest.raises(ContractViolation):
        make_policy("nope")


def _random_states(n, seed):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        L, K = rng.integers(1, 5, size=2)
        x = [0, *rng.integers(0, 4, size=L)]
        y = [0, *rng.integers(0, 4, size=K)]
        cs = [1, *rng.integers(0, 2, size=L)]
        cr = [1, *rng.integers(0, 2, size=K)]
        yield make_state(x, y, cs, cr)


def test_feasibility_contract_many_random_states():
    rng = np.random.default_rng(1)
    policies = [make_policy(name) for name in REGISTRY]
    count = 0
    for s in _random_states(200_000, 99):
        for pol in policies:
            assert is_feasible(s, pol.decide(None, s, rng)), (pol.name, s)
            count += 1
    assert count == 1_000_000


@given(st.lists(st.integers(0, 6), min_size=1, max_size=4), st.lists(st.integers(0, 6), min_size=1, max_size=4),
       st.data())
def test_lcq_sq_lcq_is_pure_and_feasible(xs, ys, data):
    cs = data.draw(st.lists(st.booleans(), min_size=len(xs), max_size=len(xs)))
    cr = data.draw(st.lists(st.booleans(), min_size=len(ys), max_size=len(ys)))
    s = make_state([0, *xs], [0, *ys], [1, *cs], [1, *cr])
    c = lcq_sq_lcq(s)
    assert is_feasible(s, c) and lcq_sq_lcq(s) == c
