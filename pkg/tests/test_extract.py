import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from zetaforms.extract import (
    ExtractionInstance,
    PreconditionError,
    RecursionCapError,
    SpreadRequest,
    _State,
    _step,
    brute_force,
    certify,
    extend,
    extract,
    family_rank,
    make_instance,
    random_instance,
    random_request,
    rank_Q,
    rank_threshold,
    zeta_shaped_instance,
)


def gauss_rank(rows):
    """Textbook elimination over Q, kept separate from the library routine."""
    m = [[Fraction(x) for x in r] for r in rows]
    rank, col = 0, 0
    ncols = len(m[0]) if m else 0
    while rank < len(m) and col < ncols:
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col] / m[rank][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[rank])]
        rank += 1
        col += 1
    return rank


matrices = st.integers(1, 6).flatmap(
    lambda cols: st.lists(st.lists(st.fractions(-4, 4, max_denominator=3), min_size=cols, max_size=cols), min_size=1, max_size=7)
)


@given(matrices)
def test_rank_matches_textbook_elimination(rows):
    assert rank_Q(rows) == gauss_rank(rows)


@given(matrices, st.randoms(use_true_random=False))
def test_rank_invariant_under_row_operations(rows, rnd):
    perm = list(rows)
    rnd.shuffle(perm)
    scaled = [[x * (i + 2) for x in r] for i, r in enumerate(perm)]
    assert rank_Q(perm) == rank_Q(rows) == rank_Q(scaled)


@given(st.integers(0, 10**6))
def test_random_corpus_property(seed):
    rng = random.Random(seed)
    inst = random_instance(rng)
    req = random_request(rng, inst)
    pre = family_rank(inst) > rank_threshold(inst.k, req.delta, req.p, req.q)
    if not pre:
        with pytest.raises(PreconditionError):
            extract(inst, req)
        return
    out = extract(inst, req)
    assert certify(inst, req, out)
    assert out == sorted(out)
    bf = brute_force(inst, req)
    assert bf is not None and certify(inst, req, bf)


def test_certify_rejects_bad_outputs():
    inst = zeta_shaped_instance(2, 6)
    req = SpreadRequest(Fraction(1), 2, (4,))
    assert certify(inst, req, [1, 7])
    assert not certify(inst, req, [1, 2])  # too close
    assert not certify(inst, req, [1, 5])  # within delta of m
    assert not certify(inst, req, [1])  # wrong count
    dup = make_instance([[1, 1]], {1: [1, 0], 2: [2, 0]})
    assert not certify(dup, SpreadRequest(0, 2), [1, 2])  # dependent


def test_zeta_shaped_instance_full_rank():
    inst = zeta_shaped_instance(3, 10)
    assert family_rank(inst) == 10
    delta = Fraction(1)
    p = 2  # rank 10 > (3+4)(2-1)
    out = extract(inst, SpreadRequest(delta, p, ()))
    assert len(out) == p and out[1] - out[0] > delta


def test_planner_style_request():
    # N+1 indices with gaps above delta when rank > (k + 4 delta) N
    inst = zeta_shaped_instance(2, 18)
    for delta in (Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2)):
        N = 0
        while family_rank(inst) > (inst.k + 4 * delta) * (N + 1):
            N += 1
        out = extract(inst, SpreadRequest(delta, N + 1, ()))
        assert certify(inst, SpreadRequest(delta, N + 1, ()), out)


def test_rank_precondition_enforced():
    inst = zeta_shaped_instance(1, 4)
    with pytest.raises(PreconditionError):
        extract(inst, SpreadRequest(Fraction(1), 2, ()))


def test_json_round_trip():
    rng = random.Random(4)
    inst = random_instance(rng)
    req = random_request(rng, inst)
    assert ExtractionInstance.from_json(inst.to_json()) == inst
    assert SpreadRequest.from_json(req.to_json()) == req


def _case_one_instance(seed):
    """Values away from one anchor lie on the anchor's line; both neighbours are new directions."""
    rng = random.Random(seed)
    while True:
        k, N = 3, rng.randint(8, 14)
        T = N + k - 1
        n1 = rng.randint(2, T - 1)
        xi = {n: [Fraction(rng.randint(-2, 2)), 0, 0] for n in range(1, T + 1)}
        xi[n1] = [1, 0, 0]
        xi[n1 - 1] = [rng.randint(-1, 1), 1, 0]
        xi[n1 + 1] = [rng.randint(-1, 1), 0, 1]
        lam = [[rng.choice([1, 1, 2, -1, 0]) for _ in range(N)] for _ in range(k)]
        inst = make_instance(lam, xi)
        if family_rank(inst) > rank_threshold(k, 1, 2, 0):
            return inst, n1


def test_case_one_branch():
    for seed in range(8):
        inst, n1 = _case_one_instance(seed)
        trace = []
        st_ = _State(inst, Fraction(1), 1000, trace=trace)
        out = _step(st_, [n1], [])
        assert any(t[0] == "case1" for t in trace)
        assert certify(inst, SpreadRequest(1, 2, ()), sorted(out))
        assert sorted(extend(inst, 1, [n1])) == sorted(out)


def test_case_two_branch():
    # two anchors two apart; the only new direction available first sits between them
    rng = random.Random(7)
    found = 0
    for _ in range(20):
        k, N = rng.choice([8, 9]), rng.randint(30, 34)
        T = N + k - 1
        n1 = rng.randint(k + 2, T - 6)
        xi = {n: [Fraction(rng.randint(-3, 3)), Fraction(rng.randint(-3, 3)), 0, 0] for n in range(1, T + 1)}
        xi[n1], xi[n1 + 2] = [1, 0, 0, 0], [0, 1, 0, 0]
        xi[n1 + 1] = [rng.randint(-1, 1), rng.randint(-1, 1), 1, 0]
        xi[n1 + 3] = [rng.randint(-1, 1), rng.randint(-1, 1), 0, 1]
        inst = make_instance([[rng.randint(-5, 5) for _ in range(N)] for _ in range(k)], xi)
        if not family_rank(inst) > rank_threshold(k, 1, 3, 0):
            continue
        trace = []
        out = _step(_State(inst, Fraction(1), 1000, trace=trace), [n1, n1 + 2], [])
        assert any(t[0] == "case2" for t in trace)
        assert certify(inst, SpreadRequest(1, 3, ()), sorted(out))
        found += 1
        if found == 3:
            break
    assert found == 3


def test_recursion_cap():
    inst, n1 = _case_one_instance(0)
    with pytest.raises(RecursionCapError):
        _step(_State(inst, Fraction(1), 1), [n1], [])


def test_brute_force_cap():
    with pytest.raises(ValueError):
        brute_force(zeta_shaped_instance(3, 20), SpreadRequest(0, 1))
