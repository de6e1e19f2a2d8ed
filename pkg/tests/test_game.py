from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from procmat import kernels
from procmat.cj import is_cptp
from procmat.game import (
    CausalStrategy,
    GameStrategy,
    basis_switch_strategy,
    causal_bruteforce,
    causal_strategy_score,
    count_causal_strategies,
    success_probability,
)
from procmat.process import channel_a_to_b, channel_b_to_a, mixture, nonseparable, random_process, state
from procmat.sampling import random_instrument, random_state
from procmat.tensor import PAULI_I, PAULI_X, PAULI_Z, LabSystems, kron

NONSEP_VALUE = (2 + np.sqrt(2)) / 4
INPUTS = list(product((0, 1), repeat=3))


def literal_bruteforce(d):
    """Every deterministic one-way strategy spelled out as a lookup table."""
    best = Fraction(0)
    msgs = range(d)
    # Alice first: m = enc(a), x = f(a), y = g(m, b, b')
    for enc in product(msgs, repeat=2):
        for f in product((0, 1), repeat=2):
            for g in product((0, 1), repeat=4 * d):
                wins = 0
                for a, b, bp in INPUTS:
                    x, y = f[a], g[enc[a] * 4 + b * 2 + bp]
                    wins += (x == b) if bp == 0 else (y == a)
                best = max(best, Fraction(wins, 8))
    # Bob first: m = enc(b, b'), y = g(b, b'), x = f(m, a)
    for enc in product(msgs, repeat=4):
        for g in product((0, 1), repeat=4):
            for f in product((0, 1), repeat=2 * d):
                wins = 0
                for a, b, bp in INPUTS:
                    x, y = f[enc[b * 2 + bp] * 2 + a], g[b * 2 + bp]
                    wins += (x == b) if bp == 0 else (y == a)
                best = max(best, Fraction(wins, 8))
    return best


def test_nonseparable_violation():
    res = success_probability(nonseparable(), basis_switch_strategy())
    assert abs(res.p_succ - NONSEP_VALUE) < 1e-12
    assert abs(res.p_alice_guesses_b - NONSEP_VALUE) < 1e-12
    assert abs(res.p_bob_guesses_a - NONSEP_VALUE) < 1e-12


def test_state_gives_chance():
    res = success_probability(state(random_state(4, 5)), basis_switch_strategy())
    assert abs(res.p_alice_guesses_b - 0.5) < 1e-12
    assert abs(res.p_bob_guesses_a - 0.5) < 1e-12


def test_channel_a_to_b_reaches_bound():
    res = success_probability(channel_a_to_b(), basis_switch_strategy())
    assert abs(res.p_bob_guesses_a - 1) < 1e-12
    assert abs(res.p_alice_guesses_b - 0.5) < 1e-12
    assert abs(res.p_succ - 0.75) < 1e-12


def test_basis_switch_instruments():
    s = basis_switch_strategy()
    for b in (0, 1):
        total = s.bob[b, 0].total()
        assert np.allclose(total.cj, 0.5 * (np.eye(4) + (-1) ** b * kron(PAULI_X, PAULI_Z)))
        assert is_cptp(total) and is_cptp(s.bob[b, 1].total())
    for a in (0, 1):
        assert np.allclose(s.alice[a].total().cj, 0.5 * kron(PAULI_I, PAULI_I + (-1) ** a * PAULI_Z))


def test_repreparation_state_irrelevant():
    rho = random_state(2, 9)
    res = success_probability(nonseparable(), basis_switch_strategy(rho))
    assert abs(res.p_succ - NONSEP_VALUE) < 1e-12


def test_strategy_shape_checked():
    s = basis_switch_strategy()
    with pytest.raises(ValueError):
        GameStrategy({0: s.alice[0]}, s.bob)
    with pytest.raises(ValueError):
        GameStrategy(s.alice, {**s.bob, (0, 0): random_instrument(2, 2, 3, 1)})


@pytest.mark.parametrize("q", np.linspace(0, 1, 11))
def test_separable_mixtures_respect_bound(q):
    plus = np.full((2, 2), 0.5)
    pm = mixture(q, channel_b_to_a(rho_b1=plus), channel_a_to_b())
    assert success_probability(pm, basis_switch_strategy()).p_succ <= 0.75 + 1e-9


def test_affine_in_process(rng):
    s = basis_switch_strategy()
    w1, w2 = random_process(LabSystems(), rng=rng), random_process(LabSystems(), rng=rng)
    for q in (0.2, 0.7):
        mixed = success_probability(mixture(q, w1, w2), s).p_succ
        expected = q * success_probability(w1, s).p_succ + (1 - q) * success_probability(w2, s).p_succ
        assert abs(mixed - expected) < 1e-12


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_strategies_in_unit_interval(seed):
    rng = np.random.default_rng(seed)
    strat = GameStrategy(
        {a: random_instrument(2, 2, 2, rng) for a in (0, 1)},
        {k: random_instrument(2, 2, 2, rng) for k in product((0, 1), repeat=2)},
    )
    p = success_probability(random_process(LabSystems(), rng=rng), strat).p_succ
    assert -1e-12 <= p <= 1 + 1e-12


def test_literal_oracle_agrees_at_d2():
    assert literal_bruteforce(2) == Fraction(3, 4)
    assert causal_bruteforce(2).max_p_succ == Fraction(3, 4)


@pytest.mark.parametrize("d, expected", [(1, Fraction(1, 2)), (2, Fraction(3, 4)), (3, Fraction(3, 4)), (4, Fraction(3, 4))])
def test_bruteforce_values(d, expected):
    res = causal_bruteforce(d)
    assert res.max_p_succ == expected
    assert causal_strategy_score(res.witness) == expected
    assert res.n_strategies == count_causal_strategies(d)


def test_literal_oracle_d1():
    assert literal_bruteforce(1) == Fraction(1, 2)


@pytest.mark.parametrize("backend", ["python", "compiled"])
def test_backends_agree(backend):
    if backend == "compiled" and kernels.BACKEND != "compiled":
        pytest.skip("compiled kernels not built")
    ref = causal_bruteforce(3, backend="python")
    res = causal_bruteforce(3, backend=backend)
    assert res.max_p_succ == ref.max_p_succ and res.witness == ref.witness


def test_bruteforce_cap_and_domain():
    with pytest.raises(ValueError):
        causal_bruteforce(4, cap=1000)
    with pytest.raises(ValueError):
        causal_bruteforce(0)


def test_causal_strategy_reads_only_local_bits():
    cs = CausalStrategy("B_first", 2, {(b, bp): b for b in (0, 1) for bp in (0, 1)},
                        {(m, a): m for m in (0, 1) for a in (0, 1)},
                        {(b, bp): 0 for b in (0, 1) for bp in (0, 1)})
    assert causal_strategy_score(cs) == Fraction(3, 4)
    with pytest.raises(ValueError):
        CausalStrategy("both", 2, {}, {}, {})


def test_import_falls_back_without_extension(monkeypatch):
    import importlib
    import sys

    # both lookups must fail for the relative import to raise
    monkeypatch.setitem(sys.modules, "procmat._kernels", None)
    monkeypatch.delattr(sys.modules["procmat"], "_kernels", raising=False)
    fresh = importlib.reload(kernels)
    try:
        assert fresh.BACKEND == "python"
        assert fresh.get() is fresh._kernels_py
        with pytest.raises(RuntimeError):
            fresh.get("compiled")
    finally:
        monkeypatch.undo()
        importlib.reload(kernels)
