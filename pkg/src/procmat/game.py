"""The two-party guessing game with a signalling-direction bit.

Alice gets a bit ``a`` and outputs a guess ``x`` of Bob's bit ``b``; Bob gets
``b`` and a direction bit ``b'`` and outputs a guess ``y`` of ``a``. The round
is won when ``b' = 0`` and ``x = b``, or ``b' = 1`` and ``y = a``. All three
input bits are uniform and independent. Parties whose events sit in a
definite causal order cannot win with probability above 3/4.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from . import kernels
from .cj import CPMapCJ, Instrument
from .process import ProcessMatrix, joint_distribution
from .tensor import PAULI_I, PAULI_X, PAULI_Z, DimensionError, kron

DEFAULT_CAP = 1 << 28


@dataclass(frozen=True)
class GameStrategy:
    """Alice's instrument per ``a`` (outcome index = ``x``); Bob's per ``(b, b')`` (outcome = ``y``)."""

    alice: dict
    bob: dict

    def __post_init__(self):
        if set(self.alice) != {0, 1}:
            raise ValueError("alice needs an instrument for a = 0 and a = 1")
        if set(self.bob) != set(product((0, 1), repeat=2)):
            raise ValueError("bob needs an instrument for every (b, b')")
        for ins in list(self.alice.values()) + list(self.bob.values()):
            if not isinstance(ins, Instrument):
                raise TypeError("strategy entries must be Instrument objects")
            if len(ins) != 2:
                raise ValueError("guesses are bits: every instrument needs exactly two outcomes")


@dataclass(frozen=True)
class GameResult:
    p_succ: float
    p_alice_guesses_b: float  # P(x = b | b' = 0)
    p_bob_guesses_a: float  # P(y = a | b' = 1)


def success_probability(pm: ProcessMatrix, strategy: GameStrategy) -> GameResult:
    """Winning probability with ``a, b, b'`` uniform; returns both conditional terms too."""
    s = pm.systems
    for ins in strategy.alice.values():
        if (ins.d_in, ins.d_out) != (s.A1, s.A2):
            raise DimensionError("Alice's instruments do not match the process dimensions")
    for ins in strategy.bob.values():
        if (ins.d_in, ins.d_out) != (s.B1, s.B2):
            raise DimensionError("Bob's instruments do not match the process dimensions")
    alice_term = 0.0
    bob_term = 0.0
    for a, b in product((0, 1), repeat=2):
        p0 = joint_distribution(pm, strategy.alice[a], strategy.bob[b, 0])
        alice_term += p0[b, :].sum()
        p1 = joint_distribution(pm, strategy.alice[a], strategy.bob[b, 1])
        bob_term += p1[:, a].sum()
    alice_term /= 4
    bob_term /= 4
    return GameResult(float(0.5 * (alice_term + bob_term)), float(alice_term), float(bob_term))


def _proj(pauli, sign: int) -> np.ndarray:
    return PAULI_I + (-1) ** sign * pauli


def basis_switch_strategy(rho_b2=None) -> GameStrategy:
    """Qubit protocol where Bob's measurement basis picks the signalling direction.

    Alice measures her input in the z basis (``x`` is the outcome) and sends
    ``a`` out in the z basis. For ``b' = 1`` Bob reads ``y`` off a z
    measurement and sends ``rho_b2`` (default ``1/2``). For ``b' = 0`` he
    measures x, calls the outcome ``y``, and sends ``b XOR y`` in the z basis.
    """
    rho = PAULI_I / 2 if rho_b2 is None else np.asarray(rho_b2, dtype=complex)
    alice = {
        a: Instrument(tuple(CPMapCJ(2, 2, 0.25 * kron(_proj(PAULI_Z, x), _proj(PAULI_Z, a))) for x in (0, 1)))
        for a in (0, 1)
    }
    bob = {}
    for b in (0, 1):
        bob[b, 1] = Instrument(tuple(CPMapCJ(2, 2, 0.5 * kron(_proj(PAULI_Z, y), rho)) for y in (0, 1)))
        bob[b, 0] = Instrument(
            tuple(CPMapCJ(2, 2, 0.25 * kron(_proj(PAULI_X, y), _proj(PAULI_Z, b + y))) for y in (0, 1))
        )
    return GameStrategy(alice, bob)


# classical causal strategies --------------------------------------------------


@dataclass(frozen=True)
class CausalStrategy:
    """Deterministic classical strategy with one-way communication.

    ``order='A_first'``: Alice sends ``encoding[a]``; Bob guesses
    ``receiver_guess[(m, b, b')]``; Alice guesses ``sender_guess[a]``.
    ``order='B_first'``: Bob sends ``encoding[(b, b')]``; Alice guesses
    ``receiver_guess[(m, a)]``; Bob guesses ``sender_guess[(b, b')]``.
    """

    order: str
    message_dim: int
    encoding: dict
    receiver_guess: dict
    sender_guess: dict

    def __post_init__(self):
        if self.order not in ("A_first", "B_first"):
            raise ValueError(f"order must be 'A_first' or 'B_first', got {self.order!r}")

    def guesses(self, a: int, b: int, bp: int) -> tuple[int, int]:
        """``(x, y)`` for one round; only locally available bits are ever consulted."""
        if self.order == "A_first":
            m = self.encoding[a]
            return self.sender_guess[a], self.receiver_guess[m, b, bp]
        m = self.encoding[b, bp]
        return self.receiver_guess[m, a], self.sender_guess[b, bp]


def causal_strategy_score(cs: CausalStrategy) -> Fraction:
    """Exact winning probability by direct play over all 8 inputs."""
    wins = 0
    for a, b, bp in product((0, 1), repeat=3):
        x, y = cs.guesses(a, b, bp)
        wins += (x == b) if bp == 0 else (y == a)
    return Fraction(wins, 8)


def count_causal_strategies(d: int) -> int:
    return d * d * 4 * (1 << (4 * d)) + d**4 * 16 * (1 << (2 * d))


@dataclass(frozen=True)
class BruteForceResult:
    max_p_succ: Fraction
    witness: CausalStrategy
    by_order: dict
    n_strategies: int
    backend: str


def _decode_a_first(d, enc, xg, ytab) -> CausalStrategy:
    encoding = {0: enc[0], 1: enc[1]}
    sender = {a: (xg >> a) & 1 for a in (0, 1)}
    receiver = {(m, b, bp): (ytab >> (m * 4 + b * 2 + bp)) & 1
                for m in range(d) for b in (0, 1) for bp in (0, 1)}
    return CausalStrategy("A_first", d, encoding, receiver, sender)


def _decode_b_first(d, enc, yg, xtab) -> CausalStrategy:
    encoding = {(b, bp): (enc // d ** (b * 2 + bp)) % d for b in (0, 1) for bp in (0, 1)}
    sender = {(b, bp): (yg >> (b * 2 + bp)) & 1 for b in (0, 1) for bp in (0, 1)}
    receiver = {(m, a): (xtab >> (m * 2 + a)) & 1 for m in range(d) for a in (0, 1)}
    return CausalStrategy("B_first", d, encoding, receiver, sender)


def causal_bruteforce(message_dim: int, backend: str = "auto", cap: int = DEFAULT_CAP) -> BruteForceResult:
    """Best winning probability over all deterministic one-way classical strategies.

    The message is a letter from an alphabet of ``message_dim`` symbols.
    Mixed strategies are convex combinations of these, so the deterministic
    maximum bounds them as well.
    """
    d = int(message_dim)
    if d < 1:
        raise ValueError("message_dim must be at least 1")
    n = count_causal_strategies(d)
    if n > cap:
        raise ValueError(f"{n} strategies exceed the enumeration cap {cap}")
    mod = kernels.get(backend)
    ca, enc_a, xg, ytab = mod.best_a_first(d)
    cb, enc_b, yg, xtab = mod.best_b_first(d)
    wa = _decode_a_first(d, enc_a, xg, ytab)
    wb = _decode_b_first(d, enc_b, yg, xtab)
    by_order = {"A_first": Fraction(ca, 8), "B_first": Fraction(cb, 8)}
    witness = wa if ca >= cb else wb
    best = max(by_order.values())
    if causal_strategy_score(witness) != best:
        raise RuntimeError("kernel witness does not reproduce its score")
    name = "compiled" if mod is not kernels._kernels_py else "python"
    return BruteForceResult(best, witness, by_order, n, name)
