"""Classical (pointer-diagonal) operations and processes, and their causal decomposition.

Any process matrix diagonal in the pointer basis splits as
``q W^{B-not-before-A} + (1 - q) W^{A-not-before-B}``: a mixture of a process
in which only Alice can signal to Bob and one in which only Bob can signal to
Alice. :func:`decompose` constructs such a split by moving weight of the form
``|i><i|^{A1} (x) 1 (x) |k><k|^{B1} (x) 1`` between the two parts until both
are positive.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cj import CPMapCJ, Instrument
from .process import ProcessMatrix, validate
from .sampling import default_rng
from .tensor import LabSystems

DIAG_ATOL = 1e-12
DECOMP_ATOL = 1e-9


@dataclass(frozen=True)
class ClassicalOperation:
    """Transition probabilities ``P(out, j | in)`` stored as ``table[in, j, out]``."""

    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if t.ndim != 3:
            raise ValueError("transition table must be indexed (input, outcome, output)")
        if np.any(t < -DIAG_ATOL) or np.any(t > 1 + DIAG_ATOL):
            raise ValueError("transition probabilities must lie in [0, 1]")
        if not np.allclose(t.sum(axis=(1, 2)), 1.0, atol=1e-9):
            raise ValueError("transition probabilities must sum to 1 for every input")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def d_in(self) -> int:
        return self.table.shape[0]

    @property
    def n_outcomes(self) -> int:
        return self.table.shape[1]

    @property
    def d_out(self) -> int:
        return self.table.shape[2]

    @classmethod
    def channel(cls, stochastic) -> "ClassicalOperation":
        """Single-outcome operation from ``stochastic[in, out]``."""
        s = np.asarray(stochastic, dtype=float)
        return cls(s[:, None, :])


def classical_to_cj(op: ClassicalOperation) -> list[CPMapCJ]:
    """Diagonal CJ matrices ``sum P(out, j | in) |in><in| (x) |out><out|``, one per outcome."""
    maps = [
        CPMapCJ(op.d_in, op.d_out, np.diag(op.table[:, j, :].reshape(-1)).astype(complex))
        for j in range(op.n_outcomes)
    ]
    Instrument(tuple(maps))  # sum must be trace preserving
    return maps


@dataclass(frozen=True)
class ClassicalProcess:
    systems: LabSystems
    diag: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.diag, dtype=float).reshape(-1)
        if v.shape != (self.systems.total,):
            raise ValueError(f"diagonal of length {v.size} does not match dims {self.systems.dims}")
        v.setflags(write=False)
        object.__setattr__(self, "diag", v)

    @classmethod
    def from_process(cls, pm: ProcessMatrix) -> "ClassicalProcess":
        off = pm.w - np.diag(np.diag(pm.w))
        if np.max(np.abs(off), initial=0.0) > DIAG_ATOL or np.max(np.abs(np.diag(pm.w).imag)) > DIAG_ATOL:
            raise ValueError("process matrix is not real and diagonal in the pointer basis")
        return cls(pm.systems, np.diag(pm.w).real)

    def to_process(self) -> ProcessMatrix:
        return ProcessMatrix(self.systems, np.diag(self.diag).astype(complex))

    def tensor(self) -> np.ndarray:
        """Diagonal reshaped to ``[i_A1, i_A2, i_B1, i_B2]``."""
        return self.diag.reshape(self.systems.dims)

    def probability(self, op_a: ClassicalOperation, op_b: ClassicalOperation) -> np.ndarray:
        """Outcome table ``P[i, j]`` computed directly from transition probabilities."""
        w = self.tensor()
        return np.einsum("abcd,aib,cjd->ij", w, op_a.table, op_b.table)


@dataclass(frozen=True)
class CausalDecomposition:
    """``W = q * w_b_not_before_a + (1 - q) * w_a_not_before_b``.

    ``w_b_not_before_a`` acts trivially on B2, so Bob cannot signal to Alice;
    ``w_a_not_before_b`` acts trivially on A2. Working arrays are pointer
    diagonals indexed ``[i_A1, i_A2, i_B1, i_B2]``; ``min_kappa_*`` and
    ``shift`` are indexed ``[i_A1, i_B1]``.
    """

    q: float
    w_b_not_before_a: ProcessMatrix
    w_a_not_before_b: ProcessMatrix
    m: float
    kappa1: np.ndarray = field(repr=False)
    kappa2: np.ndarray = field(repr=False)
    min_kappa1: np.ndarray = field(repr=False)
    min_kappa2: np.ndarray = field(repr=False)
    shift: np.ndarray = field(repr=False)
    kappa1_final: np.ndarray = field(repr=False)
    kappa2_final: np.ndarray = field(repr=False)
    residual: float = 0.0

    def recombine(self) -> np.ndarray:
        return self.q * self.w_b_not_before_a.w + (1 - self.q) * self.w_a_not_before_b.w


def _component(rho: np.ndarray, systems: LabSystems) -> tuple[float, ProcessMatrix]:
    tr = float(rho.sum())
    norm = systems.normalization
    if tr <= DECOMP_ATOL * systems.total:
        # weight-zero part: any valid process works, take the maximally mixed one
        w = np.full(systems.total, norm / systems.total)
    else:
        w = rho.reshape(-1) * norm / tr
    return tr, ProcessMatrix(systems, np.diag(w).astype(complex))


def decompose(cp: ClassicalProcess, check: bool = True) -> CausalDecomposition:
    """Split a valid diagonal process into two one-way processes.

    With ``W = (1 + s1 + s2) / (d_A1 d_B1)``, ``s1`` the terms trivial on B2
    and ``s2`` the rest, let ``m = min eig(s1 + s2)``. Start from
    ``k1 = s1 - m``, ``k2 = s2``; for each pointer pair ``(i, k)`` on
    ``(A1, B1)`` move the negative block minimum of one of them onto the
    other. Then ``rho1 = (1 + m) + k1``, ``rho2 = k2`` and
    ``q = Tr rho1 / D``.
    """
    s = cp.systems
    if check:
        rec = validate(cp.to_process(), mode="structural")
        if not rec:
            raise ValueError("input is not a valid process matrix")
    d_a1, d_a2, d_b1, d_b2 = s.dims
    x = cp.tensor() * (d_a1 * d_b1) - 1.0
    # terms without B2 (non-signalling and A->B); valid input leaves only A1B2, A1B1B2 in the rest
    s1 = np.broadcast_to(x.mean(axis=3, keepdims=True), x.shape).copy()
    s2 = x - s1
    m = float(x.min())
    if not (-1.0 - DECOMP_ATOL <= m <= DECOMP_ATOL):
        raise ArithmeticError(f"minimum eigenvalue {m} of the traceless part outside [-1, 0]")
    kappa1 = s1 - m
    kappa2 = s2.copy()
    k1, k2 = kappa1.copy(), kappa2.copy()
    min1 = np.empty((d_a1, d_b1))
    min2 = np.empty((d_a1, d_b1))
    shift = np.zeros((d_a1, d_b1))
    for i in range(d_a1):
        for k in range(d_b1):
            mt1 = k1[i, :, k, :].min()
            mt2 = k2[i, :, k, :].min()
            min1[i, k], min2[i, k] = mt1, mt2
            if mt1 < 0:
                delta = -mt1
            elif mt2 < 0:
                delta = mt2
            else:
                continue
            k1[i, :, k, :] += delta
            k2[i, :, k, :] -= delta
            shift[i, k] = delta
    rho1 = (1.0 + m) + k1
    rho2 = k2
    tr1, w1 = _component(rho1, s)
    tr2, w2 = _component(rho2, s)
    q = tr1 / s.total
    q = min(1.0, max(0.0, q))
    recombined = q * np.diag(w1.w).real + (1 - q) * np.diag(w2.w).real
    residual = float(np.max(np.abs(recombined - cp.diag)))
    return CausalDecomposition(q, w1, w2, m, kappa1, kappa2, min1, min2, shift, k1, k2, residual)


# random classical processes --------------------------------------------------


def _stochastic(shape, rng) -> np.ndarray:
    """Random conditional distribution over the last axis."""
    g = rng.dirichlet(np.full(shape[-1], rng.uniform(0.2, 2.0)), size=shape[:-1])
    return g


def random_one_way(systems: LabSystems, direction: str, rng=None) -> ClassicalProcess:
    """Classical channel with memory.

    ``'A->B'``: ``w = p(a1) P(b1 | a1, a2)``; ``'B->A'``: ``w = p(b1) P(a1 | b1, b2)``.
    """
    rng = default_rng(rng)
    d_a1, d_a2, d_b1, d_b2 = systems.dims
    if direction == "A->B":
        p = _stochastic((d_a1,), rng)
        cond = _stochastic((d_a1, d_a2, d_b1), rng)
        w = p[:, None, None] * cond
        w = np.broadcast_to(w[..., None], (d_a1, d_a2, d_b1, d_b2))
    elif direction == "B->A":
        p = _stochastic((d_b1,), rng)
        cond = _stochastic((d_b1, d_b2, d_a1), rng)  # [b1, b2, a1]
        w = p[:, None, None] * cond
        w = np.broadcast_to(w.transpose(2, 0, 1)[:, None, :, :], (d_a1, d_a2, d_b1, d_b2))
    else:
        raise ValueError(f"direction must be 'A->B' or 'B->A', got {direction!r}")
    return ClassicalProcess(systems, np.array(w).reshape(-1))


def random_classical_process(systems: LabSystems, rng=None, max_tries: int = 1000) -> ClassicalProcess:
    """Mixture of one-way classical processes in both directions plus a random
    two-way signalling perturbation, rejection-sampled until positive."""
    from .process import random_traceless

    rng = default_rng(rng)
    for _ in range(max_tries):
        q = rng.uniform()
        base = q * random_one_way(systems, "B->A", rng).diag + (1 - q) * random_one_way(systems, "A->B", rng).diag
        x = random_traceless(systems, ["A2B1", "A1A2B1", "A1B2", "A1B1B2"], rng, diagonal=True)
        x = np.diag(x).real
        eps = rng.uniform(0.0, 1.0) / (np.max(np.abs(x)) * systems.A1 * systems.B1)
        cand = base + eps * x
        if cand.min() >= 0:
            return ClassicalProcess(systems, cand)
    raise RuntimeError("rejection sampling did not find a positive diagonal process")
