"""CP maps and instruments in the transposed Choi-Jamiolkowski picture.

A map ``M: L(H_in) -> L(H_out)`` is stored as

    M^{in,out} = [ (id (x) M)(|phi+><phi+|) ]^T,   |phi+> = sum_j |jj>  (unnormalized)

with the input factor first. The inverse direction is
``M(rho) = ( Tr_in[(rho (x) 1) M^{in,out}] )^T``. With the extra transpose a
measure-and-reprepare map ``rho -> <psi|rho|psi> |phi><phi|`` has CJ matrix
``|psi><psi| (x) |phi*><phi*|``, so for real ``phi`` the familiar product form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .tensor import DimensionError, as_matrix, is_hermitian, kron, partial_trace

PSD_RTOL = 1e-9
TRACE_ATOL = 1e-9


@dataclass(frozen=True)
class CPMapCJ:
    """A CP map held as its CJ matrix on ``H_in (x) H_out``."""

    d_in: int
    d_out: int
    cj: np.ndarray

    def __post_init__(self):
        cj = as_matrix(self.cj)
        n = self.d_in * self.d_out
        if cj.shape != (n, n):
            raise DimensionError(
                f"CJ matrix of shape {cj.shape} does not match d_in={self.d_in}, d_out={self.d_out}"
            )
        if not is_hermitian(cj):
            raise ValueError("CJ matrix of a CP map must be Hermitian")
        cj = 0.5 * (cj + cj.conj().T)
        cj.setflags(write=False)
        object.__setattr__(self, "cj", cj)

    def marginal_in(self) -> np.ndarray:
        """``Tr_out`` of the CJ matrix; the identity exactly when the map is trace preserving."""
        return partial_trace(self.cj, (self.d_in, self.d_out), keep=(0,))

    def __add__(self, other: "CPMapCJ") -> "CPMapCJ":
        _same_shape(self, other)
        return CPMapCJ(self.d_in, self.d_out, self.cj + other.cj)

    def scaled(self, p: float) -> "CPMapCJ":
        return CPMapCJ(self.d_in, self.d_out, p * self.cj)


def _same_shape(a: CPMapCJ, b: CPMapCJ) -> None:
    if (a.d_in, a.d_out) != (b.d_in, b.d_out):
        raise DimensionError(f"maps act on different spaces: {(a.d_in, a.d_out)} vs {(b.d_in, b.d_out)}")


@dataclass(frozen=True)
class CPTPCheck:
    ok: bool
    min_eigenvalue: float
    trace_residual: float

    def __bool__(self) -> bool:
        return self.ok


def psd_ok(eigenvalues, rtol: float = PSD_RTOL) -> bool:
    ev = np.asarray(eigenvalues, dtype=float)
    return bool(ev[0] >= -rtol * max(1.0, float(ev[-1])))


def is_cptp(m: CPMapCJ, tol: float = TRACE_ATOL) -> CPTPCheck:
    """Check positivity of the CJ matrix and ``Tr_out M = 1_in``."""
    ev = np.linalg.eigvalsh(m.cj)
    resid = float(np.max(np.abs(m.marginal_in() - np.eye(m.d_in))))
    return CPTPCheck(psd_ok(ev) and resid <= tol, float(ev[0]), resid)


def is_cp_trace_nonincreasing(m: CPMapCJ, tol: float = TRACE_ATOL) -> bool:
    if not psd_ok(np.linalg.eigvalsh(m.cj)):
        return False
    slack = np.linalg.eigvalsh(np.eye(m.d_in) - m.marginal_in())
    return bool(slack[0] >= -tol)


def cj_from_kraus(kraus: Sequence) -> CPMapCJ:
    """CJ matrix of ``rho -> sum_k K rho K^dag`` for ``d_out x d_in`` Kraus operators."""
    ops = [as_matrix(k) for k in kraus]
    if not ops:
        raise ValueError("need at least one Kraus operator")
    shape = ops[0].shape
    if any(k.shape != shape for k in ops):
        raise DimensionError("Kraus operators must share one shape")
    d_out, d_in = shape
    cj = np.zeros((d_in * d_out, d_in * d_out), dtype=complex)
    for k in ops:
        # (id (x) K)|phi+> = vec(K^T) in input-major order; the outer transpose conjugates it
        v = k.T.reshape(-1)
        cj += np.outer(v.conj(), v)
    return CPMapCJ(d_in, d_out, cj)


def cj_from_unitary(u) -> CPMapCJ:
    return cj_from_kraus([u])


def identity_channel(d: int) -> CPMapCJ:
    return cj_from_kraus([np.eye(d)])


def measure_reprepare(psi, phi) -> CPMapCJ:
    """Detect ``psi`` and reprepare ``phi``: CJ ``|psi><psi| (x) |phi*><phi*|``."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    phi = np.asarray(phi, dtype=complex).reshape(-1)
    return cj_from_kraus([np.outer(phi, psi.conj())])


def povm_element(e) -> CPMapCJ:
    """A measurement with no output system: the CJ matrix is the POVM element itself."""
    e = as_matrix(e)
    return CPMapCJ(e.shape[0], 1, e)


def apply_inverse_cj(m: CPMapCJ, rho) -> np.ndarray:
    """Action of the map on ``rho``: ``(Tr_in[(rho (x) 1_out) M])^T``."""
    rho = as_matrix(rho)
    if rho.shape != (m.d_in, m.d_in):
        raise DimensionError(f"input of shape {rho.shape} for a map with d_in={m.d_in}")
    prod = kron(rho, np.eye(m.d_out)) @ m.cj
    return partial_trace(prod, (m.d_in, m.d_out), keep=(1,)).T


def compose(second: CPMapCJ, first: CPMapCJ) -> CPMapCJ:
    """CJ matrix of ``second o first``, built from the action on basis matrices."""
    if first.d_out != second.d_in:
        raise DimensionError("output of the first map does not feed the second")
    d_in, d_out = first.d_in, second.d_out
    cj = np.zeros((d_in * d_out, d_in * d_out), dtype=complex)
    for i in range(d_in):
        for j in range(d_in):
            e = np.zeros((d_in, d_in), dtype=complex)
            e[i, j] = 1.0
            out = apply_inverse_cj(second, apply_inverse_cj(first, e))
            # M = sum_ij |j><i| (x) M(|i><j|)^T
            cj += np.kron(e.T, out.T)
    return CPMapCJ(d_in, d_out, cj)


@dataclass(frozen=True)
class Instrument:
    """Outcome-labelled CP maps whose sum is trace preserving."""

    maps: tuple

    def __post_init__(self):
        maps = tuple(self.maps)
        if not maps:
            raise ValueError("an instrument needs at least one outcome")
        for m in maps[1:]:
            _same_shape(maps[0], m)
        object.__setattr__(self, "maps", maps)
        total = self.total()
        check = is_cptp(total)
        if not check:
            raise ValueError(
                "instrument does not sum to a CPTP map "
                f"(min eigenvalue {check.min_eigenvalue:.3g}, trace residual {check.trace_residual:.3g})"
            )

    @property
    def d_in(self) -> int:
        return self.maps[0].d_in

    @property
    def d_out(self) -> int:
        return self.maps[0].d_out

    def __len__(self) -> int:
        return len(self.maps)

    def __getitem__(self, j) -> CPMapCJ:
        return self.maps[j]

    def total(self) -> CPMapCJ:
        cj = sum(m.cj for m in self.maps)
        return CPMapCJ(self.maps[0].d_in, self.maps[0].d_out, cj)


def mixture(p: float, m1: CPMapCJ, m2: CPMapCJ) -> CPMapCJ:
    """Run ``m1`` with probability ``p`` and ``m2`` otherwise."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"mixing weight {p} outside [0, 1]")
    _same_shape(m1, m2)
    return CPMapCJ(m1.d_in, m1.d_out, p * m1.cj + (1.0 - p) * m2.cj)
