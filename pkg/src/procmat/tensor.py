"""Dense complex linear algebra on labelled tensor factors.

Every composite index is row-major: for factors with dimensions
``(d0, d1, ..., dn)`` the basis vector ``|i0 i1 ... in>`` sits at
``((i0 * d1 + i1) * d2 + i2) ...``. This is what ``np.kron`` produces, so
all modules build composite operators with ``kron`` and rearrange them with
:func:`permute_factors`, never by hand.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

HERMITIAN_RTOL = 1e-9

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class DimensionError(ValueError):
    """Raised when operator shapes disagree with the declared factor dims."""


@dataclass(frozen=True)
class LabSystems:
    """Dimensions of the four local systems, in canonical order A1, A2, B1, B2."""

    A1: int = 2
    A2: int = 2
    B1: int = 2
    B2: int = 2

    def __post_init__(self):
        for name, d in zip(("A1", "A2", "B1", "B2"), self.dims):
            if int(d) != d or d < 1:
                raise ValueError(f"dimension {name} must be a positive integer, got {d!r}")

    @property
    def dims(self) -> tuple[int, int, int, int]:
        return (self.A1, self.A2, self.B1, self.B2)

    @property
    def total(self) -> int:
        return self.A1 * self.A2 * self.B1 * self.B2

    @property
    def dim_alice(self) -> int:
        return self.A1 * self.A2

    @property
    def dim_bob(self) -> int:
        return self.B1 * self.B2

    @property
    def normalization(self) -> int:
        """Trace every valid process matrix on these systems must have."""
        return self.A2 * self.B2

    def index(self, i_a1: int, i_a2: int, i_b1: int, i_b2: int) -> int:
        return ((i_a1 * self.A2 + i_a2) * self.B1 + i_b1) * self.B2 + i_b2

    def to_dict(self) -> dict[str, int]:
        return {"A1": self.A1, "A2": self.A2, "B1": self.B1, "B2": self.B2}

    @classmethod
    def from_dict(cls, data) -> "LabSystems":
        try:
            return cls(*(int(data[k]) for k in ("A1", "A2", "B1", "B2")))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"dims must have integer keys A1, A2, B1, B2: {data!r}") from exc


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a finite complex 2-d array."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise DimensionError(f"expected a matrix, got array of shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def kron(*mats) -> np.ndarray:
    """Kronecker product of any number of matrices, left factor most significant."""
    if not mats:
        return np.ones((1, 1), dtype=complex)
    return reduce(np.kron, (as_matrix(m) for m in mats))


def _check_dims(m: np.ndarray, dims: Sequence[int]) -> None:
    total = int(np.prod(dims)) if len(dims) else 1
    if m.shape != (total, total):
        raise DimensionError(f"matrix of shape {m.shape} does not match factor dims {tuple(dims)}")


def partial_trace(m, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every factor not listed in ``keep``.

    The kept factors stay in their original relative order. ``keep=()``
    returns the full trace as a 1x1 matrix.
    """
    m = as_matrix(m)
    dims = [int(d) for d in dims]
    _check_dims(m, dims)
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise DimensionError(f"keep={keep} out of range for {n} factors")
    t = m.reshape(dims + dims)
    # einsum labels: row axes 0..n-1, column axes n..2n-1; traced factors share a label
    row = list(range(n))
    col = [k + n if k in keep else k for k in range(n)]
    out = [k for k in keep] + [k + n for k in keep]
    res = np.einsum(t, row + col, out)
    d_keep = int(np.prod([dims[k] for k in keep])) if keep else 1
    return res.reshape(d_keep, d_keep)


def permute_factors(m, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors: factor ``k`` of the result is factor ``order[k]`` of ``m``."""
    m = as_matrix(m)
    dims = [int(d) for d in dims]
    _check_dims(m, dims)
    n = len(dims)
    order = [int(o) for o in order]
    if sorted(order) != list(range(n)):
        raise DimensionError(f"order {order} is not a permutation of {n} factors")
    t = m.reshape(dims + dims).transpose(order + [o + n for o in order])
    total = m.shape[0]
    return t.reshape(total, total)


def is_hermitian(m, rtol: float = HERMITIAN_RTOL) -> bool:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    return float(np.max(np.abs(m - m.conj().T), initial=0.0)) <= rtol * scale


def hermitian_eigenvalues(m, rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix.

    Raises ``ValueError`` if ``m`` is not Hermitian within ``rtol`` relative
    to its largest entry.
    """
    m = as_matrix(m)
    if not is_hermitian(m, rtol):
        raise ValueError("matrix is not Hermitian within tolerance")
    return np.linalg.eigvalsh(0.5 * (m + m.conj().T))


def ket(d: int, i: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[i] = 1.0
    return v


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


def phi_plus(d: int) -> np.ndarray:
    """Unnormalized maximally entangled projector sum_ij |ii><jj| on C^d (x) C^d."""
    v = np.eye(d, dtype=complex).reshape(-1)
    return np.outer(v, v)
