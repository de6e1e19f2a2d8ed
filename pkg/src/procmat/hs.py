"""Hilbert-Schmidt expansion of operators on A1 A2 B1 B2 and term-type bookkeeping.

Each factor gets a Hermitian basis ``sigma_0 = 1, sigma_1, ...`` normalized to
``Tr sigma_mu sigma_nu = d delta_mu_nu``. A product term is typed by the set of
factors carrying a non-identity element; e.g. ``A2B1`` is non-identity on A2
and B1 only. A matrix gives unit probability to every pair of trace-preserving
local operations exactly when it is built from identity-normalized terms of
the allowed types below.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

import numpy as np

from .tensor import DimensionError, LabSystems, as_matrix, is_hermitian

COEFF_CUTOFF = 1e-10
FACTORS = ("A1", "A2", "B1", "B2")

NON_SIGNALLING = frozenset({"A1", "B1", "A1B1"})
A_TO_B = frozenset({"A2B1", "A1A2B1"})
B_TO_A = frozenset({"A1B2", "A1B1B2"})
ALLOWED = frozenset({"1"}) | NON_SIGNALLING | A_TO_B | B_TO_A
FORBIDDEN = frozenset(
    {"A2", "B2", "A1A2", "B1B2", "A2B2", "A2B1B2", "A1A2B2", "A1A2B1B2"}
)


def type_label(mask) -> str:
    """``(False, True, True, False)`` -> ``'A2B1'``; all-identity -> ``'1'``."""
    label = "".join(name for name, on in zip(FACTORS, mask) if on)
    return label or "1"


def label_mask(label: str) -> tuple[bool, bool, bool, bool]:
    if label == "1":
        return (False,) * 4
    mask = [False] * 4
    rest = label
    while rest:
        name = rest[:2]
        if name not in FACTORS:
            raise ValueError(f"bad term type {label!r}")
        mask[FACTORS.index(name)] = True
        rest = rest[2:]
    return tuple(mask)


ALL_TYPES = tuple(type_label(m) for m in product((False, True), repeat=4))


@dataclass(frozen=True)
class HSBasis:
    d: int
    sigmas: np.ndarray = field(repr=False)
    labels: tuple

    def __len__(self) -> int:
        return self.d * self.d

    def __getitem__(self, mu: int) -> np.ndarray:
        return self.sigmas[mu]


@lru_cache(maxsize=None)
def make_basis(d: int) -> HSBasis:
    """Identity plus generalized Gell-Mann matrices scaled to ``Tr s_i s_j = d delta_ij``.

    For ``d = 2`` this is ``(1, sigma_x, sigma_y, sigma_z)``.
    """
    if d < 1:
        raise ValueError("dimension must be positive")
    mats = [np.eye(d, dtype=complex)]
    labels = ["1"]
    sym, asym = [], []
    for j in range(d):
        for k in range(j + 1, d):
            s = np.zeros((d, d), dtype=complex)
            s[j, k] = s[k, j] = 1.0
            a = np.zeros((d, d), dtype=complex)
            a[j, k], a[k, j] = -1j, 1j
            sym.append((s, f"s{j}{k}"))
            asym.append((a, f"a{j}{k}"))
    diag = []
    for l in range(1, d):
        g = np.zeros((d, d), dtype=complex)
        g[np.arange(l), np.arange(l)] = 1.0
        g[l, l] = -l
        diag.append((g * np.sqrt(2.0 / (l * (l + 1))), f"d{l}"))
    scale = np.sqrt(d / 2.0)
    for m, lab in sym + asym + diag:
        mats.append(scale * m)
        labels.append(lab)
    if d == 2:
        labels = ["1", "x", "y", "z"]
    sigmas = np.array(mats)
    sigmas.setflags(write=False)
    return HSBasis(d, sigmas, tuple(labels))


def _bases(systems: LabSystems):
    return [make_basis(d) for d in systems.dims]


def hs_coefficients(w, systems: LabSystems) -> np.ndarray:
    """Complex ``w[mu, nu, lam, gam] = Tr[W (s_mu s_nu s_lam s_gam)] / D``."""
    w = as_matrix(w)
    dims = list(systems.dims)
    if w.shape != (systems.total, systems.total):
        raise DimensionError(f"matrix of shape {w.shape} does not match dims {systems.dims}")
    t = w.reshape(dims + dims)
    s1, s2, s3, s4 = (b.sigmas for b in _bases(systems))
    # Tr[W S] = sum W[r, c] S[c, r]
    c = np.einsum("abcdefgh,mea,nfb,ogc,phd->mnop", t, s1, s2, s3, s4, optimize=True)
    return c / systems.total


def reconstruct(coeffs, systems: LabSystems) -> np.ndarray:
    s1, s2, s3, s4 = (b.sigmas for b in _bases(systems))
    t = np.einsum("mnop,mae,nbf,ocg,pdh->abcdefgh", np.asarray(coeffs, dtype=complex),
                  s1, s2, s3, s4, optimize=True)
    return t.reshape(systems.total, systems.total)


def _type_masks(systems: LabSystems) -> np.ndarray:
    """Integer code per coefficient: bit k set when factor k is non-identity."""
    grids = np.meshgrid(*[np.arange(d * d) for d in systems.dims], indexing="ij")
    code = np.zeros(grids[0].shape, dtype=int)
    for k, g in enumerate(grids):
        code |= (g > 0).astype(int) << k
    return code


def _code_label(code: int) -> str:
    return type_label([(code >> k) & 1 for k in range(4)])


@dataclass(frozen=True)
class HSTerm:
    type: str
    index: tuple
    coefficient: float
    names: tuple


@dataclass(frozen=True)
class HSTermReport:
    systems: LabSystems
    coeffs: np.ndarray = field(repr=False)
    weights: dict
    imag_residual: float
    cutoff: float = COEFF_CUTOFF

    @property
    def identity_coefficient(self) -> float:
        return float(self.coeffs[0, 0, 0, 0])

    def present_types(self) -> list[str]:
        """Types with at least one coefficient above the cutoff, in canonical order."""
        codes = _type_masks(self.systems)
        big = np.abs(self.coeffs) > self.cutoff
        found = {_code_label(c) for c in np.unique(codes[big])}
        return [t for t in ALL_TYPES if t in found]

    def terms(self) -> list[HSTerm]:
        """Non-negligible terms sorted by multi-index."""
        bases = _bases(self.systems)
        out = []
        for idx in zip(*np.nonzero(np.abs(self.coeffs) > self.cutoff)):
            idx = tuple(int(i) for i in idx)
            mask = [i > 0 for i in idx]
            names = tuple(b.labels[i] for b, i in zip(bases, idx))
            out.append(HSTerm(type_label(mask), idx, float(self.coeffs[idx]), names))
        return out

    def coefficient(self, **by_factor) -> float:
        """Look up a coefficient by basis label, e.g. ``coefficient(A2='z', B1='z')``."""
        bases = _bases(self.systems)
        idx = []
        for name, b in zip(FACTORS, bases):
            lab = by_factor.get(name, "1")
            idx.append(b.labels.index(lab))
        return float(self.coeffs[tuple(idx)])

    def reconstruct(self) -> np.ndarray:
        return reconstruct(self.coeffs, self.systems)

    def table(self) -> list[dict]:
        return [
            {"type": t.type, "index": list(t.index), "basis": list(t.names), "coefficient": t.coefficient}
            for t in self.terms()
        ]


def expand(w, systems: LabSystems, cutoff: float = COEFF_CUTOFF) -> HSTermReport:
    """Real Hilbert-Schmidt coefficients of a Hermitian ``w`` plus per-type squared weights."""
    w = as_matrix(w)
    if not is_hermitian(w):
        raise ValueError("expansion needs a Hermitian matrix")
    c = hs_coefficients(w, systems)
    imag = float(np.max(np.abs(c.imag)))
    real = np.ascontiguousarray(c.real)
    codes = _type_masks(systems)
    sq = real**2
    weights = {}
    for code in range(16):
        sel = codes == code
        if sel.any():
            weights[_code_label(code)] = float(sq[sel].sum())
    real.setflags(write=False)
    return HSTermReport(systems, real, weights, imag, cutoff)


@dataclass(frozen=True)
class StructuralVerdict:
    ok: bool
    normalization_residual: float
    forbidden: dict
    signalling: tuple

    def __bool__(self) -> bool:
        return self.ok

    @property
    def bidirectional(self) -> bool:
        """Terms signalling both ways are present: the matrix may not be a mixture of one-way processes."""
        return set(self.signalling) == {"A->B", "B->A"}


def classify_validity(report: HSTermReport, atol: float = COEFF_CUTOFF) -> StructuralVerdict:
    """Accept iff the identity coefficient is ``1/(d_A1 d_B1)`` and only allowed types occur."""
    s = report.systems
    norm_resid = report.identity_coefficient - 1.0 / (s.A1 * s.B1)
    present = report.present_types()
    forbidden = {t: report.weights[t] for t in present if t in FORBIDDEN}
    signalling = []
    if any(t in A_TO_B for t in present):
        signalling.append("A->B")
    if any(t in B_TO_A for t in present):
        signalling.append("B->A")
    ok = abs(norm_resid) <= atol and not forbidden
    return StructuralVerdict(ok, float(norm_resid), forbidden, tuple(signalling))
