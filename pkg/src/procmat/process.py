"""Process matrices: validation, the bilinear probability rule, reductions and builtins."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

import numpy as np

from . import hs
from .cj import CPMapCJ, Instrument, PSD_RTOL, identity_channel, is_cptp, psd_ok
from .sampling import default_rng, random_cptp
from .tensor import (
    PAULI_I,
    PAULI_X,
    PAULI_Z,
    DimensionError,
    LabSystems,
    as_matrix,
    is_hermitian,
    kron,
    partial_trace,
    permute_factors,
    phi_plus,
)

PROB_ATOL = 1e-9
N_PROBES = 25


@dataclass(frozen=True)
class ProcessMatrix:
    """Hermitian ``W`` on ``A1 (x) A2 (x) B1 (x) B2`` (canonical order).

    Construction only checks shape and hermiticity; call :func:`validate` for
    the full positivity and normalization verdict.
    """

    systems: LabSystems
    w: np.ndarray = field(repr=False)

    def __post_init__(self):
        w = as_matrix(self.w)
        D = self.systems.total
        if w.shape != (D, D):
            raise DimensionError(f"matrix of shape {w.shape} does not match dims {self.systems.dims}")
        if not is_hermitian(w):
            raise ValueError("process matrix must be Hermitian")
        w = 0.5 * (w + w.conj().T)
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.w)

    @cached_property
    def hs_report(self) -> hs.HSTermReport:
        return hs.expand(self.w, self.systems)

    @property
    def trace(self) -> float:
        return float(np.trace(self.w).real)

    def __add__(self, other: "ProcessMatrix") -> "ProcessMatrix":
        _same_systems(self, other)
        return ProcessMatrix(self.systems, self.w + other.w)

    def __rmul__(self, c: float) -> "ProcessMatrix":
        return ProcessMatrix(self.systems, c * self.w)


def _same_systems(a: ProcessMatrix, b: ProcessMatrix) -> None:
    if a.systems != b.systems:
        raise DimensionError(f"process matrices live on different systems: {a.systems} vs {b.systems}")


@dataclass(frozen=True)
class ValidationRecord:
    valid: bool
    mode: str
    min_eigenvalue: float
    psd: bool
    trace: float
    trace_residual: float
    structural: hs.StructuralVerdict | None = None
    probe_worst_residual: float | None = None
    n_probes: int = 0

    def __bool__(self) -> bool:
        return self.valid

    @property
    def normalized(self) -> bool:
        """Normalization verdict of whichever checks ran, ignoring positivity."""
        ok = True
        if self.structural is not None:
            ok = ok and self.structural.ok
        if self.probe_worst_residual is not None:
            ok = ok and self.probe_worst_residual <= PROB_ATOL * 10
        return ok

    def to_dict(self) -> dict:
        out = {
            "valid": self.valid,
            "mode": self.mode,
            "min_eigenvalue": self.min_eigenvalue,
            "psd": self.psd,
            "trace": self.trace,
            "trace_residual": self.trace_residual,
        }
        if self.structural is not None:
            out["structural_ok"] = self.structural.ok
            out["normalization_residual"] = self.structural.normalization_residual
            out["forbidden_terms"] = self.structural.forbidden
            out["signalling"] = list(self.structural.signalling)
        if self.probe_worst_residual is not None:
            out["probe_worst_residual"] = self.probe_worst_residual
            out["n_probes"] = self.n_probes
        return out


def probe_residual(pm: ProcessMatrix, n_probes: int = N_PROBES, seed=0) -> float:
    """Largest ``|Tr[W (M_A (x) M_B)] - 1|`` over seeded random CPTP pairs."""
    rng = default_rng(seed)
    s = pm.systems
    worst = 0.0
    for child in rng.spawn(n_probes):
        ma = random_cptp(s.A1, s.A2, child)
        mb = random_cptp(s.B1, s.B2, child)
        worst = max(worst, abs(_raw_probability(pm, ma, mb) - 1.0))
    return worst


def validate(pm: ProcessMatrix, mode: str = "both", tol: float = PROB_ATOL,
             n_probes: int = N_PROBES, seed=0) -> ValidationRecord:
    """Positivity plus normalization, the latter checked structurally, by probing, or both.

    Structural mode reads the Hilbert-Schmidt expansion: identity coefficient
    ``1/(d_A1 d_B1)`` and no forbidden term types. Probe mode draws
    ``n_probes`` random trace-preserving pairs and demands unit probability.
    """
    if mode not in ("structural", "probe", "both"):
        raise ValueError(f"unknown validation mode {mode!r}")
    ev = pm.eigenvalues
    psd = psd_ok(ev, PSD_RTOL)
    norm = pm.systems.normalization
    trace_resid = abs(pm.trace - norm)
    valid = psd
    structural = None
    worst = None
    if mode in ("structural", "both"):
        structural = hs.classify_validity(pm.hs_report)
        valid = valid and structural.ok
    if mode in ("probe", "both"):
        worst = probe_residual(pm, n_probes, seed)
        valid = valid and worst <= tol * max(1.0, norm)
    return ValidationRecord(bool(valid), mode, float(ev[0]), psd, pm.trace, float(trace_resid),
                            structural, worst, n_probes if worst is not None else 0)


def _check_maps(pm: ProcessMatrix, ma: CPMapCJ, mb: CPMapCJ) -> None:
    s = pm.systems
    if (ma.d_in, ma.d_out) != (s.A1, s.A2):
        raise DimensionError(f"Alice's map acts {ma.d_in}->{ma.d_out}, process expects {s.A1}->{s.A2}")
    if (mb.d_in, mb.d_out) != (s.B1, s.B2):
        raise DimensionError(f"Bob's map acts {mb.d_in}->{mb.d_out}, process expects {s.B1}->{s.B2}")


def _raw_probability(pm: ProcessMatrix, ma: CPMapCJ, mb: CPMapCJ) -> float:
    s = pm.systems
    w4 = pm.w.reshape(s.dim_alice, s.dim_bob, s.dim_alice, s.dim_bob)
    # Tr[W (Ma (x) Mb)] with W[(i,j),(k,l)] and (Ma (x) Mb)[(k,l),(i,j)] = Ma[k,i] Mb[l,j]
    return float(np.einsum("ijkl,ki,lj->", w4, ma.cj, mb.cj).real)


def probability(pm: ProcessMatrix, ma: CPMapCJ, mb: CPMapCJ, tol: float = PROB_ATOL) -> float:
    """Joint probability ``Tr[W (M_A (x) M_B)]`` of one outcome for each party."""
    _check_maps(pm, ma, mb)
    s = pm.systems
    w4 = pm.w.reshape(s.dim_alice, s.dim_bob, s.dim_alice, s.dim_bob)
    p = np.einsum("ijkl,ki,lj->", w4, ma.cj, mb.cj)
    if abs(p.imag) > tol:
        warnings.warn(f"probability has imaginary part {p.imag:.3g}", RuntimeWarning, stacklevel=2)
    p = float(p.real)
    if p < -tol or p > 1 + tol:
        warnings.warn(f"probability {p:.12g} outside [0, 1]", RuntimeWarning, stacklevel=2)
    return p


def joint_distribution(pm: ProcessMatrix, ia: Instrument, ib: Instrument) -> np.ndarray:
    """Table ``P[i, j]`` over Alice's outcome ``i`` and Bob's outcome ``j``."""
    _check_maps(pm, ia[0], ib[0])
    s = pm.systems
    w4 = pm.w.reshape(s.dim_alice, s.dim_bob, s.dim_alice, s.dim_bob)
    ma = np.stack([m.cj for m in ia.maps])
    mb = np.stack([m.cj for m in ib.maps])
    return np.einsum("ijkl,aki,blj->ab", w4, ma, mb, optimize=True).real


def reduce(pm: ProcessMatrix, party: str, cptp_sum: CPMapCJ) -> np.ndarray:
    """Effective matrix seen by the other party once ``party`` applies ``cptp_sum``.

    ``party='A'`` returns ``Tr_{A1A2}[W (M^{A1A2} (x) 1)]`` on ``B1 (x) B2``;
    ``party='B'`` returns the analogous matrix on ``A1 (x) A2``.
    """
    check = is_cptp(cptp_sum)
    if not check:
        raise ValueError(f"reduction needs a CPTP map (trace residual {check.trace_residual:.3g})")
    s = pm.systems
    if party == "A":
        if (cptp_sum.d_in, cptp_sum.d_out) != (s.A1, s.A2):
            raise DimensionError(f"Alice's map acts {cptp_sum.d_in}->{cptp_sum.d_out}, process expects {s.A1}->{s.A2}")
        prod = pm.w @ kron(cptp_sum.cj, np.eye(s.dim_bob))
        return partial_trace(prod, (s.dim_alice, s.dim_bob), keep=(1,))
    if party == "B":
        if (cptp_sum.d_in, cptp_sum.d_out) != (s.B1, s.B2):
            raise DimensionError(f"Bob's map acts {cptp_sum.d_in}->{cptp_sum.d_out}, process expects {s.B1}->{s.B2}")
        prod = pm.w @ kron(np.eye(s.dim_alice), cptp_sum.cj)
        return partial_trace(prod, (s.dim_alice, s.dim_bob), keep=(0,))
    raise ValueError(f"party must be 'A' or 'B', got {party!r}")


# builtins --------------------------------------------------------------------


def _require_state(rho, name: str = "rho") -> np.ndarray:
    rho = as_matrix(rho)
    if rho.shape[0] != rho.shape[1] or not is_hermitian(rho):
        raise ValueError(f"{name} must be a Hermitian square matrix")
    if abs(np.trace(rho).real - 1.0) > 1e-9 or not psd_ok(np.linalg.eigvalsh(rho)):
        raise ValueError(f"{name} must be a density matrix (PSD, unit trace)")
    return rho


def _require_channel(c: CPMapCJ, name: str = "channel") -> CPMapCJ:
    check = is_cptp(c)
    if not check:
        raise ValueError(f"{name} is not CPTP (min eigenvalue {check.min_eigenvalue:.3g}, "
                         f"trace residual {check.trace_residual:.3g})")
    return c


def state(rho, d_a1: int | None = None, d_b1: int | None = None, d_a2: int = 2, d_b2: int = 2) -> ProcessMatrix:
    """Shared state ``rho^{A1B1}`` measured by both parties: ``rho (x) 1^{A2B2}``."""
    rho = _require_state(rho)
    n = rho.shape[0]
    if d_a1 is None and d_b1 is None:
        d_a1 = int(round(np.sqrt(n)))
        d_b1 = n // d_a1
    elif d_a1 is None:
        d_a1 = n // d_b1
    elif d_b1 is None:
        d_b1 = n // d_a1
    if d_a1 * d_b1 != n:
        raise DimensionError(f"state of dimension {n} does not split as {d_a1} x {d_b1}")
    raw = kron(rho, np.eye(d_a2), np.eye(d_b2))  # A1 B1 A2 B2
    w = permute_factors(raw, (d_a1, d_b1, d_a2, d_b2), (0, 2, 1, 3))
    return ProcessMatrix(LabSystems(d_a1, d_a2, d_b1, d_b2), w)


def channel_b_to_a(channel: CPMapCJ | None = None, rho_b1=None, d_a2: int = 2) -> ProcessMatrix:
    """Bob receives ``rho_b1``; his output reaches Alice through ``channel`` (B2 -> A1).

    ``W = 1^{A2} (x) (C^{B2A1})^T (x) rho^{B1}``.
    """
    channel = _require_channel(identity_channel(2) if channel is None else channel)
    d_b2, d_a1 = channel.d_in, channel.d_out
    rho = _require_state(np.diag([1.0, 0.0]) if rho_b1 is None else rho_b1, "rho_b1")
    d_b1 = rho.shape[0]
    raw = kron(np.eye(d_a2), channel.cj.T, rho)  # A2 B2 A1 B1
    w = permute_factors(raw, (d_a2, d_b2, d_a1, d_b1), (2, 0, 3, 1))
    return ProcessMatrix(LabSystems(d_a1, d_a2, d_b1, d_b2), w)


def channel_a_to_b(channel: CPMapCJ | None = None, rho_a1=None, d_b2: int = 2) -> ProcessMatrix:
    """Mirror of :func:`channel_b_to_a`: ``W = rho^{A1} (x) (C^{A2B1})^T (x) 1^{B2}``."""
    channel = _require_channel(identity_channel(2) if channel is None else channel)
    d_a2, d_b1 = channel.d_in, channel.d_out
    rho = _require_state(np.diag([1.0, 0.0]) if rho_a1 is None else rho_a1, "rho_a1")
    d_a1 = rho.shape[0]
    w = kron(rho, channel.cj.T, np.eye(d_b2))
    return ProcessMatrix(LabSystems(d_a1, d_a2, d_b1, d_b2), w)


def channel_with_memory(w_a1b1b2, d_a1: int, d_b1: int, d_b2: int, d_a2: int = 2) -> ProcessMatrix:
    """``1^{A2} (x) W^{A1B1B2}``: Bob acts on part of a state, Alice gets his output and the rest."""
    m = as_matrix(w_a1b1b2)
    raw = kron(np.eye(d_a2), m)  # A2 A1 B1 B2
    w = permute_factors(raw, (d_a2, d_a1, d_b1, d_b2), (1, 0, 2, 3))
    pm = ProcessMatrix(LabSystems(d_a1, d_a2, d_b1, d_b2), w)
    rec = validate(pm, mode="structural")
    if not rec:
        raise ValueError("1 (x) W^{A1B1B2} is not a valid process matrix")
    return pm


def nonseparable() -> ProcessMatrix:
    """Two-qubit process that lets Bob pick the direction of signalling by his measurement basis.

    ``W = 1/4 [1 + (Z^{A2} Z^{B1} + Z^{A1} X^{B1} Z^{B2}) / sqrt(2)]``.
    """
    w = 0.25 * (
        kron(PAULI_I, PAULI_I, PAULI_I, PAULI_I)
        + (kron(PAULI_I, PAULI_Z, PAULI_Z, PAULI_I) + kron(PAULI_Z, PAULI_I, PAULI_X, PAULI_Z)) / np.sqrt(2.0)
    )
    return ProcessMatrix(LabSystems(2, 2, 2, 2), w)


def mixture(q: float, w1: ProcessMatrix, w2: ProcessMatrix) -> ProcessMatrix:
    """``q W1 + (1 - q) W2``."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"mixing weight {q} outside [0, 1]")
    _same_systems(w1, w2)
    return ProcessMatrix(w1.systems, q * w1.w + (1.0 - q) * w2.w)


def ctc(sigma=None, u=None) -> ProcessMatrix:
    """Single-party matrix of a chronology-violating loop; not a valid process.

    Alice receives a chronology-respecting system in ``sigma`` plus a system
    that, after leaving, returns to her entrance through ``u``. Her input is
    ``A1 (x) A1'`` and output ``A2 (x) A2'``; Bob's systems are trivial.
    """
    sigma = _require_state(np.eye(2) / 2 if sigma is None else sigma, "sigma")
    u = np.eye(2, dtype=complex) if u is None else as_matrix(u)
    if not np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=1e-9):
        raise ValueError("u must be unitary")
    d, dp = sigma.shape[0], u.shape[0]
    loop = kron(u, np.eye(dp)) @ phi_plus(dp) @ kron(u.conj().T, np.eye(dp))  # A1' A2'
    raw = kron(sigma, np.eye(d), loop)  # A1 A2 A1' A2'
    w = permute_factors(raw, (d, d, dp, dp), (0, 2, 1, 3))
    return ProcessMatrix(LabSystems(d * dp, d * dp, 1, 1), w)


def random_process(systems: LabSystems, types=None, rng=None, diagonal: bool = False,
                   strength: float | None = None) -> ProcessMatrix:
    """Random valid process containing only the given allowed term types.

    Draws Gaussian coefficients for every basis product of the requested types
    (diagonal basis elements only when ``diagonal``), then mixes with the
    identity so the result stays positive semidefinite. ``strength`` in
    ``(0, 1]`` places the minimum eigenvalue between the identity level and
    zero; by default it is uniform.
    """
    rng = default_rng(rng)
    types = sorted(hs.ALLOWED - {"1"}) if types is None else list(types)
    x = random_traceless(systems, types, rng, diagonal)
    base = np.eye(systems.total) / (systems.A1 * systems.B1)
    if not np.any(x):
        return ProcessMatrix(systems, base)
    lam = np.linalg.eigvalsh(x)[0]
    s = rng.uniform(0.05, 1.0) if strength is None else strength
    t = s / (systems.A1 * systems.B1) / abs(lam)
    return ProcessMatrix(systems, base + t * x)


def random_traceless(systems: LabSystems, types, rng=None, diagonal: bool = False) -> np.ndarray:
    """Hermitian sum of basis products of the listed term types with Gaussian weights."""
    rng = default_rng(rng)
    bases = [hs.make_basis(d) for d in systems.dims]
    out = np.zeros((systems.total, systems.total), dtype=complex)
    for label in types:
        mask = hs.label_mask(label)
        choices = []
        for on, b in zip(mask, bases):
            if not on:
                choices.append([0])
                continue
            idx = range(1, len(b))
            if diagonal:
                idx = [i for i in idx if np.count_nonzero(b[i] - np.diag(np.diag(b[i]))) == 0]
            choices.append(list(idx))
        for combo in product(*choices):
            c = rng.standard_normal()
            out += c * kron(*(b[i] for b, i in zip(bases, combo)))
    return out


BUILTIN_NAMES = ("state", "channel_b_to_a", "channel_a_to_b", "channel_with_memory", "nonseparable", "mixture", "ctc")


def builtin(name: str, **params) -> ProcessMatrix:
    """Named constructor dispatch used by the command line."""
    table = {
        "state": state,
        "channel_b_to_a": channel_b_to_a,
        "channel_a_to_b": channel_a_to_b,
        "channel_with_memory": channel_with_memory,
        "nonseparable": nonseparable,
        "mixture": mixture,
        "ctc": ctc,
    }
    try:
        fn = table[name]
    except KeyError:
        raise ValueError(f"unknown builtin {name!r}; choose from {', '.join(BUILTIN_NAMES)}") from None
    return fn(**params)
