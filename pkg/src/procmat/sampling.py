"""Seeded random states, unitaries, channels and instruments."""

from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group

from .cj import CPMapCJ, Instrument, cj_from_kraus


def default_rng(seed=None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def haar_unitary(d: int, rng=None) -> np.ndarray:
    rng = default_rng(rng)
    if d == 1:
        return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1))
    return unitary_group.rvs(d, random_state=rng)


def random_state(d: int, rng=None, rank: int | None = None) -> np.ndarray:
    """Density matrix from the induced measure (Ginibre with ``rank`` columns)."""
    rng = default_rng(rng)
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_cptp(d_in: int, d_out: int, rng=None) -> CPMapCJ:
    """Haar unitary on system (x) ancilla, ancilla of dim ``d_out`` starting in |0>,
    system factor traced out afterwards."""
    rng = default_rng(rng)
    u = haar_unitary(d_in * d_out, rng).reshape(d_in, d_out, d_in, d_out)
    kraus = [u[k, :, :, 0] for k in range(d_in)]
    return cj_from_kraus(kraus)


def random_instrument(d_in: int, d_out: int, n_outcomes: int, rng=None) -> Instrument:
    """Random instrument from a Haar isometry followed by a measurement of an ancilla register."""
    rng = default_rng(rng)
    n = d_out * n_outcomes * d_in
    v = haar_unitary(n, rng)[:, :d_in].reshape(n_outcomes, d_in, d_out, d_in)
    maps = [cj_from_kraus([v[j, s] for s in range(d_in)]) for j in range(n_outcomes)]
    return Instrument(tuple(maps))
