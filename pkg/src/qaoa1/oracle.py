"""Exact reference engines: dense statevector simulation and exhaustive enumeration."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_capacity, check_model
from .exceptions import DegenerateInstanceError

MAX_STATEVECTOR_N = 20
MAX_BRUTE_FORCE_N = 24


@dataclass(frozen=True)
class GroundTruth:
    e_min: float  # constant-free
    e_max: float
    argmin: np.ndarray
    degeneracy: int

    def to_dict(self):
        return {"e_min": self.e_min, "e_max": self.e_max,
                "argmin": [int(x) for x in self.argmin], "degeneracy": self.degeneracy}


def _spin_table(n):
    # bit i of z set  <=>  s_i = -1
    z = np.arange(1 << n, dtype=np.int64)
    return 1 - 2 * ((z[:, None] >> np.arange(n)) & 1).astype(np.int8)


def cost_table(model):
    """Constant-free cost of every basis state, indexed by bitmask."""
    check_capacity(model.n, MAX_STATEVECTOR_N, "cost_table")
    s = _spin_table(model.n).astype(float)
    u, v = model.edges[:, 0], model.edges[:, 1]
    return (s[:, u] * s[:, v]) @ model.weights + s @ model.fields


def _apply_mixer(psi, n, beta):
    c, s = np.cos(beta), -1j * np.sin(beta)
    for q in range(n):
        view = psi.reshape(-1, 2, 1 << q)
        a0 = view[:, 0, :].copy()
        a1 = view[:, 1, :]
        view[:, 0, :] = c * a0 + s * a1
        view[:, 1, :] = s * a0 + c * a1
    return psi


def qaoa_state(model, gamma, beta, costs=None):
    """Amplitudes of e^{-i beta H_M} e^{-i gamma H_P} |+>^n."""
    check_model(model)
    n = model.n
    check_capacity(n, MAX_STATEVECTOR_N, "statevector simulation")
    if costs is None:
        costs = cost_table(model)
    psi = np.exp(-1j * gamma * costs) / np.sqrt(1 << n)
    return _apply_mixer(psi, n, beta)


def statevector_expectation(model, gamma, beta):
    """<gamma, beta| H_P |gamma, beta> without the constant."""
    costs = cost_table(model)
    psi = qaoa_state(model, gamma, beta, costs)
    return float(np.real(np.vdot(psi, psi * costs)))


def statevector_correlators(model, gamma, beta):
    """(<Z_i> per vertex, <Z_u Z_v> per stored edge) from the dense state."""
    psi = qaoa_state(model, gamma, beta)
    p = np.abs(psi) ** 2
    s = _spin_table(model.n).astype(float)
    zi = p @ s
    u, v = model.edges[:, 0], model.edges[:, 1]
    zz = p @ (s[:, u] * s[:, v])
    return zi, zz


def _energy_table(n, J, h, fixed_last=False):
    """Constant-free energies of all assignments of the first ``m`` spins,
    built one spin at a time. With ``fixed_last`` the last spin is pinned to +1.
    """
    m = n - 1 if fixed_last else n
    E = np.zeros(1)
    for k in range(m):
        size = E.size
        local = np.full(size, h[k])
        for j in np.flatnonzero(J[k, :k]):
            sj = 1.0 - 2.0 * ((np.arange(size) >> j) & 1)
            local += J[k, j] * sj
        E = np.concatenate([E + local, E - local])
    if fixed_last:
        k = n - 1
        local = np.full(E.size, h[k])
        for j in np.flatnonzero(J[k, :k]):
            local += J[k, j] * (1.0 - 2.0 * ((np.arange(E.size) >> j) & 1))
        E = E + local
    return E


def brute_force(model) -> GroundTruth:
    """Exact constant-free minimum and maximum over all 2^n assignments."""
    check_model(model)
    n = model.n
    check_capacity(n, MAX_BRUTE_FORCE_N, "brute_force")
    J = model.coupling_matrix()
    h = np.asarray(model.fields)
    symmetric = not model.has_fields and n > 1
    E = _energy_table(n, J, h, fixed_last=symmetric)
    e_min, e_max = float(E.min()), float(E.max())
    tol = 1e-9 * max(1.0, abs(e_min))
    hits = np.abs(E - e_min) <= tol
    z = int(np.argmax(hits))
    bits = (z >> np.arange(n)) & 1
    argmin = (1 - 2 * bits).astype(np.int8)
    degeneracy = int(hits.sum()) * (2 if symmetric else 1)
    return GroundTruth(e_min, e_max, argmin, degeneracy)


def gray_code_minimum(model):
    """Independent enumeration order: walk the reflected Gray code flipping one spin
    per step and updating the energy incrementally. Returns (e_min, e_max)."""
    n = model.n
    J = model.coupling_matrix()
    h = model.fields
    s = np.ones(n)
    e = float(J.sum() / 2 + h.sum())
    lo = hi = e
    for i in range(1, 1 << n):
        k = ((i ^ (i >> 1)) ^ ((i - 1) ^ ((i - 1) >> 1))).bit_length() - 1
        e -= 2 * s[k] * (h[k] + J[k] @ s)
        s[k] = -s[k]
        lo, hi = min(lo, e), max(hi, e)
    return lo, hi


def approximation_ratio(achieved, truth: GroundTruth):
    """achieved / e_min on constant-free energies: 1 optimal, 0 random guessing."""
    if not truth.e_min < 0:
        raise DegenerateInstanceError(f"ratio undefined for e_min = {truth.e_min} >= 0")
    return float(achieved) / truth.e_min
