"""Closed-form level-1 QAOA expectation values, coefficient functions and correlators.

With g_uv = 2 J_uv gamma and g_i = 2 h_i gamma, the expectation splits as

    <H>(gamma, beta) = A(gamma) sin 2b + B(gamma) sin 4b + C(gamma) sin^2 2b + constant

where A collects the single-spin terms h_i sin g_i prod_k cos g_ik and B, C the
pair terms. Every cosine product is evaluated through a sparse count matrix over
the distinct |weights| present in the model: the product is exp(sum log|cos|)
with a sign parity and an exact-zero count carried alongside, so excluding a
single factor (the ``N(v) minus u`` sets) is a subtraction instead of a new loop.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ._validation import check_model
from .exceptions import InputError

_CHUNK_ELEMENTS = 2_000_000


@dataclass(frozen=True)
class QaoaAngles:
    gamma: float
    beta: float


@dataclass(frozen=True)
class CoefficientTriple:
    a: float
    b: float
    c: float = 0.0

    def __iter__(self):
        return iter((self.a, self.b, self.c))


class NeighborhoodIndex:
    """Neighbourhood sets of every edge plus the compiled product tables.

    For edge k = (u, v): ``e(k) = N(v) - {u}``, ``d(k) = N(u) - {v}`` and
    ``F(k) = N(u) & N(v)``.
    """

    def __init__(self, model):
        check_model(model)
        self.model = model
        self.n = n = model.n
        self.m = m = model.num_edges
        adj = model.adjacency
        self._nbrs = [np.array(sorted(a), dtype=np.int64) for a in adj]
        u, v = model.edges[:, 0], model.edges[:, 1]
        J, h = np.asarray(model.weights), np.asarray(model.fields)
        self.u, self.v, self.J, self.h = u, v, J, h

        # common neighbours of every edge
        nbr_sets = [set(a) for a in adj]
        f_edge, f_vertex = [], []
        for k, (a, b) in enumerate(zip(u.tolist(), v.tolist())):
            small, large = sorted((nbr_sets[a], nbr_sets[b]), key=len)
            common = [f for f in small if f in large]
            f_edge.extend([k] * len(common))
            f_vertex.extend(common)
        f_edge = np.array(f_edge, dtype=np.int64)
        f_vertex = np.array(f_vertex, dtype=np.int64)
        order = np.lexsort((f_vertex, f_edge))
        f_edge, f_vertex = f_edge[order], f_vertex[order]
        self._f_ptr = np.searchsorted(f_edge, np.arange(m + 1))
        self._f_vertex = f_vertex

        Juf = np.array([adj[a][f] for a, f in zip(u[f_edge].tolist(), f_vertex.tolist())])
        Jvf = np.array([adj[b][f] for b, f in zip(v[f_edge].tolist(), f_vertex.tolist())])
        Juf, Jvf = Juf.reshape(-1), Jvf.reshape(-1)
        self._f_edge, self.J_uf, self.J_vf = f_edge, Juf, Jvf

        # distinct |weights| appearing in any cosine factor
        pools = [J, h, h[u] + h[v], h[u] - h[v], Juf + Jvf, Juf - Jvf, np.zeros(1)]
        sizes = [p.size for p in pools]
        uw, inv = np.unique(np.abs(np.concatenate(pools)), return_inverse=True)
        parts = np.split(inv, np.cumsum(sizes)[:-1])
        self.unique_weights = uw
        U = uw.size
        self.idx_J, self.idx_h, self.idx_hsum, self.idx_hdiff = parts[0], parts[1], parts[2], parts[3]
        idx_fplus, idx_fminus = parts[4], parts[5]
        idx_uf = np.searchsorted(uw, np.abs(Juf))
        idx_vf = np.searchsorted(uw, np.abs(Jvf))

        def counts(rows, cols, shape):
            data = np.ones(len(rows))
            return sp.csr_matrix((data, (rows, cols)), shape=shape)

        ends = np.concatenate([u, v])
        self.C_vertex = counts(ends, np.concatenate([self.idx_J, self.idx_J]), (n, U))
        self.C_Fu = counts(f_edge, idx_uf, (m, U))
        self.C_Fv = counts(f_edge, idx_vf, (m, U))
        self.C_Fplus = counts(f_edge, idx_fplus, (m, U))
        self.C_Fminus = counts(f_edge, idx_fminus, (m, U))

    # -- set views -----------------------------------------------------------
    def neighbors(self, i):
        return self._nbrs[i]

    def F(self, k):
        return self._f_vertex[self._f_ptr[k]:self._f_ptr[k + 1]]

    def e(self, k):
        nb = self._nbrs[self.v[k]]
        return nb[nb != self.u[k]]

    def d(self, k):
        nb = self._nbrs[self.u[k]]
        return nb[nb != self.v[k]]

    def check(self, model):
        if model is self.model:
            return
        if (model.n != self.n or model.num_edges != self.m
                or not np.array_equal(model.weights, self.J)
                or not np.array_equal(model.edges[:, 0], self.u)
                or not np.array_equal(model.fields, self.h)):
            raise InputError("neighbourhood index was built for a different model")


def build_index(model) -> NeighborhoodIndex:
    return NeighborhoodIndex(model)


def _index_for(model, index):
    if index is None:
        return NeighborhoodIndex(model)
    index.check(model)
    return index


def _logcos_table(uw, gammas):
    """Rows: distinct weights. Columns: [log|cos| | negative? | zero?] blocks over gammas."""
    c = np.cos(2.0 * np.outer(uw, gammas))
    zero = c == 0.0
    with np.errstate(divide="ignore"):
        lg = np.log(np.abs(c))
    lg[zero] = 0.0
    return np.concatenate([lg, (c < 0.0).astype(float), zero.astype(float)], axis=1)


def _to_product(X, G):
    lg, neg, zero = X[:, :G], X[:, G:2 * G], X[:, 2 * G:]
    sign = 1.0 - 2.0 * np.fmod(np.rint(neg), 2.0)
    return np.where(zero > 0.5, 0.0, np.exp(lg) * sign)


def _chunk_terms(ix: NeighborhoodIndex, g):
    """Per-vertex and per-edge gamma-dependent terms for a block of gammas.

    Returns (vertex_A, edge_B, edge_C), each shaped (count, len(g)):
      vertex_A[i] = h_i sin(g_i) prod_{k in N(i)} cos g_ik
      edge_B[k]   = J/2 sin(g_uv) (cos g_v prod_e cos g_wv + cos g_u prod_d cos g_uw)
      edge_C[k]   = -J/2 prod_{e-F} prod_{d-F} (P_+ - P_-),
      P_chi       = cos(g_u + chi g_v) prod_F cos(g_uf + chi g_vf)
    """
    G = g.size
    X = _logcos_table(ix.unique_weights, g)
    V = ix.C_vertex @ X
    u, v = ix.u, ix.v
    XJ = X[ix.idx_J]
    Xh = X[ix.idx_h]

    hg = 2.0 * np.outer(ix.h, g)
    vertex_A = ix.h[:, None] * np.sin(hg) * _to_product(V, G)

    Pe = _to_product(V[v] - XJ + Xh[v], G)
    Pd = _to_product(V[u] - XJ + Xh[u], G)
    Jg = 2.0 * np.outer(ix.J, g)
    half = 0.5 * ix.J[:, None]
    edge_B = half * np.sin(Jg) * (Pe + Pd)

    nonF = V[u] + V[v] - 2.0 * XJ - ix.C_Fu @ X - ix.C_Fv @ X
    Pplus = _to_product(X[ix.idx_hsum] + ix.C_Fplus @ X, G)
    Pminus = _to_product(X[ix.idx_hdiff] + ix.C_Fminus @ X, G)
    edge_C = -half * _to_product(nonF, G) * (Pplus - Pminus)
    return vertex_A, edge_B, edge_C


def _chunks(ix, gammas):
    gammas = np.asarray(gammas, dtype=float).reshape(-1)
    width = max(1, _CHUNK_ELEMENTS // max(ix.m, ix.n, ix.unique_weights.size, 1))
    for start in range(0, gammas.size, width):
        yield start, gammas[start:start + width]


def coefficient_arrays(model, index, gammas):
    """(A, B, C) arrays over a vector of gammas: <H> - c = A sin 2b + B sin 4b + C sin^2 2b."""
    ix = _index_for(model, index)
    g = np.asarray(gammas, dtype=float).reshape(-1)
    out = np.zeros((3, g.size))
    for start, blk in _chunks(ix, g):
        vA, eB, eC = _chunk_terms(ix, blk)
        sl = slice(start, start + blk.size)
        out[0, sl] = vA.sum(axis=0)
        out[1, sl] = eB.sum(axis=0)
        out[2, sl] = eC.sum(axis=0)
    return out


def _scalar_or_array(x, like):
    return float(x[0]) if np.ndim(like) == 0 else x.reshape(np.shape(like))


def coefficients_with_fields(model, index, gamma) -> CoefficientTriple:
    """(A, B, C) with <H> - constant = A sin 2b + B sin 4b + C sin^2 2b."""
    abc = coefficient_arrays(model, index, gamma)
    return CoefficientTriple(*(_scalar_or_array(r, gamma) for r in abc))


def _require_field_free(model):
    if model.has_fields:
        raise InputError("field-free formula called on a model with nonzero fields")


def coefficients_field_free(model, index, gamma) -> CoefficientTriple:
    """(A, B, 0) with <H> - constant = A sin 4b - B sin^2 2b."""
    _require_field_free(model)
    abc = coefficient_arrays(model, index, gamma)
    return CoefficientTriple(_scalar_or_array(abc[1], gamma), _scalar_or_array(-abc[2], gamma), 0.0)


def _unpack_angles(angles):
    if isinstance(angles, QaoaAngles):
        return angles.gamma, angles.beta
    gamma, beta = angles
    return gamma, beta


def _expectation(model, index, gamma, beta):
    g = np.asarray(gamma, dtype=float)
    b = np.asarray(beta, dtype=float)
    A, B, C = coefficient_arrays(model, index, np.broadcast_to(g, np.broadcast(g, b).shape))
    bb = np.broadcast_to(b, np.broadcast(g, b).shape).reshape(-1)
    s2 = np.sin(2.0 * bb)
    val = A * s2 + B * np.sin(4.0 * bb) + C * s2 * s2 + model.constant
    if val.size == 1 and np.ndim(g) == 0 and np.ndim(b) == 0:
        return float(val[0])
    return val.reshape(np.broadcast(g, b).shape)


def expectation_with_fields(model, index, angles):
    """<gamma, beta| H_P |gamma, beta> + constant for any model."""
    gamma, beta = _unpack_angles(angles)
    return _expectation(model, index, gamma, beta)


def expectation_field_free(model, index, angles):
    """Same value restricted to models without fields."""
    _require_field_free(model)
    gamma, beta = _unpack_angles(angles)
    return _expectation(model, index, gamma, beta)


def expectation(model, gamma, beta, index=None):
    """Convenience wrapper: builds the index when not supplied."""
    return _expectation(model, index, gamma, beta)


def correlators(model, index, angles):
    """(M_i, M_uv): <Z_i> per vertex and <Z_u Z_v> per stored edge at the given angles."""
    ix = _index_for(model, index)
    gamma, beta = _unpack_angles(angles)
    g = np.array([float(gamma)])
    _, eB, eC = _chunk_terms(ix, g)
    s2 = np.sin(2.0 * beta)
    # vertex_A carries the prefactor h_i; rebuild sin(g_i) * prod cos directly so h_i = 0 gives 0
    Pv = _to_product(ix.C_vertex @ _logcos_table(ix.unique_weights, g), 1)[:, 0]
    Mi = s2 * np.sin(2.0 * ix.h * gamma) * Pv
    Muv = (np.sin(4.0 * beta) * eB[:, 0] + s2 * s2 * eC[:, 0]) / ix.J if ix.m else np.zeros(0)
    return Mi, Muv
