"""Ising and QUBO models, their energy, transforms, random generators and file I/O.

Couplings are stored once per unordered pair ``u < v`` and hold the effective
coefficient of ``Z_u Z_v``, so that

    H(s) = sum_{u<v} J_uv s_u s_v + sum_i h_i s_i + constant.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from ._validation import check_count, check_finite, check_probability, check_spin_batch
from .exceptions import InputError, ParseError

MAX_SCALE = 10**6


def _readonly(a):
    a.setflags(write=False)
    return a


def _weight_scale(values):
    """Smallest positive integer s <= 1e6 making every value integral, else None."""
    scale = 1
    for v in np.unique(np.abs(values)):
        v = float(v)
        if v == 0.0 or v.is_integer():
            continue
        frac = Fraction(v).limit_denominator(MAX_SCALE)
        if float(frac) != v:
            return None
        scale = scale * frac.denominator // math.gcd(scale, frac.denominator)
        if scale > MAX_SCALE:
            return None
    return scale


class IsingModel:
    """Immutable weighted Ising model on vertices ``0..n-1``.

    Parameters
    ----------
    n : int
        Number of spins.
    couplings : dict or iterable of (u, v, J), optional
        Effective ZZ coefficients. Zero entries are dropped.
    fields : array-like of length n, optional
    constant : float
    """

    __slots__ = ("n", "edges", "weights", "fields", "constant", "scale", "_adj")

    def __init__(self, n, couplings=None, fields=None, constant=0.0):
        n = check_count(n, "n", minimum=1)
        items = couplings.items() if isinstance(couplings, dict) else (couplings or ())
        seen = {}
        for item in items:
            if isinstance(couplings, dict):
                (u, v), w = item
            else:
                u, v, w = item
            u, v = int(u), int(v)
            if u == v:
                raise InputError(f"self-loop on vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u}, {v}) out of range for n = {n}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise InputError(f"duplicate edge {key}")
            seen[key] = check_finite(w, "coupling")
        keys = sorted(k for k, w in seen.items() if w != 0.0)
        edges = np.array(keys, dtype=np.int64).reshape(-1, 2)
        weights = np.array([seen[k] for k in keys], dtype=float)
        if fields is None:
            h = np.zeros(n)
        else:
            h = np.array(fields, dtype=float).reshape(-1)
            if h.shape[0] != n:
                raise InputError(f"fields must have length {n}, got {h.shape[0]}")
            if not np.all(np.isfinite(h)):
                raise InputError("fields must be finite")
        self._set(n, edges, weights, h, check_finite(constant, "constant"))

    def _set(self, n, edges, weights, fields, constant):
        self.n = n
        self.edges = _readonly(edges)
        self.weights = _readonly(weights)
        self.fields = _readonly(fields + 0.0)
        self.constant = float(constant)
        self.scale = _weight_scale(np.concatenate([weights, fields]))
        self._adj = None

    @classmethod
    def from_arrays(cls, n, edges, weights, fields, constant=0.0):
        """Trusted fast path: ``edges`` sorted, ``u < v``, unique, nonzero weights."""
        obj = cls.__new__(cls)
        obj._set(int(n), np.asarray(edges, dtype=np.int64).reshape(-1, 2).copy(),
                 np.asarray(weights, dtype=float).copy(), np.asarray(fields, dtype=float).copy(),
                 float(constant))
        return obj

    # -- views -------------------------------------------------------------
    @property
    def num_edges(self):
        return len(self.weights)

    @property
    def couplings(self):
        return {(int(u), int(v)): float(w) for (u, v), w in zip(self.edges, self.weights)}

    @property
    def weight_class(self):
        return "real" if self.scale is None else "integer"

    @property
    def has_fields(self):
        return bool(np.any(self.fields != 0.0))

    @property
    def adjacency(self):
        """List of dicts: ``adjacency[i][k] = J_ik``."""
        if self._adj is None:
            adj = [dict() for _ in range(self.n)]
            for (u, v), w in zip(self.edges.tolist(), self.weights.tolist()):
                adj[u][v] = w
                adj[v][u] = w
            self._adj = adj
        return self._adj

    def degrees(self):
        return np.bincount(self.edges.ravel(), minlength=self.n)

    def coupling_matrix(self):
        """Dense symmetric matrix of effective coefficients (zero diagonal)."""
        J = np.zeros((self.n, self.n))
        if self.num_edges:
            J[self.edges[:, 0], self.edges[:, 1]] = self.weights
            J[self.edges[:, 1], self.edges[:, 0]] = self.weights
        return J

    def energy(self, s):
        return energy(self, s)

    def to_dict(self):
        return {
            "n": self.n,
            "fields": [float(x) for x in self.fields],
            "edges": [[int(u), int(v), float(w)] for (u, v), w in zip(self.edges, self.weights)],
            "constant": self.constant,
            "weight_class": self.weight_class,
            "scale": self.scale,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["n"], [tuple(e) for e in d["edges"]], d["fields"], d.get("constant", 0.0))

    def __eq__(self, other):
        if not isinstance(other, IsingModel):
            return NotImplemented
        return (self.n == other.n and self.constant == other.constant
                and np.array_equal(self.edges, other.edges)
                and np.array_equal(self.weights, other.weights)
                and np.array_equal(self.fields, other.fields))

    def __hash__(self):
        return hash((self.n, self.constant, self.edges.tobytes(), self.weights.tobytes(),
                     self.fields.tobytes()))

    def __repr__(self):
        return (f"IsingModel(n={self.n}, edges={self.num_edges}, "
                f"fields={'yes' if self.has_fields else 'no'}, constant={self.constant:g}, "
                f"weight_class={self.weight_class})")


@dataclass(frozen=True)
class QuboModel:
    """f(x) = x^T A x + b^T x over x in {0,1}^n, A symmetric."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        b = np.array(self.b, dtype=float).reshape(-1)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] != b.shape[0]:
            raise InputError("A must be n x n and b of length n")
        if not np.array_equal(A, A.T):
            raise InputError("QUBO matrix A must be symmetric")
        object.__setattr__(self, "A", _readonly(A))
        object.__setattr__(self, "b", _readonly(b))

    @property
    def n(self):
        return self.b.shape[0]

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return np.einsum("...i,ij,...j->...", x, self.A, x) + x @ self.b


def energy(model, s):
    """Energy including the constant. ``s`` may be one assignment or a (k, n) batch."""
    s = check_spin_batch(s, model.n).astype(float)
    u, v = model.edges[:, 0], model.edges[:, 1]
    zz = (s[..., u] * s[..., v]) @ model.weights
    out = zz + s @ model.fields + model.constant
    return float(out) if np.ndim(out) == 0 else out


def from_qubo(q: QuboModel) -> IsingModel:
    """Ising model with f(x) = energy(model, 2x - 1) for every binary x.

    Substituting x = (s + 1)/2: each pair u < v gets effective coefficient
    (A_uv + A_vu)/4, each field is (2 b_j + sum_k (A_jk + A_kj))/4 and the
    constant collects sum(A)/4 + trace(A)/4 + sum(b)/2.
    """
    if not isinstance(q, QuboModel):
        q = QuboModel(*q)
    A, b = q.A, q.b
    n = q.n
    iu, ju = np.triu_indices(n, k=1)
    w = (A[iu, ju] + A[ju, iu]) / 4.0
    keep = w != 0.0
    h = (2.0 * b + A.sum(axis=1) + A.sum(axis=0)) / 4.0
    const = A.sum() / 4.0 + np.trace(A) / 4.0 + b.sum() / 2.0
    edges = np.stack([iu[keep], ju[keep]], axis=1)
    return IsingModel.from_arrays(n, edges, w[keep], h, const)


def to_qubo(model: IsingModel):
    """Inverse map. Returns (QuboModel, offset) with energy(s) = f((s+1)/2) + offset."""
    n = model.n
    J = model.coupling_matrix()
    # s = 2x - 1: J s_u s_v = J (4 x_u x_v - 2 x_u - 2 x_v + 1)
    A = 2.0 * J
    b = 2.0 * model.fields - 2.0 * J.sum(axis=1)
    offset = model.weights.sum() - model.fields.sum() + model.constant
    return QuboModel(A, b), float(offset)


def eliminate_fields(model: IsingModel) -> IsingModel:
    """Fold fields into couplings with an ancilla spin ``n`` meant to be fixed at +1."""
    if not model.has_fields:
        return model
    n = model.n
    nz = np.flatnonzero(model.fields)
    edges = np.concatenate([model.edges, np.stack([nz, np.full(nz.size, n)], axis=1)])
    weights = np.concatenate([model.weights, model.fields[nz]])
    order = np.lexsort((edges[:, 1], edges[:, 0]))
    return IsingModel.from_arrays(n + 1, edges[order], weights[order], np.zeros(n + 1),
                                  model.constant)


# -- random instances ---------------------------------------------------------

@dataclass(frozen=True)
class WeightDist:
    """Nonzero integer weight distribution.

    ``kind`` is one of ``gaussian_rounded`` (params mean, variance),
    ``uniform_int`` (params lo, hi inclusive) or ``pm_one``.
    """

    kind: str
    params: tuple = ()

    def __post_init__(self):
        if self.kind == "gaussian_rounded":
            mean, var = self.params
            if var < 0:
                raise InputError("variance must be non-negative")
            if var == 0 and round(mean) == 0:
                raise InputError("distribution only produces zeros")
        elif self.kind == "uniform_int":
            lo, hi = self.params
            if lo > hi or lo == hi == 0:
                raise InputError(f"bad uniform_int range [{lo}, {hi}]")
        elif self.kind != "pm_one":
            raise InputError(f"unknown weight distribution {self.kind!r}")

    @classmethod
    def parse(cls, text):
        """Parse ``gaussian:MEAN,VAR``, ``uniform:LO,HI`` or ``pm1``."""
        text = text.strip().lower()
        if text in ("pm1", "pm_one", "pm-one", "+-1"):
            return cls("pm_one")
        m = re.fullmatch(r"(gaussian|normal|uniform)\s*[:(]\s*([^,]+),([^)]+)\)?", text)
        if not m:
            raise InputError(f"cannot parse weight distribution {text!r}")
        a, b = float(m.group(2)), float(m.group(3))
        if m.group(1) == "uniform":
            return cls("uniform_int", (int(a), int(b)))
        return cls("gaussian_rounded", (a, b))

    def _draw(self, rng, size):
        if self.kind == "gaussian_rounded":
            mean, var = self.params
            return np.rint(rng.normal(mean, math.sqrt(var), size))
        if self.kind == "uniform_int":
            lo, hi = self.params
            return rng.integers(lo, hi + 1, size).astype(float)
        return rng.choice(np.array([-1.0, 1.0]), size)

    def sample(self, rng, size):
        out = self._draw(rng, size)
        zero = out == 0
        while np.any(zero):
            out[zero] = self._draw(rng, int(zero.sum()))
            zero = out == 0
        return out

    def __str__(self):
        if self.kind == "pm_one":
            return "pm1"
        name = "gaussian" if self.kind == "gaussian_rounded" else "uniform"
        return f"{name}:{self.params[0]:g},{self.params[1]:g}"


def _as_dist(d):
    if d is None or isinstance(d, WeightDist):
        return d
    return WeightDist.parse(d)


def _with_fields(rng, n, field_dist):
    if field_dist is None:
        return np.zeros(n)
    return field_dist.sample(rng, n)


def generate_erdos_renyi(n, p, weight_dist="pm1", seed=None, field_dist=None):
    """G(n, p) with i.i.d. nonzero weights; optional i.i.d. nonzero fields."""
    n = check_count(n, "n", minimum=1)
    p = check_probability(p)
    weight_dist, field_dist = _as_dist(weight_dist), _as_dist(field_dist)
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    edges = np.stack([iu[keep], ju[keep]], axis=1)
    weights = weight_dist.sample(rng, int(keep.sum()))
    fields = _with_fields(rng, n, field_dist)
    return IsingModel.from_arrays(n, edges, weights, fields)


def _pairing(n, D, rng, max_tries=1000):
    stubs = np.repeat(np.arange(n), D)
    for _ in range(max_tries):
        pairs = rng.permutation(stubs).reshape(-1, 2)
        pairs.sort(axis=1)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        keys = pairs[:, 0] * n + pairs[:, 1]
        if np.unique(keys).size != keys.size:
            continue
        return pairs[np.argsort(keys)]
    raise InputError(f"no simple {D}-regular graph on {n} vertices after {max_tries} attempts")


def generate_d_regular(n, D, weight_dist="pm1", seed=None, field_dist=None):
    """Random simple D-regular graph from the configuration model with rejection."""
    n = check_count(n, "n", minimum=1)
    D = check_count(D, "D")
    if D >= n or (n * D) % 2:
        raise InputError(f"no {D}-regular graph on {n} vertices (need D < n, n*D even)")
    weight_dist, field_dist = _as_dist(weight_dist), _as_dist(field_dist)
    rng = np.random.default_rng(seed)
    edges = _pairing(n, D, rng) if D else np.zeros((0, 2), dtype=np.int64)
    weights = weight_dist.sample(rng, len(edges))
    fields = _with_fields(rng, n, field_dist)
    return IsingModel.from_arrays(n, edges, weights, fields)


def generate_bipartite_regular(n, D, weight_dist="pm1", seed=None):
    """Triangle-free D-regular graph: a randomly relabelled bipartite circulant.

    Side sizes are n/2; left i joins right (i + k) mod n/2 for k < D.
    """
    n = check_count(n, "n", minimum=2)
    D = check_count(D, "D")
    half = n // 2
    if n % 2 or D > half:
        raise InputError(f"bipartite {D}-regular graph needs even n >= 2D, got n = {n}")
    weight_dist = _as_dist(weight_dist)
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    left = np.repeat(np.arange(half), D)
    right = half + (left + np.tile(np.arange(D), half)) % half
    a, b = perm[left], perm[right]
    edges = np.stack([np.minimum(a, b), np.maximum(a, b)], axis=1)
    edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]
    weights = weight_dist.sample(rng, len(edges))
    return IsingModel.from_arrays(n, edges, weights, np.zeros(n))


# -- text format ---------------------------------------------------------------

def _fmt(x):
    x = float(x)
    if x.is_integer() and abs(x) < 2**53:
        return str(int(x))
    return repr(x)


def model_to_text(model: IsingModel) -> str:
    lines = [f"ising {model.n}"]
    for i, h in enumerate(model.fields):
        if h != 0.0:
            lines.append(f"node {i} {_fmt(h)}")
    for (u, v), w in zip(model.edges, model.weights):
        lines.append(f"edge {u} {v} {_fmt(w)}")
    if model.constant != 0.0:
        lines.append(f"constant {_fmt(model.constant)}")
    return "\n".join(lines) + "\n"


def _number(tok, lineno, cast=float):
    try:
        val = cast(tok)
    except ValueError:
        raise ParseError(f"bad number {tok!r}", lineno) from None
    if cast is float and not math.isfinite(val):
        raise ParseError(f"non-finite number {tok!r}", lineno)
    return val


def model_from_text(text: str) -> IsingModel:
    n = None
    fields = {}
    couplings = {}
    constant = 0.0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        key = tok[0].lower()
        if n is None:
            if key != "ising" or len(tok) != 2:
                raise ParseError("expected header 'ising <n>'", lineno)
            n = _number(tok[1], lineno, int)
            if n < 1:
                raise ParseError("vertex count must be positive", lineno)
            continue
        if key == "node" and len(tok) == 3:
            i = _number(tok[1], lineno, int)
            if not 0 <= i < n:
                raise ParseError(f"vertex {i} out of range", lineno)
            if i in fields:
                raise ParseError(f"duplicate node {i}", lineno)
            fields[i] = _number(tok[2], lineno)
        elif key == "edge" and len(tok) == 4:
            u, v = _number(tok[1], lineno, int), _number(tok[2], lineno, int)
            if u == v:
                raise ParseError(f"self-loop on vertex {u}", lineno)
            if not (0 <= u < n and 0 <= v < n):
                raise ParseError(f"vertex out of range in edge ({u}, {v})", lineno)
            k = (min(u, v), max(u, v))
            if k in couplings:
                raise ParseError(f"duplicate edge {k}", lineno)
            couplings[k] = _number(tok[3], lineno)
        elif key == "constant" and len(tok) == 2:
            constant = _number(tok[1], lineno)
        elif key == "ising":
            raise ParseError("repeated header", lineno)
        else:
            raise ParseError(f"malformed line {raw.strip()!r}", lineno)
    if n is None:
        raise ParseError("missing header 'ising <n>'", 1)
    h = np.zeros(n)
    for i, val in fields.items():
        h[i] = val
    return IsingModel(n, couplings, h, constant)


def save_model(model: IsingModel, path) -> None:
    Path(path).write_text(model_to_text(model), encoding="utf-8")


def load_model(path) -> IsingModel:
    return model_from_text(Path(path).read_text(encoding="utf-8"))
