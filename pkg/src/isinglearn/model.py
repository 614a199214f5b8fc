"""Zero-field Ising models on sparse graphs.

A model on p spins assigns a coupling theta_ij to each edge of an
undirected graph on vertices 0..p-1; the probability of a configuration
sigma in {-1,+1}^p is proportional to exp(sum_{(i,j)} theta_ij sigma_i
sigma_j). Edges are stored canonically with i < j and a missing edge
means a zero coupling.

Exact quantities (partition function, probabilities, the full
distribution) enumerate all 2**p configurations and are guarded by
ENUMERATION_LIMIT. Configuration index k encodes spins little-endian:
spin i of configuration k is +1 iff bit i of k is set.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapabilityError, InputError

ENUMERATION_LIMIT = 25

_ENUM_CHUNK = 1 << 20


def _canonical_couplings(couplings):
    out = {}
    for key, theta in couplings.items():
        i, j = key
        if not (isinstance(i, (int, np.integer)) and isinstance(j, (int, np.integer))):
            raise InputError(f"edge endpoints must be integers, got {key!r}")
        i, j = int(i), int(j)
        if i == j:
            raise InputError(f"self-loop ({i}, {j}) is not allowed")
        if i > j:
            i, j = j, i
        theta = float(theta)
        if not math.isfinite(theta):
            raise InputError(f"coupling for edge ({i}, {j}) must be finite")
        if theta == 0.0:
            raise InputError(f"coupling for edge ({i}, {j}) must be nonzero")
        if (i, j) in out:
            raise InputError(f"duplicate edge ({i}, {j})")
        out[(i, j)] = theta
    return out


@dataclass(frozen=True)
class IsingModel:
    """Vertex count plus a map from canonical edges (i, j), i < j, to
    nonzero coupling values. Treat instances as immutable."""

    p: int
    couplings: dict[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or self.p < 1:
            raise InputError(f"p must be a positive integer, got {self.p!r}")
        object.__setattr__(self, "p", int(self.p))
        canon = _canonical_couplings(self.couplings)
        for i, j in canon:
            if j >= self.p or i < 0:
                raise InputError(f"edge ({i}, {j}) out of range for p={self.p}")
        object.__setattr__(self, "couplings", canon)

    @property
    def edges(self) -> list[tuple[int, int]]:
        """Canonical edges in lexicographic order."""
        return sorted(self.couplings)

    def neighbors(self, u: int) -> list[int]:
        self._check_vertex(u)
        out = []
        for i, j in self.couplings:
            if i == u:
                out.append(j)
            elif j == u:
                out.append(i)
        return sorted(out)

    def degree(self, u: int) -> int:
        return len(self.neighbors(u))

    @property
    def max_degree(self) -> int:
        counts = [0] * self.p
        for i, j in self.couplings:
            counts[i] += 1
            counts[j] += 1
        return max(counts) if counts else 0

    @property
    def min_coupling(self) -> float:
        """Smallest coupling magnitude over present edges."""
        if not self.couplings:
            raise InputError("model has no edges")
        return min(abs(t) for t in self.couplings.values())

    @property
    def max_coupling(self) -> float:
        """Largest coupling magnitude over present edges."""
        if not self.couplings:
            raise InputError("model has no edges")
        return max(abs(t) for t in self.couplings.values())

    def coupling_row(self, u: int) -> np.ndarray:
        """Couplings of u to every other vertex, indexed by the ascending
        list of vertices != u (zeros where no edge)."""
        self._check_vertex(u)
        row = np.zeros(self.p - 1)
        for (i, j), theta in self.couplings.items():
            if i == u:
                row[j - (j > u)] = theta
            elif j == u:
                row[i - (i > u)] = theta
        return row

    def _check_vertex(self, u):
        if not (0 <= u < self.p):
            raise InputError(f"vertex {u} out of range for p={self.p}")


def beta_d(model: IsingModel) -> float:
    """Width parameter times max degree; 0 for edgeless models."""
    if not model.couplings:
        return 0.0
    return model.max_coupling * model.max_degree


def validate_configuration(spins, p: int) -> np.ndarray:
    """Check a length-p array of -1/+1 entries and return it as int8."""
    arr = np.asarray(spins)
    if arr.shape != (p,):
        raise InputError(f"expected configuration of shape ({p},), got {arr.shape}")
    if not np.all(np.abs(arr) == 1):
        raise InputError("configuration entries must be -1 or +1")
    return arr.astype(np.int8)


def energy_exponent(model: IsingModel, spins) -> float:
    """The exponent sum_{(i,j) in E} theta_ij sigma_i sigma_j."""
    arr = validate_configuration(spins, model.p)
    total = 0.0
    for (i, j), theta in model.couplings.items():
        total += theta * float(arr[i]) * float(arr[j])
    return total


def _check_enumeration(p: int):
    if p > ENUMERATION_LIMIT:
        raise CapabilityError(
            f"exact enumeration supports p <= {ENUMERATION_LIMIT}, got p={p}"
        )


def configurations_from_indices(indices, p: int) -> np.ndarray:
    """Decode configuration indices to an (m, p) int8 array of spins."""
    idx = np.asarray(indices, dtype=np.uint64)
    shifts = np.arange(p, dtype=np.uint64)
    bits = (idx[:, None] >> shifts[None, :]) & np.uint64(1)
    return (2 * bits.astype(np.int8) - 1).astype(np.int8)


def _exponents_for_indices(model: IsingModel, idx: np.ndarray) -> np.ndarray:
    acc = np.zeros(idx.shape[0])
    for (i, j), theta in model.couplings.items():
        differ = ((idx >> np.uint64(i)) ^ (idx >> np.uint64(j))) & np.uint64(1)
        acc += theta * (1.0 - 2.0 * differ.astype(np.float64))
    return acc


def enumerate_exponents(model: IsingModel) -> np.ndarray:
    """Energy exponent of every configuration, indexed 0..2**p-1."""
    _check_enumeration(model.p)
    total = 1 << model.p
    out = np.empty(total)
    for start in range(0, total, _ENUM_CHUNK):
        stop = min(start + _ENUM_CHUNK, total)
        idx = np.arange(start, stop, dtype=np.uint64)
        out[start:stop] = _exponents_for_indices(model, idx)
    return out


def log_partition(model: IsingModel) -> float:
    """Log of the normalizing constant, streamed over configuration
    chunks with a running max-shift so no chunk overflows."""
    _check_enumeration(model.p)
    total = 1 << model.p
    running_max = -np.inf
    running_sum = 0.0
    for start in range(0, total, _ENUM_CHUNK):
        stop = min(start + _ENUM_CHUNK, total)
        idx = np.arange(start, stop, dtype=np.uint64)
        chunk = _exponents_for_indices(model, idx)
        m = float(chunk.max())
        s = float(np.sum(np.exp(chunk - m)))
        if m <= running_max:
            running_sum += s * math.exp(m - running_max)
        else:
            running_sum = running_sum * math.exp(running_max - m) + s
            running_max = m
    return running_max + math.log(running_sum)


def exact_probability(model: IsingModel, spins, *, log_z: float | None = None) -> float:
    """Probability of one configuration; pass a precomputed log_partition
    via log_z when evaluating many configurations of the same model."""
    e = energy_exponent(model, spins)
    if log_z is None:
        log_z = log_partition(model)
    return math.exp(e - log_z)


def exact_distribution(model: IsingModel) -> np.ndarray:
    """Probabilities of all 2**p configurations (index = bit encoding)."""
    exponents = enumerate_exponents(model)
    m = exponents.max()
    weights = np.exp(exponents - m)
    return weights / weights.sum()


def make_grid_model(side: int, beta: float, kind: str = "ferromagnet",
                    seed: int | None = None) -> IsingModel:
    """Two-dimensional periodic grid (torus) with p = side**2 spins.

    Vertex (r, c) gets index r*side + c; each vertex is bonded to its
    right and down neighbors modulo side. For side = 2 the wraparound
    duplicates collapse, leaving degree 2; side >= 3 gives degree 4.

    kind "ferromagnet" sets every coupling to +beta; "spin_glass" draws
    an independent uniform sign per canonical edge (reproducible per
    seed, signs assigned in lexicographic edge order).
    """
    if side < 2:
        raise InputError(f"grid side must be >= 2, got {side}")
    if beta <= 0:
        raise InputError(f"coupling magnitude must be positive, got {beta}")
    if kind not in ("ferromagnet", "spin_glass"):
        raise InputError(f"unknown coupling kind {kind!r}")
    p = side * side
    edges = set()
    for r in range(side):
        for c in range(side):
            u = r * side + c
            for v in (r * side + (c + 1) % side, ((r + 1) % side) * side + c):
                if u != v:
                    edges.add((min(u, v), max(u, v)))
    ordered = sorted(edges)
    if kind == "ferromagnet":
        couplings = {e: beta for e in ordered}
    else:
        if seed is None:
            raise InputError("spin_glass grids need a seed for the sign draw")
        rng = np.random.default_rng(seed)
        signs = rng.integers(0, 2, size=len(ordered)) * 2 - 1
        couplings = {e: float(s) * beta for e, s in zip(ordered, signs)}
    return IsingModel(p, couplings)


def make_random_model(p: int, edge_probability: float, alpha: float,
                      beta: float, seed: int) -> IsingModel:
    """Random test model: each pair i < j (lexicographic order) is an
    edge with the given probability, coupling magnitude uniform on
    [alpha, beta], sign uniform."""
    if p < 2:
        raise InputError(f"p must be >= 2, got {p}")
    if not 0.0 <= edge_probability <= 1.0:
        raise InputError("edge_probability must lie in [0, 1]")
    if not 0.0 < alpha <= beta:
        raise InputError("need 0 < alpha <= beta")
    rng = np.random.default_rng(seed)
    couplings = {}
    for i in range(p):
        for j in range(i + 1, p):
            if rng.random() < edge_probability:
                magnitude = rng.uniform(alpha, beta)
                sign = 1.0 if rng.random() < 0.5 else -1.0
                couplings[(i, j)] = sign * magnitude
    return IsingModel(p, couplings)


def model_to_json(model: IsingModel) -> str:
    """Serialize to the interchange schema; couplings are written with
    17 significant digits so reloading is bit-exact."""
    parts = []
    for i, j in model.edges:
        theta = format(model.couplings[(i, j)], ".17g")
        parts.append('{"i": %d, "j": %d, "theta": %s}' % (i, j, theta))
    return '{"p": %d, "edges": [%s]}' % (model.p, ", ".join(parts))


def model_from_json(text: str) -> IsingModel:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed model JSON: {exc}") from exc
    if not isinstance(obj, dict) or "p" not in obj or "edges" not in obj:
        raise InputError('model JSON must be an object with "p" and "edges"')
    if not isinstance(obj["edges"], list):
        raise InputError('"edges" must be a list')
    couplings = {}
    for entry in obj["edges"]:
        if not isinstance(entry, dict) or set(entry) != {"i", "j", "theta"}:
            raise InputError(f"bad edge entry {entry!r}")
        key = (entry["i"], entry["j"])
        if key in couplings:
            raise InputError(f"duplicate edge {key} in model JSON")
        couplings[key] = entry["theta"]
    return IsingModel(obj["p"], couplings)


def save_model(model: IsingModel, path):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(model_to_json(model))
        fh.write("\n")


def load_model(path) -> IsingModel:
    with open(path, "r", encoding="ascii") as fh:
        return model_from_json(fh.read())
