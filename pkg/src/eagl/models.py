"""Generators for the seven benchmark precision-matrix structures.

Each generator builds the raw matrix, shifts it onto the positive definite
cone where the construction does not guarantee it, then rescales to unit
diagonal. Given the same spec and seed the output is bit-reproducible; all
randomness comes from numpy's seeded PCG64 generator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .linalg import mvn_rows, sym_matrix

MODEL_IDS = (1, 2, 3, 4, 5, 6, 7)


@dataclass(frozen=True)
class ModelSpec:
    """Which structure to build, at what dimension, from which seed.

    The numeric fields carry the standard parameter values of each model and
    rarely need changing: band weights (models 1-2), the within-block decay
    base (model 3), the nonzero density (model 4), the edge probability and
    weight range (model 5), and the graph edge weight / diagonal slack used
    by the scale-free and hub models (6-7).
    """

    model_id: int
    p: int
    seed: int = 0
    band1: float = 0.45
    band2_first: float = 0.5
    band2_second: float = 0.35
    block_base: float = 0.6
    density: float = 0.5
    edge_prob: float = 0.05
    weight_low: float = 0.4
    weight_high: float = 0.8
    graph_weight: float = 0.3
    graph_slack: float = 0.1

    def __post_init__(self):
        if self.model_id not in MODEL_IDS:
            raise InputError(f"model_id must be in {MODEL_IDS}, got {self.model_id}")
        if self.p < 2:
            raise InputError(f"dimension must be at least 2, got {self.p}")
        if self.model_id == 3 and self.p % 4 != 0:
            raise InputError(f"model 3 needs p divisible by 4, got p={self.p}")
        if self.model_id == 7 and self.p % 20 != 0:
            raise InputError(f"model 7 needs p divisible by 20, got p={self.p}")
        if self.model_id == 6 and self.p < 3:
            raise InputError("model 6 needs p >= 3")


@dataclass(frozen=True)
class GroundTruth:
    """A standardized true precision matrix and its edge set (pairs i < j)."""

    omega: np.ndarray
    edge_set: frozenset[tuple[int, int]]
    spec: ModelSpec

    @property
    def edge_count(self) -> int:
        return len(self.edge_set)


def _standardize(theta: np.ndarray) -> np.ndarray:
    d = np.sqrt(np.diag(theta))
    out = theta / np.outer(d, d)
    np.fill_diagonal(out, 1.0)
    return out


def _shift_to_pd(theta: np.ndarray, slack: float) -> np.ndarray:
    lam_min = float(np.linalg.eigvalsh(theta)[0])
    out = theta.copy()
    out[np.diag_indices(theta.shape[0])] += abs(lam_min) + slack
    return out


def _edges_of(theta: np.ndarray) -> frozenset[tuple[int, int]]:
    i, j = np.nonzero(np.triu(theta, 1))
    return frozenset(zip(i.tolist(), j.tolist()))


def _band(p: int, offsets: dict[int, float]) -> np.ndarray:
    theta = np.eye(p)
    for off, value in offsets.items():
        idx = np.arange(p - off)
        theta[idx, idx + off] = value
        theta[idx + off, idx] = value
    return theta


def _block_ar(p: int, base: float) -> np.ndarray:
    size = p // 4
    theta = np.zeros((p, p))
    idx = np.arange(size)
    block = base ** np.abs(idx[:, None] - idx[None, :])
    for b in range(4):
        lo = b * size
        theta[lo : lo + size, lo : lo + size] = block
    return theta


def _random_dense(spec: ModelSpec, rng: np.random.Generator) -> np.ndarray:
    p = spec.p
    theta = np.zeros((p, p))
    iu = np.triu_indices(p, 1)
    mask = rng.random(iu[0].size) < spec.density
    values = rng.uniform(-1.0, 1.0, size=iu[0].size) * mask
    theta[iu] = values
    theta.T[iu] = values
    return _shift_to_pd(theta, 0.05)


def _erdos_renyi(spec: ModelSpec, rng: np.random.Generator) -> np.ndarray:
    p = spec.p
    theta = np.zeros((p, p))
    iu = np.triu_indices(p, 1)
    mask = rng.random(iu[0].size) < spec.edge_prob
    values = rng.uniform(spec.weight_low, spec.weight_high, size=iu[0].size) * mask
    theta[iu] = values
    theta.T[iu] = values
    return _shift_to_pd(theta, 0.05)


def _scale_free_adjacency(p: int, rng: np.random.Generator) -> np.ndarray:
    # Preferential attachment, one edge per arriving node (repeated-endpoint
    # pool sampling), then one extra uniformly chosen non-tree edge so the
    # edge count is exactly p.
    adjacency = np.zeros((p, p))
    pool = [0, 1]
    adjacency[0, 1] = adjacency[1, 0] = 1.0
    for node in range(2, p):
        anchor = pool[int(rng.integers(len(pool)))]
        adjacency[node, anchor] = adjacency[anchor, node] = 1.0
        pool.extend((node, anchor))
    while True:
        i = int(rng.integers(p))
        j = int(rng.integers(p))
        if i != j and adjacency[i, j] == 0.0:
            adjacency[i, j] = adjacency[j, i] = 1.0
            break
    return adjacency


def _hub_adjacency(p: int) -> np.ndarray:
    # Ten hub-led stars of p/20 nodes cover half the graph; the remaining
    # nodes attach to hubs round-robin, for exactly p - 10 edges in total.
    group = p // 20
    hubs = [k * group for k in range(10)]
    adjacency = np.zeros((p, p))
    for k, hub in enumerate(hubs):
        for member in range(hub + 1, hub + group):
            adjacency[hub, member] = adjacency[member, hub] = 1.0
    for offset, node in enumerate(range(10 * group, p)):
        hub = hubs[offset % 10]
        adjacency[hub, node] = adjacency[node, hub] = 1.0
    return adjacency


def _weighted_graph(adjacency: np.ndarray, spec: ModelSpec) -> np.ndarray:
    theta = spec.graph_weight * adjacency
    lam_min = float(np.linalg.eigvalsh(theta)[0])
    theta[np.diag_indices(theta.shape[0])] = abs(lam_min) + 0.1 + spec.graph_slack
    return theta


def generate_model(spec: ModelSpec) -> GroundTruth:
    """Build the standardized true precision matrix for one model spec."""
    rng = np.random.default_rng(spec.seed)
    if spec.model_id == 1:
        theta = _band(spec.p, {1: spec.band1})
    elif spec.model_id == 2:
        theta = _band(spec.p, {1: spec.band2_first, 2: spec.band2_second})
    elif spec.model_id == 3:
        theta = _block_ar(spec.p, spec.block_base)
    elif spec.model_id == 4:
        theta = _random_dense(spec, rng)
    elif spec.model_id == 5:
        theta = _erdos_renyi(spec, rng)
    elif spec.model_id == 6:
        theta = _weighted_graph(_scale_free_adjacency(spec.p, rng), spec)
    else:
        theta = _weighted_graph(_hub_adjacency(spec.p), spec)
    omega = sym_matrix(_standardize(theta), max_asymmetry=1e-12)
    return GroundTruth(omega=omega, edge_set=_edges_of(np.asarray(omega)), spec=spec)


def sample_mvn(truth, n: int, seed: int) -> np.ndarray:
    """Draw ``n`` rows from ``N(0, omega^{-1})`` for a truth or raw precision matrix."""
    if n < 1:
        raise InputError(f"sample size must be at least 1, got {n}")
    omega = getattr(truth, "omega", truth)
    return mvn_rows(np.asarray(omega, dtype=np.float64), n, np.random.default_rng(seed))
