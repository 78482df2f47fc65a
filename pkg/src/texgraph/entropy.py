"""Entropy-based graph indices over patch graphs and Dijkstra trees.

Three indices are provided, all reported in bits:

  IfV  Shannon entropy of the density induced by the per-vertex
       functional f(v_i) = exp(M * sum_j q^d(i,j))
  IfP  same with f(v_i) = exp(M * sum_j q^d(i,j) * d(i,j))
  IDE  entropy of the hop-distance class distribution over vertex pairs
       (unweighted graphs only)

The exponents routinely span ranges that overflow exp(), so entropies are
evaluated entirely in the shifted log domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .patchgraph import all_pairs_distances

INDEX_KINDS = ("IfV", "IfP", "IDE")

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class IndexKind:
    tag: str
    q: float = 0.1
    M: float | None = None  # None resolves to 1/(1-q)

    def __post_init__(self) -> None:
        if self.tag not in INDEX_KINDS:
            raise ValueError(f"unknown index kind {self.tag!r}; expected one of {INDEX_KINDS}")
        if self.tag != "IDE":
            if not 0.0 < self.q < 1.0:
                raise ValueError(f"q must lie in (0,1), got {self.q}")
            if self.M is not None and self.M <= 0:
                raise ValueError(f"M must be positive, got {self.M}")

    def resolved_m(self) -> float:
        # 1/(1-q) turns M*q^d into the infinite-horizon cumulative-sphere
        # coefficient sum_{e>=d} q^e, which pins the otherwise free constant
        return 1.0 / (1.0 - self.q) if self.M is None else self.M


def entropy_from_logdensity(a: np.ndarray) -> float:
    """Shannon entropy in bits of p_i proportional to exp(a_i)."""
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    if a.size < 1:
        raise ValueError("empty log-density")
    if a.size == 1:
        return 0.0
    shift = a.max()
    z = np.exp(a - shift)
    total = z.sum()
    log_total = shift + math.log(total)
    p = z / total
    h = (log_total - float(p @ a)) / _LN2
    return max(h, 0.0)


def _hop_matrix(g) -> np.ndarray:
    if getattr(g, "weighted", True):
        raise ValueError("IDE requires unweighted graph")
    return all_pairs_distances(g)


def mean_information_on_distances(g) -> float:
    """Entropy in bits of the distance-class distribution k_d / C(n,2).

    Defined for unweighted graphs/trees only; on weighted inputs nearly all
    realized distances are distinct and the measure degenerates, so they
    are rejected. Single-vertex graphs return 0 by convention.
    """
    D = _hop_matrix(g)
    n = len(D)
    if n == 1:
        return 0.0
    iu = np.triu_indices(n, 1)
    dvals = np.rint(D[iu]).astype(np.int64)
    counts = np.bincount(dvals)[1:]  # class d = 1 .. diameter
    counts = counts[counts > 0]
    total = n * (n - 1) // 2
    pk = counts / total
    return float(-(pk * np.log2(pk)).sum())


def dehmer_fv(g, q: float, M: float | None = None) -> np.ndarray:
    """Log-density a_i = M * sum_j q^d(i,j); the self term contributes M."""
    kind = IndexKind("IfV", q=q, M=M)
    D = all_pairs_distances(g)
    return kind.resolved_m() * np.power(q, D).sum(axis=1)


def dehmer_fp(g, q: float, M: float | None = None) -> np.ndarray:
    """Log-density a_i = M * sum_j q^d(i,j) * d(i,j); the self term is 0."""
    kind = IndexKind("IfP", q=q, M=M)
    D = all_pairs_distances(g)
    return kind.resolved_m() * (np.power(q, D) * D).sum(axis=1)


def evaluate_index(g, kind: IndexKind) -> float:
    """Evaluate one index on a PatchGraph or DijkstraTree, in bits."""
    if kind.tag == "IDE":
        return mean_information_on_distances(g)
    if kind.tag == "IfV":
        return entropy_from_logdensity(dehmer_fv(g, kind.q, kind.M))
    return entropy_from_logdensity(dehmer_fp(g, kind.q, kind.M))
