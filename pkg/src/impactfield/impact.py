"""Weight-matrix construction and total-impact computation.

The model: node states update as ``y = W y + z`` with an attenuation
gamma baked into ``W = gamma * A / rho(A)``, so the long-run total
impact of j on i is entry (i, j) of the propagator ``(I - W)^-1``.

Orientation: entry (i, j) of every matrix here concerns the influence of
j on i. Powers of W accumulate index walks from i to j along arc
direction, which is exactly the direction geodesic_distances counts, so
``hops[i, j]`` is the right exponent for entry (i, j).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.linalg
from scipy.sparse import csgraph

from .errors import (
    ConjugateClosureError,
    NegativeWeightsWarning,
    NormalizationError,
    SolverError,
    ValidationError,
)
from .graph import DistanceMatrix, Graph
from .spectral import DEFAULT_DENSE_THRESHOLD, ModeSet, spectral_radius

__all__ = [
    "WeightMatrix",
    "ImpactKind",
    "ImpactMatrix",
    "build_weight",
    "gamma_grid",
    "exact_propagator",
    "series_oracle",
    "series_terms_for_tolerance",
    "equilibrium_state",
    "approx_impact",
    "distance_factored_impact",
]

_RCOND_FLOOR = 1e-14


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    """Attenuated, radius-normalized adjacency ``W = gamma * B``.

    ``B = A / rho(A)`` has spectral radius 1, so ``rho(W) = gamma < 1``
    and the impact series converges.
    """

    n: int
    gamma: float
    rho: float
    B: np.ndarray
    W: np.ndarray


class ImpactKind(str, Enum):
    EXACT = "exact"
    SERIES_ORACLE = "series_oracle"
    APPROX = "approx"
    DISTANCE_FACTORED = "distance_factored"


@dataclass(frozen=True, eq=False)
class ImpactMatrix:
    """Total-impact values; entry (i, j) is the impact of j on i."""

    n: int
    values: np.ndarray
    kind: ImpactKind
    gamma: float
    order: int | None = None


def _is_acyclic(graph: Graph) -> bool:
    # no self-loops exist, so the digraph is acyclic exactly when every
    # strongly connected component is a single node
    n_components, _ = csgraph.connected_components(
        graph.structure_sparse(), directed=True, connection="strong"
    )
    return n_components == graph.n


def build_weight(
    graph: Graph,
    gamma: float,
    dense_threshold: int = DEFAULT_DENSE_THRESHOLD,
    rho: float | None = None,
) -> WeightMatrix:
    """Materialize ``W = gamma * A / rho(A)`` for a graph.

    The arc (i, j) of the input sets entry W[i, j]: whoever i points at
    impacts i. ``rho`` can be supplied when the spectral radius is
    already known (it does not depend on gamma).
    """
    if not 0.0 < gamma < 1.0:
        raise ValidationError("gamma must lie strictly inside (0, 1)")
    if graph.n == 0 or not graph.edges:
        raise NormalizationError("cannot normalize: graph has no edges (spectral radius 0)")
    if any(weight < 0.0 for _, _, weight in graph.edges):
        warnings.warn(
            "negative edge weights: no positivity guarantee for impact values",
            NegativeWeightsWarning,
            stacklevel=2,
        )
    if graph.directed and _is_acyclic(graph):
        # eigenvalue routines return noise for nilpotent matrices, so
        # catch the rho = 0 case structurally
        raise NormalizationError("cannot normalize: adjacency is nilpotent (acyclic digraph)")
    if rho is None:
        rho = spectral_radius(graph, dense_threshold=dense_threshold)
    if rho <= 0.0:
        raise NormalizationError(f"cannot normalize: spectral radius {rho!r}")
    b = graph.adjacency() / rho
    return WeightMatrix(n=graph.n, gamma=gamma, rho=rho, B=b, W=gamma * b)


def gamma_grid() -> list[float]:
    """The standard attenuation sweep 1 - 2**-k for k = 1..5."""
    return [1.0 - 2.0**-k for k in range(1, 6)]


def _factorize(weight: WeightMatrix):
    system = np.eye(weight.n) - weight.W
    try:
        lu, piv = scipy.linalg.lu_factor(system)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"(I - W) could not be factorized: {exc}") from exc
    gecon = scipy.linalg.get_lapack_funcs("gecon", (system,))
    rcond, info = gecon(lu, np.linalg.norm(system, 1), norm="1")
    if info != 0 or rcond < _RCOND_FLOOR:
        raise SolverError(
            f"(I - W) is numerically singular; reciprocal condition estimate {rcond:.3e}"
        )
    return lu, piv


def exact_propagator(weight: WeightMatrix) -> ImpactMatrix:
    """Exact total-impact matrix ``(I - W)^-1`` via a factorized solve."""
    lu, piv = _factorize(weight)
    values = scipy.linalg.lu_solve((lu, piv), np.eye(weight.n))
    return ImpactMatrix(n=weight.n, values=values, kind=ImpactKind.EXACT, gamma=weight.gamma)


def series_oracle(weight: WeightMatrix, terms: int) -> ImpactMatrix:
    """Truncated power series ``I + W + ... + W^terms``.

    Computed by iterated multiplication on purpose: this is the
    independent slow route used to cross-check the factorized solve.
    """
    if terms < 1:
        raise ValidationError("terms must be a positive integer")
    total = np.eye(weight.n) + weight.W
    power = weight.W.copy()
    for _ in range(1, terms):
        power = power @ weight.W
        total += power
    return ImpactMatrix(
        n=weight.n, values=total, kind=ImpactKind.SERIES_ORACLE, gamma=weight.gamma
    )


def series_terms_for_tolerance(gamma: float, tol: float = 1e-12) -> int:
    """Terms T making the geometric tail gamma^(T+1)/(1-gamma) <= tol."""
    if not 0.0 < gamma < 1.0:
        raise ValidationError("gamma must lie strictly inside (0, 1)")
    if tol <= 0.0:
        raise ValidationError("tol must be positive")
    return max(1, math.ceil(math.log(tol * (1.0 - gamma)) / math.log(gamma)))


def equilibrium_state(weight: WeightMatrix, z: np.ndarray) -> np.ndarray:
    """Fixed point of ``y = W y + z``, i.e. ``(I - W)^-1 z``."""
    z = np.asarray(z, dtype=float)
    if z.shape != (weight.n,):
        raise ValidationError(f"forcing vector must have shape ({weight.n},), got {z.shape}")
    if not np.all(np.isfinite(z)):
        raise ValidationError("forcing vector must be finite")
    lu, piv = _factorize(weight)
    return scipy.linalg.lu_solve((lu, piv), z)


def approx_impact(weight: WeightMatrix, modes: ModeSet, dist: DistanceMatrix) -> ImpactMatrix:
    """Spectral distance-decay approximation of the total-impact matrix.

    Entry (i, j) sums ``(gamma * lam)^d / (1 - gamma * lam) * s_i * s'_j``
    over the selected modes, with d the hop count from i to j. Pairs with
    no connecting path get 0, the limit value. The imaginary part left
    after summation must be negligible (the mode set is conjugate
    closed); it is dropped only after that check.
    """
    if modes.gamma != weight.gamma:
        raise ValidationError(
            f"mode set was built for gamma={modes.gamma!r}, weight matrix has {weight.gamma!r}"
        )
    if modes.receive_vectors.shape[0] != weight.n or dist.n != weight.n:
        raise ValidationError("mode set, weight matrix, and distances must agree on n")
    hops_safe = np.where(dist.reachable, dist.hops, 0)
    dmax = int(hops_safe.max(initial=0))
    exponents = np.arange(dmax + 1)
    accumulator = np.zeros((weight.n, weight.n), dtype=complex)
    for mode in range(modes.num_modes):
        table = modes.gains[mode] * np.power(weight.gamma * modes.eigenvalues[mode], exponents)
        accumulator += table[hops_safe] * np.outer(
            modes.receive_vectors[:, mode], modes.send_rows[mode, :]
        )
    accumulator[~dist.reachable] = 0.0
    residue = np.abs(accumulator.imag)
    allowed = 1e-10 * (1.0 + np.abs(accumulator.real))
    if np.any(residue > allowed):
        worst = float(np.max(residue - allowed))
        raise ConjugateClosureError(
            f"imaginary residue exceeds tolerance by up to {worst:.3e}; "
            "the mode set is not conjugate closed"
        )
    values = np.ascontiguousarray(accumulator.real)
    return ImpactMatrix(
        n=weight.n, values=values, kind=ImpactKind.APPROX, gamma=weight.gamma, order=modes.order
    )


def distance_factored_impact(weight: WeightMatrix, dist: DistanceMatrix) -> ImpactMatrix:
    """Exact propagator recomputed through its distance factorization.

    For a pair at hop distance d the propagator entry equals
    ``gamma^d * (B^d (I - W)^-1)[i, j]``; walks shorter than the geodesic
    do not exist, so the factorization is an identity, not an
    approximation. Serves as a structural self-check of exact_propagator.
    """
    if dist.n != weight.n:
        raise ValidationError("weight matrix and distances must agree on n")
    propagator = exact_propagator(weight).values
    out = np.zeros((weight.n, weight.n))
    hops_safe = np.where(dist.reachable, dist.hops, 0)
    dmax = int(hops_safe.max(initial=0))
    current = propagator
    scale = 1.0
    for d in range(dmax + 1):
        mask = dist.reachable & (dist.hops == d)
        out[mask] = scale * current[mask]
        if d < dmax:
            current = weight.B @ current
            scale *= weight.gamma
    return ImpactMatrix(
        n=weight.n, values=out, kind=ImpactKind.DISTANCE_FACTORED, gamma=weight.gamma
    )
