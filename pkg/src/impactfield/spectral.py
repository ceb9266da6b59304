"""Eigenstructure of the (normalized) adjacency matrix.

Provides the spectral radius, full dense and truncated iterative
decompositions with matched left rows, and greedy mode selection with
conjugate closure so that truncated sums stay real.

Ordering convention: eigenvalues are sorted by nonincreasing modulus,
ties broken by descending real part and then descending imaginary part.
Right eigenvectors are unit 2-norm with their largest-magnitude entry
rotated onto the positive real axis; left rows are rescaled so that the
bilinear pairing ``left_row . right_column`` is 1 for every mode.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla

from .errors import (
    ConjugateClosureError,
    ConvergenceError,
    DefectivenessError,
    NegativeWeightsWarning,
    NoEdgesWarning,
    NormalizationError,
    ValidationError,
)
from .graph import Graph

__all__ = [
    "DEFAULT_DENSE_THRESHOLD",
    "SpectralDecomposition",
    "ModeSet",
    "spectral_radius",
    "decompose",
    "select_modes",
]

DEFAULT_DENSE_THRESHOLD = 2000

# |Im| above this marks an eigenvalue as genuinely complex; LAPACK emits
# exact conjugate pairs for real input, so there is no gray zone.
_PAIR_TOL = 1e-10
_MATCH_TOL = 1e-8
_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenpairs of a (normalized) adjacency matrix, canonically ordered.

    ``right_vectors`` holds one unit eigenvector per column and
    ``left_rows`` the matching left rows; for a full decomposition the
    left rows are the rows of the inverse eigenvector matrix, so
    ``left_rows @ right_vectors`` is the identity.
    """

    n: int
    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_rows: np.ndarray
    residual: float
    full: bool

    @property
    def num_modes(self) -> int:
        return len(self.eigenvalues)


@dataclass(frozen=True, eq=False)
class ModeSet:
    """Modes selected for a truncated impact approximation.

    ``gains`` holds ``1 / (1 - gamma * eigenvalue)`` per mode. The set is
    closed under complex conjugation, so summed contributions are real up
    to rounding; the realized mode count can exceed ``order`` by the
    conjugate partners that closure forced in.
    """

    eigenvalues: np.ndarray
    receive_vectors: np.ndarray
    send_rows: np.ndarray
    gains: np.ndarray
    order: int
    gamma: float

    @property
    def num_modes(self) -> int:
        return len(self.eigenvalues)


def _canonical_order(values: np.ndarray) -> np.ndarray:
    # Moduli equal in exact arithmetic come out of the solver a few ulps
    # apart; snap near-ties to a shared anchor so the declared tie-break
    # (real part, then imaginary part, both descending) actually decides.
    moduli = np.abs(values)
    snapped = np.empty_like(moduli)
    anchor = None
    for idx in np.argsort(-moduli, kind="stable"):
        if anchor is None or anchor - moduli[idx] > 1e-12 * max(1.0, anchor):
            anchor = moduli[idx]
        snapped[idx] = anchor
    # lexsort uses the last key as primary
    return np.lexsort((-values.imag, -values.real, -snapped))


def _canonicalize(values: np.ndarray, right: np.ndarray, left: np.ndarray) -> None:
    """Fix vector scale and phase in place, preserving left-right pairing."""
    for mode in range(len(values)):
        column = right[:, mode]
        pivot = column[int(np.argmax(np.abs(column)))]
        scale = np.linalg.norm(column) * (pivot / abs(pivot))
        right[:, mode] = column / scale
        left[mode, :] = left[mode, :] * scale


def _enforce_conjugate_symmetry(
    values: np.ndarray, right: np.ndarray, left: np.ndarray
) -> None:
    """Overwrite each conjugate partner with the exact conjugate, in place.

    Eigenvalues and right vectors of a real matrix come out of LAPACK in
    exact conjugate pairs, but the matched left rows pick up independent
    rounding (inversion for the dense route, a separate solver run for
    the iterative one). Downstream truncated sums rely on pair
    contributions cancelling exactly, so the partner is replaced rather
    than tolerated. Modes with a real eigenvalue are real in exact
    arithmetic (simple eigenvalue, real matrix) and get their spurious
    imaginary parts stripped for the same reason.
    """
    claimed = np.zeros(len(values), dtype=bool)
    for i in range(len(values)):
        if claimed[i]:
            continue
        if abs(values[i].imag) <= _PAIR_TOL:
            values[i] = values[i].real
            right[:, i] = right[:, i].real
            left[i, :] = left[i, :].real
            continue
        target = np.conj(values[i])
        gaps = np.abs(values - target)
        gaps[claimed] = np.inf
        gaps[i] = np.inf
        j = int(np.argmin(gaps))
        if gaps[j] > _MATCH_TOL * max(1.0, abs(values[i])):
            raise ConjugateClosureError(
                f"eigenvalue {values[i]!r} has no conjugate partner in the kept set"
            )
        claimed[i] = claimed[j] = True
        values[j] = target
        right[:, j] = np.conj(right[:, i])
        left[j, :] = np.conj(left[i, :])


def _is_conjugate_closed(values: np.ndarray) -> bool:
    for value in values:
        if abs(value.imag) <= _PAIR_TOL:
            continue
        target = np.conj(value)
        if not np.any(np.abs(values - target) <= _MATCH_TOL * max(1.0, abs(value))):
            return False
    return True


def _closed_prefix(values: np.ndarray, k: int) -> int:
    """Smallest prefix length >= k that does not split a conjugate pair."""
    keep = k
    while keep < len(values) and not _is_conjugate_closed(values[:keep]):
        keep += 1
    return keep


def _arpack_radius(graph: Graph) -> float:
    matrix = graph.adjacency_sparse()
    v0 = np.ones(graph.n) / np.sqrt(graph.n)
    try:
        if graph.directed:
            vals = spla.eigs(matrix, k=1, which="LM", v0=v0, tol=1e-10, return_eigenvectors=False)
        else:
            vals = spla.eigsh(matrix, k=1, which="LM", v0=v0, tol=1e-10, return_eigenvectors=False)
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceError(f"spectral radius estimation did not converge: {exc}") from exc
    return float(np.max(np.abs(vals)))


def spectral_radius(graph: Graph, dense_threshold: int = DEFAULT_DENSE_THRESHOLD) -> float:
    """Largest eigenvalue modulus of the weighted adjacency matrix.

    Uses an iterative estimate with a deterministic start vector and, for
    graphs at or below the dense threshold, cross-checks it against a
    full dense eigenvalue computation. An edgeless graph has radius 0.0,
    which downstream normalization must reject.
    """
    if graph.n == 0:
        raise ValidationError("spectral radius of an empty graph is undefined")
    if not graph.edges:
        warnings.warn(
            "graph has no edges; spectral radius is 0.0 and cannot normalize",
            NoEdgesWarning,
            stacklevel=2,
        )
        return 0.0
    iterative: float | None = None
    if graph.n > 2:
        try:
            iterative = _arpack_radius(graph)
        except ConvergenceError:
            # Dense path below settles it; above the threshold there is
            # nothing to fall back on.
            if graph.n > dense_threshold:
                raise
    if graph.n <= dense_threshold:
        dense = float(np.max(np.abs(np.linalg.eigvals(graph.adjacency()))))
        if iterative is not None and abs(iterative - dense) > _MATCH_TOL * max(1.0, dense):
            raise ConvergenceError(
                f"iterative radius {iterative!r} disagrees with dense value {dense!r}"
            )
        return dense
    assert iterative is not None
    return iterative


def _dense_eigenpairs(graph: Graph, b: np.ndarray):
    if graph.directed:
        values, right = np.linalg.eig(b)
        try:
            inverse = np.linalg.inv(right)
        except np.linalg.LinAlgError as exc:
            raise DefectivenessError(
                "eigenvector matrix is singular; the matrix appears defective"
            ) from exc
        # inv() does not fail on a numerically singular matrix, and its
        # left residual stays small even then; what a full decomposition
        # promises is reconstruction, so gate on that directly
        rebuilt_error = np.max(np.abs((right * values) @ inverse - b))
        if rebuilt_error > 1e-6:
            raise DefectivenessError(
                f"eigenbasis reconstruction is off by {rebuilt_error:.3e}; the matrix "
                "appears defective (pass k to keep only leading modes)"
            )
        order = _canonical_order(values)
        return values[order], right[:, order], inverse[order, :]
    values, right = np.linalg.eigh(b)
    order = _canonical_order(values.astype(complex))
    right = right[:, order].astype(complex)
    # orthonormal basis: the inverse is the plain transpose
    return values[order].astype(complex), right, right.T.copy()


def _pair_left_rows(vals_r, vecs_r, vals_l, vecs_l):
    """Assemble (values, right, left) from separately computed sides.

    Each kept right eigenpair is matched to the left candidate whose
    eigenvalue agrees and whose bilinear pairing with the right vector is
    largest in magnitude; the magnitude criterion disambiguates repeated
    eigenvalues (for instance identical values on disconnected
    components, where eigenvalue distance alone could cross-match). A
    one-sided member of a conjugate pair gets its partner synthesized by
    conjugation, which is an exact eigenpair because the matrix is real.
    """
    n = vecs_r.shape[0]
    modes = []
    available = list(range(len(vals_l)))
    for i, value in enumerate(vals_r):
        close = [
            j for j in available if abs(vals_l[j] - value) <= 1e-6 * max(1.0, abs(value))
        ]
        if not close:
            raise ConvergenceError(
                f"left spectrum does not match right spectrum near eigenvalue {value!r}"
            )
        best = max(close, key=lambda j: abs(vecs_l[:, j] @ vecs_r[:, i]))
        available.remove(best)
        modes.append((value, vecs_r[:, i].copy(), vecs_l[:, best].copy()))

    values_now = np.array([m[0] for m in modes])
    for value, s_vec, u_vec in list(modes):
        if abs(value.imag) <= _PAIR_TOL:
            continue
        target = np.conj(value)
        if np.any(np.abs(values_now - target) <= _MATCH_TOL * max(1.0, abs(value))):
            continue
        modes.append((target, np.conj(s_vec), np.conj(u_vec)))
        values_now = np.append(values_now, target)

    values = np.array([m[0] for m in modes])
    order = _canonical_order(values)
    values = values[order]
    right = np.column_stack([modes[i][1] for i in order])
    left = np.zeros((len(values), n), dtype=complex)
    for row, i in enumerate(order):
        u_vec = modes[i][2]
        pairing = u_vec @ right[:, row]
        if abs(pairing) < _PAIR_TOL * np.linalg.norm(u_vec) * np.linalg.norm(right[:, row]):
            raise DefectivenessError(
                f"left/right pairing vanishes near eigenvalue {values[row]!r}"
            )
        left[row, :] = u_vec / pairing
    return values, right, left


def _dense_topk_eigenpairs(b: np.ndarray, k: int):
    """Top-k eigenpairs of a dense nonsymmetric matrix via two-sided eig.

    Avoids inverting the full eigenvector matrix, which is singular
    whenever the transient (acyclic) part of the graph makes the zero
    eigenvalue defective; the leading modes themselves are unaffected by
    that defectiveness.
    """
    values, right = np.linalg.eig(b)
    order = _canonical_order(values)
    keep = _closed_prefix(values[order], k)
    kept = order[:keep]
    vals_l, vecs_l = np.linalg.eig(b.T)
    return _pair_left_rows(values[kept], right[:, kept], vals_l, vecs_l)


def _iterative_eigenpairs(graph: Graph, b_sparse, k: int):
    n = graph.n
    if k > n - 2:
        raise ValidationError(
            "iterative decomposition needs k <= n - 2; raise the dense threshold instead"
        )
    v0 = np.ones(n) / np.sqrt(n)
    request = min(k + 2, n - 2)
    try:
        if not graph.directed:
            vals, vecs = spla.eigsh(b_sparse, k=request, which="LM", v0=v0, tol=0)
            values = vals.astype(complex)
            order = _canonical_order(values)
            right = vecs[:, order].astype(complex)
            return values[order], right, right.T.copy()
        vals_r, vecs_r = spla.eigs(b_sparse, k=request, which="LM", v0=v0, tol=0)
        vals_l, vecs_l = spla.eigs(b_sparse.T.tocsr(), k=request, which="LM", v0=v0, tol=0)
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceError(f"iterative decomposition did not converge: {exc}") from exc
    return _pair_left_rows(vals_r, vecs_r, vals_l, vecs_l)


def decompose(
    graph: Graph,
    normalize: bool = True,
    k: int | None = None,
    dense_threshold: int = DEFAULT_DENSE_THRESHOLD,
) -> SpectralDecomposition:
    """Eigendecomposition of the adjacency, optionally radius-normalized.

    Parameters
    ----------
    graph : Graph
        Must have at least one edge.
    normalize : bool
        Decompose ``B = A / rho(A)`` instead of the raw adjacency.
    k : int or None
        Number of largest-modulus eigenpairs to keep; None keeps all n.
        The kept set never splits a conjugate pair, so the realized count
        can exceed k by one. A full directed decomposition (k None)
        requires a diagonalizable matrix; with k set, only the kept
        leading modes must be clean, so sparse digraphs whose transient
        part is defective at eigenvalue zero still decompose.
    dense_threshold : int
        At or below this size dense solvers back the result; above it an
        iterative solver computes k pairs and their matching left rows
        (k is then required).
    """
    if graph.n == 0 or not graph.edges:
        raise ValidationError("decomposition requires a graph with at least one edge")
    if k is not None:
        if k < 1:
            raise ValidationError("k must be a positive integer")
        if k > graph.n:
            raise ValidationError(f"k={k} exceeds the matrix dimension {graph.n}")
    if any(weight < 0.0 for _, _, weight in graph.edges):
        warnings.warn(
            "negative edge weights: no positivity guarantee for the principal mode",
            NegativeWeightsWarning,
            stacklevel=2,
        )

    rho = 1.0
    if normalize:
        rho = spectral_radius(graph, dense_threshold=dense_threshold)
        if rho == 0.0:
            raise NormalizationError("cannot normalize: spectral radius is zero")

    if graph.n <= dense_threshold:
        b = graph.adjacency() / rho
        if graph.directed and k is not None and k < graph.n:
            # two-sided route: a full inversion would fail on matrices
            # whose transient part is defective at eigenvalue zero
            values, right, left = _dense_topk_eigenpairs(b, k)
        else:
            values, right, left = _dense_eigenpairs(graph, b)
            if k is not None and k < len(values):
                keep = _closed_prefix(values, k)
                values = values[:keep]
                right = np.ascontiguousarray(right[:, :keep])
                left = np.ascontiguousarray(left[:keep, :])
        full = len(values) == graph.n
        apply = b.__matmul__
    else:
        if k is None:
            raise ValidationError(
                "full decomposition above the dense threshold is not supported; "
                "pass k or raise the threshold"
            )
        b_sparse = graph.adjacency_sparse() / rho
        values, right, left = _iterative_eigenpairs(graph, b_sparse, k)
        keep = _closed_prefix(values, min(k, len(values)))
        values = values[:keep]
        right = np.ascontiguousarray(right[:, :keep])
        left = np.ascontiguousarray(left[:keep, :])
        full = False
        apply = b_sparse.__matmul__

    _canonicalize(values, right, left)
    _enforce_conjugate_symmetry(values, right, left)

    pairing = np.einsum("ij,ji->i", left, right)
    if np.max(np.abs(pairing - 1.0)) > _MATCH_TOL:
        raise DefectivenessError(
            "left/right eigenvector pairing degenerates; matrix is near defective"
        )
    residual = float(
        max(
            np.linalg.norm(apply(right[:, mode]) - values[mode] * right[:, mode])
            for mode in range(len(values))
        )
    )
    if residual > _RESIDUAL_TOL:
        raise ConvergenceError(f"eigenpair residual {residual:.3e} exceeds {_RESIDUAL_TOL:.0e}")
    return SpectralDecomposition(
        n=graph.n,
        eigenvalues=values,
        right_vectors=right,
        left_rows=left,
        residual=residual,
        full=full,
    )


def select_modes(decomposition: SpectralDecomposition, gamma: float, order: int) -> ModeSet:
    """Greedy top-modulus mode choice, closed under complex conjugation.

    Whenever a selected eigenvalue has a nonzero imaginary part its
    conjugate partner is pulled in as well, so the realized mode count
    can exceed ``order``.
    """
    if not 0.0 < gamma < 1.0:
        raise ValidationError("gamma must lie strictly inside (0, 1)")
    if order < 1:
        raise ValidationError("order must be a positive integer")
    if order > decomposition.num_modes:
        raise ValidationError(
            f"order {order} exceeds the {decomposition.num_modes} available modes"
        )
    values = decomposition.eigenvalues
    selected = list(range(order))
    chosen = set(selected)
    cursor = 0
    while cursor < len(selected):
        index = selected[cursor]
        cursor += 1
        value = values[index]
        if abs(value.imag) <= _PAIR_TOL:
            continue
        target = np.conj(value)
        distances = np.abs(values - target)
        distances[index] = np.inf
        partner = int(np.argmin(distances))
        if distances[partner] > _MATCH_TOL * max(1.0, abs(value)):
            raise ValidationError(
                f"conjugate partner of eigenvalue {value!r} is not in the decomposition"
            )
        if partner not in chosen:
            chosen.add(partner)
            selected.append(partner)
    selected = sorted(selected)
    eigenvalues = values[selected]
    gains = 1.0 / (1.0 - gamma * eigenvalues)
    return ModeSet(
        eigenvalues=eigenvalues,
        receive_vectors=np.ascontiguousarray(decomposition.right_vectors[:, selected]),
        send_rows=np.ascontiguousarray(decomposition.left_rows[selected, :]),
        gains=gains,
        order=order,
        gamma=gamma,
    )
