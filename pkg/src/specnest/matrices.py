"""Dense complex matrix foundation.

Normalized traces, singular value step functions, distribution functions,
spectral nests of positive matrices, and Schur factorizations with a
caller-supplied ordering of the eigenvalues on the diagonal.
"""
from __future__ import annotations

import dataclasses
import math
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

# Acceptance tolerance for Hermitian / PSD inputs, relative to max(1, norm).
HERMITIAN_TOL = 1e-10

# Two eigenvalues closer than this (relative to the operator norm) are
# treated as one cluster with multiplicity.
CLUSTER_TOL = 1e-10


def as_operator(matrix) -> np.ndarray:
    """Validate and return a square complex matrix as a fresh complex128 array."""
    A = np.array(matrix, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A.real)) or not np.all(np.isfinite(A.imag)):
        raise ValueError("matrix entries must be finite")
    return A


def operator_norm(T) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(as_operator(T), 2))


def spectral_radius(T) -> float:
    eigs = np.linalg.eigvals(as_operator(T))
    return float(np.max(np.abs(eigs)))


def normalized_trace(T) -> complex:
    """Trace divided by dimension, so the identity has trace 1."""
    A = as_operator(T)
    return complex(np.trace(A) / A.shape[0])


def _check_hermitian(A: np.ndarray) -> None:
    gap = np.linalg.norm(A - A.conj().T, 2)
    if gap > HERMITIAN_TOL * max(1.0, np.linalg.norm(A, 2)):
        raise ValueError(f"matrix is not Hermitian within tolerance (gap {gap:.3e})")


def psd_eigenvalues(A) -> np.ndarray:
    """Eigenvalues of a Hermitian PSD matrix, descending, negatives clamped to 0.

    Rejects non-Hermitian input; eigenvalues below -HERMITIAN_TOL * norm are
    clamped rather than rejected, closing |T| = sqrt(T*T) under rounding.
    """
    A = as_operator(A)
    _check_hermitian(A)
    vals = np.linalg.eigvalsh(A)[::-1].copy()
    vals[vals < 0.0] = 0.0
    return vals


@dataclasses.dataclass(frozen=True)
class StepFunction:
    """Right-continuous decreasing step function on (0, 1).

    ``values[k]`` is the value on ``[breakpoints[k], breakpoints[k+1])``.
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if bp.ndim != 1 or vals.ndim != 1 or len(bp) != len(vals) + 1:
            raise ValueError("need len(breakpoints) == len(values) + 1")
        if bp[0] != 0.0 or bp[-1] != 1.0 or np.any(np.diff(bp) <= 0):
            raise ValueError("breakpoints must increase strictly from 0 to 1")
        if np.any(np.diff(vals) > 1e-12 * max(1.0, abs(vals[0]))) or np.any(vals < 0):
            raise ValueError("values must be nonnegative and weakly decreasing")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    def __call__(self, t: float) -> float:
        if not 0.0 <= t < 1.0:
            raise ValueError(f"t must lie in [0, 1), got {t}")
        k = int(np.searchsorted(self.breakpoints, t, side="right")) - 1
        return float(self.values[min(k, len(self.values) - 1)])


def singular_values(T) -> np.ndarray:
    """Singular values, descending."""
    return np.linalg.svd(as_operator(T), compute_uv=False)


def singular_value_function(T) -> StepFunction:
    """Decreasing rearrangement of the singular values as a step function.

    Takes the value of the k-th largest singular value on [(k-1)/n, k/n).
    """
    sv = singular_values(T)
    n = len(sv)
    return StepFunction(np.arange(n + 1) / n, sv)


def distribution_function(A, s: float) -> float:
    """Normalized count of eigenvalues of a PSD matrix strictly above s."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    vals = psd_eigenvalues(A)
    return float(np.count_nonzero(vals > s)) / len(vals)


@dataclasses.dataclass(frozen=True)
class ProjectionNest:
    """Increasing family of projections stored as a flag plus jump times.

    ``basis`` is unitary; the projection at time t is onto the span of the
    first ``rank_at(t)`` columns. ``jumps`` is a tuple of (t, rank) pairs with
    strictly increasing t and rank, starting at (0, 0) and ending with rank n;
    the family is right-continuous: rank_at(t) is the rank of the last jump
    with jump time <= t.
    """

    basis: np.ndarray
    jumps: tuple

    def __post_init__(self):
        U = as_operator(self.basis)
        n = U.shape[0]
        if np.linalg.norm(U.conj().T @ U - np.eye(n), 2) > 1e-10:
            raise ValueError("nest basis is not unitary")
        jumps = tuple((float(t), int(r)) for t, r in self.jumps)
        ts = [t for t, _ in jumps]
        ranks = [r for _, r in jumps]
        if jumps[0] != (0.0, 0) or ranks[-1] != n:
            raise ValueError("jumps must start at (0, 0) and end at full rank")
        if any(t2 <= t1 for t1, t2 in zip(ts, ts[1:])):
            raise ValueError("jump times must increase strictly")
        if any(r2 <= r1 for r1, r2 in zip(ranks, ranks[1:])):
            raise ValueError("jump ranks must increase strictly")
        if ts[-1] > 1.0:
            raise ValueError("jump times must lie in [0, 1]")
        object.__setattr__(self, "basis", U)
        object.__setattr__(self, "jumps", jumps)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def rank_at(self, t: float) -> int:
        rank = 0
        for tj, rj in self.jumps:
            if tj <= t:
                rank = rj
        return rank

    def projection_at(self, t: float) -> np.ndarray:
        k = self.rank_at(t)
        V = self.basis[:, :k]
        return V @ V.conj().T

    def increments(self) -> list:
        """List of (t, lo, hi): minimal jump increment spanning columns lo:hi."""
        out = []
        prev = 0
        for t, r in self.jumps[1:]:
            out.append((t, prev, r))
            prev = r
        return out

    def trace_at(self, t: float) -> float:
        return self.rank_at(t) / self.dim


def spectral_nest(A) -> ProjectionNest:
    """Nest of spectral projections of a PSD matrix, eigenvalues descending.

    Jumps sit at t = k/n, so that A = sum_k mu((k-1)/n, A) * (rank-1 increment).
    """
    A = as_operator(A)
    _check_hermitian(A)
    vals, vecs = np.linalg.eigh(A)
    order = np.argsort(-vals, kind="stable")
    n = A.shape[0]
    jumps = tuple((k / n, k) for k in range(n + 1))
    return ProjectionNest(vecs[:, order], jumps)


def cluster_eigenvalues(eigs: np.ndarray, tol: float) -> list:
    """Partition eigenvalues into clusters of pairwise distance <= tol (chained).

    Returns a list of index arrays. Union-find over all pairs; matrices here
    are small so the quadratic scan is fine.
    """
    n = len(eigs)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(eigs[i] - eigs[j]) <= tol:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [np.array(ix) for ix in groups.values()]


def _swap_adjacent(R: np.ndarray, U: np.ndarray, i: int) -> None:
    """Exchange the diagonal entries i, i+1 of a triangular R by a unitary.

    The 2x2 rotation maps the eigenvector of the trailing eigenvalue into the
    leading position; the similarity is exact for any a, b, c.
    """
    a, b, c = R[i, i], R[i, i + 1], R[i + 1, i + 1]
    v = np.array([b, c - a])
    nv = np.linalg.norm(v)
    if nv == 0.0:
        return  # diagonal block of a repeated eigenvalue; nothing to exchange
    v /= nv
    G = np.array([[v[0], -np.conj(v[1])], [v[1], np.conj(v[0])]])
    R[:, i : i + 2] = R[:, i : i + 2] @ G
    R[i : i + 2, :] = G.conj().T @ R[i : i + 2, :]
    R[i + 1, i] = 0.0
    U[:, i : i + 2] = U[:, i : i + 2] @ G


def ordered_schur(T, key: Callable[[complex], object]):
    """Schur factorization T = U R U* with diag(R) sorted by ``key``.

    Ties under the key are broken by (Re, Im) lexicographic order, then by the
    position in the unordered Schur form, which makes the flag deterministic.
    Reordering is done by sequences of adjacent diagonal exchanges.

    Returns (U, R, perm) where perm[k] is the position, in the unordered Schur
    diagonal, of the eigenvalue now at slot k.
    """
    T = as_operator(T)
    R, U = scipy.linalg.schur(T, output="complex")
    R = np.ascontiguousarray(R)
    U = np.ascontiguousarray(U)
    n = T.shape[0]
    diag = np.diag(R)
    sort_keys = {
        i: (key(complex(z)), float(z.real), float(z.imag), i)
        for i, z in enumerate(diag)
    }
    target = sorted(range(n), key=lambda i: sort_keys[i])
    labels = list(range(n))
    for k in range(n):
        j = labels.index(target[k])
        for pos in range(j, k, -1):
            _swap_adjacent(R, U, pos - 1)
            labels[pos - 1], labels[pos] = labels[pos], labels[pos - 1]
    resid = np.linalg.norm(T - U @ R @ U.conj().T, 2)
    if resid > 1e-9 * max(1.0, np.linalg.norm(T, 2)):
        raise ArithmeticError(
            f"Schur reordering lost accuracy (residual {resid:.3e})"
        )
    return U, R, np.array(labels)
