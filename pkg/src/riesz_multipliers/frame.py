"""Direction-adapted orthonormal frames.

Given a unit direction xi, build the orthonormal basis whose first vector is
xi and whose remaining vectors come from Schmidt orthonormalization of the
canonical basis against it.  The resulting change-of-basis matrix R (columns
are the new basis vectors in canonical coordinates) satisfies the pair-sum
identity sum_{i>=2} R(p,i) R(q,i) = -xi_p xi_q + delta_pq that the component
formulas rest on, and is used by the rotated-frame cross-check evaluator.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import SizeCapError
from .special_functions import (
    double_factorial,
    kernel_moment,
    sphere_surface,
    wallis,
)

UNIT_TOL = 1e-12
DEGENERATE_TOL = 1e-10


def as_unit_vector(xi, tol: float = UNIT_TOL) -> np.ndarray:
    """Validate that xi is a unit vector and return it as a float array."""
    v = np.asarray(xi, dtype=float)
    if v.ndim != 1 or v.size < 2:
        raise ValueError(f"direction must be a vector of length >= 2, got shape {v.shape}")
    if abs(np.linalg.norm(v) - 1.0) > tol:
        raise ValueError(f"direction must be unit length within {tol}, got |xi|={np.linalg.norm(v)!r}")
    return v


@dataclass(frozen=True)
class BasisMatrix:
    """Orthonormal frame adapted to a direction.

    ``matrix[:, 0]`` is the direction itself; column k holds the k-th basis
    vector in canonical coordinates.  ``pivot`` records the coordinate
    permutation used by the degenerate-direction fallback (None for the plain
    construction, where the matrix is lower Hessenberg: column k is zero
    above row k-1).
    """

    n: int
    matrix: np.ndarray
    pivot: tuple[int, ...] | None = None

    @property
    def xi(self) -> np.ndarray:
        return self.matrix[:, 0]

    def orthonormality_defect(self) -> float:
        """max |R^T R - I|; also bounds the dual-pairing defect E_j . e_k - delta."""
        r = self.matrix
        return float(np.abs(r.T @ r - np.eye(self.n)).max())


def build_basis(xi) -> BasisMatrix:
    """Construct the xi-adapted orthonormal frame.

    Uses the closed-form Schmidt recurrence with the partial norms
    B(j) = sqrt(1 - xi_1^2 - ... - xi_j^2), B(0) = 1: column k (k >= 2) has
    entry B(k-1)/B(k-2) in row k-1 and -xi_{k-1} xi_j / (B(k-1) B(k-2)) in
    rows j >= k.  When some B(j) underflows (xi inside a coordinate
    subspace) the recurrence divides by ~0, so the coordinates are permuted
    to put the largest components last, the frame is built there, and the
    permutation is undone.
    """
    v = as_unit_vector(xi)
    n = v.size
    b = _partial_norms(v)
    if np.any(b[1:n] < DEGENERATE_TOL):
        order = tuple(int(i) for i in np.argsort(np.abs(v), kind="stable"))
        permuted = _schmidt_columns(v[list(order)])
        matrix = np.empty_like(permuted)
        matrix[list(order), :] = permuted
        return BasisMatrix(n=n, matrix=matrix, pivot=order)
    return BasisMatrix(n=n, matrix=_schmidt_columns(v))


def _partial_norms(v: np.ndarray) -> np.ndarray:
    # b[j] = B(j) = sqrt(sum of the squares BEYOND the first j coordinates);
    # the tail-sum form avoids the catastrophic cancellation of 1 - cumsum
    # when xi hugs a coordinate axis
    sq = v * v
    tails = np.concatenate([np.cumsum(sq[::-1])[::-1], [0.0]])
    return np.sqrt(tails)


def _schmidt_columns(v: np.ndarray) -> np.ndarray:
    n = v.size
    b = _partial_norms(v)
    r = np.zeros((n, n))
    r[:, 0] = v
    for k in range(2, n + 1):
        r[k - 2, k - 1] = b[k - 1] / b[k - 2]
        r[k - 1:, k - 1] = -v[k - 2] * v[k - 1:] / (b[k - 1] * b[k - 2])
    return r


def row_pair_sum(basis: BasisMatrix, p: int, q: int) -> float:
    """sum_{i=2..n} R(p,i) R(q,i), which equals -xi_p xi_q + delta_pq.

    Indices are 1-based.  The identity is a consequence of row
    orthonormality once the first column is xi; it is re-checked here and a
    violation (which would mean a corrupted frame) raises.
    """
    n = basis.n
    if not (1 <= p <= n and 1 <= q <= n):
        raise IndexError(f"indices must lie in 1..{n}, got p={p}, q={q}")
    r = basis.matrix
    value = float(r[p - 1, 1:] @ r[q - 1, 1:])
    xi = basis.xi
    expected = -xi[p - 1] * xi[q - 1] + (1.0 if p == q else 0.0)
    if abs(value - expected) > 1e-12:
        raise RuntimeError(
            f"pair-sum identity violated at (p={p}, q={q}): {value} vs {expected}")
    return value


def tprime_component(n: int, t: int, mults, kernel: str) -> float:
    """Closed-form component of the transform tensor in the xi-adapted frame.

    ``mults`` maps rotated coordinate index (1-based) to its multiplicity;
    index 1 is the direction axis.  Any coordinate >= 2 with odd multiplicity
    makes the component exactly zero, as does a first-coordinate multiplicity
    whose parity disagrees with the kernel.  Otherwise

        T' = G_a(t,n) * (S_{n-1} / int_0^pi sin^(n-2))
             * (n-3)!! / ((n-3+t-a)!!) * prod_{j>=2} (s(j)-1)!!

    with a the multiplicity of coordinate 1.
    """
    counts = dict(mults)
    a = counts.pop(1, 0)
    rest = list(counts.values())
    if a + sum(rest) != t:
        raise ValueError(f"multiplicities must sum to t={t}, got {a + sum(rest)}")
    if any(s % 2 for s in rest):
        return 0.0
    g = kernel_moment(a, t, n, kernel)
    if g == 0.0:
        return 0.0
    out = g * sphere_surface(n) / wallis(n - 2)
    out *= double_factorial(n - 3) / double_factorial(n - 3 + t - a)
    for s in rest:
        out *= double_factorial(s - 1)
    return out


def evaluate_component_rotated(spec, xi, max_terms: int = 200_000):
    """Cross-check evaluator: contract frame factors against rotated-frame components.

    Sums R(l, i1) R(m, i2) ... T'(i1, i2, ...) over the full index space, so
    the cost is n^t; intended for small instances (n <= 3, t <= 5) as an
    independent check of the direct and recursive evaluators.
    """
    from .multiplier import ComponentValue  # local import, avoids a cycle

    n, t = spec.n, spec.t
    if n ** t > max_terms:
        raise SizeCapError(
            f"rotated-frame contraction needs n^t = {n ** t} terms, cap is {max_terms}")
    v = np.asarray(xi, dtype=float)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise ValueError("direction must be nonzero")
    basis = build_basis(v / norm)
    r = basis.matrix
    coords = [c - 1 for c in spec.component]

    tprime_cache: dict[tuple, float] = {}
    total = 0.0
    for idx in itertools.product(range(n), repeat=t):
        counts: dict[int, int] = {}
        for i in idx:
            counts[i + 1] = counts.get(i + 1, 0) + 1
        key = (counts.get(1, 0),) + tuple(sorted(v for k, v in counts.items() if k != 1))
        if key not in tprime_cache:
            tprime_cache[key] = tprime_component(n, t, counts, spec.kernel)
        tp = tprime_cache[key]
        if tp == 0.0:
            continue
        weight = 1.0
        for pos, i in zip(coords, idx):
            weight *= r[pos, i]
        total += weight * tp
    return ComponentValue(value=total / sphere_surface(n), normalized=True)
