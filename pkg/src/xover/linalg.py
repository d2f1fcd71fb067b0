"""Dense symmetric linear algebra helpers.

Everything here operates on small dense matrices (order a few dozen at
most): spectral decomposition, Moore-Penrose inverses computed through
the spectrum, positive-semidefiniteness tests, and cycle analysis of
permutation matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Relative asymmetry allowed before a matrix is rejected as non-symmetric.
SYM_TOL = 1e-12

# Rank threshold: an eigenvalue counts as nonzero when its magnitude
# exceeds n * |lambda|_max * RANK_RTOL, with an absolute floor RANK_FLOOR.
RANK_RTOL = 1e-10
RANK_FLOOR = 1e-12


def symmetrize(m: np.ndarray) -> np.ndarray:
    """Return the symmetric average of ``m``.

    Raises ValueError if the asymmetry exceeds SYM_TOL relative to the
    largest entry, so genuinely non-symmetric input is rejected rather
    than silently averaged away.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m))))
    gap = float(np.max(np.abs(m - m.T)))
    if gap > SYM_TOL * scale:
        raise ValueError(f"matrix is not symmetric: max asymmetry {gap:.3e}")
    return (m + m.T) / 2.0


@dataclass(frozen=True)
class SpectralSummary:
    """Eigendecomposition of a symmetric matrix with rank bookkeeping.

    eigenvalues are ascending; eigenvectors are the matching orthonormal
    columns.  rank counts eigenvalues whose magnitude clears the
    threshold, and trace_mp is the trace of the Moore-Penrose inverse
    (sum of reciprocals over that nonzero spectrum).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    rank: int
    trace_mp: float
    threshold: float

    @property
    def nonzero(self) -> np.ndarray:
        return self.eigenvalues[np.abs(self.eigenvalues) > self.threshold]


def eigensym(m: np.ndarray) -> SpectralSummary:
    """Spectral decomposition of a symmetric matrix.

    The rank threshold is n * |lambda|_max * 1e-10 with an absolute
    floor of 1e-12, which separates structural zeros (row-sum null
    vectors) from genuinely small eigenvalues near disconnection.
    """
    m = symmetrize(m)
    n = m.shape[0]
    try:
        vals, vecs = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - eigh on finite input
        raise ArithmeticError(f"eigendecomposition failed to converge: {exc}") from exc
    lam_max = float(np.max(np.abs(vals))) if n else 0.0
    threshold = max(n * lam_max * RANK_RTOL, RANK_FLOOR)
    keep = np.abs(vals) > threshold
    rank = int(np.count_nonzero(keep))
    trace_mp = float(np.sum(1.0 / vals[keep])) if rank else 0.0
    return SpectralSummary(
        eigenvalues=vals,
        eigenvectors=vecs,
        rank=rank,
        trace_mp=trace_mp,
        threshold=threshold,
    )


def moore_penrose(m: np.ndarray) -> np.ndarray:
    """Moore-Penrose inverse of a symmetric matrix via spectral inversion."""
    s = eigensym(m)
    keep = np.abs(s.eigenvalues) > s.threshold
    inv = np.zeros_like(s.eigenvalues)
    inv[keep] = 1.0 / s.eigenvalues[keep]
    return symmetrize((s.eigenvectors * inv) @ s.eigenvectors.T)


def is_psd(m: np.ndarray, tol: float = 1e-9) -> bool:
    """True iff the smallest eigenvalue of symmetric ``m`` is >= -tol."""
    vals = np.linalg.eigvalsh(symmetrize(m))
    return bool(vals[0] >= -tol)


def cycle_type(perm_matrix: np.ndarray) -> list[int]:
    """Cycle lengths of a permutation matrix, longest first.

    The single-cycle test for an n x n input is ``cycle_type(p) == [n]``.
    Raises ValueError when the input is not a 0/1 matrix with exactly one
    1 in every row and column.
    """
    p = np.asarray(perm_matrix)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {p.shape}")
    n = p.shape[0]
    if not np.isin(p, (0, 1)).all():
        raise ValueError("not a permutation matrix: entries outside {0,1}")
    if not ((p.sum(axis=0) == 1).all() and (p.sum(axis=1) == 1).all()):
        raise ValueError("not a permutation matrix: row/column sums differ from 1")
    image = np.argmax(p, axis=1)
    seen = np.zeros(n, dtype=bool)
    lengths: list[int] = []
    for start in range(n):
        if seen[start]:
            continue
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = int(image[i])
            length += 1
        lengths.append(length)
    return sorted(lengths, reverse=True)
