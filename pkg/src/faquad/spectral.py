"""Eigen-decomposition along a control grid with continuous eigenvectors.

All model Hamiltonians are real symmetric, so eigenvectors can be kept
real and made continuous along a grid by fixing the sign of each column
against the previous grid point. Level couplings are computed with the
off-diagonal Hellmann-Feynman identity

    <phi_i | d/dlambda phi_j> = <phi_i | dH/dlambda | phi_j> / (E_j - E_i)

which is exact at each grid point and needs no differencing.

Levels are indexed 1-based throughout the public interface: pair (1, 2)
means the ground state and the first excited state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import model as _model
from .errors import DegenerateGap

DEGENERACY_RTOL = 1e-12


@dataclass(frozen=True)
class SpectralFrame:
    """Eigensystem at a single control value."""

    lam: float
    energies: np.ndarray
    vectors: np.ndarray
    couplings: dict

    def coupling(self, i: int, j: int) -> float:
        if i == j:
            return 0.0
        if (i, j) in self.couplings:
            return self.couplings[(i, j)]
        return -self.couplings[(j, i)]


@dataclass(frozen=True)
class FrameTrack:
    """Sign-fixed eigensystems along a strictly monotone control grid.

    ``energies`` has shape (n_grid, dim), ``vectors`` (n_grid, dim, dim)
    with eigenvector columns, and ``couplings`` maps a 1-based level pair
    (i, j) with i < j to an array of <phi_i|d_lambda phi_j> over the grid.
    """

    spec: _model.ModelSpec
    grid: np.ndarray
    energies: np.ndarray
    vectors: np.ndarray
    pairs: tuple
    couplings: dict = field(repr=False)

    def gap(self, pair) -> np.ndarray:
        i, j = _canonical_pair(pair, self.spec.dim)
        return self.energies[:, j - 1] - self.energies[:, i - 1]

    def coupling(self, pair) -> np.ndarray:
        i, j = pair
        ci, cj = _canonical_pair(pair, self.spec.dim)
        arr = self.couplings[(ci, cj)]
        return arr if (i, j) == (ci, cj) else -arr

    def frame(self, k: int) -> SpectralFrame:
        coup = {p: self.couplings[p][k] for p in self.couplings}
        return SpectralFrame(
            lam=float(self.grid[k]),
            energies=self.energies[k],
            vectors=self.vectors[k],
            couplings=coup,
        )

    def __len__(self) -> int:
        return len(self.grid)


def _canonical_pair(pair, dim):
    i, j = int(pair[0]), int(pair[1])
    if i == j:
        raise ValueError("level pair must contain two distinct levels")
    if not (1 <= i <= dim and 1 <= j <= dim):
        raise ValueError(f"levels must lie in 1..{dim}, got {pair}")
    return (i, j) if i < j else (j, i)


def eigensystem(H: np.ndarray):
    """Ascending eigenvalues and orthonormal eigenvector columns of a real
    symmetric matrix. Non-symmetric input is rejected."""
    H = np.asarray(H, dtype=float)
    scale = max(np.max(np.abs(H)), 1.0)
    if np.max(np.abs(H - H.T)) > 1e-12 * scale:
        raise ValueError("matrix is not symmetric")
    return np.linalg.eigh(H)


def sign_fix(vectors: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Flip eigenvector columns so their overlap with ``reference`` columns
    is positive. Columns with zero overlap are left unchanged."""
    overlaps = np.einsum("ij,ij->j", reference, vectors)
    signs = np.where(overlaps < 0.0, -1.0, 1.0)
    return vectors * signs


def gauge_fix_columns(vectors: np.ndarray) -> np.ndarray:
    """Deterministic overall sign: the largest-magnitude component of each
    column is made positive."""
    amax = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[amax, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def eigenstate(spec: _model.ModelSpec, lam: float, level: int = 1) -> np.ndarray:
    """Instantaneous eigenvector (1-based level) at one control value, in
    the deterministic sign gauge."""
    _, vectors = np.linalg.eigh(_model.hamiltonian(spec, lam))
    return gauge_fix_columns(vectors)[:, level - 1]


def track_frames(spec: _model.ModelSpec, grid, pairs=((1, 2),)) -> FrameTrack:
    """Diagonalize along ``grid`` with continuity sign-fixing and compute
    the requested pair couplings.

    Parameters
    ----------
    spec:
        Model to track.
    grid:
        Strictly monotone control samples.
    pairs:
        1-based level pairs whose couplings are wanted.

    Raises
    ------
    DegenerateGap
        If a requested pair is degenerate (relative to the local spectral
        range) at any grid point.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2:
        raise ValueError("grid must be a 1-d array with at least 2 points")
    steps = np.diff(grid)
    if not (np.all(steps > 0) or np.all(steps < 0)):
        raise ValueError("grid must be strictly monotone")

    pairs = tuple(_canonical_pair(p, spec.dim) for p in pairs)
    n = len(grid)
    H = np.stack([_model.hamiltonian(spec, lam) for lam in grid])
    energies, vectors = np.linalg.eigh(H)

    vectors[0] = gauge_fix_columns(vectors[0])
    for k in range(1, n):
        vectors[k] = sign_fix(vectors[k], vectors[k - 1])

    # All built-in models have diagonal control derivatives, which keeps
    # the coupling numerator an O(dim) contraction per grid point.
    probe = _model.d_hamiltonian_d_lambda(spec, grid[0])
    if np.max(np.abs(probe - np.diag(np.diag(probe)))) != 0.0:
        raise NotImplementedError("non-diagonal control derivatives are not supported")
    dh = np.stack([np.diag(_model.d_hamiltonian_d_lambda(spec, lam)) for lam in grid])

    couplings = {}
    spread = np.maximum(energies[:, -1] - energies[:, 0], 1.0)
    for (i, j) in pairs:
        gap = energies[:, j - 1] - energies[:, i - 1]
        bad = np.abs(gap) < DEGENERACY_RTOL * spread
        if np.any(bad):
            k = int(np.argmax(bad))
            raise DegenerateGap(grid[k], (i, j))
        numer = np.einsum("nd,nd->n", vectors[:, :, i - 1] * dh, vectors[:, :, j - 1])
        couplings[(i, j)] = numer / gap

    return FrameTrack(
        spec=spec,
        grid=grid,
        energies=energies,
        vectors=vectors,
        pairs=pairs,
        couplings=couplings,
    )
