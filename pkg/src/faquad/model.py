"""Hamiltonian families as matrix-valued functions of a scalar control.

Three models are provided, all real symmetric in their natural bases:

* ``two-level``: avoided-crossing qubit with bias control Delta, in units
  of the hopping J (hbar = 1, J = 1 by default).
* ``bose-hubbard-3``: two bosons on two sites, truncated to the three Fock
  states |2,0>, |1,1>, |0,2>, bias control Delta.
* ``ring``: one particle on a unit ring with a delta barrier of strength
  u0 and a stirring control Omega, expanded over plane waves k = -K..K.
  Energies are reported in units of E0 = 2 pi^2 hbar^2 / (M L^2).

Each model also exposes its analytic control derivative dH/dlambda, and
the ring additionally has an independent transcendental-equation solver
for its exact spectrum, used as a cross-check oracle by the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import RootBracketError

SQRT2 = math.sqrt(2.0)

TWO_LEVEL = "two-level"
BOSE_HUBBARD3 = "bose-hubbard-3"
RING = "ring"

KINDS = (TWO_LEVEL, BOSE_HUBBARD3, RING)


@dataclass(frozen=True)
class TwoLevelParams:
    """Two-level model parameters. J is the energy unit and defaults to 1."""

    U: float
    J: float = 1.0

    def __post_init__(self):
        if not (self.U > 0 and self.J > 0):
            raise ValueError("two-level model requires U > 0 and J > 0")


@dataclass(frozen=True)
class BoseHubbard3Params:
    """Two-site Bose-Hubbard parameters for the three-state truncation."""

    U: float
    J: float = 1.0

    def __post_init__(self):
        if not (self.U > 0 and self.J > 0):
            raise ValueError("bose-hubbard-3 model requires U > 0 and J > 0")


@dataclass(frozen=True)
class RingParams:
    """Stirred delta-barrier ring parameters.

    Parameters
    ----------
    u0:
        Dimensionless barrier strength U0*M*L/hbar^2, >= 0.
    K:
        Plane-wave truncation; the basis is k = -K..K (dimension 2K+1).
        Values >= 20 are needed for converged dynamics; smaller values
        are accepted for toy problems and oracles.
    """

    u0: float
    K: int = 40

    def __post_init__(self):
        if self.u0 < 0:
            raise ValueError("ring barrier strength u0 must be >= 0")
        if int(self.K) != self.K or self.K < 1:
            raise ValueError("ring truncation K must be a positive integer")


@dataclass(frozen=True)
class ModelSpec:
    """A model family plus its control boundary values.

    ``lambda_start`` and ``lambda_end`` are the control values at
    normalized time s = 0 and s = 1. They must differ: every sweep
    protocol drives the control monotonically between them.
    """

    kind: str
    params: object
    lambda_start: float
    lambda_end: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if not (np.isfinite(self.lambda_start) and np.isfinite(self.lambda_end)):
            raise ValueError("control boundary values must be finite")
        if self.lambda_start == self.lambda_end:
            raise ValueError("lambda_start and lambda_end must differ")

    @property
    def dim(self) -> int:
        if self.kind == TWO_LEVEL:
            return 2
        if self.kind == BOSE_HUBBARD3:
            return 3
        return 2 * self.params.K + 1


def two_level(U: float, delta_start: float, delta_end: float, J: float = 1.0) -> ModelSpec:
    """Two-level model with bias swept from delta_start to delta_end."""
    return ModelSpec(TWO_LEVEL, TwoLevelParams(U=U, J=J), delta_start, delta_end)


def bose_hubbard3(U: float, delta_start: float, delta_end: float, J: float = 1.0) -> ModelSpec:
    """Three-state Bose-Hubbard dimer with bias swept between the given values."""
    return ModelSpec(BOSE_HUBBARD3, BoseHubbard3Params(U=U, J=J), delta_start, delta_end)


def ring(u0: float, K: int = 40, omega_start: float = 0.0, omega_end: float = math.pi) -> ModelSpec:
    """Delta-barrier ring with stirring control swept between the given values."""
    if not (0.0 <= min(omega_start, omega_end) and max(omega_start, omega_end) <= math.pi):
        raise ValueError("declared stirring boundary values must lie in [0, pi]")
    return ModelSpec(RING, RingParams(u0=u0, K=K), omega_start, omega_end)


def hamiltonian(spec: ModelSpec, lam: float) -> np.ndarray:
    """Hamiltonian matrix at control value ``lam``.

    Two-level (J units, hbar = 1)::

        [[0, -sqrt(2) J], [-sqrt(2) J, U - Delta]]

    Bose-Hubbard dimer in the basis |2,0>, |1,1>, |0,2>::

        [[U + Delta, -sqrt(2) J, 0],
         [-sqrt(2) J, 0, -sqrt(2) J],
         [0, -sqrt(2) J, U - Delta]]

    Ring in plane waves k = -K..K (E0 units): kinetic diagonal
    (k - Omega/2pi)^2 plus the delta-barrier element u0/(2 pi^2) between
    every pair of plane waves, the diagonal included.
    """
    lam = float(lam)
    if not np.isfinite(lam):
        raise ValueError("control value must be finite")
    p = spec.params
    if spec.kind == TWO_LEVEL:
        h = -SQRT2 * p.J
        return np.array([[0.0, h], [h, p.U - lam]])
    if spec.kind == BOSE_HUBBARD3:
        h = -SQRT2 * p.J
        return np.array(
            [
                [p.U + lam, h, 0.0],
                [h, 0.0, h],
                [0.0, h, p.U - lam],
            ]
        )
    k = np.arange(-p.K, p.K + 1, dtype=float)
    H = np.full((spec.dim, spec.dim), p.u0 / (2.0 * math.pi**2))
    H[np.diag_indices_from(H)] += (k - lam / (2.0 * math.pi)) ** 2
    return H


def d_hamiltonian_d_lambda(spec: ModelSpec, lam: float) -> np.ndarray:
    """Analytic derivative of ``hamiltonian`` with respect to the control."""
    lam = float(lam)
    if not np.isfinite(lam):
        raise ValueError("control value must be finite")
    if spec.kind == TWO_LEVEL:
        return np.diag([0.0, -1.0])
    if spec.kind == BOSE_HUBBARD3:
        return np.diag([1.0, 0.0, -1.0])
    p = spec.params
    k = np.arange(-p.K, p.K + 1, dtype=float)
    return np.diag(-(k - lam / (2.0 * math.pi)) / math.pi)


def _cot(x: float) -> float:
    return math.cos(x) / math.sin(x)


def ring_alpha_roots(omega: float, u0: float, count: int) -> np.ndarray:
    """Exact ring spectrum through the transcendental quantization condition.

    Solves, for the first ``count`` levels ordered by ascending energy,

        4 pi alpha / u0 = cot(pi alpha - Omega/2) + cot(pi alpha + Omega/2)

    whose solutions alpha give energies E = E0 alpha^2. Roots are
    bracketed between consecutive poles of the cotangents; coincident
    (double) poles are themselves exact eigenvalues, the odd states with
    a node at the barrier, and are emitted directly. For u0 = 0 the
    closed-form limit alpha_n = n - Omega/(2 pi) is returned, ordered by
    energy with the positive branch first on ties.

    Parameters
    ----------
    omega:
        Stirring control, 0 <= omega <= pi.
    u0:
        Barrier strength, >= 0.
    count:
        Number of levels requested.

    Returns
    -------
    numpy.ndarray
        ``count`` values of alpha, energies ``alpha**2`` ascending.
    """
    if not 0.0 <= omega <= math.pi:
        raise ValueError("omega must lie in [0, pi]")
    if u0 < 0:
        raise ValueError("u0 must be >= 0")
    if count < 1:
        raise ValueError("count must be >= 1")

    if u0 == 0.0:
        ns = np.arange(-(count + 2), count + 3)
        alphas = ns - omega / (2.0 * math.pi)
        order = sorted(range(len(alphas)), key=lambda i: (alphas[i] ** 2, -alphas[i]))
        return np.array([alphas[i] for i in order[:count]])

    tol = 1e-9

    def g(a: float) -> float:
        return _cot(math.pi * a - omega / 2.0) + _cot(math.pi * a + omega / 2.0) - 4.0 * math.pi * a / u0

    # Positive poles of the cotangents: a = m -/+ omega/(2 pi). A double
    # pole (both families coincide) is an exact eigenvalue; a zero pole
    # only bounds the first bracketing interval.
    m_max = count + 3
    raw = []
    for m in range(0, m_max + 1):
        for p in (m + omega / (2.0 * math.pi), m - omega / (2.0 * math.pi)):
            if p > -tol:
                raw.append(max(p, 0.0))
    raw.sort()
    poles = []
    pinned = []
    i = 0
    while i < len(raw):
        if i + 1 < len(raw) and raw[i + 1] - raw[i] < tol:
            # double pole
            if raw[i] > tol:
                pinned.append(raw[i])
            poles.append(raw[i])
            i += 2
        else:
            poles.append(raw[i])
            i += 1

    roots = list(pinned)
    for a, b in zip(poles[:-1], poles[1:]):
        eps = (b - a) * 1e-10
        lo, hi = a + eps, b - eps
        try:
            glo, ghi = g(lo), g(hi)
        except ZeroDivisionError as exc:  # pragma: no cover - merged above
            raise RootBracketError((a, b), "pole inside bracketing interval") from exc
        if glo == 0.0:
            roots.append(lo)
            continue
        if ghi == 0.0:
            roots.append(hi)
            continue
        if glo * ghi > 0.0:
            # No sign change: this interval holds no root (the interval
            # below the first pole for omega > 0).
            continue
        roots.append(brentq(g, lo, hi, xtol=1e-14, rtol=8.9e-16))

    roots.sort()
    if len(roots) < count:
        raise RootBracketError(len(roots), f"only {len(roots)} roots found, {count} requested")
    return np.array(roots[:count])


def ring_energies_from_roots(omega: float, u0: float, count: int) -> np.ndarray:
    """Energies E0 * alpha_n^2 for the first ``count`` transcendental roots."""
    return ring_alpha_roots(omega, u0, count) ** 2
