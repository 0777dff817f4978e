"""Many-body layer for the stirred ring in the Tonks-Girardeau limit.

Hard-core bosons map onto free fermions, so the N-particle ground state
is the Slater determinant of the N lowest single-particle orbitals, the
time-evolved state is the determinant of the evolved orbitals, and the
magnitude of a many-body overlap reduces to

    |<Psi_A | Psi_B>| = |det(A^dagger B)|

with A, B the (dim x N) orbital matrices (Cauchy-Binet). Everything
heavy therefore happens at the single-particle level: one propagator
evolves the whole orbital stack at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import dynamics as _dynamics
from . import model as _model
from . import protocol as _protocol
from . import spectral as _spectral
from .errors import FaquadError

DEFAULT_EPSILONS = (-0.1, -0.05, 0.0, 0.05, 0.1)


@dataclass(frozen=True)
class OrbitalStack:
    """N single-particle orbitals as columns of a (dim, N) matrix."""

    orbitals: np.ndarray
    t: float = 0.0

    @property
    def N(self) -> int:
        return self.orbitals.shape[1]

    def gram_error(self) -> float:
        gram = self.orbitals.conj().T @ self.orbitals
        return float(np.max(np.abs(gram - np.eye(self.N))))


@dataclass
class ManyBodyFidelityCurve:
    """Fidelity against one abscissa (duration or calibration error)."""

    abscissa: np.ndarray
    fidelity: np.ndarray
    N: int
    protocol: str
    label: str = "tf"
    failures: list = field(default_factory=list)


def _check_odd_n(spec: _model.ModelSpec, N: int):
    if spec.kind != _model.RING:
        raise ValueError("orbital stacks are defined for the ring model")
    if N % 2 == 0 or N < 1:
        raise ValueError("particle number N must be odd and positive")
    if N > 2 * spec.params.K - 1:
        raise ValueError("N exceeds the sensible range of the truncated basis")


def stack_at(spec: _model.ModelSpec, lam: float, N: int) -> OrbitalStack:
    """The N lowest orbitals of H(lam) in the deterministic gauge."""
    _check_odd_n(spec, N)
    _, vectors = np.linalg.eigh(_model.hamiltonian(spec, lam))
    vectors = _spectral.gauge_fix_columns(vectors)
    return OrbitalStack(orbitals=vectors[:, :N].astype(complex), t=0.0)


def initial_stack(spec: _model.ModelSpec, N: int) -> OrbitalStack:
    """Ground-state stack at the starting control value."""
    return stack_at(spec, spec.lambda_start, N)


def target_stack(spec: _model.ModelSpec, N: int) -> OrbitalStack:
    """Ground-state stack at the final control value."""
    return stack_at(spec, spec.lambda_end, N)


def evolve_stack(stack: OrbitalStack, spec: _model.ModelSpec,
                 control: _protocol.TimedControl, n_steps: int | None = None,
                 table: _dynamics.MidpointTable | None = None) -> OrbitalStack:
    """Evolve every orbital with the same single-particle propagator."""
    result = _dynamics.evolve(spec, control, stack.orbitals, n_steps=n_steps,
                              n_save=2, table=table)
    return OrbitalStack(orbitals=result.final_state, t=control.t_f)


def tg_fidelity(evolved: OrbitalStack, target: OrbitalStack) -> float:
    """|det| of the orbital overlap matrix, the many-body overlap magnitude."""
    if evolved.orbitals.shape != target.orbitals.shape:
        raise ValueError("orbital stacks must share basis size and particle number")
    overlap = evolved.orbitals.conj().T @ target.orbitals
    return float(np.abs(np.linalg.det(overlap)))


def duration_sweep(spec: _model.ModelSpec, N: int, traj: _protocol.NormalizedTrajectory,
                   tf_list, n_steps: int | None = None) -> ManyBodyFidelityCurve:
    """Many-body fidelity to the final-control ground state versus t_f."""
    _check_odd_n(spec, N)
    tf_arr = np.asarray(list(tf_list), dtype=float)
    if np.any(tf_arr <= 0):
        raise ValueError("all durations must be positive")
    if n_steps is None:
        n_steps = _dynamics.default_n_steps(spec, traj, float(np.max(tf_arr)),
                                            pair=(N, N + 1))
    start = initial_stack(spec, N)
    target = target_stack(spec, N)
    table = (_dynamics.MidpointTable(spec, traj, n_steps)
             if _dynamics.MidpointTable.fits(spec, n_steps) else None)

    fidelity = np.full(len(tf_arr), np.nan)
    failures = []
    for i, t_f in enumerate(tf_arr):
        control = _protocol.rescale(traj, float(t_f))
        try:
            evolved = evolve_stack(start, spec, control, n_steps=n_steps, table=table)
            fidelity[i] = tg_fidelity(evolved, target)
        except FaquadError as exc:
            failures.append((float(t_f), str(exc)))
    return ManyBodyFidelityCurve(abscissa=tf_arr, fidelity=fidelity, N=N,
                                 protocol=traj.kind, label="tf", failures=failures)


def epsilon_sweep(spec: _model.ModelSpec, N: int, traj: _protocol.NormalizedTrajectory,
                  t_f: float, epsilons=DEFAULT_EPSILONS,
                  n_steps: int | None = None) -> ManyBodyFidelityCurve:
    """Fidelity under a miscalibrated drive Omega_e(t) = Omega(t) (1 + eps).

    The drive then ends at lambda_end * (1 + eps), away from the target
    control for eps != 0, while the reference state stays the ground
    state at the nominal final control. eps = -1 freezes the control at
    zero; values below -1 are rejected.
    """
    _check_odd_n(spec, N)
    eps_arr = np.asarray(list(epsilons), dtype=float)
    if np.any(eps_arr < -1.0):
        raise ValueError("calibration errors must satisfy eps >= -1")
    if n_steps is None:
        n_steps = _dynamics.default_n_steps(spec, traj, float(t_f), pair=(N, N + 1))
    start = initial_stack(spec, N)
    target = target_stack(spec, N)
    control_tf = float(t_f)

    fidelity = np.full(len(eps_arr), np.nan)
    failures = []
    for i, eps in enumerate(eps_arr):
        scaled = traj.scaled(1.0 + float(eps))
        control = _protocol.rescale(scaled, control_tf)
        try:
            evolved = evolve_stack(start, spec, control, n_steps=n_steps)
            fidelity[i] = tg_fidelity(evolved, target)
        except FaquadError as exc:
            failures.append((float(eps), str(exc)))
    return ManyBodyFidelityCurve(abscissa=eps_arr, fidelity=fidelity, N=N,
                                 protocol=traj.kind, label="epsilon", failures=failures)
