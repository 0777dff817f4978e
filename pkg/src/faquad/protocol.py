"""Normalized control trajectories and their rescaling to physical time.

The fast quasi-adiabatic schedule keeps the adiabaticity parameter

    c = hbar | lambda_dot * <phi_1|d_lambda phi_2> / (E_1 - E_2) |

constant along the drive. Because the right-hand side depends on time
only through lambda itself, the defining ODE is separable: with the
weight w(lambda) = |coupling/gap| the cumulative integral

    G(lambda) = integral from lambda_start to lambda of w dlambda'

gives the scaled constant c_tilde = hbar * G(lambda_end), the normalized
clock s(lambda) = G(lambda)/G(lambda_end), and the schedule itself by
inverting the strictly monotone s(lambda) with a shape-preserving
monotone interpolant. No stiff integration is involved, and c_tilde is
exact up to quadrature error (checked by grid halving).

The competitor schedules reuse the same construction with different
weights: local-adiabatic uses w = 1/gap^2, uniform-adiabatic uses
w = |dgap/dlambda| / gap^2. Linear and constant schedules are closed
form. All normalized trajectories obey the scaling law: one design is
rescaled to any duration t_f with lambda(t) = lambda_tilde(t / t_f).

Inversion knots are kept at the natural image of the design grid, which
is automatically dense wherever lambda_tilde(s) is steep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import model as _model
from . import spectral as _spectral
from .errors import FaquadError, FlatGap

FAQUAD = "faquad"
LOCAL_ADIABATIC = "local-adiabatic"
UNIFORM_ADIABATIC = "uniform-adiabatic"
LINEAR = "linear"
CONSTANT = "constant"

SWEEP_KINDS = (FAQUAD, LOCAL_ADIABATIC, UNIFORM_ADIABATIC, LINEAR)
KINDS = SWEEP_KINDS + (CONSTANT,)

DESIGNED_KINDS = (FAQUAD, LOCAL_ADIABATIC, UNIFORM_ADIABATIC)

DEFAULT_GRID_POINTS = 2001


@dataclass(frozen=True)
class NormalizedTrajectory:
    """A control schedule on the normalized clock s in [0, 1].

    ``s_grid`` and ``values`` are the interpolation knots; for designed
    kinds the knots sit at the natural, non-uniform image of the design
    grid. ``c_tilde`` is the duration-scaled adiabaticity constant
    (energy times time, here dimensionless with hbar = 1); it is None
    for kinds that do not define one. ``pair`` is the 1-based level pair
    the design used, None for linear and constant schedules.
    """

    kind: str
    spec: _model.ModelSpec
    s_grid: np.ndarray
    values: np.ndarray
    c_tilde: float | None = None
    pair: tuple | None = None
    _interp: object = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown trajectory kind {self.kind!r}")
        s = np.asarray(self.s_grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if s.ndim != 1 or s.shape != v.shape or len(s) < 2:
            raise ValueError("s_grid and values must be 1-d arrays of equal length >= 2")
        if s[0] != 0.0 or s[-1] != 1.0 or np.any(np.diff(s) <= 0):
            raise ValueError("s_grid must increase strictly from 0 to 1")
        if self.kind in SWEEP_KINDS:
            dv = np.diff(v)
            if not (np.all(dv > 0) or np.all(dv < 0)):
                raise ValueError("sweep trajectories must be strictly monotone")
        object.__setattr__(self, "s_grid", s)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "_interp", PchipInterpolator(s, v))

    def evaluate(self, s):
        """lambda_tilde(s) by monotone cubic interpolation. The boundary
        values are pinned exactly: polynomial evaluation at the very last
        knot would otherwise leak rounding error into lambda_end."""
        s_arr = np.asarray(s, dtype=float)
        if np.any(s_arr < -1e-12) or np.any(s_arr > 1.0 + 1e-12):
            raise ValueError("normalized time must lie in [0, 1]")
        clipped = np.clip(s_arr, 0.0, 1.0)
        out = self._interp(clipped)
        out = np.where(clipped == 0.0, self.values[0], out)
        out = np.where(clipped == 1.0, self.values[-1], out)
        return float(out) if np.isscalar(s) else out

    def derivative(self, s):
        """d lambda_tilde / d s of the interpolant."""
        s_arr = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
        out = self._interp.derivative()(s_arr)
        return float(out) if np.isscalar(s) else out

    def scaled(self, factor: float) -> "NormalizedTrajectory":
        """Trajectory with all control values multiplied by ``factor``.

        Models a miscalibrated drive; boundary values are scaled too, so
        the result generally ends away from ``spec.lambda_end``. A zero
        factor degenerates to the constant zero schedule.
        """
        if factor < 0:
            raise ValueError("scale factor must be >= 0")
        if factor == 0.0:
            return constant_protocol(self.spec, 0.0)
        return NormalizedTrajectory(
            kind=self.kind,
            spec=self.spec,
            s_grid=self.s_grid,
            values=self.values * factor,
            c_tilde=None,
            pair=self.pair,
        )


@dataclass(frozen=True)
class TimedControl:
    """A normalized trajectory played over a physical duration t_f."""

    trajectory: NormalizedTrajectory
    t_f: float

    def value(self, t):
        return self.trajectory.evaluate(np.asarray(t, dtype=float) / self.t_f)

    @property
    def c(self) -> float | None:
        ct = self.trajectory.c_tilde
        return None if ct is None else ct / self.t_f


def _design_grid(spec: _model.ModelSpec, grid, grid_points: int) -> np.ndarray:
    if grid is not None:
        return np.asarray(grid, dtype=float)
    return np.linspace(spec.lambda_start, spec.lambda_end, grid_points)


def _design_from_weight(spec, grid, weight, kind, pair, c_tilde_sign=1.0) -> NormalizedTrajectory:
    """Shared separable-quadrature core: cumulative trapezoid of a
    non-negative weight over arc length, then monotone inversion."""
    weight = np.asarray(weight, dtype=float)
    if np.any(weight < 0) or not np.all(np.isfinite(weight)):
        raise FaquadError("design weight must be finite and non-negative")
    arc = np.abs(grid - grid[0])
    cells = 0.5 * (weight[1:] + weight[:-1]) * np.diff(arc)
    G = np.concatenate([[0.0], np.cumsum(cells)])
    if np.any(np.diff(G) <= 0):
        raise FaquadError(
            "cumulative weight integral is not strictly increasing; "
            "the design weight vanishes over a whole grid cell"
        )
    total = G[-1]
    s = G / total
    s[0], s[-1] = 0.0, 1.0
    return NormalizedTrajectory(
        kind=kind,
        spec=spec,
        s_grid=s,
        values=grid.copy(),
        c_tilde=float(c_tilde_sign * total),
        pair=tuple(pair) if pair is not None else None,
    )


def design_faquad(spec: _model.ModelSpec, pair=(1, 2), grid=None,
                  grid_points: int = DEFAULT_GRID_POINTS) -> NormalizedTrajectory:
    """Fast quasi-adiabatic schedule for a tracked level pair.

    The control moves fast where the pair coupling is weak and slows
    through avoided crossings. ``c_tilde`` comes out positive because the
    weight |coupling/gap| is integrated over arc length.
    """
    grid = _design_grid(spec, grid, grid_points)
    track = _spectral.track_frames(spec, grid, pairs=(pair,))
    weight = np.abs(track.coupling(pair) / track.gap(pair))
    return _design_from_weight(spec, grid, weight, FAQUAD, pair)


def design_local_adiabatic(spec: _model.ModelSpec, pair=(1, 2), grid=None,
                           grid_points: int = DEFAULT_GRID_POINTS) -> NormalizedTrajectory:
    """Local-adiabatic competitor: drive speed proportional to gap^2,
    i.e. the same construction as FAQUAD without the coupling factor."""
    grid = _design_grid(spec, grid, grid_points)
    track = _spectral.track_frames(spec, grid, pairs=(pair,))
    weight = 1.0 / track.gap(pair) ** 2
    return _design_from_weight(spec, grid, weight, LOCAL_ADIABATIC, pair)


def _ua_weight(gap: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Uniform-adiabatic weight |gap'| / gap^2 with flat-gap detection."""
    dgap = np.gradient(gap, grid)
    scale = np.max(np.abs(dgap))
    if scale == 0.0:
        raise FlatGap("gap derivative vanishes on the whole grid")
    tiny = np.abs(dgap) < 1e-12 * scale
    run = 0
    for flat in tiny:
        run = run + 1 if flat else 0
        if run >= 3:
            raise FlatGap("gap derivative vanishes over a subinterval")
    return np.abs(dgap) / gap**2


def design_uniform_adiabatic(spec: _model.ModelSpec, pair=(1, 2), grid=None,
                             grid_points: int = DEFAULT_GRID_POINTS) -> NormalizedTrajectory:
    """Uniform-adiabatic competitor: drive speed gap^2 / |gap'|.

    The weight stays integrable through a gap minimum, where the
    resulting schedule shows its characteristic kink.
    """
    grid = _design_grid(spec, grid, grid_points)
    track = _spectral.track_frames(spec, grid, pairs=(pair,))
    weight = _ua_weight(track.gap(pair), grid)
    return _design_from_weight(spec, grid, weight, UNIFORM_ADIABATIC, pair)


def linear_ramp(spec: _model.ModelSpec, knots: int = 201) -> NormalizedTrajectory:
    """Straight line between the boundary control values."""
    s = np.linspace(0.0, 1.0, knots)
    values = spec.lambda_start + s * (spec.lambda_end - spec.lambda_start)
    return NormalizedTrajectory(kind=LINEAR, spec=spec, s_grid=s, values=values)


def constant_protocol(spec: _model.ModelSpec, value: float, knots: int = 2) -> NormalizedTrajectory:
    """Hold the control at a fixed value; the pi-pulse reference uses
    value = U, where the two-level model is on resonance."""
    s = np.linspace(0.0, 1.0, knots)
    return NormalizedTrajectory(
        kind=CONSTANT, spec=spec, s_grid=s, values=np.full_like(s, float(value))
    )


def rescale(traj: NormalizedTrajectory, t_f: float) -> TimedControl:
    """Play a normalized trajectory over duration t_f > 0."""
    if not (t_f > 0 and math.isfinite(t_f)):
        raise ValueError("t_f must be positive and finite")
    return TimedControl(trajectory=traj, t_f=float(t_f))


def adiabaticity_profile(traj: NormalizedTrajectory, s_samples=None) -> np.ndarray:
    """Duration-scaled adiabaticity parameter c_tilde(s) sampled along a
    trajectory: |dlambda/ds| * |coupling/gap| at lambda_tilde(s).

    For a FAQUAD design this is constant and equal to ``c_tilde`` up to
    interpolation error; for other kinds it varies.
    """
    if traj.pair is None:
        raise ValueError("trajectory has no designed level pair")
    if s_samples is None:
        s_samples = np.linspace(0.01, 0.99, 197)
    s_samples = np.asarray(s_samples, dtype=float)
    lams = traj.evaluate(s_samples)
    speed = np.abs(traj.derivative(s_samples))
    track = _spectral.track_frames(traj.spec, lams, pairs=(traj.pair,))
    ratio = np.abs(track.coupling(traj.pair) / track.gap(traj.pair))
    return speed * ratio
