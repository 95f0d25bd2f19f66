"""Discrete plane-wave superpositions in 1+1 dimensions.

A ModeSet is a finite list of (wavenumber, complex coefficient) pairs
defining psi = sum_k omega_k^{-1/2} phi_k exp(i(k z - omega_k t)).  The
module evaluates psi with analytic derivatives, the velocity field in its
double-sum form, the conserved integral of motion F, and extracts
trajectory families as iso-contours of F annotated with the
particle/anti-particle classification.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .contours import extract_contours
from .numerics import Grid2D, omega
from .scalar import EPS_RHO_SCALE, FieldSample

__all__ = [
    "ModeSet",
    "Trajectory",
    "TrajectorySet",
    "eval_psi",
    "velocity_discrete",
    "integral_F",
    "trajectories",
    "mean_rest_frame_check",
    "fig1_modeset",
]


@dataclass(frozen=True)
class ModeSet:
    """Plane-wave modes: wavenumbers k and complex coefficients phi."""

    k: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        k = np.atleast_1d(np.asarray(self.k, dtype=float))
        phi = np.atleast_1d(np.asarray(self.phi, dtype=complex))
        if k.size == 0 or k.size != phi.size:
            raise ValueError("need equally many wavenumbers and coefficients")
        if np.unique(k).size != k.size:
            raise ValueError("wavenumbers must be pairwise distinct")
        if not np.any(phi):
            raise ValueError("coefficients must not all vanish")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "phi", phi)

    @property
    def omega(self) -> np.ndarray:
        return omega(self.k)

    @property
    def weight(self) -> float:
        """Total weight sum |phi|^2 normalizing the expectation values."""
        return float(np.sum(np.abs(self.phi) ** 2))


def _mode_amplitudes(state: ModeSet, z, t) -> np.ndarray:
    """u_k = phi_k omega_k^{-1/2} exp(i(k z - omega t)), shape (n_modes,)."""
    w = state.omega
    return state.phi * w ** -0.5 * np.exp(
        1j * (state.k * np.asarray(z)[..., None]
              - w * np.asarray(t)[..., None]))


def eval_psi(state: ModeSet, z: float, t: float) -> FieldSample:
    """psi and its analytic first derivatives at (z, t)."""
    u = _mode_amplitudes(state, z, t)
    return FieldSample(
        psi=complex(np.sum(u)),
        dpsi_dx=complex(np.sum(1j * state.k * u)),
        dpsi_dt=complex(np.sum(-1j * state.omega * u)),
    )


def _rho_j(state: ModeSet, z, t):
    """Charge density and current from the symmetrized double sums."""
    u = _mode_amplitudes(state, z, t)
    uu = np.conj(u)[..., :, None] * u[..., None, :]
    w = state.omega
    rho = np.sum(0.5 * (w[:, None] + w[None, :]) * uu.real, axis=(-2, -1))
    j = np.sum(0.5 * (state.k[:, None] + state.k[None, :]) * uu.real,
               axis=(-2, -1))
    return rho, j


def velocity_discrete(state: ModeSet, z: float, t: float,
                      eps_scale: float = EPS_RHO_SCALE):
    """Velocity from the mode-pair double sums; None at a density zero.

    Agrees with the bilinear J/rho of eval_psi to rounding; the two
    formula paths are kept separate deliberately.
    """
    rho, j = _rho_j(state, z, t)
    floor = eps_scale * float(np.sum(np.abs(state.phi) ** 2)
                              * np.max(np.abs(state.k) + state.omega))
    if abs(rho) < floor:
        return None
    return float(j / rho)


def integral_F(state: ModeSet, z, t, check_tol: float = 1e-9):
    """Conserved integral F = Im(I) of the equations of motion.

    F = (z - <k/omega> t) + Im(double sum)/sum|phi|^2, where the double
    sum runs over distinct mode pairs.  The double sum must be pure
    imaginary; its stray real part is asserted against check_tol.

    Accepts scalars or broadcastable arrays for z and t.
    """
    z = np.asarray(z, dtype=float)
    t = np.asarray(t, dtype=float)
    u = _mode_amplitudes(state, z, t)
    k = state.k
    w = state.omega
    dk = k[None, :] - k[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        coef = np.where(dk != 0.0, (w[:, None] + w[None, :]) / np.where(
            dk != 0.0, dk, 1.0), 0.0)
    dbl = 0.5 * np.sum(np.conj(u)[..., :, None] * u[..., None, :] * coef,
                       axis=(-2, -1))
    scale = np.max(np.abs(dbl.imag)) + 1e-14
    if np.max(np.abs(dbl.real)) > check_tol * scale:
        raise ArithmeticError(
            "double sum of the integral of motion is not pure imaginary: "
            f"max |Re| = {np.max(np.abs(dbl.real)):.3e}")
    mean_v = mean_rest_frame_check(state)
    out = (z - mean_v * t) + dbl.imag / state.weight
    return float(out) if out.ndim == 0 else out


def double_sum_parts(state: ModeSet, z, t):
    """Real and imaginary part of the Eq-of-motion double sum.

    The real part must vanish identically (pure-imaginary claim); this
    helper exposes both parts so callers can measure the stray real
    residue directly.
    """
    u = _mode_amplitudes(state, np.asarray(z, dtype=float),
                         np.asarray(t, dtype=float))
    k = state.k
    w = state.omega
    dk = k[None, :] - k[:, None]
    coef = np.where(dk != 0.0,
                    (w[:, None] + w[None, :]) / np.where(dk != 0.0, dk, 1.0),
                    0.0)
    dbl = 0.5 * np.sum(np.conj(u)[..., :, None] * u[..., None, :] * coef,
                       axis=(-2, -1))
    return dbl.real, dbl.imag


def mean_rest_frame_check(state: ModeSet) -> float:
    """Weighted mean group velocity <k/omega> = sum|phi|^2 k/w / sum|phi|^2."""
    w2 = np.abs(state.phi) ** 2
    return float(np.sum(w2 * state.k / state.omega) / np.sum(w2))


@dataclass
class Trajectory:
    """One iso-contour of F with per-vertex Bohmian annotations.

    v is NaN where the velocity diverges (density zero); segment_class
    holds +1 (particle, rho > 0) or -1 (anti-particle, rho < 0) per
    polyline segment, flipping only where rho changes sign.  Under the
    Feynman-Stueckelberg reading, rho < 0 segments are traversed
    backward in t.
    """

    level: float
    points: np.ndarray           # (n, 2): columns x, t
    rho: np.ndarray              # (n,)
    v: np.ndarray                # (n,), NaN at divergence flags
    segment_class: np.ndarray    # (n - 1,), +1 / -1
    closed: bool = False


@dataclass
class TrajectorySet:
    trajectories: list[Trajectory] = field(default_factory=list)

    @property
    def n_pair_events(self) -> int:
        """Count of rho sign changes along all contour polylines."""
        return sum(int(np.sum(np.diff(np.sign(tr.rho)) != 0))
                   for tr in self.trajectories)

    def rows(self):
        """CSV-ready rows: level_id, segment_id, x, t, rho_sign, v."""
        for li, tr in enumerate(self.trajectories):
            for vi, (x, t) in enumerate(tr.points):
                yield (li, vi, x, t, int(np.sign(tr.rho[vi])),
                       tr.v[vi])


def annotate_contours(lines, rho_j_fn, floor: float) -> TrajectorySet:
    """Turn raw contour polylines into an annotated TrajectorySet.

    rho_j_fn(x_array, t_array) must return (rho, j) arrays; floor is the
    absolute density threshold below which the velocity is flagged (NaN).
    """
    out = TrajectorySet()
    for line in lines:
        xs, ts = line.points[:, 0], line.points[:, 1]
        rho, j = rho_j_fn(xs, ts)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = np.where(np.abs(rho) < floor, np.nan, j / rho)
        if len(xs) > 1:
            mid_rho, _ = rho_j_fn(0.5 * (xs[:-1] + xs[1:]),
                                  0.5 * (ts[:-1] + ts[1:]))
            seg = np.where(mid_rho >= 0.0, 1, -1)
        else:
            seg = np.empty(0, dtype=int)
        out.trajectories.append(Trajectory(
            level=line.level, points=line.points, rho=rho, v=v,
            segment_class=seg, closed=line.closed))
    return out


def _annotate(state: ModeSet, lines) -> TrajectorySet:
    floor = EPS_RHO_SCALE * float(np.sum(np.abs(state.phi) ** 2)
                                  * np.max(np.abs(state.k) + state.omega))
    return annotate_contours(lines, lambda xs, ts: _rho_j(state, xs, ts),
                             floor)


def f_grid(state: ModeSet, grid: Grid2D) -> np.ndarray:
    """F sampled on the grid, shape (n_x, n_t)."""
    z = grid.x[:, None]
    t = grid.t[None, :]
    return integral_F(state, z, t)


def trajectories(state: ModeSet, grid: Grid2D,
                 n_levels: int) -> TrajectorySet:
    """Trajectory family: iso-contours of F at n_levels even levels.

    Warns if F varies by more than one level spacing across a grid cell
    (contours can then miss structure).
    """
    if n_levels < 1:
        raise ValueError("n_levels must be >= 1")
    F = f_grid(state, grid)
    lo, hi = float(F.min()), float(F.max())
    levels = lo + (hi - lo) * (np.arange(n_levels) + 0.5) / n_levels
    spacing = (hi - lo) / n_levels if n_levels > 1 else hi - lo
    cell_jump = max(np.max(np.abs(np.diff(F, axis=0))),
                    np.max(np.abs(np.diff(F, axis=1))))
    if spacing > 0 and cell_jump > spacing:
        warnings.warn(
            f"grid too coarse for the requested levels: F jumps by up to "
            f"{cell_jump:.3g} per cell vs level spacing {spacing:.3g}",
            RuntimeWarning, stacklevel=2)
    lines = extract_contours(grid.x, grid.t, F, levels)
    return _annotate(state, lines)


def fig1_modeset(k_ultra: float = 400.0, rest_weight: float = 0.9) -> ModeSet:
    """Demo three-mode state: a dominant rest mode plus an
    ultra-relativistic +-k pair, mean group velocity zero by symmetry.

    The published figure's exact parameters are not available; this
    configuration reproduces the qualitative pair creation/annihilation
    structure on a window of order 0.01 Compton wavelengths.
    """
    side = np.sqrt((1.0 - rest_weight) / 2.0)
    return ModeSet(k=np.array([0.0, k_ultra, -k_ultra]),
                   phi=np.array([np.sqrt(rest_weight), side, side],
                                dtype=complex))
