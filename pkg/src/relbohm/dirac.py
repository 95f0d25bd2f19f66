"""Convective-current Bohmian theory for free positive-energy spinors.

Fields are finite superpositions of positive-energy Dirac plane waves in
the Dirac representation, evaluated with analytic first derivatives.
From them: the convective momentum, effective mass, spinor quantum
potential, the spin stress tensor, and numerical verification of the
mass identity, the stress-tensor equations of motion, and the
Foldy-Wouthuysen (FW) reductions.

Metric dictionary
-----------------
All components are real-time with signature (+, -, -, -) and index order
(t, x, y, z); coordinate derivatives are plain (d/dt, d/dx, ...).  The
source identities are stated in the imaginary-time (x4 = ict) formalism;
the translation used throughout is

    Euclidean contraction  a_mu b_mu      ->  -g^{mu nu} a_mu b_nu
    Euclidean trace        T_mumu         ->  -g^{mu nu} T_{mu nu}
    proper velocity norm   u_mu u_mu=-c^2 ->  u_mu u^mu = +1

so the mass identity reads (mu0)^2 = 1 + 2 Phi - g^{mu nu} T_{mu nu} in
natural units.  The translation is verified, not assumed: the identity
and equation-of-motion residuals must vanish as O(h^2) under step
halving, which pins every sign.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .numerics import omega

__all__ = [
    "DiracField",
    "DiracMode",
    "FWField",
    "SpinorSample",
    "convective_momentum",
    "effective_mass_sq",
    "eval_spinor",
    "fw_gaussian_field",
    "fw_hedgehog_field",
    "fw_rotating_field",
    "fw_spinor",
    "fw_u",
    "fw_velocity",
    "gauge_transform",
    "quantum_potential_spinor",
    "spin_tensor",
    "verify_curl_formula",
    "verify_ensemble_balance",
    "verify_eom",
    "verify_fw_spin_tensor",
    "verify_mass_identity",
]

#: metric signature (+, -, -, -) as the diagonal
METRIC = np.array([1.0, -1.0, -1.0, -1.0])

_SIGMA = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)

GAMMA0 = np.diag([1.0, 1.0, -1.0, -1.0]).astype(complex)
GAMMA = np.empty((4, 4, 4), dtype=complex)
GAMMA[0] = GAMMA0
for _i in range(3):
    GAMMA[_i + 1] = np.block(
        [[np.zeros((2, 2)), _SIGMA[_i]], [-_SIGMA[_i], np.zeros((2, 2))]])

_CHI = {"up": np.array([1.0, 0.0], dtype=complex),
        "down": np.array([0.0, 1.0], dtype=complex)}

#: relative |psibar psi| floor marking a node of the field
EPS_NODE = 1e-12


def _plane_spinor(k: np.ndarray, spin: str) -> np.ndarray:
    """Positive-energy spinor, u^dagger u = 2 omega normalization."""
    w = float(omega(np.linalg.norm(k)))
    chi = _CHI[spin]
    sk = np.einsum("i,iab->ab", k, _SIGMA)
    lower = sk @ chi / (w + 1.0)
    return np.sqrt(w + 1.0) * np.concatenate([chi, lower])


@dataclass(frozen=True)
class DiracMode:
    k: np.ndarray          # 3-vector wavenumber
    spin: str              # "up" | "down"
    coeff: complex

    def __post_init__(self):
        k = np.asarray(self.k, dtype=float)
        if k.shape != (3,):
            raise ValueError("mode wavenumber must be a 3-vector")
        if self.spin not in _CHI:
            raise ValueError(f"spin must be 'up' or 'down', not {self.spin!r}")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "coeff", complex(self.coeff))


class DiracField:
    """Superposition of positive-energy plane-wave modes.

    Each mode's spinor is checked against the free Dirac equation,
    (gamma^mu p_mu - 1) u = 0, to 1e-12 at construction.
    """

    def __init__(self, modes: list[DiracMode]):
        if not modes:
            raise ValueError("need at least one mode")
        self.modes = list(modes)
        self._u = []
        for m in self.modes:
            u = _plane_spinor(m.k, m.spin)
            w = float(omega(np.linalg.norm(m.k)))
            p = np.array([w, *m.k])
            slash = np.einsum("m,m,mab->ab", METRIC, p, GAMMA)
            res = np.linalg.norm(slash @ u - u) / np.linalg.norm(u)
            if res > 1e-12:
                raise AssertionError(
                    f"plane-wave spinor violates the Dirac equation: {res:.2e}")
            self._u.append(u)
        self._omega = np.array(
            [omega(np.linalg.norm(m.k)) for m in self.modes])

    @classmethod
    def random(cls, n_modes: int, seed: int, k_max: float = 1.0
               ) -> "DiracField":
        """Seeded random positive-energy field with |k| <= k_max."""
        rng = np.random.default_rng(seed)
        modes = []
        for _ in range(n_modes):
            k = rng.uniform(-1.0, 1.0, 3)
            k *= k_max * rng.uniform(0.1, 1.0) / max(np.linalg.norm(k), 1e-12)
            re, im = rng.uniform(-1.0, 1.0, 2)
            modes.append(DiracMode(k=k, spin=rng.choice(["up", "down"]),
                                   coeff=re + 1j * im))
        return cls(modes)


@dataclass
class SpinorSample:
    """psi and its coordinate derivatives at one spacetime point.

    dpsi[mu] = d psi / d x^mu with index order (t, x, y, z).
    """

    psi: np.ndarray        # (4,) complex
    dpsi: np.ndarray       # (4, 4) complex
    x: np.ndarray          # (4,) real: (t, x, y, z)

    @property
    def psibar(self) -> np.ndarray:
        return np.conj(self.psi) @ GAMMA0

    @property
    def dpsibar(self) -> np.ndarray:
        """(4, 4): row mu is d psibar / d x^mu."""
        return np.conj(self.dpsi) @ GAMMA0

    @property
    def density(self) -> float:
        """psibar psi; real by construction (imaginary part asserted)."""
        val = self.psibar @ self.psi
        if abs(val.imag) > 1e-10 * (abs(val.real) + 1e-300):
            raise AssertionError("psibar psi not real")
        return float(val.real)


def eval_spinor(field: DiracField, x) -> SpinorSample:
    """psi(x) = sum c u(k, s) exp(i(k.r - w t)) with analytic derivatives."""
    x = np.asarray(x, dtype=float)
    psi = np.zeros(4, dtype=complex)
    dpsi = np.zeros((4, 4), dtype=complex)
    for m, u, w in zip(field.modes, field._u, field._omega):
        phase = np.exp(1j * (m.k @ x[1:] - w * x[0]))
        term = m.coeff * phase * u
        psi += term
        dpsi[0] += -1j * w * term
        for j in range(3):
            dpsi[j + 1] += 1j * m.k[j] * term
    return SpinorSample(psi=psi, dpsi=dpsi, x=x)


def gauge_transform(s: SpinorSample, f: complex, df) -> SpinorSample:
    """Sample of f(x) psi given f and its gradient df[mu] at the point."""
    df = np.asarray(df, dtype=complex)
    return SpinorSample(psi=f * s.psi,
                        dpsi=f * s.dpsi + df[:, None] * s.psi[None, :],
                        x=s.x)


def convective_momentum(s: SpinorSample):
    """Contravariant convective momentum mu0 u^mu, or None at a node.

    Covariant components are (i/2)(psibar d_mu psi - c.c.)/(psibar psi);
    a single plane wave gives (omega, k) contravariant.  Real to
    rounding (asserted).
    """
    dens = s.density
    scale = float(np.linalg.norm(s.psi) * np.linalg.norm(s.dpsi) + 1e-300)
    if abs(dens) < EPS_NODE * scale:
        return None
    # covariant bilinear per index
    q = 0.5j * (np.einsum("a,ma->m", s.psibar, s.dpsi)
                - np.einsum("ma,a->m", s.dpsibar, s.psi)) / dens
    if np.max(np.abs(q.imag)) > 1e-10 * (np.max(np.abs(q.real)) + 1e-300):
        raise AssertionError("convective momentum not real")
    return METRIC * q.real


def effective_mass_sq(s: SpinorSample):
    """(mu0)^2 = q_mu q^mu; may go negative for extreme superpositions."""
    q = convective_momentum(s)
    if q is None:
        return None
    return float(np.sum(METRIC * q * q))


def _density(field: DiracField, x):
    """psibar psi in extended precision.

    The quantum potential and its gradient stack up to three finite
    differences; 80-bit evaluation of the density keeps the rounding
    floor below the O(h^2) truncation bias at h ~ 1e-3.
    """
    x = np.asarray(x, dtype=np.longdouble)
    psi = np.zeros(4, dtype=np.clongdouble)
    for m, u, w in zip(field.modes, field._u, field._omega):
        phase = np.exp(1j * (np.clongdouble(m.k @ x[1:])
                             - np.clongdouble(w) * x[0]))
        psi += np.clongdouble(m.coeff) * phase * u.astype(np.clongdouble)
    val = np.conj(psi) @ GAMMA0.astype(np.clongdouble) @ psi
    return val.real


def quantum_potential_spinor(field: DiracField, x, h: float = 1e-4) -> float:
    """Phi = -(1/2) R^{-1} (laplacian - d^2/dt^2) R, R = (psibar psi)^{1/2}.

    Central differences in all four coordinates with step h; the
    spacelike-positive d'Alembertian matches the scalar convention (so a
    single plane wave gives Phi = 0 and the mass identity closes).
    """
    x = np.asarray(x, dtype=float)
    center = _density(field, x)
    if center <= 0.0:
        raise ValueError("psibar psi not positive at the evaluation point")
    r0 = np.sqrt(center)
    box = 0.0
    for mu in range(4):
        step = np.zeros(4)
        step[mu] = h
        dp = _density(field, x + step)
        dm = _density(field, x - step)
        if dp <= 0.0 or dm <= 0.0:
            raise ValueError("psibar psi not positive on the stencil")
        second = (np.sqrt(dp) - 2.0 * r0 + np.sqrt(dm)) / np.longdouble(h * h)
        box += second if mu > 0 else -second
    return float(-0.5 * box / r0)


def spin_tensor(s: SpinorSample) -> np.ndarray:
    """Symmetric spin stress tensor from the first-derivative bilinears.

    T_{mu nu} = (1/2) D^{-1} [dbar_mu d_nu + dbar_nu d_mu]
              - (1/2) D^{-2} [(dbar_mu psi)(psibar d_nu) + (mu <-> nu)]

    with D = psibar psi; real and symmetric to rounding (asserted).
    Vanishes for any scalar-like (single spinor direction) field.
    """
    dens = s.density
    scale = float(np.linalg.norm(s.psi) ** 2 + 1e-300)
    if abs(dens) < EPS_NODE * scale:
        raise ValueError("spin tensor undefined at a node of psibar psi")
    db = s.dpsibar                       # (mu, a)
    d = s.dpsi                           # (nu, a)
    first = np.einsum("ma,na->mn", db, d)
    a = np.einsum("ma,a->m", db, s.psi)  # (dbar_mu psi)
    b = np.einsum("a,na->n", s.psibar, d)
    second = np.outer(a, b)
    T = (0.5 / dens) * (first + first.T) \
        - (0.5 / dens ** 2) * (second + second.T)
    # reality scale from the raw bilinears: T itself may be exactly 0
    term_scale = (np.max(np.abs(first)) / abs(dens)
                  + np.max(np.abs(second)) / dens ** 2 + 1e-300)
    if np.max(np.abs(T.imag)) > 1e-10 * term_scale:
        raise AssertionError("spin tensor not real")
    return T.real


def _metric_trace(T: np.ndarray) -> float:
    """g^{mu nu} T_{mu nu}."""
    return float(np.sum(METRIC * np.diag(T)))


def verify_mass_identity(field: DiracField, points, h: float = 1e-3):
    """Max residual of (mu0)^2 = 1 + 2 Phi - g^{mu nu} T_{mu nu}.

    Phi is finite-differenced (step h), everything else analytic, so the
    residual must scale as O(h^2).  Returns (max_residual, residuals).
    """
    res = []
    for x in points:
        s = eval_spinor(field, np.asarray(x, dtype=float))
        mu2 = effective_mass_sq(s)
        if mu2 is None:
            raise ValueError(f"sample point {x} sits on a node")
        phi = quantum_potential_spinor(field, x, h=h)
        res.append(abs(mu2 - (1.0 + 2.0 * phi - _metric_trace(spin_tensor(s)))))
    res = np.array(res)
    return float(res.max()), res


def _q_contra(field: DiracField, x) -> np.ndarray:
    q = convective_momentum(eval_spinor(field, np.asarray(x, dtype=float)))
    if q is None:
        raise ValueError(f"node at {x}")
    return q


def verify_eom(field: DiracField, points, h: float = 1e-3):
    """Max per-component residual of the stress-tensor equations of motion.

    R^mu = q^nu d_nu q^mu - g^{mu sigma} d_sigma Phi
           + g^{mu sigma} D^{-1} d^nu (D T_{nu sigma}),   D = psibar psi

    (the real-metric transcription of the covariant balance; a vanishing
    O(h^2) residual is what certifies the transcription).  Outer
    derivatives of q, Phi and D T by central differences with step h.
    Returns (max_residual, residuals (n_points, 4)).
    """
    def dens_T(x):
        s = eval_spinor(field, x)
        return s.density * spin_tensor(s)

    out = []
    for xp in points:
        xp = np.asarray(xp, dtype=float)
        s = eval_spinor(field, xp)
        dens = s.density
        q = _q_contra(field, xp)
        dq = np.empty((4, 4))        # dq[nu, mu] = d_nu q^mu
        dphi = np.empty(4)
        dM = np.empty((4, 4, 4))     # dM[lam, nu, sig] = d_lam (D T)_{nu sig}
        for nu in range(4):
            step = np.zeros(4)
            step[nu] = h
            dq[nu] = (_q_contra(field, xp + step)
                      - _q_contra(field, xp - step)) / (2.0 * h)
            dphi[nu] = (quantum_potential_spinor(field, xp + step, h=h)
                        - quantum_potential_spinor(field, xp - step, h=h)
                        ) / (2.0 * h)
            dM[nu] = (dens_T(xp + step) - dens_T(xp - step)) / (2.0 * h)
        conv = q @ dq                            # q^nu d_nu q^mu
        div = np.einsum("n,nns->s", METRIC, dM)  # d^nu (D T)_{nu sigma}
        resid = conv - METRIC * dphi + METRIC * div / dens
        out.append(np.abs(resid))
    out = np.array(out)
    return float(out.max()), out


# -- Foldy-Wouthuysen representation --------------------------------------


def fw_u(s_hat) -> np.ndarray:
    """FW spinor direction u(s): upper components only, u^dagger u = 1.

    u = (1 + s3, s1 + i s2, 0, 0) / sqrt(2 (1 + s3)); satisfies
    u^dagger sigma_k u = s_k.  Singular at s3 = -1 (rejected).
    """
    s1, s2, s3 = np.asarray(s_hat, dtype=float)
    if s3 <= -1.0 + 1e-12:
        raise ValueError("FW spinor undefined at s3 = -1")
    f = 1.0 / np.sqrt(2.0 * (1.0 + s3))
    return f * np.array([1.0 + s3, s1 + 1j * s2, 0.0, 0.0], dtype=complex)


def _du_ds(s_hat) -> np.ndarray:
    """du/ds_l, shape (3, 4); analytic."""
    s1, s2, s3 = np.asarray(s_hat, dtype=float)
    f = 1.0 / np.sqrt(2.0 * (1.0 + s3))
    w = np.array([1.0 + s3, s1 + 1j * s2, 0.0, 0.0], dtype=complex)
    out = np.zeros((3, 4), dtype=complex)
    out[0] = f * np.array([0, 1, 0, 0], dtype=complex)
    out[1] = f * np.array([0, 1j, 0, 0], dtype=complex)
    out[2] = (-f / (2.0 * (1.0 + s3))) * w
    out[2] += f * np.array([1, 0, 0, 0], dtype=complex)
    return out


@dataclass(frozen=True)
class FWField:
    """Static FW test field: amplitude, phase and unit spin direction.

    All callables are vectorized over points of shape (..., 3):
    A -> (...,), grad_A -> (..., 3), lap_A -> (...,), S -> (...,),
    grad_S -> (..., 3), s -> (..., 3), ds -> (..., 3, 3) with
    ds[..., j, l] = d s_l / d x_j.  |s| = 1 is checked on use.
    """

    A: object
    grad_A: object
    lap_A: object
    S: object
    grad_S: object
    s: object
    ds: object


def fw_spinor(field: FWField, x):
    """(psi, dpsi4) of the FW state A e^{iS} u(s) at a static point.

    dpsi4 has shape (4, 4) with the time row zero (static fields).
    """
    x = np.asarray(x, dtype=float)
    a = float(field.A(x))
    sval = float(field.S(x))
    shat = np.asarray(field.s(x), dtype=float)
    if abs(np.linalg.norm(shat) - 1.0) > 1e-12:
        raise ValueError("spin direction not unit length")
    u = fw_u(shat)
    ph = np.exp(1j * sval)
    psi = a * ph * u
    ga = np.asarray(field.grad_A(x), dtype=float)
    gs = np.asarray(field.grad_S(x), dtype=float)
    dshat = np.asarray(field.ds(x), dtype=float)
    du = np.einsum("jl,la->ja", dshat, _du_ds(shat))
    dpsi4 = np.zeros((4, 4), dtype=complex)
    dpsi4[1:] = ph * (ga[:, None] * u[None, :]
                      + 1j * a * gs[:, None] * u[None, :] + a * du)
    return psi, dpsi4


def fw_velocity(field: FWField, x) -> np.ndarray:
    """Non-relativistic guidance velocity v_j = d_j S + Im(u^dag d_j u)."""
    x = np.asarray(x, dtype=float)
    shat = np.asarray(field.s(x), dtype=float)
    u = fw_u(shat)
    du = np.einsum("jl,la->ja", np.asarray(field.ds(x), dtype=float),
                   _du_ds(shat))
    return (np.asarray(field.grad_S(x), dtype=float)
            + np.einsum("a,ja->j", np.conj(u), du).imag)


def verify_fw_spin_tensor(field: FWField, points):
    """Max residual of T_{jk}(bilinears) = (1/4) d_j s_l d_k s_l.

    Both sides analytic; for an exact identity the residual is at
    rounding level (1e-10 budget).  Returns (max_residual, per-point).
    """
    res = []
    for x in points:
        psi, dpsi4 = fw_spinor(field, x)
        s = SpinorSample(psi=psi, dpsi=dpsi4,
                         x=np.array([0.0, *np.asarray(x, dtype=float)]))
        T = spin_tensor(s)[1:, 1:]
        ds = np.asarray(field.ds(np.asarray(x, dtype=float)), dtype=float)
        rhs = 0.25 * ds @ ds.T
        res.append(np.max(np.abs(T - rhs)))
    res = np.array(res)
    return float(res.max()), res


_EPS3 = np.zeros((3, 3, 3))
for _p, _s in (((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
               ((0, 2, 1), -1), ((2, 1, 0), -1), ((1, 0, 2), -1)):
    _EPS3[_p] = _s


def verify_curl_formula(field: FWField, points, h: float = 1e-4):
    """Max residual of the circulation identity.

    curl_k v = (1/4) eps_{kji} eps_{lmn} s_l d_j s_m d_i s_n
    with curl v by central differences of the analytic velocity (O(h^2))
    and the right side fully analytic.  Returns (max_residual, per-point).
    """
    res = []
    for x in points:
        x = np.asarray(x, dtype=float)
        curl = np.zeros(3)
        for k in range(3):
            j, i = (k + 1) % 3, (k + 2) % 3
            ej = np.zeros(3)
            ei = np.zeros(3)
            ej[j] = h
            ei[i] = h
            dvi_dj = (fw_velocity(field, x + ej)[i]
                      - fw_velocity(field, x - ej)[i]) / (2.0 * h)
            dvj_di = (fw_velocity(field, x + ei)[j]
                      - fw_velocity(field, x - ei)[j]) / (2.0 * h)
            curl[k] = dvi_dj - dvj_di
        shat = np.asarray(field.s(x), dtype=float)
        ds = np.asarray(field.ds(x), dtype=float)   # ds[j, m] = d_j s_m
        rhs = 0.25 * np.einsum("kji,lmn,l,jm,in->k", _EPS3, _EPS3,
                               shat, ds, ds)
        res.append(np.max(np.abs(curl - rhs)))
    res = np.array(res)
    return float(res.max()), res


def verify_ensemble_balance(field: FWField, box_half: float, n: int = 61,
                            h: float = 1e-3):
    """Relative residual of the vanishing ensemble-average acceleration.

    Integrates A^2 [d_j Phi + A^{-2} d_i (A^2 T_{ji})] over the box by a
    uniform-grid Riemann sum (spectrally accurate for the decaying test
    fields); each component should integrate to ~0 because both terms
    are total derivatives after the amplitude-weighted average.  Phi is
    the non-relativistic -(1/2) lap A / A; its gradient and the stress
    divergence use central differences with step h (decoupled from the
    grid spacing).

    Returns max_j |integral_j| / sum_j integral of A^2 |integrand_j|.
    Warns if A is not negligible on the box boundary.
    """
    axis = np.linspace(-box_half, box_half, n)
    dx = axis[1] - axis[0]
    X = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1)
    pts = X.reshape(-1, 3)
    a = np.asarray(field.A(pts), dtype=float)
    peak = a.max()
    face = np.abs(pts) >= box_half - 1e-12
    if np.max(a[np.any(face, axis=1)]) > 1e-10 * peak:
        warnings.warn("amplitude not negligible on the box boundary; "
                      "the balance integrals will leak", RuntimeWarning,
                      stacklevel=2)

    def phi(p):
        return -0.5 * np.asarray(field.lap_A(p), dtype=float) \
            / np.asarray(field.A(p), dtype=float)

    def stress(p):
        ds = np.asarray(field.ds(p), dtype=float)
        return 0.25 * np.einsum("...jl,...il->...ji", ds, ds)

    grad_phi = np.empty((pts.shape[0], 3))
    for i in range(3):
        step = np.zeros(3)
        step[i] = h
        grad_phi[:, i] = (phi(pts + step) - phi(pts - step)) / (2.0 * h)
    div = np.zeros((pts.shape[0], 3))
    for i in range(3):
        step = np.zeros(3)
        step[i] = h
        ap2 = np.asarray(field.A(pts + step), dtype=float) ** 2
        am2 = np.asarray(field.A(pts - step), dtype=float) ** 2
        tp = stress(pts + step)
        tm = stress(pts - step)
        div += (ap2[:, None] * tp[:, :, i]
                - am2[:, None] * tm[:, :, i]) / (2.0 * h)
    integrand = a[:, None] ** 2 * grad_phi + div
    vol = dx ** 3
    comp = np.sum(integrand, axis=0) * vol
    norm = np.sum(a[:, None] ** 2 * np.abs(grad_phi)
                  + np.abs(div)) * vol
    return float(np.max(np.abs(comp)) / norm)


# -- built-in FW test fields ----------------------------------------------


def _gaussian_parts():
    def A(p):
        p = np.asarray(p, dtype=float)
        return np.exp(-0.5 * np.sum(p * p, axis=-1))

    def grad_A(p):
        p = np.asarray(p, dtype=float)
        return -p * A(p)[..., None]

    def lap_A(p):
        p = np.asarray(p, dtype=float)
        return (np.sum(p * p, axis=-1) - 3.0) * A(p)

    return A, grad_A, lap_A


def _zero_phase():
    def S(p):
        return np.zeros(np.asarray(p, dtype=float).shape[:-1])

    def grad_S(p):
        return np.zeros(np.asarray(p, dtype=float).shape)

    return S, grad_S


def fw_gaussian_field() -> FWField:
    """Gaussian amplitude, zero phase, constant spin along z."""
    A, grad_A, lap_A = _gaussian_parts()
    S, grad_S = _zero_phase()

    def s(p):
        p = np.asarray(p, dtype=float)
        out = np.zeros(p.shape)
        out[..., 2] = 1.0
        return out

    def ds(p):
        p = np.asarray(p, dtype=float)
        return np.zeros(p.shape[:-1] + (3, 3))

    return FWField(A=A, grad_A=grad_A, lap_A=lap_A, S=S, grad_S=grad_S,
                   s=s, ds=ds)


def fw_rotating_field(rate: float = 0.5) -> FWField:
    """Spin rotating in the x-z plane, s = (sin(rate x), 0, cos(rate x))."""
    A, grad_A, lap_A = _gaussian_parts()
    S, grad_S = _zero_phase()

    def s(p):
        p = np.asarray(p, dtype=float)
        th = rate * p[..., 0]
        return np.stack([np.sin(th), np.zeros_like(th), np.cos(th)], axis=-1)

    def ds(p):
        p = np.asarray(p, dtype=float)
        th = rate * p[..., 0]
        out = np.zeros(p.shape[:-1] + (3, 3))
        out[..., 0, 0] = rate * np.cos(th)
        out[..., 0, 2] = -rate * np.sin(th)
        return out

    return FWField(A=A, grad_A=grad_A, lap_A=lap_A, S=S, grad_S=grad_S,
                   s=s, ds=ds)


def fw_hedgehog_field(c: float = 2.0) -> FWField:
    """Hedgehog-like spin s = (x, y, c)/|(x, y, c)| (varies in x and y)."""
    A, grad_A, lap_A = _gaussian_parts()
    S, grad_S = _zero_phase()

    def _n(p):
        p = np.asarray(p, dtype=float)
        n = np.stack([p[..., 0], p[..., 1],
                      np.full(p.shape[:-1], c)], axis=-1)
        return n

    def s(p):
        n = _n(p)
        return n / np.linalg.norm(n, axis=-1, keepdims=True)

    def ds(p):
        n = _n(p)
        r = np.linalg.norm(n, axis=-1)
        out = np.zeros(n.shape[:-1] + (3, 3))
        # d_j s_l = delta_{jl}/r - n_j n_l / r^3, for j in {x, y} only.
        for j in range(2):
            for l in range(3):
                out[..., j, l] = ((1.0 if j == l else 0.0) / r
                                  - n[..., j] * n[..., l] / r ** 3)
        return out

    return FWField(A=A, grad_A=grad_A, lap_A=lap_A, S=S, grad_S=grad_S,
                   s=s, ds=ds)
