"""Squeezing generation: one-axis twisting, driven and two-axis variants,
and the quantum kicked top.

The one-axis twisted state exp(-i theta J_x^2 / 2)|j,-j> admits closed-form
pair moments; everything else is evolved exactly in the Dicke basis through
Hermitian eigendecompositions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.linalg import eigh, eigh_tridiagonal
from scipy.optimize import minimize_scalar

from .states import (
    LocalMoments,
    SymmetricState,
    _ladder_plus_coeff,
    collective_from_local,
    m_values,
    moments,
    rotate,
    spin_matrices,
)
from .metrics import SqueezingReport, compute_report, min_transverse_variance

__all__ = [
    "OAT_X",
    "OAT_Z",
    "TAT",
    "OAT_TRANSVERSE",
    "HamiltonianSpec",
    "KickedTopSpec",
    "evolve",
    "oat_closed_form",
    "oat_concurrence",
    "oat_xi_s2",
    "oat_state",
    "optimal_oat",
    "OptimalOAT",
    "tat_minimum",
    "kicked_top_trajectory",
    "KickedTopResult",
]

OAT_X = "oat_x"
OAT_Z = "oat_z"
TAT = "tat"
OAT_TRANSVERSE = "oat_transverse"

_KINDS = (OAT_X, OAT_Z, TAT, OAT_TRANSVERSE)


@dataclass(frozen=True)
class HamiltonianSpec:
    """Twisting Hamiltonian: chi*Jx^2, chi*Jz^2, chi*(JxJy+JyJx) or
    chi*Jx^2 + B*Jz."""

    kind: str
    chi: float
    field_b: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown Hamiltonian kind {self.kind!r}")
        if not math.isfinite(self.chi):
            raise ValueError("coupling chi must be finite")
        if self.kind != OAT_TRANSVERSE and self.field_b != 0.0:
            raise ValueError("transverse field only allowed for kind 'oat_transverse'")


@dataclass(frozen=True)
class KickedTopSpec:
    """Floquet kicked top: twist exp(-i kappa/(2j) Jz^2) after a J_y kick."""

    kappa: float
    j: float
    p: float = math.pi / 2.0

    def __post_init__(self):
        if self.j <= 0 or abs(2 * self.j - round(2 * self.j)) > 1e-9:
            raise ValueError("spin size j must be a positive (half-)integer")


def _evolved(state: SymmetricState, w: np.ndarray, v: np.ndarray, t: float) -> SymmetricState:
    c = v.conj().T @ state.amplitudes
    out = v @ (np.exp(-1j * t * w) * c)
    return SymmetricState(state.n_particles, out)


def evolve(state: SymmetricState, h: HamiltonianSpec, t: float) -> SymmetricState:
    """Unitary evolution exp(-i H t) via exact eigendecomposition."""
    if not math.isfinite(t) or not math.isfinite(h.chi * t):
        raise ValueError("evolution time (and chi*t) must be finite")
    n = state.n_particles
    m = m_values(n)
    if h.kind == OAT_Z:
        out = np.exp(-1j * h.chi * t * m**2) * state.amplitudes
        return SymmetricState(n, out)
    if h.kind == OAT_X:
        f = _ladder_plus_coeff(n / 2.0, m)
        w, v = eigh_tridiagonal(np.zeros(n + 1), f[1:] / 2.0)
        return _evolved(state, h.chi * w**2, v, t)
    mats = spin_matrices(n / 2.0)
    if h.kind == TAT:
        ham = h.chi * (mats["jx"] @ mats["jy"] + mats["jy"] @ mats["jx"])
    else:  # OAT_TRANSVERSE
        ham = h.chi * (mats["jx"] @ mats["jx"]) + h.field_b * mats["jz"]
    w, v = eigh(ham)
    return _evolved(state, w, v, t)


def oat_state(n_particles: int, theta: float) -> SymmetricState:
    """One-axis twisted state exp(-i theta Jx^2 / 2) |j,-j>."""
    from .states import dicke

    south = dicke(n_particles, -n_particles / 2.0)
    return evolve(south, HamiltonianSpec(OAT_X, 0.5), theta)


def oat_closed_form(n_particles: int, theta: float) -> LocalMoments:
    """Closed-form pair moments of the one-axis twisted state at angle
    theta = 2*chi*t."""
    n = int(n_particles)
    if n < 2:
        raise ValueError("one-axis twisting pair moments need N >= 2")
    half = theta / 2.0
    cos_n1 = math.cos(half) ** (n - 1)
    cos_n2 = math.cos(theta) ** (n - 2)
    cos_half_n2 = math.cos(half) ** (n - 2)
    return LocalMoments(
        n_particles=n,
        sz=-cos_n1,
        szsz=0.5 * (1.0 + cos_n2),
        spsm=0.125 * (1.0 - cos_n2),
        smsm=-0.125 * (1.0 - cos_n2) - 0.5j * math.sin(half) * cos_half_n2,
        sdots=1.0,
    )


def oat_concurrence(n_particles: int, theta: float) -> float:
    """Pairwise concurrence of the one-axis twisted state."""
    n = int(n_particles)
    if n < 2:
        raise ValueError("concurrence needs N >= 2")
    a = 1.0 - math.cos(theta) ** (n - 2)
    b2 = 16.0 * math.sin(theta / 2.0) ** 2 * math.cos(theta / 2.0) ** (2 * n - 4)
    return 0.25 * (math.sqrt(a * a + b2) - a)


def oat_xi_s2(n_particles: int, theta: float) -> float:
    return 1.0 - (n_particles - 1) * oat_concurrence(n_particles, theta)


class OptimalOAT(NamedTuple):
    theta_star: float
    xi_s2_star: float
    delta_star: float


def optimal_oat(n_particles: int) -> OptimalOAT:
    """Twist angle minimizing xi_S^2, the minimum, and the squeezing angle there.

    Uses the closed forms, a coarse scan bracketing the dip, then bounded
    scalar minimization.
    """
    n = int(n_particles)
    if n < 10:
        raise ValueError("optimal-angle search assumes N >= 10")
    theta0 = 12.0 ** (1.0 / 6.0) * (n / 2.0) ** (-2.0 / 3.0)
    hi = min(math.pi, 10.0 * theta0)
    grid = np.linspace(theta0 / 50.0, hi, 400)
    vals = [oat_xi_s2(n, th) for th in grid]
    k = int(np.argmin(vals))
    lo = grid[max(0, k - 1)]
    up = grid[min(len(grid) - 1, k + 1)]
    res = minimize_scalar(lambda th: oat_xi_s2(n, th), bounds=(lo, up), method="bounded",
                          options={"xatol": 1e-12})
    theta_star = float(res.x)
    mset = collective_from_local(oat_closed_form(n, theta_star))
    _, angle = min_transverse_variance(mset)
    # tilt of the squeezed direction away from the second transverse axis,
    # i.e. the arctan(B/A)/2 angle that shrinks like N^(-1/3)
    delta = abs(math.pi / 2.0 - angle)
    return OptimalOAT(theta_star, float(res.fun), delta)


def tat_minimum(n_particles: int, coarse: int = 200) -> tuple[float, float]:
    """Minimum of xi_S^2 over chi*t in (0, pi/2] for two-axis twisting.

    A coarse scan locates the dip; golden-section refinement polishes it.
    Returns (chi_t_star, xi_s2_min).
    """
    from .states import dicke

    n = int(n_particles)
    south = dicke(n, -n / 2.0)
    mats = spin_matrices(n / 2.0)
    ham = mats["jx"] @ mats["jy"] + mats["jy"] @ mats["jx"]
    w, v = eigh(ham)

    def xi_at(chi_t: float) -> float:
        psi = _evolved(south, w, v, chi_t)
        return compute_report(moments(psi)).xi_S2

    ts = np.linspace(math.pi / 2.0 / coarse, math.pi / 2.0, coarse)
    vals = [xi_at(t) for t in ts]
    k = int(np.argmin(vals))
    lo = ts[max(0, k - 1)]
    hi = ts[min(len(ts) - 1, k + 1)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = xi_at(c), xi_at(d)
    for _ in range(80):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = xi_at(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = xi_at(d)
        if b - a < 1e-12:
            break
    t_star = (a + b) / 2.0
    return t_star, xi_at(t_star)


class KickedTopResult(NamedTuple):
    reports: list
    means: np.ndarray
    vanishing_step: Optional[int]


def kicked_top_trajectory(
    initial: SymmetricState, spec: KickedTopSpec, n_kicks: int
) -> KickedTopResult:
    """Stroboscopic squeezing of the kicked top.

    Applies the Floquet map (rotate by p about y, then twist by kappa/(2j)
    about z, in that order on the state) for ``n_kicks`` steps and reports
    the squeezing parameters after each kick. ``vanishing_step`` is the kick
    index from which xi_S^2 stays at or above 1 for the rest of the simulated
    trajectory (transient blips above 1 with later revivals do not count), or
    None when the state is still squeezed at the final kick.
    """
    if n_kicks < 1:
        raise ValueError("need at least one kick")
    n = initial.n_particles
    if abs(spec.j - n / 2.0) > 1e-9:
        raise ValueError(f"spec.j={spec.j} does not match the state (N={n})")
    m = m_values(n)
    twist_phases = np.exp(-1j * spec.kappa / (2.0 * spec.j) * m**2)
    psi = initial
    reports: list[SqueezingReport] = []
    means = np.zeros((n_kicks, 3))
    yhat = np.array([0.0, 1.0, 0.0])
    last_squeezed = 0
    for step in range(1, n_kicks + 1):
        psi = rotate(psi, yhat, spec.p)
        psi = SymmetricState(n, twist_phases * psi.amplitudes)
        mset = moments(psi)
        rep = compute_report(mset)
        reports.append(rep)
        means[step - 1] = mset.mean
        if rep.xi_S2 is not None and rep.xi_S2 < 1.0:
            last_squeezed = step
    vanishing = None if last_squeezed == n_kicks else last_squeezed + 1
    return KickedTopResult(reports, means, vanishing)
