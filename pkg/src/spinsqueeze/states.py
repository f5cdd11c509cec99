"""Symmetric N-qubit states in the Dicke basis and collective spin operators.

States of N spin-1/2 particles restricted to the maximal angular-momentum
sector j = N/2 are stored as complex amplitude vectors of length N + 1.
Index 0 holds the amplitude of m = +j and index N holds m = -j; every file
format written by this package uses the same descending-m order.

Conventions
-----------
* A coherent spin state ``css(N, 0, phi)`` is the fully polarized state
  |j, +j>, so that <J_z> = (N/2) cos(theta) for general theta.
* The parity operator is diagonal with entries (-1)**(j + m).
* All operations are pure functions; returned arrays are marked read-only.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln

__all__ = [
    "SymmetricState",
    "CollectiveOperator",
    "OperatorSet",
    "MomentSet",
    "LocalMoments",
    "m_values",
    "build_operators",
    "spin_matrices",
    "css",
    "dicke",
    "rotate",
    "expectation",
    "moments",
    "local_moments",
    "local_from_moments",
    "collective_from_local",
    "husimi_q",
    "gauss_sphere_grid",
    "state_to_json",
    "state_from_json",
    "state_to_csv",
    "state_from_csv",
]

_NORM_TOL = 1e-12


def _check_n(n_particles: int) -> int:
    n = int(n_particles)
    if n < 1 or n != n_particles:
        raise ValueError(f"invalid system size N={n_particles!r}; need integer N >= 1")
    return n


def m_values(n_particles: int) -> np.ndarray:
    """J_z eigenvalues in storage order: +j, j-1, ..., -j with j = N/2."""
    n = _check_n(n_particles)
    return n / 2.0 - np.arange(n + 1)


def _ladder_plus_coeff(j: float, m: np.ndarray) -> np.ndarray:
    # <j,m+1| J_+ |j,m> = sqrt(j(j+1) - m(m+1))
    return np.sqrt(np.maximum(j * (j + 1) - m * (m + 1), 0.0))


@dataclass(frozen=True)
class SymmetricState:
    """Normalized amplitude vector over the Dicke basis of N qubits."""

    n_particles: int
    amplitudes: np.ndarray

    def __post_init__(self):
        n = _check_n(self.n_particles)
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (n + 1,):
            raise ValueError(
                f"amplitude vector has length {amps.shape}, expected ({n + 1},)"
            )
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > _NORM_TOL:
            raise ValueError(f"state norm^2 = {norm2!r} is not 1 within tolerance")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, n_particles: int, amplitudes: np.ndarray) -> "SymmetricState":
        amps = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(amps)
        if norm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(n_particles, amps / norm)

    @property
    def j(self) -> float:
        return self.n_particles / 2.0

    def norm_error(self) -> float:
        return abs(float(np.vdot(self.amplitudes, self.amplitudes).real) - 1.0)


@dataclass(frozen=True)
class CollectiveOperator:
    """Dense (N+1)x(N+1) operator in the Dicke basis."""

    n_particles: int
    matrix: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        n = _check_n(self.n_particles)
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (n + 1, n + 1):
            raise ValueError(f"matrix shape {mat.shape} does not match N={n}")
        if self.hermitian and np.max(np.abs(mat - mat.conj().T)) > 1e-12:
            raise ValueError("matrix declared hermitian is not self-adjoint")
        mat = mat.copy()
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)


@dataclass(frozen=True)
class OperatorSet:
    jx: CollectiveOperator
    jy: CollectiveOperator
    jz: CollectiveOperator
    jplus: CollectiveOperator
    jminus: CollectiveOperator
    j_squared: CollectiveOperator
    parity: CollectiveOperator


def spin_matrices(j: float) -> dict[str, np.ndarray]:
    """Angular momentum matrices for a single spin of size j (dimension 2j+1).

    Basis order is m = +j down to -j, matching the Dicke-state storage order.
    """
    dim = int(round(2 * j)) + 1
    if abs(2 * j - round(2 * j)) > 1e-9 or j <= 0:
        raise ValueError(f"spin size j={j!r} must be a positive integer or half-integer")
    m = j - np.arange(dim)
    f = _ladder_plus_coeff(j, m)
    jp = np.zeros((dim, dim), dtype=complex)
    # J_+ maps index i (value m_i) to index i-1 (value m_i + 1)
    jp[np.arange(dim - 1), np.arange(1, dim)] = f[1:]
    jm = jp.conj().T
    jx = (jp + jm) / 2.0
    jy = (jp - jm) / 2.0j
    jz = np.diag(m).astype(complex)
    return {"jx": jx, "jy": jy, "jz": jz, "jp": jp, "jm": jm}


def build_operators(n_particles: int) -> OperatorSet:
    """Collective operators J_x, J_y, J_z, J_+, J_-, J^2 and parity for N qubits."""
    n = _check_n(n_particles)
    mats = spin_matrices(n / 2.0)
    j2 = mats["jx"] @ mats["jx"] + mats["jy"] @ mats["jy"] + mats["jz"] @ mats["jz"]
    par = np.diag((-1.0) ** (n - np.arange(n + 1))).astype(complex)
    mk = lambda m, herm: CollectiveOperator(n, m, hermitian=herm)
    return OperatorSet(
        jx=mk(mats["jx"], True),
        jy=mk(mats["jy"], True),
        jz=mk(mats["jz"], True),
        jplus=mk(mats["jp"], False),
        jminus=mk(mats["jm"], False),
        j_squared=mk(j2, True),
        parity=mk(par, True),
    )


def _log_binom(n: int, k: np.ndarray) -> np.ndarray:
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def css(n_particles: int, theta: float, phi: float) -> SymmetricState:
    """Coherent spin state with mean spin along (theta, phi).

    Amplitudes follow the binomial profile
    c_m = sqrt(C(N, j-m)) cos(theta/2)^(j+m) sin(theta/2)^(j-m) e^{i (j-m) phi},
    evaluated in log space so arbitrary N does not overflow.
    """
    n = _check_n(n_particles)
    if not 0.0 <= theta <= np.pi:
        raise ValueError(f"polar angle theta={theta!r} outside [0, pi]")
    j = n / 2.0
    m = m_values(n)
    k = j - m  # number of flipped spins, 0..N
    c_half, s_half = np.cos(theta / 2.0), np.sin(theta / 2.0)
    log_mag = 0.5 * _log_binom(n, k)
    zero = np.zeros(n + 1, dtype=bool)
    with np.errstate(divide="ignore"):
        exp_c = j + m
        exp_s = k
        zero |= (c_half == 0.0) & (exp_c > 0)
        zero |= (s_half == 0.0) & (exp_s > 0)
        log_mag = log_mag + np.where(exp_c > 0, exp_c * np.log(np.maximum(c_half, 1e-300)), 0.0)
        log_mag = log_mag + np.where(exp_s > 0, exp_s * np.log(np.maximum(s_half, 1e-300)), 0.0)
    amps = np.where(zero, 0.0, np.exp(log_mag)) * np.exp(1j * k * phi)
    return SymmetricState.normalized(n, amps)


def dicke(n_particles: int, m: float) -> SymmetricState:
    """Dicke state |j, m>, the J_z eigenstate with eigenvalue m."""
    n = _check_n(n_particles)
    j = n / 2.0
    idx = j - m
    if abs(idx - round(idx)) > 1e-9 or not -j - 1e-9 <= m <= j + 1e-9:
        raise ValueError(f"m={m!r} is not in the ladder -j..j for j={j}")
    amps = np.zeros(n + 1, dtype=complex)
    amps[int(round(idx))] = 1.0
    return SymmetricState(n, amps)


def _apply_jz(c: np.ndarray, n: int) -> np.ndarray:
    return m_values(n) * c


def _apply_jp(c: np.ndarray, n: int) -> np.ndarray:
    f = _ladder_plus_coeff(n / 2.0, m_values(n))
    out = np.zeros_like(c)
    out[:-1] = f[1:] * c[1:]
    return out


def _apply_jm(c: np.ndarray, n: int) -> np.ndarray:
    f = _ladder_plus_coeff(n / 2.0, m_values(n))
    out = np.zeros_like(c)
    out[1:] = f[1:] * c[:-1]
    return out


def rotate(state: SymmetricState, axis, angle: float) -> SymmetricState:
    """Apply exp(-i * angle * J.axis) to the state.

    The generator is tridiagonal in the Dicke basis, so the propagator is
    evaluated exactly through a real symmetric tridiagonal eigendecomposition
    (a diagonal phase gauge removes the complex off-diagonal phases).
    """
    ax = np.asarray(axis, dtype=float)
    if ax.shape != (3,):
        raise ValueError("rotation axis must be a 3-vector")
    norm = np.linalg.norm(ax)
    if norm == 0.0:
        raise ValueError("rotation axis has zero length")
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"rotation axis norm {norm!r} is not 1 within 1e-10")
    n = state.n_particles
    m = m_values(n)
    c = np.asarray(state.amplitudes, dtype=complex)
    if ax[0] ** 2 + ax[1] ** 2 < 1e-30:
        # pure J_z rotation, diagonal
        out = np.exp(-1j * angle * ax[2] * m) * c
        return SymmetricState(n, out)
    f = _ladder_plus_coeff(n / 2.0, m)
    t = 0.5 * (ax[0] - 1j * ax[1]) * f[1:]  # couples index i to i-1
    diag = ax[2] * m
    phases = np.zeros(n + 1)
    phases[1:] = -np.cumsum(np.angle(t))
    gauge = np.exp(1j * phases)
    w, v = eigh_tridiagonal(diag, np.abs(t))
    tmp = v.T @ (np.conj(gauge) * c)
    out = gauge * (v @ (np.exp(-1j * angle * w) * tmp))
    return SymmetricState(n, out)


def expectation(state: SymmetricState, operator) -> complex:
    mat = operator.matrix if isinstance(operator, CollectiveOperator) else np.asarray(operator)
    c = state.amplitudes
    return complex(np.vdot(c, mat @ c))


@dataclass(frozen=True)
class MomentSet:
    """First and symmetrized second moments of the collective spin.

    ``corr`` holds C_kl = <J_l J_k + J_k J_l>/2, ``cov`` the covariance
    gamma_kl = C_kl - <J_k><J_l>, and ``gamma_big`` the combination
    (N-1) gamma + C whose smallest eigenvalue drives the rotation-invariant
    squeezing parameters.
    """

    n_particles: int
    mean: np.ndarray
    corr: np.ndarray
    cov: np.ndarray
    gamma_big: np.ndarray
    j_squared: float

    def __post_init__(self):
        _check_n(self.n_particles)
        for name in ("mean", "corr", "cov", "gamma_big"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.mean.shape != (3,) or self.corr.shape != (3, 3):
            raise ValueError("mean must be a 3-vector and corr a 3x3 matrix")
        for name in ("corr", "cov", "gamma_big"):
            arr = getattr(self, name)
            if np.max(np.abs(arr - arr.T)) > 1e-10 * max(1.0, np.max(np.abs(arr))):
                raise ValueError(f"{name} matrix is not symmetric")
        lo = np.linalg.eigvalsh(self.cov)[0]
        if lo < -1e-10 * max(1.0, float(np.max(np.abs(self.cov)))):
            raise ValueError(f"covariance matrix has negative eigenvalue {lo!r}")

    @classmethod
    def from_mean_corr(cls, n_particles: int, mean, corr) -> "MomentSet":
        mean = np.asarray(mean, dtype=float)
        corr = np.asarray(corr, dtype=float)
        corr = (corr + corr.T) / 2.0
        cov = corr - np.outer(mean, mean)
        gamma_big = (n_particles - 1) * cov + corr
        return cls(n_particles, mean, corr, cov, gamma_big, float(np.trace(corr)))

    @property
    def mean_length(self) -> float:
        return float(np.linalg.norm(self.mean))


def moments(state: SymmetricState) -> MomentSet:
    """All first and second collective moments of a symmetric state."""
    n = state.n_particles
    c = np.asarray(state.amplitudes, dtype=complex)
    pc = _apply_jp(c, n)
    mc = _apply_jm(c, n)
    zc = _apply_jz(c, n)
    xc = (pc + mc) / 2.0
    yc = (pc - mc) / 2.0j
    vecs = (xc, yc, zc)
    mean = np.array([np.vdot(c, v).real for v in vecs])
    corr = np.empty((3, 3))
    for a in range(3):
        for b in range(a, 3):
            corr[a, b] = corr[b, a] = np.vdot(vecs[a], vecs[b]).real
    return MomentSet.from_mean_corr(n, mean, corr)


@dataclass(frozen=True)
class LocalMoments:
    """One- and two-site Pauli expectations of an exchange-symmetric state."""

    n_particles: int
    sz: float
    szsz: float
    spsm: float
    smsm: complex
    sdots: float

    def __post_init__(self):
        n = _check_n(self.n_particles)
        if n < 2:
            raise ValueError("local pair moments need N >= 2")
        slack = 1e-9
        if abs(self.sz) > 1.0 + slack or abs(self.szsz) > 1.0 + slack:
            raise ValueError("single/two-site z moments outside [-1, 1]")
        if abs(self.sdots) > 3.0 + slack:
            raise ValueError("|<sigma1.sigma2>| exceeds 3")
        if abs(complex(self.spsm).imag) > slack or abs(self.spsm) > 0.5 + slack:
            raise ValueError("<sigma1+ sigma2-> must be real with modulus <= 1/2")
        object.__setattr__(self, "spsm", float(np.real(self.spsm)))
        object.__setattr__(self, "smsm", complex(self.smsm))


def local_from_moments(mset: MomentSet) -> LocalMoments:
    """Invert the collective <-> pair-moment relations of a symmetric state."""
    n = mset.n_particles
    if n < 2:
        raise ValueError("no pair exists for N = 1")
    jz = mset.mean[2]
    jz2 = mset.corr[2, 2]
    jperp2 = mset.corr[0, 0] + mset.corr[1, 1]
    # J_-^2 = J_x^2 - J_y^2 - i (J_x J_y + J_y J_x)
    jm2 = (mset.corr[0, 0] - mset.corr[1, 1]) - 2.0j * mset.corr[0, 1]
    nn1 = n * (n - 1)
    return LocalMoments(
        n_particles=n,
        sz=2.0 * jz / n,
        szsz=(4.0 * jz2 - n) / nn1,
        spsm=(2.0 * jperp2 - n) / (2.0 * nn1),
        smsm=jm2 / nn1,
        sdots=(4.0 * mset.j_squared - 3.0 * n) / nn1,
    )


def local_moments(state: SymmetricState) -> LocalMoments:
    return local_from_moments(moments(state))


def collective_from_local(lm: LocalMoments) -> MomentSet:
    """Rebuild collective moments from pair moments of a parity-symmetric state.

    Valid when the mean spin is along z and z-transverse correlations vanish,
    which holds for every state with definite parity.
    """
    n = lm.n_particles
    nn1 = n * (n - 1)
    jz = n * lm.sz / 2.0
    jz2 = (n + nn1 * lm.szsz) / 4.0
    jperp2 = n / 2.0 + nn1 * lm.spsm
    jm2 = nn1 * complex(lm.smsm)
    cxx = (jperp2 + jm2.real) / 2.0
    cyy = (jperp2 - jm2.real) / 2.0
    cxy = -jm2.imag / 2.0
    mean = np.array([0.0, 0.0, jz])
    corr = np.array([[cxx, cxy, 0.0], [cxy, cyy, 0.0], [0.0, 0.0, jz2]])
    return MomentSet.from_mean_corr(n, mean, corr)


def husimi_q(state: SymmetricState, grid) -> np.ndarray:
    """Husimi function Q(theta0, phi0) = |<theta0, phi0 | state>|^2 on a grid.

    ``grid`` is a sequence of (theta0, phi0) pairs; an empty grid yields an
    empty array.
    """
    pts = np.asarray(list(grid), dtype=float)
    if pts.size == 0:
        return np.zeros(0)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("grid must be a sequence of (theta, phi) pairs")
    th, ph = pts[:, 0], pts[:, 1]
    if np.any((th < -1e-12) | (th > np.pi + 1e-12)):
        raise ValueError("grid polar angles must lie in [0, pi]")
    n = state.n_particles
    j = n / 2.0
    m = m_values(n)
    k = j - m
    logb = 0.5 * _log_binom(n, k)
    c_half = np.cos(th / 2.0)[:, None]
    s_half = np.sin(th / 2.0)[:, None]
    exp_c = (j + m)[None, :]
    exp_s = k[None, :]
    zero = ((c_half == 0.0) & (exp_c > 0)) | ((s_half == 0.0) & (exp_s > 0))
    log_mag = (
        logb[None, :]
        + np.where(exp_c > 0, exp_c * np.log(np.maximum(c_half, 1e-300)), 0.0)
        + np.where(exp_s > 0, exp_s * np.log(np.maximum(s_half, 1e-300)), 0.0)
    )
    mag = np.where(zero, 0.0, np.exp(log_mag))
    phase = np.exp(-1j * k[None, :] * ph[:, None])  # conj of the CSS phases
    overlap = (mag * phase) @ state.amplitudes
    return np.abs(overlap) ** 2


def gauss_sphere_grid(n_theta: int, n_phi: int):
    """Gauss-Legendre x uniform-phi quadrature grid on the sphere.

    Returns (points, weights) with points an (n_theta*n_phi, 2) array of
    (theta, phi) and weights summing to 4*pi.
    """
    x, wx = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(x)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    wphi = 2.0 * np.pi / n_phi
    pts = np.column_stack(
        [np.repeat(theta, n_phi), np.tile(phi, n_theta)]
    )
    weights = np.repeat(wx * wphi, n_phi)
    return pts, weights


# ---------------------------------------------------------------------------
# serialization (states are binary-free: JSON {n, re, im} or CSV m,re,im rows)
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def state_to_json(state: SymmetricState) -> str:
    c = state.amplitudes
    re = ", ".join(_fmt(v) for v in c.real)
    im = ", ".join(_fmt(v) for v in c.imag)
    return f'{{"n": {state.n_particles}, "re": [{re}], "im": [{im}]}}'


def state_from_json(text: str) -> SymmetricState:
    obj = json.loads(text)
    amps = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)
    return SymmetricState(int(obj["n"]), amps)


def state_to_csv(state: SymmetricState) -> str:
    # rows ordered m = +j down to -j, matching the amplitude storage order
    buf = io.StringIO()
    buf.write("m,re,im\n")
    for m, a in zip(m_values(state.n_particles), state.amplitudes):
        buf.write(f"{_fmt(m)},{_fmt(a.real)},{_fmt(a.imag)}\n")
    return buf.getvalue()


def state_from_csv(text: str) -> SymmetricState:
    lines = [ln for ln in text.strip().splitlines() if ln and not ln.startswith("m,")]
    rows = [ln.split(",") for ln in lines]
    n = len(rows) - 1
    amps = np.zeros(n + 1, dtype=complex)
    j = n / 2.0
    for m_s, re_s, im_s in rows:
        idx = int(round(j - float(m_s)))
        amps[idx] = float(re_s) + 1j * float(im_s)
    return SymmetricState(n, amps)
