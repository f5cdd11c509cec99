"""Concurrence, pairwise correlation functions, and moment-based
entanglement criteria.

The two-qubit reduced density matrix of a parity + exchange-symmetric state
is block diagonal in the basis {|00>, |11>, |01>, |10>}; its four independent
elements follow directly from collective moments, which is what experiments
measure.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .states import MomentSet, SymmetricState, moments, spin_matrices
from .metrics import mean_spin_direction, min_transverse_variance, transverse_frame

__all__ = [
    "TwoQubitRDM",
    "TwoModeMoments",
    "CriteriaReport",
    "rdm_from_collective",
    "concurrence_general",
    "concurrence_symmetric",
    "pairwise_correlation",
    "pairwise_correlation_matrix",
    "min_pairwise_correlation",
    "evaluate_criteria",
]


@dataclass(frozen=True)
class TwoQubitRDM:
    """Block-diagonal two-qubit state: diag block (v_plus, v_minus) coupled
    by u in {|00>, |11>}, and the symmetric block [[w, y], [y, w]]."""

    v_plus: float
    v_minus: float
    w: float
    y: float
    u: complex

    def __post_init__(self):
        if abs(self.v_plus + self.v_minus + 2.0 * self.w - 1.0) > 1e-12:
            raise ValueError("two-qubit matrix elements do not sum to unit trace")
        if min(self.v_plus, self.v_minus, self.w) < -1e-12:
            raise ValueError("negative population in two-qubit matrix")
        if math.sqrt(max(self.v_plus, 0.0) * max(self.v_minus, 0.0)) < abs(self.u) - 1e-12:
            raise ValueError("coherence u exceeds sqrt(v+ v-): matrix not positive")
        if self.w < abs(self.y) - 1e-12:
            raise ValueError("coherence y exceeds w: matrix not positive")

    def to_matrix(self) -> np.ndarray:
        """4x4 matrix in the block basis {|00>, |11>, |01>, |10>}."""
        out = np.zeros((4, 4), dtype=complex)
        out[0, 0], out[1, 1] = self.v_plus, self.v_minus
        out[1, 0], out[0, 1] = self.u, np.conj(self.u)
        out[2, 2] = out[3, 3] = self.w
        out[2, 3] = out[3, 2] = self.y
        return out

    def to_matrix_standard(self) -> np.ndarray:
        """Same state in the computational order {|00>, |01>, |10>, |11>}."""
        perm = [0, 2, 3, 1]
        block = self.to_matrix()
        return block[np.ix_(perm, perm)]


def rdm_from_collective(mset: MomentSet, positivity_tol: float = 1e-9) -> TwoQubitRDM:
    """Two-qubit reduced density matrix from collective moments.

    Valid for parity + exchange-symmetric states (caller-asserted). A
    positivity violation beyond ``positivity_tol`` signals a non-physical
    moment set and raises.
    """
    n = mset.n_particles
    if n < 2:
        raise ValueError("no pair exists for N = 1")
    nn1 = n * (n - 1)
    jz = mset.mean[2]
    jz2 = mset.corr[2, 2]
    jperp2 = mset.corr[0, 0] + mset.corr[1, 1]
    jp2 = (mset.corr[0, 0] - mset.corr[1, 1]) + 2.0j * mset.corr[0, 1]
    v_plus = (n * n - 2 * n + 4 * jz2 + 4 * jz * (n - 1)) / (4.0 * nn1)
    v_minus = (n * n - 2 * n + 4 * jz2 - 4 * jz * (n - 1)) / (4.0 * nn1)
    w = (n * n - 4 * jz2) / (4.0 * nn1)
    y = (4.0 * jperp2 - 2.0 * n) / (4.0 * nn1)
    u = jp2 / nn1
    viol = max(
        -(min(v_plus, v_minus, w)),
        abs(u) - math.sqrt(max(v_plus, 0.0) * max(v_minus, 0.0)),
        abs(y) - w,
        abs(v_plus + v_minus + 2 * w - 1.0),
    )
    if viol > positivity_tol:
        raise ValueError(f"moment set maps to a non-positive pair state (violation {viol:.3e})")
    # snap numerical dust so the dataclass invariants hold exactly
    v_plus, v_minus, w = max(v_plus, 0.0), max(v_minus, 0.0), max(w, 0.0)
    cap = math.sqrt(v_plus * v_minus)
    if abs(u) > cap:
        u = u * (cap / abs(u)) if abs(u) > 0 else 0.0
    y = min(max(y, -w), w)
    shift = (1.0 - (v_plus + v_minus + 2 * w)) / 2.0
    return TwoQubitRDM(v_plus, v_minus, w + shift, y, u)


def concurrence_general(rho: np.ndarray) -> float:
    """Wootters concurrence of an arbitrary two-qubit density matrix.

    ``rho`` is 4x4 in the computational basis {|00>, |01>, |10>, |11>}.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("density matrix must be 4x4")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-9:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-9:
        raise ValueError("density matrix does not have unit trace")
    evals, vecs = np.linalg.eigh(rho)
    if evals[0] < -1e-9:
        raise ValueError(f"density matrix is not positive semidefinite ({evals[0]:.3e})")
    sy = np.array([[0.0, -1.0j], [1.0j, 0.0]])
    flip = np.kron(sy, sy)
    # the flip-map eigenvalues are the singular values of
    # sqrt(rho) (sy x sy) sqrt(rho)^*, which keeps full precision
    root = (vecs * np.sqrt(np.maximum(evals, 0.0))) @ vecs.conj().T
    lam = np.linalg.svd(root @ flip @ root.conj(), compute_uv=False)
    lam.sort()
    return float(max(0.0, lam[3] - lam[2] - lam[1] - lam[0]))


def concurrence_symmetric(r: TwoQubitRDM) -> float:
    """Concurrence from the block-diagonal elements:
    2 max(0, |u| - w, |y| - sqrt(v+ v-)).

    States built from collective moments always have y >= 0, where this is
    the familiar 2 max(0, |u| - w, y - sqrt(v+ v-)); taking |y| extends it
    exactly (X-state concurrence) to the rest of the valid element domain.
    """
    return float(
        2.0
        * max(
            0.0,
            abs(r.u) - r.w,
            abs(r.y) - math.sqrt(max(r.v_plus, 0.0) * max(r.v_minus, 0.0)),
        )
    )


def pairwise_correlation(mset: MomentSet, direction) -> float:
    """Two-site correlation G along a direction from collective moments."""
    n = mset.n_particles
    if n < 2:
        raise ValueError("pairwise correlation needs N >= 2")
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    var = float(d @ mset.cov @ d)
    mean = float(mset.mean @ d)
    return 4.0 * (n * var + mean**2) / (n**2 * (n - 1)) - 1.0 / (n - 1)


def pairwise_correlation_matrix(mset: MomentSet) -> np.ndarray:
    """Matrix G = 4 Gamma / (N^2 (N-1)) - I/(N-1); G(n) = n.G.n."""
    n = mset.n_particles
    return 4.0 * mset.gamma_big / (n**2 * (n - 1)) - np.eye(3) / (n - 1)


def min_pairwise_correlation(mset: MomentSet) -> float:
    return float(np.linalg.eigvalsh(pairwise_correlation_matrix(mset))[0])


@dataclass(frozen=True)
class TwoModeMoments:
    """Joint moments of two addressable sub-ensembles for the two-mode test."""

    var_jz_plus: float
    var_jy_minus: float
    mean_jx_plus: float


_VIOLATION_TOL = 1e-12


@dataclass(frozen=True)
class CriteriaReport:
    """Entanglement criteria margins; negative margin = violation = detected.

    Margins carry the natural units of each inequality (see the module docs).
    The booleans apply a -1e-12 guard so separable states that saturate an
    inequality exactly do not flicker into "violated" through rounding.
    """

    two_qubit_violated: bool
    two_qubit_margin: float
    ghz3_violated: bool
    ghz3_margin: float
    threeq_violated_a: bool
    threeq_margin_a: float
    threeq_violated_b: bool
    threeq_margin_b: float
    singlet_xi2: float
    singlet_violated: bool
    spin_j_Fj_violated: bool
    spin_j_Fj_margin: float
    two_mode_violated: Optional[bool]
    two_mode_margin: Optional[float]

    def to_dict(self) -> dict:
        return {
            "two_qubit_violated": self.two_qubit_violated,
            "two_qubit_margin": self.two_qubit_margin,
            "ghz3_violated": self.ghz3_violated,
            "ghz3_margin": self.ghz3_margin,
            "threeq_violated_a": self.threeq_violated_a,
            "threeq_margin_a": self.threeq_margin_a,
            "threeq_violated_b": self.threeq_violated_b,
            "threeq_margin_b": self.threeq_margin_b,
            "singlet_xi2": self.singlet_xi2,
            "singlet_violated": self.singlet_violated,
            "spin_j_Fj_violated": self.spin_j_Fj_violated,
            "spin_j_Fj_margin": self.spin_j_Fj_margin,
            "two_mode_violated": self.two_mode_violated,
            "two_mode_margin": self.two_mode_margin,
        }

    def to_json(self) -> str:
        from .cli import to_json_text

        return to_json_text(self.to_dict())


def _candidate_frames(mset: MomentSet):
    """MSD-aligned frame plus the coordinate axes, as orthonormal triads."""
    frames = [np.eye(3)]
    theta, phi, ok = mean_spin_direction(mset)
    if ok:
        lam_minus, angle = min_transverse_variance(mset)
        n0, n1, n2 = transverse_frame(theta, phi)
        nmin = math.cos(angle) * n1 + math.sin(angle) * n2
        nperp = -math.sin(angle) * n1 + math.cos(angle) * n2
        frames.append(np.array([nmin, nperp, n0]))
    return frames


def evaluate_criteria(
    state: SymmetricState, aux: Optional[TwoModeMoments] = None
) -> CriteriaReport:
    """Evaluate the moment-based entanglement criteria on one state.

    Directional inequalities are tried on the MSD-aligned frame and on the
    coordinate axes, over all axis permutations; the strongest violation
    (smallest margin) is reported. The two-mode entry needs ``aux`` and is
    absent otherwise.
    """
    n = state.n_particles
    mset = moments(state)
    mats = spin_matrices(n / 2.0)
    c = state.amplitudes

    def jmat(direction):
        return (
            direction[0] * mats["jx"] + direction[1] * mats["jy"] + direction[2] * mats["jz"]
        )

    def expect(matrix) -> float:
        return float(np.vdot(c, matrix @ c).real)

    frames = _candidate_frames(mset)
    directions = [row for f in frames for row in f]

    # two-qubit inequality, symmetric-state form:
    # 1 - 4<J_n>^2/N^2 >= 4 (Delta J_n)^2 / N for separable symmetric states
    two_qubit_margin = math.inf
    for d in directions:
        mean = float(mset.mean @ d)
        var = float(d @ mset.cov @ d)
        margin = 1.0 - 4.0 * mean**2 / n**2 - 4.0 * var / n
        two_qubit_margin = min(two_qubit_margin, margin)

    # three-qubit inequalities require third moments along frame triads
    ghz3_margin = math.inf
    threeq_a_margin = math.inf
    threeq_b_margin = math.inf
    for frame in frames:
        for perm in itertools.permutations(range(3)):
            j1 = jmat(frame[perm[0]])
            j2 = jmat(frame[perm[1]])
            j3 = jmat(frame[perm[2]])
            j1_m, j3_m = expect(j1), expect(j3)
            j1_sq, j2_sq, j3_sq = expect(j1 @ j1), expect(j2 @ j2), expect(j3 @ j3)
            j1_cub = expect(j1 @ j1 @ j1)
            j3_cub = expect(j3 @ j3 @ j3)
            j212 = expect(j2 @ j1 @ j2)
            j232 = expect(j2 @ j3 @ j2)
            j131 = expect(j1 @ j3 @ j1)
            ghz3 = (
                -j1_cub / 3.0
                + j212
                - (n - 2) / 2.0 * j3_sq
                + j1_m / 3.0
                + n * (n - 1) * (5 * n - 2) / 24.0
            )
            th_a = (
                j3_cub
                - 2.0 * j232
                - 2.0 * j131
                - (n - 2) / 2.0 * (2.0 * j1_sq + 2.0 * j2_sq - j3_sq)
                - (n**2 - 4 * n + 8) / 4.0 * j3_m
                + n * (n - 2) * (13 * n - 4) / 24.0
            )
            th_b = (
                -j1_cub / 3.0
                + j212
                - (n - 2) / 2.0 * j3_sq
                + j1_m / 3.0
                + n**2 * (n - 2) / 8.0
            )
            ghz3_margin = min(ghz3_margin, ghz3)
            threeq_a_margin = min(threeq_a_margin, th_a)
            threeq_b_margin = min(threeq_b_margin, th_b)

    singlet_xi2 = float(np.trace(mset.cov)) / (n / 2.0)

    # spin-j variance bound with the spin-1/2 floor F_{1/2}(x) = x^2/2:
    # minimal transverse variance >= <J>^2 / N for separable states
    theta, phi, ok = mean_spin_direction(mset)
    if ok:
        lam_minus, _ = min_transverse_variance(mset)
        fj_margin = lam_minus - mset.mean_length**2 / n
    else:
        fj_margin = float(np.linalg.eigvalsh(mset.cov)[0])

    if aux is None:
        tm_margin = None
        tm_violated = None
    else:
        tm_margin = aux.var_jz_plus + aux.var_jy_minus - aux.mean_jx_plus
        tm_violated = tm_margin < -_VIOLATION_TOL

    hit = lambda margin: margin < -_VIOLATION_TOL
    return CriteriaReport(
        two_qubit_violated=hit(two_qubit_margin),
        two_qubit_margin=two_qubit_margin,
        ghz3_violated=hit(ghz3_margin),
        ghz3_margin=ghz3_margin,
        threeq_violated_a=hit(threeq_a_margin),
        threeq_margin_a=threeq_a_margin,
        threeq_violated_b=hit(threeq_b_margin),
        threeq_margin_b=threeq_b_margin,
        singlet_xi2=singlet_xi2,
        singlet_violated=hit(singlet_xi2 - 1.0),
        spin_j_Fj_violated=hit(fj_margin),
        spin_j_Fj_margin=fj_margin,
        two_mode_violated=tm_violated,
        two_mode_margin=tm_margin,
    )
