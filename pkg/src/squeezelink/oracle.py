"""Independent numerical ground truth for the entanglement measures.

Builds the linearized red-detuned rotating-frame system as an
eight-dimensional linear stochastic model, solves its steady-state
covariance from the Lyapunov equation, and (separately) integrates the
symmetrized noise spectra over frequency. Both routes are independent of
the closed-form expressions in :mod:`squeezelink.closedform` and are used
to validate them.

The quadrature ordering is fixed everywhere:
``(X1, Y1, x1, y1, X2, Y2, x2, y2)`` -- mirror then field quadratures of
unit 1, then unit 2. Uppercase denotes mirror, lowercase field.

Noise normalization (derivation note in ``docs/noise_conventions.md``):
with symmetrized white-noise correlators ``<n_i(t) n_j(t')>_sym = D_ij
delta(t - t')``, the decoupled (G = 0) steady state has mirror quadrature
variance ``n_th + 1/2`` and field quadrature variance ``N + 1/2``, which
pins the diffusion matrix used here.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .closedform import DuanResult
from .model import SteadyState, SystemParams, stability_check

QUADRATURES = ("X1", "Y1", "x1", "y1", "X2", "Y2", "x2", "y2")
IDX = {name: i for i, name in enumerate(QUADRATURES)}


class UnstableDrift(RuntimeError):
    """The drift matrix has an eigenvalue with non-negative real part."""


class RwaViolation(UserWarning):
    """Operating point is not at the red sideband delta_eff = -omega_M."""


class QuadratureFailure(RuntimeError):
    """Adaptive spectral integration could not reach the requested tolerance."""


@dataclass(frozen=True)
class DriftDiffusion:
    """Drift matrix A and symmetrized diffusion matrix D (both 8x8, 1/s)."""

    A: np.ndarray
    D: np.ndarray


@dataclass(frozen=True)
class CovarianceMatrix:
    """Symmetrized steady-state quadrature covariance V_ij = <u_i u_j>_sym."""

    V: np.ndarray

    def variance(self, name: str) -> float:
        i = IDX[name]
        return float(self.V[i, i])

    def covariance(self, a: str, b: str) -> float:
        return float(self.V[IDX[a], IDX[b]])


def build_rwa_drift_diffusion(
    system: SystemParams, steady: tuple[SteadyState, SteadyState]
) -> DriftDiffusion:
    """Assemble drift and diffusion of the rotating-frame beam-splitter model."""
    units = (system.unit1, system.unit2)
    for j, (unit, ss) in enumerate(zip(units, steady), start=1):
        target = -unit.mirror.omega_M
        if abs(ss.delta_eff - target) > 1e-6 * abs(target):
            warnings.warn(
                f"unit {j}: delta_eff = {ss.delta_eff:g} is not at the red "
                f"sideband {target:g}; the rotating-wave model does not apply",
                RwaViolation,
                stacklevel=2,
            )

    A = np.zeros((8, 8))
    D = np.zeros((8, 8))
    N, M = system.bath.N, system.bath.M_corr
    for j, (unit, ss) in enumerate(zip(units, steady)):
        o = 4 * j
        gamma, kappa, G = unit.mirror.gamma, unit.resonator.kappa, ss.G
        # X' = -gamma/2 X + G x ; x' = -kappa/2 x - G X (same for Y, y)
        for q in (0, 1):  # X/Y then x/y rows
            A[o + q, o + q] = -gamma / 2.0
            A[o + q, o + q + 2] = G
            A[o + q + 2, o + q + 2] = -kappa / 2.0
            A[o + q + 2, o + q] = -G
        D[o + 0, o + 0] = D[o + 1, o + 1] = gamma * (2.0 * ss.n_th + 1.0) / 2.0
        D[o + 2, o + 2] = D[o + 3, o + 3] = kappa * (2.0 * N + 1.0) / 2.0

    # squeezed-bath cross correlations: only x1-x2 (+) and y1-y2 (-)
    kgm = math.sqrt(units[0].resonator.kappa * units[1].resonator.kappa) * M
    D[IDX["x1"], IDX["x2"]] = D[IDX["x2"], IDX["x1"]] = kgm
    D[IDX["y1"], IDX["y2"]] = D[IDX["y2"], IDX["y1"]] = -kgm
    return DriftDiffusion(A=A, D=D)


def solve_lyapunov(dd: DriftDiffusion) -> CovarianceMatrix:
    """Steady-state covariance from A V + V A^T + D = 0.

    Dense vectorized solve: at n = 8 the 64-unknown linear system is solved
    directly by LU with partial pivoting.
    """
    A, D = np.asarray(dd.A, dtype=float), np.asarray(dd.D, dtype=float)
    n = A.shape[0]
    report = stability_check(A)
    if not report.stable:
        raise UnstableDrift(
            f"drift matrix is not stable (max Re eigenvalue = {report.max_real_part:g})"
        )
    eye = np.eye(n)
    K = np.kron(eye, A) + np.kron(A, eye)
    V = np.linalg.solve(K, -D.reshape(n * n)).reshape(n, n)
    V = 0.5 * (V + V.T)
    residual = np.linalg.norm(A @ V + V @ A.T + D)
    if residual > 1e-10 * max(np.linalg.norm(D), 1e-300):
        raise UnstableDrift(
            f"Lyapunov residual {residual:g} exceeds tolerance; system nearly singular"
        )
    return CovarianceMatrix(V=V)


def duan_from_covariance(V: CovarianceMatrix, pair: str = "mirror") -> DuanResult:
    """Variances of the joint EPR quadratures (u1 - u2, v1 + v2) from V."""
    if pair == "mirror":
        X1, Y1, X2, Y2 = "X1", "Y1", "X2", "Y2"
    elif pair == "field":
        X1, Y1, X2, Y2 = "x1", "y1", "x2", "y2"
    else:
        raise ValueError(f"pair must be 'mirror' or 'field', got {pair!r}")
    var_X = (
        V.variance(X1) + V.variance(X2) - 2.0 * V.covariance(X1, X2)
    )
    var_Y = (
        V.variance(Y1) + V.variance(Y2) + 2.0 * V.covariance(Y1, Y2)
    )
    return DuanResult(var_X=var_X, var_Y=var_Y)


@dataclass(frozen=True)
class QuadratureConfig:
    """Controls for the spectral-density integration."""

    abs_tol: float = 1e-11  # per dimensionless variance integral
    rel_tol: float = 1e-11
    subdivision_limit: int = 400


def spectral_duan_sum(
    system: SystemParams,
    steady: tuple[SteadyState, SteadyState],
    pair: str = "mirror",
    config: QuadratureConfig = QuadratureConfig(),
) -> float:
    """Joint-quadrature variance sum by direct frequency-domain integration.

    The rotating-frame fluctuation equations are solved in Fourier space;
    the symmetrized spectra are integrated over the whole real line after
    compactifying with omega = scale * tan(theta).
    """
    if pair not in ("mirror", "field"):
        raise ValueError(f"pair must be 'mirror' or 'field', got {pair!r}")
    units = (system.unit1, system.unit2)
    p = [
        (u.mirror.gamma, u.resonator.kappa, ss.G, ss.n_th)
        for u, ss in zip(units, steady)
    ]
    N, M = system.bath.N, system.bath.M_corr

    scale = max(max(kappa, gamma, G, gamma / 2.0 + 2.0 * G**2 / kappa)
                for gamma, kappa, G, _ in p) / 2.0

    def kernel(w: float) -> float:
        d = [G**2 + (gamma / 2.0 + 1j * w) * (kappa / 2.0 + 1j * w)
             for gamma, kappa, G, _ in p]
        s = 0.0
        for (gamma, kappa, G, n_th), dj in zip(p, d):
            dd = abs(dj) ** 2
            if pair == "mirror":
                s += (
                    gamma * ((kappa / 2.0) ** 2 + w**2) * (2.0 * n_th + 1.0)
                    + G**2 * kappa * (2.0 * N + 1.0)
                ) / (2.0 * dd)
            else:
                s += (
                    G**2 * gamma * (2.0 * n_th + 1.0)
                    + ((gamma / 2.0) ** 2 + w**2) * kappa * (2.0 * N + 1.0)
                ) / (2.0 * dd)
        (g1, k1, G1, _), (g2, k2, G2, _) = p
        if pair == "mirror":
            num = G1 * G2 * math.sqrt(k1 * k2)
        else:
            num = math.sqrt(k1 * k2) * ((g1 / 2.0 + 1j * w) * (g2 / 2.0 - 1j * w))
        cross = M * (num / (d[0] * np.conj(d[1]))).real
        return s - 2.0 * cross

    def integrand(theta: float) -> float:
        w = scale * math.tan(theta)
        return kernel(w) * scale / math.cos(theta) ** 2

    # place breakpoints at the characteristic linewidths and at the
    # hybridized-mode splitting so the adaptive rule finds narrow features
    features = set()
    for gamma, kappa, G, _ in p:
        for w in (gamma / 2.0, kappa / 2.0, G, gamma / 2.0 + 2.0 * G**2 / kappa):
            if w > 0:
                features.add(math.atan(w / scale))
                features.add(-math.atan(w / scale))
    points = sorted(features)

    try:
        var_X, err = integrate.quad(
            integrand,
            -math.pi / 2.0,
            math.pi / 2.0,
            points=points,
            epsabs=config.abs_tol,
            epsrel=config.rel_tol,
            limit=config.subdivision_limit,
        )
    except ValueError as exc:
        # quadpack rejects tolerances below machine resolution or a
        # subdivision budget smaller than the breakpoint list
        raise QuadratureFailure(f"spectral integration rejected: {exc}") from exc
    var_X /= 2.0 * math.pi
    err /= 2.0 * math.pi
    if err > max(config.abs_tol, config.rel_tol * abs(var_X)) * 10.0:
        raise QuadratureFailure(
            f"spectral integral error estimate {err:g} exceeds tolerance "
            f"(abs={config.abs_tol:g}, rel={config.rel_tol:g})"
        )
    # the Y integrand is identical term by term (cross term flips sign twice)
    return 2.0 * var_X
