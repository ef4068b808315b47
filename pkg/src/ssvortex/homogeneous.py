"""Homogeneous-equation analysis: hypergeometric parameters, series evaluation,
and two-sided shooting.

After the substitution z = -2ik r^{-alpha} (amplitude normalized to beta = 1,
symmetry fold m = 2), the homogeneous mode equation becomes a third-order ODE
whose regular-at-zero branch is the regularized hypergeometric series
2F~2(a1, a2; b1, b2; z) with

    a1 = -2k/alpha - q#,  a2 = -2k/alpha + q#,
    b1 = (alpha - 4k)/alpha,  b2 = (2 - 2k + alpha*lambda)/alpha,
    q# = sqrt(alpha^2 - 2*alpha + 4k^2)/alpha.

Whether any solution of the original equation is q-integrable is decided
numerically: the two-dimensional manifold of solutions admissible at t -> -inf
is integrated as a wedge (cross-product) vector, the one-dimensional manifold
admissible at t -> +inf as a plain vector, and the normalized connection
determinant at t = 0 measures their transversality.  A mismatch above threshold
certifies that no nontrivial integrable solution exists at that lambda.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.special as sp
from scipy.integrate import solve_ivp

from .modes import LogGrid
from .params import VortexParams

NO_INTEGRABLE = "no_integrable_solution"
INCONCLUSIVE = "inconclusive"


def q_frak(alpha: float, k: int) -> float:
    return math.sqrt(alpha * alpha - 2.0 * alpha + 4.0 * k * k) / alpha


@dataclass(frozen=True)
class Homo2Params:
    """Hypergeometric parameter bundle for the transformed third-order ODE."""

    a1: complex
    a2: complex
    b1: complex
    b2: complex
    q_frak: float
    k: int
    alpha: float
    lam: complex


def homo2_params(params: VortexParams, k: int, lam: complex) -> Homo2Params:
    """Parameter choice (amplitude normalized to 1, m = 2 convention)."""
    if k < 1:
        raise ValueError("the transformed equation is defined for k >= 1")
    alpha = params.alpha if isinstance(params, VortexParams) else float(params)
    lam = complex(lam)
    qf = q_frak(alpha, k)
    return Homo2Params(
        a1=-2.0 * k / alpha - qf,
        a2=-2.0 * k / alpha + qf,
        b1=(alpha - 4.0 * k) / alpha,
        b2=(2.0 - 2.0 * k + alpha * lam) / alpha,
        q_frak=qf,
        k=k,
        alpha=alpha,
        lam=lam,
    )


def _rgamma(z) -> complex:
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == int(z.real):
        return 0.0 + 0.0j
    return 1.0 / complex(sp.gamma(z))


class SeriesError(RuntimeError):
    """Raised when the hypergeometric series fails to converge in budget."""


def hyp2f2_regularized(a1, a2, b1, b2, z, max_terms: int = 800,
                       with_diagnostics: bool = False):
    """Regularized series sum_n (a1)_n (a2)_n z^n / (n! Gamma(b1+n) Gamma(b2+n)).

    Entire in the lower parameters: nonpositive-integer b's contribute zero
    reciprocal-gamma factors until the pole region is passed.  Stops once the
    term magnitude stays below 1e-16 of the partial sum for 3 consecutive
    terms.  ``with_diagnostics`` also returns a cancellation estimate
    (eps * max|term| / |sum|), which bounds the attainable relative accuracy.
    """
    z = complex(z)
    if z == 0:
        val = _rgamma(b1) * _rgamma(b2)
        return (val, 0.0) if with_diagnostics else val
    if abs(z) > 50.0:
        raise SeriesError(f"|z| = {abs(z):.3g} beyond the supported term budget")
    total = 0.0 + 0.0j
    poch = 1.0 + 0.0j
    zn = 1.0 + 0.0j
    biggest = 0.0
    consec = 0
    n_min = int(max(8.0, -np.real(b1), -np.real(b2), 2.0 * abs(z))) + 4
    for n in range(max_terms):
        term = poch * zn * _rgamma(b1 + n) * _rgamma(b2 + n)
        total += term
        biggest = max(biggest, abs(term))
        if n >= n_min:
            if abs(term) < 1e-16 * max(abs(total), 1e-300):
                consec += 1
                if consec >= 3:
                    break
            else:
                consec = 0
        poch *= (a1 + n) * (a2 + n) / (n + 1.0)
        zn *= z
    else:
        raise SeriesError(f"series did not settle within {max_terms} terms at z = {z}")
    if with_diagnostics:
        cond = 2.2e-16 * biggest / max(abs(total), 1e-300)
        return total, cond
    return total


def eval_2f2_reg(p: Homo2Params, z) -> complex:
    return hyp2f2_regularized(p.a1, p.a2, p.b1, p.b2, z)


def homo2_defect(p: Homo2Params, z_values, rel_step: float = 5e-4) -> float:
    """Max relative defect of the third-order ODE for the series branch.

    Derivatives in z are taken by high-order centered stencils with step
    proportional to z; each defect is normalized by the largest of the four
    ODE terms so the metric is scale-free.
    """
    worst = 0.0
    for z in np.atleast_1d(z_values):
        z = complex(z)
        h = rel_step * max(abs(z), 1e-3)
        w = [hyp2f2_regularized(p.a1, p.a2, p.b1, p.b2, z + j * h) for j in range(-3, 4)]
        wm3, wm2, wm1, w0, wp1, wp2, wp3 = w
        d1 = (wm2 - 8 * wm1 + 8 * wp1 - wp2) / (12 * h)
        d2 = (-wm2 + 16 * wm1 - 30 * w0 + 16 * wp1 - wp2) / (12 * h * h)
        d3 = (wm3 - 8 * wm2 + 13 * wm1 - 13 * wp1 + 8 * wp2 - wp3) / (8 * h**3)
        t1 = z * z * d3
        t2 = z * (1.0 - z + p.b1 + p.b2) * d2
        t3 = (p.b1 * p.b2 - z * (p.a1 + p.a2 + 1.0)) * d1
        t4 = -p.a1 * p.a2 * w0
        scale = max(abs(t1), abs(t2), abs(t3), abs(t4), 1e-300)
        worst = max(worst, abs(t1 + t2 + t3 + t4) / scale)
    return worst


@dataclass
class ShootingResult:
    lam: complex
    k: int
    mismatch: float
    verdict: str
    det: complex = 0.0j
    note: str = ""


def _system_matrix(t: float, params: VortexParams, k: int, lam: complex) -> np.ndarray:
    p = params
    cw = 2.0 - 2.0 / p.q
    e = math.exp(-p.alpha * t)
    return np.array([
        [0.0, 1.0, 0.0],
        [-(cw * cw - (p.m * k) ** 2), -2.0 * cw, 1.0],
        [1j * p.alpha**2 * p.m * k * (2.0 - p.alpha) * p.beta * e, 0.0,
         p.alpha * (lam - p.a0) + 1j * p.alpha * p.m * k * p.beta * e],
    ], dtype=complex)


def shoot_homogeneous(params: VortexParams, k: int, lam: complex,
                      grid: LogGrid | None = None, rtol: float = 1e-8,
                      chunks: int = 24, threshold: float = 1e-6,
                      left_scale: complex = 1.0, right_scale: complex = 1.0) -> ShootingResult:
    """Two-sided shooting verdict on integrable homogeneous solutions at lambda.

    The left-admissible plane (decaying stream-function branch plus the decaying
    U branch) is integrated as its wedge vector with chunked renormalization;
    the right-admissible line (psi ~ e^{-(mk+2-2/q)t}) is integrated backward.
    ``mismatch`` is the normalized connection determinant at t = 0; ``det``
    carries the raw determinant, which is homogeneous of degree one in each
    end's initialization scale.
    """
    p = params
    lam = complex(lam)
    if not lam.real > p.a0:
        raise ValueError(f"Re(lambda) must exceed a0 = {p.a0:.6g}")
    if k == 0:
        # the radial mode is first-order: its homogeneous solution grows like
        # e^{Re(B) t} as t -> +inf, so no nonzero solution is integrable
        return ShootingResult(lam=lam, k=0, mismatch=1.0, verdict=NO_INTEGRABLE,
                              det=complex(left_scale * right_scale),
                              note="first-order radial mode, analytic verdict")
    grid = grid or LogGrid(-12.0, 12.0, 256)
    t_left, t_right = grid.t_min, grid.t_max
    cw = 2.0 - 2.0 / p.q
    A_plus = p.m * k + 2.0 - 2.0 / p.q
    A_minus = p.m * k - 2.0 + 2.0 / p.q

    def rhs_vec(t, y):
        return _system_matrix(t, p, k, lam) @ y

    def rhs_wedge(t, y):
        M = _system_matrix(t, p, k, lam)
        return np.trace(M) * y - M.T @ y

    # left 2-plane spanned by (1, A-, 0) and (0, 0, 1): wedge = (A-, -1, 0)
    eta = np.array([A_minus, -1.0, 0.0], dtype=complex)
    log_growth = 0.0
    eta_norm0 = np.linalg.norm(eta)
    eta /= eta_norm0
    try:
        for t0, t1 in zip(np.linspace(t_left, 0.0, chunks + 1)[:-1],
                          np.linspace(t_left, 0.0, chunks + 1)[1:]):
            sol = solve_ivp(rhs_wedge, (t0, t1), eta, method="DOP853",
                            rtol=rtol, atol=1e-13)
            if not sol.success:
                return ShootingResult(lam=lam, k=k, mismatch=0.0, verdict=INCONCLUSIVE,
                                      note=f"left integration failed: {sol.message}")
            eta = sol.y[:, -1]
            nrm = np.linalg.norm(eta)
            log_growth += math.log(nrm)
            eta /= nrm
        yC = np.array([1.0, -A_plus, 0.0], dtype=complex)
        yC_norm0 = np.linalg.norm(yC)
        yC /= yC_norm0
        for t0, t1 in zip(np.linspace(t_right, 0.0, chunks + 1)[:-1],
                          np.linspace(t_right, 0.0, chunks + 1)[1:]):
            sol = solve_ivp(rhs_vec, (t0, t1), yC, method="DOP853",
                            rtol=rtol, atol=1e-13)
            if not sol.success:
                return ShootingResult(lam=lam, k=k, mismatch=0.0, verdict=INCONCLUSIVE,
                                      note=f"right integration failed: {sol.message}")
            yC = sol.y[:, -1]
            nrm = np.linalg.norm(yC)
            log_growth += math.log(nrm)
            yC /= nrm
    except (ValueError, FloatingPointError) as exc:
        return ShootingResult(lam=lam, k=k, mismatch=0.0, verdict=INCONCLUSIVE,
                              note=f"stiff integration failure: {exc}")
    mism = abs(eta @ yC)
    det = (eta @ yC) * complex(left_scale) * complex(right_scale) \
        * eta_norm0 * yC_norm0 * math.exp(min(log_growth, 700.0))
    verdict = NO_INTEGRABLE if mism > threshold else INCONCLUSIVE
    note = "" if verdict == NO_INTEGRABLE else \
        "connection determinant below threshold: possible eigenvalue or resolution limit"
    return ShootingResult(lam=lam, k=k, mismatch=mism, verdict=verdict, det=det, note=note)
