"""Sparse reconstruction of sampled frames in the orthonormal 2-D DCT basis.

The solver minimizes ``0.5 * ||b - A a||^2 + lam * ||a||_1`` by iterative
soft-thresholding, where ``A = R o idct2`` (R keeps the retained pixels).
Because R selects rows of an orthonormal transform, ``||A||_2 <= 1`` and a
unit step is always stable.  The penalty weight starts at
``0.1 * ||A^T b||_inf`` and is halved whenever the current stage has
converged or has run 50 iterations, until it reaches the target; with a
small target this approximates the equality-constrained basis pursuit
solution.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.fft

from .constants import (
    CONTINUATION_PERIOD,
    CONTINUATION_START,
    DEFAULT_LAMBDA,
    DEFAULT_MAX_ITERS,
    DEFAULT_TOL,
    MONOTONE_SLACK,
)
from .errors import NumericError, ParameterError, SolverError
from .frames import Frame
from .measurement import MeasurementSet, embed


@dataclass(frozen=True, eq=False)
class CoeffPlane:
    coeffs: np.ndarray

    @property
    def height(self) -> int:
        return self.coeffs.shape[0]

    @property
    def width(self) -> int:
        return self.coeffs.shape[1]

    def sparsity(self, tol: float = 0.0) -> int:
        return int(np.count_nonzero(np.abs(self.coeffs) > tol))


@dataclass(frozen=True)
class SolverParams:
    lam: float = DEFAULT_LAMBDA
    max_iters: int = DEFAULT_MAX_ITERS
    tol: float = DEFAULT_TOL
    enforce_data_consistency: bool = True
    continuation: bool = True
    accelerated: bool = True

    def __post_init__(self):
        if not self.lam > 0:
            raise ParameterError("lambda must be positive")
        if self.max_iters < 1:
            raise ParameterError("max_iters must be >= 1")
        if not self.tol > 0:
            raise ParameterError("tol must be positive")


@dataclass
class RecoveryReport:
    iterations_used: int
    final_objective: float
    residual_norm: float
    elapsed_seconds: float
    objective_history: list[float] = field(default_factory=list, repr=False)


def dct2(frame: Frame) -> CoeffPlane:
    """Orthonormal 2-D DCT-II, applied along rows then columns."""
    return CoeffPlane(scipy.fft.dctn(frame.data, type=2, norm="ortho"))


def idct2(plane: CoeffPlane, index: int = 0) -> Frame:
    return Frame(scipy.fft.idctn(plane.coeffs, type=2, norm="ortho"), index)


def soft_threshold(x, t):
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def ista(
    forward: Callable[[np.ndarray], np.ndarray],
    adjoint: Callable[[np.ndarray], np.ndarray],
    b: np.ndarray,
    x0: np.ndarray,
    lam: float,
    max_iters: int,
    tol: float,
    step: float = 1.0,
    continuation: bool = True,
    accelerate: bool = True,
):
    """Proximal gradient on 0.5||b - Fx||^2 + lam||x||_1.

    ``step`` must not exceed 1/||F||^2.  With ``accelerate`` the extrapolated
    point follows monotone FISTA (Beck & Teboulle): a proximal step that
    would raise the objective is not accepted, so the iterates keep the
    plain method's monotone objective while converging far faster.

    Every proximal step is checked against the quadratic majorizer implied
    by ``step``; a violation means the operator norm is larger than
    assumed and raises SolverError.

    Returns (x, iterations, objective at the target weight, residual norm,
    per-iteration objective history at the weight active in that
    iteration).  Lowering the weight can only lower the objective, so the
    history is non-increasing.
    """
    lam_now = lam
    if continuation:
        lam_now = max(lam, CONTINUATION_START * float(np.max(np.abs(adjoint(b)))))

    def objective(r, z, weight):
        return 0.5 * float(r @ r) + weight * float(np.abs(z).sum())

    x = x0
    r = b - forward(x)
    obj = objective(r, x, lam_now)
    history = [obj]
    y, ry, t = x, r, 1.0
    iters = 0
    stage_start = 0
    stage_done = False
    while iters < max_iters:
        if lam_now > lam and (stage_done or iters - stage_start >= CONTINUATION_PERIOD):
            lam_now = max(lam, lam_now / 2)
            stage_start = iters
            stage_done = False
            obj = objective(r, x, lam_now)
            y, ry, t = x, r, 1.0
        grad = -adjoint(ry)
        z = soft_threshold(y - step * grad, step * lam_now)
        rz = b - forward(z)
        iters += 1

        smooth_z = 0.5 * float(rz @ rz)
        dz = z - y
        bound = 0.5 * float(ry @ ry) + float(np.sum(grad * dz)) + float(np.sum(dz * dz)) / (2 * step)
        if not np.isfinite(smooth_z):
            raise NumericError("objective became non-finite")
        if smooth_z > bound + MONOTONE_SLACK * max(1.0, abs(bound)):
            raise SolverError(
                f"step {step!r} violates the majorization bound at iteration {iters}; "
                "operator norm exceeds the assumed Lipschitz constant"
            )

        obj_z = smooth_z + lam_now * float(np.abs(z).sum())
        if obj_z <= obj or not accelerate:
            if obj_z > obj + MONOTONE_SLACK * max(1.0, abs(obj)):
                raise SolverError(f"objective increased from {obj!r} to {obj_z!r} at iteration {iters}")
            x_new, r_new, new_obj = z, rz, obj_z
        else:
            x_new, r_new, new_obj = x, r, obj

        if accelerate:
            t_new = (1 + np.sqrt(1 + 4 * t * t)) / 2
            c1, c2 = t / t_new, (t - 1) / t_new
            y = x_new + c1 * (z - x_new) + c2 * (x_new - x)
            # residual is affine in x, so extrapolate it instead of re-applying F
            ry = r_new + c1 * (rz - r_new) + c2 * (r_new - r)
            t = t_new
        else:
            y, ry = x_new, r_new

        history.append(new_obj)
        stage_done = x_new is z and abs(obj - new_obj) <= tol * max(abs(obj), np.finfo(float).tiny)
        x, r, obj = x_new, r_new, new_obj
        if stage_done and lam_now <= lam:
            break
    final_obj = objective(r, x, lam)
    return x, iters, final_obj, float(np.linalg.norm(r)), history


def _check_finite(values):
    if not np.all(np.isfinite(values)):
        raise NumericError("measurements contain non-finite values")


def mask_operator(meas: MeasurementSet):
    """Forward and adjoint of A = R o idct2 for this measurement set."""
    mask = meas.mask
    shape = (mask.height, mask.width)
    idx = mask.indices

    def forward(alpha):
        return scipy.fft.idctn(alpha, type=2, norm="ortho").ravel()[idx]

    def adjoint(v):
        flat = np.zeros(mask.size)
        flat[idx] = v
        return scipy.fft.dctn(flat.reshape(shape), type=2, norm="ortho")

    return forward, adjoint


def solve_l1(meas: MeasurementSet, params: SolverParams = SolverParams()):
    """Sparse DCT coefficients consistent with the measurements."""
    b = meas.values
    if b.size < 1:
        raise ParameterError("need at least one measurement")
    _check_finite(b)
    forward, adjoint = mask_operator(meas)
    start = time.perf_counter()
    x0 = dct2(embed(meas)).coeffs
    x, iters, obj, res, history = ista(
        forward, adjoint, b, x0, params.lam, params.max_iters, params.tol,
        continuation=params.continuation, accelerate=params.accelerated,
    )
    report = RecoveryReport(iters, obj, res, time.perf_counter() - start, history)
    return CoeffPlane(x), report


def solve_l1_dense(A: np.ndarray, b: np.ndarray, params: SolverParams = SolverParams()):
    """Same solver on an explicit matrix; the step is 1/||A||_2^2."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    _check_finite(b)
    norm = np.linalg.norm(A, 2)
    step = 1.0 / norm**2 if norm > 0 else 1.0
    start = time.perf_counter()
    x, iters, obj, res, history = ista(
        lambda v: A @ v, lambda v: A.T @ v, b, np.zeros(A.shape[1]),
        params.lam, params.max_iters, params.tol, step=step,
        continuation=params.continuation, accelerate=params.accelerated,
    )
    return x, RecoveryReport(iters, obj, res, time.perf_counter() - start, history)


def reconstruct_frame(meas: MeasurementSet, params: SolverParams = SolverParams()):
    plane, report = solve_l1(meas, params)
    data = np.clip(idct2(plane).data, 0.0, 1.0)
    if params.enforce_data_consistency:
        flat = data.ravel()
        flat[meas.mask.indices] = meas.values
        data = flat.reshape(data.shape)
    return Frame(data, meas.frame_index), report


# --- exhaustive l0 search ----------------------------------------------------


@dataclass
class L0Solution:
    support: tuple[int, ...]
    x: np.ndarray
    residual: float
    exact: bool
    notes: list[str] = field(default_factory=list)


def l0_oracle(b, A_dense, k_max: int, fit_tol: float = 1e-9) -> L0Solution:
    """Sparsest least-squares fit by enumerating every support of size <= k_max.

    A support "fits" when its residual is within ``fit_tol * max(1, ||b||)``;
    fitting residuals count as equal.  The answer is the smallest fitting
    support, lexicographically first among equals.  If nothing fits, the smallest residual wins,
    ties going to the smaller and then lexicographically first support.
    Rank-deficient column subsets are skipped and listed in ``notes``.
    """
    A = np.asarray(A_dense, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = A.shape
    if n > 16:
        raise ParameterError("l0_oracle enumerates supports exhaustively; n must be <= 16")
    if b.shape != (m,):
        raise ParameterError("b must have one entry per row of A")
    limit = fit_tol * max(1.0, float(np.linalg.norm(b)))

    notes = []
    best_fit = None
    best_any = None
    for size in range(0, min(k_max, n) + 1):
        for support in itertools.combinations(range(n), size):
            if size == 0:
                coef = np.zeros(0)
                res = float(np.linalg.norm(b))
            else:
                sub = A[:, support]
                if np.linalg.matrix_rank(sub) < size:
                    notes.append(f"skipped rank-deficient support {support}")
                    continue
                coef, *_ = np.linalg.lstsq(sub, b, rcond=None)
                res = float(np.linalg.norm(b - sub @ coef))
            # every fitting support has residual "zero": the first one wins
            if res <= limit and best_fit is None:
                best_fit = (support, res, coef)
            if best_any is None or res < best_any[1]:
                best_any = (support, res, coef)
        if best_fit is not None:
            break

    support, res, coef = best_fit if best_fit is not None else best_any
    x = np.zeros(n)
    x[list(support)] = coef
    return L0Solution(tuple(support), x, res, best_fit is not None, notes)
