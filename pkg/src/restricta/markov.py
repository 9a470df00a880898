"""Digit-block transition matrices and certified Perron eigenvalue bounds.

The growth of the grid L1 mean of |S_A| per digit is governed by the
largest eigenvalue of a sparse q^ell x q^ell nonnegative matrix whose
entries are certified suprema of the normalised window sum over digit
cells.  A base is certified when that eigenvalue is provably below
q^(1/5).

The certificate is a scaled row-sum bound: for any positive vector v,
the spectral radius of a nonnegative matrix is at most max_I (Mv)_I/v_I
(the largest row sum of the diagonally rescaled similar matrix).  Power
iteration supplies v; every iterate yields a valid bound and the minimum
over iterates is reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .digit_systems import DigitSystem
from .errors import CapExceeded, UsageError
from .fourier import SLACK, _Window, sin_display_value

ENTRY_CAP = 10**7
DEFAULT_GRID = 512
POWER_TOL = 1e-10
POWER_MAX_ITER = 100_000


@dataclass(frozen=True)
class TransitionMatrix:
    """Sparse q^ell x q^ell block-transition matrix.

    Entry (I, J) is nonzero only when J is the left-shift of I extended by
    one digit t; the q^(ell+1) stored values are indexed by the combined
    (ell+1)-digit word m = I*q + t, and column J = m mod q^ell.
    """

    sys: DigitSystem
    ell: int
    sigma: float
    entries: np.ndarray  # length q^(ell+1), already raised to sigma
    grid: int

    @property
    def dim(self) -> int:
        return self.sys.q**self.ell

    @property
    def n_entries(self) -> int:
        return len(self.entries)

    def entry(self, row, col) -> float:
        """Entry by digit tuples or flat indices; zero off the shift pattern."""
        q, ell = self.sys.q, self.ell
        if isinstance(row, tuple):
            row = sum(t * q ** (ell - 1 - i) for i, t in enumerate(row))
        if isinstance(col, tuple):
            col = sum(t * q ** (ell - 1 - i) for i, t in enumerate(col))
        # the column must be the left-shift of the row: high ell-1 digits of
        # col equal the low ell-1 digits of row
        if ell > 1 and col // q != row % (q ** (ell - 1)):
            return 0.0
        return float(self.entries[row * q + col % q])

    def row_sums(self) -> np.ndarray:
        return self.entries.reshape(self.dim, self.sys.q).sum(axis=1)

    def col_sums(self) -> np.ndarray:
        return self.entries.reshape(self.sys.q, self.dim).sum(axis=0)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        """(Mv)[I] = sum_t entries[I*q + t] * v[(I*q + t) mod q^ell]."""
        idx = np.arange(self.n_entries) % self.dim
        prod = self.entries * v[idx]
        return prod.reshape(self.dim, self.sys.q).sum(axis=1)


@dataclass(frozen=True)
class EigenCertificate:
    """Certified spectral-radius bound with its power-iteration estimate."""

    row_sum_bound: float
    power_estimate: float
    iterations: int
    threshold: float
    certified: bool
    converged: bool = True
    ell: int | None = None
    sigma: float = 1.0

    def to_json(self) -> dict:
        return {
            "ell": self.ell,
            "sigma": self.sigma,
            "rowSumBound": self.row_sum_bound,
            "powerEstimate": self.power_estimate,
            "iterations": self.iterations,
            "threshold": self.threshold,
            "certified": self.certified,
            "converged": self.converged,
        }


def build_matrix(
    sys: DigitSystem, ell: int, sigma: float = 1.0, grid: int = DEFAULT_GRID
) -> TransitionMatrix:
    """Build the block-transition matrix for ell-digit contexts.

    Entry value for the digit word (t_1 .. t_{ell+1}) is the certified
    supremum of F_D/|D| over the width-q^-(ell+1) cell it pins down,
    raised to sigma.  Padding is applied before exponentiation so the
    power map preserves the upper bound.
    """
    if ell < 1:
        raise UsageError("need ell >= 1")
    if sigma <= 0:
        raise UsageError("need sigma > 0")
    n_words = sys.q ** (ell + 1)
    if n_words > ENTRY_CAP:
        raise CapExceeded(f"q^(ell+1) = {n_words} above cap {ENTRY_CAP}")
    win = _Window(sys)
    width = 1.0 / n_words
    lows = np.arange(n_words, dtype=np.float64) * width
    sups = win.cell_sup(lows, width, grid)
    entries = (sups / sys.size) ** sigma
    return TransitionMatrix(sys, ell, float(sigma), entries, grid)


def _as_matvec(m):
    """Uniform matvec/dimension access for TransitionMatrix or dense arrays."""
    if isinstance(m, TransitionMatrix):
        return m.matvec, m.dim
    arr = np.asarray(m, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise UsageError("need a square matrix")
    if np.any(arr < 0):
        raise UsageError("matrix must be nonnegative")
    return (lambda v: arr @ v), arr.shape[0]


def _iterate(m, tol: float, max_iter: int):
    """Power iteration from all-ones with max-norm normalisation.

    Tracks the best (smallest) scaled row-sum bound across iterates: every
    positive iterate v gives the certified bound max (Mv)/v.  Returns
    (best_bound, rayleigh, iterations, converged).
    """
    matvec, n = _as_matvec(m)
    v = np.ones(n)
    best = math.inf
    rayleigh = 0.0
    prev = math.inf
    converged = False
    iters = 0
    for iters in range(1, max_iter + 1):
        w = matvec(v)
        vv = np.maximum(v, 1e-300)
        bound = float(np.max(w / vv)) * (1.0 + 1e-12) + SLACK
        best = min(best, bound)
        denom = float(v @ v)
        rayleigh = float(v @ w) / denom if denom > 0 else 0.0
        top = float(np.max(w))
        if top <= 0.0:  # nilpotent-like: spectral radius 0
            return 0.0, 0.0, iters, True
        w /= top
        if abs(rayleigh - prev) < tol:
            converged = True
            v = w
            break
        prev = rayleigh
        v = w
    return best, rayleigh, iters, converged


def row_sum_bound(m, tol: float = POWER_TOL, max_iter: int = POWER_MAX_ITER) -> float:
    """Certified upper bound on the spectral radius via scaled row sums.

    The first iterate (v = all ones) reproduces the plain maximal row sum;
    subsequent Perron-rescaled iterates tighten it.  Accumulated with
    upward slack so the comparison against a threshold stays safe.
    """
    best, _, _, _ = _iterate(m, tol, max_iter)
    return best


def power_eigenvalue(m, tol: float = POWER_TOL, max_iter: int = POWER_MAX_ITER) -> EigenCertificate:
    """Power iteration certificate: Rayleigh estimate plus row-sum bound.

    Non-convergence is not fatal; the certificate then rests on the
    row-sum bound alone.
    """
    if tol <= 0:
        raise UsageError("need tol > 0")
    best, rayleigh, iters, converged = _iterate(m, tol, max_iter)
    ell = m.ell if isinstance(m, TransitionMatrix) else None
    sigma = m.sigma if isinstance(m, TransitionMatrix) else 1.0
    return EigenCertificate(
        row_sum_bound=best,
        power_estimate=rayleigh,
        iterations=iters,
        threshold=math.nan,
        certified=False,
        converged=converged,
        ell=ell,
        sigma=sigma,
    )


def analytic_ell1_bound(sys: DigitSystem) -> float | None:
    """Matrix-free bound for the ell = 1 eigenvalue of one-missing-digit
    systems: the per-digit sin-bound sum divided by |D| dominates every
    column sum.  None when the digit set has another shape."""
    if sys.size != sys.q - 1:
        return None
    return sin_display_value(sys.q) / sys.size


def certify_base(
    sys: DigitSystem,
    ell_max: int,
    sigma: float = 1.0,
    threshold: float | None = None,
    grid: int = DEFAULT_GRID,
    entry_cap: int = ENTRY_CAP,
) -> EigenCertificate:
    """Certify via the lambda_ell < q^(1/5) criterion.

    Builds matrices for ell = 1..ell_max (within the entry cap) and returns
    the first certificate whose bound beats the threshold, else the best
    bound found.  When even ell = 1 exceeds the cap, falls back to the
    matrix-free column bound for one-missing-digit systems.
    """
    if ell_max < 1:
        raise UsageError("need ell_max >= 1")
    thr = sys.q ** (1.0 / 5.0) if threshold is None else float(threshold)
    best: EigenCertificate | None = None
    attempted = 0
    for ell in range(1, ell_max + 1):
        if sys.q ** (ell + 1) > entry_cap:
            break
        attempted = ell
        mat = build_matrix(sys, ell, sigma, grid)
        cert = power_eigenvalue(mat)
        cert = EigenCertificate(
            row_sum_bound=cert.row_sum_bound,
            power_estimate=cert.power_estimate,
            iterations=cert.iterations,
            threshold=thr,
            certified=cert.row_sum_bound < thr,
            converged=cert.converged,
            ell=ell,
            sigma=float(sigma),
        )
        if best is None or cert.row_sum_bound < best.row_sum_bound:
            best = cert
        if cert.certified:
            return cert
    if best is None:
        analytic = analytic_ell1_bound(sys)
        if analytic is None:
            raise CapExceeded(
                f"no ell within entry cap {entry_cap} (largest attempted {attempted})"
            )
        bound = analytic * (1.0 + 1e-12)
        return EigenCertificate(
            row_sum_bound=bound,
            power_estimate=0.0,
            iterations=0,
            threshold=thr,
            certified=bound < thr,
            converged=True,
            ell=1,
            sigma=float(sigma),
        )
    return best
