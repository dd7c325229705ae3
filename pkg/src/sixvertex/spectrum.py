"""Brute-force spectral oracle for the transfer matrix.

The commuting family T(x) is diagonalized once per magnetization sector at a
generic spectral point x*, with left and right eigenvectors paired by LAPACK.
Because the eigenvectors do not depend on x, each eigenvalue extends to a
function of x through the bilinear form  lam(x) = <left| T(x) |right>.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .model import ModelParams, monodromy_blocks, sector_indices, transfer

__all__ = [
    "DegenerateSpectrum",
    "EigenSystem",
    "PolynomialFit",
    "diagonalize_sector",
    "polynomiality_check",
    "left_vector_from_C",
]


class DegenerateSpectrum(RuntimeError):
    """Sector eigenvalues collide at every attempted spectral point.

    Not resolved automatically: the run is reported and the user should move
    the inhomogeneities slightly.
    """


@dataclass
class EigenSystem:
    """Eigen-decomposition of one magnetization sector.

    left[k] and right[:, k] are normalized so that left[k] @ right[:, k] = 1;
    rows of `left` are left eigenvectors, columns of `right` are right ones.
    """

    params: ModelParams
    n: int
    x_star: complex
    indices: list
    eigs: np.ndarray
    right: np.ndarray
    left: np.ndarray
    degenerate_flags: np.ndarray = field(default=None)

    @property
    def size(self):
        return len(self.eigs)

    def _sector_transfer(self, x):
        idx = self.indices
        return transfer(x, self.params)[np.ix_(idx, idx)]

    def eigenvalues_at(self, x):
        """All sector eigenvalues evaluated at a fresh spectral point."""
        Tb = self._sector_transfer(x)
        return np.einsum("kd,dc,ck->k", self.left, Tb, self.right, optimize=True)

    def eigenvalue(self, k, x):
        Tb = self._sector_transfer(x)
        return complex(self.left[k] @ Tb @ self.right[:, k])

    def lam(self, k):
        """Eigenvalue evaluator x -> Lambda_k(x) for eigenpair k."""
        return lambda x: self.eigenvalue(k, x)

    def left_full(self, k):
        """Left eigenvector embedded in the full 2^L space (row vector)."""
        v = np.zeros(self.params.dim, dtype=complex)
        v[self.indices] = self.left[k]
        return v

    def right_full(self, k):
        v = np.zeros(self.params.dim, dtype=complex)
        v[self.indices] = self.right[:, k]
        return v

    def biorthogonality_defect(self):
        G = self.left @ self.right
        return float(np.abs(G - np.eye(self.size)).max())

    def to_record(self, sample_xs=()):
        rec = {
            "sector": self.n,
            "dimension": self.size,
            "x_star": [self.x_star.real, self.x_star.imag],
            "eigenvalues_at_x_star": [[z.real, z.imag] for z in self.eigs],
            "degenerate_flags": [bool(f) for f in self.degenerate_flags],
        }
        if len(sample_xs):
            samples = np.array([self.eigenvalues_at(x) for x in sample_xs])
            rec["sample_x"] = [[complex(x).real, complex(x).imag] for x in sample_xs]
            rec["samples"] = [[[z.real, z.imag] for z in row] for row in samples.T]
        return rec


def diagonalize_sector(params: ModelParams, n: int, x_star=0.2137, retries=3,
                       collision_tol=1e-8):
    """Diagonalize the sector block of T(x*) with paired left/right vectors.

    Raises DegenerateSpectrum when eigenvalues collide (relative spacing below
    collision_tol) at x* and at `retries` perturbed points.
    """
    idx = sector_indices(params.L, n)
    if not idx:
        raise ValueError(f"empty sector n={n}")
    x_try = complex(x_star)
    last_gap = None
    for attempt in range(retries + 1):
        Tb = transfer(x_try, params)[np.ix_(idx, idx)]
        w, vl, vr = scipy.linalg.eig(Tb, left=True, right=True)
        order = np.lexsort((w.imag.round(10), w.real.round(10)))
        w, vl, vr = w[order], vl[:, order], vr[:, order]
        scale = np.abs(w).max() + 1e-300
        m = len(w)
        if m > 1:
            diffs = np.abs(w[:, None] - w[None, :]) + np.eye(m) * 10 * scale
            last_gap = diffs.min() / scale
        overlaps = np.einsum("dk,dk->k", vl.conj(), vr)
        if (m == 1 or last_gap > collision_tol) and np.abs(overlaps).min() > 1e-10:
            left = (vl.conj() / overlaps[None, :]).T
            return EigenSystem(
                params=params, n=n, x_star=x_try, indices=idx, eigs=w,
                right=vr, left=left,
                degenerate_flags=np.zeros(m, dtype=bool),
            )
        x_try = x_try + 0.137 + 0.061j * (attempt + 1)
    raise DegenerateSpectrum(
        f"sector n={n}: eigenvalues collide (relative gap {last_gap:.2e}) after "
        f"{retries + 1} spectral points; perturb the inhomogeneities"
    )


@dataclass
class PolynomialFit:
    """Least-squares model  lam(x) = exp(-L x) * sum_k coeff[k] u^k,  u = exp(2x).

    Equivalently an exponential sum with frequencies 2k - L, giving exact
    derivatives of any order once the coefficients are fixed.
    """

    degree: int
    coefficients: np.ndarray
    residual: float
    L: int

    def __call__(self, x, d=0):
        ms = 2 * np.arange(self.degree + 1) - self.L
        w = self.coefficients * ms ** d if d else self.coefficients
        return complex(np.sum(w * np.exp(ms * x)))


def polynomiality_check(lam, params: ModelParams, pts=None, degree=None,
                        n_samples=None, radius=None, cond_limit=1e10):
    """Fit u^{L/2} * lam(x) by a polynomial in u = exp(2x) of degree <= L.

    Default sample points sit on a circle in u-space, where the Vandermonde
    system is well conditioned; user-supplied points are replaced by circle
    points when the fit is ill conditioned.
    """
    L = params.L
    degree = L if degree is None else degree
    M = n_samples or max(degree + 6, L + 5)
    r = radius or float(np.exp(2 * 0.3))

    def circle_points():
        us = r * np.exp(2j * np.pi * (np.arange(M) + 0.31) / M)
        return np.log(us) / 2

    if pts is None:
        pts = circle_points()
    pts = np.asarray(pts, dtype=complex)
    for attempt in range(2):
        us = np.exp(2 * pts)
        V = np.vander(us, degree + 1, increasing=True)
        y = np.array([np.exp(L * x) * lam(x) for x in pts])
        if np.linalg.cond(V) > cond_limit and attempt == 0:
            pts = circle_points()
            continue
        coeff, *_ = np.linalg.lstsq(V, y, rcond=None)
        resid = np.linalg.norm(V @ coeff - y) / max(np.linalg.norm(y), 1e-300)
        return PolynomialFit(degree=degree, coefficients=coeff,
                             residual=float(resid), L=L)


def left_vector_from_C(roots, params: ModelParams):
    """Bethe-type bra <0| C(w_n) ... C(w_1) as a full-space row vector.

    For roots solving the Bethe equations this is a left eigenvector of T(x)
    (a property that is verified, never assumed).  A numerically null result
    signals a degenerate algebraic Bethe state.
    """
    row = np.zeros(params.dim, dtype=complex)
    row[0] = 1.0
    for w in reversed(list(roots)):
        _, _, C, _ = monodromy_blocks(w, params)
        row = row @ C
    return row
