"""Small dense symmetric bilinear forms: signatures, definiteness, restriction.

Eigenvalue-based throughout; the zero threshold is always relative to the
form's characteristic magnitude so that degeneracies that are exact in the
underlying geometry (but blurred by rounding) are detected reliably.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .errors import DegenerateFrameError

DEFAULT_ZERO_TOL = 1e-9


class Signature(NamedTuple):
    n_pos: int
    n_neg: int
    n_zero: int
    tol: float

    @property
    def dimension(self) -> int:
        return self.n_pos + self.n_neg + self.n_zero


class SymmetricForm:
    """Symmetric bilinear form on R^d stored as an exactly symmetric matrix."""

    def __init__(self, matrix):
        m = np.atleast_2d(np.asarray(matrix, dtype=float))
        if m.size == 0:
            m = m.reshape(0, 0)
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"matrix must be square, got shape {m.shape}")
        m = 0.5 * (m + m.T)
        m.setflags(write=False)
        self.matrix = m
        self.dimension = m.shape[0]
        self.scale = float(np.abs(m).max()) if m.size else 0.0
        self._eigs: np.ndarray | None = None

    def eigenvalues(self) -> np.ndarray:
        if self._eigs is None:
            self._eigs = np.linalg.eigvalsh(self.matrix) if self.dimension else np.zeros(0)
        return self._eigs

    def value(self, v, w) -> float:
        v = np.asarray(v, dtype=float)
        w = np.asarray(w, dtype=float)
        return float(v @ self.matrix @ w)

    def det(self) -> float:
        return float(np.linalg.det(self.matrix)) if self.dimension else 1.0

    def signature(self, tol: float = DEFAULT_ZERO_TOL) -> Signature:
        """Count eigenvalues, treating |lam| <= tol * max(1, scale) as zero."""
        if tol <= 0:
            raise ValueError("tol must be positive")
        cut = tol * max(1.0, self.scale)
        eigs = self.eigenvalues()
        n_zero = int(np.sum(np.abs(eigs) <= cut))
        n_pos = int(np.sum(eigs > cut))
        n_neg = int(np.sum(eigs < -cut))
        return Signature(n_pos, n_neg, n_zero, tol)

    def is_definite(self, sign: int, tol: float = DEFAULT_ZERO_TOL) -> bool:
        """True iff the form is positive (sign=+1) or negative (sign=-1) definite.

        The empty form is vacuously definite of either sign.
        """
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        sig = self.signature(tol)
        if sign == 1:
            return sig.n_pos == self.dimension
        return sig.n_neg == self.dimension

    def psd_with_kernel_dim(self, tol: float = DEFAULT_ZERO_TOL) -> tuple[bool, int]:
        """Return (positive semidefinite?, numeric kernel dimension)."""
        sig = self.signature(tol)
        return sig.n_neg == 0, sig.n_zero

    def restrict(self, basis: Sequence, tol: float = DEFAULT_ZERO_TOL) -> "SymmetricForm":
        """Gram matrix of the form on the span of the given vectors.

        Raises if the vectors are numerically dependent (rank check at tol).
        """
        vecs = np.asarray(basis, dtype=float)
        if vecs.size == 0:
            return SymmetricForm(np.zeros((0, 0)))
        vecs = np.atleast_2d(vecs)
        if vecs.shape[1] != self.dimension:
            raise ValueError(
                f"basis vectors live in R^{vecs.shape[1]}, form in R^{self.dimension}"
            )
        svals = np.linalg.svd(vecs, compute_uv=False)
        if svals.size and svals.min() <= tol * max(1.0, svals.max()):
            raise DegenerateFrameError("restriction basis is rank deficient")
        return SymmetricForm(vecs @ self.matrix @ vecs.T)

    def __repr__(self):
        return f"SymmetricForm({self.matrix.tolist()})"
