from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tolerances import EPS_DET


@dataclass(frozen=True, eq=False)
class DiagonalMatrix:
    """An n x n diagonal matrix, stored as its diagonal."""

    entries: np.ndarray

    def __post_init__(self):
        e = np.atleast_1d(np.asarray(self.entries, dtype=np.complex128)).copy()
        if e.ndim != 1:
            raise ValueError("diagonal entries must be a vector")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @classmethod
    def scalar(cls, lam: complex, n: int) -> DiagonalMatrix:
        return cls(np.full(n, lam, dtype=np.complex128))

    @classmethod
    def idempotent(cls, i: int, n: int) -> DiagonalMatrix:
        e = np.zeros(n)
        e[i] = 1
        return cls(e)

    @property
    def n(self) -> int:
        return self.entries.size

    def invertible(self, eps: float = EPS_DET) -> bool:
        return bool(np.all(np.abs(self.entries) > eps))

    def inverse(self) -> DiagonalMatrix:
        if not self.invertible():
            raise ZeroDivisionError("diagonal matrix is singular")
        return DiagonalMatrix(1 / self.entries)

    def __matmul__(self, other):
        if isinstance(other, DiagonalMatrix):
            return DiagonalMatrix(self.entries * other.entries)
        return NotImplemented

    def __pow__(self, k: int) -> DiagonalMatrix:
        return DiagonalMatrix(self.entries ** k)

    def __call__(self, z) -> np.ndarray:
        return np.asarray(z, dtype=np.complex128) * self.entries

    def conj(self) -> DiagonalMatrix:
        return DiagonalMatrix(self.entries.conj())

    def as_matrix(self) -> np.ndarray:
        return np.diag(self.entries)

    def allclose(self, other: DiagonalMatrix, tol: float) -> bool:
        return self.n == other.n and bool(np.max(np.abs(self.entries - other.entries)) <= tol)

    def to_list(self) -> list[dict]:
        return [{"re": float(v.real), "im": float(v.imag)} for v in self.entries]
