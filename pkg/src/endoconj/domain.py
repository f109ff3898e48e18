"""Unit-polydisc model with explicitly represented endomorphisms.

Containment is certified by a row-wise l1 bound: an affine map ``Az + b``
sends the open unit polydisc into itself whenever every row satisfies
``sum_j |A_ij| + |b_i| <= 1``. The bound is sufficient, not necessary, and
maps that fail it are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContainmentError, DimensionError, PreconditionError
from .jets import Jet, is_invertible
from .tolerances import DEFAULT_DEGREE, DEFAULT_MARGIN, EPS_COEFF, EPS_DET


@dataclass(frozen=True)
class PolydiscDomain:
    dimension: int
    margin: float = DEFAULT_MARGIN

    def __post_init__(self):
        if self.dimension < 1:
            raise DimensionError("dimension must be >= 1")
        if not 0 < self.margin < 1:
            raise PreconditionError("margin must lie in (0, 1)")

    def contains(self, z, radius: float = 1.0) -> bool:
        z = np.asarray(z, dtype=np.complex128)
        return z.shape[-1] == self.dimension and bool(np.all(np.abs(z) < radius))


def _vec(x, n: int | None = None) -> np.ndarray:
    v = np.atleast_1d(np.asarray(x, dtype=np.complex128))
    if v.ndim != 1 or (n is not None and v.size != n):
        raise DimensionError(f"expected a vector of length {n}, got shape {v.shape}")
    return v


@dataclass(frozen=True, eq=False)
class AffineMap:
    """The map ``z -> A z + b``."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=np.complex128))
        b = _vec(self.b, A.shape[0])
        if A.shape[0] != A.shape[1]:
            raise DimensionError("endomorphisms need a square matrix")
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @classmethod
    def constant(cls, z) -> AffineMap:
        z = _vec(z)
        return cls(np.zeros((z.size, z.size)), z)

    @classmethod
    def identity(cls, n: int) -> AffineMap:
        return cls(np.eye(n), np.zeros(n))

    @classmethod
    def homothety(cls, center, t: complex) -> AffineMap:
        c = _vec(center)
        return cls(t * np.eye(c.size), (1 - t) * c)

    @property
    def dimension(self) -> int:
        return self.b.size

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=np.complex128)
        return z @ self.A.T + self.b

    def then(self, other: AffineMap) -> AffineMap:
        """``other o self``."""
        return compose_affine(other, self)

    def certificate(self) -> float:
        return float(np.max(np.abs(self.A).sum(axis=1) + np.abs(self.b)))

    def is_endomorphism(self) -> bool:
        rows = np.abs(self.A).sum(axis=1) + np.abs(self.b)
        # a zero row needs |b_i| < 1 strictly to stay in the open disc
        zero_row = np.abs(self.A).sum(axis=1) == 0
        return bool(np.all(rows <= 1.0) and np.all(np.abs(self.b[zero_row]) < 1.0))

    def fixed_point(self) -> np.ndarray:
        n = self.dimension
        M = np.eye(n) - self.A
        if not is_invertible(M):
            raise PreconditionError("I - A is singular; no unique fixed point")
        return np.linalg.solve(M, self.b)

    def local_jet(self, at, degree: int = DEFAULT_DEGREE) -> Jet:
        """Jet of ``u -> f(at + u) - at``; its constant term vanishes iff ``at`` is fixed."""
        at = _vec(at, self.dimension)
        return Jet.linear(self.A, degree, self(at) - at)

    def allclose(self, other: AffineMap, tol: float = EPS_COEFF) -> bool:
        return (self.A.shape == other.A.shape
                and bool(np.max(np.abs(self.A - other.A)) <= tol)
                and bool(np.max(np.abs(self.b - other.b)) <= tol))

    def to_dict(self) -> dict:
        cx = lambda v: {"re": float(v.real), "im": float(v.imag)}
        return {"A": [[cx(v) for v in row] for row in self.A], "b": [cx(v) for v in self.b]}

    @classmethod
    def from_dict(cls, data) -> AffineMap:
        try:
            cx = lambda d: complex(float(d.get("re", 0.0)), float(d.get("im", 0.0)))
            A = [[cx(v) for v in row] for row in data["A"]]
            b = [cx(v) for v in data["b"]]
        except (KeyError, TypeError, AttributeError) as exc:
            raise PreconditionError(f"malformed affine map JSON: {exc}") from exc
        return cls(np.array(A, dtype=np.complex128).reshape(len(b), len(b)), b)


def compose_affine(f: AffineMap, g: AffineMap) -> AffineMap:
    """``f o g``, exact."""
    if f.dimension != g.dimension:
        raise DimensionError("dimension mismatch")
    return AffineMap(f.A @ g.A, f.A @ g.b + f.b)


@dataclass(frozen=True, eq=False)
class PolyEndo:
    """A polynomial endomorphism given by its jet at a fixed point.

    ``f(w) = fixed_point + jet(w - fixed_point)``. When the fixed point is the
    origin the containment certificate defaults to the largest row l1 norm of
    the coefficients; otherwise it must be supplied.
    """

    jet_at_fixed_point: Jet
    fixed_point: np.ndarray = None
    containment_certificate: float | None = field(default=None)

    def __post_init__(self):
        j = self.jet_at_fixed_point
        if j.n_in != j.n_out:
            raise DimensionError("endomorphism jets must be square")
        if np.max(np.abs(j.constant_term)) > EPS_COEFF:
            raise PreconditionError("jet at the fixed point must vanish at 0")
        fp = np.zeros(j.n_in, dtype=np.complex128) if self.fixed_point is None else _vec(self.fixed_point, j.n_in)
        object.__setattr__(self, "fixed_point", fp)
        cert = self.containment_certificate
        if cert is None and not np.any(fp):
            cert = float(j.l1_rows().max())
        object.__setattr__(self, "containment_certificate", cert)

    @property
    def dimension(self) -> int:
        return self.jet_at_fixed_point.n_in

    def __call__(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=np.complex128)
        return self.fixed_point + self.jet_at_fixed_point(w - self.fixed_point)

    def is_contained(self, margin: float = 0.0) -> bool:
        c = self.containment_certificate
        return c is not None and c < 1 - margin

    def to_dict(self) -> dict:
        return {"jet": self.jet_at_fixed_point.to_dict(),
                "fixed_point": [{"re": float(v.real), "im": float(v.imag)} for v in self.fixed_point],
                "certificate": self.containment_certificate}


def is_constant(f: AffineMap) -> bool:
    return bool(np.max(np.abs(f.A), initial=0.0) <= EPS_COEFF)


def is_injective(f: AffineMap) -> bool:
    return is_invertible(f.A, EPS_DET)


def is_good_at(f: AffineMap, z, domain: PolydiscDomain | None = None) -> bool:
    z = _vec(z, f.dimension)
    domain = domain or PolydiscDomain(f.dimension)
    if not domain.contains(z):
        raise PreconditionError("z must lie in the open polydisc")
    if np.max(np.abs(f(z) - z)) > EPS_COEFF:
        return False
    rho = float(np.max(np.abs(np.linalg.eigvals(f.A))))
    return rho < 1 and f.certificate() < 1 - domain.margin and is_injective(f)


def make_good(z, lam: complex, domain: PolydiscDomain | None = None) -> AffineMap:
    """The homothety ``zeta -> z + lam (zeta - z)``, certified to be good at z."""
    z = _vec(z)
    domain = domain or PolydiscDomain(z.size)
    if z.size != domain.dimension:
        raise DimensionError("z does not match the domain dimension")
    if not domain.contains(z):
        raise PreconditionError("z must lie in the open polydisc")
    if abs(lam) == 0:
        raise PreconditionError("lam must be non-zero")
    f = AffineMap.homothety(z, lam)
    if not f.certificate() < 1 - domain.margin:
        raise ContainmentError(
            f"|lam| = {abs(lam):g} too large at this point: certificate {f.certificate():.4f} >= {1 - domain.margin:g}")
    return f


def coordinate_projections(n: int, degree: int = DEFAULT_DEGREE) -> list[Jet]:
    eye = np.eye(n)
    return [Jet.linear(np.diag(eye[i]), degree) for i in range(n)]


def make_very_good(z, lam: complex, domain: PolydiscDomain | None = None,
                   degree: int = DEFAULT_DEGREE) -> tuple[AffineMap, list[Jet]]:
    """A good homothety at z with the coordinate projections as its projection system.

    The projections are jets in the local coordinate ``zeta - z``.
    """
    f = make_good(z, lam, domain)
    return f, coordinate_projections(f.dimension, degree)


def homothety_through(center, src, dst) -> AffineMap:
    """The homothety fixing ``center`` and sending ``src`` to ``dst``."""
    c, s, d = _vec(center), _vec(src), _vec(dst)
    if not c.size == s.size == d.size:
        raise DimensionError("center, src and dst must share a dimension")
    u, v = s - c, d - c
    k = int(np.argmax(np.abs(u)))
    if abs(u[k]) <= EPS_COEFF:
        raise PreconditionError("src coincides with center")
    t = v[k] / u[k]
    if np.max(np.abs(v - t * u)) > EPS_COEFF:
        raise PreconditionError("dst - center is not a complex multiple of src - center")
    h = AffineMap.homothety(c, t)
    if not h.is_endomorphism():
        raise ContainmentError(f"homothety with t={t:.4g} fails the containment certificate")
    return h
