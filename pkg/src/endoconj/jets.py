"""Truncated multivariate power series (jets) of maps C^n -> C^m at 0.

Coefficients are stored densely, one row per output component, with the
columns ordered by total degree and then lexicographically (``z1**2`` before
``z1*z2`` before ``z2**2``). Every operation truncates at the jet's degree,
so identities between germs hold exactly "up to degree d".
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .errors import DimensionError, PreconditionError, SingularError
from .tolerances import EPS_COEFF, EPS_DET


@dataclass(frozen=True, eq=False)
class Basis:
    """Monomial index for ``n`` variables up to total degree ``degree``."""

    n: int
    degree: int
    exps: np.ndarray       # (size, n) exponents
    degrees: np.ndarray    # (size,)
    offsets: np.ndarray    # offsets[k] = first column of degree k; offsets[degree+1] = size
    parent: np.ndarray     # exps[k] - e_var[k]
    var: np.ndarray
    ti: np.ndarray         # multiplication table triples
    tj: np.ndarray
    tk: np.ndarray

    @property
    def size(self) -> int:
        return self.exps.shape[0]

    def index(self, alpha: Sequence[int]) -> int:
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.n or min(alpha, default=0) < 0:
            raise DimensionError(f"bad multi-index {alpha} for n={self.n}")
        if sum(alpha) > self.degree:
            raise DimensionError(f"multi-index {alpha} exceeds degree {self.degree}")
        return self._lookup[alpha]

    @functools.cached_property
    def _lookup(self) -> dict[tuple[int, ...], int]:
        return {tuple(int(x) for x in e): k for k, e in enumerate(self.exps)}


@functools.lru_cache(maxsize=None)
def basis(n: int, degree: int) -> Basis:
    if n < 1 or degree < 0:
        raise DimensionError(f"invalid basis n={n}, degree={degree}")
    rows = []
    offsets = [0]
    for d in range(degree + 1):
        # combinations_with_replacement yields variable multisets in an order
        # that makes the exponent vectors lexicographically descending
        for combo in itertools.combinations_with_replacement(range(n), d):
            e = [0] * n
            for v in combo:
                e[v] += 1
            rows.append(e)
        offsets.append(len(rows))
    exps = np.array(rows, dtype=np.intp).reshape(-1, n)
    degrees = exps.sum(axis=1)
    size = exps.shape[0]

    var = np.zeros(size, dtype=np.intp)
    parent = np.full(size, -1, dtype=np.intp)
    radix = (degree + 1) ** np.arange(n, dtype=np.int64)
    keys = exps.astype(np.int64) @ radix
    order = np.argsort(keys)
    sorted_keys = keys[order]

    def locate(k):
        return order[np.searchsorted(sorted_keys, k)]

    for k in range(1, size):
        v = int(np.flatnonzero(exps[k])[0])
        var[k] = v
        parent[k] = locate(keys[k] - radix[v])

    ti, tj = [], []
    for i in range(size):
        stop = offsets[degree - degrees[i] + 1]
        ti.append(np.full(stop, i, dtype=np.intp))
        tj.append(np.arange(stop, dtype=np.intp))
    ti = np.concatenate(ti)
    tj = np.concatenate(tj)
    tk = locate(keys[ti] + keys[tj]).astype(np.intp)

    return Basis(n, degree, exps, degrees, np.array(offsets, dtype=np.intp),
                 parent, var, ti, tj, np.ascontiguousarray(tk))


def _as_points(z, n: int) -> tuple[np.ndarray, bool]:
    pts = np.asarray(z, dtype=np.complex128)
    single = pts.ndim == 1
    pts = np.ascontiguousarray(pts.reshape(-1, n) if single else pts)
    if pts.shape[1] != n:
        raise DimensionError(f"points have dimension {pts.shape[1]}, expected {n}")
    return pts, single


class Jet:
    """Truncated Taylor expansion of a map C^n_in -> C^n_out at the origin."""

    __slots__ = ("coeffs", "n_in", "degree")
    __array_ufunc__ = None  # keep numpy from broadcasting over Jets

    def __init__(self, coeffs, n_in: int, degree: int):
        b = basis(n_in, degree)
        c = np.array(coeffs, dtype=np.complex128, copy=True)
        if c.ndim == 1:
            c = c.reshape(1, -1)
        if c.ndim != 2 or c.shape[1] != b.size or c.shape[0] < 1:
            raise DimensionError(
                f"coefficient array of shape {c.shape} does not fit n_in={n_in}, degree={degree}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "n_in", int(n_in))
        object.__setattr__(self, "degree", int(degree))

    def __setattr__(self, name, value):
        raise AttributeError("Jet is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, n_in: int, n_out: int, degree: int) -> Jet:
        return cls(np.zeros((n_out, basis(n_in, degree).size)), n_in, degree)

    @classmethod
    def linear(cls, A, degree: int, b=None) -> Jet:
        """The jet of ``z -> A z + b``."""
        A = np.atleast_2d(np.asarray(A, dtype=np.complex128))
        n_out, n_in = A.shape
        c = np.zeros((n_out, basis(n_in, degree).size), dtype=np.complex128)
        c[:, 1:n_in + 1] = A
        if b is not None:
            c[:, 0] = np.asarray(b, dtype=np.complex128).reshape(n_out)
        return cls(c, n_in, degree)

    @classmethod
    def identity(cls, n: int, degree: int) -> Jet:
        return cls.linear(np.eye(n), degree)

    @classmethod
    def from_terms(cls, n_in: int, n_out: int, degree: int,
                   terms: Mapping[tuple[int, tuple[int, ...]], complex]) -> Jet:
        """Build from ``{(output_index, alpha): coefficient}``."""
        b = basis(n_in, degree)
        c = np.zeros((n_out, b.size), dtype=np.complex128)
        for (out, alpha), val in terms.items():
            if not 0 <= out < n_out:
                raise DimensionError(f"output index {out} out of range")
            c[out, b.index(alpha)] += val
        return cls(c, n_in, degree)

    @classmethod
    def univariate(cls, coeffs: Sequence[complex], degree: int) -> Jet:
        """1-D jet with ``coeffs[k]`` multiplying ``z**k``."""
        c = np.zeros(degree + 1, dtype=np.complex128)
        vals = np.asarray(coeffs, dtype=np.complex128)[: degree + 1]
        c[: vals.size] = vals
        return cls(c, 1, degree)

    # -- structure ----------------------------------------------------------

    @property
    def n_out(self) -> int:
        return self.coeffs.shape[0]

    @property
    def basis(self) -> Basis:
        return basis(self.n_in, self.degree)

    @property
    def constant_term(self) -> np.ndarray:
        return self.coeffs[:, 0].copy()

    @property
    def linear_coeffs(self) -> np.ndarray:
        return self.coeffs[:, 1:self.n_in + 1].copy()

    def coefficient(self, out: int, alpha: Sequence[int]) -> complex:
        return complex(self.coeffs[out, self.basis.index(alpha)])

    def component(self, i: int) -> Jet:
        return Jet(self.coeffs[i:i + 1], self.n_in, self.degree)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def l1_rows(self) -> np.ndarray:
        """Per-component sum of coefficient moduli (sup bound on the unit polydisc)."""
        return np.abs(self.coeffs).sum(axis=1)

    def allclose(self, other: Jet, tol: float = EPS_COEFF) -> bool:
        _check_same_shape(self, other)
        return bool(np.max(np.abs(self.coeffs - other.coeffs)) <= tol)

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        try:
            return self.allclose(other)
        except DimensionError:
            return False

    __hash__ = None

    def __repr__(self):
        return f"Jet(n_in={self.n_in}, n_out={self.n_out}, degree={self.degree}, nnz={np.count_nonzero(self.coeffs)})"

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: Jet) -> Jet:
        _check_same_shape(self, other)
        return Jet(self.coeffs + other.coeffs, self.n_in, self.degree)

    def __sub__(self, other: Jet) -> Jet:
        _check_same_shape(self, other)
        return Jet(self.coeffs - other.coeffs, self.n_in, self.degree)

    def __neg__(self) -> Jet:
        return Jet(-self.coeffs, self.n_in, self.degree)

    def __mul__(self, scalar) -> Jet:
        if isinstance(scalar, Jet):
            return NotImplemented
        return Jet(complex(scalar) * self.coeffs, self.n_in, self.degree)

    __rmul__ = __mul__

    def left_mul(self, A) -> Jet:
        """The jet of ``A @ self`` for a constant matrix ``A``."""
        A = np.atleast_2d(np.asarray(A, dtype=np.complex128))
        if A.shape[1] != self.n_out:
            raise DimensionError(f"matrix {A.shape} cannot act on {self.n_out} outputs")
        return Jet(A @ self.coeffs, self.n_in, self.degree)

    def conj_coeffs(self) -> Jet:
        """The jet of ``z -> conj(self(conj(z)))``."""
        return Jet(self.coeffs.conj(), self.n_in, self.degree)

    def without_constant(self) -> Jet:
        c = self.coeffs.copy()
        c[:, 0] = 0
        return Jet(c, self.n_in, self.degree)

    def with_degree(self, degree: int) -> Jet:
        """Truncate, or zero-pad, to a different degree."""
        if degree == self.degree:
            return self
        src, dst = self.basis, basis(self.n_in, degree)
        c = np.zeros((self.n_out, dst.size), dtype=np.complex128)
        keep = min(src.size, dst.size)
        c[:, :keep] = self.coeffs[:, :keep]  # shared graded prefix
        return Jet(c, self.n_in, degree)

    def restrict_axis(self, i: int) -> Jet:
        """Restriction to the i-th coordinate axis, as a jet in one variable."""
        b = self.basis
        cols = [b.index(tuple(k if v == i else 0 for v in range(self.n_in)))
                for k in range(self.degree + 1)]
        return Jet(self.coeffs[:, cols], 1, self.degree)

    def __call__(self, z) -> np.ndarray:
        b = self.basis
        pts, single = _as_points(z, self.n_in)
        vals = kernels.eval_monomials(pts, b.parent, b.var) @ self.coeffs.T
        return vals[0] if single else vals

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        b = self.basis
        terms = []
        for out in range(self.n_out):
            for k in np.flatnonzero(self.coeffs[out]):
                v = self.coeffs[out, k]
                terms.append({"out": out, "alpha": [int(a) for a in b.exps[k]],
                              "re": float(v.real), "im": float(v.imag)})
        # graded-lex order is column order; emit by column, then output
        terms.sort(key=lambda t: (b.index(t["alpha"]), t["out"]))
        return {"n_in": self.n_in, "n_out": self.n_out, "degree": self.degree, "terms": terms}

    @classmethod
    def from_dict(cls, data: Mapping) -> Jet:
        try:
            n_in, n_out, degree = int(data["n_in"]), int(data["n_out"]), int(data["degree"])
            terms = {}
            for t in data.get("terms", []):
                key = (int(t["out"]), tuple(int(a) for a in t["alpha"]))
                terms[key] = terms.get(key, 0) + complex(float(t.get("re", 0.0)), float(t.get("im", 0.0)))
        except (KeyError, TypeError) as exc:
            raise PreconditionError(f"malformed jet JSON: {exc}") from exc
        return cls.from_terms(n_in, n_out, degree, terms)


def _check_same_shape(a: Jet, b: Jet) -> None:
    if (a.n_in, a.n_out, a.degree) != (b.n_in, b.n_out, b.degree):
        raise DimensionError(
            f"jet shapes differ: ({a.n_in}->{a.n_out}, d={a.degree}) vs ({b.n_in}->{b.n_out}, d={b.degree})")


def _require_origin_fixed(f: Jet, what: str) -> None:
    if np.max(np.abs(f.coeffs[:, 0])) > EPS_COEFF:
        raise PreconditionError(f"{what} has a non-zero constant term")


def stack(components: Iterable[Jet]) -> Jet:
    comps = list(components)
    if not comps:
        raise DimensionError("cannot stack an empty list of jets")
    for c in comps[1:]:
        if (c.n_in, c.degree) != (comps[0].n_in, comps[0].degree):
            raise DimensionError("stacked jets must share n_in and degree")
    return Jet(np.vstack([c.coeffs for c in comps]), comps[0].n_in, comps[0].degree)


def multiply(a: Jet, b: Jet) -> Jet:
    """Componentwise product of two jets with the same shape."""
    _check_same_shape(a, b)
    bs = a.basis
    rows = [kernels.mul_trunc(a.coeffs[r], b.coeffs[r], bs.ti, bs.tj, bs.tk, bs.size)
            for r in range(a.n_out)]
    return Jet(np.vstack(rows), a.n_in, a.degree)


def compose(f: Jet, g: Jet) -> Jet:
    """``f o g`` truncated at the common degree. ``g`` must fix the origin."""
    if f.n_in != g.n_out:
        raise DimensionError(f"cannot compose: f takes {f.n_in} inputs, g gives {g.n_out}")
    if f.degree != g.degree:
        raise DimensionError(f"degree mismatch: {f.degree} vs {g.degree}")
    _require_origin_fixed(g, "inner map")
    gc = np.ascontiguousarray(g.coeffs.copy())
    gc[:, 0] = 0
    fb, gb = f.basis, g.basis
    powers = kernels.power_table(gc, fb.parent, fb.var, gb.ti, gb.tj, gb.tk, gb.size)
    return Jet(f.coeffs @ powers, g.n_in, g.degree)


def linear_part(f: Jet) -> np.ndarray:
    _require_origin_fixed(f, "map")
    return f.linear_coeffs


def is_invertible(A, eps: float = EPS_DET) -> bool:
    A = np.atleast_2d(A)
    return A.shape[0] == A.shape[1] and abs(np.linalg.det(A)) > eps


def invert(f: Jet) -> Jet:
    """Compositional inverse of a germ fixing 0 with invertible linear part."""
    if f.n_in != f.n_out:
        raise DimensionError("only square jets can be inverted")
    A = linear_part(f)
    if not is_invertible(A):
        raise SingularError(f"linear part is singular (|det| = {abs(np.linalg.det(A)):.3e})")
    Ainv = np.linalg.inv(A)
    ident = Jet.identity(f.n_in, f.degree)
    nonlinear = f - Jet.linear(A, f.degree)
    g = Jet.linear(Ainv, f.degree)
    # each pass fixes one more degree of g = A^-1 (id - N o g)
    for _ in range(f.degree - 1):
        g = (ident - compose(nonlinear, g)).left_mul(Ainv)
    return g


def conjugate(t: Jet, f: Jet) -> Jet:
    """``t o f o t^-1``."""
    return compose(t, compose(f, invert(t)))


def commute_residual(a: Jet, b: Jet) -> float:
    if not (a.n_in == a.n_out == b.n_in == b.n_out):
        raise DimensionError("commute_residual needs square jets of equal dimension")
    _require_origin_fixed(a, "first map")
    _require_origin_fixed(b, "second map")
    return (compose(a, b) - compose(b, a)).max_abs()


def power(f: Jet, k: int) -> Jet:
    """``f`` composed with itself ``k`` times; negative ``k`` uses the inverse."""
    base = invert(f) if k < 0 else f
    out = Jet.identity(f.n_in, f.degree)
    for _ in range(abs(k)):
        out = compose(base, out)
    return out
