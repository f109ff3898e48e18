"""Localization of a commutative-enough semigroup at a cancellable central element.

Elements are formal products ``h f^k`` with ``h`` in a base semigroup H of
germs commuting with ``f`` and ``k`` any integer. Two formal products are
identified when ``h1 = h2 f^(k2-k1)`` for ``k1 <= k2``. Equality in H is jet
equality within ``EPS_COEFF``; the map into germs is ``[h f^k] -> h o f^k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

from .domain import AffineMap, compose_affine
from .errors import DimensionError, PreconditionError
from .jets import Jet, commute_residual, compose, invert, power
from .tolerances import EPS_COEFF


Member = Union[Jet, AffineMap]


class LocalizedSemigroup:
    """The semigroup ``S_f`` built over a finite family ``base`` of germs.

    ``base`` always contains the identity and ``f``. Construction checks that
    ``f`` commutes with every member and cancels on the right over the family.
    """

    def __init__(self, base: Sequence[Jet], f: Jet, tol: float = EPS_COEFF):
        if f.n_in != f.n_out:
            raise DimensionError("f must be a square germ")
        self.f = f
        self.tol = tol
        self.degree = f.degree
        self.dimension = f.n_in
        members = [Jet.identity(f.n_in, f.degree), f]
        for h in base:
            if (h.n_in, h.n_out, h.degree) != (f.n_in, f.n_out, f.degree):
                raise DimensionError("base germs must match f's shape")
            if not any(h.allclose(m, tol) for m in members):
                members.append(h)
        for h in members:
            r = commute_residual(h, f)
            if r > tol:
                raise PreconditionError(f"base member does not commute with f (residual {r:.2e})")
        if not check_cancellation(members, f, tol):
            raise PreconditionError("f is not right-cancellable over the base")
        self.base: tuple[Jet, ...] = tuple(members)
        self._f_inv = invert(f)

    def element(self, h: Jet, k: int = 0) -> FormalElement:
        return self._reduce(h, int(k))

    def unit(self) -> FormalElement:
        return self.element(self.base[0], 0)

    def _find(self, h: Jet) -> Jet | None:
        for m in self.base:
            if h.allclose(m, self.tol):
                return m
        return None

    def _reduce(self, h: Jet, k: int) -> FormalElement:
        # divide by f on the right while the quotient is a listed member
        rep = self._find(h) or h
        for _ in range(len(self.base) + 1):
            quotient = self._find(compose(rep, self._f_inv))
            if quotient is None:
                break
            rep, k = quotient, k + 1
        return FormalElement(rep, k, self)

    def mul(self, x: FormalElement, y: FormalElement) -> FormalElement:
        self._own(x, y)
        prod = compose(x.h, y.h)
        r = commute_residual(prod, self.f)
        if r > self.tol:
            raise PreconditionError(f"product left the commutant of f (residual {r:.2e})")
        return self._reduce(prod, x.k + y.k)

    def equal(self, x: FormalElement, y: FormalElement) -> bool:
        self._own(x, y)
        if x.k > y.k:
            x, y = y, x
        return x.h.allclose(compose(y.h, power(self.f, y.k - x.k)), self.tol)

    def universal_map(self, x: FormalElement) -> Jet:
        self._own(x)
        return compose(x.h, power(self.f, x.k))

    def _own(self, *xs: FormalElement) -> None:
        for x in xs:
            if x.semigroup is not self:
                raise PreconditionError("formal elements belong to different localized semigroups")


@dataclass(frozen=True, eq=False)
class FormalElement:
    """The class ``[h f^k]`` in canonical form (k maximal over the base)."""

    h: Jet
    k: int
    semigroup: LocalizedSemigroup = field(repr=False)

    def __mul__(self, other: FormalElement) -> FormalElement:
        return self.semigroup.mul(self, other)

    def base_index(self) -> int | None:
        for i, m in enumerate(self.semigroup.base):
            if m is self.h:
                return i
        return None

    def to_dict(self) -> dict:
        idx = self.base_index()
        return {"h": idx if idx is not None else self.h.to_dict(), "k": self.k}


def loc_mul(x: FormalElement, y: FormalElement) -> FormalElement:
    return x.semigroup.mul(x, y)


def loc_equal(x: FormalElement, y: FormalElement) -> bool:
    return x.semigroup.equal(x, y)


def universal_map(x: FormalElement) -> Jet:
    return x.semigroup.universal_map(x)


def _compose_members(a: Member, b: Member) -> Member:
    if isinstance(a, AffineMap) and isinstance(b, AffineMap):
        return compose_affine(a, b)
    if isinstance(a, Jet) and isinstance(b, Jet):
        return compose(a, b)
    raise PreconditionError("cannot mix affine maps and jets")


def _members_close(a: Member, b: Member, tol: float) -> bool:
    return a.allclose(b, tol)


def check_cancellation(H: Sequence[Member], f: Member, tol: float = EPS_COEFF) -> bool:
    """True iff ``h1 o f == h2 o f`` implies ``h1 == h2`` over all pairs in H."""
    H = list(H)
    hf = [_compose_members(h, f) for h in H]
    for i in range(len(H)):
        for j in range(i + 1, len(H)):
            if _members_close(hf[i], hf[j], tol) and not _members_close(H[i], H[j], tol):
                return False
    return True
