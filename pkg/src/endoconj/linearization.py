"""Linearization of germs that commute with a system of idempotent projections.

Pipeline for a germ ``h`` commuting with projections ``p_1..p_n``:

1. straighten each ``p_i`` to its linear part with ``xi_i = id + (2P_i - id)(p_i - P_i)``;
2. diagonalize the linear parts simultaneously (``A P_i A^-1 = Delta_i``);
3. restrict ``A xi_i h (A xi_i)^-1`` to the i-th axis and solve its Schroeder
   equation ``eta(g(z)) = lam * eta(z)`` coefficient by coefficient;
4. assemble ``theta_i = eta_i o pi_i o A xi_i o p_i``.

The resulting ``theta`` satisfies ``theta o h = Lambda theta`` up to the
truncation degree, with ``d theta(0) = A``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .diagonal import DiagonalMatrix
from .domain import PolyEndo
from .errors import ConvergenceError, DimensionError, PreconditionError, SingularError
from .jets import Jet, commute_residual, compose, conjugate, is_invertible, linear_part, stack
from .tolerances import ACCURACY_RADIUS, EPS_COEFF, EPS_EVAL, L_MAX


def _rank(P: np.ndarray, tol: float = 1e-8) -> int:
    s = np.linalg.svd(P, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0] if s.size else 0.0)))


def _range_vector(P: np.ndarray) -> np.ndarray:
    """A spanning vector of a rank-one matrix's range, scaled so its largest entry is 1."""
    col = P[:, int(np.argmax(np.linalg.norm(P, axis=0)))]
    return col / col[int(np.argmax(np.abs(col)))]


def simultaneous_diagonalize(Ps: Sequence[np.ndarray], tol: float = EPS_COEFF) -> np.ndarray:
    """Return ``A`` with ``A P_i A^-1`` the i-th coordinate block projection.

    The P_i must be non-zero idempotents with ``P_i P_j = 0`` and ranks
    summing to n. Rank-one ranges are scaled so their largest entry is 1,
    which makes ``A = I`` when the P_i are already coordinate projections.
    """
    Ps = [np.atleast_2d(np.asarray(P, dtype=np.complex128)) for P in Ps]
    if not Ps:
        raise PreconditionError("need at least one projection")
    n = Ps[0].shape[0]
    for i, P in enumerate(Ps):
        if P.shape != (n, n):
            raise DimensionError("projections must be square and of equal size")
        if np.max(np.abs(P)) <= tol:
            raise PreconditionError(f"P_{i} is zero")
        if np.max(np.abs(P @ P - P)) > tol:
            raise PreconditionError(f"P_{i} is not idempotent")
        for j, Q in enumerate(Ps):
            if i != j and np.max(np.abs(P @ Q)) > tol:
                raise PreconditionError(f"P_{i} P_{j} != 0")
    ranks = [_rank(P) for P in Ps]
    if sum(ranks) != n:
        raise PreconditionError(f"ranks sum to {sum(ranks)}, need {n}")

    columns = []
    for P, r in zip(Ps, ranks):
        if r == 1:
            columns.append(_range_vector(P)[:, None])
        else:
            U = np.linalg.svd(P)[0]
            columns.append(U[:, :r])
    Ainv = np.hstack(columns)
    if not is_invertible(Ainv):
        raise SingularError("ranges of the projections do not span C^n")
    A = np.linalg.inv(Ainv)

    start = 0
    for P, r in zip(Ps, ranks):
        target = np.zeros((n, n))
        target[range(start, start + r), range(start, start + r)] = 1
        start += r
        resid = np.max(np.abs(A @ P @ Ainv - target))
        if resid > tol:
            raise SingularError(f"diagonalization residual {resid:.2e} exceeds {tol:g}")
    return A


def linearize_idempotent(p: Jet, tol: float = EPS_COEFF) -> Jet:
    """``xi = id + (2P - id)(p - P)``; then ``xi o p = P o xi`` and ``d xi(0) = id``."""
    if p.n_in != p.n_out:
        raise DimensionError("idempotents must be square")
    r = (compose(p, p) - p).max_abs()
    if r > tol:
        raise PreconditionError(f"p is not idempotent (residual {r:.2e})")
    P = linear_part(p)
    n = p.n_in
    return Jet.identity(n, p.degree) + (p - Jet.linear(P, p.degree)).left_mul(2 * P - np.eye(n))


@dataclass(frozen=True, eq=False)
class ProjectionSystem:
    projections: tuple[Jet, ...]
    diagonalizer: np.ndarray
    linear_parts: tuple[np.ndarray, ...]

    @classmethod
    def from_projections(cls, projections: Sequence[Jet], tol: float = EPS_COEFF) -> ProjectionSystem:
        ps = tuple(projections)
        if not ps:
            raise PreconditionError("empty projection system")
        n = ps[0].n_in
        if len(ps) != n:
            raise PreconditionError(f"need {n} projections in dimension {n}, got {len(ps)}")
        for i, p in enumerate(ps):
            if (p.n_in, p.n_out, p.degree) != (n, n, ps[0].degree):
                raise DimensionError("projections must share shape and degree")
            if p.max_abs() <= tol:
                raise PreconditionError(f"p_{i} is zero")
            if (compose(p, p) - p).max_abs() > tol:
                raise PreconditionError(f"p_{i} is not idempotent")
        for i, p in enumerate(ps):
            for j, q in enumerate(ps):
                if i != j and compose(p, q).max_abs() > tol:
                    raise PreconditionError(f"p_{i} p_{j} != 0")
        Ps = tuple(linear_part(p) for p in ps)
        return cls(ps, simultaneous_diagonalize(Ps, tol), Ps)

    @property
    def dimension(self) -> int:
        return len(self.projections)

    @property
    def degree(self) -> int:
        return self.projections[0].degree

    @classmethod
    def coordinate(cls, n: int, degree: int) -> ProjectionSystem:
        eye = np.eye(n)
        return cls.from_projections([Jet.linear(np.diag(eye[i]), degree) for i in range(n)])

    def straighteners(self) -> list[Jet]:
        """``A xi_i`` for each projection; conjugates ``p_i`` to ``Delta_i``."""
        return [linearize_idempotent(p).left_mul(self.diagonalizer) for p in self.projections]


@dataclass(frozen=True, eq=False)
class LinearizationData:
    theta: Jet
    lam: DiagonalMatrix
    residual: float

    def to_dict(self) -> dict:
        return {"theta": self.theta.to_dict(), "lambda": self.lam.to_list(), "residual": self.residual}


def schroeder_coefficients(g_coeffs: np.ndarray, lam: complex) -> np.ndarray:
    """Normalized Koenigs coefficients for a 1-D germ given by ``g_coeffs``."""
    d = g_coeffs.size - 1
    b = Jet.identity(1, d).basis
    gc = np.ascontiguousarray(g_coeffs.reshape(1, -1).astype(np.complex128))
    gc[0, 0] = 0
    G = kernels.power_table(gc, b.parent, b.var, b.ti, b.tj, b.tk, b.size)  # G[m, k] = [g^m]_k
    eta = np.zeros(d + 1, dtype=np.complex128)
    if d >= 1:
        eta[1] = 1.0
    for k in range(2, d + 1):
        eta[k] = np.dot(eta[1:k], G[1:k, k]) / (lam - lam ** k)
    return eta


def koenigs_1d(g: Jet) -> Jet:
    """The normalized solution of ``eta o g = lam * eta`` with ``lam = g'(0)``."""
    if g.n_in != 1 or g.n_out != 1:
        raise DimensionError("koenigs_1d needs a germ C -> C")
    if abs(g.coeffs[0, 0]) > EPS_COEFF:
        raise PreconditionError("g must fix 0")
    lam = complex(g.coeffs[0, 1])
    if not 0 < abs(lam) < 1:
        raise PreconditionError(f"|g'(0)| = {abs(lam):g} is not in (0, 1)")
    return Jet(schroeder_coefficients(g.coeffs[0], lam), 1, g.degree)


def _axis_eigenvalue(H: np.ndarray, i: int, tol: float) -> complex:
    row = np.delete(H[i], i)
    col = np.delete(H[:, i], i)
    off = max(np.max(np.abs(row), initial=0.0), np.max(np.abs(col), initial=0.0))
    if off > tol:
        raise PreconditionError(f"straightened linear part mixes axis {i} with others ({off:.2e})")
    return complex(H[i, i])


def build_theta(h: Jet, sys: ProjectionSystem, tol: float = EPS_COEFF) -> LinearizationData:
    """Linearize ``h`` using the projection system; see the module docstring."""
    n = sys.dimension
    if (h.n_in, h.n_out) != (n, n) or h.degree != sys.degree:
        raise DimensionError("h does not match the projection system")
    if np.max(np.abs(h.constant_term)) > EPS_COEFF:
        raise PreconditionError("h must fix 0")
    for i, p in enumerate(sys.projections):
        r = commute_residual(h, p)
        if r > tol:
            raise PreconditionError(f"h does not commute with p_{i} (residual {r:.2e})")
    d = h.degree
    eye = np.eye(n)
    components, lams = [], []
    for i, (xi, p) in enumerate(zip(sys.straighteners(), sys.projections)):
        h_i = conjugate(xi, h)
        lam = _axis_eigenvalue(linear_part(h_i), i, tol)
        if not 0 < abs(lam) < 1:
            raise PreconditionError(f"eigenvalue {lam:.4g} on axis {i} has modulus outside (0, 1)")
        eta = koenigs_1d(h_i.component(i).restrict_axis(i))
        pi = Jet.linear(eye[i:i + 1], d)
        components.append(compose(eta, compose(pi, compose(xi, p))))
        lams.append(lam)
    theta = stack(components)
    lam = DiagonalMatrix(np.array(lams))
    residual = (compose(theta, h) - theta.left_mul(lam.as_matrix())).max_abs()
    return LinearizationData(theta, lam, residual)


def check_simultaneous(h_list: Sequence[Jet], f: Jet, sys: ProjectionSystem,
                       tol: float = EPS_COEFF) -> bool:
    """True iff every ``h`` is linearized by the same ``theta`` as ``f``."""
    problems = []
    for k, h in enumerate(h_list):
        r = commute_residual(h, f)
        if r > tol:
            problems.append(f"h[{k}] does not commute with f ({r:.2e})")
        for i, p in enumerate(sys.projections):
            r = commute_residual(h, p)
            if r > tol:
                problems.append(f"h[{k}] does not commute with p_{i} ({r:.2e})")
    if problems:
        raise PreconditionError("; ".join(problems))
    theta_f = build_theta(f, sys, tol).theta
    return all(build_theta(h, sys, tol).theta.allclose(theta_f, tol) for h in h_list)


def extend_theta_eval(f: PolyEndo, theta_local: Jet, lam: DiagonalMatrix, w,
                      radius: float = ACCURACY_RADIUS, l_max: int = L_MAX,
                      eps: float = EPS_EVAL) -> np.ndarray:
    """Evaluate ``Lambda^-l theta(f^l(w))`` for ``l`` large enough to be stable.

    Iteration starts at the first ``l`` whose orbit point is within ``radius``
    of the fixed point (sup norm) and continues until consecutive values agree
    within ``eps / 10``.
    """
    w = np.asarray(w, dtype=np.complex128)
    if w.shape != (f.dimension,):
        raise DimensionError("w has the wrong dimension")
    if not np.all(np.abs(w) < 1):
        raise PreconditionError("w lies outside the unit polydisc")
    fp = f.fixed_point
    x = w
    l = 0
    while np.max(np.abs(x - fp)) > radius:
        if l >= l_max:
            raise ConvergenceError(f"orbit did not enter the radius-{radius:g} ball within {l_max} steps")
        x = f(x)
        l += 1
        if not np.all(np.isfinite(x)):
            raise ConvergenceError("orbit diverged")
    inv = lam.inverse().entries
    value = inv ** l * theta_local(x - fp)
    while l < l_max:
        x = f(x)
        l += 1
        nxt = inv ** l * theta_local(x - fp)
        if np.max(np.abs(nxt - value)) <= eps / 10:
            return nxt
        value = nxt
    raise ConvergenceError(f"values did not stabilize within {l_max} iterations")

