"""End-to-end reconstruction of the conjugating map behind a semigroup isomorphism.

A semigroup map ``phi`` is only ever queried on explicit elements: constants,
the good element ``f``, the representatives ``p_i o f`` of the projections,
and members of the diagonal family. From those answers the harness rebuilds
``psi`` (from constants), linearizes ``f`` and ``g = phi f``, samples
``L = theta_g psi theta_f^-1``, solves the diagonal functional equation, and
classifies ``psi`` as holomorphic or antiholomorphic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
from scipy.optimize import linear_sum_assignment

from .characters import (ANTIHOLOMORPHIC, HOLOMORPHIC, ExplicitForm, PointMap, ReconstructionResult,
                         character_samples, detect_permutation, explicit_L, fit_character,
                         sample_R, sample_idempotent_images)
from .diagonal import DiagonalMatrix
from .domain import (AffineMap, PolyEndo, PolydiscDomain, homothety_through, is_constant,
                     is_injective, make_very_good)
from .errors import (DimensionError, InputError, InsufficientCoverage, NumericalFailure,
                     PreconditionError, StageError)
from .jets import Jet, compose, invert, linear_part, multiply, stack
from .linearization import ProjectionSystem, build_theta, extend_theta_eval
from .localization import LocalizedSemigroup
from .sampling import DEFAULT_SEED, polydisc_grid
from .tolerances import DEFAULT_DEGREE, EPS_COEFF, EPS_EVAL, EPS_FIT

Element = Union[AffineMap, PolyEndo]


# -- semigroup maps ----------------------------------------------------------

class SemigroupIso:
    """Oracle interface: the action of ``phi`` on explicitly supplied maps."""

    dim_in: int
    dim_out: int

    def apply(self, F: Element) -> Element:
        raise NotImplementedError

    def inverse(self) -> SemigroupIso:
        raise NotImplementedError

    def contains_target(self, w) -> bool:
        return True


class ConjugationIso(SemigroupIso):
    """Ground truth ``phi F = psi0 o F o psi0^-1`` with ``psi0(z) = C s(z) + c``.

    ``s`` is the identity, or coordinate-wise conjugation when
    ``antiholomorphic`` is set. The target domain is ``psi0(unit polydisc)``.
    """

    def __init__(self, C, c=None, antiholomorphic: bool = False):
        C = np.atleast_2d(np.asarray(C, dtype=np.complex128))
        n = C.shape[0]
        if C.shape != (n, n) or abs(np.linalg.det(C)) <= 1e-12:
            raise PreconditionError("psi0 needs an invertible square matrix")
        self.C = C
        self.c = np.zeros(n, dtype=np.complex128) if c is None else np.asarray(c, dtype=np.complex128).reshape(n)
        self.antiholomorphic = bool(antiholomorphic)
        self.dim_in = self.dim_out = n
        self._Cinv = np.linalg.inv(C)

    @property
    def orientation(self) -> str:
        return ANTIHOLOMORPHIC if self.antiholomorphic else HOLOMORPHIC

    def _s(self, x):
        return np.conj(x) if self.antiholomorphic else x

    def psi0(self, z) -> np.ndarray:
        return self._s(np.asarray(z, dtype=np.complex128)) @ self.C.T + self.c

    def psi0_inverse(self, w) -> np.ndarray:
        return self._s((np.asarray(w, dtype=np.complex128) - self.c) @ self._Cinv.T)

    def contains_target(self, w) -> bool:
        return bool(np.all(np.abs(self.psi0_inverse(w)) < 1))

    def apply(self, F: Element) -> Element:
        if isinstance(F, AffineMap):
            if F.dimension != self.dim_in:
                raise DimensionError("map dimension does not match phi")
            A = self.C @ self._s(F.A) @ self._Cinv
            b = self.C @ self._s(F.b) + self.c - A @ self.c
            return AffineMap(A, b)
        if isinstance(F, PolyEndo):
            jet = F.jet_at_fixed_point
            if self.antiholomorphic:
                jet = jet.conj_coeffs()
            local = compose(jet.left_mul(self.C), Jet.linear(self._Cinv, jet.degree))
            return PolyEndo(local, self.psi0(F.fixed_point), F.containment_certificate)
        raise TypeError(f"cannot apply phi to {type(F).__name__}")

    def inverse(self) -> ConjugationIso:
        Cp = self._s(self._Cinv)
        return ConjugationIso(Cp, -self._s(self._Cinv @ self.c), self.antiholomorphic)

    def then(self, other: ConjugationIso) -> ConjugationIso:
        """``other o self`` as a conjugation (``psi = other.psi0 o self.psi0``)."""
        C = other.C @ other._s(self.C)
        c = other.C @ other._s(self.c) + other.c
        return ConjugationIso(C, c, self.antiholomorphic != other.antiholomorphic)

    def to_dict(self) -> dict:
        cx = lambda v: {"re": float(v.real), "im": float(v.imag)}
        return {"mode": "test", "psi0": {"C": [[cx(v) for v in row] for row in self.C],
                                         "c": [cx(v) for v in self.c],
                                         "antiholomorphic": self.antiholomorphic}}


def _key(F: AffineMap, tol: float) -> tuple:
    v = np.concatenate([F.A.ravel(), F.b])
    return (F.dimension,) + tuple(np.round(np.concatenate([v.real, v.imag]) / tol).astype(np.int64))


class TableIso(SemigroupIso):
    """``phi`` given by a finite table of (input, image) affine maps."""

    def __init__(self, pairs: Sequence[tuple[AffineMap, AffineMap]], tol: float = 1e-12):
        if not pairs:
            raise InputError("empty phi table")
        self.pairs = list(pairs)
        self.tol = tol
        self.dim_in = self.pairs[0][0].dimension
        self.dim_out = self.pairs[0][1].dimension
        self._index = {}
        for x, y in self.pairs:
            self._index.setdefault(_key(x, tol), y)

    def apply(self, F: Element) -> Element:
        if not isinstance(F, AffineMap):
            raise InsufficientCoverage("insufficient phi-table coverage: only affine maps are tabulated")
        hit = self._index.get(_key(F, self.tol))
        if hit is not None:
            return hit
        # the rounding grid can split two entries that agree within tol
        for x, y in self.pairs:
            if x.dimension == F.dimension and x.allclose(F, self.tol):
                return y
        raise InsufficientCoverage("insufficient phi-table coverage")

    def inverse(self) -> TableIso:
        return TableIso([(y, x) for x, y in self.pairs], self.tol)

    def to_dict(self) -> dict:
        return {"mode": "blind", "table": [{"input": x.to_dict(), "image": y.to_dict()} for x, y in self.pairs]}


class RecordingIso(SemigroupIso):
    """Wraps an iso and records every affine query, to build a blind-mode table."""

    def __init__(self, base: SemigroupIso, log: dict | None = None, flipped: bool = False):
        self.base = base
        self.log = {} if log is None else log
        self.flipped = flipped
        self.dim_in, self.dim_out = base.dim_in, base.dim_out

    def apply(self, F):
        G = self.base.apply(F)
        if isinstance(F, AffineMap):
            x, y = (G, F) if self.flipped else (F, G)
            self.log.setdefault(_key(x, 1e-15), (x, y))
        return G

    def inverse(self):
        return RecordingIso(self.base.inverse(), self.log, not self.flipped)

    def contains_target(self, w):
        return self.base.contains_target(w)

    def table(self) -> TableIso:
        return TableIso(list(self.log.values()))


class OverrideIso(SemigroupIso):
    """``phi`` with some images replaced; used for corrupted and collapsing controls."""

    def __init__(self, base: SemigroupIso, overrides: Sequence[tuple[AffineMap, AffineMap]]):
        self.base = base
        self.overrides = list(overrides)
        self.dim_in, self.dim_out = base.dim_in, base.dim_out

    def apply(self, F):
        if isinstance(F, AffineMap):
            for x, y in self.overrides:
                if x.allclose(F, 1e-14):
                    return y
        return self.base.apply(F)

    def inverse(self):
        # only meaningful when the overrides are themselves a bijection of images
        return OverrideIso(self.base.inverse(), [(y, x) for x, y in self.overrides])


def collapsing_stub(phi: SemigroupIso, z_from, z_to) -> OverrideIso:
    """``phi`` precomposed with a stub sending ``c_{z_from}`` to ``c_{z_to}``."""
    return OverrideIso(phi, [(AffineMap.constant(z_from), phi.apply(AffineMap.constant(z_to)))])


def iso_from_dict(data) -> SemigroupIso:
    try:
        mode = data.get("mode", "test" if "psi0" in data else "blind")
        if mode == "test":
            p = data["psi0"]
            cx = lambda d: complex(float(d.get("re", 0.0)), float(d.get("im", 0.0)))
            C = np.array([[cx(v) for v in row] for row in p["C"]], dtype=np.complex128)
            c = np.array([cx(v) for v in p.get("c", [{}] * len(C))], dtype=np.complex128)
            return ConjugationIso(C, c, bool(p.get("antiholomorphic", False)))
        if mode == "blind":
            return TableIso([(AffineMap.from_dict(e["input"]), AffineMap.from_dict(e["image"]))
                             for e in data["table"]])
    except (KeyError, TypeError, AttributeError, ValueError) as exc:
        raise InputError(f"malformed phi JSON: {exc}") from exc
    raise InputError(f"unknown phi mode {mode!r}")


# -- points from constants ---------------------------------------------------

def psi_from_constants(phi: SemigroupIso, z) -> np.ndarray:
    """``psi(z) = w`` iff ``phi c_z = c_w``."""
    img = phi.apply(AffineMap.constant(z))
    if not isinstance(img, AffineMap) or not is_constant(img):
        raise NumericalFailure("phi does not send the constant c_z to a constant")
    return np.array(img.b)


def verify_conjugacy(phi: SemigroupIso, fs: Sequence[AffineMap], grid_size: int = 100,
                     radius: float = 0.9, seed: int = DEFAULT_SEED) -> float:
    """``max |(phi f)(psi z) - psi(f z)|`` over ``fs`` and a quasi-random grid."""
    grid = polydisc_grid(phi.dim_in, grid_size, radius, seed=seed)
    psi = {i: psi_from_constants(phi, z) for i, z in enumerate(grid)}
    worst = 0.0
    for f in fs:
        pf = phi.apply(f)
        for i, z in enumerate(grid):
            lhs = pf(psi[i])
            rhs = psi_from_constants(phi, f(z))
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


# -- pipeline ----------------------------------------------------------------

@dataclass
class PipelineConfig:
    degree: int = DEFAULT_DEGREE
    lam_f: complex = 0.25
    samples: int = 12
    grid_size: int = 100
    grid_radius: float = 0.1
    explicit_grid: int = 1000
    seed: int = DEFAULT_SEED
    margin: float = 0.05
    route_checks: int = 3
    eps_eval: float = EPS_EVAL
    eps_fit: float = EPS_FIT


@dataclass
class PipelineReport:
    psi_samples: list
    conjugacy_residual: float
    reconstruction: ReconstructionResult
    ground_truth_error: float | None
    fixed_point_image: np.ndarray
    theta_residuals: tuple[float, float]
    route_residual: float
    details: dict = field(default_factory=dict)
    L: PointMap | None = field(default=None, repr=False)  # point evaluators of theta_g psi theta_f^-1

    @property
    def classification(self) -> str:
        return self.reconstruction.classification

    def to_dict(self) -> dict:
        cx = lambda v: {"re": float(v.real), "im": float(v.imag)}
        out = {
            "classification": self.classification,
            "reconstruction": self.reconstruction.to_dict(),
            "conjugacy_residual": self.conjugacy_residual,
            "theta_residuals": list(self.theta_residuals),
            "route_residual": self.route_residual,
            "fixed_point_image": [cx(v) for v in self.fixed_point_image],
            "psi_samples": [{"z": [cx(v) for v in z], "psi": [cx(v) for v in w]} for z, w in self.psi_samples],
        }
        out.update(self.details)
        if self.ground_truth_error is not None:
            out["ground_truth_error"] = self.ground_truth_error
        return out


class _Stage:
    def __init__(self, name):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, tp, exc, tb):
        if exc is not None and isinstance(exc, Exception) and not isinstance(exc, StageError):
            raise StageError(self.name, exc) from exc
        return False


def _order_by_axis(projections: Sequence[Jet]) -> list[Jet]:
    """Index each projection by the coordinate axis its range leans on most."""
    n = len(projections)
    cost = np.zeros((n, n))
    for r, p in enumerate(projections):
        P = linear_part(p)
        v = P[:, int(np.argmax(np.linalg.norm(P, axis=0)))]
        cost[r] = -np.log(np.abs(v) / np.linalg.norm(v) + 1e-300)
    rows, cols = linear_sum_assignment(cost)
    ordered = [None] * n
    for r, k in zip(rows, cols):
        ordered[k] = projections[r]
    return ordered


def _is_linear(j: Jet, tol: float = EPS_COEFF) -> bool:
    return float(np.max(np.abs(j.coeffs[:, j.n_in + 1:]), initial=0.0)) <= tol


def _check_good_image(g: AffineMap, w0: np.ndarray) -> None:
    if np.max(np.abs(g(w0) - w0)) > EPS_EVAL:
        raise NumericalFailure("phi f does not fix psi(0)")
    rho = float(np.max(np.abs(np.linalg.eigvals(g.A))))
    if not rho < 1 or not is_injective(g):
        raise NumericalFailure("phi f is not an injective contraction at psi(0)")


def run_pipeline(phi: SemigroupIso, config: PipelineConfig | None = None,
                 ground_truth: Callable[[np.ndarray], np.ndarray] | None = None) -> PipelineReport:
    """Reconstruct ``psi`` near 0 from the semigroup map alone.

    ``ground_truth`` (test mode) is compared against the recovered local form
    on a grid; it is never used by the reconstruction itself.
    """
    cfg = config or PipelineConfig()
    d = cfg.degree
    if phi.dim_in != phi.dim_out:
        raise InputError(f"domains have different dimensions ({phi.dim_in} vs {phi.dim_out})")
    n = phi.dim_in
    phi_inv = phi.inverse()
    zero = np.zeros(n, dtype=np.complex128)

    with _Stage("psi"):
        w0 = psi_from_constants(phi, zero)

    with _Stage("good-element"):
        f, ps = make_very_good(zero, cfg.lam_f, PolydiscDomain(n, cfg.margin), d)
        f_local = f.local_jet(zero, d)
        g = phi.apply(f)
        _check_good_image(g, w0)
        g_local = g.local_jet(w0, d)

    with _Stage("projections"):
        # p_i lives in S_f through its representative p_i f in E(Omega_1);
        # phi(p_i f) divided by g in S_g gives the image projection
        reps = []
        for p in ps:
            pf = AffineMap(linear_part(p) @ f.A, np.zeros(n))
            img = phi.apply(pf)
            reps.append(img.local_jet(w0, d))
        S_g = LocalizedSemigroup(reps, g_local)
        qs = [S_g.universal_map(S_g.element(r, -1)) for r in reps]
        qs = _order_by_axis(qs)

    with _Stage("linearize"):
        sys_f = ProjectionSystem.from_projections(ps)
        sys_g = ProjectionSystem.from_projections(qs)
        lin_f = build_theta(f_local, sys_f)
        lin_g = build_theta(g_local, sys_g)
        theta_f_inv = invert(lin_f.theta)
        theta_g_inv = invert(lin_g.theta)
        f_endo = PolyEndo(f_local, zero)

    def theta_f_ext(z):
        return extend_theta_eval(f_endo, lin_f.theta, lin_f.lam, z)

    def theta_g_ext(w):
        # Omega_2 need not be the unit polydisc: work in the local coordinate
        return extend_theta_eval(PolyEndo(g_local), lin_g.theta, lin_g.lam, w - w0)

    def L_forward(z):
        return theta_g_ext(psi_from_constants(phi, theta_f_inv(z)))

    def L_inverse(w):
        return theta_f_ext(psi_from_constants(phi_inv, w0 + theta_g_inv(w)))

    L = PointMap(L_forward, L_inverse)

    with _Stage("permutation"):
        perm = detect_permutation(sample_idempotent_images(L, n))

    with _Stage("characters"):
        fits = [None] * n
        for i, j in enumerate(perm):
            samples = character_samples(L, i, j, n, count=cfg.samples, seed=cfg.seed + i)
            fits[j] = fit_character(samples, source=i, eps=cfg.eps_fit)

    with _Stage("explicit-form"):
        result = explicit_L(L, perm, fits, grid_size=cfg.explicit_grid, seed=cfg.seed, eps=cfg.eps_eval)

    with _Stage("semigroup-route"):
        route = _route_residual(phi, L, lin_f, lin_g, w0, cfg)

    with _Stage("conjugacy"):
        fs = [f] + [AffineMap(linear_part(p) @ f.A, zero) for p in ps]
        conj_res = verify_conjugacy(phi, fs, grid_size=min(cfg.grid_size, 50), seed=cfg.seed)

    form = result.form if result.classification != "contradiction" else None
    grid = polydisc_grid(n, cfg.grid_size, cfg.grid_radius, seed=cfg.seed + 7)
    psi_samples = [(z, psi_from_constants(phi, z)) for z in grid[:10]]
    gt_error = None
    if ground_truth is not None and form is not None:
        with _Stage("ground-truth"):
            gt_error = 0.0
            for z in grid:
                rec = w0 + theta_g_inv(form(theta_f_ext(z)))
                gt_error = max(gt_error, float(np.max(np.abs(rec - ground_truth(z)))))
    return PipelineReport(psi_samples, conj_res, result, gt_error, w0,
                          (lin_f.residual, lin_g.residual), route,
                          {"lambda_f": lin_f.lam.to_list(), "lambda_g": lin_g.lam.to_list()}, L)


def _route_residual(phi, L, lin_f, lin_g, w0, cfg) -> float:
    """Compare ``R(Lambda)`` from sampling ``L`` with ``theta_g (phi h) theta_g^-1``.

    ``h = theta_f^-1 Lambda theta_f`` is a member of the diagonal family; this
    is the route through the semigroup map itself.
    """
    n = lin_f.lam.n
    d = lin_f.theta.degree
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for _ in range(cfg.route_checks):
        lam = DiagonalMatrix(0.1 * np.sqrt(rng.uniform(0.2, 1.0, n)) * np.exp(2j * np.pi * rng.random(n)))
        h_jet = compose(invert(lin_f.theta), compose(Jet.linear(lam.as_matrix(), d), lin_f.theta))
        if _is_linear(h_jet):
            h = AffineMap(h_jet.linear_coeffs, np.zeros(n))
            j_local = phi.apply(h).local_jet(w0, d)
        else:
            j_local = phi.apply(PolyEndo(h_jet)).jet_at_fixed_point
        M = compose(lin_g.theta, compose(j_local, invert(lin_g.theta)))
        M_lin = linear_part(M)
        worst = max(worst, (M - Jet.linear(np.diag(np.diag(M_lin)), d)).max_abs(),
                    float(np.max(np.abs(np.diag(M_lin) - sample_R(L, lam).entries))))
    return worst


# -- the mixed-orientation contradiction ---------------------------------------

@dataclass
class ContradictionReport:
    i: int
    j: int
    point: np.ndarray
    dbar_conjugated: float   # max |d/dzbar| of L f0 L^-1
    d_conjugated: float
    dbar_L: float            # Wirtinger derivatives of L itself
    d_L: float
    threshold: float

    @property
    def violated(self) -> bool:
        return self.dbar_conjugated > self.threshold

    def to_dict(self) -> dict:
        return {"i": self.i + 1, "j": self.j + 1, "point": [[float(v.real), float(v.imag)] for v in self.point],
                "dbar_conjugated": self.dbar_conjugated, "d_conjugated": self.d_conjugated,
                "dbar_L": self.dbar_L, "d_L": self.d_L, "violated": self.violated}


def wirtinger(F: Callable[[np.ndarray], np.ndarray], z: np.ndarray, h: float = 1e-5) -> tuple[float, float]:
    """Max moduli of ``dF/dz_k`` and ``dF/dzbar_k`` by central differences."""
    z = np.asarray(z, dtype=np.complex128)
    d_max = dbar_max = 0.0
    for k in range(z.size):
        e = np.zeros_like(z)
        e[k] = h
        dx = (np.asarray(F(z + e)) - np.asarray(F(z - e))) / (2 * h)
        dy = (np.asarray(F(z + 1j * e)) - np.asarray(F(z - 1j * e))) / (2 * h)
        d_max = max(d_max, float(np.max(np.abs(0.5 * (dx - 1j * dy)))))
        dbar_max = max(dbar_max, float(np.max(np.abs(0.5 * (dx + 1j * dy)))))
    return d_max, dbar_max


def mixed_map(n: int, conj_coords: Sequence[int] = (1,), B=None) -> ExplicitForm:
    mask = [k in conj_coords for k in range(n)]
    return ExplicitForm.from_mask(np.eye(n) if B is None else B, mask)


def demonstrate_mixed_contradiction(n: int = 2, form: ExplicitForm | None = None,
                                    theta_f: Jet | None = None, lam: complex = 0.1,
                                    point=None, degree: int = DEFAULT_DEGREE,
                                    threshold: float = 10 * EPS_EVAL) -> ContradictionReport:
    """Conjugate ``f0 = theta_f^-1 lam (.., t_i t_j, .., t_j, ..) theta_f`` through ``L``.

    For a mixed ``L`` the conjugated map has a non-vanishing d/dzbar, so it
    cannot be the (holomorphic) image of ``f0``.
    """
    if n < 2:
        raise PreconditionError("the mixed-orientation argument needs n >= 2")
    form = form or mixed_map(n)
    if form.n != n:
        raise DimensionError("explicit form has the wrong dimension")
    mask = form.conj_mask
    holo = [k for k in range(n) if not mask[k]]
    anti = [k for k in range(n) if mask[k]]
    i = holo[0] if holo and anti else 0
    j = anti[0] if holo and anti else 1
    theta = Jet.identity(n, degree) if theta_f is None else theta_f
    comps = [theta.component(k) for k in range(n)]
    comps[i] = multiply(comps[i], comps[j])
    f0 = compose(invert(theta), stack(comps) * lam)
    F = lambda w: form(f0(form.inverse(w)))
    point = np.full(n, 0.05, dtype=np.complex128) if point is None else np.asarray(point, dtype=np.complex128)
    d_conj, dbar_conj = wirtinger(F, point)
    d_L, dbar_L = wirtinger(form, point)
    return ContradictionReport(i, j, point, dbar_conj, d_conj, dbar_L, d_L, threshold)


# -- epimorphism separation ------------------------------------------------------

@dataclass
class SeparationReport:
    psi_z1: np.ndarray
    psi_z2: np.ndarray
    psi_zeta: np.ndarray
    value_from_z1: np.ndarray   # phi h evaluated at psi(z1)
    value_from_z2: np.ndarray   # phi h evaluated at psi(z2)
    residual_z1: float          # |phi h(psi z1) - psi(h z1)|
    residual_z2: float          # |phi h(psi z2) - psi(h z2)|
    collapsed: bool
    contradiction: bool

    @property
    def consistent(self) -> bool:
        return not self.contradiction and max(self.residual_z1, self.residual_z2) <= EPS_EVAL

    def to_dict(self) -> dict:
        cx = lambda v: [[float(x.real), float(x.imag)] for x in v]
        return {"psi_z1": cx(self.psi_z1), "psi_z2": cx(self.psi_z2), "psi_zeta": cx(self.psi_zeta),
                "value_from_z1": cx(self.value_from_z1), "value_from_z2": cx(self.value_from_z2),
                "residual_z1": self.residual_z1, "residual_z2": self.residual_z2,
                "collapsed": self.collapsed, "contradiction": self.contradiction,
                "consistent": self.consistent}


def epimorphism_separation(z1, z2, zeta, phi: SemigroupIso, eps: float = EPS_EVAL) -> SeparationReport:
    """Apply ``phi h o psi = psi o h`` at z1 and z2 for the homothety h fixing z1 with h(z2) = zeta."""
    z1, z2, zeta = (np.atleast_1d(np.asarray(v, dtype=np.complex128)) for v in (z1, z2, zeta))
    if np.max(np.abs(z1 - z2)) <= eps:
        raise PreconditionError("z1 and z2 must differ")
    h = homothety_through(z1, z2, zeta)
    ph = phi.apply(h)
    p1, p2, pz = (psi_from_constants(phi, v) for v in (z1, z2, zeta))
    v1, v2 = ph(p1), ph(p2)
    r1 = float(np.max(np.abs(v1 - psi_from_constants(phi, h(z1)))))
    r2 = float(np.max(np.abs(v2 - psi_from_constants(phi, h(z2)))))
    collapsed = bool(np.max(np.abs(p1 - p2)) <= eps)
    # with psi(z1) = psi(z2) the relation demands phi h take two values at one point
    contradiction = collapsed and bool(np.max(np.abs(p1 - pz)) > eps)
    return SeparationReport(p1, p2, pz, v1, v2, r1, r2, collapsed, contradiction)


def random_conjugation(rng: np.random.Generator, n: int, antiholomorphic: bool = False,
                       permutation: Sequence[int] | None = None, spread: float = 0.3,
                       shift: float = 0.2) -> ConjugationIso:
    """A random ``psi0(z) = Pi (D + E) s(z) + c`` with a planted permutation ``Pi``."""
    perm = rng.permutation(n) if permutation is None else np.asarray(permutation)
    Pi = np.zeros((n, n))
    Pi[perm, np.arange(n)] = 1  # column i goes to row perm[i]
    D = np.diag(np.exp(2j * np.pi * rng.random(n)) * rng.uniform(0.5, 1.5, n))
    E = spread * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / (2 * n)
    np.fill_diagonal(E, 0)
    c = shift * (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / 2
    return ConjugationIso(Pi @ (D + E), c, antiholomorphic)
