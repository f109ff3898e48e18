"""The diagonal functional equation ``R(L1 L2) = R(L1) R(L2)``.

``R(Lambda) = L Lambda L^-1`` is sampled by point evaluation of ``L`` and its
inverse. Each output coordinate of ``R`` depends on one input coordinate
through a multiplicative character ``q``; characters are classified against
the admissible forms ``q(lam) = lam``, ``q(lam) = conj(lam)`` and ``q = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .diagonal import DiagonalMatrix
from .errors import FitError, NumericalFailure, PreconditionError, SingularError
from .jets import is_invertible
from .sampling import DEFAULT_SEED, annulus_samples, polydisc_grid
from .tolerances import EPS_EVAL, EPS_FIT

HOLOMORPHIC = "holomorphic"
ANTIHOLOMORPHIC = "antiholomorphic"
CONSTANT = "constant"
MIXED = "mixed-invalid"
CONTRADICTION = "contradiction"

AXIS_SCALE = 0.05       # |w| of the axis points used to read off R(Lambda)
IDEMPOTENT_SCALE = 0.1  # modulus standing in for the 1 of Delta_i
IDEMPOTENT_EPS = (1e-2, 1e-3, 1e-4)
CONCENTRATION = 10.0


class PointMap(NamedTuple):
    """Pointwise evaluators of a map ``L`` and its inverse on (n,) vectors."""

    forward: Callable[[np.ndarray], np.ndarray]
    inverse: Callable[[np.ndarray], np.ndarray]


class NotDiagonalError(NumericalFailure):
    pass


def sample_R(L: PointMap, lam: DiagonalMatrix, scale: float = AXIS_SCALE,
             eps: float = EPS_EVAL) -> DiagonalMatrix:
    """The diagonal matrix ``M`` with ``L Lambda L^-1 = M``.

    Reads ``M_kk`` from the images of ``scale * e_k`` and ``i scale * e_k``;
    both must be multiples of ``e_k`` by the same factor.
    """
    n = lam.n
    diag = np.empty(n, dtype=np.complex128)
    for k in range(n):
        ratios = []
        for t in (scale, 1j * scale):
            w = np.zeros(n, dtype=np.complex128)
            w[k] = t
            img = np.asarray(L.forward(lam(L.inverse(w))), dtype=np.complex128)
            off = np.max(np.abs(np.delete(img, k)), initial=0.0)
            if off > eps:
                raise NotDiagonalError(f"L Lambda L^-1 moves axis {k} off itself (|off| = {off:.2e})")
            ratios.append(img[k] / t)
        if abs(ratios[0] - ratios[1]) > eps / scale:
            raise NotDiagonalError(f"L Lambda L^-1 is not complex-linear on axis {k}")
        diag[k] = ratios[0]
    return DiagonalMatrix(diag)


def sample_idempotent_images(L: PointMap, n: int, scale: float = IDEMPOTENT_SCALE,
                             eps_seq: Sequence[float] = IDEMPOTENT_EPS) -> list[list[tuple[float, DiagonalMatrix]]]:
    """For each i, ``R(scale Delta_i + e (I - Delta_i))`` along a decreasing sequence of ``e``."""
    out = []
    for i in range(n):
        row = []
        for e in eps_seq:
            entries = np.full(n, e, dtype=np.complex128)
            entries[i] = scale
            row.append((e, sample_R(L, DiagonalMatrix(entries))))
        out.append(row)
    return out


def detect_permutation(R_samples: Sequence[Sequence[tuple[float, DiagonalMatrix]]],
                       concentration: float = CONCENTRATION) -> list[int]:
    """``j(i)``: the coordinate on which ``R(Delta_i)`` concentrates (0-based)."""
    n = len(R_samples)
    perm = []
    for i, series in enumerate(R_samples):
        series = sorted(series, key=lambda s: -s[0])  # decreasing e
        chosen, leak = None, []
        mags = None
        for e, R in series:
            mags = np.abs(R.entries)
            j = int(np.argmax(mags))
            rest = np.max(np.delete(mags, j), initial=0.0)
            if chosen is None:
                chosen = j
            elif j != chosen:
                raise NumericalFailure(f"R(Delta_{i}) jumps between coordinates {chosen} and {j}")
            leak.append(rest)
        if leak[-1] * concentration > mags[chosen]:
            raise NumericalFailure(
                f"R(Delta_{i}) does not concentrate on one coordinate (ratio {mags[chosen] / max(leak[-1], 1e-300):.3g})")
        if any(b >= a for a, b in zip(leak, leak[1:])) and n > 1:
            raise NumericalFailure(f"off-target entries of R(Delta_{i}) do not shrink as e -> 0")
        perm.append(chosen)
    if sorted(perm) != list(range(n)):
        raise NumericalFailure(f"detected assignment {perm} is not a permutation")
    return perm


@dataclass(frozen=True)
class CharacterFit:
    source_index: int
    alpha: complex
    beta: complex
    kind: str
    fit_residual: float
    residuals: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        num = lambda v: v.real if abs(v.imag) < 1e-12 else {"re": v.real, "im": v.imag}
        return {"source": self.source_index + 1, "alpha": num(complex(self.alpha)),
                "beta": num(complex(self.beta)), "kind": self.kind,
                "fit_residual": self.fit_residual}


def _general_fit(lam: np.ndarray, q: np.ndarray) -> tuple[complex, complex, float] | None:
    """Fit ``q = lam^a conj(lam)^b`` with ``a - b = +-1``; returns (a, b, residual)."""
    best = None
    logmod = np.log(np.abs(lam))
    arg = np.angle(lam)
    for k in (1, -1):
        w = q * np.exp(-1j * k * arg)
        s = np.median((np.log(np.abs(w)) + 1j * np.angle(w)) / logmod)  # |lam|^s = w
        model = np.exp(s * logmod + 1j * k * arg)
        res = float(np.max(np.abs(model / q - 1)))
        if best is None or res < best[2]:
            best = ((s + k) / 2, (s - k) / 2, res)
    return best


def fit_character(samples: Sequence[tuple[complex, complex]], source: int = -1,
                  eps: float = EPS_FIT) -> CharacterFit:
    """Classify a sampled multiplicative character on the punctured 0.1-disc."""
    if len(samples) < 8:
        raise PreconditionError("need at least 8 samples")
    lam = np.array([s[0] for s in samples], dtype=np.complex128)
    q = np.array([s[1] for s in samples], dtype=np.complex128)
    mod = np.abs(lam)
    if np.any(mod <= 0) or np.any(mod > 0.1 + 1e-12):
        raise PreconditionError("sample moduli must lie in (0, 0.1]")
    args = np.sort(np.angle(lam))
    gaps = np.diff(np.concatenate([args, [args[0] + 2 * np.pi]]))
    if np.max(gaps) >= np.pi:
        raise PreconditionError("sample arguments are not spread around the circle")
    if np.any(q == 0):
        raise FitError("character vanishes at a sample")

    residuals = {
        HOLOMORPHIC: float(np.max(np.abs(q / lam - 1))),
        ANTIHOLOMORPHIC: float(np.max(np.abs(q / lam.conj() - 1))),
        CONSTANT: float(np.max(np.abs(q - 1))),
    }
    kind = min(residuals, key=residuals.get)
    if residuals[kind] <= eps:
        alpha, beta = {HOLOMORPHIC: (1, 0), ANTIHOLOMORPHIC: (0, 1), CONSTANT: (0, 0)}[kind]
        return CharacterFit(source, alpha, beta, kind, residuals[kind], residuals)
    general = _general_fit(lam, q)
    if general is not None and general[2] <= eps:
        a, b, res = general
        residuals[MIXED] = res
        return CharacterFit(source, complex(a), complex(b), MIXED, res, residuals)
    raise FitError(f"no admissible character fits (best residual {min(residuals.values()):.2e})")


def character_samples(L: PointMap, source: int, target: int, n: int, count: int = 12,
                      background: complex = 0.05, seed: int = DEFAULT_SEED) -> list[tuple[complex, complex]]:
    """Pairs ``(lam, R(Lambda)_target)`` varying ``lam`` in position ``source``."""
    lams = annulus_samples(count, 0.02, 0.1, seed=seed)
    out = []
    for lam in lams:
        entries = np.full(n, background, dtype=np.complex128)
        entries[source] = lam
        out.append((complex(lam), complex(sample_R(L, DiagonalMatrix(entries)).entries[target])))
    return out


def _monomial(z: np.ndarray, alpha, beta) -> np.ndarray:
    if alpha == 1 and beta == 0:
        return z
    if alpha == 0 and beta == 1:
        return z.conj()
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.abs(z) ** (alpha + beta) * np.exp(1j * (alpha - beta) * np.angle(z))
    return np.where(z == 0, 0, out)


@dataclass(frozen=True, eq=False)
class ExplicitForm:
    """``z -> B (z_1^a_1 conj(z_1)^b_1, ..., z_n^a_n conj(z_n)^b_n)``."""

    B: np.ndarray
    alphas: tuple
    betas: tuple

    @classmethod
    def from_mask(cls, B, conj_mask: Sequence[bool]) -> ExplicitForm:
        return cls(np.asarray(B, dtype=np.complex128),
                   tuple(0 if c else 1 for c in conj_mask), tuple(1 if c else 0 for c in conj_mask))

    @property
    def n(self) -> int:
        return len(self.alphas)

    def monomials(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=np.complex128)
        cols = [_monomial(z[..., i], self.alphas[i], self.betas[i]) for i in range(self.n)]
        return np.stack(cols, axis=-1)

    def __call__(self, z) -> np.ndarray:
        return self.monomials(z) @ self.B.T

    @property
    def conj_mask(self) -> tuple[bool, ...]:
        mask = []
        for a, b in zip(self.alphas, self.betas):
            if (a, b) == (1, 0):
                mask.append(False)
            elif (a, b) == (0, 1):
                mask.append(True)
            else:
                raise PreconditionError("only pure exponents (1,0)/(0,1) are invertible")
        return tuple(mask)

    def inverse(self, w) -> np.ndarray:
        u = np.asarray(w, dtype=np.complex128) @ np.linalg.inv(self.B).T
        mask = np.array(self.conj_mask)
        return np.where(mask, u.conj(), u)

    def point_map(self) -> PointMap:
        return PointMap(self, self.inverse)


@dataclass(frozen=True, eq=False)
class ReconstructionResult:
    permutation: list[int]   # 0-based j(i)
    fits: list[CharacterFit]  # indexed by output coordinate j
    B: np.ndarray
    classification: str
    max_residual: float

    @property
    def form(self) -> ExplicitForm:
        src = {f.source_index: f for f in self.fits}
        n = len(self.fits)
        return ExplicitForm(self.B, tuple(src[i].alpha for i in range(n)), tuple(src[i].beta for i in range(n)))

    def to_dict(self) -> dict:
        cx = lambda v: {"re": float(v.real), "im": float(v.imag)}
        return {"permutation": [j + 1 for j in self.permutation],
                "fits": [f.to_dict() for f in self.fits],
                "B": [[cx(v) for v in row] for row in self.B],
                "classification": self.classification,
                "max_residual": self.max_residual}


def classify(kinds: Sequence[str]) -> str:
    if all(k == HOLOMORPHIC for k in kinds):
        return HOLOMORPHIC
    if all(k == ANTIHOLOMORPHIC for k in kinds):
        return ANTIHOLOMORPHIC
    return CONTRADICTION


def explicit_L(L: PointMap, permutation: Sequence[int], fits: Sequence[CharacterFit],
               grid_size: int = 1000, grid_radius: float = 0.05, scale: float = AXIS_SCALE,
               seed: int = DEFAULT_SEED, eps: float = EPS_EVAL) -> ReconstructionResult:
    """Recover ``B`` in ``L(z) = B (z_i^a_i conj(z_i)^b_i)_i`` and check it on a grid."""
    n = len(permutation)
    if len(fits) != n:
        raise PreconditionError("need one character fit per output coordinate")
    for j, fit in enumerate(fits):
        if fit.kind == CONSTANT:
            raise PreconditionError(f"character for output {j} is constant")
        if permutation[fit.source_index] != j:
            raise PreconditionError(f"fit for output {j} disagrees with the permutation")
    by_source = {f.source_index: f for f in fits}
    form = ExplicitForm(np.eye(n), tuple(by_source[i].alpha for i in range(n)),
                        tuple(by_source[i].beta for i in range(n)))
    B = np.empty((n, n), dtype=np.complex128)
    for i in range(n):
        z = np.zeros(n, dtype=np.complex128)
        z[i] = scale
        B[:, i] = np.asarray(L.forward(z)) / form.monomials(z)[i]
    if not is_invertible(B):
        raise SingularError("recovered B is singular")
    form = ExplicitForm(B, form.alphas, form.betas)
    grid = polydisc_grid(n, grid_size, grid_radius, seed=seed)
    resid = max(float(np.max(np.abs(np.asarray(L.forward(z)) - form(z)))) for z in grid)
    if resid > eps:
        raise NumericalFailure(f"explicit form residual {resid:.2e} exceeds {eps:g}")
    return ReconstructionResult(list(permutation), list(fits), B, classify([f.kind for f in fits]), resid)
