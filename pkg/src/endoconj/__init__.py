"""Reconstruct the conjugating map behind an isomorphism of endomorphism semigroups.

The package is layered: truncated jets (:mod:`endoconj.jets`), affine and
polynomial endomorphisms of the polydisc (:mod:`endoconj.domain`), formal
localization (:mod:`endoconj.localization`), simultaneous linearization
(:mod:`endoconj.linearization`), the diagonal functional equation
(:mod:`endoconj.characters`) and the end-to-end harness
(:mod:`endoconj.reconstruct`).
"""

from .characters import ExplicitForm, PointMap, ReconstructionResult, fit_character, sample_R
from .diagonal import DiagonalMatrix
from .domain import AffineMap, PolydiscDomain, PolyEndo, make_good, make_very_good
from .errors import EndoconjError, InputError, NumericalFailure
from .jets import Jet, compose, invert
from .kernels import BACKEND
from .linearization import ProjectionSystem, build_theta, koenigs_1d
from .localization import LocalizedSemigroup
from .reconstruct import ConjugationIso, PipelineConfig, TableIso, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "AffineMap", "BACKEND", "ConjugationIso", "DiagonalMatrix", "EndoconjError", "ExplicitForm",
    "InputError", "Jet", "LocalizedSemigroup", "NumericalFailure", "PipelineConfig", "PointMap",
    "PolyEndo", "PolydiscDomain", "ProjectionSystem", "ReconstructionResult", "TableIso",
    "build_theta", "compose", "fit_character", "invert", "koenigs_1d", "make_good",
    "make_very_good", "run_pipeline", "sample_R",
]
