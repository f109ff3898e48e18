import numpy as np
import pytest

from endoconj.characters import ANTIHOLOMORPHIC, HOLOMORPHIC
from endoconj.domain import AffineMap
from endoconj.errors import InputError, InsufficientCoverage, NumericalFailure, PreconditionError, StageError
from endoconj.reconstruct import (ConjugationIso, OverrideIso, PipelineConfig, RecordingIso, TableIso,
                                  collapsing_stub, demonstrate_mixed_contradiction,
                                  epimorphism_separation, iso_from_dict, mixed_map, psi_from_constants,
                                  random_conjugation, run_pipeline, verify_conjugacy, wirtinger)
from endoconj.sampling import polydisc_grid, random_biholomorphic

from test_domain import random_certified

SWAP = ConjugationIso([[0, 1], [1, 0]])
FAST = PipelineConfig(explicit_grid=200, grid_size=50)


# -- psi from constants ---------------------------------------------------------------

def test_psi_identity_swap_conjugation():
    z = np.array([0.1 + 0.2j, -0.3j])
    assert np.allclose(psi_from_constants(ConjugationIso(np.eye(2)), z), z)
    assert np.allclose(psi_from_constants(SWAP, z), z[::-1])
    assert np.allclose(psi_from_constants(ConjugationIso(np.eye(2), antiholomorphic=True), z), z.conj())


def test_psi_requires_constant_image():
    broken = OverrideIso(SWAP, [(AffineMap.constant([0.1, 0]), AffineMap(0.5 * np.eye(2), [0, 0]))])
    with pytest.raises(NumericalFailure):
        psi_from_constants(broken, [0.1, 0])


@pytest.mark.parametrize("anti1,anti2", [(False, False), (False, True), (True, True)])
def test_psi_is_functorial(anti1, anti2):
    rng = np.random.default_rng(5)
    a = random_conjugation(rng, 2, anti1)
    b = random_conjugation(rng, 2, anti2)
    ab = a.then(b)
    for z in polydisc_grid(2, 10, 0.5):
        assert np.allclose(psi_from_constants(ab, z), psi_from_constants(b, psi_from_constants(a, z)))


def test_inverse_iso_undoes_psi(rng):
    phi = random_conjugation(rng, 3, True)
    z = polydisc_grid(3, 1, 0.5)[0]
    assert np.allclose(psi_from_constants(phi.inverse(), psi_from_constants(phi, z)), z)


# -- conjugacy ---------------------------------------------------------------------------

@pytest.mark.parametrize("anti", [False, True])
def test_honest_conjugacy_residual(rng, anti):
    phi = random_conjugation(rng, 2, anti)
    fs = [random_certified(rng, 2) for _ in range(10)]
    assert verify_conjugacy(phi, fs, grid_size=100) <= 1e-9


def test_corrupted_image_is_detected(rng):
    phi = random_conjugation(rng, 2)
    fs = [random_certified(rng, 2) for _ in range(3)]
    bad_image = phi.apply(fs[1])
    corrupted = OverrideIso(phi, [(fs[1], AffineMap(bad_image.A, bad_image.b + 1e-3))])
    assert verify_conjugacy(corrupted, fs, grid_size=20) > 1e-4


def test_constants_only_reduce_to_psi_consistency(rng):
    phi = random_conjugation(rng, 2)
    cs = [AffineMap.constant(z) for z in polydisc_grid(2, 4, 0.5)]
    assert verify_conjugacy(phi, cs, grid_size=10) <= 1e-12


# -- pipeline ----------------------------------------------------------------------------

def test_pipeline_identity():
    rep = run_pipeline(ConjugationIso(np.eye(2)), FAST, ground_truth=lambda z: z)
    assert rep.classification == HOLOMORPHIC
    assert rep.reconstruction.permutation == [0, 1]
    assert np.allclose(rep.reconstruction.B, np.eye(2))


def test_pipeline_swap_gives_transposition():
    rep = run_pipeline(SWAP, FAST, ground_truth=SWAP.psi0)
    assert rep.classification == HOLOMORPHIC
    assert rep.to_dict()["reconstruction"]["permutation"] == [2, 1]


@pytest.mark.parametrize("anti", [False, True])
def test_pipeline_recovers_planted_map(anti):
    rng = np.random.default_rng(42 + anti)
    phi = random_conjugation(rng, 3, anti)
    rep = run_pipeline(phi, FAST, ground_truth=phi.psi0)
    assert rep.classification == (ANTIHOLOMORPHIC if anti else HOLOMORPHIC)
    assert rep.ground_truth_error <= 1e-8
    assert rep.route_residual <= 1e-8
    assert np.allclose(rep.fixed_point_image, phi.c)


def test_pipeline_permutation_matches_planted():
    rng = np.random.default_rng(9)
    phi = random_conjugation(rng, 3, permutation=[2, 0, 1])
    assert run_pipeline(phi, FAST).reconstruction.permutation == [2, 0, 1]


def test_pipeline_blind_mode_from_recorded_table():
    rng = np.random.default_rng(3)
    phi = random_conjugation(rng, 2, True)
    rec = RecordingIso(phi)
    truth = run_pipeline(rec, FAST)
    blind = run_pipeline(rec.table(), FAST)
    assert blind.ground_truth_error is None and "ground_truth_error" not in blind.to_dict()
    assert blind.classification == truth.classification == ANTIHOLOMORPHIC
    assert np.allclose(blind.reconstruction.B, truth.reconstruction.B)


def test_pipeline_blind_mode_reports_missing_entries():
    table = TableIso([(AffineMap.constant([0, 0]), AffineMap.constant([0, 0]))])
    with pytest.raises(StageError) as info:
        run_pipeline(table, FAST)
    assert isinstance(info.value.cause, InsufficientCoverage)


def test_pipeline_rejects_dimension_mismatch():
    table = TableIso([(AffineMap.constant([0, 0]), AffineMap.constant([0, 0, 0]))])
    with pytest.raises(InputError):
        run_pipeline(table, FAST)


def test_pipeline_wraps_stage_errors():
    # a semigroup map that does not send f to a contraction at psi(0)
    f = AffineMap(0.25 * np.eye(2), np.zeros(2))
    broken = OverrideIso(SWAP, [(f, AffineMap.identity(2))])
    with pytest.raises(StageError) as info:
        run_pipeline(broken, FAST)
    assert info.value.stage == "good-element"


def test_iso_json_round_trip(rng):
    phi = random_conjugation(rng, 2, True)
    back = iso_from_dict(phi.to_dict())
    assert np.allclose(back.C, phi.C) and np.allclose(back.c, phi.c) and back.antiholomorphic
    table = TableIso([(AffineMap.constant([0.1, 0]), AffineMap.constant([0, 0.1]))])
    assert isinstance(iso_from_dict(table.to_dict()), TableIso)
    with pytest.raises(InputError):
        iso_from_dict({"mode": "other"})


# -- mixed-orientation contradiction ---------------------------------------------------------

def test_mixed_map_violates_cauchy_riemann():
    rep = demonstrate_mixed_contradiction(2, lam=0.1, point=[0.05, 0.05])
    assert rep.violated and rep.dbar_conjugated > 1e-3
    assert rep.dbar_L > 0.5 and rep.d_L > 0.5  # L itself is neither


def test_holomorphic_control_is_clean():
    rep = demonstrate_mixed_contradiction(2, form=mixed_map(2, ()))
    assert not rep.violated and rep.dbar_conjugated <= 1e-8


def test_antiholomorphic_control():
    rep = demonstrate_mixed_contradiction(3, form=mixed_map(3, (0, 1, 2)))
    assert rep.dbar_conjugated <= 1e-8
    assert rep.dbar_L > 0.5 and rep.d_L <= 1e-8  # L depends on zbar only


def test_contradiction_with_nonlinear_theta():
    rng = np.random.default_rng(2)
    theta = random_biholomorphic(rng, 2, 8, scale=0.2, spread=0.1)
    assert demonstrate_mixed_contradiction(2, theta_f=theta).violated
    clean = demonstrate_mixed_contradiction(2, form=mixed_map(2, ()), theta_f=theta)
    assert clean.dbar_conjugated <= 1e-8


def test_contradiction_needs_two_dimensions():
    with pytest.raises(PreconditionError):
        demonstrate_mixed_contradiction(1)


def test_wirtinger_on_known_functions():
    z = np.array([0.1 + 0.2j])
    d, dbar = wirtinger(lambda w: w ** 2, z)
    assert abs(d - abs(2 * z[0])) < 1e-9 and dbar < 1e-9
    d, dbar = wirtinger(lambda w: np.abs(w) ** 2, z)
    assert abs(dbar - abs(z[0])) < 1e-9


# -- separation -------------------------------------------------------------------------------

def test_separation_honest(rng):
    phi = random_conjugation(rng, 2)
    rep = epimorphism_separation([0.1, 0], [0.3, 0.1], [0.2, 0.05], phi)
    assert rep.consistent and not rep.collapsed


def test_separation_flags_collapsing_stub(rng):
    phi = random_conjugation(rng, 2, True)
    z1, z2, zeta = [0.1, 0], [0.3, 0.1], [0.2, 0.05]
    rep = epimorphism_separation(z1, z2, zeta, collapsing_stub(phi, z2, z1))
    assert rep.collapsed and rep.contradiction and not rep.consistent
    assert np.allclose(rep.value_from_z1, rep.value_from_z2)


def test_separation_rejects_bad_triples():
    with pytest.raises(PreconditionError):
        epimorphism_separation([0, 0], [0.2, 0], [0, 0.2], SWAP)
    with pytest.raises(PreconditionError):
        epimorphism_separation([0.1, 0], [0.1, 0], [0.1, 0], SWAP)
