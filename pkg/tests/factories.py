"""Shared constructions for the test-suite: conjugated families with known answers."""

from __future__ import annotations

import numpy as np

from endoconj.characters import ExplicitForm
from endoconj.jets import Jet, compose, invert
from endoconj.sampling import random_biholomorphic


def diagonal_jet(entries, degree: int) -> Jet:
    return Jet.linear(np.diag(np.asarray(entries, dtype=np.complex128)), degree)


def conjugated_family(rng, n: int, degree: int, count: int, lam_f=0.25, spread: float = 0.3):
    """``f = s^-1 Lam_f s`` together with ``count`` commuting germs ``s^-1 Lam s``.

    Returns ``(s, f, members, projections)`` where ``projections[i] = s^-1 Delta_i s``.
    """
    s = random_biholomorphic(rng, n, degree, scale=0.3, spread=spread)
    s_inv = invert(s)
    conj = lambda D: compose(s_inv, compose(diagonal_jet(D, degree), s))
    f = conj(np.full(n, lam_f))
    members = []
    for _ in range(count):
        lam = 0.1 * np.sqrt(rng.uniform(0.1, 1.0, n)) * np.exp(2j * np.pi * rng.random(n))
        members.append(conj(lam))
    projections = [conj(np.eye(n)[i]) for i in range(n)]
    return s, f, members, projections


def random_idempotent(rng, n: int, degree: int):
    """``s Delta s^-1`` for a random biholomorphic s and a random non-trivial coordinate mask."""
    s = random_biholomorphic(rng, n, degree)
    mask = rng.random(n) < 0.5
    if not mask.any():
        mask[rng.integers(n)] = True
    delta = diagonal_jet(mask.astype(float), degree)
    return compose(s, compose(delta, invert(s))), np.diag(mask.astype(float))


def explicit_map(rng, n: int, perm, conj_mask) -> ExplicitForm:
    """``L(z) = B (z or zbar)`` with ``B = Pi D``; column i is sent to row ``perm[i]``."""
    B = np.zeros((n, n), dtype=np.complex128)
    for i, j in enumerate(perm):
        B[j, i] = rng.uniform(0.5, 1.5) * np.exp(2j * np.pi * rng.random())
    return ExplicitForm.from_mask(B, conj_mask)


def koenigs_by_iteration(g: Jet, z, steps: int = 80) -> np.ndarray:
    """The oracle ``lam^-k g^k(z)``, iterating the polynomial itself."""
    lam = complex(g.coeffs[0, 1])
    w = np.asarray(z, dtype=np.complex128).reshape(-1, 1)
    for _ in range(steps):
        w = g(w)
    return w[:, 0] / lam ** steps
