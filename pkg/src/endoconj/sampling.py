"""Seeded sample generators: low-discrepancy polydisc grids and random germs."""

from __future__ import annotations

import numpy as np
from scipy.stats import qmc

from .jets import Jet, basis

DEFAULT_SEED = 20240917


def polydisc_grid(n: int, count: int, radius: float, seed: int = DEFAULT_SEED) -> np.ndarray:
    """``count`` Halton points in the polydisc of the given radius, shape (count, n).

    Each coordinate uses two Halton dimensions mapped to a uniform point of the
    disc (``r sqrt(u) e^{2 pi i v}``).
    """
    u = qmc.Halton(d=2 * n, scramble=True, seed=seed).random(count)
    r = radius * np.sqrt(u[:, :n])
    return r * np.exp(2j * np.pi * u[:, n:])


def annulus_samples(count: int, r_min: float, r_max: float, seed: int = DEFAULT_SEED) -> np.ndarray:
    """Complex numbers with modulus in [r_min, r_max] and arguments spread over (-pi, pi]."""
    u = qmc.Halton(d=2, scramble=True, seed=seed).random(count)
    mod = r_min + (r_max - r_min) * u[:, 0]
    arg = np.pi * (2 * (np.arange(count) + u[:, 1]) / count - 1)  # stratified arguments
    return mod * np.exp(1j * arg)


def random_complex(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_germ(rng: np.random.Generator, n: int, degree: int, linear: np.ndarray,
                scale: float = 0.3, max_nonlinear_degree: int | None = None) -> Jet:
    """A germ fixing 0 with the given linear part and random higher terms."""
    b = basis(n, degree)
    top = degree if max_nonlinear_degree is None else min(degree, max_nonlinear_degree)
    hi = b.offsets[top + 1]
    c = np.zeros((n, b.size), dtype=np.complex128)
    c[:, 1:n + 1] = linear
    k = hi - (n + 1)
    if k > 0:
        c[:, n + 1:hi] = scale * random_complex(rng, (n, k)) / np.sqrt(k)
    return Jet(c, n, degree)


def random_biholomorphic(rng: np.random.Generator, n: int, degree: int,
                         scale: float = 0.3, spread: float = 0.3,
                         max_nonlinear_degree: int | None = 3) -> Jet:
    """A random germ fixing 0 whose linear part is a perturbation of the identity."""
    A = np.eye(n) + spread * random_complex(rng, (n, n)) / np.sqrt(n)
    return random_germ(rng, n, degree, A, scale, max_nonlinear_degree)


def random_disc_germ(rng: np.random.Generator, degree: int, modulus: tuple[float, float] = (0.1, 0.7)) -> Jet:
    """A 1-D polynomial ``lam z + sum g_k z^k`` mapping the unit disc into itself.

    ``|lam| + sum |g_k| <= 1`` keeps the Koenigs function univalent on the disc,
    so its coefficients obey ``|eta_k| <= k`` and truncation stays controlled.
    """
    lam = rng.uniform(*modulus) * np.exp(2j * np.pi * rng.random())
    budget = (1 - abs(lam)) * rng.uniform(0.2, 1.0)
    weights = rng.dirichlet(np.ones(degree - 1))
    phases = np.exp(2j * np.pi * rng.random(degree - 1))
    return Jet.univariate([0, lam, *(budget * weights * phases)], degree)
