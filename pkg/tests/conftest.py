import numpy as np

from opdiv.hermitian import HermitianMatrix, PositiveDefiniteMatrix, hermitian_part, unitary_from_rng


def make_herm(rng: np.random.Generator, dim: int, lo: float = -2.0, hi: float = 2.0) -> HermitianMatrix:
    lam = rng.uniform(lo, hi, dim)
    u = unitary_from_rng(rng, dim)
    return hermitian_part((u * lam) @ u.conj().T)


def make_pd(rng: np.random.Generator, dim: int, lo: float = 0.1, hi: float = 4.0) -> PositiveDefiniteMatrix:
    return PositiveDefiniteMatrix(make_herm(rng, dim, lo, hi))
