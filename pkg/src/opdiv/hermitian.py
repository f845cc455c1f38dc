"""Dense complex Hermitian matrix algebra.

Spectral decomposition, functional calculus, congruence, Kronecker
products and Loewner-order comparison. All values are immutable after
construction and all operations are pure functions, so instances can be
shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from .errors import (
    NotHermitian,
    NotPositiveDefinite,
    NumericalFailure,
    ShapeMismatch,
    SizeLimit,
)

if TYPE_CHECKING:  # pragma: no cover
    from .funcatalog import ScalarOperatorFunction

SYMMETRY_TOL = 1e-12
PD_FLOOR = 1e-10
DECOMP_TOL = 1e-10
UNITALITY_TOL = 1e-10
DOMAIN_CLAMP_TOL = 1e-9
KRON_CAP = 64


@dataclass(frozen=True)
class ToleranceConfig:
    """Absolute plus relative slack used by every Loewner comparison."""

    abs: float = 1e-8
    rel: float = 1e-8

    def __post_init__(self):
        if self.abs < 0 or self.rel < 0:
            raise ValueError("tolerances must be nonnegative")

    def at_scale(self, scale: float) -> float:
        return self.abs + self.rel * scale


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


class HermitianMatrix:
    """A dense complex square matrix with ||H - H*|| below tolerance.

    Stored entries are the symmetrized form (H + H*) / 2. Real input is
    embedded with zero imaginary parts.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries):
        arr = np.asarray(entries, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ShapeMismatch(f"expected a square matrix, got shape {arr.shape}")
        scale = max(1.0, float(np.linalg.norm(arr)))
        skew = float(np.linalg.norm(arr - arr.conj().T))
        if skew > SYMMETRY_TOL * scale:
            raise NotHermitian(
                f"matrix deviates from Hermitian symmetry by {skew:.3e} "
                f"(allowed {SYMMETRY_TOL * scale:.3e})"
            )
        self._entries = _frozen((arr + arr.conj().T) / 2)

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "HermitianMatrix":
        """Trusted constructor: `arr` must already be exactly Hermitian."""
        out = object.__new__(cls)
        out._entries = _frozen(np.asarray(arr, dtype=complex))
        return out

    @classmethod
    def identity(cls, dim: int) -> "HermitianMatrix":
        return cls._wrap(np.eye(dim, dtype=complex))

    @classmethod
    def zeros(cls, dim: int) -> "HermitianMatrix":
        return cls._wrap(np.zeros((dim, dim), dtype=complex))

    @classmethod
    def diagonal(cls, values: Iterable[float]) -> "HermitianMatrix":
        return cls._wrap(np.diag(np.asarray(list(values), dtype=float)).astype(complex))

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def dim(self) -> int:
        return self._entries.shape[0]

    def norm_fro(self) -> float:
        return float(np.linalg.norm(self._entries))

    def norm_two(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvalsh(self._entries))))

    def trace(self) -> float:
        return float(np.trace(self._entries).real)

    def __add__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        if not isinstance(other, HermitianMatrix):
            return NotImplemented
        if other.dim != self.dim:
            raise ShapeMismatch("dimension mismatch in matrix sum")
        return HermitianMatrix._wrap(self._entries + other._entries)

    def __sub__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        if not isinstance(other, HermitianMatrix):
            return NotImplemented
        if other.dim != self.dim:
            raise ShapeMismatch("dimension mismatch in matrix difference")
        return HermitianMatrix._wrap(self._entries - other._entries)

    def __mul__(self, c: float) -> "HermitianMatrix":
        return HermitianMatrix._wrap(self._entries * float(c))

    __rmul__ = __mul__

    def __neg__(self) -> "HermitianMatrix":
        return HermitianMatrix._wrap(-self._entries)

    def __repr__(self) -> str:
        return f"HermitianMatrix(dim={self.dim})"


def hermitian_part(arr: np.ndarray) -> HermitianMatrix:
    """Symmetrize an almost-Hermitian product (A + A*) / 2."""
    arr = np.asarray(arr, dtype=complex)
    return HermitianMatrix._wrap((arr + arr.conj().T) / 2)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues in descending order plus the diagonalizing unitary."""

    eigenvalues: np.ndarray
    unitary: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def rebuild(self, values: np.ndarray) -> HermitianMatrix:
        """U diag(values) U*, symmetrized."""
        u = self.unitary
        return hermitian_part((u * np.asarray(values, dtype=float)) @ u.conj().T)


class PositiveDefiniteMatrix:
    """Hermitian matrix whose smallest eigenvalue clears the strict floor."""

    __slots__ = ("_base", "_decomp", "_min_eigenvalue", "_condition_number", "_sqrt_pair")

    def __init__(self, base):
        if not isinstance(base, HermitianMatrix):
            base = HermitianMatrix(base)
        decomp = spectral_decompose(base)
        lam_min = float(decomp.eigenvalues[-1])
        lam_max = float(decomp.eigenvalues[0])
        floor = PD_FLOOR * max(1.0, abs(lam_max), abs(lam_min))
        if lam_min < floor:
            raise NotPositiveDefinite(
                f"smallest eigenvalue {lam_min:.3e} below strict-positivity floor {floor:.3e}"
            )
        self._base = base
        self._decomp = decomp
        self._min_eigenvalue = lam_min
        self._condition_number = lam_max / lam_min
        self._sqrt_pair = None

    @property
    def base(self) -> HermitianMatrix:
        return self._base

    @property
    def entries(self) -> np.ndarray:
        return self._base.entries

    @property
    def dim(self) -> int:
        return self._base.dim

    @property
    def min_eigenvalue(self) -> float:
        return self._min_eigenvalue

    @property
    def condition_number(self) -> float:
        return self._condition_number

    @property
    def decomposition(self) -> SpectralDecomposition:
        return self._decomp

    def sqrt_pair(self) -> tuple[HermitianMatrix, HermitianMatrix]:
        """(R^{1/2}, R^{-1/2}) from one shared spectral decomposition."""
        if self._sqrt_pair is None:
            roots = np.sqrt(self._decomp.eigenvalues)
            half = self._decomp.rebuild(roots)
            inv_half = self._decomp.rebuild(1.0 / roots)
            self._sqrt_pair = (half, inv_half)
        return self._sqrt_pair

    def __repr__(self) -> str:
        return (
            f"PositiveDefiniteMatrix(dim={self.dim}, "
            f"min_eig={self._min_eigenvalue:.3e}, cond={self._condition_number:.3e})"
        )


class LoewnerRelation(Enum):
    LESS_OR_EQUAL = "LessOrEqual"
    GREATER_OR_EQUAL = "GreaterOrEqual"
    EQUAL = "Equal"
    INCOMPARABLE = "Incomparable"


@dataclass(frozen=True)
class LoewnerVerdict:
    """Outcome of comparing A against B in the Loewner order.

    margin_low is the smallest eigenvalue of B - A (how far A <= B holds),
    margin_high the smallest eigenvalue of A - B. Margins are reported
    exactly as computed; the relation applies `tolerance_used` slack.
    """

    relation: LoewnerRelation
    margin_low: float
    margin_high: float
    tolerance_used: float

    @property
    def holds_le(self) -> bool:
        return self.margin_low >= -self.tolerance_used

    @property
    def holds_ge(self) -> bool:
        return self.margin_high >= -self.tolerance_used


def spectral_decompose(h: HermitianMatrix) -> SpectralDecomposition:
    """Eigendecomposition with eigenvalues sorted in descending order.

    Raises NumericalFailure if the solver does not converge or the
    reconstruction/unitarity residuals exceed their bounds.
    """
    try:
        vals, vecs = np.linalg.eigh(h.entries)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigendecomposition failed: {exc}") from exc
    vals = vals[::-1].copy()
    vecs = vecs[:, ::-1].copy()
    dim = h.dim
    eye_err = float(np.linalg.norm(vecs @ vecs.conj().T - np.eye(dim)))
    if eye_err > DECOMP_TOL * dim:
        raise NumericalFailure(f"eigenvector matrix not unitary (residual {eye_err:.3e})")
    recon = (vecs * vals) @ vecs.conj().T
    rec_err = float(np.linalg.norm(recon - h.entries))
    if rec_err > DECOMP_TOL * max(1.0, h.norm_fro()):
        raise NumericalFailure(f"spectral reconstruction residual {rec_err:.3e} too large")
    return SpectralDecomposition(_frozen(vals), _frozen(vecs))


def apply_function(f: "ScalarOperatorFunction", h: HermitianMatrix) -> HermitianMatrix:
    """Functional calculus f(H) = U f(diag lambda) U*.

    Eigenvalues within 1e-9 * max(1, ||H||_2) of a closed domain endpoint
    are clamped onto it; anything farther outside raises DomainViolation.
    """
    decomp = spectral_decompose(h)
    scale = max(abs(float(decomp.eigenvalues[0])), abs(float(decomp.eigenvalues[-1])))
    clamp_tol = DOMAIN_CLAMP_TOL * max(1.0, scale)
    vals = f.domain.clamp_spectrum(decomp.eigenvalues, clamp_tol)
    fvals = f.eval_array(vals)
    if not np.all(np.isfinite(fvals)):
        raise NumericalFailure(f"function {f.id!r} produced non-finite values")
    return decomp.rebuild(fvals)


def congruence(c: np.ndarray, x: HermitianMatrix) -> HermitianMatrix:
    """C* X C, symmetrized. C may be rectangular (dim(X) by out_dim)."""
    c = np.asarray(c, dtype=complex)
    if c.ndim != 2 or c.shape[0] != x.dim:
        raise ShapeMismatch(
            f"congruence matrix of shape {c.shape} cannot act on dimension {x.dim}"
        )
    return hermitian_part(c.conj().T @ x.entries @ c)


def loewner_compare(
    a: HermitianMatrix, b: HermitianMatrix, tol: ToleranceConfig = ToleranceConfig()
) -> LoewnerVerdict:
    """Compare A and B in the Loewner order under abs+rel tolerance."""
    if a.dim != b.dim:
        raise ShapeMismatch(f"cannot compare dimensions {a.dim} and {b.dim}")
    diff = np.linalg.eigvalsh(b.entries - a.entries)
    margin_low = float(diff[0])
    margin_high = float(-diff[-1])
    tolerance_used = tol.at_scale(max(a.norm_two(), b.norm_two()))
    le = margin_low >= -tolerance_used
    ge = margin_high >= -tolerance_used
    if le and ge:
        relation = LoewnerRelation.EQUAL
    elif le:
        relation = LoewnerRelation.LESS_OR_EQUAL
    elif ge:
        relation = LoewnerRelation.GREATER_OR_EQUAL
    else:
        relation = LoewnerRelation.INCOMPARABLE
    return LoewnerVerdict(relation, margin_low, margin_high, tolerance_used)


def kronecker(
    a: HermitianMatrix, b: HermitianMatrix, size_cap: int = KRON_CAP
) -> HermitianMatrix:
    """Kronecker product A (x) B with the row-major (i, j) index order."""
    total = a.dim * b.dim
    if total > size_cap:
        raise SizeLimit(f"tensor dimension {total} exceeds cap {size_cap}")
    return HermitianMatrix._wrap(np.kron(a.entries, b.entries))


def unitary_from_rng(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Unitary factor of a random Gaussian Hermitian matrix."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    _, vecs = np.linalg.eigh((g + g.conj().T) / 2)
    return vecs


# ---------------------------------------------------------------------------
# Matrix JSON format: {"dim": n, "rows": [[[re, im], ...], ...]}
# Real matrices may use bare numbers in place of [re, im].
# ---------------------------------------------------------------------------


def array_to_rows(arr: np.ndarray) -> list:
    """Encode a complex 2-D array as nested JSON rows."""
    arr = np.asarray(arr, dtype=complex)
    if np.all(arr.imag == 0):
        return [[float(v.real) for v in row] for row in arr]
    return [[[float(v.real), float(v.imag)] for v in row] for row in arr]


def rows_to_array(rows: Sequence) -> np.ndarray:
    """Decode nested JSON rows into a complex 2-D array."""
    def scan(entry):
        if isinstance(entry, (int, float)):
            return complex(entry)
        if isinstance(entry, (list, tuple)) and len(entry) == 2:
            return complex(float(entry[0]), float(entry[1]))
        raise ValueError(f"bad matrix entry {entry!r}")

    return np.array([[scan(v) for v in row] for row in rows], dtype=complex)


def matrix_to_json(h: HermitianMatrix) -> dict:
    return {"dim": h.dim, "rows": array_to_rows(h.entries)}


def matrix_from_json(obj: dict) -> HermitianMatrix:
    arr = rows_to_array(obj["rows"])
    if "dim" in obj and int(obj["dim"]) != arr.shape[0]:
        raise ValueError(f"declared dim {obj['dim']} does not match rows {arr.shape}")
    return HermitianMatrix(arr)
