"""Dense complex linear algebra kernel.

Hermitian and general eigensolvers, modified Gram-Schmidt orthonormalization,
and compressions ``B* M B`` onto orthonormal bases.  Everything operates on
immutable :class:`ComplexMatrix` / :class:`UnitVector` wrappers around
``complex128`` ndarrays; eigensolves are delegated to LAPACK.

Inner-product convention: conjugate-linear in the SECOND slot,
``<u, v> = sum_i u_i * conj(v_i)``, so ``rayleigh(M, x) = <Mx, x>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import BasisNotOrthonormal, DimensionMismatch, NoConvergence, NotHermitian

HERMITIAN_TOL = 1e-12
UNIT_NORM_TOL = 1e-12
ORTHO_TOL = 1e-10
RANK_DROP_TOL = 1e-10


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class ComplexMatrix:
    """Dense complex matrix, row-major, immutable after construction."""

    data: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.data, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise DimensionMismatch(f"expected a 2-d matrix, got shape {a.shape}")
        if not np.isfinite(a).all():
            raise ValueError("matrix entries must be finite")
        object.__setattr__(self, "data", _freeze(a))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def dagger(self) -> "ComplexMatrix":
        return ComplexMatrix(self.data.conj().T)

    def hermitian_defect(self) -> float:
        """Max-entry norm of M - M*."""
        return float(np.abs(self.data - self.data.conj().T).max())

    def frobenius(self) -> float:
        return float(np.linalg.norm(self.data))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[complex]]) -> "ComplexMatrix":
        return cls(np.array(rows, dtype=np.complex128))


@dataclass(frozen=True)
class UnitVector:
    """Complex vector with unit Euclidean norm (within 1e-12)."""

    components: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.components, dtype=np.complex128).ravel()
        if v.size < 1:
            raise DimensionMismatch("empty vector")
        nrm = np.linalg.norm(v)
        if abs(nrm - 1.0) > UNIT_NORM_TOL:
            raise ValueError(f"vector norm {nrm!r} is not 1 within {UNIT_NORM_TOL}")
        object.__setattr__(self, "components", _freeze(v))

    @property
    def dim(self) -> int:
        return self.components.size

    @classmethod
    def normalized(cls, v: Iterable[complex]) -> "UnitVector":
        arr = np.asarray(list(v) if not isinstance(v, np.ndarray) else v, dtype=np.complex128).ravel()
        nrm = np.linalg.norm(arr)
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(arr / nrm)


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues sorted lexicographically by (Re, Im), optional vectors, residuals."""

    values: np.ndarray
    vectors: tuple[UnitVector, ...] | None
    residuals: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze(np.asarray(self.values, dtype=np.complex128)))
        object.__setattr__(self, "residuals", _freeze(np.asarray(self.residuals, dtype=np.float64)))


def _as_array(M) -> np.ndarray:
    if isinstance(M, ComplexMatrix):
        return M.data
    return np.asarray(M, dtype=np.complex128)


def _as_vector(x) -> np.ndarray:
    if isinstance(x, UnitVector):
        return x.components
    return np.asarray(x, dtype=np.complex128).ravel()


def _lex_order(values: np.ndarray) -> np.ndarray:
    # lexicographic by (Re, Im); np.lexsort is stable, so ties keep original index order
    return np.lexsort((values.imag, values.real))


def rayleigh(M, x) -> complex:
    """Quadratic form <Mx, x> for unit x; conjugate-linear in the second slot."""
    a = _as_array(M)
    v = _as_vector(x)
    if a.shape[1] != v.size or a.shape[0] != v.size:
        raise DimensionMismatch(f"matrix {a.shape} incompatible with vector of dim {v.size}")
    return complex(np.vdot(v, a @ v))


def hermitian_eig(M, tol: float = 1e-9) -> EigenDecomposition:
    """Full eigendecomposition of a Hermitian matrix.

    Raises NotHermitian when ``max|M - M*| > 1e-12`` and NoConvergence when
    LAPACK fails or a residual exceeds ``tol * (1 + ||M||_F)``.
    """
    a = _as_array(M)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch("eigensolver requires a square matrix")
    if np.abs(a - a.conj().T).max() > HERMITIAN_TOL:
        raise NotHermitian(f"hermitian defect {np.abs(a - a.conj().T).max():.3e} exceeds {HERMITIAN_TOL}")
    try:
        w, V = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure is exceptional
        raise NoConvergence(str(exc)) from exc
    # eigh returns ascending real values; already lexicographic for real spectra
    residuals = np.linalg.norm(a @ V - V * w[None, :], axis=0)
    bound = tol * (1.0 + np.linalg.norm(a))
    if residuals.max() > bound:
        raise NoConvergence(f"residual {residuals.max():.3e} exceeds {bound:.3e}")
    vectors = tuple(UnitVector.normalized(V[:, j]) for j in range(V.shape[1]))
    return EigenDecomposition(w.astype(np.complex128), vectors, residuals)


def general_eig(M, tol: float = 1e-9, want_vectors: bool = False) -> EigenDecomposition:
    """Eigenvalues (with multiplicity) of a general square complex matrix.

    Eigenvectors are computed on demand; residuals are reported only when
    vectors are requested.
    """
    a = _as_array(M)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch("eigensolver requires a square matrix")
    try:
        if want_vectors:
            w, V = np.linalg.eig(a)
        else:
            w = np.linalg.eigvals(a)
            V = None
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    order = _lex_order(w)
    w = w[order]
    if V is None:
        return EigenDecomposition(w, None, np.zeros(w.size))
    V = V[:, order]
    nrm = np.linalg.norm(V, axis=0)
    V = V / nrm[None, :]
    residuals = np.linalg.norm(a @ V - V * w[None, :], axis=0)
    bound = tol * (1.0 + np.linalg.norm(a))
    if residuals.max() > bound:
        raise NoConvergence(f"residual {residuals.max():.3e} exceeds {bound:.3e}")
    vectors = tuple(UnitVector.normalized(V[:, j]) for j in range(V.shape[1]))
    return EigenDecomposition(w, vectors, residuals)


def _mgs(columns: list[np.ndarray], against: list[np.ndarray] | None = None,
         drop_tol: float = RANK_DROP_TOL) -> list[np.ndarray]:
    """Modified Gram-Schmidt with one reorthogonalization pass.

    Vectors whose residual norm falls below ``drop_tol`` are dropped (rank
    decision).  ``against`` holds an already-orthonormal family that the
    result must also be orthogonal to.
    """
    out: list[np.ndarray] = []
    fixed = list(against) if against else []
    for v in columns:
        r = v.astype(np.complex128, copy=True)
        for _ in range(2):  # one reorthogonalization pass
            for q in fixed:
                r -= np.vdot(q, r) * q
            for q in out:
                r -= np.vdot(q, r) * q
        nrm = np.linalg.norm(r)
        if nrm < drop_tol:
            continue
        out.append(r / nrm)
    return out


def orthonormal_complement_basis(vectors, ambient_dim: int, tol: float = ORTHO_TOL) -> list[UnitVector]:
    """Orthonormal basis of the orthogonal complement of span(vectors).

    Returns an empty list when the complement is trivial.  The result is
    orthogonal to every input within ``tol``.
    """
    cols = [_as_vector(v) for v in vectors]
    for c in cols:
        if c.size != ambient_dim:
            raise DimensionMismatch("input vector dimension differs from ambient_dim")
    q_in = _mgs(cols)
    comp: list[np.ndarray] = []
    eye = np.eye(ambient_dim, dtype=np.complex128)
    for j in range(ambient_dim):
        if len(comp) == ambient_dim - len(q_in):
            break
        cand = _mgs([eye[:, j]], against=q_in + comp)
        comp.extend(cand)
    return [UnitVector(c) for c in comp]


def _basis_matrix(basis) -> np.ndarray:
    if isinstance(basis, np.ndarray):
        B = np.asarray(basis, dtype=np.complex128)
        if B.ndim == 1:
            B = B[:, None]
        return B
    cols = [_as_vector(b) for b in basis]
    return np.column_stack(cols)


def compress(M, basis) -> ComplexMatrix:
    """Compression of M onto an orthonormal family: entries <M b_j, b_i>."""
    a = _as_array(M)
    B = _basis_matrix(basis)
    if B.shape[0] != a.shape[1]:
        raise DimensionMismatch("basis vectors do not match the matrix dimension")
    gram = B.conj().T @ B
    if np.abs(gram - np.eye(B.shape[1])).max() > ORTHO_TOL:
        raise BasisNotOrthonormal(f"Gram defect {np.abs(gram - np.eye(B.shape[1])).max():.3e}")
    return ComplexMatrix(B.conj().T @ a @ B)


def extreme_hermitian_pairs(H: np.ndarray) -> tuple[float, np.ndarray, float, np.ndarray]:
    """(lambda_min, v_min, lambda_max, v_max) of a Hermitian array."""
    w, V = np.linalg.eigh(H)
    return float(w[0]), V[:, 0], float(w[-1]), V[:, -1]
