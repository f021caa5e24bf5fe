"""Structured infinite operators queryable by finite windows.

Models are immutable descriptors: an entry rule on integer indices plus a
bandwidth, with a window accessor producing the compression to a contiguous
coordinate span.  Block families interleave 2x2 blocks on indices
(2n-1, 2n), n >= 1; the alternating diagonal model is indexed from 0.

Also hosts the 1D advection-diffusion descriptor, the limiting-symbol
specification, and the two-bump witness construction for the complex Airy
operator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .errors import GridTooCoarse, LimitMismatch
from .linalg import ComplexMatrix

EntryRule = Callable[[int, int], complex]


@dataclass(frozen=True)
class OperatorModel:
    """Banded / block / diagonal operator with a window accessor.

    ``entry(i, j)`` must vanish for |i - j| > bandwidth.  ``index_origin`` is
    the first valid index (0 for the alternating diagonal model, 1 for the
    block families).
    """

    kind: str  # "banded" | "block2x2" | "diagonal"
    entry: EntryRule
    bandwidth: int
    index_origin: int = 1
    adjoint_available: bool = True
    label: str = ""

    def window(self, lo: int, hi: int) -> ComplexMatrix:
        """Compression to span{e_lo, ..., e_hi} (inclusive)."""
        if lo < self.index_origin or hi < lo:
            raise ValueError(f"invalid window [{lo}, {hi}] for origin {self.index_origin}")
        n = hi - lo + 1
        a = np.zeros((n, n), dtype=np.complex128)
        bw = self.bandwidth
        for i in range(n):
            jmin = max(0, i - bw)
            jmax = min(n - 1, i + bw)
            for j in range(jmin, jmax + 1):
                a[i, j] = self.entry(lo + i, lo + j)
        return ComplexMatrix(a)

    def adjoint_window(self, lo: int, hi: int) -> ComplexMatrix:
        return ComplexMatrix(self.window(lo, hi).data.conj().T)


def diag_alternating() -> OperatorModel:
    """Diagonal model entry(n, n) = n + i(-1)^n n^2, n >= 0."""

    def entry(i: int, j: int) -> complex:
        if i != j:
            return 0.0
        return i + 1j * ((-1) ** i) * i * i

    return OperatorModel("diagonal", entry, bandwidth=0, index_origin=0, label="diag-alternating")


def _block_entry(block: Callable[[int], np.ndarray]) -> EntryRule:
    def entry(i: int, j: int) -> complex:
        bi, pi = (i + 1) // 2, (i - 1) % 2
        bj, pj = (j + 1) // 2, (j - 1) % 2
        if bi != bj:
            return 0.0
        return complex(block(bi)[pi, pj])

    return entry


def block_model(block: Callable[[int], np.ndarray], label: str) -> OperatorModel:
    """2x2-block model on index pairs (2n-1, 2n), n >= 1."""
    return OperatorModel("block2x2", _block_entry(block), bandwidth=1, index_origin=1, label=label)


def block_flat_window(n0: int, n1: int) -> tuple[int, int]:
    """Flat index span covering blocks n0..n1."""
    return 2 * n0 - 1, 2 * n1


def ex1_models() -> tuple[OperatorModel, OperatorModel]:
    """Selfadjoint pair: T blocks diag(n^2, 1), S blocks offdiag(1, 1)."""
    T = block_model(lambda n: np.array([[n * n, 0.0], [0.0, 1.0]]), "ex1-T")
    S = block_model(lambda n: np.array([[0.0, 1.0], [1.0, 0.0]]), "ex1-S")
    return T, S


def sum_models(a: OperatorModel, b: OperatorModel, label: str = "") -> OperatorModel:
    if a.index_origin != b.index_origin:
        raise ValueError("summands must share the index origin")
    kind = a.kind if a.kind == b.kind else "banded"

    def entry(i: int, j: int) -> complex:
        return a.entry(i, j) + b.entry(i, j)

    return OperatorModel(kind, entry, max(a.bandwidth, b.bandwidth), a.index_origin,
                         a.adjoint_available and b.adjoint_available,
                         label or f"{a.label}+{b.label}")


def delay_operator() -> OperatorModel:
    """Neutral-delay realization: blocks [[n^2, 0], [n, 1]] on (cos, sin) pairs."""
    return block_model(lambda n: np.array([[n * n, 0.0], [n, 1.0]]), "delay")


def delay_block(n: int) -> ComplexMatrix:
    return ComplexMatrix(np.array([[n * n, 0.0], [n, 1.0]], dtype=np.complex128))


def ellipse_block(n: int) -> ComplexMatrix:
    """Basis-swapped delay block [[1, 0], [n, n^2]]; same numerical range."""
    return ComplexMatrix(np.array([[1.0, 0.0], [n, n * n]], dtype=np.complex128))


# ---------------------------------------------------------------------------
# 1D differential operator descriptors
# ---------------------------------------------------------------------------

Coefficient = Callable[[np.ndarray], np.ndarray]


def _as_coefficient(f) -> Coefficient:
    if callable(f):
        return lambda x: np.asarray(f(np.asarray(x, dtype=float)), dtype=np.complex128)
    c = complex(f)
    return lambda x: np.full(np.shape(x), c, dtype=np.complex128)


@dataclass(frozen=True)
class DiffOp1D:
    """Second-order operator -u'' + q1 u' + q0 u with declared limits at infinity."""

    q1: Coefficient
    q0: Coefficient
    c1: complex
    c0: complex
    q1_prime: Coefficient | None = None
    label: str = ""
    kind: str = field(default="diffop1d")


LIMIT_PROBE = 50.0


def advection_diffusion(q1, q0, c1: complex, c0: complex, q1_prime=None,
                        label: str = "advdiff") -> DiffOp1D:
    """Build the advection-diffusion model, spot-checking the declared limits.

    The coefficient functions are evaluated at |x| = 50; a mismatch with the
    declared limits beyond 1e-6 raises LimitMismatch.
    """
    f1 = _as_coefficient(q1)
    f0 = _as_coefficient(q0)
    probe = np.array([-LIMIT_PROBE, LIMIT_PROBE])
    if np.abs(f1(probe) - c1).max() > 1e-6:
        raise LimitMismatch(f"q1 at |x|={LIMIT_PROBE:g} differs from declared limit {c1}")
    if np.abs(f0(probe) - c0).max() > 1e-6:
        raise LimitMismatch(f"q0 at |x|={LIMIT_PROBE:g} differs from declared limit {c0}")
    fp = _as_coefficient(q1_prime) if q1_prime is not None else None
    return DiffOp1D(f1, f0, complex(c1), complex(c0), fp, label)


def advdiff_constant() -> DiffOp1D:
    """q1 = -2, q0 = 0: constant-coefficient scenario."""
    return advection_diffusion(-2.0, 0.0, -2.0, 0.0, q1_prime=0.0, label="advdiff-const")


def advdiff_gaussian() -> DiffOp1D:
    """q1 = -2, q0(x) = 20 sin(x) exp(-x^2): Gaussian-perturbed scenario."""

    def q0(x):
        return 20.0 * np.sin(x) * np.exp(-x * x)

    return advection_diffusion(-2.0, q0, -2.0, 0.0, q1_prime=0.0, label="advdiff-gauss")


@dataclass(frozen=True)
class SymbolSpec:
    """Polynomial limiting symbol; coefficients[k] multiplies xi^k.

    The order-2 advection-diffusion specialization is
    p(xi) = xi^2 + c1 * (i xi) + c0, i.e. coefficients (c0, i*c1, 1).
    """

    coefficients: tuple[complex, ...]
    dimension: int = 1

    def __post_init__(self):
        if self.dimension != 1:
            raise ValueError("only d = 1 is supported")
        lead = self.coefficients[-1]
        # strong ellipticity of the principal part on a sample grid
        xi = np.linspace(0.5, 50.0, 25)
        if ((lead * xi ** (len(self.coefficients) - 1)).real <= 0).any():
            raise ValueError("principal symbol must have positive real part for xi != 0")

    @classmethod
    def advection_diffusion(cls, c1: complex, c0: complex) -> "SymbolSpec":
        return cls((complex(c0), 1j * complex(c1), 1.0 + 0j))


def symbol_eval(sym: SymbolSpec, xi) -> complex | np.ndarray:
    x = np.asarray(xi, dtype=float)
    out = np.zeros(np.shape(x), dtype=np.complex128)
    for k, c in enumerate(sym.coefficients):
        out = out + c * x ** k
    if np.isscalar(xi):
        return complex(out)
    return out


# ---------------------------------------------------------------------------
# complex Airy witness construction
# ---------------------------------------------------------------------------

@lru_cache(maxsize=4)
def _bump_constants(profile: str) -> tuple[float, float]:
    """(||psi||^2, ||psi'||^2) for the reference bump on (-1, 1)."""

    def psi(y):
        return np.exp(-1.0 / (1.0 - y * y))

    if profile == "even":
        f = psi
        fp = lambda y: psi(y) * (-2.0 * y / (1.0 - y * y) ** 2)
    elif profile == "odd":
        f = lambda y: y * psi(y)
        fp = lambda y: psi(y) * (1.0 - 2.0 * y * y / (1.0 - y * y) ** 2)
    else:
        raise ValueError(f"unknown profile {profile!r}")
    i0 = quad(lambda y: f(y) ** 2, -1, 1, limit=200)[0]
    i1 = quad(lambda y: fp(y) ** 2, -1, 1, limit=200)[0]
    return i0, i1


def _bump(x: np.ndarray, center: float, width: float, amp: float, profile: str) -> tuple[np.ndarray, np.ndarray]:
    y = (x - center) / width
    inside = np.abs(y) < 1.0
    f = np.zeros_like(x)
    fp = np.zeros_like(x)
    ys = y[inside]
    core = np.exp(-1.0 / (1.0 - ys * ys))
    if profile == "even":
        f[inside] = amp * core
        fp[inside] = amp * core * (-2.0 * ys / (1.0 - ys * ys) ** 2) / width
    else:
        f[inside] = amp * ys * core
        fp[inside] = amp * core * (1.0 - 2.0 * ys * ys / (1.0 - ys * ys) ** 2) / width
    return f, fp


def airy_witness(lam: complex, n: int, grid, profile: str = "even") -> tuple[np.ndarray, complex]:
    """Two-bump unit function for the complex Airy operator -d^2/dx^2 + ix.

    The bump is an even (or odd) compactly supported profile rescaled so that
    its squared norm is 1/2 and the squared norm of its derivative is
    Re(lam)/2; copies are centered at -n and n + 2|Im lam| (swapped signs for
    Im lam < 0).  Returns the sampled function and the trapezoid value of
    ||f'||^2 + <i x f, f>, which approximates lam.
    """
    lam = complex(lam)
    u, v = lam.real, lam.imag
    if u <= 0:
        raise ValueError("construction needs Re(lam) > 0")
    i0, i1 = _bump_constants(profile)
    width = float(np.sqrt(i1 / (u * i0)))
    amp = float(np.sqrt(1.0 / (2.0 * width * i0)))
    if v >= 0:
        centers = (-float(n), float(n) + 2.0 * abs(v))
    else:
        centers = (-float(n) - 2.0 * abs(v), float(n))
    x = np.asarray(getattr(grid, "nodes", grid), dtype=float)
    if x[0] > centers[0] - width or x[-1] < centers[1] + width:
        raise GridTooCoarse("grid does not cover the bump supports")
    if centers[1] - width <= centers[0] + width:
        raise ValueError("bump supports overlap; increase n")
    f = np.zeros_like(x)
    fp = np.zeros_like(x)
    for c in centers:
        g, gp = _bump(x, c, width, amp, profile)
        f += g
        fp += gp
    norm_sq = float(np.trapezoid(f * f, x))
    if abs(norm_sq - 1.0) > 0.01:
        raise GridTooCoarse(f"quadrature self-check ||f||^2 = {norm_sq:.4f} is off by more than 0.01")
    kinetic = float(np.trapezoid(fp * fp, x))
    potential = float(np.trapezoid(x * f * f, x))
    return f, complex(kinetic, potential)


# ---------------------------------------------------------------------------
# model registry for the CLI
# ---------------------------------------------------------------------------

def model_from_json(desc: dict):
    """Instantiate a model from {"kind": ..., "params": {...}}."""
    kind = desc.get("kind")
    params = desc.get("params", {})
    if kind == "diag-alternating":
        return diag_alternating()
    if kind == "ex1-t":
        return ex1_models()[0]
    if kind == "ex1-s":
        return ex1_models()[1]
    if kind == "ex1-sum":
        return sum_models(*ex1_models(), label="ex1-T+S")
    if kind == "delay":
        return delay_operator()
    if kind == "advdiff-const":
        return advdiff_constant()
    if kind == "advdiff-gauss":
        return advdiff_gaussian()
    if kind == "jacobi":
        def entry(i, j):
            return 1.0 if abs(i - j) == 1 else 0.0
        return OperatorModel("banded", entry, bandwidth=1, index_origin=1, label="jacobi")
    raise ValueError(f"unknown model kind {kind!r} (params {params!r})")
