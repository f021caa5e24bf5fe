"""Projection-method engine: compression sequences and spurious-eigenvalue injection.

The injection primitive realizes the constructive mechanism behind spectral
pollution: given a trial subspace V and a target inside the essential-range
estimate, it finds a unit vector x in a far index window, orthogonal to V and
to T V (and to T* V when the adjoint is available), whose Rayleigh quotient
hits the target.  The compression to V + span{x} is then block triangular, so
its spectrum is exactly the old spectrum plus the new point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import HypothesisViolated, WindowExhausted
from .linalg import ComplexMatrix, UnitVector, compress, general_eig, orthonormal_complement_basis, rayleigh
from .numrange import ConvexRegion, attain, hull, nr_boundary, polygon_distance, _project_to_polygon
from .operators import OperatorModel, block_flat_window

WINDOW_CAP = 2 ** 16


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal columns living inside a flat ambient window [lo, hi]."""

    window: tuple[int, int]
    vectors: np.ndarray
    label: str = ""

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=np.complex128)
        if v.ndim == 1:
            v = v[:, None]
        lo, hi = self.window
        if v.shape[0] != hi - lo + 1:
            raise ValueError("vector length does not match the window")
        gram = v.conj().T @ v
        if np.abs(gram - np.eye(v.shape[1])).max() > 1e-10:
            raise ValueError("basis is not orthonormal within 1e-10")
        object.__setattr__(self, "vectors", v)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @classmethod
    def coordinates(cls, lo: int, hi: int, label: str = "") -> "SubspaceBasis":
        n = hi - lo + 1
        return cls((lo, hi), np.eye(n, dtype=np.complex128), label)

    @classmethod
    def first_blocks(cls, n: int, label: str = "") -> "SubspaceBasis":
        lo, hi = block_flat_window(1, n)
        return cls.coordinates(lo, hi, label or f"first {n} blocks")


@dataclass(frozen=True)
class WitnessVector:
    """Unit vector supported on a flat index window."""

    window: tuple[int, int]
    components: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.components, dtype=np.complex128).ravel()
        object.__setattr__(self, "components", v)

    def embed(self, lo: int, hi: int) -> np.ndarray:
        out = np.zeros(hi - lo + 1, dtype=np.complex128)
        wlo, whi = self.window
        out[wlo - lo: whi - lo + 1] = self.components
        return out

    def as_unit_vector(self) -> UnitVector:
        return UnitVector.normalized(self.components)


@dataclass(frozen=True)
class GalerkinLevel:
    index: int
    dim: int
    matrix: ComplexMatrix
    eigenvalues: np.ndarray


@dataclass(frozen=True)
class GalerkinRun:
    operator_label: str
    levels: tuple[GalerkinLevel, ...]

    def spectra(self) -> list[np.ndarray]:
        return [lvl.eigenvalues for lvl in self.levels]

    def csv_rows(self):
        for lvl in self.levels:
            for k, ev in enumerate(lvl.eigenvalues):
                yield (lvl.index, lvl.dim, k, float(ev.real), float(ev.imag))


def compress_sequence(op: OperatorModel, bases) -> GalerkinRun:
    """Compress the operator onto each basis and collect spectra."""
    levels = []
    for idx, basis in enumerate(bases, start=1):
        mat = op.window(*basis.window)
        comp = compress(mat, basis.vectors)
        eig = general_eig(comp)
        levels.append(GalerkinLevel(idx, basis.dim, comp, eig.values))
    return GalerkinRun(op.label, tuple(levels))


@dataclass(frozen=True)
class WindowPolicy:
    """Where injection looks for its tail window and how it advances."""

    start: int
    width: int
    factor: int = 2
    cap: int = WINDOW_CAP


def default_window_policy(op: OperatorModel, V: SubspaceBasis) -> WindowPolicy:
    start = V.window[1] + 2 * op.bandwidth + 1
    if op.kind == "block2x2" and start % 2 == 0:
        start += 1  # align to a block boundary
    width = 63 if op.kind == "block2x2" else 64
    return WindowPolicy(start, width)


def _operator_apply_columns(op: OperatorModel, basis: SubspaceBasis, adjoint: bool) -> tuple[int, int, np.ndarray]:
    """Images (T or T*) of the basis columns, supported on the enlarged window."""
    lo, hi = basis.window
    out_lo = max(op.index_origin, lo - op.bandwidth)
    out_hi = hi + op.bandwidth
    rows = out_hi - out_lo + 1
    mat = np.zeros((rows, hi - lo + 1), dtype=np.complex128)
    for i in range(out_lo, out_hi + 1):
        for j in range(max(lo, i - op.bandwidth), min(hi, i + op.bandwidth) + 1):
            val = op.entry(i, j) if not adjoint else np.conj(op.entry(j, i))
            mat[i - out_lo, j - lo] = val
    return out_lo, out_hi, mat @ basis.vectors


def _restrict(vec_lo: int, vec: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """Restriction of a (vec_lo-based) coefficient vector to indices [lo, hi]."""
    out = np.zeros(hi - lo + 1, dtype=np.complex128)
    src_lo = max(vec_lo, lo)
    src_hi = min(vec_lo + vec.shape[0] - 1, hi)
    if src_hi >= src_lo:
        out[src_lo - lo: src_hi - lo + 1] = vec[src_lo - vec_lo: src_hi - vec_lo + 1]
    return out


def _pairings(op: OperatorModel, basis: SubspaceBasis, witness: WitnessVector) -> tuple[float, float]:
    """max_v |<T v, x>| and max_v |<T x, v>| over the basis columns of V."""
    lo, hi, tv = _operator_apply_columns(op, basis, adjoint=False)
    wlo, whi = witness.window
    worst_tv = 0.0
    for col in range(tv.shape[1]):
        seg = _restrict(lo, tv[:, col], wlo, whi)
        worst_tv = max(worst_tv, abs(np.vdot(witness.components, seg)))
    # <T x, v> = conj(<T* v, x>)
    alo, ahi, tav = _operator_apply_columns(op, basis, adjoint=True)
    worst_tx = 0.0
    for col in range(tav.shape[1]):
        seg = _restrict(alo, tav[:, col], wlo, whi)
        worst_tx = max(worst_tx, abs(np.vdot(witness.components, seg)))
    return worst_tv, worst_tx


def inject_spurious(op: OperatorModel, V: SubspaceBasis, lam: complex, epsilon: float,
                    window_policy: WindowPolicy | None = None,
                    region: ConvexRegion | None = None,
                    n_angles: int = 720) -> tuple[WitnessVector, complex]:
    """Witness x beyond V with <Tx, x> within epsilon of lam.

    ``region`` is (an estimate of) the essential range of the model; when not
    supplied, the default tail-window estimate is computed.  The target is
    checked against it first and HypothesisViolated is raised when it is
    farther than epsilon away.  The window advances by doubling until the
    target is reachable; WindowExhausted is raised at the cap.
    """
    lam = complex(lam)
    if region is None:
        from .essrange import estimate_essential_range
        from .numrange import DEFAULT_CLIP
        region = estimate_essential_range(op, clip=DEFAULT_CLIP).limit
    if region.empty or polygon_distance(lam, region.vertices) > epsilon:
        raise HypothesisViolated(
            f"target {lam} is outside the essential-range estimate by more than {epsilon}")
    policy = window_policy or default_window_policy(op, V)

    # U = span(V + T V [+ T* V]): anything in a window beyond V + bandwidth
    # margin is orthogonal to U; the complement computation keeps the
    # construction honest for windows that do overlap U's support.
    lo_t, hi_t, tv = _operator_apply_columns(op, V, adjoint=False)
    u_all = [(V.window[0], V.vectors[:, c]) for c in range(V.dim)]
    u_all += [(lo_t, tv[:, c]) for c in range(tv.shape[1])]
    if op.adjoint_available:
        lo_a, _, tav = _operator_apply_columns(op, V, adjoint=True)
        u_all += [(lo_a, tav[:, c]) for c in range(tav.shape[1])]

    start, width = policy.start, policy.width
    while start <= policy.cap:
        w_lo, w_hi = start, start + width
        wmat = op.window(w_lo, w_hi)
        u_in_window = [_restrict(vlo, v, w_lo, w_hi) for vlo, v in u_all]
        u_in_window = [u for u in u_in_window if np.linalg.norm(u) > 1e-13]
        if u_in_window:
            comp = orthonormal_complement_basis(
                [u / np.linalg.norm(u) for u in u_in_window], w_hi - w_lo + 1)
            C = np.column_stack([c.components for c in comp]) if comp else None
        else:
            C = np.eye(w_hi - w_lo + 1, dtype=np.complex128)
        if C is not None and C.shape[1] >= 1:
            B = compress(wmat, C)
            sf = nr_boundary(B, n_angles)
            poly = hull(sf.boundary_points).vertices
            dist = polygon_distance(lam, poly)
            if dist <= epsilon:
                target = lam if dist == 0.0 else _project_to_polygon(lam, poly)
                y = attain(B, target, tol=min(epsilon, 1e-10), support=sf)
                x = C @ y.components
                x /= np.linalg.norm(x)
                witness = WitnessVector((w_lo, w_hi), x)
                mu = rayleigh(wmat, x)
                worst_tv, worst_tx = _pairings(op, V, witness)
                ok = worst_tv <= 1e-8 and (not op.adjoint_available or worst_tx <= 1e-8)
                if ok and abs(mu - lam) <= epsilon:
                    return witness, complex(mu)
        start *= policy.factor
    raise WindowExhausted(f"no window below {policy.cap} reaches {lam} within {epsilon}")


def joint_basis(op: OperatorModel, V: SubspaceBasis, witnesses) -> SubspaceBasis:
    """V and the witnesses embedded in one covering window."""
    lo = V.window[0]
    hi = max([V.window[1]] + [w.window[1] for w in witnesses])
    cols = [
        np.concatenate([V.vectors[:, c], np.zeros(hi - V.window[1], dtype=np.complex128)])
        for c in range(V.dim)
    ]
    cols += [w.embed(lo, hi) for w in witnesses]
    return SubspaceBasis((lo, hi), np.column_stack(cols), label=f"{V.label}+witnesses")


@dataclass(frozen=True)
class InjectionPlan:
    """Targets, their epsilon-disks, and what was achieved where."""

    targets: tuple[complex, ...]
    epsilon: float
    achieved: tuple[tuple[complex, WitnessVector, tuple[int, int]], ...] = field(default=())

    def disks(self) -> list[dict]:
        return [{"center": [t.real, t.imag], "radius": self.epsilon} for t in self.targets]

    def to_json_dict(self) -> dict:
        return {
            "targets": [[t.real, t.imag] for t in self.targets],
            "epsilon": float(self.epsilon),
            "disks": self.disks(),
            "achieved": [
                {
                    "mu": [mu.real, mu.imag],
                    "window": [int(win[0]), int(win[1])],
                    "residual": float(abs(mu - t)),
                }
                for (mu, _w, win), t in zip(self.achieved, self.targets)
            ],
        }


@dataclass(frozen=True)
class FillResult:
    basis: SubspaceBasis
    plan: InjectionPlan
    spectrum: np.ndarray
    sup_dist: float


def fill_region(op: OperatorModel, V: SubspaceBasis, omega, n: int,
                region: ConvexRegion | None = None) -> FillResult:
    """Inject one witness per point of a finite target set Omega.

    Disk radius is 1/n.  Witnesses use pairwise disjoint windows (each new
    window starts past the previous one), which makes them mutually
    orthogonal; the enlarged subspace's spectrum then covers Omega within 2/n.
    """
    targets = tuple(complex(z) for z in omega)
    eps = 1.0 / n
    witnesses: list[WitnessVector] = []
    achieved = []
    policy = default_window_policy(op, V)
    for z in targets:
        w, mu = inject_spurious(op, V, z, eps, window_policy=policy, region=region)
        witnesses.append(w)
        achieved.append((mu, w, w.window))
        nxt = w.window[1] + 2 * op.bandwidth + 1
        if op.kind == "block2x2" and nxt % 2 == 0:
            nxt += 1
        policy = WindowPolicy(nxt, policy.width, policy.factor, policy.cap)
    basis = joint_basis(op, V, witnesses) if witnesses else V
    mat = op.window(*basis.window)
    comp = compress(mat, basis.vectors)
    spectrum = general_eig(comp).values
    sup_dist = max((float(np.abs(spectrum - z).min()) for z in targets), default=0.0)
    plan = InjectionPlan(targets, eps, tuple(achieved))
    return FillResult(basis, plan, spectrum, sup_dist)


def delay_probe_vector(gamma: complex, n: int) -> tuple[UnitVector, complex]:
    """Normalized (conj(gamma)/n, 1) on delay block n, and its Rayleigh value.

    The values converge to |gamma|^2 + 1 + conj(gamma) as n grows (the
    conjugate appears because the quadratic form here is conjugate-linear in
    its second slot); the limit set over all gamma is conjugation invariant.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    g = complex(gamma)
    block = np.array([[n * n, 0.0], [n, 1.0]], dtype=np.complex128)
    vec = np.array([np.conj(g) / n, 1.0], dtype=np.complex128)
    vec /= np.linalg.norm(vec)
    x = UnitVector(vec)
    return x, rayleigh(block, x)


def verify_triangular(matrix: ComplexMatrix, split: tuple[int, int], tol: float = 1e-8) -> bool:
    """True when the lower-left block of the (k, rest) split vanishes within tol."""
    k, rest = split
    a = matrix.data
    if k + rest != a.shape[0]:
        raise ValueError("split does not sum to the matrix dimension")
    if k == 0 or rest == 0:
        return True
    return bool(np.abs(a[k:, :k]).max() <= tol)
