"""Eigenvalue tracking across approximation schedules and pollution verdicts.

Accumulation at desk scale is certified through Cauchy-like chains: an
eigenvalue chain that persists over at least three consecutive transitions
with non-growing increments is reported as an accumulation candidate, with
its residual drift attached.  Candidates are then classified against an
essential-range region: outside the region (plus margin) they must be
approximations of true spectrum; inside they are pollution candidates unless
an exact spectrum list vouches for them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .numrange import ConvexRegion, contains

DEFAULT_RADIUS_SCALE = 0.05
DEFAULT_MARGIN = 1e-2

RadiusRule = Callable[[complex], float]


def default_radius(delta0: float = DEFAULT_RADIUS_SCALE) -> RadiusRule:
    return lambda lam: delta0 * (1.0 + abs(lam))


@dataclass(frozen=True)
class AccumulationPoint:
    """A persistent eigenvalue chain; value is the last link."""

    value: complex
    chain: tuple[tuple[float, complex], ...]  # (level key, matched eigenvalue)
    span: int            # number of consecutive matched transitions
    cauchy_rate: float   # max increment over the last 3 links
    drift: float         # last increment


@dataclass(frozen=True)
class ClassifiedPoint:
    value: complex
    verdict: str  # approximated-true | pollution-candidate | undecided-inside-We
    in_region: bool
    drift: float
    drifting_family: bool


@dataclass(frozen=True)
class SpectralReport:
    points: tuple[ClassifiedPoint, ...]
    region_ref: str

    def to_json_dict(self) -> dict:
        return {
            "points": [
                {
                    "re": p.value.real,
                    "im": p.value.imag,
                    "verdict": p.verdict,
                    "in_region": bool(p.in_region),
                    "drift": float(p.drift),
                }
                for p in self.points
            ],
            "region_ref": self.region_ref,
        }


def track(spectra: Sequence[np.ndarray], radius_rule: RadiusRule | None = None,
          level_keys: Sequence[float] | None = None) -> list[AccumulationPoint]:
    """Nearest-neighbor chains through per-level spectra.

    Chains extend greedily in order of increasing match distance, each
    eigenvalue used at most once per level; matches beyond the scale-aware
    radius are rejected.  Chains spanning >= 3 transitions whose increments
    do not grow become accumulation points.
    """
    if len(spectra) < 4:
        raise ValueError("need at least 4 levels to track")
    radius = radius_rule or default_radius()
    keys = list(level_keys) if level_keys is not None else list(range(len(spectra)))
    levels = [np.asarray(s, dtype=np.complex128).ravel() for s in spectra]

    chains: list[dict] = [
        {"links": [(keys[0], lam)], "increments": [], "open": True} for lam in levels[0]
    ]
    for li in range(1, len(levels)):
        cur = levels[li]
        used = np.zeros(cur.size, dtype=bool)
        active = [c for c in chains if c["open"]]
        candidates = []
        for ci, c in enumerate(active):
            last = c["links"][-1][1]
            r = radius(last)
            d = np.abs(cur - last)
            for ei in np.nonzero(d <= r)[0]:
                candidates.append((float(d[ei]), ci, int(ei)))
        candidates.sort()
        taken_chain = set()
        for dist, ci, ei in candidates:
            if ci in taken_chain or used[ei]:
                continue
            taken_chain.add(ci)
            used[ei] = True
            active[ci]["links"].append((keys[li], complex(cur[ei])))
            active[ci]["increments"].append(dist)
        for ci, c in enumerate(active):
            if ci not in taken_chain:
                c["open"] = False
        for ei in np.nonzero(~used)[0]:
            chains.append({"links": [(keys[li], complex(cur[ei]))], "increments": [], "open": True})

    out: list[AccumulationPoint] = []
    for c in chains:
        inc = c["increments"]
        span = len(inc)
        if span < 3:
            continue
        last3 = inc[-3:]
        lam = c["links"][-1][1]
        # non-growing increments, with a noise floor relative to the radius
        if inc[-1] > last3[0] + DEFAULT_RADIUS_SCALE * radius(lam):
            continue
        out.append(AccumulationPoint(
            value=lam,
            chain=tuple(c["links"]),
            span=span,
            cauchy_rate=float(max(last3)),
            drift=float(inc[-1]),
        ))
    out.sort(key=lambda p: (p.value.real, p.value.imag))
    return out


def classify(points: Sequence[AccumulationPoint], region: ConvexRegion,
             exact: Sequence[complex] | None = None, margin: float = DEFAULT_MARGIN,
             exact_tol: float = 1e-6, region_ref: str = "",
             family_drift_tol: float = 1e-3) -> SpectralReport:
    """Pollution/inclusion dichotomy against an essential-range region.

    Outside region + margin: approximated-true.  Inside: pollution-candidate
    when an exact spectrum list is supplied and the point is absent from it,
    undecided-inside-We otherwise.  An empty region marks everything
    approximated-true.
    """
    exact_arr = np.asarray(list(exact), dtype=np.complex128) if exact is not None else None
    classified = []
    for p in points:
        inside = contains(region, p.value, margin)
        if not inside:
            verdict = "approximated-true"
        else:
            if exact_arr is not None and exact_arr.size and np.abs(exact_arr - p.value).min() <= exact_tol:
                verdict = "undecided-inside-We"
            elif exact_arr is not None:
                verdict = "pollution-candidate"
            else:
                verdict = "undecided-inside-We"
        classified.append(ClassifiedPoint(
            value=p.value,
            verdict=verdict,
            in_region=inside,
            drift=p.drift,
            drifting_family=p.drift > family_drift_tol,
        ))
    return SpectralReport(tuple(classified), region_ref)


@dataclass(frozen=True)
class MatchReport:
    matched: tuple[tuple[complex, complex], ...]
    unmatched_points: tuple[complex, ...]
    unmatched_exact: tuple[complex, ...]


def compare_exact(points: Sequence[complex], exact: Sequence[complex], tol: float) -> MatchReport:
    """Minimal-cost assignment between computed points and exact values.

    Pairs with cost above tol are reported unmatched on both sides.
    """
    ps = np.asarray(list(points), dtype=np.complex128)
    ex = np.asarray(list(exact), dtype=np.complex128)
    if ps.size == 0 or ex.size == 0:
        return MatchReport((), tuple(ps), tuple(ex))
    cost = np.abs(ps[:, None] - ex[None, :])
    rows, cols = linear_sum_assignment(cost)
    matched = []
    used_p, used_e = set(), set()
    for r, c in zip(rows, cols):
        if cost[r, c] <= tol:
            matched.append((complex(ps[r]), complex(ex[c])))
            used_p.add(r)
            used_e.add(c)
    un_p = tuple(complex(ps[i]) for i in range(ps.size) if i not in used_p)
    un_e = tuple(complex(ex[i]) for i in range(ex.size) if i not in used_e)
    return MatchReport(tuple(matched), un_p, un_e)
