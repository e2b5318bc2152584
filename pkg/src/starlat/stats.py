"""Primitive-point counting over bounded regions and the Monte Carlo
mean-value / minima-decay experiments over Haar-random planar lattices."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import zeta

from .bodies import DistanceFunction, boundedness_floor, parse_body
from .errors import UnboundedBody
from .lattice import (
    DEFAULT_POINT_CAP,
    Lattice,
    enumerate_ball_arrays,
    make_lattice,
    primitive_mask,
)
from .haar import sample_unimodular_2d_arrays
from .minima import _argmin_f_lex


@dataclass(frozen=True)
class Region:
    """Bounded Borel region with a total membership predicate and an exact
    or Monte Carlo area."""

    kind: str
    spec: str
    area: float
    area_stderr: float
    bounding_radius: float
    contains: Callable[[np.ndarray], np.ndarray]   # (N, d) -> bool mask


def disk_region(r: float) -> Region:
    return Region(kind="disk", spec=f"disk:r={r:g}", area=math.pi * r * r,
                  area_stderr=0.0, bounding_radius=r,
                  contains=lambda p: (p * p).sum(axis=-1) <= r * r)


def annulus_region(r0: float, r1: float) -> Region:
    if not 0 <= r0 < r1:
        raise ValueError("need 0 <= r0 < r1")
    return Region(kind="annulus", spec=f"annulus:r0={r0:g}:r1={r1:g}",
                  area=math.pi * (r1 * r1 - r0 * r0), area_stderr=0.0,
                  bounding_radius=r1,
                  contains=lambda p, a=r0 * r0, b=r1 * r1:
                      ((p * p).sum(axis=-1) > a)
                      & ((p * p).sum(axis=-1) <= b))


def box_region(a: float) -> Region:
    h = a / 2.0
    return Region(kind="box", spec=f"box:a={a:g}", area=a * a,
                  area_stderr=0.0, bounding_radius=h * math.sqrt(2.0),
                  contains=lambda p: np.abs(p).max(axis=-1) <= h)


def sublevel_region(f: DistanceFunction, t: float, clip: float,
                    mc_points: int = 10**6) -> Region:
    """{x : f(x) <= t} clipped to the disk of radius `clip` (finite area)."""
    rng = np.random.default_rng(np.random.SeedSequence(987654321))
    u = rng.random((mc_points, 2))
    radii = clip * np.sqrt(u[:, 0])
    ang = 2.0 * math.pi * u[:, 1]
    pts = np.stack([radii * np.cos(ang), radii * np.sin(ang)], axis=1)
    inside = np.asarray(f.evaluator(pts)) <= t
    p = float(inside.mean())
    disk_area = math.pi * clip * clip
    contains = lambda pts_: (np.asarray(f.evaluator(pts_)) <= t) \
        & ((pts_ * pts_).sum(axis=-1) <= clip * clip)
    return Region(kind="sublevel",
                  spec=f"sublevel:body={f.label}:t={t:g}:clip={clip:g}",
                  area=p * disk_area,
                  area_stderr=disk_area
                  * math.sqrt(max(p * (1 - p), 0.0) / mc_points),
                  bounding_radius=clip, contains=contains)


def parse_region(spec: str, dim: int = 2) -> Region:
    """Parse "disk:r=2.5", "annulus:r0=1:r1=2", "box:a=2",
    "sublevel:body=hyperbola:t=1:clip=10"."""
    head, _, rest = spec.partition(":")
    opts: dict[str, str] = {}
    if rest:
        # a "body=" value may itself contain colons (nested body spec); only
        # t= and clip= end it
        pending = None
        for tok in rest.split(":"):
            k, eq, v = tok.partition("=")
            if pending is not None and (not eq or k not in ("t", "clip")):
                opts[pending] += ":" + tok
                continue
            opts[k] = v
            pending = k if k == "body" else None
    if head == "disk":
        return disk_region(float(opts["r"]))
    if head == "annulus":
        return annulus_region(float(opts["r0"]), float(opts["r1"]))
    if head == "box":
        return box_region(float(opts["a"]))
    if head == "sublevel":
        body = parse_body(opts["body"], dim)
        return sublevel_region(body, float(opts["t"]), float(opts["clip"]))
    raise ValueError(f"unknown region spec {spec!r}")


def count_primitive(L: Lattice, region: Region,
                    cap: int = DEFAULT_POINT_CAP) -> int:
    """Exact number of primitive points of L in the region."""
    coeffs, coords = enumerate_ball_arrays(L, region.bounding_radius, cap)
    nz = np.any(coeffs != 0, axis=1)
    mask = nz & np.asarray(region.contains(coords), dtype=bool)
    return int(np.count_nonzero(primitive_mask(coeffs[mask])))


# ---------------------------------------------------------------------------
# Rogers / Schmidt moment reports


@dataclass(frozen=True)
class RegionMoment:
    spec: str
    area: float
    mean: float
    mean_stderr: float
    center: float               # V(A) / zeta(2)
    second_moment: float        # mean of (count - center)^2
    ratio_volume: float         # m2 / V(A)
    ratio_schmidt: float        # m2 / (V(A) * log2 V(A))
    counts: Optional[tuple[int, ...]] = None


@dataclass(frozen=True)
class MomentReport:
    dim: int
    samples: int
    seed: int
    entries: tuple[RegionMoment, ...]


def _primitive_counts(region: Region, bases: np.ndarray,
                      cap: int = DEFAULT_POINT_CAP) -> np.ndarray:
    counts = np.empty(len(bases), dtype=np.int64)
    for i in range(len(bases)):
        counts[i] = count_primitive(make_lattice(bases[i]), region, cap)
    return counts


def rogers_moment_report(regions: list[Region], N: int,
                         seed: int, keep_counts: bool = True) -> MomentReport:
    """Sample N Haar lattices per region; report the mean primitive count and
    the second moment about the analytic centering V(A)/zeta(2)."""
    if N < 10**3:
        raise ValueError("need at least 1000 samples")
    _, _, _, bases = sample_unimodular_2d_arrays(N, seed)
    z2 = float(zeta(2))
    entries = []
    for region in regions:
        counts = _primitive_counts(region, bases)
        V = region.area
        center = V / z2
        dev = counts - center
        m2 = float(np.mean(dev * dev))
        mean = float(counts.mean())
        se = float(counts.std(ddof=1)) / math.sqrt(N)
        logv = math.log2(V) if V > 1 else 1.0
        entries.append(RegionMoment(
            spec=region.spec, area=V, mean=mean, mean_stderr=se,
            center=center, second_moment=m2, ratio_volume=m2 / V,
            ratio_schmidt=m2 / (V * logv),
            counts=tuple(int(c) for c in counts)
            if keep_counts and N <= 10**6 else None))
    return MomentReport(dim=2, samples=N, seed=seed, entries=tuple(entries))


# ---------------------------------------------------------------------------
# minima-decay experiment for unbounded bodies


@dataclass(frozen=True)
class Theorem2Report:
    body: str
    budgets: tuple[float, ...]
    samples: int
    seed: int
    lambda2: tuple[tuple[float, ...], ...]     # per lattice, per budget
    median_curve: tuple[float, ...]
    thresholds: tuple[float, ...]
    fraction_below: tuple[tuple[float, ...], ...]  # per threshold, per budget


def _lambda2_at_budgets(coeffs: np.ndarray, fvals: np.ndarray,
                        norms2: np.ndarray,
                        budgets: list[float]) -> list[float]:
    out = []
    for b in budgets:
        sel = norms2 <= b * b
        sub_c = coeffs[sel]
        sub_f = fvals[sel]
        if not len(sub_c):
            out.append(math.inf)
            continue
        i1 = _argmin_f_lex(sub_c, sub_f, None)
        c1 = sub_c[i1]
        cross = sub_c[:, 0] * int(c1[1]) - sub_c[:, 1] * int(c1[0])
        i2 = _argmin_f_lex(sub_c, sub_f, cross != 0)
        out.append(math.inf if i2 < 0 else float(sub_f[i2]))
    return out


def theorem2_experiment(body: DistanceFunction, budgets, N: int, seed: int,
                        thresholds=(1.0, 0.5, 0.2),
                        cap: int = DEFAULT_POINT_CAP) -> Theorem2Report:
    """Budgeted lambda-hat_2 curves for an unbounded body over Haar lattices.

    Per-lattice curves are monotone non-increasing by construction (nested
    search balls); the report records the fraction of lattices whose
    lambda-hat_2 falls below each threshold at each budget.
    """
    budgets = sorted(float(b) for b in budgets)
    if not budgets:
        raise ValueError("need at least one budget")
    if boundedness_floor(body).bounded:
        raise UnboundedBody("minima-decay experiment requires an unbounded "
                            "body")
    _, _, _, bases = sample_unimodular_2d_arrays(N, seed)
    rows = []
    for i in range(N):
        L = make_lattice(bases[i])
        coeffs, coords = enumerate_ball_arrays(L, budgets[-1], cap,
                                               sort=False)
        nz = np.any(coeffs != 0, axis=1)
        coeffs, coords = coeffs[nz], coords[nz]
        fvals = np.asarray(body.evaluator(coords), dtype=float)
        norms2 = (coords * coords).sum(axis=1)
        lam2 = _lambda2_at_budgets(coeffs, fvals, norms2, budgets)
        for a, b in zip(lam2, lam2[1:]):
            assert b <= a + 1e-12, "lambda-hat_2 must not increase with budget"
        rows.append(tuple(lam2))
    arr = np.array(rows)
    med = tuple(float(v) for v in np.median(arr, axis=0))
    frac = tuple(
        tuple(float(np.mean(arr[:, j] < t)) for j in range(len(budgets)))
        for t in thresholds)
    return Theorem2Report(body=body.label, budgets=tuple(budgets), samples=N,
                          seed=seed, lambda2=tuple(rows), median_curve=med,
                          thresholds=tuple(thresholds), fraction_below=frac)
