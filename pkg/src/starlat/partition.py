"""Shells, the two-line mass equipartition, and witness extraction.

This is the executable core of the witness pipeline in the plane: annular
shells of an infinite-volume Borel set are built so each holds volume
exceeding 2^d * zeta(d) * n, a two-orthogonal-line dissection splits each
shell's Monte Carlo mass into four equal parts that no affine line can
meet simultaneously, and per-quadrant primitive lattice points yield
linearly independent witness pairs, one tuple per shell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import zeta

from .errors import DegenerateMass, NoConvergence, VolumeStall
from .haar import sample_unimodular_2d_arrays
from .lattice import (
    DEFAULT_POINT_CAP,
    Lattice,
    LatticePoint,
    enumerate_ball_arrays,
    make_lattice,
    primitive_mask,
)

BodyPredicate = Callable[[np.ndarray], np.ndarray]  # (N, d) -> bool mask


def plane_body() -> BodyPredicate:
    """Membership predicate of the entire plane."""
    return lambda pts: np.ones(len(pts), dtype=bool)


def sublevel_body(f, t: float) -> BodyPredicate:
    """Membership predicate of {x : f(x) <= t}."""
    return lambda pts: np.asarray(f.evaluator(pts)) <= t


@dataclass(frozen=True)
class Shell:
    index: int
    inner: float
    outer: float
    body: BodyPredicate
    est_volume: float
    stderr: float


@dataclass(frozen=True)
class Partition2D:
    center: tuple[float, float]
    angle: float                      # in [0, pi/2)
    masses: tuple[float, float, float, float]


@dataclass(frozen=True)
class WitnessTuple:
    shell_index: int
    points: tuple[LatticePoint, LatticePoint]
    quadrants: tuple[int, int]


@dataclass(frozen=True)
class WitnessReport:
    tuples: tuple[WitnessTuple, ...]
    failures: tuple[tuple[int, tuple[int, ...]], ...]  # (shell, empty quads)


@dataclass(frozen=True)
class TransversalReport:
    lines: int
    max_met: int                      # must be <= 3
    histogram: tuple[int, ...]        # counts of lines meeting 0..4 quadrants


@dataclass(frozen=True)
class RateReport:
    n: int
    samples: int
    misses: int
    rate: float
    ci_low: float
    ci_high: float


# ---------------------------------------------------------------------------
# two-line equipartition


def _median_cut(vals: np.ndarray, weights: np.ndarray) -> float:
    """Cut position so the mass strictly below it is as close to half as the
    atoms allow; between atoms whenever possible."""
    o = np.argsort(vals, kind="stable")
    v = vals[o]
    cw = np.cumsum(weights[o])
    half = cw[-1] / 2.0
    i = int(np.searchsorted(cw, half))
    i = min(i, len(v) - 1)
    k = int(np.searchsorted(v, v[i], side="right"))
    if k < len(v):
        return 0.5 * (v[i] + v[k])
    return float(v[i])


def _masses_at(pts: np.ndarray, w: np.ndarray, theta: float):
    ct, st = math.cos(theta), math.sin(theta)
    uu = pts[:, 0] * ct + pts[:, 1] * st
    vv = -pts[:, 0] * st + pts[:, 1] * ct
    cx = _median_cut(uu, w)
    cy = _median_cut(vv, w)
    pu = (uu - cx) >= 0.0   # exact zeros count positive (tie rule)
    pv = (vv - cy) >= 0.0
    m1 = float(w[pu & pv].sum())
    m2 = float(w[~pu & pv].sum())
    m3 = float(w[~pu & ~pv].sum())
    m4 = float(w[pu & ~pv].sum())
    center = (float(cx * ct - cy * st), float(cx * st + cy * ct))
    return center, (m1, m2, m3, m4)


def two_line_equipartition(points, tol: float, weights=None,
                           max_iter: int = 200) -> Partition2D:
    """Split a weighted planar sample into four parts of mass total/4 by two
    orthogonal lines, each line halving the mass.

    Bisection runs on g(theta) = m1 - m2; since a quarter turn permutes the
    quadrants cyclically, g(theta + pi/2) = -g(theta) and a sign change is
    guaranteed on [0, pi/2].
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 8:
        raise ValueError("need at least 8 planar sample points")
    w = (np.ones(len(pts)) if weights is None
         else np.asarray(weights, dtype=float))
    total = float(w.sum())
    if total <= 0:
        raise ValueError("total weight must be positive")
    if float(w.max()) > total / 2.0:
        raise DegenerateMass("one atom carries more than half the mass")
    quarter = total / 4.0

    def build(theta, center, masses):
        return Partition2D(center=center, angle=theta % (math.pi / 2.0),
                           masses=masses)

    center0, m0 = _masses_at(pts, w, 0.0)
    if max(abs(m - quarter) for m in m0) <= tol:
        return build(0.0, center0, m0)
    g0 = m0[0] - m0[1]
    lo, hi = 0.0, math.pi / 2.0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        center, m = _masses_at(pts, w, mid)
        if max(abs(v - quarter) for v in m) <= tol:
            return build(mid, center, m)
        g = m[0] - m[1]
        if (g > 0) == (g0 > 0):
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    raise NoConvergence(
        "equipartition bisection stalled; likely atoms on the lines")


def quadrant_of(partition: Partition2D, x) -> int:
    """Quadrant index in {1,2,3,4} by rotated-sign signature; exact zeros
    count positive.  1 = (+,+), 2 = (-,+), 3 = (-,-), 4 = (+,-)."""
    p = np.asarray(x, dtype=float)
    ct, st = math.cos(partition.angle), math.sin(partition.angle)
    dx = p[0] - partition.center[0]
    dy = p[1] - partition.center[1]
    u = dx * ct + dy * st
    v = -dx * st + dy * ct
    return _signature_to_quadrant(u >= 0.0, v >= 0.0)


def _signature_to_quadrant(pu, pv):
    if pu and pv:
        return 1
    if not pu and pv:
        return 2
    if not pu and not pv:
        return 3
    return 4


def _quadrants_of_rows(partition: Partition2D, pts: np.ndarray) -> np.ndarray:
    ct, st = math.cos(partition.angle), math.sin(partition.angle)
    dx = pts[:, 0] - partition.center[0]
    dy = pts[:, 1] - partition.center[1]
    u = dx * ct + dy * st
    v = -dx * st + dy * ct
    pu = u >= 0.0
    pv = v >= 0.0
    q = np.empty(len(pts), dtype=np.int64)
    q[pu & pv] = 1
    q[~pu & pv] = 2
    q[~pu & ~pv] = 3
    q[pu & ~pv] = 4
    return q


# ---------------------------------------------------------------------------
# transversal checker


_POPCNT4 = np.array([bin(i).count("1") for i in range(16)], dtype=np.int64)


def transversal_check(partition: Partition2D, lines: int, seed: int,
                      spread: float = 10.0) -> TransversalReport:
    """Sample random affine lines and count how many of the four open
    quadrants each one meets.  Two crossing lines cut any other line into
    at most three pieces, so a count of 4 is a hard geometry bug."""
    if lines < 1:
        raise ValueError("need at least one probe line")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    ang = rng.uniform(0.0, math.pi, lines)
    P = np.array(partition.center) + rng.uniform(-spread, spread, (lines, 2))
    ct, st = math.cos(partition.angle), math.sin(partition.angle)
    dx = P[:, 0] - partition.center[0]
    dy = P[:, 1] - partition.center[1]
    a = dx * ct + dy * st
    c = -dx * st + dy * ct
    ux, uy = np.cos(ang), np.sin(ang)
    b = ux * ct + uy * st
    d = -ux * st + uy * ct
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = np.where(b != 0.0, -a / b, np.nan)
        t2 = np.where(d != 0.0, -c / d, np.nan)
    t1f = np.where(np.isnan(t1), t2, t1)
    t2f = np.where(np.isnan(t2), t1, t2)
    r1 = np.minimum(t1f, t2f)
    r2 = np.maximum(t1f, t2f)
    S = np.stack([r1 - 1.0, 0.5 * (r1 + r2), r2 + 1.0])   # (3, lines)
    U = a + b * S
    V = c + d * S
    valid = (U != 0.0) & (V != 0.0)
    code = (U > 0.0).astype(np.int64) * 2 + (V > 0.0).astype(np.int64)
    bits = np.where(valid, np.left_shift(1, code), 0)
    occ = bits[0] | bits[1] | bits[2]
    counts = _POPCNT4[occ]
    hist = np.bincount(counts, minlength=5)
    return TransversalReport(lines=lines, max_met=int(counts.max()),
                             histogram=tuple(int(h) for h in hist[:5]))


# ---------------------------------------------------------------------------
# shells


def _unit_ball_volume(d: int) -> float:
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


def _annulus_samples(rng: np.random.Generator, d: int, r_in: float,
                     r_out: float, count: int) -> np.ndarray:
    dirs = rng.standard_normal((count, d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    u = rng.random(count)
    radii = (u * (r_out**d - r_in**d) + r_in**d) ** (1.0 / d)
    return dirs * radii[:, None]


def _estimate_annulus_volume(body: BodyPredicate, d: int, r_in: float,
                             r_out: float, mc_points: int,
                             ss: np.random.SeedSequence):
    rng = np.random.default_rng(ss)
    pts = _annulus_samples(rng, d, r_in, r_out, mc_points)
    p = float(np.mean(body(pts)))
    shell_vol = _unit_ball_volume(d) * (r_out**d - r_in**d)
    est = p * shell_vol
    se = shell_vol * math.sqrt(max(p * (1.0 - p), 0.0) / mc_points)
    return est, se


def build_shells(body: BodyPredicate, d: int, n_max: int,
                 mc_points: int = 10**5, seed: int = 0) -> list[Shell]:
    """Greedy annular shells with Monte Carlo volume certification.

    The n-th outer radius is the (bisected) smallest radius whose annulus
    volume estimate minus two standard errors exceeds 2^d * zeta(d) * n.
    """
    zd = float(zeta(d))
    shells: list[Shell] = []
    rho_prev = 0.0
    for n in range(1, n_max + 1):
        thresh = (2.0**d) * zd * n

        attempt = [0]

        def passes(ro):
            ss = np.random.SeedSequence(entropy=seed,
                                        spawn_key=(n, attempt[0]))
            attempt[0] += 1
            est, se = _estimate_annulus_volume(body, d, rho_prev, ro,
                                               mc_points, ss)
            return est - 2.0 * se > thresh, est, se

        # doubling phase with stall detection
        step = max(rho_prev, 1.0)
        history: list[float] = []
        ro = rho_prev + step
        ok, est, se = passes(ro)
        doublings = 0
        while not ok:
            history.append(est)
            if len(history) >= 5 and (history[-1] - history[-5]
                                      <= max(4.0 * se, 1e-9)):
                raise VolumeStall(
                    f"annulus volume stopped growing near {est:.4g} "
                    f"(< threshold {thresh:.4g}); V(B) appears finite")
            doublings += 1
            if doublings > 60:
                raise VolumeStall("doubling exhausted without reaching "
                                  "the shell volume threshold")
            step *= 2.0
            ro = rho_prev + step
            ok, est, se = passes(ro)
        # bisection phase; keep the last passing radius and estimate
        lo = rho_prev + (step / 2.0 if doublings else 0.0)
        hi, hi_est, hi_se = ro, est, se
        for _ in range(60):
            if hi - lo <= 1e-9 * max(hi, 1.0):
                break
            mid = 0.5 * (lo + hi)
            ok, est, se = passes(mid)
            if ok:
                hi, hi_est, hi_se = mid, est, se
            else:
                lo = mid
        shells.append(Shell(index=n, inner=rho_prev, outer=hi, body=body,
                            est_volume=hi_est, stderr=hi_se))
        rho_prev = hi
    return shells


def sample_shell_points(shell: Shell, count: int, seed: int,
                        max_batches: int = 10**4) -> np.ndarray:
    """Uniform sample of shell-intersect-body by rejection from the annulus."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    out = []
    got = 0
    for _ in range(max_batches):
        pts = _annulus_samples(rng, 2, shell.inner, shell.outer,
                               max(count, 1024))
        pts = pts[shell.body(pts)]
        if len(pts):
            out.append(pts)
            got += len(pts)
        if got >= count:
            break
    if got < count:
        raise NoConvergence("rejection sampling starved; body too thin "
                            "inside the shell")
    return np.concatenate(out)[:count]


# ---------------------------------------------------------------------------
# witness extraction


def _lex_min_row(rows: np.ndarray) -> int:
    o = np.lexsort(tuple(rows[:, k] for k in range(rows.shape[1] - 1, -1, -1)))
    return int(o[0])


def _shell_primitive_points(L: Lattice, shell: Shell, budget: float,
                            cap: int):
    R = min(shell.outer, budget)
    coeffs, coords = enumerate_ball_arrays(L, R, cap)
    nrm2 = (coords * coords).sum(axis=1)
    keep = (nrm2 > shell.inner**2) & np.any(coeffs != 0, axis=1)
    keep &= shell.body(coords)
    coeffs, coords = coeffs[keep], coords[keep]
    prim = primitive_mask(coeffs)
    return coeffs[prim], coords[prim]


def extract_witnesses(L: Lattice, shells: list[Shell],
                      partitions: list[Partition2D],
                      budget: float = math.inf,
                      cap: int = DEFAULT_POINT_CAP) -> WitnessReport:
    """Per shell: find one primitive lattice point per partition quadrant and
    select two linearly independent representatives.

    A shell with an unpopulated quadrant is recorded as a failure event (the
    lattice plays the role of a member of the exceptional set for that n).
    Tuples from distinct shells are disjoint because the shells are.
    """
    tuples: list[WitnessTuple] = []
    failures: list[tuple[int, tuple[int, ...]]] = []
    for shell, part in zip(shells, partitions):
        coeffs, coords = _shell_primitive_points(L, shell, budget, cap)
        if not len(coeffs):
            failures.append((shell.index, (1, 2, 3, 4)))
            continue
        q = _quadrants_of_rows(part, coords)
        reps = {}
        empty = []
        for qi in (1, 2, 3, 4):
            rows = np.flatnonzero(q == qi)
            if not len(rows):
                empty.append(qi)
                continue
            pick = rows[_lex_min_row(coeffs[rows])]
            reps[qi] = pick
        if empty:
            failures.append((shell.index, tuple(empty)))
            continue
        pair = None
        quads = list(reps)
        for ia in range(len(quads)):
            for ib in range(ia + 1, len(quads)):
                A, B = reps[quads[ia]], reps[quads[ib]]
                det = int(coeffs[A, 0]) * int(coeffs[B, 1]) \
                    - int(coeffs[A, 1]) * int(coeffs[B, 0])
                if det != 0:
                    pair = (quads[ia], quads[ib], A, B)
                    break
            if pair:
                break
        if pair is None:
            # all four representatives collinear with the origin; treat as a
            # failure event (cannot happen when they sit in open quadrants)
            failures.append((shell.index, ()))
            continue
        qa, qb, A, B = pair
        pa = LatticePoint(coords=tuple(map(float, coords[A])),
                          coeffs=tuple(map(int, coeffs[A])))
        pb = LatticePoint(coords=tuple(map(float, coords[B])),
                          coeffs=tuple(map(int, coeffs[B])))
        tuples.append(WitnessTuple(shell_index=shell.index,
                                   points=(pa, pb), quadrants=(qa, qb)))
    return WitnessReport(tuples=tuple(tuples), failures=tuple(failures))


# ---------------------------------------------------------------------------
# empirical failure rates


@dataclass(frozen=True)
class PipelineConfig:
    body: BodyPredicate = field(default_factory=plane_body)
    mc_points: int = 10**5
    partition_points: int = 10**4
    partition_tol_frac: float = 0.01   # tolerance as a fraction of total/4
    budget: float = math.inf


def build_partitions(shells: list[Shell], config: PipelineConfig,
                     seed: int) -> list[Partition2D]:
    parts = []
    for shell in shells:
        sub = int(np.random.SeedSequence(
            entropy=seed, spawn_key=(7, shell.index)).generate_state(1)[0])
        pts = sample_shell_points(shell, config.partition_points, sub)
        tol = config.partition_tol_frac * len(pts) / 4.0
        parts.append(two_line_equipartition(pts, tol=max(tol, 1.0)))
    return parts


def part_miss_rate(n: int, samples: int, config: PipelineConfig,
                   seed: int) -> RateReport:
    """Fraction of Haar-random lattices for which shell n has at least one
    quadrant without a primitive point, with a 95% Wilson interval."""
    if samples < 100:
        raise ValueError("need at least 100 samples")
    shells = build_shells(config.body, 2, n, config.mc_points, seed)
    shell = shells[-1]
    part = build_partitions([shell], config, seed)[0]
    _, _, _, bases = sample_unimodular_2d_arrays(samples, seed)
    misses = 0
    for i in range(samples):
        L = make_lattice(bases[i])
        coeffs, coords = _shell_primitive_points(L, shell, config.budget,
                                                 DEFAULT_POINT_CAP)
        if not len(coeffs):
            misses += 1
            continue
        q = _quadrants_of_rows(part, coords)
        if len(np.unique(q)) < 4:
            misses += 1
    p = misses / samples
    z = 1.959963984540054
    denom = 1.0 + z * z / samples
    center = (p + z * z / (2 * samples)) / denom
    half = z * math.sqrt(p * (1 - p) / samples
                         + z * z / (4 * samples * samples)) / denom
    return RateReport(n=n, samples=samples, misses=misses, rate=p,
                      ci_low=max(center - half, 0.0),
                      ci_high=min(center + half, 1.0))
