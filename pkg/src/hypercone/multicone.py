"""Multicones on RP^1: strict invariance certificates and a heuristic search.

A multicone is a proper open subset of the circle R/(pi Z) with finitely many
components whose closures are pairwise disjoint.  Strict invariance of a
multicone under every map of a system certifies uniform hyperbolicity of the
matrix family; the certificate carries a quantitative margin because all the
downstream distortion constants depend on one.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .enumeration import check_budget, iter_products_all_lengths, log_operator_norm
from .errors import BudgetError
from .projective import (
    PI,
    CLASS_TOL,
    IfsSystem,
    Mat2,
    Word,
    normalize_angle,
    project_act_angle,
    project_act_many,
)

ARC_EQ_TOL = 1e-12


@dataclass(frozen=True)
class Arc:
    """Open arc on R/(pi Z), stored as (start, length) so wrap-around is unambiguous."""

    start: float
    length: float

    def __post_init__(self):
        if not (0.0 < self.length < PI):
            raise ValueError(f"arc length must lie in (0, pi), got {self.length!r}")
        object.__setattr__(self, "start", normalize_angle(float(self.start)))
        object.__setattr__(self, "length", float(self.length))

    @property
    def end(self) -> float:
        return normalize_angle(self.start + self.length)

    def contains_point(self, theta: float, closed: bool = False) -> bool:
        off = (float(theta) - self.start) % PI
        if closed:
            return off <= self.length
        return 0.0 < off < self.length

    def clearance_of(self, inner: "Arc") -> float | None:
        """Clearance of the closed ``inner`` arc inside this open arc.

        Returns the minimum of the two end gaps, or None when the closure of
        ``inner`` is not strictly contained.
        """
        off = (inner.start - self.start) % PI
        if off + inner.length >= self.length:
            return None
        c = min(off, self.length - off - inner.length)
        return c if c > 0.0 else None

    def dilated(self, eps: float) -> "Arc":
        return Arc(self.start - eps, self.length + 2.0 * eps)

    def isclose(self, other: "Arc", tol: float = ARC_EQ_TOL) -> bool:
        ds = abs((self.start - other.start + PI / 2) % PI - PI / 2)
        return ds <= tol and abs(self.length - other.length) <= tol


@dataclass(frozen=True)
class Multicone:
    """Finite union of arcs with pairwise disjoint closures, sorted by start."""

    arcs: tuple[Arc, ...]

    def __post_init__(self):
        if not self.arcs:
            raise ValueError("a multicone needs at least one arc")
        arcs = tuple(sorted(self.arcs, key=lambda a: a.start))
        total = sum(a.length for a in arcs)
        if total >= PI:
            raise ValueError("multicone must be a proper subset of RP^1")
        for left, right in zip(arcs, arcs[1:]):
            if left.start + left.length >= right.start:
                raise ValueError("arc closures must be pairwise disjoint")
        # The last arc may wrap past pi; it must then clear the first one.
        last = arcs[-1]
        if last.start + last.length >= PI and len(arcs) >= 1:
            if last.start + last.length - PI >= arcs[0].start:
                raise ValueError("wrap-around arc overlaps the first component")
        object.__setattr__(self, "arcs", arcs)

    @classmethod
    def single(cls, start: float, length: float) -> "Multicone":
        return cls((Arc(start, length),))

    def total_length(self) -> float:
        return sum(a.length for a in self.arcs)

    def contains_point(self, theta: float, closed: bool = False) -> bool:
        return any(a.contains_point(theta, closed) for a in self.arcs)

    def contains_arc(self, inner: Arc) -> bool:
        return self.clearance_of(inner) is not None

    def clearance_of(self, inner: Arc) -> float | None:
        """Best clearance of ``inner``'s closure inside any single component."""
        best = None
        for a in self.arcs:
            c = a.clearance_of(inner)
            if c is not None and (best is None or c > best):
                best = c
        return best

    def widest(self) -> Arc:
        return max(self.arcs, key=lambda a: a.length)


@dataclass(frozen=True)
class InvarianceCertificate:
    """Outcome of a strict-invariance check, with a quantitative margin."""

    verdict: str  # "verified" | "refuted"
    margin: float
    images: dict[str, tuple[Arc, ...]]
    offending: tuple[str, int] | None = None

    @property
    def verified(self) -> bool:
        return self.verdict == "verified"


def arc_image(m: Mat2, arc: Arc) -> Arc:
    """Image arc under the projective action; homeomorphisms map arcs to arcs.

    Orientation follows the determinant sign: positive determinants preserve
    the circular order of the endpoints, negative ones reverse it.
    """
    t1 = project_act_angle(m, arc.start)
    t2 = project_act_angle(m, arc.start + arc.length)
    if m.det() >= 0.0:
        length = (t2 - t1) % PI
        start = t1
    else:
        length = (t1 - t2) % PI
        start = t2
    if length == 0.0:
        # Endpoints collapsed at float resolution; keep a representable sliver.
        length = 1e-15
    return Arc(start, length)


def verify_strict_invariance(system: IfsSystem, cone: Multicone) -> InvarianceCertificate:
    """Check that every map sends the closed multicone strictly inside it."""
    images: dict[str, tuple[Arc, ...]] = {}
    margin = math.inf
    offending = None
    for lab in system.labels:
        m = system.matrices[lab]
        imgs = []
        for idx, arc in enumerate(cone.arcs):
            img = arc_image(m, arc)
            imgs.append(img)
            c = cone.clearance_of(img)
            if c is None:
                if offending is None:
                    offending = (lab, idx)
                margin = 0.0
            elif offending is None:
                margin = min(margin, c)
        images[lab] = tuple(imgs)
    if offending is not None:
        return InvarianceCertificate("refuted", 0.0, images, offending)
    return InvarianceCertificate("verified", margin, images, None)


@dataclass(frozen=True)
class TraceScan:
    """Shortest elliptic word found (if any) plus parabolic boundary words."""

    elliptic_word: Word | None
    parabolic_words: tuple[Word, ...]
    max_len: int


def scan_traces(system: IfsSystem, max_len: int, class_tol: float = CLASS_TOL) -> TraceScan:
    """Walk the word tree and classify product traces.

    Stops at the first elliptic witness; parabolic words (|trace| within
    ``class_tol`` of 2) are collected as boundary diagnostics along the way.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    parabolic: list[Word] = []
    for word, a, b, c, d, logs in iter_products_all_lengths(system, max_len):
        tr = abs(math.exp(logs) * (a + d))
        if tr < 2.0 - class_tol:
            return TraceScan(word, tuple(parabolic), max_len)
        if abs(tr - 2.0) <= class_tol and len(parabolic) < 64:
            parabolic.append(word)
    return TraceScan(None, tuple(parabolic), max_len)


def elliptic_certificate(
    system: IfsSystem, max_len: int, class_tol: float = CLASS_TOL
) -> Word | None:
    """A word whose product is elliptic, or None if none exists up to ``max_len``.

    Absence is not a proof of hyperbolicity; it only says the scan range is
    clean.
    """
    return scan_traces(system, max_len, class_tol).elliptic_word


@dataclass(frozen=True)
class SearchParams:
    """Knobs for the heuristic multicone search."""

    grid_points: int = 4096
    depth: int = 30
    gap_factor: float = 4.0
    dilation: float = 1e-3
    retries: int = 5
    min_margin: float = 1e-6
    elliptic_max_len: int = 8
    budget: int | None = None


@dataclass(frozen=True)
class MulticoneSearch:
    """Search outcome: a verified multicone or diagnostics explaining absence."""

    multicone: Multicone | None
    certificate: InvarianceCertificate | None
    elliptic_word: Word | None
    parabolic_words: tuple[Word, ...]
    notes: tuple[str, ...] = ()

    @property
    def found(self) -> bool:
        return self.multicone is not None


def _cluster_circle(points: np.ndarray, gap_thresh: float) -> list[tuple[float, float]] | None:
    """Split sorted circle points into (lo, hi) clusters at gaps > ``gap_thresh``.

    Returns None when no gap exceeds the threshold (the set looks like the
    whole circle).  The hi endpoint of a wrapping cluster may exceed pi.
    """
    pts = np.sort(points)
    n = pts.size
    gaps = np.empty(n)
    gaps[:-1] = pts[1:] - pts[:-1]
    gaps[-1] = pts[0] + PI - pts[-1]
    big = np.nonzero(gaps > gap_thresh)[0]
    if big.size == 0:
        return None
    # Each cluster starts just after a big gap and ends at the next one; the
    # cluster through index 0 wraps, so its hi endpoint is lifted by pi.
    clusters = []
    idx = (big[-1] + 1) % n
    for b in big:
        lo = pts[idx]
        hi = pts[b] if b >= idx else pts[b] + PI
        clusters.append((float(lo), float(hi)))
        idx = (b + 1) % n
    return clusters


def _merge_arcs(intervals: list[tuple[float, float]], eps: float) -> list[Arc] | None:
    """Dilate clusters by eps and merge overlaps; None if they fill the circle."""
    iv = sorted((normalize_angle(lo - eps), hi - lo + 2.0 * eps) for lo, hi in intervals)
    merged: list[list[float]] = []
    for start, length in iv:
        if merged and start <= merged[-1][0] + merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], start + length - merged[-1][0])
        else:
            merged.append([start, length])
    # Wrap: last interval may run past pi into the first.
    if len(merged) >= 2 and merged[-1][0] + merged[-1][1] >= PI + merged[0][0]:
        first = merged.pop(0)
        merged[-1][1] = max(merged[-1][1], first[0] + first[1] + PI - merged[-1][0])
    total = sum(l for _, l in merged)
    if total >= PI - 1e-9:
        return None
    try:
        return [Arc(s, min(l, PI - 1e-9)) for s, l in merged]
    except ValueError:
        return None


def find_multicone(system: IfsSystem, params: SearchParams = SearchParams()) -> MulticoneSearch:
    """Heuristic search for a strictly invariant multicone.

    Seeds a dense angle grid, pushes it through the system until it settles
    near the attractor, clusters the survivors into arcs, dilates, and
    verifies.  Every candidate is re-verified, so the heuristic cannot produce
    a false positive; failure is reported as diagnostics, not proof of
    absence.
    """
    scan = scan_traces(system, params.elliptic_max_len)
    if scan.elliptic_word is not None:
        return MulticoneSearch(
            None, None, scan.elliptic_word, scan.parabolic_words,
            ("elliptic product found; no strictly invariant multicone exists",),
        )
    notes: list[str] = []
    if scan.parabolic_words:
        notes.append(
            "parabolic products found up to length "
            f"{scan.max_len}: uniform hyperbolicity is obstructed at the boundary"
        )
    h = PI / params.grid_points
    mats = system.mats_in_order()
    last_cert = None
    for attempt in range(params.retries):
        eps = params.dilation / (2 ** attempt)
        depth = params.depth * (attempt + 1)
        pts = np.arange(params.grid_points) * h
        for _ in range(depth):
            imgs = np.concatenate([project_act_many(m, pts) for m in mats])
            pts = np.unique(np.round(imgs / h) * h)
            pts[pts >= PI] -= PI
            pts = np.unique(pts)
        gap_thresh = max(params.gap_factor * h, 3.0 * eps)
        clusters = _cluster_circle(pts, gap_thresh)
        if clusters is None:
            notes.append(f"attempt {attempt}: surviving grid covers the circle")
            continue
        arcs = _merge_arcs(clusters, eps)
        if arcs is None:
            notes.append(f"attempt {attempt}: dilated clusters are not a proper subset")
            continue
        try:
            cone = Multicone(tuple(arcs))
        except ValueError as exc:
            notes.append(f"attempt {attempt}: invalid candidate ({exc})")
            continue
        cert = verify_strict_invariance(system, cone)
        last_cert = cert
        if cert.verified and cert.margin >= params.min_margin:
            return MulticoneSearch(cone, cert, None, scan.parabolic_words, tuple(notes))
        notes.append(
            f"attempt {attempt}: candidate refuted"
            if not cert.verified
            else f"attempt {attempt}: margin {cert.margin:g} below target"
        )
    notes.append("no strictly invariant multicone found within the retry budget")
    return MulticoneSearch(None, last_cert, None, scan.parabolic_words, tuple(notes))


def hyperbolicity_constants(
    system: IfsSystem,
    cone: Multicone | None,
    n_max: int,
    budget: int | None = None,
) -> tuple[float, float]:
    """Empirical (c, lambda) with ||A_w|| >= c * lambda^|w| on the scanned range.

    lambda is fitted from the worst per-level norm growth over the upper half
    of the levels, c from the worst deficit over all levels.  When the
    multicone is not strictly invariant the fit degenerates and a lambda <= 1
    is reported with a warning.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    check_budget(system.size(), n_max, budget)
    if cone is not None:
        cert = verify_strict_invariance(system, cone)
        if not cert.verified:
            warnings.warn(
                "multicone is not strictly invariant; hyperbolicity constants "
                "may be meaningless",
                stacklevel=2,
            )
    min_log = [math.inf] * (n_max + 1)
    for word, a, b, c, d, logs in iter_products_all_lengths(system, n_max, budget):
        lvl = len(word)
        ln = log_operator_norm(a, b, c, d, logs)
        if ln < min_log[lvl]:
            min_log[lvl] = ln
    lam = min(
        math.exp(min_log[n] / n) for n in range(max(1, (n_max + 1) // 2), n_max + 1)
    )
    log_lam = math.log(lam)
    c_const = min(math.exp(min_log[n] - n * log_lam) for n in range(1, n_max + 1))
    if lam <= 1.0:
        warnings.warn(
            f"no exponential norm growth detected (lambda = {lam:.6g} <= 1)",
            stacklevel=2,
        )
    return c_const, lam
