"""2x2 matrices, words, and the induced action on RP^1 identified with [0, pi).

A line through the origin of R^2 is stored as its angle theta in [0, pi).
A matrix acts on angles through its linear action on representative vectors;
determinants are normalized to +-1 so that all derivative formulas below are
exact for the stored atoms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AxisUndefinedError,
    ProductOverflowError,
    SingularMatrixError,
    UnknownLabelError,
)

PI = math.pi

DET_TOL = 1e-9
CLASS_TOL = 1e-9
AXIS_TOL = 1e-9
OVERFLOW_CAP = 1e300

# A word is a tuple of labels; the empty tuple is the empty word.
Word = tuple


def normalize_angle(theta: float) -> float:
    """Reduce an angle to [0, pi) with a single correction step.

    ``%`` may round up to the modulus itself for tiny negative inputs, hence
    the correction.
    """
    t = theta % PI
    if t >= PI:
        t -= PI
    return t


def angle_distance(t1: float, t2: float) -> float:
    """Distance on RP^1 = R/(pi Z): the shorter of the two arc gaps."""
    d = abs(normalize_angle(t1) - normalize_angle(t2))
    return min(d, PI - d)


@dataclass(frozen=True)
class ProjPoint:
    """A point of RP^1, stored as the angle of the line in [0, pi)."""

    theta: float

    def __post_init__(self):
        t = float(self.theta)
        if not math.isfinite(t):
            raise ValueError("projective angle must be finite")
        object.__setattr__(self, "theta", normalize_angle(t))

    def __float__(self) -> float:
        return self.theta


def as_angle(x) -> float:
    """Accept a ProjPoint or a bare angle and return the reduced angle."""
    return normalize_angle(float(x))


@dataclass(frozen=True)
class Mat2:
    """Real 2x2 matrix, row-major entries ``[[a, b], [c, d]]``."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        for v in (self.a, self.b, self.c, self.d):
            if not math.isfinite(v):
                raise ValueError("matrix entries must be finite")

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def rotation(cls, alpha: float) -> "Mat2":
        c, s = math.cos(alpha), math.sin(alpha)
        return cls(c, -s, s, c)

    @classmethod
    def diagonal(cls, x: float, y: float) -> "Mat2":
        return cls(x, 0.0, 0.0, y)

    @classmethod
    def from_rows(cls, rows) -> "Mat2":
        (a, b), (c, d) = rows
        return cls(float(a), float(b), float(c), float(d))

    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def trace(self) -> float:
        return self.a + self.d

    def frobenius(self) -> float:
        return math.sqrt(self.a ** 2 + self.b ** 2 + self.c ** 2 + self.d ** 2)

    def scaled(self, s: float) -> "Mat2":
        return Mat2(self.a * s, self.b * s, self.c * s, self.d * s)

    def inverse(self) -> "Mat2":
        det = self.det()
        if abs(det) <= 1e-14 * max(1.0, self.frobenius() ** 2):
            raise SingularMatrixError("matrix is numerically singular")
        return Mat2(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def to_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    def entries(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def is_unit_det(self, tol: float = DET_TOL) -> bool:
        return abs(self.det() - 1.0) <= tol


def op_norm22(a: float, b: float, c: float, d: float) -> float:
    """Largest singular value of [[a, b], [c, d]] in closed form."""
    p = a * a + c * c
    r = b * b + d * d
    q = a * b + c * d
    disc = math.hypot(p - r, 2.0 * q)
    return math.sqrt(0.5 * (p + r + disc))


def normalize_gl2(m: Mat2, det_tol: float = DET_TOL) -> tuple[Mat2, float]:
    """Scale a GL2 matrix to determinant +-1; returns (normalized, original det).

    Matrices already within ``det_tol`` of determinant 1 are kept verbatim so
    that exact rational inputs stay exact.
    """
    det = m.det()
    if abs(det) <= 1e-14 * max(1.0, m.frobenius() ** 2):
        raise SingularMatrixError("cannot normalize a singular matrix")
    if abs(det - 1.0) <= det_tol:
        return m, det
    return m.scaled(1.0 / math.sqrt(abs(det))), det


@dataclass(frozen=True)
class IfsSystem:
    """A labeled finite family of (normalized) 2x2 matrices, optionally weighted."""

    labels: tuple[str, ...]
    matrices: dict[str, Mat2]
    weights: tuple[float, ...] | None = None
    original_dets: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.labels:
            raise ValueError("a system needs at least one matrix")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("labels must be unique")
        for lab in self.labels:
            if lab not in self.matrices:
                raise ValueError(f"no matrix for label {lab!r}")
        if self.weights is not None:
            if len(self.weights) != len(self.labels):
                raise ValueError("weights must align with labels")
            if any(w <= 0.0 for w in self.weights):
                raise ValueError("weights must be strictly positive")
            if abs(sum(self.weights) - 1.0) > 1e-12:
                raise ValueError("weights must sum to 1")

    @classmethod
    def from_matrices(cls, pairs, weights=None, det_tol: float = DET_TOL) -> "IfsSystem":
        """Build a system from (label, matrix-like) pairs, normalizing GL2 inputs."""
        labels = []
        mats = {}
        dets = {}
        for lab, raw in pairs:
            lab = str(lab)
            m = raw if isinstance(raw, Mat2) else Mat2.from_rows(raw)
            norm, det = normalize_gl2(m, det_tol=det_tol)
            labels.append(lab)
            mats[lab] = norm
            dets[lab] = det
        w = tuple(float(x) for x in weights) if weights is not None else None
        return cls(tuple(labels), mats, w, dets)

    def matrix(self, label: str) -> Mat2:
        try:
            return self.matrices[label]
        except KeyError:
            raise UnknownLabelError(label) from None

    def mats_in_order(self) -> list[Mat2]:
        return [self.matrices[lab] for lab in self.labels]

    def size(self) -> int:
        return len(self.labels)


def word_product(
    system: IfsSystem,
    word,
    det_tol: float = DET_TOL,
    overflow_cap: float = OVERFLOW_CAP,
) -> Mat2:
    """Left-to-right product of the matrices named by ``word``.

    The empty word gives the identity.  Raises ProductOverflowError when an
    entry magnitude exceeds ``overflow_cap``; long hyperbolic words should use
    the normalized enumeration helpers instead.  Determinant drift is
    re-checked against ``det_tol`` relative to the product's magnitude.
    """
    acc = Mat2.identity()
    for sym in word:
        acc = acc @ system.matrix(sym)
        if max(abs(acc.a), abs(acc.b), abs(acc.c), abs(acc.d)) > overflow_cap:
            raise ProductOverflowError(
                f"product entries exceed {overflow_cap:g} after {len(word)} factors"
            )
    drift = abs(abs(acc.det()) - 1.0)
    if drift > det_tol * max(1.0, acc.frobenius() ** 2):
        raise ValueError(f"determinant drifted by {drift:g} along the product")
    return acc


def operator_norm(m: Mat2) -> float:
    """Largest singular value; for determinant +-1 this is always >= 1."""
    return op_norm22(m.a, m.b, m.c, m.d)


def contraction_axis(m: Mat2, axis_tol: float = AXIS_TOL) -> ProjPoint:
    """Angle of the most-contracted direction: the small singular direction.

    That is the eigenvector of A^T A for its smallest eigenvalue.  Undefined
    for matrices with norm <= 1 (isometries have no preferred axis).
    """
    p = m.a * m.a + m.c * m.c
    r = m.b * m.b + m.d * m.d
    q = m.a * m.b + m.c * m.d
    disc = math.hypot(p - r, 2.0 * q)
    lam_max = 0.5 * (p + r + disc)
    norm = math.sqrt(lam_max)
    if norm <= 1.0 + axis_tol:
        raise AxisUndefinedError(f"norm {norm!r} <= 1 + {axis_tol:g}: no contraction axis")
    # Small eigenvalue computed through the determinant to avoid cancellation.
    lam_min = (m.det() ** 2) / lam_max
    v1 = (q, lam_min - p)
    v2 = (lam_min - r, q)
    vx, vy = max(v1, v2, key=lambda v: v[0] * v[0] + v[1] * v[1])
    if vx == 0.0 and vy == 0.0:
        raise AxisUndefinedError("isotropic matrix has no contraction axis")
    return ProjPoint(math.atan2(vy, vx))


def project_act(m: Mat2, x) -> ProjPoint:
    """Image of a projective point under the matrix action."""
    t = as_angle(x)
    cx, sx = math.cos(t), math.sin(t)
    u = m.a * cx + m.b * sx
    v = m.c * cx + m.d * sx
    return ProjPoint(math.atan2(v, u))


def project_act_angle(m: Mat2, theta: float) -> float:
    """Same as :func:`project_act` on bare floats (no wrapper allocation)."""
    cx, sx = math.cos(theta), math.sin(theta)
    return normalize_angle(math.atan2(m.c * cx + m.d * sx, m.a * cx + m.b * sx))


def project_act_many(m: Mat2, thetas: np.ndarray) -> np.ndarray:
    """Vectorized projective action on an array of angles."""
    cx = np.cos(thetas)
    sx = np.sin(thetas)
    out = np.arctan2(m.c * cx + m.d * sx, m.a * cx + m.b * sx)
    out %= PI
    out[out >= PI] -= PI
    return out


def project_derivative(m: Mat2, x) -> float:
    """|phi_A'(theta)| = |det A| / ||A v(theta)||^2.

    For determinant +-1 atoms this lies in [||A||^-2, ||A||^2].
    """
    t = as_angle(x)
    cx, sx = math.cos(t), math.sin(t)
    u = m.a * cx + m.b * sx
    v = m.c * cx + m.d * sx
    return abs(m.det()) / (u * u + v * v)


def mobius_act(m: Mat2, x: float) -> float:
    """Linear fractional action (a x + b) / (c x + d) on R + {inf}.

    ``math.inf`` stands for the single point at infinity; poles map to it.
    """
    if math.isinf(x):
        if m.c == 0.0:
            return math.inf
        return m.a / m.c
    num = m.a * x + m.b
    den = m.c * x + m.d
    if den == 0.0:
        return math.inf
    return num / den


def chart_to_line(theta: float) -> float:
    """The chart psi(theta) = cos(theta)/sin(theta) conjugating the two actions."""
    t = normalize_angle(theta)
    s = math.sin(t)
    if s == 0.0:
        return math.inf
    return math.cos(t) / s


def line_to_chart(x: float) -> float:
    """Inverse of :func:`chart_to_line`; infinity corresponds to the angle 0."""
    if math.isinf(x):
        return 0.0
    return normalize_angle(math.atan2(1.0, x))


def classify(m: Mat2, det_tol: float = DET_TOL, class_tol: float = CLASS_TOL) -> str:
    """Classify a determinant-one matrix by |trace| against 2.

    Returns one of ``"elliptic"``, ``"parabolic"``, ``"hyperbolic"``.
    """
    if abs(m.det() - 1.0) > det_tol:
        raise ValueError("classification requires determinant 1 within tolerance")
    t = abs(m.trace())
    if t < 2.0 - class_tol:
        return "elliptic"
    if t > 2.0 + class_tol:
        return "hyperbolic"
    return "parabolic"
