"""DoF region polytopes and their corner points.

Regions are kept in two forms at once: a list of half-planes
``a*d1 + b*d2 <= c`` and the counter-clockwise vertex list obtained by
pairwise intersection. With at most eight half-planes the O(k^3)
enumeration is exact enough and easy to audit.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np

from .config import EXP_TOL, AntennaConfig, Kind, QualityExponents
from .errors import ValidationError

GEOM_TOL = 1e-9


@dataclass(frozen=True)
class HalfPlane:
    """Constraint ``a*d1 + b*d2 <= c``."""

    a: float
    b: float
    c: float
    label: str = ""

    def __post_init__(self):
        vals = (self.a, self.b, self.c)
        if not all(np.isfinite(v) for v in vals):
            raise ValidationError(f"half-plane coefficients must be finite: {vals}")
        if self.a == 0 and self.b == 0:
            raise ValidationError("half-plane normal (a, b) must be nonzero")

    def slack(self, point) -> float:
        return self.c - (self.a * point[0] + self.b * point[1])


@dataclass(frozen=True)
class DofRegion:
    name: str
    halfplanes: tuple
    vertices: np.ndarray
    redundant: tuple

    @classmethod
    def from_halfplanes(cls, halfplanes, name: str = "") -> "DofRegion":
        hps = tuple(halfplanes)
        verts = enumerate_vertices(hps)
        if len(verts) < 3:
            raise ValidationError(f"region {name!r} is degenerate (vertices={verts.tolist()})")
        redundant = tuple(
            int(np.sum(np.abs([hp.slack(v) for v in verts]) <= GEOM_TOL)) < 2 for hp in hps
        )
        return cls(name, hps, verts, redundant)

    def halfplane(self, label: str) -> HalfPlane:
        for hp in self.halfplanes:
            if hp.label == label:
                return hp
        raise KeyError(label)

    def active_halfplanes(self):
        return [hp for hp, red in zip(self.halfplanes, self.redundant) if not red]

    def max_sum(self) -> float:
        return float(np.max(self.vertices.sum(axis=1)))

    def tight_labels(self, point, tol: float = GEOM_TOL):
        return [hp.label for hp in self.halfplanes if abs(hp.slack(point)) <= tol]


def enumerate_vertices(halfplanes) -> np.ndarray:
    """Vertices of a bounded 2-D polytope, counter-clockwise, deduplicated."""
    pts = []
    for h1, h2 in itertools.combinations(halfplanes, 2):
        det = h1.a * h2.b - h1.b * h2.a
        if abs(det) < 1e-14:
            continue
        # Cramer's rule for the 2x2 intersection
        p = np.array([h1.c * h2.b - h1.b * h2.c, h1.a * h2.c - h1.c * h2.a]) / det
        if all(hp.slack(p) >= -GEOM_TOL for hp in halfplanes):
            if not any(np.hypot(*(p - q)) < GEOM_TOL for q in pts):
                pts.append(p)
    if not pts:
        return np.zeros((0, 2))
    pts = np.array(pts) + 0.0  # drop negative zeros
    centre = pts.mean(axis=0)
    order = np.argsort(np.arctan2(pts[:, 1] - centre[1], pts[:, 0] - centre[0]))
    return pts[order]


def region_contains(region: DofRegion, point, tol: float = GEOM_TOL) -> bool:
    return all(hp.slack(point) >= -tol for hp in region.halfplanes)


def region_equal(r1: DofRegion, r2: DofRegion, tol: float = GEOM_TOL) -> bool:
    """Equality through mutual vertex containment."""
    return all(region_contains(r2, v, tol) for v in r1.vertices) and all(
        region_contains(r1, v, tol) for v in r2.vertices
    )


def _nonneg():
    return [HalfPlane(-1.0, 0.0, 0.0, "d1>=0"), HalfPlane(0.0, -1.0, 0.0, "d2>=0")]


def _caps(cap):
    return [HalfPlane(1.0, 0.0, float(cap), "d1<=cap"), HalfPlane(0.0, 1.0, float(cap), "d2<=cap")]


def _weighted_bounds(cfg: AntennaConfig, q: QualityExponents):
    m, k = cfg.single_cap, cfg.coop_cap
    # for the IC the receiver sees two transmitters, so the unweighted term is
    # min(N, 2M)/min(M, N) rather than 1; both coincide whenever M >= N
    lead = cfg.nocsit_sum / m
    gain = (k - m) / k
    a1, a2 = q.alpha_avg
    return [
        HalfPlane(1.0 / m, 1.0 / k, lead + gain * a1, "L2"),
        HalfPlane(1.0 / k, 1.0 / m, lead + gain * a2, "L1"),
    ]


def outer_region(cfg: AntennaConfig, q: QualityExponents) -> DofRegion:
    """Outer bound: single-user caps, sum cap and the two CSIT-weighted bounds."""
    hps = _nonneg() + _caps(cfg.single_cap)
    hps.append(HalfPlane(1.0, 1.0, float(cfg.sum_cap), "sum"))
    hps += _weighted_bounds(cfg, q)
    return DofRegion.from_halfplanes(hps, "outer")


def sufficient_delayed_threshold(cfg: AntennaConfig, q: QualityExponents) -> float:
    """Smallest ``min(beta1, beta2)`` for which the outer bound is achievable."""
    m, n = cfg.m_eff, cfg.n_rx
    a1, a2 = q.alpha_avg
    return float(min(
        1.0,
        m - min(m, n),
        n * (1 + a1 + a2) / (m + n),
        n * (1 + a2) / m,
    ))


def delayed_csit_sufficient(cfg: AntennaConfig, q: QualityExponents) -> bool:
    return q.min_beta >= sufficient_delayed_threshold(cfg, q) - EXP_TOL


def inner_region(cfg: AntennaConfig, q: QualityExponents) -> DofRegion:
    """Achievable region; equals the outer bound under sufficient delayed CSIT."""
    outer = outer_region(cfg, q)
    if delayed_csit_sufficient(cfg, q):
        return DofRegion(outer.name.replace("outer", "inner"), outer.halfplanes,
                         outer.vertices, outer.redundant)
    extra = cfg.nocsit_sum + (cfg.coop_cap - cfg.single_cap) * q.min_beta
    hps = list(outer.halfplanes) + [HalfPlane(1.0, 1.0, float(extra), "delayed_sum")]
    return DofRegion.from_halfplanes(hps, "inner")


class Baseline(str, enum.Enum):
    FULL_CSIT = "full"
    NO_CSIT = "nocsit"


def baseline_region(cfg: AntennaConfig, mode) -> DofRegion:
    mode = Baseline(mode)
    m, n = cfg.m_tx, cfg.n_rx
    if mode is Baseline.FULL_CSIT:
        hps = _nonneg() + _caps(cfg.single_cap) + [HalfPlane(1.0, 1.0, float(cfg.sum_cap), "sum")]
    elif cfg.kind is Kind.BC:
        hps = _nonneg() + [HalfPlane(1.0, 1.0, float(min(m, n)), "sum")]
    else:
        hps = _nonneg() + _caps(cfg.single_cap) + [HalfPlane(1.0, 1.0, float(min(n, 2 * m)), "sum")]
    return DofRegion.from_halfplanes(hps, f"baseline_{mode.value}")


class Corner(str, enum.Enum):
    ASTAR = "A*"
    BSTAR = "B*"
    CSTAR = "C*"
    DSTAR = "D*"
    ESTAR = "E*"
    FSTAR = "F*"
    E = "E"
    F = "F"
    G = "G"

    @classmethod
    def parse(cls, text) -> "Corner":
        if isinstance(text, cls):
            return text
        s = str(text).strip()
        if s.lower().endswith("star"):
            s = s[:-4] + "*"
        s = s[:1].upper() + s[1:]
        try:
            return cls(s)
        except ValueError:
            raise ValidationError(f"unknown corner point label {text!r}") from None


@dataclass(frozen=True)
class CornerPoint:
    label: Corner
    d1: float
    d2: float

    @property
    def xy(self):
        return (self.d1, self.d2)


CASE_CORNERS = {
    "no CSIT needed": (Corner.DSTAR, Corner.BSTAR),
    "case 1": (Corner.DSTAR, Corner.BSTAR, Corner.ESTAR, Corner.FSTAR),
    "case 2": (Corner.DSTAR, Corner.BSTAR, Corner.CSTAR),
    "case 3": (Corner.BSTAR, Corner.ASTAR),
    "case 4a": (Corner.DSTAR, Corner.BSTAR, Corner.E, Corner.F),
    "case 4b": (Corner.BSTAR, Corner.E, Corner.G),
    "case 4c": (Corner.BSTAR, Corner.E, Corner.G),
}


def _cases(cfg, q, tol):
    """Case labels whose defining inequalities hold, with ties widened by ``tol``."""
    if not cfg.needs_csit:
        return ["no CSIT needed"]
    m, n = cfg.m_eff, cfg.n_rx
    a1, a2 = q.alpha_avg
    bmin = q.min_beta
    thr = sufficient_delayed_threshold(cfg, q)
    a1_lim = n * (1 + a2) / m

    beta_suf = bmin >= thr - tol
    beta_not = bmin < thr + tol
    a1_cond = a1 < a1_lim + tol
    a1_not = a1 >= a1_lim - tol
    a12_cond = a1 + a2 > m / n - tol
    a12_not = a1 + a2 <= m / n + tol
    ba_suf = bmin >= a1 - tol
    ba_not = bmin < a1 + tol

    out = []
    if beta_suf and a1_cond and a12_cond:
        out.append("case 1")
    if beta_suf and a1_cond and a12_not:
        out.append("case 2")
    if beta_suf and a1_not:
        out.append("case 3")
    if beta_not and a1_cond and ba_suf:
        out.append("case 4a")
    if beta_not and a1_cond and ba_not:
        out.append("case 4b")
    if beta_not and a1_not:
        out.append("case 4c")
    return out


def region_case(cfg: AntennaConfig, q: QualityExponents) -> str:
    """The single case label selected by the strict inequalities."""
    return _cases(cfg, q, 0.0)[0]


def corner_coordinates(cfg: AntennaConfig, q: QualityExponents) -> dict:
    """Closed-form coordinates of every labelled point (active or not)."""
    a1, a2 = q.alpha_avg
    bmin = q.min_beta
    if not cfg.needs_csit:
        cap, s = cfg.single_cap, cfg.nocsit_sum
        return {Corner.DSTAR: (cap, s - cap), Corner.BSTAR: (s - cap, cap)}
    m, n = cfg.m_eff, cfg.n_rx
    k = m * n / (m + n)
    return {
        Corner.ASTAR: (n, (m - n) * n * (1 + a2) / m),
        Corner.BSTAR: ((m - n) * a2, n),
        Corner.CSTAR: (k * (1 + a1 - n / m * a2), k * (1 + a2 - n / m * a1)),
        Corner.DSTAR: (n, (m - n) * a1),
        Corner.ESTAR: (m - n * a2, n * a2),
        Corner.FSTAR: (n * a1, m - n * a1),
        Corner.E: (m * bmin - n * a2, n * a2 + n * (1 - bmin)),
        Corner.F: (n * a1 + n * (1 - bmin), m * bmin - n * a1),
        Corner.G: (n, (m - n) * bmin),
    }


def corner_points(cfg: AntennaConfig, q: QualityExponents, tie_tol: float = EXP_TOL):
    """Active labelled corner points for the case selected by ``(cfg, q)``.

    When a case inequality holds with equality the neighbouring case is
    merged in; coincident points (closer than 1e-9) keep the label seen first.
    """
    coords = corner_coordinates(cfg, q)
    strict = region_case(cfg, q)
    cases = [strict] + [c for c in _cases(cfg, q, tie_tol) if c != strict]
    points = []
    for case in cases:
        for label in CASE_CORNERS[case]:
            if any(p.label is label for p in points):
                continue
            x, y = coords[label]
            if any(np.hypot(p.d1 - x, p.d2 - y) < GEOM_TOL for p in points):
                continue
            points.append(CornerPoint(label, float(x), float(y)))
    return points
