"""Calibration of the phase-Markov scheme.

Everything here is exponent bookkeeping: which power exponents and
normalised rates each symbol gets, how many quantisation bits the
interference of one phase needs, and how the left-over common capacity is
split to land on a chosen corner point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import EXP_TOL, AntennaConfig, Kind, QualityExponents
from .errors import DeltaBarOutOfRange, Infeasible, TargetInactive, ValidationError
from .regions import Corner, corner_points

SEQ_TOL = 1e-9


def _pos(x):
    return np.maximum(x, 0.0)


def delta_bar_bound(cfg: AntennaConfig, q: QualityExponents) -> float:
    """Largest admissible mean power exponent of the private streams.

    Without a zero-forcing dimension (M <= N) the private streams are unused
    and the bound is 0.
    """
    if not cfg.needs_csit:
        return 0.0
    m, n = cfg.m_eff, cfg.n_rx
    a1, a2 = q.alpha_avg
    b1, b2 = q.beta_avg
    return float(min(1.0, b1, b2, n * (1 + a1 + a2) / (m + n), n * (1 + a2) / m))


def common_budget(cfg: AntennaConfig, delta_bar: float) -> float:
    """Prelog of the common symbols per slot, ``N - (M - N) * delta_bar``."""
    return cfg.nocsit_sum - cfg.zf_dim * delta_bar


def quant_budget(cfg: AntennaConfig, q: QualityExponents, delta_bar: float) -> float:
    a1, a2 = q.alpha_avg
    return cfg.n_rx * float(_pos(delta_bar - a1) + _pos(delta_bar - a2))


def delta_com(cfg: AntennaConfig, q: QualityExponents, delta_bar: float) -> float:
    """Common capacity left after carrying the quantised interference."""
    return common_budget(cfg, delta_bar) - quant_budget(cfg, q, delta_bar)


def private_prelogs(cfg: AntennaConfig, q: QualityExponents, delta_bar: float):
    """Per-slot prelogs of the private symbols of user 1 and user 2."""
    a1, a2 = q.alpha_avg
    zf, n = cfg.zf_dim, cfg.n_rx
    return (
        zf * delta_bar + n * float(_pos(delta_bar - a2)),
        zf * delta_bar + n * float(_pos(delta_bar - a1)),
    )


def _check_delta_bar(cfg, q, delta_bar):
    bound = delta_bar_bound(cfg, q)
    if not (-EXP_TOL <= delta_bar <= bound + SEQ_TOL):
        raise DeltaBarOutOfRange(f"delta_bar={delta_bar} outside [0, {bound}]")


def omega_range(cfg: AntennaConfig):
    """Admissible split weights.

    Normally ``[0, 1]``. An IC with ``M < N`` sends common symbols only and
    its sum DoF exceeds the per-user cap, so neither user may take it all.
    """
    s, cap = cfg.nocsit_sum, cfg.single_cap
    if cfg.needs_csit or s <= cap:
        return 0.0, 1.0
    return (s - cap) / s, cap / s


def general_dof_point(cfg: AntennaConfig, q: QualityExponents, delta_bar: float, omega: float):
    """DoF pair delivered by the scheme for power exponent ``delta_bar`` and split ``omega``."""
    _check_delta_bar(cfg, q, delta_bar)
    lo, hi = omega_range(cfg)
    if not lo - SEQ_TOL <= omega <= hi + SEQ_TOL:
        raise ValidationError(f"omega must lie in [{lo:.6g}, {hi:.6g}], got {omega}")
    p1, p2 = private_prelogs(cfg, q, delta_bar)
    dcom = delta_com(cfg, q, delta_bar)
    return (p1 + omega * dcom, p2 + (1.0 - omega) * dcom)


def calibrate(cfg: AntennaConfig, q: QualityExponents, target) -> tuple:
    """``(delta_bar, omega)`` that steer the scheme onto corner point ``target``."""
    label = Corner.parse(target)
    active = [p.label for p in corner_points(cfg, q)]
    if label not in active:
        raise TargetInactive(label.value, [a.value for a in active])
    if not cfg.needs_csit:
        # common-only transmission; omega time-shares the sum DoF
        s, cap = cfg.nocsit_sum, cfg.single_cap
        share = cap / s if label is Corner.DSTAR else (s - cap) / s
        return 0.0, float(share)
    m, n = cfg.m_eff, cfg.n_rx
    a1, a2 = q.alpha_avg
    bmin = q.min_beta
    settings = {
        Corner.ESTAR: (1.0, 0.0),
        Corner.FSTAR: (1.0, 1.0),
        Corner.BSTAR: (a2, 0.0),
        Corner.DSTAR: (a1, 1.0),
        Corner.CSTAR: (n * (1 + a1 + a2) / (m + n), 0.0),
        Corner.ASTAR: (n * (1 + a2) / m, 1.0),
        Corner.E: (bmin, 0.0),
        Corner.F: (bmin, 1.0),
        Corner.G: (bmin, 1.0),
    }
    delta_bar, omega = settings[label]
    return float(delta_bar), float(omega)


def delta_residuals(alpha, beta, delta, delta_bar):
    """Violations of the three per-slot allocation constraints for one user.

    Returns ``(cap, mean, excess)``: the largest ``delta_t - beta_t``, the
    error of the mean, and the error of the mean positive excess over alpha.
    """
    alpha, beta, delta = (np.asarray(x, dtype=float) for x in (alpha, beta, delta))
    cap = float(np.max(delta - beta))
    mean = abs(float(delta.mean()) - delta_bar)
    target = max(delta_bar - float(alpha.mean()), 0.0)
    excess = abs(float(_pos(delta - alpha).mean()) - target)
    return cap, mean, excess


def solve_delta_sequence(alpha, beta, delta_bar: float) -> np.ndarray:
    """Per-slot exponents ``delta_t`` for one user.

    Needs ``0 <= delta_t <= beta_t``, ``mean(delta) = delta_bar`` and
    ``mean((delta - alpha)^+) = (delta_bar - mean(alpha))^+``. The mean of
    positive parts only meets that target when every ``delta_t - alpha_t``
    has the same sign, so the solution interpolates towards ``beta`` when
    ``delta_bar >= mean(alpha)`` and scales ``alpha`` down otherwise.
    """
    alpha = np.asarray(alpha, dtype=float).reshape(-1)
    beta = np.asarray(beta, dtype=float).reshape(-1)
    if alpha.shape != beta.shape or alpha.size == 0:
        raise ValidationError("alpha and beta sequences must be non-empty and equally long")
    if delta_bar < -EXP_TOL:
        raise Infeasible(f"delta_bar={delta_bar} is negative")
    abar = alpha.mean()
    if delta_bar >= abar - SEQ_TOL:
        bad = np.flatnonzero(alpha > beta + EXP_TOL)
        if bad.size:
            raise Infeasible(
                f"delta_t <= beta_t conflicts with delta_t >= alpha_t at slots {bad.tolist()}"
            )
        bbar = beta.mean()
        if delta_bar > bbar + SEQ_TOL:
            raise Infeasible(
                f"delta_t <= beta_t caps the mean at {bbar:.6g} < delta_bar={delta_bar:.6g}"
            )
        span = bbar - abar
        lam = 0.0 if span < SEQ_TOL else min(max((delta_bar - abar) / span, 0.0), 1.0)
        delta = alpha + lam * (beta - alpha)
    else:
        cap = np.minimum(alpha, beta)
        cbar = cap.mean()
        if delta_bar > cbar + SEQ_TOL:
            raise Infeasible(
                f"delta_t <= min(alpha_t, beta_t) caps the mean at {cbar:.6g} "
                f"< delta_bar={delta_bar:.6g}"
            )
        delta = cap * (delta_bar / cbar) if cbar > 0 else np.zeros_like(cap)
    cap_err, mean_err, excess_err = delta_residuals(alpha, beta, delta, delta_bar)
    if cap_err > SEQ_TOL or mean_err > SEQ_TOL or excess_err > SEQ_TOL or delta.min() < -SEQ_TOL:
        raise Infeasible(
            f"constraint re-check failed: cap={cap_err:.3g}, mean={mean_err:.3g}, "
            f"excess={excess_err:.3g}"
        )
    return delta


def solve_delta_sequences(q: QualityExponents, delta_bar: float, t_slots: int | None = None):
    """``delta_t`` for both users, shape ``(2, T)``."""
    if t_slots is None:
        if q.t_slots is None:
            raise ValidationError("t_slots is required for constant exponents")
        t_slots = q.t_slots
    alpha, beta = q.slot_exponents(t_slots)
    return np.vstack([solve_delta_sequence(alpha[i], beta[i], delta_bar) for i in range(2)])


STREAMS = ("c", "a", "a_prime", "b", "b_prime")


@dataclass(frozen=True)
class PhasePlan:
    """Calibrated scheme parameters for one phase of ``t_slots`` slots.

    Per-slot tables are arrays of length ``t_slots``; ``power_table`` holds
    SNR exponents (the symbol power is ``~P**exponent``), ``rate_table``
    holds prelogs (bits ``~ prelog * log2 P``). Budgets are per slot.
    """

    cfg: AntennaConfig
    q: QualityExponents
    target: Corner | None
    t_slots: int
    s_phases: int
    delta_bar: float
    omega: float
    alpha_seq: np.ndarray = field(repr=False)
    beta_seq: np.ndarray = field(repr=False)
    delta_seq: np.ndarray = field(repr=False)
    power_table: dict = field(repr=False)
    rate_table: dict = field(repr=False)
    common_budget: float
    quant_budget: float
    delta_com: float
    ic_common_split: tuple | None
    residual: float

    @property
    def dof_point(self):
        return general_dof_point(self.cfg, self.q, self.delta_bar, self.omega)

    @property
    def private_prelogs(self):
        return private_prelogs(self.cfg, self.q, self.delta_bar)

    @property
    def last_phase_loss(self) -> float:
        return 1.0 / self.s_phases

    def ledger(self) -> dict:
        """Bits per phase (in units of ``log2 P``), mirroring the bit-summary table."""
        t = self.t_slots
        p1, p2 = self.private_prelogs
        out = {
            "private_1": t * p1,
            "private_2": t * p2,
            "common": t * self.common_budget,
            "quantized": t * self.quant_budget,
            "delta_com": t * self.delta_com,
        }
        if self.ic_common_split is not None:
            out["ic_common_1"] = t * self.ic_common_split[0]
            out["ic_common_2"] = t * self.ic_common_split[1]
        return out

    def slot_rows(self):
        """One dict per slot with the power exponents and prelogs of every stream."""
        rows = []
        for t in range(self.t_slots):
            row = {"slot": t, "delta_1": float(self.delta_seq[0, t]),
                   "delta_2": float(self.delta_seq[1, t])}
            for s in STREAMS:
                row[f"power_{s}"] = float(self.power_table[s][t])
                row[f"rate_{s}"] = float(self.rate_table[s][t])
            rows.append(row)
        return rows


def build_phase_plan(
    cfg: AntennaConfig,
    q: QualityExponents,
    target=None,
    t_slots: int = 16,
    s_phases: int = 50,
    *,
    delta_bar: float | None = None,
    omega: float | None = None,
) -> PhasePlan:
    """Assemble a :class:`PhasePlan` for a corner point or an explicit ``(delta_bar, omega)``."""
    if int(t_slots) != t_slots or t_slots < 1 or int(s_phases) != s_phases or s_phases < 1:
        raise ValidationError("t_slots and s_phases must be positive integers")
    t_slots, s_phases = int(t_slots), int(s_phases)
    label = None
    if target is not None:
        if delta_bar is not None or omega is not None:
            raise ValidationError("give either a target or (delta_bar, omega), not both")
        label = Corner.parse(target)
        delta_bar, omega = calibrate(cfg, q, label)
    elif delta_bar is None:
        raise ValidationError("a target or delta_bar is required")
    omega = 0.0 if omega is None else float(omega)
    delta_bar = float(delta_bar)
    # validates the range of delta_bar and omega
    general_dof_point(cfg, q, delta_bar, omega)

    alpha, beta = q.slot_exponents(t_slots)
    delta = np.vstack([solve_delta_sequence(alpha[i], beta[i], delta_bar) for i in range(2)])
    residual = max(max(delta_residuals(alpha[i], beta[i], delta[i], delta_bar)) for i in range(2))

    zf, n = cfg.zf_dim, cfg.n_rx
    cb = common_budget(cfg, delta_bar)
    power = {
        "c": np.ones(t_slots),
        "a": delta[1].copy(),
        "a_prime": delta[1] - alpha[1],
        "b": delta[0].copy(),
        "b_prime": delta[0] - alpha[0],
    }
    rate = {
        "c": np.full(t_slots, cb),
        "a": zf * delta[1],
        "a_prime": n * _pos(delta[1] - alpha[1]),
        "b": zf * delta[0],
        "b_prime": n * _pos(delta[0] - alpha[0]),
    }
    qb = quant_budget(cfg, q, delta_bar)
    dcom = cb - qb
    split = None
    if cfg.kind is Kind.IC:
        a1, a2 = q.alpha_avg
        split = (
            omega * dcom + n * max(delta_bar - a2, 0.0),
            (1.0 - omega) * dcom + n * max(delta_bar - a1, 0.0),
        )
    return PhasePlan(
        cfg=cfg, q=q, target=label, t_slots=t_slots, s_phases=s_phases,
        delta_bar=delta_bar, omega=omega, alpha_seq=alpha, beta_seq=beta, delta_seq=delta,
        power_table=power, rate_table=rate, common_budget=cb, quant_budget=qb,
        delta_com=dcom, ic_common_split=split, residual=residual,
    )
