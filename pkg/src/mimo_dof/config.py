"""Antenna configuration and CSIT quality exponents."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

EXP_TOL = 1e-12


class Kind(str, enum.Enum):
    BC = "bc"
    IC = "ic"


@dataclass(frozen=True)
class AntennaConfig:
    """Antenna counts of a symmetric two-user setting.

    ``m_tx`` is the number of antennas per transmitter and ``n_rx`` the number
    per receiver. All DoF formulas use ``m_eff = min(m_tx, 2 n_rx)``: extra
    transmit antennas beyond twice the receive count add no DoF.
    """

    m_tx: int
    n_rx: int
    kind: Kind = Kind.BC

    def __post_init__(self):
        for name in ("m_tx", "n_rx"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise ValidationError(f"{name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        object.__setattr__(self, "kind", Kind(self.kind))

    @property
    def m_eff(self) -> int:
        return min(self.m_tx, 2 * self.n_rx)

    @property
    def single_cap(self) -> int:
        """Per-user DoF cap ``min(M, N)``."""
        return min(self.m_tx, self.n_rx)

    @property
    def coop_cap(self) -> int:
        """Cooperative sum DoF ``min(M, 2N)`` appearing in the weighted bounds."""
        return min(self.m_tx, 2 * self.n_rx)

    @property
    def sum_cap(self) -> int:
        """Sum-DoF cap of the outer bound (and of the full-CSIT region)."""
        m, n = self.m_tx, self.n_rx
        if self.kind is Kind.IC:
            return min(2 * m, 2 * n, max(m, n))
        return min(m, 2 * n)

    @property
    def nocsit_sum(self) -> int:
        """Sum DoF without any CSIT."""
        m, n = self.m_tx, self.n_rx
        if self.kind is Kind.IC:
            return min(n, 2 * m)
        return min(m, n)

    @property
    def zf_dim(self) -> int:
        """Dimension of the zero-forcing subspace, ``(m_eff - N)^+``."""
        return max(self.m_eff - self.n_rx, 0)

    @property
    def needs_csit(self) -> bool:
        return self.zf_dim > 0


def _as_pair(values, name):
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.shape != (2,):
        raise ValidationError(f"{name} must hold exactly two values, got {values!r}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} must be finite, got {values!r}")
    return float(arr[0]), float(arr[1])


def _as_seq(values, name):
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != 2 or arr.shape[1] < 1:
        raise ValidationError(f"{name} must have shape (2, T), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} must be finite")
    return tuple(tuple(float(v) for v in row) for row in arr)


def _check_range(alpha, beta, where):
    a = np.asarray(alpha, dtype=float)
    b = np.asarray(beta, dtype=float)
    if np.any(a < -EXP_TOL) or np.any(b > 1 + EXP_TOL) or np.any(a > b + EXP_TOL):
        raise ValidationError(
            f"exponents must satisfy 0 <= alpha <= beta <= 1 ({where}): "
            f"alpha={a.tolist()}, beta={b.tolist()}"
        )


@dataclass(frozen=True)
class QualityExponents:
    """Current (alpha) and delayed (beta) CSIT quality exponents of both users.

    Averages are always present. Per-slot sequences are optional; when given
    they have shape ``(2, T)`` (row ``i`` belongs to user ``i + 1``) and
    their means must match the averages. Users are labelled so that
    ``alpha_avg[1] <= alpha_avg[0]``.
    """

    alpha_avg: tuple
    beta_avg: tuple
    alpha_seq: tuple | None = field(default=None, compare=False)
    beta_seq: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        alpha = _as_pair(self.alpha_avg, "alpha_avg")
        beta = _as_pair(self.beta_avg, "beta_avg")
        _check_range(alpha, beta, "averages")
        if alpha[1] > alpha[0] + EXP_TOL:
            raise ValidationError(
                f"users must be labelled so that alpha2 <= alpha1, got alpha={alpha}"
            )
        object.__setattr__(self, "alpha_avg", alpha)
        object.__setattr__(self, "beta_avg", beta)
        if (self.alpha_seq is None) != (self.beta_seq is None):
            raise ValidationError("alpha_seq and beta_seq must be given together")
        if self.alpha_seq is not None:
            a_seq = _as_seq(self.alpha_seq, "alpha_seq")
            b_seq = _as_seq(self.beta_seq, "beta_seq")
            if len(a_seq[0]) != len(b_seq[0]):
                raise ValidationError("alpha_seq and beta_seq must have the same length")
            _check_range(a_seq, b_seq, "per slot")
            for name, seq, avg in (("alpha", a_seq, alpha), ("beta", b_seq, beta)):
                means = np.mean(seq, axis=1)
                if np.max(np.abs(means - avg)) > 1e-9:
                    raise ValidationError(
                        f"{name}_seq means {means.tolist()} differ from {name}_avg {list(avg)}"
                    )
            object.__setattr__(self, "alpha_seq", a_seq)
            object.__setattr__(self, "beta_seq", b_seq)

    @classmethod
    def constant(cls, alpha=(1.0, 1.0), beta=(1.0, 1.0)) -> "QualityExponents":
        return cls(tuple(alpha), tuple(beta))

    @classmethod
    def from_sequences(cls, alpha_seq, beta_seq) -> "QualityExponents":
        a = np.asarray(alpha_seq, dtype=float)
        b = np.asarray(beta_seq, dtype=float)
        return cls(tuple(a.mean(axis=1)), tuple(b.mean(axis=1)), a, b)

    @property
    def min_beta(self) -> float:
        return min(self.beta_avg)

    @property
    def t_slots(self) -> int | None:
        return None if self.alpha_seq is None else len(self.alpha_seq[0])

    def slot_exponents(self, t_slots: int):
        """Per-slot ``(alpha, beta)`` arrays of shape ``(2, t_slots)``.

        Constant exponents are broadcast; stored sequences are tiled, so
        ``t_slots`` must be a multiple of their length.
        """
        if self.alpha_seq is None:
            a = np.repeat(np.asarray(self.alpha_avg)[:, None], t_slots, axis=1)
            b = np.repeat(np.asarray(self.beta_avg)[:, None], t_slots, axis=1)
            return a, b
        a = np.asarray(self.alpha_seq)
        b = np.asarray(self.beta_seq)
        if t_slots % a.shape[1]:
            raise ValidationError(
                f"t_slots={t_slots} is not a multiple of the sequence length {a.shape[1]}"
            )
        idx = np.arange(t_slots) % a.shape[1]
        return a[:, idx], b[:, idx]
