"""Synthetic fading channels with imperfect current and delayed CSIT.

The true channel is split as ``H = H_hat + E_c`` with independent parts of
variance ``1 - P**-alpha`` and ``P**-alpha``, so the current estimate is
uncorrelated with its own error. The delayed estimate is ``H - E_d`` with
an independent ``E_d`` of variance ``P**-beta``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import stats

from .config import AntennaConfig, Kind, QualityExponents
from .errors import InsufficientSamples, ValidationError

# link name -> (row of the exponent tables, or None for a direct IC link)
BC_LINKS = {"1": 0, "2": 1}
# cross link H12 (transmitter 2 -> receiver 1) is what user-1 feedback describes
IC_LINKS = {"11": None, "12": 0, "21": 1, "22": None}


def link_names(kind: Kind):
    return tuple(BC_LINKS if Kind(kind) is Kind.BC else IC_LINKS)


@dataclass(frozen=True)
class ChannelSlot:
    """One slot of true channels and their estimates, keyed by link name.

    BC links are ``"1"`` and ``"2"`` (transmitter to receiver ``i``); IC links
    are ``"ij"`` (transmitter ``j`` to receiver ``i``). Each matrix is ``N x M``.
    The delayed estimates become available at slot ``available_at``.
    """

    h_true: dict
    h_current: dict
    h_delayed: dict
    slot_index: int
    snr: float
    available_at: int


def crandn(rng, shape, var=1.0):
    """Circularly-symmetric complex Gaussian samples of variance ``var``."""
    scale = np.sqrt(np.asarray(var, dtype=float) / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def _seed_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def generate_block(
    cfg: AntennaConfig,
    q: QualityExponents,
    t_slots: int,
    snr: float,
    seed,
    *,
    eta: int = 1,
    start_slot: int = 0,
):
    """Generate ``t_slots`` consecutive slots of channels and CSIT estimates.

    Parameters
    ----------
    seed
        Anything accepted by ``numpy.random.default_rng`` (an int or a
        sequence of ints), or a ``Generator`` to draw from directly.
    eta
        Feedback delay in slots; must be smaller than ``t_slots``.
    """
    if not snr > 1:
        raise ValidationError(f"snr must exceed 1, got {snr}")
    if int(t_slots) != t_slots or t_slots < 1:
        raise ValidationError(f"t_slots must be a positive integer, got {t_slots}")
    if int(eta) != eta or not 0 <= eta < t_slots:
        raise ValidationError(f"eta must satisfy 0 <= eta < t_slots, got eta={eta}")
    rng = _seed_rng(seed)
    alpha, beta = q.slot_exponents(int(t_slots))
    n, m = cfg.n_rx, cfg.m_tx
    links = BC_LINKS if cfg.kind is Kind.BC else IC_LINKS
    block = []
    for t in range(int(t_slots)):
        true, cur, dly = {}, {}, {}
        for name, row in links.items():
            a = 0.0 if row is None else alpha[row, t]
            b = 0.0 if row is None else beta[row, t]
            ec_var = snr ** (-a)
            h_hat = crandn(rng, (n, m), 1.0 - ec_var)
            h = h_hat + crandn(rng, (n, m), ec_var)
            true[name] = h
            cur[name] = h_hat
            dly[name] = h - crandn(rng, (n, m), snr ** (-b))
        idx = start_slot + t
        block.append(ChannelSlot(true, cur, dly, idx, float(snr), idx + int(eta)))
    return block


def measured_exponent(samples, snr_ladder, *, squared: bool = False) -> float:
    """Least-squares slope of ``-log(mean squared error)`` against ``log P``.

    Parameters
    ----------
    samples
        One array of error samples per SNR point. Complex or real entries are
        squared in magnitude unless ``squared`` says they already are.
    snr_ladder
        Linear SNR values, one per entry of ``samples``.
    """
    ladder = np.asarray(snr_ladder, dtype=float).reshape(-1)
    if len(samples) != ladder.size:
        raise ValidationError("one sample array is needed per SNR point")
    if ladder.size < 2:
        raise InsufficientSamples(f"need at least 2 SNR points, got {ladder.size}")
    mse = []
    for s in samples:
        s = np.asarray(s).reshape(-1)
        if s.size < 1000:
            raise InsufficientSamples(f"need at least 1000 samples per SNR point, got {s.size}")
        mse.append(np.mean(s.real if squared else np.abs(s) ** 2))
    fit = stats.linregress(np.log(ladder), -np.log(mse))
    return float(fit.slope)


def save_block(path, block, cfg: AntennaConfig, q: QualityExponents, seed) -> None:
    """Write a block to ``.npz`` with a JSON header describing how it was made."""
    if not block:
        raise ValidationError("cannot save an empty block")
    header = {
        "kind": cfg.kind.value,
        "m_tx": cfg.m_tx,
        "n_rx": cfg.n_rx,
        "alpha_avg": list(q.alpha_avg),
        "beta_avg": list(q.beta_avg),
        "alpha_seq": None if q.alpha_seq is None else [list(r) for r in q.alpha_seq],
        "beta_seq": None if q.beta_seq is None else [list(r) for r in q.beta_seq],
        "seed": seed if isinstance(seed, int) else list(np.asarray(seed).tolist()),
        "snr": block[0].snr,
        "slot_index": [s.slot_index for s in block],
        "available_at": [s.available_at for s in block],
        "links": list(block[0].h_true),
    }
    arrays = {"header": np.array(json.dumps(header))}
    for field in ("h_true", "h_current", "h_delayed"):
        for name in header["links"]:
            arrays[f"{field}/{name}"] = np.stack([getattr(s, field)[name] for s in block])
    with open(Path(path), "wb") as fh:
        np.savez(fh, **arrays)


def load_block(path):
    """Inverse of :func:`save_block`; returns ``(block, cfg, q, header)``."""
    with np.load(Path(path), allow_pickle=False) as data:
        header = json.loads(str(data["header"]))
        stacks = {k: data[k] for k in data.files if k != "header"}
    cfg = AntennaConfig(header["m_tx"], header["n_rx"], Kind(header["kind"]))
    q = QualityExponents(
        tuple(header["alpha_avg"]), tuple(header["beta_avg"]),
        header["alpha_seq"], header["beta_seq"],
    )
    block = []
    for t, (idx, avail) in enumerate(zip(header["slot_index"], header["available_at"])):
        fields = {
            f: {name: stacks[f"{f}/{name}"][t] for name in header["links"]}
            for f in ("h_true", "h_current", "h_delayed")
        }
        block.append(ChannelSlot(slot_index=idx, snr=header["snr"], available_at=avail, **fields))
    return block, cfg, q, header
