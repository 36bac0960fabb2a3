"""Command-line front end: ``mimo-dof region|plan|simulate``.

Exit codes: 0 success, 2 invalid input, 3 plan cannot be built, 4 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .config import AntennaConfig, Kind, QualityExponents
from .errors import InsufficientLadder, PlanError, ValidationError
from .plan import build_phase_plan
from .regions import (
    Baseline,
    baseline_region,
    corner_points,
    delayed_csit_sufficient,
    inner_region,
    outer_region,
    region_case,
    sufficient_delayed_threshold,
)
from .sim import simulate_dof

OUT_DIR_ENV = "MIMO_DOF_OUT_DIR"
EXIT_OK, EXIT_INVALID, EXIT_PLAN, EXIT_RUNTIME = 0, 2, 3, 4

VERTEX_COLUMNS = ("region", "vertex_index", "d1", "d2")
HALFPLANE_COLUMNS = ("region", "label", "a", "b", "c", "redundant")
LEDGER_COLUMNS = ("unit", "private_1", "private_2", "common", "quantized", "delta_com",
                  "ic_common_1", "ic_common_2")


@dataclass
class RunConfig:
    """Everything a command needs; loadable from flags or a JSON file."""

    kind: str = "bc"
    m: int = 3
    n: int = 2
    alpha: list = field(default_factory=lambda: [1.0, 1.0])
    beta: list = field(default_factory=lambda: [1.0, 1.0])
    alpha_seq: list | None = None
    beta_seq: list | None = None
    target: str | None = None
    delta_bar: float | None = None
    omega: float | None = None
    t_slots: int = 16
    s_phases: int = 50
    snr: list = field(default_factory=lambda: [1e3, 1e4, 1e5, 1e6])
    trials: int = 50
    seed: int = 0
    backoff_bits: float | None = None
    eta: int = 1
    out_dir: str | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValidationError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)

    def antenna(self) -> AntennaConfig:
        return AntennaConfig(self.m, self.n, Kind(self.kind))

    def quality(self) -> QualityExponents:
        if self.alpha_seq is not None or self.beta_seq is not None:
            if self.alpha_seq is None or self.beta_seq is None:
                raise ValidationError("alpha_seq and beta_seq must be given together")
            return QualityExponents.from_sequences(self.alpha_seq, self.beta_seq)
        return QualityExponents.constant(tuple(self.alpha), tuple(self.beta))

    def output_dir(self) -> Path:
        path = Path(self.out_dir or os.environ.get(OUT_DIR_ENV) or "mimo_dof_out")
        path.mkdir(parents=True, exist_ok=True)
        return path


def _write_csv(path: Path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: row.get(k, "") for k in columns})


def _write_json(path: Path, obj):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def cmd_region(rc: RunConfig) -> dict:
    cfg, q = rc.antenna(), rc.quality()
    regions = [inner_region(cfg, q), outer_region(cfg, q),
               baseline_region(cfg, Baseline.FULL_CSIT), baseline_region(cfg, Baseline.NO_CSIT)]
    out = rc.output_dir()
    vrows, hrows = [], []
    for reg in regions:
        for i, (d1, d2) in enumerate(reg.vertices):
            vrows.append({"region": reg.name, "vertex_index": i, "d1": repr(float(d1)),
                          "d2": repr(float(d2))})
        for hp, red in zip(reg.halfplanes, reg.redundant):
            hrows.append({"region": reg.name, "label": hp.label, "a": repr(hp.a),
                          "b": repr(hp.b), "c": repr(hp.c), "redundant": int(red)})
    _write_csv(out / "region_vertices.csv", VERTEX_COLUMNS, vrows)
    _write_csv(out / "region_halfplanes.csv", HALFPLANE_COLUMNS, hrows)
    summary = {
        "command": "region",
        "config": rc.to_dict(),
        "case": region_case(cfg, q),
        "threshold": sufficient_delayed_threshold(cfg, q),
        "delayed_csit_sufficient": bool(delayed_csit_sufficient(cfg, q)),
        "corner_points": [{"label": p.label.value, "d1": p.d1, "d2": p.d2}
                          for p in corner_points(cfg, q)],
        "max_sum": {reg.name: reg.max_sum() for reg in regions},
    }
    _write_json(out / "region_summary.json", summary)
    return summary


def cmd_plan(rc: RunConfig) -> dict:
    cfg, q = rc.antenna(), rc.quality()
    plan = build_phase_plan(cfg, q, rc.target, rc.t_slots, rc.s_phases,
                            delta_bar=rc.delta_bar, omega=rc.omega)
    out = rc.output_dir()
    ledger = plan.ledger()
    per_phase = {k: ledger[k] for k in ledger}
    per_slot = {k: v / plan.t_slots for k, v in ledger.items()}
    _write_csv(out / "plan_ledger.csv", LEDGER_COLUMNS, [
        {"unit": "per_slot", **{k: repr(float(v)) for k, v in per_slot.items()}},
        {"unit": "per_phase", **{k: repr(float(v)) for k, v in per_phase.items()}},
    ])
    rows = plan.slot_rows()
    _write_csv(out / "plan_slots.csv", tuple(rows[0]), rows)
    summary = {
        "command": "plan",
        "config": rc.to_dict(),
        "target": None if plan.target is None else plan.target.value,
        "delta_bar": plan.delta_bar,
        "omega": plan.omega,
        "dof_point": list(plan.dof_point),
        "ledger_per_slot": per_slot,
        "ic_common_split": None if plan.ic_common_split is None else list(plan.ic_common_split),
        "residual": plan.residual,
        "last_phase_loss": plan.last_phase_loss,
    }
    _write_json(out / "plan_summary.json", summary)
    return summary


def cmd_simulate(rc: RunConfig) -> dict:
    cfg, q = rc.antenna(), rc.quality()
    report = simulate_dof(cfg, q, rc.target, rc.snr, rc.trials, rc.seed,
                          t_slots=rc.t_slots, s_phases=rc.s_phases,
                          backoff_bits=rc.backoff_bits, eta=rc.eta,
                          delta_bar=rc.delta_bar, omega=rc.omega)
    out = rc.output_dir()
    (out / "sim_rates.csv").write_text(report.to_csv())
    summary = {"command": "simulate", "config": rc.to_dict(), **report.to_dict()}
    _write_json(out / "sim_report.json", summary)
    return summary


COMMANDS = {"region": cmd_region, "plan": cmd_plan, "simulate": cmd_simulate}

# flag dest -> RunConfig field
_FLAG_FIELDS = ("kind", "m", "n", "alpha", "beta", "target", "delta_bar", "omega", "t_slots",
                "s_phases", "snr", "trials", "seed", "backoff_bits", "eta", "out_dir")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mimo-dof",
        description="DoF regions, scheme plans and finite-SNR simulations for the "
                    "two-user MIMO BC/IC with imperfect current and delayed CSIT.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="JSON file with RunConfig keys")
        p.add_argument("--kind", choices=[k.value for k in Kind])
        p.add_argument("--m", type=int, help="antennas per transmitter")
        p.add_argument("--n", type=int, help="antennas per receiver")
        p.add_argument("--alpha", type=float, nargs=2, metavar=("A1", "A2"))
        p.add_argument("--beta", type=float, nargs=2, metavar=("B1", "B2"))
        p.add_argument("--target", help="corner point label, e.g. C* or Cstar")
        p.add_argument("--delta-bar", dest="delta_bar", type=float)
        p.add_argument("--omega", type=float)
        p.add_argument("--T", dest="t_slots", type=int, help="slots per phase")
        p.add_argument("--S", dest="s_phases", type=int, help="phases per chain")
        p.add_argument("--snr", type=float, nargs="+", help="linear SNR ladder")
        p.add_argument("--trials", type=int, help="phases per SNR point")
        p.add_argument("--seed", type=int)
        p.add_argument("--backoff-bits", dest="backoff_bits", type=float)
        p.add_argument("--eta", type=int, help="feedback delay in slots")
        p.add_argument("--out-dir", dest="out_dir",
                       help=f"output directory (default: ${OUT_DIR_ENV} or ./mimo_dof_out)")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the ``--config`` file, then explicit flags."""
    data = {}
    if args.config is not None:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config file {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ValidationError("config file must hold a JSON object")
    rc = RunConfig.from_dict(data)
    for name in _FLAG_FIELDS:
        value = getattr(args, name)
        if value is not None:
            setattr(rc, name, list(value) if isinstance(value, (list, tuple)) else value)
    return rc


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rc = resolve_config(args)
        summary = COMMANDS[args.command](rc)
    except (ValidationError, InsufficientLadder, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except PlanError as exc:
        print(f"plan error: {exc}", file=sys.stderr)
        return EXIT_PLAN
    except Exception as exc:  # noqa: BLE001 - last-resort mapping to the runtime exit code
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(json.dumps({k: summary[k] for k in summary if k in (
        "command", "case", "threshold", "target", "delta_bar", "omega", "dof_point",
        "d1_hat", "d2_hat", "stderr")}))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
