"""Build a phase plan for a corner point and print its bit ledger and per-slot exponents.

Run: python demos/plan_walkthrough.py
"""

from mimo_dof import AntennaConfig, QualityExponents, build_phase_plan


def main():
    cfg = AntennaConfig(3, 2, "ic")
    q = QualityExponents.from_sequences([[1.0, 0.6], [0.8, 0.8]], [[1.0, 1.0], [1.0, 1.0]])
    plan = build_phase_plan(cfg, q, "E*", t_slots=4)
    print(f"target E* -> delta_bar={plan.delta_bar:.3f}, omega={plan.omega:.3f}, "
          f"DoF point ({plan.dof_point[0]:.3f}, {plan.dof_point[1]:.3f})")
    print(f"last-phase loss factor: {plan.last_phase_loss:.3f}\n")
    print("bits per phase, in units of log2 P:")
    for k, v in plan.ledger().items():
        print(f"  {k:<12} {v:7.3f}")
    print("\nper-slot power exponents:")
    for row in plan.slot_rows():
        powers = "  ".join(f"{k[6:]}={v:.2f}" for k, v in row.items() if k.startswith("power_"))
        print(f"  slot {row['slot']}: delta=({row['delta_1']:.2f}, {row['delta_2']:.2f})  {powers}")


if __name__ == "__main__":
    main()
