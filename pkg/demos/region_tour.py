"""Walk through the DoF regions for a 3x2 broadcast channel as CSIT quality changes.

Run: python demos/region_tour.py
"""

from mimo_dof import (
    AntennaConfig,
    QualityExponents,
    corner_points,
    inner_region,
    outer_region,
    region_case,
    region_equal,
    sufficient_delayed_threshold,
)


def show(cfg, q):
    inner, outer = inner_region(cfg, q), outer_region(cfg, q)
    print(f"alpha={q.alpha_avg} beta={q.beta_avg}  case: {region_case(cfg, q)}")
    print(f"  delayed-CSIT threshold {sufficient_delayed_threshold(cfg, q):.3f}, "
          f"inner == outer: {region_equal(inner, outer)}")
    print(f"  max sum DoF: inner {inner.max_sum():.3f}, outer {outer.max_sum():.3f}")
    for p in corner_points(cfg, q):
        print(f"    {p.label.value:>2} = ({p.d1:.3f}, {p.d2:.3f})")


def main():
    cfg = AntennaConfig(3, 2)
    print(f"{cfg.kind.value.upper()} with M={cfg.m_tx}, N={cfg.n_rx}\n")
    # sweep current quality with good delayed feedback, then degrade the feedback
    for a in (0.0, 0.5, 0.8, 1.0):
        show(cfg, QualityExponents.constant((a, a), (1, 1)))
    print("\nweak delayed feedback caps the symmetric point:")
    show(cfg, QualityExponents.constant((0.2, 0.2), (0.5, 0.5)))


if __name__ == "__main__":
    main()
