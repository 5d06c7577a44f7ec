#!/usr/bin/env python3
"""Plot ruin probabilities from a `ruinlab table` CSV.

Produces one curve pair per claim distribution: estimated ruin probability
against initial capital, solid without investment and dashed with the
clamped optimal fraction, with 95% error bars from the reported standard
errors.

Usage:
    ruinlab table --config configs/long_horizon_table.cfg --out table.csv
    python scripts/plot_table.py table.csv [out.png]
"""

import csv
import sys
from collections import defaultdict

try:
    import matplotlib
except ImportError:
    sys.exit("matplotlib is required: pip install matplotlib")
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def main() -> None:
    if len(sys.argv) not in (2, 3):
        sys.exit(__doc__)
    csv_path = sys.argv[1]
    out_path = sys.argv[2] if len(sys.argv) == 3 else "table.png"

    by_dist = defaultdict(list)
    with open(csv_path, newline="") as fh:
        for row in csv.DictReader(fh):
            by_dist[row["dist"]].append(row)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for color, (dist, rows) in zip(colors, sorted(by_dist.items())):
        rows.sort(key=lambda r: float(r["x"]))
        x = [float(r["x"]) for r in rows]
        for column, style, label in (
            ("no_invest", "-", f"{dist} (no investment)"),
            ("invest", "--", f"{dist} (optimal fraction)"),
        ):
            psi = [float(r[f"psi_{column}"]) for r in rows]
            err = [1.96 * float(r[f"se_{column}"]) for r in rows]
            ax.errorbar(x, psi, yerr=err, fmt=style, color=color, label=label, capsize=3)

    ax.set_xlabel("initial capital x")
    ax.set_ylabel("estimated ruin probability")
    ax.set_ylim(bottom=0)
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    print(f"wrote {out_path}")


if __name__ == "__main__":
    main()
