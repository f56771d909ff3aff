#!/usr/bin/env python3
"""Detection-significance contours from a `ttspin significance` CSV:
number of standard deviations from the null hypothesis D = -1/3 over the
(upper mass cut, relative uncertainty) plane, with the 5-sigma discovery
level drawn explicitly.

    python figures/fig_significance.py --in sig.csv --out fig.png
"""

import argparse
import sys

import numpy as np

import schema

REQUIRED = ("m_max", "rel_unc", "d", "n_delta")
CONTOUR_LEVELS = (1.0, 2.0, 3.0, 5.0, 10.0, 20.0)
DISCOVERY_LEVEL = 5.0


def load(path):
    cols, meta = schema.read_csv(path, "ttspin significance v1", REQUIRED)
    m_vals = np.unique(cols["m_max"])
    u_vals = np.unique(cols["rel_unc"])
    if len(m_vals) * len(u_vals) != len(cols["n_delta"]):
        raise schema.SchemaMismatch(f"{path}: grid is not rectangular")
    grid = cols["n_delta"].reshape(len(m_vals), len(u_vals))
    return m_vals, u_vals, grid, meta


def render(in_path, out_path):
    schema.style()
    import matplotlib.pyplot as plt

    m_vals, u_vals, grid, _ = load(in_path)
    fig, ax = plt.subplots(figsize=(5.2, 4.0), constrained_layout=True)
    filled = ax.contourf(m_vals, u_vals * 100.0, grid.T, levels=20, cmap="viridis")
    fig.colorbar(filled, ax=ax, label="$n_\\Delta$")
    levels = [lv for lv in CONTOUR_LEVELS if grid.min() < lv < grid.max()]
    if DISCOVERY_LEVEL not in levels and grid.max() > DISCOVERY_LEVEL:
        levels.append(DISCOVERY_LEVEL)
    lines = ax.contour(m_vals, u_vals * 100.0, grid.T, levels=sorted(levels), colors="w", linewidths=0.8)
    ax.clabel(lines, fmt="%g", fontsize=7)
    ax.set_xlabel("upper mass cut [GeV]")
    ax.set_ylabel("relative uncertainty [%]")
    ax.set_title("deviation from the null hypothesis $D = -1/3$")
    fig.savefig(out_path, metadata=schema.SAVE_METADATA)
    plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--in", dest="in_path", required=True)
    parser.add_argument("--out", dest="out_path", required=True)
    args = parser.parse_args(argv)
    try:
        render(args.in_path, args.out_path)
    except (schema.SchemaMismatch, FileNotFoundError) as exc:
        print(f"fig_significance: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
