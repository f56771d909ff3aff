#!/usr/bin/env python3
"""Mass-dependence panels from `ttspin avg` and `ttspin window` CSVs:
direction-averaged correlations, their concurrence, the windowed
correlations with the D = -1/3 entanglement limit, and the windowed
concurrence with the accumulated cross-section.

    python figures/fig_window.py --avg avg.csv --window window.csv --out fig.png
"""

import argparse
import sys

import schema

AVG_REQUIRED = ("m", "cperp_qq", "cz_qq", "cperp_gg", "cz_gg", "conc_gg",
                "cperp_mixed", "cz_mixed", "conc_mixed")
WINDOW_REQUIRED = ("m_max", "sigma_pb", "c_perp", "c_z", "d", "concurrence")


def render(avg_path, window_path, out_path):
    schema.style()
    import matplotlib.pyplot as plt

    avg, _ = schema.read_csv(avg_path, "ttspin avg v1", AVG_REQUIRED)
    win, _ = schema.read_csv(window_path, "ttspin window v1", WINDOW_REQUIRED)

    fig, axes = plt.subplots(2, 2, figsize=(8.0, 6.0), constrained_layout=True)

    ax = axes[0, 0]
    ax.plot(avg["m"], avg["cperp_mixed"], "b-", label="$C_\\perp$")
    ax.plot(avg["m"], avg["cz_mixed"], "g--", label="$C_z$")
    ax.set_title("direction-averaged correlations (pp mixture)")
    ax.set_xlabel("invariant mass [GeV]")
    ax.legend()

    ax = axes[0, 1]
    ax.plot(avg["m"], avg["conc_mixed"], "b-", label="pp mixture")
    ax.plot(avg["m"], avg["conc_gg"], "r--", label="gluon fusion")
    ax.set_title("concurrence of the averaged state")
    ax.set_xlabel("invariant mass [GeV]")
    ax.legend()

    ax = axes[1, 0]
    ax.plot(win["m_max"], win["c_perp"], "b-", label="$C_\\perp$")
    ax.plot(win["m_max"], win["c_z"], "g--", label="$C_z$")
    ax.plot(win["m_max"], win["d"], "r-.", label="$D$")
    ax.axhline(-1.0 / 3.0, color="k", lw=0.8)
    ax.set_title("window-integrated correlations")
    ax.set_xlabel("upper mass cut [GeV]")
    ax.legend()

    ax = axes[1, 1]
    ax.plot(win["m_max"], win["concurrence"], "b-")
    ax.set_title("window-integrated concurrence")
    ax.set_xlabel("upper mass cut [GeV]")
    inset = ax.inset_axes([0.45, 0.45, 0.5, 0.5])
    inset.plot(win["m_max"], win["sigma_pb"], "k-")
    inset.set_title("$\\sigma$ [pb]", fontsize=7)
    inset.tick_params(labelsize=6)

    fig.savefig(out_path, metadata=schema.SAVE_METADATA)
    plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--avg", required=True)
    parser.add_argument("--window", required=True)
    parser.add_argument("--out", dest="out_path", required=True)
    args = parser.parse_args(argv)
    try:
        render(args.avg, args.window, args.out_path)
    except (schema.SchemaMismatch, FileNotFoundError) as exc:
        print(f"fig_window: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
