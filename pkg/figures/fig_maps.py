#!/usr/bin/env python3
"""Phase-space map panels from a `ttspin map` CSV: concurrence heatmaps
per channel and mixed, the differential cross-section, and the critical
separability boundaries overlaid on the gluon panels.

    python figures/fig_maps.py --in map.csv --out fig_maps.png
"""

import argparse
import sys

import numpy as np

import schema


REQUIRED = (
    "m", "theta", "beta", "conc_qq", "conc_gg", "conc_mixed",
    "dsigma_dm_dtheta", "beta_c1", "beta_c2", "m_c1", "m_c2",
)


def load(path):
    cols, meta = schema.read_csv(path, "ttspin map v1", REQUIRED)
    thetas = np.unique(cols["theta"])
    masses = np.unique(cols["m"])
    shape = (len(thetas), len(masses))
    if shape[0] * shape[1] != len(cols["m"]):
        raise schema.SchemaMismatch(f"{path}: grid is not rectangular")
    grids = {
        key: cols[key].reshape(shape)
        for key in ("conc_qq", "conc_gg", "conc_mixed", "dsigma_dm_dtheta")
    }
    boundary = {
        "theta": thetas,
        "m_c1": cols["m_c1"].reshape(shape)[:, 0],
        "m_c2": cols["m_c2"].reshape(shape)[:, 0],
    }
    return masses, thetas, grids, boundary, meta


def render(in_path, out_path):
    matplotlib = schema.style()
    import matplotlib.pyplot as plt

    masses, thetas, grids, boundary, meta = load(in_path)
    fig, axes = plt.subplots(2, 2, figsize=(8.0, 6.0), constrained_layout=True)
    panels = [
        ("conc_gg", "gluon fusion: concurrence", True),
        ("conc_qq", "quark annihilation: concurrence", False),
        ("conc_mixed", "pp mixture: concurrence", True),
        ("dsigma_dm_dtheta", "d$\\sigma$/dM d$\\Theta$ [pb/GeV/rad]", False),
    ]
    for ax, (key, title, overlay) in zip(axes.ravel(), panels):
        mesh = ax.pcolormesh(masses, thetas, grids[key], shading="nearest", cmap="viridis")
        fig.colorbar(mesh, ax=ax)
        if overlay:
            for curve in ("m_c1", "m_c2"):
                mask = (boundary[curve] >= masses[0]) & (boundary[curve] <= masses[-1])
                ax.plot(boundary[curve][mask], boundary["theta"][mask], "k-", lw=1.2)
        ax.set_title(title)
        ax.set_xlabel("invariant mass [GeV]")
        ax.set_ylabel("production angle [rad]")
    fig.suptitle(f"spin-state maps (table: {meta.get('table', '?')})")
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
        print(f"fig_maps: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
