"""Plot fidelity and Mandel Q from the CSVs written by run_fig1.py.

Needs the ``plot`` extra (matplotlib).  Usage: python scripts/plot_fig1.py [--out DIR]
"""
import argparse
import csv

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from fockslice import experiments as ex


def read(path):
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    return {k: [float(r[k]) for r in rows] for k in rows[0]}


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--out", default=None)
    args = p.parse_args()
    out = ex.output_dir(args.out)
    fig, (ax_f, ax_q) = plt.subplots(1, 2, figsize=(10, 4))
    for cfg in ex.fig1_configs():
        d = read(out / f"{cfg.name}.csv")
        ax_f.semilogx(d["tau"], d["fidelity"], label=cfg.name)
        if cfg.kind == "fock_protection":
            ax_q.semilogx(d["tau"], d["mandel_q"], label=cfg.name)
    ax_f.set_xlabel("gamma t")
    ax_f.set_ylabel("fidelity")
    ax_q.set_xlabel("gamma t")
    ax_q.set_ylabel("Mandel Q")
    for ax in (ax_f, ax_q):
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out / "fig1.png", dpi=150)
    print(out / "fig1.png")


if __name__ == "__main__":
    main()
