"""Plot study.csv from one or more run directories on log-log axes.

usage: python plot_study.py RUN_DIR [RUN_DIR ...] [-o out.png]
"""
import argparse
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

ERROR_COLUMNS = ("error", "error_l2", "mse_linf")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("runs", nargs="+", type=pathlib.Path)
    parser.add_argument("-o", "--output", default="study.png")
    args = parser.parse_args()

    fig, ax = plt.subplots(figsize=(5, 4))
    for run in args.runs:
        table = pd.read_csv(run / "study.csv")
        if "level" in table:  # fem-check: error against mesh width
            x, y, xlabel = table["h"], table["error_l2"], "h"
        else:
            column = next(c for c in ERROR_COLUMNS if c in table)
            y = table[column] ** 0.5 if column == "mse_linf" else table[column]
            x, xlabel = table["work_units"], "work units"
        slopes = dict(line.split() for line in (run / "slope.txt").read_text().splitlines())
        label = f"{run.name} (fit {float(slopes['fitted_slope']):.2f}, predicted {float(slopes['predicted_slope']):.2f})"
        ax.loglog(x, y, "o-", label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("error")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)


if __name__ == "__main__":
    main()
