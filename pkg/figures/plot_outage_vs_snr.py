#!/usr/bin/env python3
"""Render outage probability vs average SNR from one or more sweep CSVs.

Each input file becomes one curve; pass several files to overlay e.g.
different maximum transmission counts or codeword lengths. The outage
axis is logarithmic and always spans at least [1e-6, 1].
"""

import argparse
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from sweep_csv import SchemaError, finite_xy, load_sweep, require_kind

EXPECTED_KIND = "outage-vs-snr"


def build_parser():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv", nargs="+", help="sweep CSV file(s)")
    parser.add_argument("--output", "-o", required=True, help="image file to write")
    parser.add_argument("--dpi", type=int, default=150)
    parser.add_argument("--title", default=None)
    return parser


def render(tables, output, dpi=150, title=None):
    fig, ax = plt.subplots(figsize=(6.4, 4.6))
    dropped = []
    floor = 1e-6
    for data in tables:
        x, y = finite_xy(data.column(data.columns[0]), data.column("outage"))
        if not x:
            dropped.append(data.label())
            continue
        ax.semilogy(x, y, marker="o", markersize=3.5, label=data.label())
        floor = min(floor, min(v for v in y if v > 0) * 0.5) if any(v > 0 for v in y) else floor
    ax.set_xlabel("average SNR (dB)")
    ax.set_ylabel("outage probability")
    ax.set_ylim(floor, 1.0)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(frameon=False, fontsize=9)
    if title:
        ax.set_title(title)
    if dropped:
        ax.annotate("missing series: " + "; ".join(dropped),
                    xy=(0.02, 0.02), xycoords="axes fraction",
                    fontsize=8, color="crimson")
    fig.tight_layout()
    fig.savefig(output, dpi=dpi)
    plt.close(fig)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        tables = []
        for path in args.csv:
            data = load_sweep(path)
            require_kind(data, EXPECTED_KIND, "snr_db")
            tables.append(data)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    render(tables, args.output, dpi=args.dpi, title=args.title)
    print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
