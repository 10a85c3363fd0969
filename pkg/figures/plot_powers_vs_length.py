#!/usr/bin/env python3
"""Render per-round transmit powers vs codeword length from sweep CSVs.

One curve per transmission round per file, at the fixed SNR recorded in
the table metadata.
"""

import argparse
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from sweep_csv import SchemaError, finite_xy, load_sweep, require_kind

EXPECTED_KIND = "powers-vs-length"


def build_parser():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv", nargs="+", help="sweep CSV file(s)")
    parser.add_argument("--output", "-o", required=True, help="image file to write")
    parser.add_argument("--dpi", type=int, default=150)
    parser.add_argument("--title", default=None)
    return parser


def render(tables, output, dpi=150, title=None):
    fig, ax = plt.subplots(figsize=(6.4, 4.6))
    notes = []
    for data in tables:
        lengths = data.column("length")
        for i, col in enumerate(data.power_columns, start=1):
            x, y = finite_xy(lengths, data.column(col))
            if not x:
                notes.append(f"{data.label()} round {i} empty")
                continue
            ax.plot(x, y, marker="o", markersize=3.5,
                    label=f"P{i} ({data.label(with_mode=False)})")
    ax.set_xlabel("codeword length (channel uses)")
    ax.set_ylabel("round power (dB)")
    ax.grid(True, alpha=0.3)
    ax.legend(frameon=False, fontsize=8)
    if title:
        ax.set_title(title)
    if notes:
        ax.annotate("; ".join(notes), xy=(0.02, 0.02), xycoords="axes fraction",
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
            require_kind(data, EXPECTED_KIND, "length")
            tables.append(data)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    render(tables, args.output, dpi=args.dpi, title=args.title)
    print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
