#!/usr/bin/env python3
"""Produce the full report: run the CLI sweeps and render all four figures.

Talks to the primary package only through its command line, so the CSVs
land next to the rendered images and each figure can be regenerated from
its table alone. Runtime is dominated by the optimal-allocation sweeps;
the default quick grid takes a few minutes, --full several times that.
"""

import argparse
import subprocess
import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent


def cli(*args):
    cmd = [sys.executable, "-m", "arqpower", *map(str, args)]
    print("+", " ".join(cmd[2:]))
    subprocess.run(cmd, check=True)


def script(name, *args):
    cmd = [sys.executable, str(HERE / name), *map(str, args)]
    subprocess.run(cmd, check=True)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="out/report")
    parser.add_argument("--full", action="store_true",
                        help="finer grids and a wider SNR range")
    args = parser.parse_args(argv)
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)

    snr_step = 1 if args.full else 2
    snr_stop = 40
    length_stop = 1000 if args.full else 500

    # outage vs SNR for M = 1..3, optimal allocation (plus the uniform
    # baseline at M=2 for contrast)
    fig1_inputs = []
    for m in (1, 2, 3):
        path = out / f"outage_vs_snr_m{m}.csv"
        cli("sweep", "--kind", "outage-vs-snr", "--mode", "optimal", "-M", m,
            "--snr-start", 0, "--snr-stop", snr_stop, "--snr-step", snr_step,
            "--output", path)
        fig1_inputs.append(path)
    uniform_path = out / "outage_vs_snr_m2_uniform.csv"
    cli("sweep", "--kind", "outage-vs-snr", "--mode", "uniform", "-M", 2,
        "--snr-start", 0, "--snr-stop", snr_stop, "--snr-step", snr_step,
        "--output", uniform_path)
    script("plot_outage_vs_snr.py", *fig1_inputs, uniform_path,
           "-o", out / "fig_outage_vs_snr.png")

    # optimal powers vs SNR with the closed-form overlay
    powers_path = out / "powers_vs_snr_m2.csv"
    cli("sweep", "--kind", "powers-vs-snr", "--mode", "optimal", "-M", 2,
        "--snr-start", 0, "--snr-stop", snr_stop, "--snr-step", snr_step,
        "--output", powers_path)
    script("plot_powers_vs_snr.py", powers_path,
           "-o", out / "fig_powers_vs_snr.png")

    # outage and powers vs codeword length at 10 dB
    len_out = out / "outage_vs_length_m2.csv"
    cli("sweep", "--kind", "outage-vs-length", "--mode", "optimal", "-M", 2,
        "--snr-db", 10, "--length-start", 50, "--length-stop", length_stop,
        "--length-step", 50, "--output", len_out)
    script("plot_outage_vs_length.py", len_out,
           "-o", out / "fig_outage_vs_length.png")

    len_powers = out / "powers_vs_length_m2.csv"
    cli("sweep", "--kind", "powers-vs-length", "--mode", "optimal", "-M", 2,
        "--snr-db", 10, "--length-start", 50, "--length-stop", length_stop,
        "--length-step", 50, "--output", len_powers)
    script("plot_powers_vs_length.py", len_powers,
           "-o", out / "fig_powers_vs_length.png")

    print(f"report written under {out}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
