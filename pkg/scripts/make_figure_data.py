#!/usr/bin/env python3
"""Emit the CSV data behind every figure via the secgame CLI.

Writes into --outdir (default data/):
  fig1_alpha{0.5,1,1.5}.csv   optimal GL investment x*(v), loss=10
  fig2_h_strong.csv           mean-field curves, lambda=10 q+=0.5 p=0.01 q=0
  fig3_h_weak.csv             same with q=0.1
  fig4_equilibria.csv         equilibrium correspondence over a cost sweep
                              (homogeneous types, weak protection)
  sim_overlay.csv             Monte-Carlo estimates at gamma in {0,...,1}
                              (use --full for the n=10^5, 20-replication run)

Each file is produced by one CLI invocation, so rerunning the script
reproduces them byte-for-byte.
"""

import argparse
import pathlib
import subprocess
import sys

WEAK = ["--lam", "10", "--p", "0.01", "--q", "0.1", "--q-plus", "0.5"]
STRONG = ["--lam", "10", "--p", "0.01", "--q", "0", "--q-plus", "0.5"]


def cli(args, out_path):
    cmd = [sys.executable, "-m", "secgame"] + args + ["--out", str(out_path)]
    subprocess.run(cmd, check=True)
    print(f"wrote {out_path}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="data")
    parser.add_argument("--full", action="store_true",
                        help="full-size simulation (n=100000, 20 replications)")
    args = parser.parse_args()
    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    for alpha in ("0.5", "1", "1.5"):
        cli(["invest", "--family", "gl", "--alpha", alpha, "--loss", "10",
             "--v-grid", "0.001:0.999:0.002"],
            outdir / f"fig1_alpha{alpha}.csv")

    cli(["epidemic"] + STRONG, outdir / "fig2_h_strong.csv")
    cli(["epidemic"] + WEAK, outdir / "fig3_h_weak.csv")

    cli(["equilibrium"] + WEAK + ["--types", "homogeneous:1.0",
                                  "--sweep-c", "0.05:0.6:0.005"],
        outdir / "fig4_equilibria.csv")

    n, reps = ("100000", "20") if args.full else ("20000", "5")
    sim_rows = []
    for gamma in ("0", "0.25", "0.5", "0.75", "1"):
        out = outdir / f"_sim_gamma{gamma}.csv"
        cli(["simulate"] + WEAK + ["--n", n, "--gamma", gamma,
                                   "--replications", reps, "--seed", "20120712",
                                   "--format", "csv"], out)
        lines = out.read_text().strip().splitlines()
        if not sim_rows:
            sim_rows.append(lines[1])
        sim_rows.append(lines[2])
        out.unlink()
    overlay = outdir / "sim_overlay.csv"
    overlay.write_text("\n".join(sim_rows) + "\n")
    print(f"wrote {overlay}")


if __name__ == "__main__":
    main()
