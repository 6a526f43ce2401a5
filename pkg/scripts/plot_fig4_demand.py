#!/usr/bin/env python3
"""Demand curve w(gamma) and the equilibrium correspondence over cost c.

The roots of w(gamma)=c trace the willingness-to-pay curve sideways; the
middle branch is the unstable critical mass.
"""

import csv

import numpy as np
import matplotlib.pyplot as plt

curve = np.genfromtxt("data/fig3_h_weak.csv", delimiter=",", names=True, skip_header=1)
plt.plot(curve["gamma"], curve["h"], "k-", label="w(gamma) = ell*h(gamma), ell=1")

with open("data/fig4_equilibria.csv") as fh:
    rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
header, rows = rows[0], rows[1:]
for row in rows:
    rec = dict(zip(header, row))
    c = float(rec["c"])
    for key, style in (("gamma_star_low", "g."), ("gamma_star_mid", "rx"),
                       ("gamma_star_high", "b.")):
        if rec[key]:
            plt.plot(float(rec[key]), c, style, markersize=3)
plt.xlabel("fraction secure, gamma")
plt.ylabel("cost c")
plt.legend()
plt.tight_layout()
plt.savefig("fig4_demand.png", dpi=150)
print("wrote fig4_demand.png")
