#!/usr/bin/env python3
"""Optimal GL security investment x*(v) for loss=10, alpha in {0.5, 1, 1.5}."""

import numpy as np
import matplotlib.pyplot as plt

for alpha, color in (("0.5", "red"), ("1", "green"), ("1.5", "brown")):
    data = np.genfromtxt(f"data/fig1_alpha{alpha}.csv", delimiter=",", names=True, skip_header=1)
    plt.plot(data["v"], data["x_star"], color=color, label=f"alpha={alpha}")
plt.xlabel("vulnerability v")
plt.ylabel("optimal investment x*")
plt.legend()
plt.tight_layout()
plt.savefig("fig1_investment.png", dpi=150)
print("wrote fig1_investment.png")
