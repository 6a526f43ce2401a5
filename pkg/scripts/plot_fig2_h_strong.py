#!/usr/bin/env python3
"""Incentive function h(gamma) under strong protection (q=0)."""

import numpy as np
import matplotlib.pyplot as plt

data = np.genfromtxt("data/fig2_h_strong.csv", delimiter=",", names=True, skip_header=1)
plt.plot(data["gamma"], data["h"])
plt.xlabel("fraction secure, gamma")
plt.ylabel("h(gamma)")
plt.tight_layout()
plt.savefig("fig2_h_strong.png", dpi=150)
print("wrote fig2_h_strong.png")
