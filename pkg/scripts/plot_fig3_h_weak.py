#!/usr/bin/env python3
"""Incentive function h(gamma) under weak protection (q=0.1)."""

import numpy as np
import matplotlib.pyplot as plt

data = np.genfromtxt("data/fig3_h_weak.csv", delimiter=",", names=True, skip_header=1)
plt.plot(data["gamma"], data["h"])
plt.xlabel("fraction secure, gamma")
plt.ylabel("h(gamma)")
plt.tight_layout()
plt.savefig("fig3_h_weak.png", dpi=150)
print("wrote fig3_h_weak.png")
