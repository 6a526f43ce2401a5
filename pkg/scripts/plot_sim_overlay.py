#!/usr/bin/env python3
"""Mean-field breach probabilities vs Monte-Carlo estimates."""

import numpy as np
import matplotlib.pyplot as plt

curve = np.genfromtxt("data/fig3_h_weak.csv", delimiter=",", names=True, skip_header=1)
plt.plot(curve["gamma"], curve["p0"], "b-", label="p(0, gamma) mean field")
plt.plot(curve["gamma"], curve["p1"], "g-", label="p(1, gamma) mean field")

# sim_overlay.csv carries no comment line, just the CSV header
sim = np.genfromtxt("data/sim_overlay.csv", delimiter=",", names=True)
plt.errorbar(sim["gamma"], sim["p0_hat"], yerr=3 * sim["stderr0"], fmt="bo",
             label="p0 simulated")
plt.errorbar(sim["gamma"], sim["p1_hat"], yerr=3 * sim["stderr1"], fmt="gs",
             label="p1 simulated")
plt.xlabel("fraction secure, gamma")
plt.ylabel("breach probability")
plt.legend()
plt.tight_layout()
plt.savefig("sim_overlay.png", dpi=150)
print("wrote sim_overlay.png")
