#!/usr/bin/env python3
"""Plot one or more planar orbit CSVs (t, w, v) from `quatsync orbit`.

Usage: plot_orbit.py ring.csv [ring_ring1.csv ...] [-o out.png]
"""
import argparse

import matplotlib.pyplot as plt
import numpy as np

ap = argparse.ArgumentParser()
ap.add_argument("csv", nargs="+")
ap.add_argument("-o", "--out", default="orbit.png")
args = ap.parse_args()

fig, ax = plt.subplots(figsize=(5, 5))
for path in args.csv:
    t, w, v = np.loadtxt(path, delimiter=",", skiprows=1, unpack=True)
    ax.plot(w, v, lw=1, label=path)
ax.set_xlabel("w")
ax.set_ylabel("v")
ax.legend(fontsize=7)
fig.savefig(args.out, dpi=160, bbox_inches="tight")
print(args.out)
