#!/usr/bin/env python3
"""Quiver plot of a vector-field CSV (w, v, wdot, vdot) from
`quatsync equilibria --field`.

Usage: plot_field.py field.csv [-o out.png]
"""
import argparse

import matplotlib.pyplot as plt
import numpy as np

ap = argparse.ArgumentParser()
ap.add_argument("csv")
ap.add_argument("-o", "--out", default="field.png")
args = ap.parse_args()

w, v, dw, dv = np.loadtxt(args.csv, delimiter=",", skiprows=1, unpack=True)
mag = np.hypot(dw, dv) + 1e-300
fig, ax = plt.subplots(figsize=(7, 4))
ax.quiver(w, v, dw / mag, dv / mag, mag, cmap="viridis", scale=50, width=2e-3)
ax.set_xlabel("w")
ax.set_ylabel("v")
fig.savefig(args.out, dpi=160, bbox_inches="tight")
print(args.out)
