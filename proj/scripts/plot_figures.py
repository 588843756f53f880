#!/usr/bin/env python3
"""Plot the CSV outputs of the lpmrl CLI.

Usage: plot_figures.py <output dir> [--save <dir>]

Any of landscape.csv, bandit.csv, portfolio_frontier.csv and
consumption_curves.csv found in the output directory is plotted.
"""

import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd


def landscape(df, save):
    n = int(round(np.sqrt(len(df))))
    grid = df.sort_values(["theta1", "theta2"])
    t = grid["theta1"].to_numpy().reshape(n, n)[:, 0]
    surfaces = {
        "E[G] - Var[G]": (grid["mean_exact"] - grid["var_exact"]).to_numpy().reshape(n, n),
        "E[G] - LPM[G | 0]": (grid["mean_exact"] - grid["lpm0_exact"]).to_numpy().reshape(n, n),
    }
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), constrained_layout=True)
    for ax, (title, z) in zip(axes, surfaces.items()):
        im = ax.contourf(t, t, z.T, levels=30, cmap="viridis")
        ax.set_xlabel("theta1")
        ax.set_ylabel("theta2")
        ax.set_title(title)
        fig.colorbar(im, ax=ax)
    fig.savefig(save / "landscape.png", dpi=150)


def bandit(df, save):
    fig, axes = plt.subplots(1, df["objective"].nunique(), figsize=(12, 3.5), sharey=True, constrained_layout=True)
    for ax, (name, g) in zip(np.atleast_1d(axes), df.groupby("objective", sort=False)):
        for col, label in (("p_a", "A"), ("p_b", "B"), ("p_c", "C")):
            ax.plot(g["samples"], g[col], label=label)
        ax.set_title(name)
        ax.set_xlabel("samples")
    np.atleast_1d(axes)[0].set_ylabel("mean action probability")
    np.atleast_1d(axes)[0].legend()
    fig.savefig(save / "bandit.png", dpi=150)


def frontier(df, save):
    df = df.assign(nu=df["nu"].astype(float))
    fig, ax = plt.subplots(figsize=(5, 4), constrained_layout=True)
    sc = ax.scatter(df["lpm_return"], df["mean_return"], c=df["nu"], cmap="plasma")
    means = df.groupby("nu")[["lpm_return", "mean_return"]].mean()
    ax.plot(means["lpm_return"], means["mean_return"], "k--", lw=1)
    ax.set_xlabel("centralised LPM of return")
    ax.set_ylabel("mean return")
    fig.colorbar(sc, ax=ax, label="nu")
    fig.savefig(save / "portfolio_frontier.png", dpi=150)


def consumption(df, save):
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), constrained_layout=True)
    for nu, g in df.groupby("nu", sort=False):
        curve = g.groupby("episode")[["j_r_smooth", "j_c_smooth"]].mean()
        axes[0].plot(curve.index, curve["j_r_smooth"], label=f"nu={nu}")
        axes[1].plot(curve.index, curve["j_c_smooth"], label=f"nu={nu}")
        if np.isfinite(float(nu)):
            axes[1].axhline(float(nu), ls=":", color="grey")
    axes[0].set_ylabel("J_R (smoothed)")
    axes[1].set_ylabel("J_C (smoothed)")
    for ax in axes:
        ax.set_xlabel("episode")
        ax.legend()
    fig.savefig(save / "consumption.png", dpi=150)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("out", type=Path)
    parser.add_argument("--save", type=Path)
    args = parser.parse_args()
    save = args.save or args.out
    save.mkdir(parents=True, exist_ok=True)
    plots = {
        "landscape.csv": landscape,
        "bandit.csv": bandit,
        "portfolio_frontier.csv": frontier,
        "consumption_curves.csv": consumption,
    }
    for name, plot in plots.items():
        path = args.out / name
        if path.exists():
            plot(pd.read_csv(path), save)
            print(f"plotted {path}")


if __name__ == "__main__":
    main()
