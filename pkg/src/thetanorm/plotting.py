"""Figures for CLI reports.  Every function writes one file and returns its path."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "figure.figsize": (6.4, 4.0),
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 150,
}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_genus_comparison(r, r_gen, path, title: str = "") -> Path:
    """r(Q, n) against r(gen Q, n), with the difference underneath."""
    r = np.asarray(r, dtype=float)
    r_gen = np.asarray(r_gen, dtype=float)
    n = np.arange(len(r))
    with plt.rc_context(STYLE):
        fig, (top, bot) = plt.subplots(2, 1, sharex=True, gridspec_kw={"height_ratios": [3, 1]})
        top.plot(n, r, ".", ms=3, label="r(Q, n)")
        top.plot(n, r_gen, "-", lw=0.8, label="r(gen Q, n)")
        top.set_ylabel("count")
        top.legend(frameon=False)
        if title:
            top.set_title(title)
        bot.plot(n, r - r_gen, ".", ms=2, color="C3")
        bot.axhline(0, color="0.5", lw=0.5)
        bot.set_xlabel("n")
        bot.set_ylabel("difference")
        return _save(fig, path)


def plot_majorant(tau: float, beta3: float, zeta_star: float, m_star: float, path) -> Path:
    from .sieve import m_of_zeta

    zs = np.geomspace(1e-3, beta3 * 0.99, 600)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.plot(zs, m_of_zeta(zs, tau, beta3), lw=1)
        ax.plot([zeta_star], [m_star], "o", color="C3")
        ax.annotate(f"m({zeta_star:.7f}) = {m_star:.4f}", (zeta_star, m_star),
                    textcoords="offset points", xytext=(10, 10))
        ax.set_xscale("log")
        ax.set_xlabel("zeta")
        ax.set_ylabel("m(zeta)")
        ax.set_ylim(m_star - 5, m_star + 60)
        return _save(fig, path)


def plot_survey(survey: dict, path) -> Path:
    ns = sorted(k for k, v in survey.items() if "min_Omega" in v)
    vals = np.array([survey[k]["min_Omega"] for k in ns])
    with plt.rc_context(STYLE):
        fig, (left, right) = plt.subplots(1, 2, figsize=(8, 3.2))
        left.plot(ns, vals, ".", ms=2)
        left.set_xlabel("n")
        left.set_ylabel("min Omega(x1 x2 x3)")
        counts = np.bincount(vals) if len(vals) else np.zeros(1)
        right.bar(np.arange(len(counts)), counts, color="C2")
        right.set_xlabel("min Omega")
        right.set_ylabel("number of n")
        return _save(fig, path)


def plot_bound_terms(report: dict, path) -> Path:
    """Horizontal bars for each term of a bound report trace."""
    trace = {k: v for k, v in report.get("trace", {}).items() if isinstance(v, (int, float))}
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        names = list(trace)
        ax.barh(range(len(names)), [trace[k] for k in names], color="C0")
        ax.set_yticks(range(len(names)), names)
        ax.set_xlabel("value")
        ax.set_title(f"{report.get('kind', '')}: {report.get('value', float('nan')):.6g}")
        if names and min(trace.values()) > 0 and max(trace.values()) / min(trace.values()) > 1e3:
            ax.set_xscale("log")
        return _save(fig, path)


def plot_norm_bracket(value: float, lower: float | None, upper: float | None, path,
                      label: str = "<f, f>") -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6.4, 2.4))
        pts = [("estimate", value, "C0")]
        if lower is not None:
            pts.append(("lower bound", lower, "C2"))
        if upper is not None:
            pts.append(("upper bound", upper, "C3"))
        for name, v, col in pts:
            ax.plot([max(v, 1e-300)], [0], "o", color=col, label=f"{name} = {v:.3g}")
        ax.set_xscale("log")
        ax.set_yticks([])
        ax.set_xlabel(label)
        ax.legend(frameon=False, loc="upper left", fontsize=8)
        return _save(fig, path)


def plot_magnitudes(mags, reference, path) -> Path:
    mags = np.asarray(mags, dtype=float)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        n = np.arange(len(mags))
        ax.plot(n, mags, "o", ms=4, label="|a(n)| extracted")
        if reference is not None:
            ax.plot(n, reference, "x", ms=5, label="reference")
        ax.set_xlabel("n")
        ax.set_ylabel("|a(n)|")
        ax.legend(frameon=False)
        return _save(fig, path)


def plot_densities(ps, betas, path, title: str = "") -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.bar([str(p) for p in ps], [float(b) for b in betas], color="C1")
        ax.axhline(1, color="0.5", lw=0.5)
        ax.set_xlabel("p")
        ax.set_ylabel("beta_p")
        if title:
            ax.set_title(title)
        return _save(fig, path)


def plot_acceptance(results: list[dict], path) -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6.4, 3.0))
        nums = [r["criterion"] for r in results]
        secs = [max(r["seconds"], 1e-3) for r in results]
        cols = ["C2" if r["passed"] else "C3" for r in results]
        ax.bar([str(k) for k in nums], secs, color=cols)
        ax.set_yscale("log")
        ax.set_xlabel("criterion (green pass, red fail)")
        ax.set_ylabel("seconds")
        return _save(fig, path)

