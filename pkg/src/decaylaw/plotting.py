"""Figures written next to the delimited output (``--plot PATH``)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_RC = {
    "font.size": 10,
    "axes.labelsize": 11,
    "axes.linewidth": 0.8,
    "lines.linewidth": 1.2,
    "legend.frameon": False,
    "savefig.dpi": 150,
}


def _figure():
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6.0, 3.8))
    return fig, ax


def _save(fig, path):
    fig.tight_layout()
    # no timestamp metadata, so reruns give the same file
    fig.savefig(path, metadata={"Software": None} if str(path).endswith(".png") else None)
    plt.close(fig)


def decay_curves(path, x, P, P_c, s_R):
    fig, ax = _figure()
    ax.semilogy(x, P, "-", color="k", label=r"$\mathcal{P}(t)$")
    ax.semilogy(x, P_c, ":", color="tab:blue", label=r"$\mathcal{P}_c(t)$")
    ax.set_xlabel(r"$x = t/\tau_0$")
    ax.set_ylabel("survival probability")
    ax.set_title(f"s_R = {s_R:g}")
    ax.legend()
    _save(fig, path)


def deviation(path, x, f, s_R):
    fig, ax = _figure()
    ax.plot(x, f, "-", color="k")
    ax.axhline(0.0, color="0.6", lw=0.6)
    ax.set_xlabel(r"$x = t/\tau_0$")
    ax.set_ylabel(r"$f = |\zeta|^2 - 1$")
    ax.set_title(f"s_R = {s_R:g}")
    _save(fig, path)


def hamiltonian(path, x, energy, rate, s_R):
    fig, ax = _figure()
    ax.plot(x, np.asarray(energy) - s_R, "-", color="k", label=r"Re $h$ - $s_R$")
    ax.plot(x, np.asarray(rate) - 1.0, "--", color="tab:red", label=r"$-2\,$Im $h$ - 1")
    ax.set_xlabel(r"$x = t/\tau_0$")
    ax.set_ylabel(r"deviation from $s_R - i/2$ [$\Gamma_0$]")
    ax.legend()
    _save(fig, path)


def tail(path, x, P, exponent, intercept, window):
    fig, ax = _figure()
    ax.loglog(x, P, ".", ms=2, color="k", label=r"$\mathcal{P}$")
    xs = np.geomspace(*window, 50)
    ax.loglog(xs, np.exp(intercept) * xs**exponent, "-", color="tab:red", label=f"slope {exponent:.4f}")
    ax.set_xlabel(r"$x = t/\tau_0$")
    ax.set_ylabel("survival probability")
    ax.legend()
    _save(fig, path)


def comparison(path, x, diff):
    fig, ax = _figure()
    ax.semilogy(x, np.maximum(diff, 1e-18), "-", color="k")
    ax.axhline(1e-6, color="tab:red", ls="--", lw=0.8)
    ax.set_xlabel(r"$x = t/\tau_0$")
    ax.set_ylabel("|closed form - quadrature|")
    _save(fig, path)


def spectrum(path, E, omega):
    fig, ax = _figure()
    ax.plot(E, omega, "-", color="k")
    ax.set_xlabel(r"$E / \Gamma_0$")
    ax.set_ylabel(r"$\omega(E)$")
    _save(fig, path)
