"""Report figures rendered next to the delimited sweep output."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

_PARAM_LABEL = {"gamma": "decoherence strength", "beta": "background fraction"}


def render_sweep_figure(rows, out_path, parameter: str) -> None:
    """Certification sweep: payoff bound with 1-sigma bars, the separable
    bound, the no-decoy payoff, and the key rate on a twin axis if present."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    if rows:
        x = [r["param"] for r in rows]
        ax.errorbar(x, [r["payoff_lower"] for r in rows],
                    yerr=[r["std_error"] for r in rows],
                    marker="o", capsize=3, label="payoff lower bound")
        ax.plot(x, [r["eb_bound"] for r in rows],
                linestyle="--", color="k", label="separable bound")
        ax.plot(x, [r["payoff_nodecoy"] for r in rows],
                marker="^", linestyle=":", label="no-decoy payoff")
        if "key_rate" in rows[0]:
            ax2 = ax.twinx()
            ax2.plot(x, [r["key_rate"] for r in rows],
                     marker="D", color="tab:green", label="key rate")
            ax2.axhline(0.0, color="tab:green", linewidth=0.6, alpha=0.5)
            ax2.set_ylabel("secret key rate per pulse pair")
            ax2.legend(loc="center right")
    ax.set_xlabel(_PARAM_LABEL.get(parameter, parameter))
    ax.set_ylabel("average payoff")
    ax.legend(loc="upper right")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def render_theory_figure(rows, out_path, parameter: str) -> None:
    """Ideal single-photon payoff next to its realistic-source lower bound."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    if rows:
        x = [r["param"] for r in rows]
        ax.plot(x, [r["ideal_payoff"] for r in rows],
                linestyle="-.", color="k", label="ideal single-photon payoff")
        ax.plot(x, [r["rsmdi_payoff"] for r in rows],
                marker="o", label="weak-pulse payoff lower bound")
    ax.set_xlabel(_PARAM_LABEL.get(parameter, parameter))
    ax.set_ylabel("average payoff")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
