"""Figure rendering for the CLI report paths.

Figures are written straight to files (Agg backend), sized for quick
side-by-side reading next to the CSV output they accompany.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def save_cost_figure(trend_rows: list[dict], measured: dict | None, path) -> None:
    """Communication against register width: protocol cost vs the
    gate-description bound, log scale so the separation reads directly."""
    ns = [row["n"] for row in trend_rows]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.semilogy(ns, [row["protocol_qubits"] for row in trend_rows],
                "o-", label="protocol qubits (exact)")
    ax.semilogy(ns, [row["leading_order_qubits"] for row in trend_rows],
                "s--", label="leading order n*J*x")
    ax.semilogy(ns, [row["no_programming_qubits"] for row in trend_rows],
                "^-", label="gate-description bound J*x*(2^n-1)")
    if measured is not None:
        ax.semilogy([measured["n"]], [measured["qubits"]], "k*",
                    markersize=14, label="measured run")
    ax.set_xlabel("register width n")
    ax.set_ylabel("qubits communicated")
    ax.set_xticks(ns)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_histogram_figure(labels: list[str], frequencies: list[float],
                          exact: list[float], path) -> None:
    """Sampled output frequencies next to the exact distribution."""
    pos = range(len(labels))
    fig, ax = plt.subplots(figsize=(max(4.8, 0.5 * len(labels) + 2), 4.0))
    ax.bar(pos, frequencies, width=0.6, alpha=0.7, label="sampled")
    ax.plot(pos, exact, "k_", markersize=18, markeredgewidth=2, label="exact")
    ax.set_xticks(list(pos))
    ax.set_xticklabels(labels, rotation=90 if len(labels) > 8 else 0)
    ax.set_xlabel("output bits")
    ax.set_ylabel("probability")
    ax.legend(fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
