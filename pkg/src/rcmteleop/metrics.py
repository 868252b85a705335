"""Singular-value dexterity measures over the tip Jacobian blocks.

For a 3x10 block J: manipulability m = product of singular values
(= sqrt det(J J^T) at full rank) and inverse condition number
kappa_inv = s_min / s_max in [0, 1]. Higher is better for both.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class SvdMetrics:
    sigmas: np.ndarray   # descending
    m: float
    kappa_inv: float


def svd_metrics(J: np.ndarray) -> SvdMetrics:
    s = np.linalg.svd(np.atleast_2d(np.asarray(J, dtype=float)), compute_uv=False)
    if s.size == 0 or s[0] <= 0.0:
        return SvdMetrics(s, 0.0, 0.0)
    return SvdMetrics(s, float(np.prod(s)), float(s[-1] / s[0]))


@dataclass
class SeriesStats:
    mean: float
    min: float
    max: float

    @staticmethod
    def of(x: np.ndarray) -> "SeriesStats":
        x = np.asarray(x, dtype=float)
        return SeriesStats(float(x.mean()), float(x.min()), float(x.max()))

    def as_dict(self) -> dict:
        return {"mean": self.mean, "min": self.min, "max": self.max}


def block_metrics_over_run(sigmas: np.ndarray) -> dict:
    """Aggregate per-sample singular value triples (n x 3, descending) into
    run-level manipulability / conditioning stats."""
    sig = np.asarray(sigmas, dtype=float)
    m = np.prod(sig, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        k = np.where(sig[:, 0] > 0.0, sig[:, -1] / sig[:, 0], 0.0)
    return {
        "m": SeriesStats.of(m).as_dict(),
        "kappa_inv": SeriesStats.of(k).as_dict(),
    }


def case_comparison(per_case: dict[int, dict]) -> dict:
    """Side-by-side dexterity report for runs of the same trajectory under
    different priority arrangements.

    per_case maps case id to {"sig_lin": n x 3, "sig_ang": n x 3,
    "e_p": n, "e_o": n}. Produces absolute stats plus the pairwise
    orderings that the priority design is supposed to induce.
    """
    report: dict = {"cases": {}}
    for case, data in sorted(per_case.items()):
        report["cases"][int(case)] = {
            "linear": block_metrics_over_run(data["sig_lin"]),
            "angular": block_metrics_over_run(data["sig_ang"]),
            "e_p": SeriesStats.of(data["e_p"]).as_dict(),
            "e_o": SeriesStats.of(data["e_o"]).as_dict(),
            "samples": int(np.asarray(data["e_p"]).shape[0]),
        }
    c = report["cases"]
    if {0, 1, 2} <= set(c):
        mean_ep = {k: c[k]["e_p"]["mean"] for k in (0, 1, 2)}
        mean_eo = {k: c[k]["e_o"]["mean"] for k in (0, 1, 2)}
        report["orderings"] = {
            "linear_tracking_case1_best": mean_ep[1] <= mean_ep[0] <= mean_ep[2],
            "angular_tracking_case2_best": mean_eo[2] <= mean_eo[0] <= mean_eo[1],
            "kappa_inv_lin_case1_ge_case0":
                c[1]["linear"]["kappa_inv"]["mean"] >= c[0]["linear"]["kappa_inv"]["mean"],
            "kappa_inv_ang_case2_ge_case0":
                c[2]["angular"]["kappa_inv"]["mean"] >= c[0]["angular"]["kappa_inv"]["mean"],
        }
    return report


def format_comparison(report: dict) -> str:
    """Plain-text table of the case comparison."""
    lines = []
    header = (f"{'case':>4} {'m_lin':>12} {'k_inv_lin':>10} {'m_ang':>12} "
              f"{'k_inv_ang':>10} {'mean|e_p|':>12} {'mean|e_o|':>12}")
    lines.append(header)
    for case, d in sorted(report["cases"].items()):
        lines.append(
            f"{case:>4} {d['linear']['m']['mean']:>12.5g} "
            f"{d['linear']['kappa_inv']['mean']:>10.4f} "
            f"{d['angular']['m']['mean']:>12.5g} "
            f"{d['angular']['kappa_inv']['mean']:>10.4f} "
            f"{d['e_p']['mean']:>12.5g} {d['e_o']['mean']:>12.5g}")
    if "orderings" in report:
        lines.append("orderings:")
        for name, ok in report["orderings"].items():
            lines.append(f"  {name}: {'yes' if ok else 'NO'}")
    return "\n".join(lines)
