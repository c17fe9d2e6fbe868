r"""Fairness metrics, the utility-loss lower bound, and per-node audits.

The gap between a fair vector and the original scores cannot be smaller
than the cost of moving the missing mass with the fewest, flattest edits:
that optimum has a water-filling shape (donors are clipped at a common
level, recipients are raised uniformly), which ``lower_bound_vector``
constructs directly by repeated uniform transfers.

The personalized audit asks a stronger question than aggregate fairness:
whose personal jump vector would be treated fairly?  For node ``i`` with
personalized scores ``PR_i``, the adjusted red mass

    a_i = PR_i(R) - gamma * [i is red]

removes the jump's own contribution; a model is personalized-fair when
``a_i = phi * (1 - gamma)`` for every node.  This holds for all nodes
simultaneously iff every row of the transition matrix sends exactly a
``phi`` share to red, which ``converse_check`` tests row by row.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .graph import ColoredGraph
from .pagerank import DEFAULT_GAMMA, TransitionModel, absorption_vector

FAIRNESS_TOL = 1e-7


def red_mass(p: np.ndarray, g: ColoredGraph) -> float:
    """Total score mass on the red group."""
    return float(np.asarray(p, dtype=float)[g.red].sum())


def utility_loss(f: np.ndarray, p_o: np.ndarray) -> float:
    """Squared L2 distance between a fair vector and the original scores."""
    diff = np.asarray(f, dtype=float) - np.asarray(p_o, dtype=float)
    return float(diff @ diff)


def lower_bound_vector(p_o: np.ndarray, g: ColoredGraph, phi: float) -> np.ndarray:
    """Fair vector closest to ``p_o``: the least possible utility loss.

    Moves the red-mass deficit (or surplus) from the over-mass group to
    the other in uniform rounds: each round removes the same amount from
    every donor still positive, stopping a donor at zero, and finally adds
    the moved mass uniformly over the recipient group.  This is the
    water-filling optimum of minimizing ``||w - p_o||^2`` over
    ``{w >= 0, sum w = 1, red mass = phi}``.
    """
    if not 0.0 < phi < 1.0:
        raise ValueError(f"phi must lie strictly between 0 and 1, got {phi}")
    w = np.asarray(p_o, dtype=float).copy()
    deficit = phi - red_mass(w, g)
    if deficit == 0.0:
        return w
    donors_mask = ~g.red if deficit > 0 else g.red
    recipients_mask = ~donors_mask
    need = abs(deficit)

    remaining = need
    donors = np.nonzero(donors_mask)[0]
    for _ in range(donors.size + 1):
        if remaining <= 0.0:
            break
        active = donors[w[donors] > 0.0]
        if active.size == 0:
            raise ValueError("donor group has no mass left to transfer")
        per = remaining / active.size
        beta = w[active].min()
        t = min(per, beta)
        w[active] -= t
        np.clip(w, 0.0, None, out=w)
        remaining -= t * active.size
        if t == per:
            remaining = 0.0
    w[recipients_mask] += need / recipients_mask.sum()
    return w


def lower_bound_loss(p_o: np.ndarray, g: ColoredGraph, phi: float) -> float:
    return utility_loss(lower_bound_vector(p_o, g, phi), p_o)


def converse_check(m: TransitionModel, g: ColoredGraph, phi: float, tol: float = 1e-9) -> bool:
    """True iff every row sends a ``phi`` share of its mass to red."""
    return bool(np.abs(m.row_masses(g.red) - phi).max() <= tol)


@dataclass(frozen=True)
class PersonalizedAudit:
    """Adjusted personalized red mass per audited node, plus histograms."""

    phi: float
    gamma: float
    nodes: np.ndarray
    red: np.ndarray
    adjusted: np.ndarray
    fair: np.ndarray
    hist_edges: np.ndarray
    red_hist: np.ndarray
    blue_hist: np.ndarray

    @property
    def all_fair(self) -> bool:
        return bool(self.fair.all())

    @property
    def red_mean(self) -> float:
        vals = self.adjusted[self.red]
        return float(vals.mean()) if vals.size else float("nan")

    @property
    def blue_mean(self) -> float:
        vals = self.adjusted[~self.red]
        return float(vals.mean()) if vals.size else float("nan")


def personalized_audit(
    m: TransitionModel,
    g: ColoredGraph,
    gamma: float = DEFAULT_GAMMA,
    phi: float | None = None,
    sample=None,
    seed: int = 0,
    tol: float = FAIRNESS_TOL,
    full_threshold: int = 5000,
    sample_size: int = 1000,
    bins: int = 20,
) -> PersonalizedAudit:
    """Audit per-node personalized fairness of a transition model.

    The adjusted values for all nodes come from one backward solve of
    ``Q e_R`` (identical to running a personalized PageRank per node).
    ``sample`` picks which nodes are reported: ``None`` reports everything
    up to ``full_threshold`` nodes and a color-stratified sample beyond
    that; an int requests that sample size; an array gives explicit ids.
    ``phi = None`` audits against the graph's red node share.
    """
    if phi is None:
        phi = g.n_red / g.n
    adjusted_all = absorption_vector(m, g.red.astype(float), gamma) - gamma * g.red

    if sample is None and g.n > full_threshold:
        sample = sample_size
    if sample is None:
        nodes = np.arange(g.n)
    elif np.isscalar(sample):
        k = int(min(sample, g.n))
        rng = np.random.default_rng(seed)
        k_red = int(round(k * g.n_red / g.n))
        k_red = min(max(k_red, 1), min(k - 1, g.n_red)) if k > 1 else 1
        k_blue = min(k - k_red, g.n_blue)
        nodes = np.sort(
            np.concatenate(
                [
                    rng.choice(g.red_nodes(), size=k_red, replace=False),
                    rng.choice(g.blue_nodes(), size=k_blue, replace=False),
                ]
            )
        )
    else:
        nodes = np.unique(np.asarray(sample, dtype=np.int64))
        if nodes.size and (nodes.min() < 0 or nodes.max() >= g.n):
            raise ValueError("audit sample contains out-of-range node ids")

    adjusted = adjusted_all[nodes]
    target = phi * (1.0 - gamma)
    fair = np.abs(adjusted - target) <= tol
    red = g.red[nodes]
    hist_edges = np.linspace(0.0, 1.0 - gamma, bins + 1)
    red_hist, _ = np.histogram(adjusted[red], bins=hist_edges)
    blue_hist, _ = np.histogram(adjusted[~red], bins=hist_edges)
    return PersonalizedAudit(
        phi=float(phi),
        gamma=float(gamma),
        nodes=nodes,
        red=red,
        adjusted=adjusted,
        fair=fair,
        hist_edges=hist_edges,
        red_hist=red_hist,
        blue_hist=blue_hist,
    )


@dataclass(frozen=True)
class FairnessReport:
    phi: float
    gamma: float
    red_mass: float
    fair: bool
    loss: float
    lower_bound_loss: float

    def to_dict(self) -> dict:
        return {
            "phi": self.phi,
            "gamma": self.gamma,
            "red_mass": self.red_mass,
            "fair": self.fair,
            "loss": self.loss,
            "lower_bound_loss": self.lower_bound_loss,
        }


def make_report(
    scores: np.ndarray,
    p_o: np.ndarray,
    g: ColoredGraph,
    phi: float,
    gamma: float = DEFAULT_GAMMA,
    tol: float = FAIRNESS_TOL,
) -> FairnessReport:
    mass = red_mass(scores, g)
    return FairnessReport(
        phi=float(phi),
        gamma=float(gamma),
        red_mass=mass,
        fair=bool(abs(mass - phi) <= tol),
        loss=utility_loss(scores, p_o),
        lower_bound_loss=lower_bound_loss(p_o, g, phi),
    )


def write_report_json(report: FairnessReport, path, extra: dict | None = None) -> None:
    payload = report.to_dict()
    if extra:
        payload.update(extra)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_audit_csv(audit: PersonalizedAudit, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("node,color,adjusted_red_mass,fair\n")
        for node, is_red, val, ok in zip(audit.nodes, audit.red, audit.adjusted, audit.fair):
            fh.write(f"{node},{int(is_red)},{val:.17g},{int(ok)}\n")


def write_histogram_csv(audit: PersonalizedAudit, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("bin_lo,bin_hi,red_count,blue_count\n")
        for i in range(audit.red_hist.size):
            fh.write(
                f"{audit.hist_edges[i]:.17g},{audit.hist_edges[i + 1]:.17g},"
                f"{audit.red_hist[i]},{audit.blue_hist[i]}\n"
            )
