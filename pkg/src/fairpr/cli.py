"""Command-line interface: rank, sweep, audit, generate.

Exit codes: 0 on success, 1 on input or usage errors, 2 when the
requested fairness target is infeasible.  All output files are written
deterministically (full-precision floats, sorted JSON keys), so reruns
with the same inputs and seed are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import analysis, fspr, graph, lfpr, synth
from .errors import FairprError, InfeasibleError
from .pagerank import DEFAULT_GAMMA, pagerank, standard_transition, write_scores_csv

LFPR_KINDS = {
    "lfpr-n": lfpr.PolicyKind.NEIGHBORHOOD,
    "lfpr-u": lfpr.PolicyKind.UNIFORM,
    "lfpr-p": lfpr.PolicyKind.PROPORTIONAL,
}
ALGOS = ("opr", "fspr", "lfpr-n", "lfpr-u", "lfpr-p", "lfpr-o")


def _load_node_list(path) -> np.ndarray:
    nodes = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            nodes.append(int(line))
    if not nodes:
        raise ValueError(f"{path}: no node ids")
    return np.asarray(nodes, dtype=np.int64)


def _write_policy_json(path, policy: lfpr.ResidualPolicy) -> None:
    payload: dict = {"kind": policy.kind.value}
    for name, vec in (("x", policy.x), ("y", policy.y)):
        if vec is not None:
            payload[name] = {str(i): float(v) for i, v in enumerate(vec) if v != 0.0}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_json(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _require_phi(args) -> float:
    if args.phi is None:
        raise ValueError("--phi is required for this algorithm")
    return args.phi


def _rank_once(g, algo, args, p_o, gamma, targets):
    """Scores plus algorithm-specific report fields for one configuration."""
    extras: dict = {"algorithm": algo}
    policy = None
    if targets is not None and algo not in ("fspr", "lfpr-n", "lfpr-u", "lfpr-p"):
        raise ValueError(f"targeted runs are not supported for --algo {algo}")

    if algo == "opr":
        scores = p_o
    elif algo == "fspr":
        model = standard_transition(g)
        phi = _require_phi(args)
        if targets is None:
            problem = fspr.fspr_problem(model, g, phi, gamma, p_o=p_o)
        else:
            problem = fspr.targeted_fspr_problem(
                model, g, targets[0], targets[1], phi, gamma, p_o=p_o
            )
        solution = fspr.solve_fspr(
            problem, tol=args.tol, max_iters=args.iters if args.iters else 5000
        )
        scores = solution.scores
        extras.update(
            {
                "fairness_residual": solution.constraint_residual,
                "achieved_fairness": solution.achieved_fairness,
                "iterations": solution.iterations,
                "converged": solution.converged,
                "kkt_residual": solution.kkt_residual,
            }
        )
        extras["jump_vector"] = solution.x
    elif algo == "lfpr-o":
        phi = _require_phi(args)
        result = lfpr.optimize_residuals(
            g,
            phi,
            gamma,
            p_o,
            iterations=args.iters if args.iters else 200,
            directions=args.directions,
            penalty=args.penalty,
            seed=args.seed,
        )
        policy = result.policy
        scores = lfpr.lfpr_pagerank(g, phi, policy, gamma)
        extras.update(
            {
                "search_iterations": result.iterations,
                "search_evaluations": result.evaluations,
                "penalty_residual": result.penalty_residual,
            }
        )
    else:
        phi = _require_phi(args)
        kind = LFPR_KINDS[algo]
        if targets is None:
            policy = lfpr.make_policy(kind, g, p_o=p_o)
            scores = lfpr.lfpr_pagerank(g, phi, policy, gamma)
        else:
            scores = lfpr.targeted_lfpr(g, targets[0], targets[1], phi, kind, gamma, p_o=p_o)

    if targets is not None:
        s_mask = np.zeros(g.n, dtype=bool)
        s_mask[targets[0]] = True
        sr_mask = np.zeros(g.n, dtype=bool)
        sr_mask[targets[1]] = True
        target_mass = float(scores[s_mask].sum())
        protected_mass = float(scores[sr_mask].sum())
        extras["target_mass"] = target_mass
        extras["protected_target_mass"] = protected_mass
        extras["targeted_residual"] = abs(protected_mass - args.phi * target_mass)
    return scores, extras, policy


def cmd_rank(args) -> int:
    g = graph.load_graph(args.edges, args.colors)
    gamma = args.gamma
    model = standard_transition(g)
    p_o = pagerank(model, gamma)
    targets = None
    if args.target_set or args.target_protected:
        if not (args.target_set and args.target_protected):
            raise ValueError("targeted runs need both --target-set and --target-protected")
        targets = (_load_node_list(args.target_set), _load_node_list(args.target_protected))

    scores, extras, policy = _rank_once(g, args.algo, args, p_o, gamma, targets)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_scores_csv(out / "scores.csv", scores)
    phi = args.phi if args.phi is not None else g.n_red / g.n
    report = analysis.make_report(scores, p_o, g, phi, gamma)
    jump = extras.pop("jump_vector", None)
    if jump is not None:
        with open(out / "solution.csv", "w", encoding="utf-8", newline="") as fh:
            fh.write("node,jump_prob,score\n")
            for i in range(g.n):
                fh.write(f"{i},{jump[i]:.17g},{scores[i]:.17g}\n")
    if policy is not None:
        _write_policy_json(out / "policy.json", policy)
    payload = report.to_dict()
    if "targeted_residual" in extras:
        payload["fair"] = bool(extras["targeted_residual"] <= analysis.FAIRNESS_TOL)
    payload.update(extras)
    _write_json(out / "report.json", payload)
    print(
        f"{args.algo}: red_mass={report.red_mass:.6f} loss={report.loss:.6e} "
        f"lower_bound_loss={report.lower_bound_loss:.6e}"
    )
    return 0


def _sweep_instances(args):
    if args.edges or args.colors:
        if not (args.edges and args.colors):
            raise ValueError("need both --edges and --colors")
        yield Path(args.edges).stem, graph.load_graph(args.edges, args.colors)
        return
    if args.grid_n is None:
        raise ValueError("sweep needs either --edges/--colors or a --grid-n synthetic grid")
    cell = 0
    for r in args.grid_r:
        for a_red in args.grid_alpha_red:
            for a_blue in args.grid_alpha_blue:
                for s in range(args.grid_seeds):
                    seed = int(np.random.SeedSequence([args.seed, cell]).generate_state(1)[0])
                    cell += 1
                    cfg = synth.SynthConfig(
                        n=args.grid_n,
                        red_fraction=r,
                        alpha_red=a_red,
                        alpha_blue=a_blue,
                        seed=seed,
                    )
                    name = f"synth-r{r}-aR{a_red}-aB{a_blue}-s{s}"
                    yield name, synth.generate(cfg)


def cmd_sweep(args) -> int:
    gamma = args.gamma
    rows = []
    ok_rows = 0
    infeasible_rows = 0
    for name, g in _sweep_instances(args):
        model = standard_transition(g)
        p_o = pagerank(model, gamma)
        for algo in args.algos:
            for phi in args.phis:
                try:
                    scores, _, _ = _rank_once(
                        g, algo, _SweepView(args, phi), p_o, gamma, None
                    )
                    mass = analysis.red_mass(scores, g)
                    rows.append(
                        [
                            name,
                            algo,
                            f"{phi:.17g}",
                            f"{mass:.17g}",
                            f"{analysis.utility_loss(scores, p_o):.17g}",
                            f"{analysis.lower_bound_loss(p_o, g, phi):.17g}",
                            "ok",
                            "",
                        ]
                    )
                    ok_rows += 1
                except InfeasibleError as exc:
                    rows.append([name, algo, f"{phi:.17g}", "", "", "", "infeasible", str(exc)])
                    infeasible_rows += 1
                except (FairprError, ValueError) as exc:
                    rows.append([name, algo, f"{phi:.17g}", "", "", "", "error", str(exc)])

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "sweep.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["instance", "algorithm", "phi", "red_mass", "loss", "lower_bound_loss", "status", "message"]
        )
        writer.writerows(rows)
    print(f"sweep: {ok_rows} ok, {len(rows) - ok_rows} failed rows -> {out / 'sweep.csv'}")
    if ok_rows:
        return 0
    return 2 if infeasible_rows == len(rows) and rows else 1


class _SweepView:
    """Args proxy giving each sweep cell its own phi."""

    def __init__(self, args, phi):
        self._args = args
        self.phi = phi

    def __getattr__(self, name):
        return getattr(self._args, name)


def cmd_audit(args) -> int:
    g = graph.load_graph(args.edges, args.colors)
    gamma = args.gamma
    if args.algo == "opr":
        model = standard_transition(g)
        phi = args.phi if args.phi is not None else g.n_red / g.n
    elif args.algo in LFPR_KINDS or args.algo == "lfpr-o":
        phi = _require_phi(args)
        p_o = pagerank(standard_transition(g), gamma)
        if args.algo == "lfpr-o":
            policy = lfpr.optimize_residuals(
                g,
                phi,
                gamma,
                p_o,
                iterations=args.iters if args.iters else 200,
                directions=args.directions,
                penalty=args.penalty,
                seed=args.seed,
            ).policy
        else:
            policy = lfpr.make_policy(LFPR_KINDS[args.algo], g, p_o=p_o)
        model = lfpr.build_residual_model(g, phi, policy)
    else:
        raise ValueError("audit applies to transition models: use opr or an lfpr algorithm")

    audit = analysis.personalized_audit(
        model, g, gamma, phi, sample=args.sample, seed=args.seed
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    analysis.write_audit_csv(audit, out / "audit.csv")
    analysis.write_histogram_csv(audit, out / "audit_hist.csv")
    print(
        f"audit: {audit.nodes.size} nodes, all_fair={audit.all_fair} "
        f"red_mean={audit.red_mean:.6f} blue_mean={audit.blue_mean:.6f}"
    )
    return 0


def cmd_generate(args) -> int:
    cfg = synth.SynthConfig(
        n=args.n,
        red_fraction=args.r,
        alpha_red=args.alpha_red,
        alpha_blue=args.alpha_blue,
        seed=args.seed,
        n0=args.n0,
        edges_per_node=args.edges_per_node,
    )
    g = synth.generate(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    graph.save_graph(g, out / "edges.tsv", out / "colors.tsv")
    graph.write_summary_csv(g, out / "summary.csv")
    p_o = pagerank(standard_transition(g), args.gamma)
    red_pr = analysis.red_mass(p_o, g)
    with open(out / "manifest.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write("seed,r,alpha_R,alpha_B,n,red_pagerank\n")
        fh.write(
            f"{cfg.seed},{cfg.red_fraction:.17g},{cfg.alpha_red:.17g},"
            f"{cfg.alpha_blue:.17g},{cfg.n},{red_pr:.17g}\n"
        )
    print(f"generated n={g.n} edges={g.n_edges} red={g.n_red} red_pagerank={red_pr:.6f}")
    return 0


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairpr", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_graph=True):
        if needs_graph:
            p.add_argument("--edges", required=True, help="edge TSV: src<TAB>dst")
            p.add_argument("--colors", required=True, help="color TSV: node<TAB>{0|1}, 1 = red")
        p.add_argument("--gamma", type=float, default=DEFAULT_GAMMA)
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=1e-8, help="solver tolerance")
        p.add_argument("--iters", type=int, default=None, help="iteration budget")
        p.add_argument("--K", dest="directions", type=int, default=64,
                       help="directions per search round (lfpr-o)")
        p.add_argument("--lambda", dest="penalty", type=float, default=10.0,
                       help="sum-constraint penalty weight (lfpr-o)")

    p_rank = sub.add_parser("rank", help="compute one fair ranking")
    common(p_rank)
    p_rank.add_argument("--algo", choices=ALGOS, required=True)
    p_rank.add_argument("--phi", type=float, default=None, help="target red share")
    p_rank.add_argument("--target-set", default=None, help="file of node ids")
    p_rank.add_argument("--target-protected", default=None, help="file of protected ids")
    p_rank.set_defaults(func=cmd_rank)

    p_sweep = sub.add_parser("sweep", help="loss/fairness over a phi or graph grid")
    p_sweep.add_argument("--edges", default=None)
    p_sweep.add_argument("--colors", default=None)
    p_sweep.add_argument("--gamma", type=float, default=DEFAULT_GAMMA)
    p_sweep.add_argument("--out", default=".")
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--tol", type=float, default=1e-8)
    p_sweep.add_argument("--iters", type=int, default=None)
    p_sweep.add_argument("--K", dest="directions", type=int, default=64)
    p_sweep.add_argument("--lambda", dest="penalty", type=float, default=10.0)
    p_sweep.add_argument("--phi", dest="phis", type=_float_list, required=True,
                         help="comma-separated phi values")
    p_sweep.add_argument("--algo", dest="algos", type=lambda t: t.split(","),
                         default=["fspr", "lfpr-n", "lfpr-u", "lfpr-p"],
                         help="comma-separated algorithms")
    p_sweep.add_argument("--grid-n", type=int, default=None)
    p_sweep.add_argument("--grid-r", type=_float_list, default=[0.3])
    p_sweep.add_argument("--grid-alpha-red", type=_float_list, default=[0.5])
    p_sweep.add_argument("--grid-alpha-blue", type=_float_list, default=[0.5])
    p_sweep.add_argument("--grid-seeds", type=int, default=1)
    p_sweep.set_defaults(func=cmd_sweep)

    p_audit = sub.add_parser("audit", help="personalized fairness audit")
    common(p_audit)
    p_audit.add_argument("--algo", choices=[a for a in ALGOS if a != "fspr"], default="opr")
    p_audit.add_argument("--phi", type=float, default=None)
    p_audit.add_argument("--sample", type=int, default=None, help="audit sample size")
    p_audit.set_defaults(func=cmd_audit)

    p_gen = sub.add_parser("generate", help="grow a synthetic colored graph")
    common(p_gen, needs_graph=False)
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--r", type=float, required=True, help="red arrival probability")
    p_gen.add_argument("--alpha-red", type=float, required=True)
    p_gen.add_argument("--alpha-blue", type=float, required=True)
    p_gen.add_argument("--n0", type=int, default=10, help="seed ring size")
    p_gen.add_argument("--edges-per-node", type=int, default=1)
    p_gen.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FairprError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
