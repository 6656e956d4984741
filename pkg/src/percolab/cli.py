"""Command-line interface: simulation, analytics, curves, and comparisons.

All simulation commands require an explicit --seed; identical invocations are
byte-reproducible.  Numbers are printed with 12 significant digits.  Exit
codes: 0 success, 1 usage error, 2 tolerance failure (compare), 3 a numeric
warning escalated by --strict.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import bootstrap as bs
from . import branching as br
from . import giant as gi
from . import kcore as kc
from . import multigraph as mg
from . import percolation as pc
from .distributions import DegreeSequence, load_spec, sample_degree_sequence


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _sig12(x):
    """Round floats to 12 significant digits for stable text output."""
    if isinstance(x, float):
        return float(f"{x:.12g}")
    if isinstance(x, dict):
        return {k: _sig12(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_sig12(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_sig12(float(v)) for v in x]
    if isinstance(x, (np.floating,)):
        return _sig12(float(x))
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def _emit(payload, out_path):
    text = json.dumps(_sig12(payload), indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_csv(header, rows, out_path):
    lines = [header] + [",".join(f"{v:.12g}" for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dist(args):
    if not args.dist:
        raise UsageError("--dist is required for this command")
    return load_spec(args.dist)


def _require_seed(args):
    if args.seed is None:
        raise UsageError("--seed is required for simulation commands")


def _perc_spec(args):
    if args.mode in ("site", "bond"):
        if args.pi is None:
            raise UsageError(f"--pi is required for mode {args.mode}")
        return pc.PercolationSpec(args.mode, pi=args.pi)
    if args.mode == "site-per-degree":
        if not args.pis:
            raise UsageError("--pis <file> is required for site-per-degree")
        pis = np.loadtxt(args.pis, dtype=float, ndmin=1)
        return pc.PercolationSpec("site-per-degree", pis=pis)
    if args.mode == "fixed":
        if args.m is None:
            raise UsageError("--m is required for fixed mode")
        return pc.PercolationSpec("fixed", m=args.m)
    raise UsageError(f"unknown mode {args.mode}")


def _degree_sequence(args, dist):
    if args.degrees:
        return DegreeSequence.from_file(args.degrees)
    if args.n is None:
        raise UsageError("--n (or --degrees <file>) is required")
    return sample_degree_sequence(dist, args.n, args.seed)


# --- command handlers ---------------------------------------------------


def cmd_generate(args, warnings):
    _require_seed(args)
    dist = _dist(args)
    seq = _degree_sequence(args, dist)
    g = mg.configuration_model(seq, args.seed + 1)
    payload = {
        "command": "generate",
        "n": g.n,
        "e": g.m,
        "seed": args.seed,
        "simple": mg.is_simple(g),
        "parity_fixed_vertex": seq.parity_fixed_vertex,
    }
    if args.edges_out:
        g.to_edge_list(args.edges_out)
        payload["edges_out"] = args.edges_out
    _emit(payload, args.out)
    return 0


def cmd_percolate(args, warnings):
    _require_seed(args)
    dist = _dist(args)
    spec = _perc_spec(args)
    seq = _degree_sequence(args, dist)
    if args.via_explosion:
        g = pc.percolate_via_explosion(seq, spec, args.seed + 1)
    else:
        g0 = mg.configuration_model(seq, args.seed + 1)
        g = pc.percolate_direct(g0, spec, args.seed + 2)
    comp = mg.components(g)
    payload = {
        "command": "percolate",
        "mode": args.mode,
        "seed": args.seed,
        "v": g.n,
        "e": g.m,
        "largest_component": int(comp.sizes[0]) if len(comp.sizes) else 0,
        "component_sizes_top10": [int(s) for s in comp.sizes[:10]],
        "via_explosion": bool(args.via_explosion),
    }
    _emit(payload, args.out)
    return 0


def _simulate_giant(dist, spec, n, seed, reps):
    v_fracs, e_fracs, second = [], [], []
    for r in range(reps):
        seq = sample_degree_sequence(dist, n, seed + 1000 * r)
        g = pc.percolate_via_explosion(seq, spec, seed + 1000 * r + 1)
        comp = mg.components(g)
        c1 = int(comp.sizes[0]) if len(comp.sizes) else 0
        e1 = int(comp.edge_counts[0]) if len(comp.sizes) else 0
        c2 = int(comp.sizes[1]) if len(comp.sizes) > 1 else 0
        v_fracs.append(c1 / n)
        e_fracs.append(e1 / n)
        second.append(c2 / n)
    return (
        float(np.mean(v_fracs)),
        float(np.mean(e_fracs)),
        float(np.mean(second)),
    )


def cmd_giant(args, warnings):
    dist = _dist(args)
    if args.mode == "bond":
        rep = gi.giant_bond(dist, args.pi)
    elif args.mode == "site":
        rep = gi.giant_site(dist, args.pi)
    elif args.mode == "site-per-degree":
        pis = np.loadtxt(args.pis, dtype=float, ndmin=1)
        rep = gi.giant_site(dist, pis)
    else:
        raise UsageError("giant supports site, site-per-degree, and bond modes")
    payload = {
        "command": "giant",
        "mode": args.mode,
        "pi": args.pi,
        "xi": rep.xi,
        "rho": rep.rho,
        "v_frac": rep.v_frac,
        "e_frac": rep.e_frac,
        "supercritical": rep.supercritical,
        "pi_c": rep.pi_c,
    }
    if rep.never_supercritical:
        payload["never_supercritical"] = True
    if args.pi is not None and abs(args.pi - rep.pi_c) < 1e-6:
        warnings.append("pi is within 1e-6 of the threshold; finite-n effects dominate")
    if args.n:
        _require_seed(args)
        spec = _perc_spec(args)
        sim_v, sim_e, sim_second = _simulate_giant(dist, spec, args.n, args.seed, args.reps)
        payload.update(
            {"sim_v_frac": sim_v, "sim_e_frac": sim_e, "sim_second_frac": sim_second,
             "n": args.n, "seed": args.seed, "reps": args.reps}
        )
    if warnings:
        payload["warnings"] = list(warnings)
    _emit(payload, args.out)
    return 0


def cmd_kcore(args, warnings):
    dist = _dist(args)
    if args.k is None:
        raise UsageError("--k is required")
    pi = 1.0 if args.pi is None else args.pi
    fn = kc.kcore_bond if args.mode == "bond" else kc.kcore_site
    rep = fn(dist, args.k, pi)
    if rep.near_threshold:
        warnings.append("pi is within 1e-9 of the k-core threshold")
    if rep.at_local_max:
        warnings.append("p_max sits at a local maximum of phi; limit untrusted")
    payload = {
        "command": "kcore",
        "mode": rep.mode,
        "k": args.k,
        "pi": pi,
        "pi_c": kc.kcore_threshold(dist, args.k),
        "p_max": rep.p_max,
        "v_frac": rep.v_frac,
        "e_frac": rep.e_frac,
        "empty": rep.empty,
        "at_local_max": rep.at_local_max,
    }
    if args.n:
        _require_seed(args)
        seq = sample_degree_sequence(dist, args.n, args.seed)
        spec = pc.PercolationSpec("site" if args.mode != "bond" else "bond", pi=pi)
        g = pc.percolate_via_explosion(seq, spec, args.seed + 1)
        core = mg.k_core(g, args.k)
        payload.update({"sim_v_frac": core.n / args.n, "sim_e_frac": core.m / args.n,
                        "n": args.n, "seed": args.seed})
    if warnings:
        payload["warnings"] = list(warnings)
    _emit(payload, args.out)
    return 0


def cmd_kcore_curve(args, warnings):
    dist = _dist(args)
    if args.k is None:
        raise UsageError("--k is required")
    ps = np.concatenate([np.geomspace(1e-8, 1e-4, 200, endpoint=False),
                         np.linspace(1e-4, 1.0, args.grid)])
    rows = []
    for p in ps:
        h = kc.h_func(dist, args.k, p)
        rows.append((p, h / p**2, h, kc.h1_func(dist, args.k, p)))
    _emit_csv("p,phi,h,h1", rows, args.out)
    return 0


def cmd_transitions(args, warnings):
    dist = _dist(args)
    if args.k is None:
        raise UsageError("--k is required")
    trans = kc.enumerate_transitions(dist, args.k)
    payload = {
        "command": "transitions",
        "k": args.k,
        "count": len(trans),
        "transitions": [
            {"pi_tilde": t.pi_tilde, "p_tilde": t.p_tilde, "order": t.order, "jump": t.jump}
            for t in trans
        ],
    }
    _emit(payload, args.out)
    return 0


def cmd_bootstrap(args, warnings):
    if args.d is None or args.ell is None:
        raise UsageError("--d and --ell are required")
    if args.q is None:
        raise UsageError("--q is required")
    pred = bs.bootstrap_predict(args.d, args.ell, args.q)
    if pred.near_threshold:
        warnings.append("q is within 1e-9 of q_c; no reliable prediction")
    payload = {
        "command": "bootstrap",
        "d": args.d,
        "ell": args.ell,
        "q": args.q,
        "q_c": pred.q_c,
        "p_max": pred.p_max,
        "predicted_frac": pred.predicted_frac,
    }
    if args.n:
        _require_seed(args)
        seq = bs.regular_sequence(args.d, args.n)
        g = mg.configuration_model(seq, args.seed)
        spec = bs.BootstrapSpec(args.d, args.ell, q=args.q)
        rep = bs.run_bootstrap(g, spec, args.seed + 1)
        payload.update({
            "sim_frac": rep.final_infected_count / args.n,
            "fully_infected": rep.fully_infected,
            "n": args.n,
            "seed": args.seed,
        })
    if warnings:
        payload["warnings"] = list(warnings)
    _emit(payload, args.out)
    return 0


def cmd_branching(args, warnings):
    dist = _dist(args)
    if args.k is None:
        raise UsageError("--k is required")
    p_max = br.pmax_recursion(dist, args.k, tol=1e-12)
    payload = {
        "command": "branching",
        "k": args.k,
        "p_max": p_max,
        "survival": br.survival_probability(dist),
    }
    if args.reps and args.depth:
        _require_seed(args)
        model = br.BranchingModel(dist)
        mc = br.mc_tree_containment(model, args.k, args.depth, args.reps, args.seed)
        payload.update({"mc_estimate": mc["estimate"], "mc_stderr": mc["stderr"],
                        "depth": args.depth, "reps": args.reps, "seed": args.seed})
    _emit(payload, args.out)
    return 0


def cmd_compare(args, warnings):
    """Simulation-vs-theory batch for the giant component; exit 2 on failure."""
    _require_seed(args)
    dist = _dist(args)
    if args.n is None:
        raise UsageError("--n is required")
    spec = _perc_spec(args)
    if args.mode == "bond":
        rep = gi.giant_bond(dist, args.pi)
    elif args.mode == "site":
        rep = gi.giant_site(dist, args.pi)
    else:
        raise UsageError("compare supports site and bond modes")
    sim_v, sim_e, _ = _simulate_giant(dist, spec, args.n, args.seed, args.reps)
    ok_v = abs(sim_v - rep.v_frac) <= args.tol
    ok_e = abs(sim_e - rep.e_frac) <= args.tol
    payload = {
        "command": "compare",
        "mode": args.mode,
        "pi": args.pi,
        "n": args.n,
        "reps": args.reps,
        "seed": args.seed,
        "tol": args.tol,
        "v_frac": rep.v_frac,
        "e_frac": rep.e_frac,
        "sim_v_frac": sim_v,
        "sim_e_frac": sim_e,
        "pass": ok_v and ok_e,
    }
    _emit(payload, args.out)
    return 0 if (ok_v and ok_e) else 2


HANDLERS = {
    "generate": cmd_generate,
    "percolate": cmd_percolate,
    "giant": cmd_giant,
    "kcore": cmd_kcore,
    "kcore-curve": cmd_kcore_curve,
    "transitions": cmd_transitions,
    "bootstrap": cmd_bootstrap,
    "branching": cmd_branching,
    "compare": cmd_compare,
}


def build_parser():
    p = Parser(prog="percolab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in HANDLERS:
        s = sub.add_parser(name)
        s.add_argument("--dist", help="distribution spec: JSON file path or inline JSON")
        s.add_argument("--degrees", help="explicit degree sequence file, one integer per line")
        s.add_argument("--n", type=int)
        s.add_argument("--seed", type=int)
        s.add_argument("--reps", type=int, default=1)
        s.add_argument("--mode", default="site",
                       choices=["site", "site-per-degree", "bond", "fixed"])
        s.add_argument("--pi", type=float)
        s.add_argument("--pis", help="per-degree retention file")
        s.add_argument("--m", type=int)
        s.add_argument("--k", type=int)
        s.add_argument("--d", type=int)
        s.add_argument("--ell", type=int)
        s.add_argument("--q", type=float)
        s.add_argument("--depth", type=int)
        s.add_argument("--out")
        s.add_argument("--edges-out")
        s.add_argument("--format", choices=["json", "csv"], default="json")
        s.add_argument("--grid", type=int, default=2000)
        s.add_argument("--tol", type=float, default=0.01)
        s.add_argument("--via-explosion", action="store_true")
        s.add_argument("--strict", action="store_true")
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        warnings = []
        code = HANDLERS[args.command](args, warnings)
        if code == 0 and warnings and args.strict:
            return 3
        return code
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
