"""Command-line interface.

Subcommands: check, compose, deadlock, limit, simulate, laws, dining.
Exit status 0 on success, 1 on analysis-level findings (failed law or
convergence condition), 2 on input errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .algebra import parallel, series_weighted
from .analysis import (deadlock_series, limit_absorption, simulate,
                       verify_convergence)
from .automata import InvalidAutomatonError, WeightedAutomaton, label_str
from .dsl import (Elaborator, ElaborationError, ModelSyntaxError, parse_model,
                  print_model)
from .matrix import scalar_str
from .models import dining, dining_initial_state, dining_source


class InputError(Exception):
    """User-input failure; maps to exit status 2."""


def _read_model(path):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise InputError("cannot read %s: %s" % (path, exc))
    try:
        return parse_model(text, path)
    except ModelSyntaxError as exc:
        raise InputError(str(exc))


def _resolve_automaton(args):
    """Build the automaton named by --model/--n or --file/--system."""
    mode = "float" if args.float else "exact"
    if args.model == "dining":
        if args.n is None:
            raise InputError("--model dining requires --n")
        return dining(args.n, mode=mode), "dining(%d)" % args.n
    if args.file is None:
        raise InputError("give either --model dining --n N or --file FILE --system NAME")
    doc = _read_model(args.file)
    if args.system is None:
        systems = list(doc.systems)
        if len(systems) != 1:
            raise InputError("--system required; file declares %s" % (systems or "no systems"))
        args.system = systems[0]
    try:
        auto = Elaborator(doc, mode=mode).elaborate(args.system)
    except ElaborationError as exc:
        raise InputError(str(exc))
    return auto, "%s:%s" % (args.file, args.system)


def _resolve_init(auto, init):
    if init is None:
        raise InputError("--init is required for this command")
    parts = tuple(init.split(","))
    label = parts[0] if len(parts) == 1 else parts
    try:
        auto.state_index(label)
    except InvalidAutomatonError:
        known = ", ".join(label_str(q) for q in auto.states[:8])
        raise InputError("unknown initial state %s (states start: %s%s)"
                         % (label_str(label), known,
                            ", ..." if len(auto.states) > 8 else ""))
    return label


def _prob_str(v):
    if isinstance(v, Fraction):
        return "%s (%s)" % (scalar_str(v), format(float(v), ".15g"))
    return format(v, ".15g")


def _prob_json(v):
    return scalar_str(v) if isinstance(v, Fraction) else v


def _emit_report(args, command, model, parameters, results, text_lines):
    if args.format == "json":
        print(json.dumps({"command": command, "model": model,
                          "parameters": parameters, "results": results,
                          "version": __version__}, indent=2))
    else:
        for line in text_lines:
            print(line)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_check(args):
    doc = _read_model(args.file)
    elab = Elaborator(doc)
    status = 0
    for name in doc.automata:
        try:
            elab.automaton(name)
        except ElaborationError as exc:
            print(str(exc), file=sys.stderr)
            status = 2
            continue
        print("%s: ok (Markov)" % name)
    for name in doc.systems:
        try:
            auto = Elaborator(doc).elaborate(name)
        except ElaborationError as exc:
            print(str(exc), file=sys.stderr)
            status = 2
            continue
        print("system %s: ok (%d states)" % (name, len(auto.states)))
    return status


def cmd_compose(args):
    auto, _ = _resolve_automaton(args)
    print(auto.to_json())
    return 0


def cmd_deadlock(args):
    auto, model = _resolve_automaton(args)
    q0 = _resolve_init(auto, args.init)
    series = deadlock_series(auto, q0, args.k)
    if args.format == "csv":
        print("k,probability")
        for k, p in enumerate(series):
            print("%d,%s" % (k, _prob_json(p)))
    else:
        _emit_report(args, "deadlock", model,
                     {"init": label_str(q0), "k": args.k,
                      "mode": "float" if args.float else "exact"},
                     {"series": [{"k": k, "probability": _prob_json(p)}
                                 for k, p in enumerate(series)]},
                     ["%d, %s" % (k, _prob_str(p)) for k, p in enumerate(series)])
    return 0


def cmd_limit(args):
    auto, model = _resolve_automaton(args)
    q0 = _resolve_init(auto, args.init)
    report = verify_convergence(auto, q0)
    absorption = limit_absorption(auto, q0)
    results = {
        "conditions": report.to_json_dict(),
        "absorption": {label_str(d): _prob_json(p) for d, p in absorption.items()},
    }
    lines = ["unique deadlock: %s %s" % (report.unique_deadlock,
                                         [label_str(d) for d in report.deadlock_states]),
             "return paths: %s" % report.return_paths,
             "self loops: %s" % report.self_loops,
             "k0: %s" % report.k0_found]
    lines += ["absorption %s: %s" % (label_str(d), _prob_str(p))
              for d, p in absorption.items()]
    _emit_report(args, "limit", model,
                 {"init": label_str(q0), "mode": "float" if args.float else "exact"},
                 results, lines)
    return 0 if report.all_conditions else 1


def cmd_simulate(args):
    auto, model = _resolve_automaton(args)
    q0 = _resolve_init(auto, args.init)
    est = simulate(auto, q0, args.k, args.trajectories, args.seed)
    _emit_report(args, "simulate", model,
                 {"init": label_str(q0), "k": args.k,
                  "trajectories": args.trajectories, "seed": args.seed},
                 est.to_json_dict(),
                 ["estimate: %.6f" % est.estimate,
                  "hits: %d / %d" % (est.hits, est.trajectories),
                  "std_error: %.6f" % est.std_error])
    return 0


def cmd_laws(args):
    doc = _read_model(args.file)
    elab = Elaborator(doc)
    autos = {}
    for name in doc.automata:
        try:
            autos[name] = elab.automaton(name)
        except ElaborationError as exc:
            print(str(exc), file=sys.stderr)
            return 2
    failures = 0

    def check(label, ok):
        nonlocal failures
        print("%s: %s" % (label, "pass" if ok else "FAIL"))
        if not ok:
            failures += 1

    for name, auto in autos.items():
        check("normalize idempotent on %s" % name,
              auto.normalize().equals(auto.normalize().normalize()))
        factors = [Fraction(i + 2) if auto.mode == "exact" else float(i + 2)
                   for i in range(len(auto.states))]
        scaled = WeightedAutomaton(auto.left, auto.right, auto.states,
                                   {lab: m.scale_rows(factors)
                                    for lab, m in auto.family.items()})
        check("row-scaling invariance on %s" % name,
              scaled.normalize().equals(auto.normalize()))
    names = list(autos)
    for i, qn in enumerate(names):
        for rn in names:
            q, r = autos[qn], autos[rn]
            check("parallel normalization exchange on %s x %s" % (qn, rn),
                  parallel(q, r).normalize().equals(
                      parallel(q.normalize(), r.normalize())))
            if q.right == r.left:
                check("series late normalization on %s . %s" % (qn, rn),
                      series_weighted(q, r).normalize().equals(
                          series_weighted(q.normalize(), r.normalize()).normalize()))
    return 1 if failures else 0


def cmd_dining(args):
    if args.emit:
        sys.stdout.write(dining_source(args.n))
        return 0
    auto = dining(args.n, mode="float" if args.float else "exact")
    q0 = dining_initial_state(args.n)
    sub, _ = auto.reach(q0)
    _emit_report(args, "dining", "dining(%d)" % args.n, {"n": args.n},
                 {"states": len(auto.states), "reachable": len(sub.states)},
                 ["states: %d" % len(auto.states),
                  "reachable from %s: %d" % (label_str(q0), len(sub.states))])
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_model_args(sub, init=False):
    sub.add_argument("--model", choices=["dining"], help="built-in model")
    sub.add_argument("--n", type=int, help="number of philosophers for --model dining")
    sub.add_argument("--file", help="model file (.mkv)")
    sub.add_argument("--system", help="system name within the file")
    group = sub.add_mutually_exclusive_group()
    group.add_argument("--exact", dest="float", action="store_false",
                       help="exact rational arithmetic (default)")
    group.add_argument("--float", dest="float", action="store_true",
                       help="64-bit float arithmetic")
    sub.set_defaults(float=False)
    sub.add_argument("--format", choices=["text", "json", "csv"], default="text")
    if init:
        sub.add_argument("--init", help="initial state, comma-separated component labels")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="markovspan",
        description="Compositional Markov automata: composition, deadlock "
                    "probabilities, and model-file tooling.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate every automaton in a model file")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("compose", help="elaborate a system and emit canonical JSON")
    _add_model_args(p)
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("deadlock", help="k-step deadlock probability series")
    _add_model_args(p, init=True)
    p.add_argument("--k", type=int, default=10, help="number of steps")
    p.set_defaults(func=cmd_deadlock)

    p = sub.add_parser("limit", help="limiting absorption probabilities and "
                                     "convergence conditions")
    _add_model_args(p, init=True)
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("simulate", help="Monte Carlo estimate of the k-step "
                                        "deadlock probability")
    _add_model_args(p, init=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--trajectories", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("laws", help="run the algebraic-law checks on a file's automata")
    p.add_argument("file")
    p.set_defaults(func=cmd_laws)

    p = sub.add_parser("dining", help="built-in dining ring: summary or --emit source")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--emit", action="store_true", help="write equivalent .mkv source")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--exact", dest="float", action="store_false")
    group.add_argument("--float", dest="float", action="store_true")
    p.set_defaults(float=False)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_dining)

    return parser


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    if args.command == "deadlock" and args.k < 0:
        print("error: --k must be >= 0", file=sys.stderr)
        return 2
    if args.command == "simulate" and args.trajectories < 1:
        print("error: --trajectories must be >= 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except InputError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except InvalidAutomatonError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
