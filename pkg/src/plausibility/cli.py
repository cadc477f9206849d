"""``plausibility`` command-line front end.

Every verb builds one report dictionary. ``--json`` prints it verbatim
(sorted keys, so output is byte-stable); otherwise a short human summary is
derived from the same dictionary. Exit codes: 0 decided positively, 1 decided
negatively with a certificate in the report, 2 bad input (or an oracle
cross-check mismatch).
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from pathlib import Path

from . import kernels
from .agreement import (
    DEFAULT_PAIR_CAP,
    check_archimedean,
    find_agreeing,
    find_almost_agreeing,
    verify_agreement,
    verify_families,
    witness_families,
)
from .errors import (
    DecisionFailure,
    InconsistentOrder,
    Infeasible,
    InvalidInput,
    LimitExceeded,
    NotArchimedean,
    NotTotal,
)
from .exactlp import format_rational, parse_rational
from .fixtures import (
    classical_measure_order,
    kps_comparisons,
    random_partial_order,
    random_space_with_measure,
    triangle_comparisons,
)
from .oracle import DEFAULT_CONFIG, averaged_agreeing_measure, brute_archimedean
from .order import PlausibilityOrder, order_from_doc, order_from_measure
from .testspace import (
    DEFAULT_EVENT_CAP,
    TestSpace,
    enumerate_events,
    make_classical,
    make_triangle,
    modal_test_space,
)

log = logging.getLogger("plausibility")

EXIT_POSITIVE, EXIT_NEGATIVE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    """Bad invocation or input; reported on one line with exit code 2."""


# --- document I/O ---------------------------------------------------------


def _load(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc.msg} (line {exc.lineno})") from None


def _events_doc(events) -> list:
    return [list(e) for e in events]


def _pair_doc(pair) -> list:
    return [list(pair[0]), list(pair[1])]


def _order(args) -> PlausibilityOrder:
    doc = _load(args.order)
    return order_from_doc(doc, scope=args.scope, event_cap=args.event_cap)


def _cycle_doc(cycle) -> list:
    return [{"lhs": list(a), "rhs": list(b), "rel": rel.value} for a, b, rel in cycle]


# --- oracle cross-checks --------------------------------------------------


def _oracle_archimedean(order: PlausibilityOrder, archimedean: bool) -> dict:
    if len(order.scope) > DEFAULT_CONFIG.max_events:
        return {"status": "skipped", "reason": f"scope has {len(order.scope)} events"}
    found = brute_archimedean(order)
    if bool(found) == (not archimedean):
        return {"status": "agree", "brute_violations": len(found)}
    if found:
        return {"status": "mismatch", "brute_violations": len(found)}
    # a bounded family search may miss long certificates: not a contradiction
    return {"status": "undecided-at-bound", "brute_violations": 0}


def _oracle_agreeing(order: PlausibilityOrder, found: bool) -> dict:
    if len(order.scope) > DEFAULT_CONFIG.max_events:
        return {"status": "skipped", "reason": f"scope has {len(order.scope)} events"}
    try:
        mu = averaged_agreeing_measure(order)
    except DecisionFailure as exc:
        ok = not found
        return {"status": "agree" if ok else "mismatch", "oracle": type(exc).__name__}
    passes = verify_agreement(order, mu, "AGREE").mode == "AGREES"
    ok = found and passes
    return {"status": "agree" if ok else "mismatch", "oracle_measure": mu.to_doc()}


def _finish_oracle(report: dict, code: int) -> int:
    status = report.get("oracle", {}).get("status")
    if status == "mismatch":
        log.error("oracle cross-check disagrees with the engine")
        return EXIT_USAGE
    return code


# --- verbs ----------------------------------------------------------------


def cmd_validate(args):
    doc = _load(args.order)
    if isinstance(doc, dict) and "space" not in doc:
        ts = TestSpace.from_doc(doc)
        return {"kind": "validation", "valid": True, "outcomes": len(ts.outcomes),
                "tests": len(ts.tests), "space": ts.to_doc()}, EXIT_POSITIVE
    try:
        order = order_from_doc(doc, scope=args.scope, event_cap=args.event_cap)
    except InconsistentOrder as exc:
        return {"kind": "validation", "valid": False, "error": type(exc).__name__,
                "message": str(exc), "cycle": _cycle_doc(exc.cycle)}, EXIT_NEGATIVE
    return {"kind": "validation", "valid": True, "outcomes": len(order.space.outcomes),
            "tests": len(order.space.tests), "scope_events": len(order.scope),
            "comparisons": len(order.comparisons), "space": order.space.to_doc()}, EXIT_POSITIVE


def cmd_events(args):
    doc = _load(args.order)
    ts = TestSpace.from_doc(doc["space"] if isinstance(doc, dict) and "space" in doc else doc)
    events = enumerate_events(ts, args.event_cap)
    return {"kind": "events", "count": len(events), "events": _events_doc(events)}, EXIT_POSITIVE


def cmd_check(args):
    order = _order(args)
    report = check_archimedean(order, args.pair_cap, args.threads)
    doc = report.to_doc()
    if args.oracle:
        doc["oracle"] = _oracle_archimedean(order, report.archimedean)
    code = EXIT_POSITIVE if report.archimedean else EXIT_NEGATIVE
    return doc, _finish_oracle(doc, code)


def cmd_agree(args):
    order = _order(args)
    try:
        mu = find_agreeing(order, args.pair_cap)
    except NotTotal as exc:
        doc = {"kind": "agreement", "mode": "NOT_TOTAL", "incomparable": _pair_doc(exc.pair)}
        code = EXIT_NEGATIVE
    except NotArchimedean as exc:
        doc = {"kind": "agreement", "mode": "NOT_ARCHIMEDEAN",
               "margin": format_rational(exc.margin) if exc.margin is not None else None,
               "violation": exc.violation.to_doc() if exc.violation is not None else None}
        code = EXIT_NEGATIVE
    else:
        doc = verify_agreement(order, mu, "AGREE").to_doc()
        code = EXIT_POSITIVE if doc["mode"] == "AGREES" else EXIT_NEGATIVE
    if args.oracle:
        doc["oracle"] = _oracle_agreeing(order, code == EXIT_POSITIVE)
    return doc, _finish_oracle(doc, code)


def cmd_almost_agree(args):
    order = _order(args)
    try:
        mu = find_almost_agreeing(order, args.pair_cap)
    except Infeasible as exc:
        terms = [{"generator": g, "lower": list(lo), "upper": list(hi), "lambda": format_rational(lam)}
                 for lo, hi, lam, g in exc.certificate]
        return {"kind": "agreement", "mode": "INFEASIBLE", "checked": "ALMOST",
                "unit_decomposition": terms}, EXIT_NEGATIVE
    doc = verify_agreement(order, mu, "ALMOST").to_doc()
    return doc, EXIT_POSITIVE if doc["mode"] == "ALMOST_AGREES" else EXIT_NEGATIVE


def _certificates(doc) -> list:
    """Violation entries from a check report, a single violation, or a list."""
    if isinstance(doc, dict) and "violations" in doc:
        return list(doc["violations"])
    if isinstance(doc, dict):
        return [doc]
    if isinstance(doc, list):
        return doc
    raise UsageError("certificate must be a check report or violation object")


def cmd_witness(args):
    order = _order(args)
    entries = _certificates(_load(args.certificate))
    if not entries:
        raise UsageError("certificate contains no violations")
    out = []
    for entry in entries:
        try:
            pair = tuple(tuple(e) for e in entry["pair"])
            terms = [(tuple(c["lower"]), tuple(c["upper"]), parse_rational(c["lambda"]))
                     for c in entry["coefficients"]]
        except (KeyError, TypeError) as exc:
            raise UsageError(f"malformed certificate entry: missing {exc}") from None
        fam = witness_families(terms, pair)
        out.append({"pair": _pair_doc(pair), "families": fam.to_doc(),
                    "valid": verify_families(order, fam)})
    valid = all(w["valid"] for w in out)
    doc = {"kind": "witness", "valid": valid, "witnesses": out}
    return doc, EXIT_NEGATIVE if valid else EXIT_USAGE


def _parse_labels(args) -> list:
    if args.labels:
        labels = [x.strip() for x in args.labels.split(",") if x.strip()]
    elif args.n:
        labels = [str(i) for i in range(1, args.n + 1)]
    else:
        raise UsageError("classical needs --labels or --n")
    return labels


def cmd_generate(args):
    kind = args.kind
    if kind == "classical":
        labels = _parse_labels(args)
        if args.measure:
            weights = [parse_rational(w.strip()) for w in args.measure.split(",")]
            if len(weights) != len(labels):
                raise UsageError(f"{len(weights)} weights for {len(labels)} outcomes")
            order = classical_measure_order(labels, weights)
            return {"space": order.space.to_doc(), "comparisons": [c.to_doc() for c in order.comparisons],
                    "scope": "full"}, EXIT_POSITIVE
        return make_classical(labels).to_doc(), EXIT_POSITIVE
    if kind == "triangle":
        return {"space": make_triangle().to_doc(),
                "comparisons": [c.to_doc() for c in triangle_comparisons()], "scope": "full"}, EXIT_POSITIVE
    if kind == "kps":
        return {"space": make_classical(["1", "2", "3", "4", "5"]).to_doc(),
                "comparisons": [c.to_doc() for c in kps_comparisons()], "scope": "active"}, EXIT_POSITIVE
    return modal_test_space(args.prime, args.dim).to_doc(), EXIT_POSITIVE


def _cross_check(name: str, order: PlausibilityOrder, threads: int) -> dict:
    report = check_archimedean(order, DEFAULT_PAIR_CAP, threads)
    entry = {"fixture": name, "events": len(order.scope), "status": report.status,
             "archimedean": _oracle_archimedean(order, report.archimedean)}
    try:
        find_agreeing(order)
        found = True
    except (NotTotal, NotArchimedean):
        found = False
    entry["agreeing"] = _oracle_agreeing(order, found)
    return entry


def cmd_oracle(args):
    fixtures = []
    for path in args.orders:
        fixtures.append((path, order_from_doc(_load(path), scope=args.scope, event_cap=args.event_cap)))
    if not args.orders:
        rng = random.Random(args.seed)
        while len(fixtures) < args.count:
            ts, mu = random_space_with_measure(rng, max_outcomes=4, max_tests=3)
            k = len(fixtures)
            order = order_from_measure(mu) if k % 2 == 0 else random_partial_order(rng, ts, mu=mu)
            if order is not None and len(order.scope) <= DEFAULT_CONFIG.max_events:
                fixtures.append((f"random-{k}", order))
    checks = [_cross_check(name, order, args.threads) for name, order in fixtures]
    mismatches = sum(1 for c in checks for key in ("archimedean", "agreeing") if c[key]["status"] == "mismatch")
    doc = {"kind": "oracle", "seed": args.seed if not args.orders else None,
           "fixtures": checks, "mismatches": mismatches}
    if mismatches:
        log.error("%d oracle mismatches", mismatches)
        return doc, EXIT_USAGE
    return doc, EXIT_POSITIVE


# --- summaries ------------------------------------------------------------


def _ev(e) -> str:
    return "{" + ",".join(e) + "}"


def summarize(doc: dict) -> str:
    kind = doc.get("kind")
    if kind == "archimedean":
        lines = [f"{doc['status']}: {len(doc['violations'])} violating pair(s) among {doc['candidates']} candidates"]
        for v in doc["violations"][:5]:
            a, b = v["pair"]
            coeffs = ", ".join(f"{c['lambda']}*({_ev(c['lower'])} <= {_ev(c['upper'])})" for c in v["coefficients"])
            lines.append(f"  {_ev(a)} >= {_ev(b)} fails; e_A - e_B = {coeffs}")
    elif kind == "agreement":
        lines = [f"{doc['mode']}"]
        if doc.get("measure"):
            lines.append("  mu = " + ", ".join(f"{x}: {w}" for x, w in doc["measure"].items()))
        for p in doc.get("violated_pairs", [])[:5]:
            lines.append(f"  {p['direction']}: {_ev(p['lhs'])} vs {_ev(p['rhs'])}")
        if doc.get("incomparable"):
            a, b = doc["incomparable"]
            lines.append(f"  {_ev(a)} and {_ev(b)} are incomparable")
        if doc.get("violation"):
            a, b = doc["violation"]["pair"]
            lines.append(f"  Archimedean condition fails at {_ev(a)} >= {_ev(b)}")
    elif kind == "validation":
        lines = ["valid" if doc["valid"] else f"invalid: {doc['message']}"]
    elif kind == "events":
        lines = [f"{doc['count']} events"] + ["  " + _ev(e) for e in doc["events"]]
    elif kind == "witness":
        lines = [f"witness {'valid' if doc['valid'] else 'INVALID'}"]
        for w in doc["witnesses"]:
            fam = w["families"]
            lines.append("  (" + ", ".join(map(_ev, fam["first"])) + ") vs (" + ", ".join(map(_ev, fam["second"])) + ")")
    elif kind == "oracle":
        lines = [f"{len(doc['fixtures'])} fixtures, {doc['mismatches']} mismatches"]
    else:
        return json.dumps(doc, sort_keys=True, indent=2)
    if "oracle" in doc and kind != "oracle":
        lines.append(f"  oracle: {doc['oracle']['status']}")
    return "\n".join(lines)


# --- entry point ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the machine-readable report")
    common.add_argument("--scope", choices=["active", "full"], default=None,
                        help="event scope (default: as stored in the order document)")
    common.add_argument("--event-cap", type=int, default=DEFAULT_EVENT_CAP)
    common.add_argument("--pair-cap", type=int, default=DEFAULT_PAIR_CAP)
    common.add_argument("--threads", type=int, default=1, help="parallel pair scan; output does not change")
    common.add_argument("--oracle", action="store_true", help="cross-check against brute-force oracles")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized fixtures only")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="plausibility",
                                     description="Decide whether a plausibility order comes from a probability measure.")
    sub = parser.add_subparsers(dest="verb", required=True)

    for verb, fn, helptext in [
        ("validate", cmd_validate, "validate a test space or order document"),
        ("events", cmd_events, "list the events of a test space"),
        ("check", cmd_check, "decide the Archimedean condition"),
        ("agree", cmd_agree, "find an agreeing probability measure"),
        ("almost-agree", cmd_almost_agree, "find an almost-agreeing probability measure"),
    ]:
        p = sub.add_parser(verb, parents=[common], help=helptext)
        p.add_argument("order", help="JSON document path, or - for stdin")
        p.set_defaults(func=fn)

    p = sub.add_parser("witness", parents=[common], help="expand a stored certificate into event families")
    p.add_argument("order")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("generate", parents=[common], help="emit a fixture document")
    p.add_argument("kind", choices=["classical", "triangle", "kps", "modal"])
    p.add_argument("--labels", help="comma-separated outcome labels (classical)")
    p.add_argument("--n", type=int, help="number of outcomes labelled 1..n (classical)")
    p.add_argument("--measure", help="comma-separated weights such as 1/6,1/3,1/2 (classical)")
    p.add_argument("--prime", type=int, default=2, help="field size (modal)")
    p.add_argument("--dim", type=int, default=2, help="vector space dimension (modal)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("oracle", parents=[common], help="cross-check the engine against brute-force oracles")
    p.add_argument("orders", nargs="*", help="order documents (default: random fixtures)")
    p.add_argument("--count", type=int, default=20, help="number of random fixtures")
    p.set_defaults(func=cmd_oracle)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    log.info("kernel backend: %s", kernels.BACKEND)
    try:
        if args.threads < 1:
            raise UsageError("--threads must be at least 1")
        doc, code = args.func(args)
    except (UsageError, InvalidInput, LimitExceeded, InconsistentOrder) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.json or args.verb == "generate":
        print(json.dumps(doc, sort_keys=True, indent=2))
    else:
        print(summarize(doc))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
