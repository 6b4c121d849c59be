"""Command-line front end: JSON documents in, JSON reports out.

Reports go to stdout and are deterministic for fixed inputs and seed;
diagnostics (including wall time) go to stderr.  Exit codes are a stable
contract: 0 success/affirmative, 1 negative verdict, 2 invalid input,
3 inconclusive.
"""

from __future__ import annotations

import argparse
import sys
import time
from typing import Optional

import numpy as np

from . import linalg
from .ae_equiv import (
    EquivalenceContext,
    THEOREM_HOLDS,
    ae_equal_rigidity,
    counterexample_construct,
    decompose_along,
    forced_equality_scan,
    r_equivalent,
    rigidity_check,
)
from .completion import (
    PartialCpMap,
    _split_blocks,
    cp_completable,
    minimal_cp_completion_choi,
    minimal_cp_completion_stinespring,
    necessary_conditions_report,
)
from .cp_map import CpMap, choi_rank, classify, is_cp, maps_close
from .errors import HypothesisFailed, MalformedDocument, ToolkitError
from .gallery import diagonal_pair_map, flip_twirl_map, trace_state_map
from .linalg import Tolerance
from .quasipure import NOT_QUASI_PURE, QUASI_PURE, is_quasipure
from .serialize import (
    decode_map,
    decode_operator,
    decode_partial_map,
    dump_report,
    encode_map,
    encode_matrix,
    encode_vector,
    load_document,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INVALID = 2
EXIT_INCONCLUSIVE = 3


def _tolerance_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tol-rank", type=float, default=1e-9,
                        metavar="EPS", help="relative rank cutoff")
    parser.add_argument("--tol-psd", type=float, default=1e-10,
                        metavar="EPS", help="PSD eigenvalue slack")
    parser.add_argument("--tol-eq", type=float, default=1e-9,
                        metavar="EPS", help="entrywise equality slack")


def _tolerance(args) -> Tolerance:
    return Tolerance(eps_rank=args.tol_rank, eps_psd=args.tol_psd,
                     eps_eq=args.tol_eq)


def _tolerance_fields(tol: Tolerance) -> dict:
    return {"eps_rank": tol.eps_rank, "eps_psd": tol.eps_psd,
            "eps_eq": tol.eps_eq}


def _emit(report: dict) -> None:
    sys.stdout.write(dump_report(report))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cpmaps",
        description="Analyze completely positive maps: structure, "
                    "quasi-purity, minimal completions and rigidity.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="structural report for a map file")
    p.add_argument("map_file")
    _tolerance_args(p)

    p = sub.add_parser("quasipure", help="decide quasi-purity of a CP map")
    p.add_argument("map_file")
    p.add_argument("--budget", type=int, default=2000,
                   help="randomized sample budget")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strict", action=argparse.BooleanOptionalAction,
                   default=True,
                   help="demote randomized no-counterexample results "
                        "to Inconclusive (default on)")
    _tolerance_args(p)

    p = sub.add_parser("complete",
                       help="minimal CP completion of partial data")
    p.add_argument("beta_file", help="partial map document (blocks)")
    p.add_argument("r_file", help="comparison operator document")
    p.add_argument("--route", choices=("choi", "stinespring", "both"),
                   default="both")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for the feasibility sampling report")
    _tolerance_args(p)

    p = sub.add_parser("aeq", help="R-equivalence and rigidity of two maps")
    p.add_argument("phi_file")
    p.add_argument("psi_file")
    ctx = p.add_mutually_exclusive_group(required=True)
    ctx.add_argument("--r", dest="r_file", metavar="R_FILE",
                     help="comparison operator document")
    ctx.add_argument("--xi", dest="xi_file", metavar="XI_FILE",
                     help="reference map document (support projection)")
    p.add_argument("--budget", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    _tolerance_args(p)

    p = sub.add_parser("demo", help="run the built-in example suite")
    p.add_argument("--list", action="store_true",
                   help="print demo names without running")
    p.add_argument("--seed", type=int, default=0)
    _tolerance_args(p)

    return parser


# ---------------------------------------------------------------------------
# commands


def _cmd_analyze(args) -> int:
    tol = _tolerance(args)
    phi = decode_map(load_document(args.map_file))
    spectrum = [float(x) for x in np.linalg.eigvalsh(phi.choi)]
    report = {
        "command": "analyze",
        "tolerances": _tolerance_fields(tol),
        "d_in": phi.d_in,
        "d_out": phi.d_out,
        "is_cp": bool(is_cp(phi, tol)),
        "choi_rank": choi_rank(phi, tol),
        "choi_spectrum": spectrum,
    }
    if report["is_cp"]:
        info = classify(phi, tol)
        report["is_pure"] = info.is_pure
        report["is_unital"] = info.is_unital
        report["is_entanglement_breaking_quasipure_form"] = (
            info.is_entanglement_breaking_quasipure_form
        )
        if info.eb_state is not None:
            report["eb_state"] = encode_matrix(info.eb_state)
            report["eb_vector"] = encode_vector(info.eb_vector)
    _emit(report)
    return EXIT_OK


def _cmd_quasipure(args) -> int:
    tol = _tolerance(args)
    phi = decode_map(load_document(args.map_file))
    report = {
        "command": "quasipure",
        "tolerances": _tolerance_fields(tol),
        "seed": args.seed,
        "budget": args.budget,
        "strict": bool(args.strict),
    }
    if not is_cp(phi, tol):
        report["error"] = "NotCP"
        _emit(report)
        print("quasipure: NotCP: the map must be completely positive",
              file=sys.stderr)
        return EXIT_NEGATIVE
    verdict = is_quasipure(phi, tol, budget=args.budget, seed=args.seed,
                           strict=args.strict)
    report["status"] = verdict.status
    report["method"] = verdict.method
    report["is_proof"] = verdict.is_proof
    report["samples_used"] = verdict.samples_used
    report["witness"] = (None if verdict.witness is None
                         else encode_vector(verdict.witness))
    _emit(report)
    if verdict.status == QUASI_PURE:
        return EXIT_OK
    if verdict.status == NOT_QUASI_PURE:
        return EXIT_NEGATIVE
    return EXIT_INCONCLUSIVE


def _cmd_complete(args) -> int:
    tol = _tolerance(args)
    r = decode_operator(load_document(args.r_file))
    beta_doc = load_document(args.beta_file)
    beta = decode_partial_map(beta_doc, r)
    report = {
        "command": "complete",
        "tolerances": _tolerance_fields(tol),
        "seed": args.seed,
        "route": args.route,
    }
    feasible = cp_completable(beta, tol)
    report["completable"] = bool(feasible)
    try:
        diagnostics = necessary_conditions_report(beta, trials=25,
                                                  seed=args.seed, tol=tol)
        report["feasibility"] = {
            "compressed_cp": diagnostics.compressed_cp,
            "q_bound": diagnostics.q_bound,
            "q_witness": (None if diagnostics.q_witness is None
                          else encode_matrix(diagnostics.q_witness)),
            "trials": diagnostics.trials,
        }
    except ToolkitError:
        # the sampled diagnostics require R to be a projection; the exact
        # decision above does not
        report["feasibility"] = None
    if not feasible:
        # localize the violation: smallest eigenvalue of the known
        # compression, and how badly ker A leaks through C
        _, a, c = _split_blocks(beta, tol)
        a = (a + a.conj().T) / 2.0
        eigs = np.linalg.eigvalsh(a)
        null = linalg.kernel_basis(
            a + np.kron(np.eye(beta.d_in, dtype=complex),
                        np.eye(beta.d_out, dtype=complex)
                        - beta.range_projection(tol)), tol)
        leak = float(np.linalg.norm(c @ null, ord=2)) if null.size else 0.0
        report["violation"] = {
            "compression_min_eigenvalue": float(eigs[0]) if eigs.size else 0.0,
            "kernel_leak": leak,
        }
        _emit(report)
        return EXIT_NEGATIVE

    completion_choi: Optional[CpMap] = None
    completion_stine: Optional[CpMap] = None
    if args.route in ("choi", "both"):
        completion_choi = minimal_cp_completion_choi(beta, tol)
    if args.route in ("stinespring", "both"):
        seed_map = (completion_choi if completion_choi is not None
                    else minimal_cp_completion_choi(beta, tol))
        completion_stine = minimal_cp_completion_stinespring(beta, seed_map,
                                                             tol)
    primary = completion_choi if args.route == "choi" else completion_stine
    report["completion"] = encode_map(primary)
    if args.route == "both":
        discrepancy = linalg.max_abs(completion_choi.choi
                                     - completion_stine.choi)
        report["route_discrepancy"] = float(discrepancy)
    _emit(report)
    return EXIT_OK


def _cmd_aeq(args) -> int:
    tol = _tolerance(args)
    phi = decode_map(load_document(args.phi_file))
    psi = decode_map(load_document(args.psi_file))
    report = {
        "command": "aeq",
        "tolerances": _tolerance_fields(tol),
        "seed": args.seed,
        "budget": args.budget,
    }
    if args.r_file is not None:
        r = decode_operator(load_document(args.r_file))
        ctx = EquivalenceContext.from_operator(r)
        report["context"] = "operator"
    else:
        xi = decode_map(load_document(args.xi_file))
        ctx = EquivalenceContext.from_reference_map(xi)
        report["context"] = "reference-map"
    equivalent = r_equivalent(phi, psi, ctx, tol)
    report["equivalent"] = bool(equivalent)
    report["maps_equal"] = bool(maps_close(phi, psi, tol))

    rigidity: dict = {"applicable": False}
    if is_cp(phi, tol) and is_cp(psi, tol):
        try:
            if args.r_file is not None:
                verdict = rigidity_check(phi, psi, r, tol,
                                         budget=args.budget, seed=args.seed)
            else:
                verdict = ae_equal_rigidity(phi, psi, xi, tol,
                                            budget=args.budget,
                                            seed=args.seed)
            rigidity = {
                "applicable": True,
                "status": verdict.status,
                "max_deviation": verdict.max_deviation,
                "quasipurity_method": verdict.quasipurity.method,
            }
        except HypothesisFailed as exc:
            rigidity = {"applicable": False,
                        "failed_hypothesis": exc.hypothesis}
    report["rigidity"] = rigidity
    _emit(report)
    return EXIT_OK if equivalent else EXIT_NEGATIVE


# ---------------------------------------------------------------------------
# demo suite


def _demo_rows(seed: int, tol: Tolerance):
    """(name, callable) pairs; each callable returns (passed, detail)."""

    def eb_quasipure():
        rho = np.diag([1.0, 2.0]) / 3.0
        phi = trace_state_map(rho, np.array([1.0, 0.0]))
        verdict = is_quasipure(phi, tol, budget=500, seed=seed)
        ok = verdict.status == QUASI_PURE and verdict.is_proof
        return ok, f"status={verdict.status} method={verdict.method}"

    def special_not_quasipure():
        phi = flip_twirl_map()
        verdict = is_quasipure(phi, tol, budget=500, seed=seed)
        ok = verdict.status == NOT_QUASI_PURE and verdict.witness is not None
        detail = f"status={verdict.status}"
        if verdict.witness is not None:
            w = np.abs(verdict.witness)
            detail += f" |witness|=({w[0]:.4f},{w[1]:.4f})"
        return ok, detail

    def special_forced_equality():
        phi = flip_twirl_map()
        e1 = np.array([1.0, 0.0])
        found = counterexample_construct(phi, e1, tol, budget=100, seed=seed)
        r = np.outer(e1, e1.conj())
        forced = forced_equality_scan(phi, r, trials=25, seed=seed, tol=tol)
        ok = found is None and forced
        return ok, f"twist_found={found is not None} forced_equality={forced}"

    def special_counterexample():
        phi = flip_twirl_map()
        h0 = np.array([1.0, 1.0]) / np.sqrt(2.0)
        found = counterexample_construct(phi, h0, tol, budget=100, seed=seed)
        return found is None, f"twist_found={found is not None}"

    def diagonal_counterexample():
        phi = diagonal_pair_map((1.0, 2.0, 3.0))
        h0 = np.array([1.0, 0.0, 0.0])
        found = counterexample_construct(phi, h0, tol, budget=100, seed=seed)
        if found is None:
            return False, "no twist found"
        psi, r = found
        checks = [
            is_cp(psi, tol),
            linalg.max_abs(psi.unit() - phi.unit()) <= 1e-8,
            r_equivalent(phi, psi, EquivalenceContext.from_operator(r), tol),
            linalg.max_abs(phi.choi - psi.choi) > 1e-6,
        ]
        return all(checks), f"postconditions={checks}"

    def decomposition_random():
        rng = np.random.default_rng(seed)
        ok = True
        worst = 0.0
        for trial in range(5):
            d1, d2 = 2, 3
            factors = [rng.normal(size=(d1, d2))
                       + 1j * rng.normal(size=(d1, d2)) for _ in range(2)]
            phi = CpMap.from_kraus(factors, d1, d2)
            g = rng.normal(size=(d2, d2)) + 1j * rng.normal(size=(d2, d2))
            r = g @ g.conj().T
            parts = decompose_along(phi, r, tol)
            resid = linalg.max_abs(parts.alpha.choi + parts.phi1.choi
                                   - phi.choi)
            scale = max(1.0, linalg.max_abs(phi.choi))
            worst = max(worst, resid / scale)
            ok = ok and resid <= 1e-8 * scale
            ok = ok and is_cp(parts.alpha, tol) and is_cp(parts.phi1, tol)
            ok = ok and r_equivalent(
                parts.phi1, CpMap.zero(d1, d2),
                EquivalenceContext.from_operator(r), tol)
        return ok, f"max_residual={worst:.2e}"

    def rigidity_eb():
        rng = np.random.default_rng(seed)
        ok = True
        for trial in range(5):
            d = 2 + (trial % 2)
            g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            rho = g @ g.conj().T
            v = rng.normal(size=d) + 1j * rng.normal(size=d)
            v /= np.linalg.norm(v)
            phi = trace_state_map(rho, v)
            r = np.outer(v, v.conj())
            beta = PartialCpMap.from_map(phi, r)
            psi = minimal_cp_completion_choi(beta, tol)
            verdict = rigidity_check(phi, psi, r, tol, budget=500, seed=seed)
            ok = ok and verdict.status == THEOREM_HOLDS
            ok = ok and verdict.max_deviation <= 1e-8
        detail = ("all TheoremHolds within 1e-8" if ok
                  else "rigidity verdict or deviation failed")
        return ok, detail

    return [
        ("eb-map-is-quasipure", eb_quasipure),
        ("flip-twirl-not-quasipure", special_not_quasipure),
        ("flip-twirl-forced-equality-at-e1", special_forced_equality),
        ("flip-twirl-no-twist-at-witness", special_counterexample),
        ("diagonal-pair-counterexample", diagonal_counterexample),
        ("decomposition-on-random-maps", decomposition_random),
        ("rigidity-on-eb-maps", rigidity_eb),
    ]


def _cmd_demo(args) -> int:
    tol = _tolerance(args)
    rows = _demo_rows(args.seed, tol)
    report = {
        "command": "demo",
        "tolerances": _tolerance_fields(tol),
        "seed": args.seed,
    }
    if args.list:
        report["demos"] = [name for name, _ in rows]
        _emit(report)
        return EXIT_OK
    results = []
    all_passed = True
    for name, runner in rows:
        try:
            passed, detail = runner()
        except ToolkitError as exc:
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append({"name": name, "passed": bool(passed),
                        "detail": str(detail)})
        all_passed = all_passed and passed
    report["results"] = results
    report["all_passed"] = all_passed
    _emit(report)
    return EXIT_OK if all_passed else EXIT_NEGATIVE


# ---------------------------------------------------------------------------


def main(argv: Optional[list] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "analyze": _cmd_analyze,
        "quasipure": _cmd_quasipure,
        "complete": _cmd_complete,
        "aeq": _cmd_aeq,
        "demo": _cmd_demo,
    }
    start = time.perf_counter()
    try:
        code = handlers[args.command](args)
    except MalformedDocument as exc:
        print(f"{args.command}: malformed input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ToolkitError, ValueError) as exc:
        print(f"{args.command}: invalid input: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return EXIT_INVALID
    finally:
        elapsed = (time.perf_counter() - start) * 1000.0
        print(f"{args.command}: wall time {elapsed:.1f} ms", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
