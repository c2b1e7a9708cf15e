"""``modctrl`` command line: check, dim, verify and audit.

Exit codes: 0 controllable / pass, 1 not controllable / mismatch,
2 indeterminate (truncated or guarded closure), 3 input error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .certify import (CertificateError, EntanglingCoupling, certify_direct, certify_layout,
                      dumps_certificate, loads_certificate, resource_count, verify)
from .closure import FLOAT_PIVOT_TOL, ClosureCaps, ClosureGuardError
from .constructive import isolate_coupling_term, sample_basis_audit
from .layout import DeviceLayout, LayoutError, layout_to_system, load_layout
from .report import TOOL_VERSION, RunReport

__all__ = ["main", "build_parser"]


class InputError(Exception):
    pass


def _closure_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("file", help="device layout file")
    p.add_argument("--mode", choices=("direct", "compose", "auto"), default="auto")
    p.add_argument("--seed", type=int, default=0, help="first parameter seed")
    p.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds to run")
    p.add_argument("--arith", choices=("exact", "modular", "float"), default="exact",
                   help="modular: prime-field fast path for <=6-qubit closures, exact fallback")
    p.add_argument("--tol", type=float, default=FLOAT_PIVOT_TOL, help="relative pivot tolerance (float mode)")
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--max-dim", type=int, default=None)
    p.add_argument("--force", action="store_true", help="allow direct closure above the qubit guard")
    p.add_argument("--format", choices=("text", "machine"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modctrl", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"modctrl {TOOL_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="decide controllability of a layout")
    _closure_flags(check)
    check.add_argument("--certificate-out", type=Path, default=None,
                       help="write the certificate of the first seed to this file")

    dim = sub.add_parser("dim", help="print closure dimensions and depth profiles")
    _closure_flags(dim)

    ver = sub.add_parser("verify", help="re-check a certificate file")
    ver.add_argument("certificate")
    ver.add_argument("--effort", choices=("none", "spot", "exhaustive"), default="none")
    ver.add_argument("--samples", type=int, default=20)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--format", choices=("text", "machine"), default="text")

    aud = sub.add_parser("audit", help="replay cross-partition derivations for every link")
    aud.add_argument("file")
    aud.add_argument("--samples", type=int, default=100, help="samples per link; 0 replays every word")
    aud.add_argument("--seed", type=int, default=0)
    aud.add_argument("--format", choices=("text", "machine"), default="text")
    return parser


def _load(path: str) -> DeviceLayout:
    try:
        return load_layout(path)
    except OSError as err:
        raise InputError(f"{path}: {err.strerror or err}") from None
    except LayoutError as err:
        raise InputError(f"{path}: {err}") from None


def _caps(args) -> ClosureCaps:
    return ClosureCaps(max_dim=args.max_dim, max_depth=args.max_depth)


def _mode(args, layout: DeviceLayout) -> str:
    if args.mode != "auto":
        return args.mode
    return "compose" if layout.links else "direct"


def _worst(statuses: list[str]) -> str:
    for s in ("invalid", "indeterminate"):
        if s in statuses:
            return s
    return "valid"


def _closure_row(ident: str, seed: int, report) -> dict:
    row = {"id": ident, "seed": seed, "dimension": report.dimension,
           "full_dimension": report.full_dimension, "controllable": report.controllable,
           "truncated": report.truncated, "max_depth": report.max_depth,
           "depth_profile": list(report.depth_profile), "seconds": report.seconds}
    if report.reason:
        row["reason"] = report.reason
    return row


def cmd_check(args, report: RunReport, dim_only: bool = False) -> None:
    layout = _load(args.file)
    mode = _mode(args, layout)
    seeds = list(range(args.seed, args.seed + max(1, args.seeds)))
    report.arithmetic = args.arith
    report.seeds = seeds
    report.details["mode"] = mode
    report.resources = resource_count(layout)
    verdicts = []
    cache: dict = {}
    for seed in seeds:
        if mode == "direct":
            system = layout_to_system(layout, seed)
            cert = certify_direct(system, _caps(args), arithmetic=args.arith, force=args.force,
                                  tol=args.tol, label=layout.name)
            report.modules.append(_closure_row(layout.name, seed, cert.report))
            verdicts.append(cert.verdict)
            if cert.report.reason.startswith("guard"):
                report.messages.append(cert.report.reason)
        else:
            run = certify_layout(layout, seed, _caps(args), arithmetic=args.arith, tol=args.tol, cache=cache)
            for m in layout.modules:
                leaf = run.leaves[m.id]
                report.modules.append(_closure_row(m.id, seed, leaf.report))
            cert = run.certificate
            verdicts.append(run.verdict)
            composite = {"verdict": run.verdict, "n": layout.qubit_count, "leaf_closures": len(cache),
                         "redundant_links": len(layout.redundant_links)}
            if run.reason:
                composite["reason"] = run.reason
            report.composite = composite
            report.timings["leaf_closures"] = report.timings.get("leaf_closures", 0.0) + run.leaf_seconds
            report.timings["compose"] = report.timings.get("compose", 0.0) + run.compose_seconds
        if seed == seeds[0] and getattr(args, "certificate_out", None) and cert is not None:
            args.certificate_out.write_text(dumps_certificate(cert), encoding="utf-8")
    if dim_only:
        report.status = "ok"
        return
    report.status = _worst(verdicts)


def cmd_verify(args, report: RunReport) -> None:
    try:
        text = Path(args.certificate).read_text(encoding="utf-8")
    except OSError as err:
        raise InputError(f"{args.certificate}: {err.strerror or err}") from None
    try:
        cert = loads_certificate(text)
    except (ValueError, CertificateError) as err:
        raise InputError(f"{args.certificate}: {err}") from None
    result = verify(cert, args.effort, samples=args.samples, rng_seed=args.seed)
    report.details["verification"] = result.as_record()
    report.details["certificate_verdict"] = cert.verdict
    report.seeds = [args.seed]
    report.status = "pass" if result.ok else "mismatch"
    for c in result.mismatches:
        report.messages.append(f"mismatch {c.name}: {c.detail}")


def _tree_side(layout: DeviceLayout, skip: int) -> set[str]:
    """Modules reachable from the ``module_a`` end of tree link ``skip`` without crossing it."""
    adj: dict[str, list[str]] = {m.id: [] for m in layout.modules}
    for i, ln in enumerate(layout.links):
        if i != skip:
            adj[ln.module_a].append(ln.module_b)
            adj[ln.module_b].append(ln.module_a)
    start = layout.links[skip].module_a
    seen, stack = {start}, [start]
    while stack:
        for nxt in adj[stack.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen


def cmd_audit(args, report: RunReport) -> None:
    layout = _load(args.file)
    if not layout.links:
        raise InputError(f"{args.file}: layout has no links to audit")
    n = layout.qubit_count
    report.seeds = [args.seed]
    rows = []
    ok = True
    for i, ln in enumerate(layout.links):
        side = _tree_side(layout, i)
        if ln.module_b in side:
            raise InputError(f"{args.file}: link {ln.module_a}:{ln.qubit_a} {ln.module_b}:{ln.qubit_b} closes a cycle")
        part_a = sorted(q for m in layout.modules if m.id in side for q in m.qubits)
        qa = layout.global_qubit(ln.module_a, ln.qubit_a)
        qb = layout.global_qubit(ln.module_b, ln.qubit_b)
        coupling = EntanglingCoupling(qa, qb, ln.coefficients)
        alpha, j = coupling.first_nonzero()
        seed_op = isolate_coupling_term(coupling.operator(n), qa, qb, alpha, j)
        audit = sample_basis_audit(seed_op, part_a, args.samples or None, args.seed)
        ok = ok and audit.ok
        rows.append({"id": f"{ln.module_a}:{ln.qubit_a}-{ln.module_b}:{ln.qubit_b}",
                     "samples": audit.samples, "passed": audit.passed})
    report.details["audits"] = rows
    report.status = "pass" if ok else "mismatch"


def _dim(args, report: RunReport) -> None:
    cmd_check(args, report, dim_only=True)


COMMANDS = {"check": cmd_check, "dim": _dim, "verify": cmd_verify, "audit": cmd_audit}


def run(argv: list[str]) -> RunReport:
    """Execute one command and return its report (no printing, no exit)."""
    parser = build_parser()
    args = parser.parse_args(argv)
    report = RunReport(command=list(argv), output_format=args.format)
    try:
        COMMANDS[args.command](args, report)
    except InputError as err:
        report.status = "input_error"
        report.messages.append(f"error: {err}")
    except ClosureGuardError as err:
        report.status = "indeterminate"
        report.messages.append(f"guard: {err}")
    return report


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        report = run(argv)
    except SystemExit as exc:  # argparse usage errors
        return 3 if exc.code not in (0, None) else 0
    stream = sys.stderr if report.status == "input_error" and report.output_format == "text" else sys.stdout
    stream.write(report.render())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
