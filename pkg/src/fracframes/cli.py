"""``fracframes`` command line: validate, verdict, verify, dilate, representations.

Exit codes: 0 success, 1 validation failure, 2 parse or usage error,
3 unsupported input, 4 resource budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .candidate import (DEFAULT_TOL, check_isometry, check_parseval_on_delta,
                        check_three_digit_family, check_two_digit_family,
                        check_vanishing_sums, congruence_report,
                        parseval_on_delta_deviation, transfer_operator)
from .dilation import (build_a_matrix, build_dilation, cuntz_filter_matrix,
                       project_cuntz_word, unitarity_deviation)
from .dynamics import completeness_verdict, extreme_cycles
from .errors import (AtomBudgetExceeded, CandidateError, FracFramesError,
                     IfsError, IsometryError, UnsupportedError)
from .io import CandidateFileError, load_candidate
from .verify import (bessel_partial_sum, enumerate_representations,
                     frequency_words, frequency_words_csv, level_budget_check,
                     level_k_parseval, level_parseval_csv, orthogonality_witness,
                     representations_csv)

EXIT_OK, EXIT_INVALID, EXIT_PARSE, EXIT_UNSUPPORTED, EXIT_RESOURCE = 0, 1, 2, 3, 4

# sample points for the Bessel check in ``verify``
BESSEL_SAMPLES = (0.0, 0.25, 1 / 3, -0.7, 2.5)


@dataclass(frozen=True)
class RunConfig:
    candidate_path: Path
    tolerance: float = DEFAULT_TOL
    level_k: int = 3
    max_word_len: int = 4
    zero_depth: int = 8
    output: Path | None = None
    format: str = "json"

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("--tol must be positive")
        if self.level_k < 1:
            raise ValueError("--level-k must be >= 1")
        if self.max_word_len < 0:
            raise ValueError("--max-word-len must be >= 0")
        if self.zero_depth < 1:
            raise ValueError("--zero-depth must be >= 1")


class Outcome(Exception):
    """Early exit carrying a report and an exit code."""

    def __init__(self, code: int, report: dict):
        super().__init__(report.get("message", ""))
        self.code = code
        self.report = report


def _reason(code: str, detail) -> dict:
    return {"code": code, "detail": detail}


def _fail(code: int, err: Exception) -> Outcome:
    return Outcome(code, {"status": "error",
                          "reasons": [_reason(getattr(err, "code", "error"), str(err))]})


def _load(cfg: RunConfig):
    try:
        return load_candidate(cfg.candidate_path)
    except CandidateFileError as exc:
        raise _fail(EXIT_PARSE, exc)
    except (IfsError, CandidateError, ValueError) as exc:
        raise _fail(EXIT_INVALID, exc)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, frozenset, set)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if x is None or isinstance(x, str):
        return x
    return str(x)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# ------------------------------------------------------------- commands


def cmd_validate(cfg: RunConfig, args=None):
    c, _ = _load(cfg)
    iso = check_isometry(c, cfg.tolerance)
    reasons = []
    if not iso.ok:
        reasons.append(_reason("not_isometry", f"max deviation {iso.max_deviation:.3g}"))
    vs = check_vanishing_sums(c)
    if not vs.any_label_possible:
        reasons.append(_reason("vanishing_sum_infeasible",
                               "no nonzero label has a vanishing digit exponential sum"))
    elif not vs.ok:
        reasons.append(_reason("vanishing_sum_failed",
                               [list(l) for l in vs.failing]))
    cong = congruence_report(c)
    if not cong.N_le_card or not all(cong.class_ok):
        reasons.append(_reason("congruence_classes", "class count or class sums violated"))
    rng = np.random.default_rng(0)
    pts = rng.uniform(-5, 5, size=(64, c.d))
    fixed = transfer_operator(c, lambda y: np.ones(len(y)))(pts)
    report = {
        "isometry": {"ok": iso.ok, "max_deviation": iso.max_deviation},
        "parseval_on_delta": {"ok": check_parseval_on_delta(c, cfg.tolerance),
                              "deviation": parseval_on_delta_deviation(c)},
        "transfer_fixes_one": {"max_deviation": float(np.max(np.abs(fixed - 1)))},
        "vanishing_sums": {"ok": vs.ok, "failing": [list(l) for l in vs.failing],
                           "feasible_residues": [list(r) for r in vs.feasible_residues]},
        "congruence": {"classes": [[list(l) for l in k] for k in cong.classes],
                       "class_sums": [float(s) for s in cong.class_sums],
                       "N_le_card": cong.N_le_card},
    }
    if c.d == 1 and c.sys.N in (2, 3):
        checker = check_two_digit_family if c.sys.N == 2 else check_three_digit_family
        fam = checker(c, cfg.tolerance)
        report["family"] = {"conditions": fam.conditions, "details": fam.details}
    report["status"] = "valid" if iso.ok else "invalid"
    report["reasons"] = reasons
    rows = [["isometry", iso.ok, iso.max_deviation]]
    csv_text = _csv(["check", "ok", "deviation"], rows)
    return (EXIT_OK if iso.ok else EXIT_INVALID), report, {"csv": csv_text}


def cmd_verdict(cfg: RunConfig, args=None):
    c, _ = _load(cfg)
    try:
        v = completeness_verdict(c, cfg.tolerance)
        cycles = extreme_cycles(c)
    except IsometryError as exc:
        raise _fail(EXIT_INVALID, exc)
    except UnsupportedError as exc:
        raise _fail(EXIT_UNSUPPORTED, exc)
    rep = v.report
    report = {
        "status": v.status,
        "witness": None if v.witness is None else str(v.witness),
        "minimal_invariant_sets": [[str(t) for t in sorted(s)] for s in rep.minimal_sets],
        "transitions": [{"source": str(e.source), "label": e.label,
                         "target": str(e.target), "weight": e.weight}
                        for e in rep.transitions],
        "extreme_cycles": [{"points": [str(p) for p in z.points],
                            "digits": list(z.digits)} for z in cycles],
        "certificate": v.certificate,
    }
    csv_text = _csv(["source", "label", "target", "weight"],
                    [[str(e.source), e.label, str(e.target), e.weight]
                     for e in rep.transitions])
    return EXIT_OK, report, {"csv": csv_text, "dot": rep.graph.to_dot()}


def cmd_verify(cfg: RunConfig, args=None):
    c, witness = _load(cfg)
    try:
        # fail before doing any work when the deepest level is out of budget
        level_budget_check(c, cfg.level_k)
        levels = [level_k_parseval(c, k, cfg.tolerance) for k in range(1, cfg.level_k + 1)]
    except AtomBudgetExceeded as exc:
        raise _fail(EXIT_RESOURCE, exc)
    iso = check_isometry(c, cfg.tolerance)
    report = {"level_parseval": [{"k": r.k, "ok": r.ok, "deviation": r.deviation}
                                 for r in levels],
              "isometry": {"ok": iso.ok, "max_deviation": iso.max_deviation}}
    bessel = []
    if iso.ok and c.d == 1:
        for t in BESSEL_SAMPLES:
            sums = bessel_partial_sum(c, t, cfg.max_word_len)
            bessel.append({"t": t, "partial_sums": sums.tolist(),
                           "nondecreasing": bool(np.all(np.diff(sums) >= -1e-12)),
                           "bounded": bool(sums[-1] <= 1 + 1e-9)})
    report["bessel"] = bessel
    ok = all(r.ok for r in levels) and all(b["nondecreasing"] and b["bounded"]
                                           for b in bessel)
    if witness is not None:
        confirmed = orthogonality_witness(c, witness, cfg.max_word_len, cfg.zero_depth)
        report["witness"] = {"point": [str(x) for x in witness], "confirmed": confirmed,
                             "max_len": cfg.max_word_len, "depth": cfg.zero_depth}
        ok = ok and confirmed
    report["status"] = "ok" if ok else "failed"
    return (EXIT_OK if ok else EXIT_INVALID), report, {
        "csv": level_parseval_csv(levels)}


def cmd_dilate(cfg: RunConfig, args=None):
    c, _ = _load(cfg)
    try:
        D = build_dilation(c)
        a = build_a_matrix(D)
    except IsometryError as exc:
        raise _fail(EXIT_INVALID, exc)
    sysb = c.sys
    zero_word = [sysb.B[0]] * 3
    filt = unitarity_deviation(cuntz_filter_matrix(D, zero_word, [0] * 3, a))
    spot = []
    rng = np.random.default_rng(0)
    for _ in range(5):
        k = int(rng.integers(1, 3))
        word = [int(p) for p in rng.integers(0, D.size, size=k)]
        wp = project_cuntz_word(D, word, a=a)
        spot.append({"word": word, "frequency": list(wp.frequency),
                     "coefficient": wp.coefficient,
                     "quadrature_deviation": float(wp.quadrature_deviation)})
    report = {
        "status": "ok",
        "aux_N": D.aux_N, "aux_R": D.aux_R, "size": D.size,
        "positions": [[list(b), bp] for b, bp in D.positions],
        "embedding": {str(c.L[i][0] if c.d == 1 else list(c.L[i])): p
                      for i, p in D.embed.items()},
        "unitarity_deviation": a.unitarity_deviation,
        "first_row_deviation": a.first_row_deviation,
        "row_means": [a.row_means[p, 0] for p in range(D.size)],
        "row_mean_deviation": a.row_mean_deviation,
        "filter_unitarity_deviation_at_zero": filt,
        "word_projections": spot,
        "a_matrix": a.to_json(),
    }
    rows = [[p, z.real, z.imag] for p, z in enumerate(a.values.ravel())]
    return EXIT_OK, report, {"csv": _csv(["index", "re", "im"], rows)}


def cmd_representations(cfg: RunConfig, args):
    c, _ = _load(cfg)
    try:
        rep = enumerate_representations(c, args.n, max_len=args.max_len,
                                        max_words=args.max_words)
    except UnsupportedError as exc:
        raise _fail(EXIT_UNSUPPORTED, exc)
    report = {
        "status": "ok", "n": rep.n,
        "words": [list(w) for w in rep.words],
        "weights_sq": [None if q is None else str(q) for q in rep.weights_sq],
        "complete": rep.complete,
        "total": None if rep.total is None else str(rep.total),
        "total_is_one": rep.total == 1,
        "enumerated_total": rep.enumerated_total,
    }
    return EXIT_OK, report, {"csv": representations_csv(rep)}


def cmd_frequencies(cfg: RunConfig, args=None):
    c, _ = _load(cfg)
    atoms = frequency_words(c, cfg.max_word_len)
    report = {"status": "ok",
              "frequencies": [{"word": [list(l) for l in a.word],
                               "frequency": list(a.frequency), "weight": a.weight}
                              for a in atoms]}
    return EXIT_OK, report, {"csv": frequency_words_csv(atoms)}


COMMANDS = {
    "validate": cmd_validate,
    "verdict": cmd_verdict,
    "verify": cmd_verify,
    "dilate": cmd_dilate,
    "representations": cmd_representations,
    "frequencies": cmd_frequencies,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("candidate", type=Path, help="candidate JSON file")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--level-k", type=int, default=3)
    common.add_argument("--max-word-len", type=int, default=4)
    common.add_argument("--zero-depth", type=int, default=8)
    common.add_argument("--format", choices=("json", "csv", "dot"), default="json")
    common.add_argument("--out", type=Path, default=None)
    p = argparse.ArgumentParser(prog="fracframes",
                                description="Weighted Fourier frames on self-affine measures")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check the isometry and necessary conditions")
    sub.add_parser("verdict", parents=[common], help="Parseval or incomplete (d = 1)")
    sub.add_parser("verify", parents=[common], help="finite-level Parseval and Bessel checks")
    sub.add_parser("dilate", parents=[common], help="build the dilation and filter matrix")
    r = sub.add_parser("representations", parents=[common],
                       help="words representing an integer")
    r.add_argument("n", type=int)
    r.add_argument("--max-len", type=int, default=24,
                   help="longest word listed when there are infinitely many")
    r.add_argument("--max-words", type=int, default=10_000,
                   help="cap on the number of listed words")
    sub.add_parser("frequencies", parents=[common], help="list frame frequencies")
    return p


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(args.candidate, args.tol, args.level_k, args.max_word_len,
                        args.zero_depth, args.out, args.format)
    except ValueError as exc:
        parser.print_usage(sys.stderr)
        print(f"fracframes: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        code, report, extra = COMMANDS[args.command](cfg, args)
    except Outcome as o:
        code, report, extra = o.code, o.report, {}
    except AtomBudgetExceeded as exc:
        code, report, extra = EXIT_RESOURCE, _fail(EXIT_RESOURCE, exc).report, {}
    except FracFramesError as exc:
        code, report, extra = EXIT_INVALID, _fail(EXIT_INVALID, exc).report, {}
    report = {"command": args.command, "exit_code": code, **report}
    if code != EXIT_OK:
        for r in report.get("reasons", []):
            print(f"fracframes: {r['code']}: {r['detail']}", file=sys.stderr)
    fmt = cfg.format
    if fmt == "json" or fmt not in extra:
        if fmt != "json" and code == EXIT_OK:
            print(f"fracframes: format {fmt!r} not available for {args.command}",
                  file=sys.stderr)
            return EXIT_PARSE
        text = json.dumps(_jsonable(report), indent=2) + "\n"
    else:
        text = extra[fmt]
    _emit(text, cfg.output)
    return code


if __name__ == "__main__":
    sys.exit(main())
