"""Candidate files (JSON, ``"schema": 1``).

Example::

    {"schema": 1,
     "ifs": {"R": [[4]], "B": [[0], [2]]},
     "L": [[0], [3], [9]],
     "alpha": [1, {"sqrt_recip": 2}, {"sqrt_recip": 2}],
     "witness": "-1"}

Labels and digits may be given as plain integers when d == 1.  A weight is a
number, ``{"re": x, "im": y}``, ``{"sqrt_recip": n}`` (the value
``1/sqrt(n)``) or ``{"abs2": "p/q", "phase": "r/s"}`` (the value
``sqrt(abs2) exp(2 pi i phase)``).  ``witness`` is optional: a rational (or a
list of rationals) whose exponential is claimed orthogonal to the frame.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .candidate import FrameCandidate, new_candidate
from .errors import FracFramesError
from .exact import RatVec, as_rational_vector
from .ifs import new_ifs

SCHEMA_VERSION = 1


class CandidateFileError(FracFramesError, ValueError):
    code = "parse_error"


def _vec(v):
    return [v] if isinstance(v, int) else list(v)


def parse_candidate(data: dict) -> tuple[FrameCandidate, RatVec | None]:
    """Build the candidate (and optional witness) from decoded JSON."""
    if not isinstance(data, dict):
        raise CandidateFileError("candidate file must hold a JSON object")
    if data.get("schema") != SCHEMA_VERSION:
        raise CandidateFileError(f"unsupported schema {data.get('schema')!r}")
    try:
        ifs = data["ifs"]
        R, B = ifs["R"], [_vec(b) for b in ifs["B"]]
        L = [_vec(l) for l in data["L"]]
        alpha = data["alpha"]
    except (KeyError, TypeError) as exc:
        raise CandidateFileError(f"missing or malformed field: {exc}") from exc
    if isinstance(R, int):
        R = [[R]]
    sys = new_ifs(R, B)
    c = new_candidate(sys, L, alpha, allow_zero=bool(data.get("allow_zero", False)))
    witness = None
    if data.get("witness") is not None:
        w = data["witness"]
        w = [w] if isinstance(w, (int, str)) else w
        try:
            witness = as_rational_vector([Fraction(str(x)) for x in w], sys.d)
        except (ValueError, ZeroDivisionError) as exc:
            raise CandidateFileError(f"bad witness {data['witness']!r}") from exc
    return c, witness


def load_candidate(path) -> tuple[FrameCandidate, RatVec | None]:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise CandidateFileError(f"invalid JSON in {path}: {exc}") from exc
    except OSError as exc:
        raise CandidateFileError(f"cannot read {path}: {exc}") from exc
    return parse_candidate(data)


def _weight_json(a: complex, exact: Fraction | None):
    if exact is not None and a.imag == 0 and a.real >= 0:
        if exact == 0 or exact.numerator == 1:
            return {"sqrt_recip": exact.denominator} if exact else 0
        return {"abs2": str(exact), "phase": "0"}
    return {"re": a.real, "im": a.imag}


def candidate_to_json(c: FrameCandidate, witness=None) -> dict:
    out = {"schema": SCHEMA_VERSION,
           "ifs": c.sys.to_dict(),
           "L": [list(l) for l in c.L],
           "alpha": [_weight_json(a, e) for a, e in zip(c.alphas, c.alpha_sq_exact)]}
    if c.allow_zero:
        out["allow_zero"] = True
    if witness is not None:
        out["witness"] = [str(x) for x in witness]
    return out


def dump_candidate(c: FrameCandidate, path, witness=None) -> None:
    Path(path).write_text(json.dumps(candidate_to_json(c, witness), indent=2) + "\n")

