"""Command-line front end.

Every job is a flat JSON object with a ``command`` key.  Option keys
(tolerances, bounds, output path, ...) are split off from the mathematical
input; reports go to standard output as JSON and a short summary goes to
standard error.  Exit status: 0 success, 2 domain error, 1 internal error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import reproduce
from .covers import coset_table, cover_homology_action
from .errors import AutCoversError, ParseError, ValidationError
from .fox import in_magnus_kernel, magnus_matrix
from .gradient import TowerSpec, largeness_report
from .grouprings import AbelianQuotientSpec
from .nilpotent import (
    AtLeast,
    central_perturbation_witness,
    johnson_depth,
    nilpotent_cover_action_witness,
    shift_witness,
)
from .polynomials import IntPolynomial
from .spectra import alexander_polynomial, dichotomy_probe, spectrum
from .words import Endomorphism, Word

COMMANDS = (
    "magnus",
    "cover-action",
    "spectrum",
    "alexander",
    "johnson-depth",
    "witness",
    "dichotomy",
    "gradient",
    "examples",
)
OPTION_KEYS = ("tol", "bound", "prime", "max_k", "threads", "output", "threshold", "exact_vertex_limit")
WITNESS_KINDS = ("central-perturbation", "shift", "nilpotent-cover")

_INPUT_KEYS = {
    "magnus": ({"rank", "images"}, {"cover"}),
    "cover-action": ({"rank", "images", "cover"}, set()),
    "spectrum": (set(), {"matrix", "rank", "images", "cover"}),
    "alexander": ({"rank", "images"}, {"cover"}),
    "johnson-depth": ({"rank", "images"}, set()),
    "witness": ({"rank", "images", "kind"}, {"k", "i", "N", "g"}),
    "dichotomy": ({"rank", "images"}, set()),
    "gradient": ({"rank", "images", "levels"}, set()),
    "examples": (set(), set()),
}
_REQUIRED_OPTIONS = {"dichotomy": ("prime", "bound"), "gradient": ("prime",)}
_MAX_SAFE = 2**53


@dataclass
class JobSpec:
    command: str
    input: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)


# -- parsing and validation -----------------------------------------------------

def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _endomorphism(inp: dict, problems: list) -> Endomorphism | None:
    rank, images = inp.get("rank"), inp.get("images")
    if not _is_int(rank) or rank < 1:
        problems.append("rank: expected a positive integer")
        return None
    if not isinstance(images, list):
        problems.append("images: expected a list")
        return None
    if len(images) != rank:
        problems.append(f"images: expected {rank} entries, got {len(images)}")
        return None
    words = []
    for i, img in enumerate(images):
        try:
            if not isinstance(img, (str, list)) or (isinstance(img, list) and not all(isinstance(t, str) for t in img)):
                raise ValueError("expected a word string or a list of tokens")
            words.append(Word.parse(img, rank))
        except (ValueError, IndexError) as exc:
            problems.append(f"images[{i}]: {exc}")
    if len(words) != rank:
        return None
    return Endomorphism(rank, tuple(words))


def _cover(doc, rank: int | None, where: str, problems: list, finite: bool = True) -> AbelianQuotientSpec | None:
    if not isinstance(doc, dict):
        problems.append(f"{where}: expected an object with moduli and images")
        return None
    moduli, images = doc.get("moduli"), doc.get("images")
    n = doc.get("rank", rank)
    if not isinstance(moduli, list) or not all(_is_int(m) and m >= 0 for m in moduli):
        problems.append(f"{where}.moduli: expected nonnegative integers")
        return None
    if finite and any(m == 0 for m in moduli):
        problems.append(f"{where}.moduli: the deck group must be finite")
        return None
    if rank is not None and n != rank:
        problems.append(f"{where}.rank: {n} differs from the endomorphism rank {rank}")
        return None
    if not (
        isinstance(images, list)
        and len(images) == n
        and all(isinstance(r, list) and len(r) == len(moduli) and all(_is_int(x) for x in r) for r in images)
    ):
        problems.append(f"{where}.images: expected a {n} x {len(moduli)} integer array")
        return None
    try:
        phi = AbelianQuotientSpec(n, tuple(moduli), tuple(tuple(r) for r in images))
    except (ValueError, AutCoversError) as exc:
        problems.append(f"{where}: {exc}")
        return None
    if not phi.is_surjective():
        problems.append(f"{where}: images do not generate the deck group")
        return None
    return phi


def _check_options(cmd: str, opts: dict, problems: list) -> None:
    positive_int = ("bound", "prime", "threads", "exact_vertex_limit")
    for k in positive_int:
        if k in opts and (not _is_int(opts[k]) or opts[k] < 1):
            problems.append(f"{k}: expected a positive integer")
    if "max_k" in opts and (not _is_int(opts["max_k"]) or opts["max_k"] < 0):
        problems.append("max_k: expected a nonnegative integer")
    for k in ("tol", "threshold"):
        if k in opts and (not isinstance(opts[k], (int, float)) or isinstance(opts[k], bool) or opts[k] < 0):
            problems.append(f"{k}: expected a nonnegative number")
    if "output" in opts and not isinstance(opts["output"], str):
        problems.append("output: expected a path string")
    for k in _REQUIRED_OPTIONS.get(cmd, ()):
        if k not in opts:
            problems.append(f"{k}: required for {cmd}")


def validate(job: JobSpec) -> dict:
    """Return the parsed mathematical objects, or raise ValidationError listing every problem."""
    problems: list[str] = []
    if job.command not in COMMANDS:
        raise ValidationError([f"command: unknown command {job.command!r}"])
    required, optional = _INPUT_KEYS[job.command]
    for k in sorted(required - set(job.input)):
        problems.append(f"{k}: required for {job.command}")
    for k in sorted(set(job.input) - required - optional):
        problems.append(f"{k}: not accepted by {job.command}")
    _check_options(job.command, job.options, problems)
    inp = job.input
    out: dict = {}
    if "rank" in inp or "images" in inp:
        out["psi"] = _endomorphism(inp, problems)
    rank = out["psi"].rank if out.get("psi") else None
    if "cover" in inp:
        out["phi"] = _cover(inp["cover"], rank, "cover", problems, finite=job.command != "magnus" and job.command != "alexander")
    if job.command == "spectrum":
        if "matrix" in inp:
            m = inp["matrix"]
            if not (isinstance(m, list) and all(isinstance(r, list) and len(r) == len(m) for r in m)
                    and all(_is_int(x) or (isinstance(x, str) and x.lstrip("-").isdigit()) for r in m for x in r)):
                problems.append("matrix: expected a square integer array")
            else:
                out["matrix"] = np.array([[int(x) for x in r] for r in m], dtype=object).reshape(len(m), len(m))
        elif not {"rank", "images", "cover"} <= set(inp):
            problems.append("spectrum: give either matrix or rank, images and cover")
    if job.command == "witness":
        kind = inp.get("kind")
        if kind not in WITNESS_KINDS:
            problems.append(f"kind: expected one of {', '.join(WITNESS_KINDS)}")
        elif kind != "central-perturbation":
            for k in ("k", "i", "N"):
                if not _is_int(inp.get(k)):
                    problems.append(f"{k}: required integer for the {kind} witness")
        if "g" in inp:
            try:
                out["g"] = Word.parse(inp["g"], rank)
            except (ValueError, IndexError, TypeError) as exc:
                problems.append(f"g: {exc}")
    if job.command == "gradient":
        levels = inp.get("levels")
        if not isinstance(levels, list) or not levels:
            problems.append("levels: expected a nonempty list of covers")
        else:
            out["levels"] = [_cover(lv, rank, f"levels[{i}]", problems) for i, lv in enumerate(levels)]
    if problems:
        raise ValidationError(problems)
    return out


def parse_job(text: str) -> JobSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise ParseError("a job must be a JSON object")
    if "command" not in doc:
        raise ParseError("missing key", field="command")
    if not isinstance(doc["command"], str):
        raise ParseError("expected a string", field="command")
    cmd = doc["command"]
    job = JobSpec(
        cmd,
        {k: v for k, v in doc.items() if k != "command" and k not in OPTION_KEYS},
        {k: v for k, v in doc.items() if k in OPTION_KEYS},
    )
    validate(job)
    return job


def serialize_job(job: JobSpec) -> str:
    return json.dumps({"command": job.command, **job.input, **job.options}, indent=2)


# -- running --------------------------------------------------------------------

def jsonable(x):
    """Plain JSON: integers beyond 2^53 as decimal strings, fractions as strings."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        x = int(x)
        return str(x) if abs(x) > _MAX_SAFE else x
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, IntPolynomial):
        return jsonable(x.to_json())
    if isinstance(x, np.ndarray):
        return [jsonable(r) for r in x.tolist()]
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "to_json"):
        return jsonable(x.to_json())
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _depth_doc(d) -> dict:
    return {"depth": None, "at_least": d.k} if isinstance(d, AtLeast) else {"depth": d}


def _execute(job: JobSpec, parsed: dict) -> tuple[dict, str]:
    cmd, opts = job.command, job.options
    psi = parsed.get("psi")
    threads = opts.get("threads")
    if cmd == "magnus":
        J = magnus_matrix(psi, parsed.get("phi"))
        doc = {"matrix": J.format(), "entries": J.to_json(), "identity": J.is_identity()}
        if "phi" not in parsed:
            doc["in_magnus_kernel"] = psi.torelli and in_magnus_kernel(psi)
        return doc, f"{J.size}x{J.size} Magnus matrix"
    if cmd == "cover-action":
        phi = parsed["phi"]
        S = coset_table(phi)
        M = cover_homology_action(psi, phi, S)
        sp = spectrum(M, opts.get("tol", 1e-9))
        doc = {
            "schreier_rank": S.schreier_rank,
            "basis": S.basis_labels(),
            "matrix": M,
            "determinant": sp.charpoly.coeffs[0] * (-1) ** sp.charpoly.degree,
            "finite_order": sp.finite_order,
            "spectral_radius": sp.radius,
        }
        fo = sp.finite_order.to_json()["finite_order"] if sp.finite_order else "singular"
        return doc, f"{S.schreier_rank}x{S.schreier_rank} cover action, order {fo}"
    if cmd == "spectrum":
        M = parsed.get("matrix")
        if M is None:
            M = cover_homology_action(psi, parsed["phi"])
        sp = spectrum(M, opts.get("tol", 1e-9))
        return sp.to_json(), f"charpoly {sp.charpoly.format()}, radius {sp.radius:.9f}"
    if cmd == "alexander":
        a = alexander_polynomial(psi, parsed.get("phi"))
        return a.to_json(), a.format()
    if cmd == "johnson-depth":
        d = johnson_depth(psi, opts.get("max_k", 4))
        return _depth_doc(d), f"Johnson depth {_depth_doc(d)}"
    if cmd == "witness":
        kind = job.input["kind"]
        if kind == "central-perturbation":
            w = central_perturbation_witness(psi, opts.get("max_k", 4))
            return {"kind": kind, **w.to_json()}, f"depth {w.depth} witness on {w.generator}"
        k, i, N = job.input["k"], job.input["i"], job.input["N"]
        if kind == "shift":
            r = shift_witness(psi, k, i, N, parsed.get("g"))
        else:
            r = nilpotent_cover_action_witness(psi, k, i, N)
        return {"kind": kind, **r.to_json()}, f"{kind} witness: {r.found}"
    if cmd == "dichotomy":
        r = dichotomy_probe(
            psi, opts["prime"], opts["bound"], threads, opts.get("threshold", 0.1), opts.get("tol", 1e-6)
        )
        return r.to_json(), f"{r.verdict} after {r.covers_enumerated} covers"
    if cmd == "gradient":
        tower = TowerSpec(psi, opts["prime"], tuple(parsed["levels"]))
        r = largeness_report(tower, opts.get("threshold", 0.1), opts.get("exact_vertex_limit", 20), threads)
        return r.to_json(), f"{r.verdict}; infimum on sample {r.infimum}"
    if cmd == "examples":
        doc = reproduce.run()
        bad = reproduce.check(doc)
        if bad:
            raise AssertionError("reproduction failed: " + ", ".join(bad))
        return doc, "partial-conjugation example reproduced"
    raise AssertionError(cmd)


def run_job(job: JobSpec) -> tuple[dict, int, str]:
    """Run a job; returns (report, exit code, one-line summary)."""
    try:
        parsed = validate(job)
        doc, summary = _execute(job, parsed)
        return {"command": job.command, **jsonable(doc)}, 0, summary
    except AutCoversError as exc:
        doc = {"command": job.command, "error": exc.code, "message": str(exc)}
        if isinstance(exc, ValidationError):
            doc["problems"] = exc.problems
        return doc, 2, f"error {exc.code}: {exc}"
    except Exception as exc:  # noqa: BLE001
        return {"command": job.command, "error": "INTERNAL", "message": repr(exc)}, 1, f"internal error: {exc!r}"


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="autcovers",
        description="Actions of free-group automorphisms on homology of finite abelian covers.",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    for cmd in COMMANDS:
        sp = sub.add_parser(cmd)
        if cmd != "examples":
            sp.add_argument("job", help="job JSON file, or - for standard input")
        sp.add_argument("--tol", type=float)
        sp.add_argument("--bound", type=int)
        sp.add_argument("--prime", type=int)
        sp.add_argument("--max-k", dest="max_k", type=int)
        sp.add_argument("--threads", type=int)
        sp.add_argument("--threshold", type=float)
        sp.add_argument("--exact-vertex-limit", dest="exact_vertex_limit", type=int)
        sp.add_argument("--output", help="write the JSON report here instead of standard output")
    return ap


def _load(args) -> JobSpec:
    if args.command == "examples":
        text = '{"command": "examples"}'
    elif args.job == "-":
        text = sys.stdin.read()
    else:
        with open(args.job, encoding="utf-8") as fh:
            text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if isinstance(doc, dict):
        doc.setdefault("command", args.command)
        if doc["command"] != args.command:
            raise ValidationError([f"command: file says {doc['command']!r}, invoked as {args.command!r}"])
        for k in OPTION_KEYS:
            v = getattr(args, k, None)
            if v is not None:
                doc[k] = v
        text = json.dumps(doc)
    return parse_job(text)


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        job = _load(args)
    except AutCoversError as exc:
        doc, code, summary = {"command": args.command, "error": exc.code, "message": str(exc)}, 2, f"error {exc.code}: {exc}"
        if isinstance(exc, ValidationError):
            doc["problems"] = exc.problems
    except OSError as exc:
        doc, code, summary = {"command": args.command, "error": "IO", "message": str(exc)}, 1, str(exc)
    else:
        doc, code, summary = run_job(job)
    text = json.dumps(doc, indent=2) + "\n"
    out = getattr(args, "output", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"autcovers {args.command}: {summary}", file=sys.stderr)
    return code
