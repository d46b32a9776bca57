"""Command-line front end emitting versioned JSON reports.

    aqsforge classify --preset T
    aqsforge witness  --preset Wa --three-pauli
    aqsforge witness  --w-matrix '{"m": [[...], [...]]}' --rotations sx,sz
    aqsforge attack   --preset H --three-pauli --swap-test --copies 100
    aqsforge survey   --count 100000 --seed 7
    aqsforge oracle   --preset T --three-pauli --starts 10000 --lemma1

Exit codes: 0 success (an "unforgeable" verdict is a success), 2 usage
error, 3 data error, 4 internal inconsistency.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from .errors import ContractViolation, InconsistencyError, UnsupportedInput
from .forgery import (
    ForgeryWitness,
    SchemeSpec,
    brute_force_search,
    classify_three_rotation,
    deviation,
    find_two_rotation_witness,
)
from .mat2core import TOL_ANALYTIC, as_mat2
from .pauliparam import (
    PERMUTATIONS,
    PRESETS,
    PauliCoeffs,
    abg_products,
    classify,
    coeffs_from_json,
    coeffs_to_json,
    coeffs_to_matrix,
    haar_sample_array,
    matrix_to_coeffs,
)
from .protocol import run_attack

SCHEMA_VERSION = "report-v1"
SCHEMA_PATH = Path(__file__).with_name("schemas") / f"{SCHEMA_VERSION}.json"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_INCONSISTENT = 4


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- JSON output


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite float {x!r} in report")
    if x == 0.0:
        # fold -0.0 into 0.0 so sign noise cannot change report bytes
        return "0.0"
    text = format(x, ".17g")
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def _complex(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def _ket_json(v: np.ndarray) -> list:
    return [_complex(c) for c in v]


def _matrix_json(A: np.ndarray) -> dict:
    return {"m": [[_complex(A[r, c]) for c in range(2)] for r in range(2)]}


def _parse_complex(obj) -> complex:
    if isinstance(obj, dict):
        return complex(float(obj["re"]), float(obj.get("im", 0.0)))
    if isinstance(obj, (int, float)):
        return complex(obj)
    raise UsageError(f"cannot read complex number from {obj!r}")


def matrix_from_json(obj) -> np.ndarray:
    try:
        rows = obj["m"]
        A = np.array([[_parse_complex(x) for x in row] for row in rows], dtype=complex)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError('matrix JSON must look like {"m": [[{"re":..,"im":..}, ..], [..]]}') from exc
    if A.shape != (2, 2):
        raise UsageError(f"matrix JSON must be 2x2, got shape {A.shape}")
    return as_mat2(A)


def _ket_from_json(obj) -> np.ndarray:
    try:
        v = np.array([_parse_complex(x) for x in obj], dtype=complex)
    except TypeError as exc:
        raise UsageError("ket JSON must be a list of two complex numbers") from exc
    if v.shape != (2,):
        raise UsageError("ket JSON must be a list of two complex numbers")
    return v


def witness_to_json(w: ForgeryWitness) -> dict:
    return {
        "message": _ket_json(w.message),
        "q": coeffs_to_json(w.q_coeffs),
        "target": _ket_json(w.target),
        "deviation": w.deviation,
    }


def witness_from_json(obj: dict) -> ForgeryWitness:
    if "results" in obj:
        obj = obj["results"].get("witness") or {}
    try:
        q = coeffs_from_json(obj["q"])
        return ForgeryWitness(
            _ket_from_json(obj["message"]),
            coeffs_to_matrix(q),
            _ket_from_json(obj["target"]),
            float(obj["deviation"]),
        )
    except KeyError as exc:
        raise UsageError(f"witness JSON is missing field {exc.args[0]!r}") from exc


def _report_classification(report) -> dict:
    return {
        "triples": [
            {
                "perm": list(p),
                "alpha": t.alpha,
                "beta": t.beta,
                "gamma": t.gamma,
                "product": t.product,
            }
            for p, t in report.triples.items()
        ],
        "member_of": [list(p) for p in report.member_of],
        "min_abs_product": report.min_abs_product,
        "verdict": "forgeable" if report.forgeable else "unforgeable",
    }


def write_report(text: str, path: str) -> None:
    """Write atomically: temp file in the target directory, then rename."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------- input parsing


def _load_json_arg(value: str):
    text = value if value.lstrip().startswith(("{", "[")) else None
    if text is None:
        try:
            text = Path(value).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {value}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {value[:40]!r}: {exc.msg}") from exc


def _assistant(args) -> tuple[PauliCoeffs, dict]:
    given = [x for x in (args.preset, args.w, args.w_json, args.w_matrix) if x is not None]
    if len(given) > 1:
        raise UsageError("give only one of --preset, --w, --w-json, --w-matrix")
    if args.preset is not None:
        return PRESETS[args.preset], {"preset": args.preset}
    if args.w is not None:
        try:
            values = [float(x) for x in args.w.split(",")]
        except ValueError as exc:
            raise UsageError(f"--w expects four comma-separated numbers, got {args.w!r}") from exc
        if len(values) != 4:
            raise UsageError(f"--w expects four comma-separated numbers, got {len(values)}")
        return PauliCoeffs.from_array(values), {"w": values}
    if args.w_json is not None:
        obj = _load_json_arg(args.w_json)
        if not isinstance(obj, dict) or "w" not in obj or len(obj["w"]) != 4:
            raise UsageError('coefficient JSON must look like {"w": [w0, w1, w2, w3]}')
        return coeffs_from_json(obj), {"w": [float(x) for x in obj["w"]]}
    if args.w_matrix is not None:
        A = matrix_from_json(_load_json_arg(args.w_matrix))
        return matrix_to_coeffs(A), {"matrix": _matrix_json(A)}
    return PRESETS["I"], {"preset": "I"}


def _scheme(args, assistant: PauliCoeffs) -> tuple[SchemeSpec, dict]:
    if getattr(args, "three_pauli", False):
        if args.rotations is not None or args.rotations_json is not None:
            raise UsageError("--three-pauli fixes the rotations; drop --rotations")
        return SchemeSpec.three_pauli(assistant), {"three_pauli": True, "rotations": ["sx", "sy", "sz"]}
    if args.rotations_json is not None:
        obj = _load_json_arg(args.rotations_json)
        try:
            mats = [matrix_from_json(m) for m in obj["rotations"]]
        except (KeyError, TypeError) as exc:
            raise UsageError('rotations JSON must look like {"rotations": [matrix, matrix]}') from exc
        if len(mats) != 2:
            raise UsageError("general schemes take exactly two rotations")
        return SchemeSpec.two_general(assistant, *mats), {
            "three_pauli": False,
            "rotations": [_matrix_json(m) for m in mats],
        }
    names = (args.rotations or "sx,sz").split(",")
    if len(names) != 2:
        raise UsageError("--rotations takes two names; use --three-pauli for sx,sy,sz")
    try:
        scheme = SchemeSpec.from_names(assistant, names)
    except ContractViolation as exc:
        raise UsageError(str(exc)) from exc
    return scheme, {"three_pauli": False, "rotations": [n.strip().lower() for n in names]}


# ---------------------------------------------------------------- commands


def _witness_for(scheme: SchemeSpec, tol: float) -> tuple[ForgeryWitness | None, dict]:
    if scheme.rotation_kind == "three_pauli":
        verdict = classify_three_rotation(scheme, tol)
        results = {"classification": _report_classification(verdict.report)}
        results["verdict"] = "forgeable" if verdict.forgeable else "unforgeable"
        return verdict.witness, results
    w = find_two_rotation_witness(scheme, tol)
    return w, {"verdict": "forgeable"}


def cmd_classify(args) -> tuple[dict, dict]:
    assistant, echo = _assistant(args)
    report = classify(assistant, args.tol)
    results = {"coeffs": coeffs_to_json(assistant), **_report_classification(report)}
    if report.forgeable:
        verdict = classify_three_rotation(SchemeSpec.three_pauli(assistant), args.tol)
        results["witness"] = witness_to_json(verdict.witness)
    return echo, results


def cmd_witness(args) -> tuple[dict, dict]:
    assistant, echo = _assistant(args)
    scheme, scheme_echo = _scheme(args, assistant)
    echo.update(scheme_echo)
    witness, results = _witness_for(scheme, args.tol)
    results = {"coeffs": coeffs_to_json(assistant), **results}
    if witness is not None:
        results["witness"] = witness_to_json(witness)
    return echo, results


def cmd_attack(args) -> tuple[dict, dict]:
    assistant, echo = _assistant(args)
    scheme, scheme_echo = _scheme(args, assistant)
    echo.update(scheme_echo)
    echo["mode"] = "swap_test" if args.swap_test else "deterministic"
    if args.swap_test:
        echo["copies"] = args.copies
    results: dict = {"coeffs": coeffs_to_json(assistant)}
    if args.witness is not None:
        echo["witness_source"] = "file"
        witness = witness_from_json(_load_json_arg(args.witness))
        actual = deviation(scheme, witness.q_op, witness.message)
        if abs(actual - witness.deviation) > TOL_ANALYTIC:
            raise ContractViolation(
                f"stale witness: recorded deviation {witness.deviation:.6g}, recomputed {actual:.6g}"
            )
    else:
        echo["witness_source"] = "constructed"
        witness, extra = _witness_for(scheme, args.tol)
        results.update(extra)
        if witness is None:
            results["attack"] = None
            return echo, results
    results["witness"] = witness_to_json(witness)
    report = run_attack(
        scheme,
        witness,
        "swap_test" if args.swap_test else "deterministic",
        copies=args.copies,
        seed=args.seed,
        tol=args.tol,
        require_sound=False,
    )
    verdicts = []
    for v in report.verdicts:
        entry = {"key": [v.key.j, v.key.k], "accepted": v.accepted, "overlap_gap": v.overlap_gap}
        if v.swap is not None:
            entry["swap_test"] = {"copies": v.swap.copies, "accept_count": v.swap.accept_count}
        verdicts.append(entry)
    results["attack"] = {
        "keys": len(verdicts),
        "all_keys_fooled": report.all_keys_fooled,
        "verdicts": verdicts,
    }
    return echo, results


def cmd_survey(args) -> tuple[dict, dict]:
    if args.count < 1:
        raise UsageError("--count must be >= 1")
    w = haar_sample_array(args.seed, args.count)
    products = np.abs(abg_products(w))
    per_sample = products.min(axis=1)
    forgeable = per_sample <= args.tol
    per_perm = (products <= args.tol).sum(axis=0)
    echo = {"count": args.count}
    results = {
        "forgeable_count": int(forgeable.sum()),
        "forgeable_fraction": float(forgeable.mean()),
        "min_abs_product": float(per_sample.min()),
        "member_counts": [{"perm": list(p), "count": int(c)} for p, c in zip(PERMUTATIONS, per_perm)],
    }
    return echo, results


def cmd_oracle(args) -> tuple[dict, dict]:
    if args.starts < 1:
        raise UsageError("--starts must be >= 1")
    assistant, echo = _assistant(args)
    scheme, scheme_echo = _scheme(args, assistant)
    echo.update(scheme_echo)
    echo.update({"starts": args.starts, "restrict_lemma1": args.lemma1})
    res = brute_force_search(scheme, args.starts, args.seed, restrict_lemma1=args.lemma1)
    results = {
        "coeffs": coeffs_to_json(assistant),
        "min_deviation": res.min_deviation,
        "best_q": coeffs_to_json(res.best_q),
        "best_message": _ket_json(res.best_message),
        "restrict_lemma1": res.restrict_lemma1,
        "starts": res.starts,
    }
    return echo, results


COMMANDS = {
    "classify": cmd_classify,
    "witness": cmd_witness,
    "attack": cmd_attack,
    "survey": cmd_survey,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=TOL_ANALYTIC, help="decision tolerance (default 1e-9)")
    common.add_argument("--seed", type=int, default=42, help="random seed (default 42)")
    common.add_argument("--out", help="also write the report to this path (atomic)")
    common.add_argument("--json", action="store_true", help="print the report to stdout even with --out")

    assistant = argparse.ArgumentParser(add_help=False)
    group = assistant.add_argument_group("assistant unitary W")
    group.add_argument("--preset", choices=sorted(PRESETS))
    group.add_argument("--w", help="coefficients w0,w1,w2,w3")
    group.add_argument("--w-json", help='{"w": [...]} literal or file')
    group.add_argument("--w-matrix", help='{"m": [[...], [...]]} literal or file')

    scheme = argparse.ArgumentParser(add_help=False)
    group = scheme.add_argument_group("rotations")
    group.add_argument("--three-pauli", action="store_true", help="rotations sigma_1, sigma_2, sigma_3")
    group.add_argument("--rotations", help="two names from id,sx,sy,sz (default sx,sz)")
    group.add_argument("--rotations-json", help='{"rotations": [matrix, matrix]} literal or file')

    parser = argparse.ArgumentParser(prog="aqsforge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("classify", parents=[common, assistant], help="alpha/beta/gamma classification")
    sub.add_parser("witness", parents=[common, assistant, scheme], help="construct a forgery witness")
    p = sub.add_parser("attack", parents=[common, assistant, scheme], help="replay a forgery on every key")
    p.add_argument("--witness", help="witness JSON (literal or file); constructed when omitted")
    p.add_argument("--swap-test", action="store_true", help="verify with a simulated swap test")
    p.add_argument("--copies", type=int, default=100, help="swap-test copies per key")
    p = sub.add_parser("survey", parents=[common], help="Haar survey of assistant unitaries")
    p.add_argument("--count", type=int, default=100000)
    p = sub.add_parser("oracle", parents=[common, assistant, scheme], help="brute-force forgery search")
    p.add_argument("--starts", type=int, default=1000)
    p.add_argument("--lemma1", action="store_true", help="start Q with two zero coefficients")
    return parser


def run(argv: list[str] | None = None) -> tuple[int, dict | None]:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        echo, results = COMMANDS[args.command](args)
    except UsageError as exc:
        parser.error(str(exc))
    except (ContractViolation, UnsupportedInput) as exc:
        print(f"aqsforge: data error: {exc}", file=sys.stderr)
        return EXIT_DATA, None
    except InconsistencyError as exc:
        print(f"aqsforge: internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT, None
    echo = {**echo, "tol": args.tol, "seed": args.seed}
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": args.command,
        "inputs": echo,
        "results": results,
        "timing_ms": int(round(1000 * (time.perf_counter() - start))),
    }
    text = dumps(report) + "\n"
    if args.out:
        write_report(text, args.out)
    if args.json or not args.out:
        sys.stdout.write(text)
    return EXIT_OK, report


def main(argv: list[str] | None = None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
