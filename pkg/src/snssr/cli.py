"""Command-line front end: ``snssr <command> [flags]``.

Every payload carries ``schema_version`` and validates against
``schemas/output-v1.json``.  Floats are written with 12 significant digits so
repeated runs produce identical bytes.  Exit codes: 0 success, 2 invalid
input, 3 compute budget exceeded.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys

from .core import BudgetError, ValidationError, is_ppt
from .entanglement import (
    bell_ensemble_constrained_entanglement,
    bell_pair,
    constrained_entanglement_bruteforce,
    ensemble_state,
    multicopy_recovery,
)
from .frames import activation_demo, distillation_demo, rf_gram, shared_rf_state
from .symmetry import spin_sectors

SCHEMA_VERSION = "output-v1"
EXIT_OK, EXIT_VALIDATION, EXIT_BUDGET = 0, 2, 3
BRUTE_MAX_N = 5


def fmt(x: float) -> str:
    return format(float(x), ".12g")


def _rounded(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return float(fmt(obj))
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return _rounded(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_json(command: str, payload: dict) -> str:
    body = {"schema_version": SCHEMA_VERSION, "command": command, **payload}
    return json.dumps(_rounded(body), ensure_ascii=False, indent=2) + "\n"


def to_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(v if isinstance(v, str) else (str(v) if isinstance(v, int) else fmt(v)) for v in row) + "\n")
    return buf.getvalue()


# --------------------------------------------------------------------------
# commands; each returns the text to emit


def cmd_decompose(args) -> str:
    sectors = [{"j": j, "d_j": d, "rank": d * round(2 * j + 1)} for j, d in spin_sectors(args.n)]
    if args.format == "csv":
        return to_csv(["j", "d_j", "rank"], [(s["j"], s["d_j"], s["rank"]) for s in sectors])
    return to_json("decompose", {"N": args.n, "sectors": sectors})


def cmd_entanglement(args) -> str:
    if not 0 <= args.alpha_sq <= 1:
        raise ValidationError("alpha_sq must lie in [0, 1]")
    alpha, beta = math.sqrt(args.alpha_sq), math.sqrt(1 - args.alpha_sq)
    if args.mode == "brute":
        if args.n > BRUTE_MAX_N:
            raise BudgetError(f"brute mode is limited to N <= {BRUTE_MAX_N}")
        if args.n < 1:
            raise ValidationError("N must be ≥ 1")
        report = constrained_entanglement_bruteforce(ensemble_state(bell_pair(alpha, beta), args.n))
    else:
        report = bell_ensemble_constrained_entanglement(alpha, beta, args.n)
    if args.format == "csv":
        return to_csv(
            ["j_a", "j_b", "weight", "entanglement"],
            [(r.label_a, r.label_b, r.weight, r.entanglement) for r in report.rows],
        )
    return to_json("entanglement", {"mode": args.mode, "alpha_sq": args.alpha_sq, **report.to_dict()})


def cmd_recover(args) -> str:
    if args.c_max < 1:
        raise ValidationError("C_max must be ≥ 1")
    rows = []
    for c in range(1, args.c_max + 1):
        e, full = multicopy_recovery(c)
        rows.append((c, e, full - e))
    if args.format == "json":
        return to_json("recover", {"rows": [{"C": c, "E": e, "loss": loss} for c, e, loss in rows]})
    return to_csv(["C", "E", "loss"], rows)


def cmd_refframe(args) -> str:
    fam = rf_gram(args.n, args.d)
    info = fam.to_dict()
    if args.format == "csv":
        return to_csv(["N", "d", "D", "max_offdiag_overlap_sq", "perfect"],
                      [(info["N"], info["d"], info["D"], info["max_offdiag_overlap_sq"], str(info["perfect"]).lower())])
    return to_json("refframe", info)


def cmd_demos(args) -> str:
    before, after = activation_demo()
    one, two = distillation_demo()
    payload = {
        "activation": {"before": before, "after": after},
        "distillation": {"one_copy": one, "two_copies": two},
        "shared_rf_ppt": bool(is_ppt(shared_rf_state(2, "pure"))),
    }
    return to_json("demos", payload)


def cmd_bell(args) -> str:
    from .bell import violation_scan

    res = violation_scan(args.j, grid=args.grid, mode=args.mode)
    if args.format == "csv":
        return to_csv(["theta", "m_exact", "m_approx"], res.csv_rows())
    return to_json("bell", res.to_dict())


COMMANDS = {
    "decompose": cmd_decompose,
    "entanglement": cmd_entanglement,
    "recover": cmd_recover,
    "refframe": cmd_refframe,
    "demos": cmd_demos,
    "bell": cmd_bell,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=["json", "csv"], default=None)
    common.add_argument("--out", default=None, help="output file (default: standard output)")
    common.add_argument("--seed", type=int, default=None, help="accepted for scripting; all commands are deterministic")

    parser = _Parser(prog="snssr", description="Permutation superselection toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("decompose", parents=[common], help="spin sectors of N qubits")
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("entanglement", parents=[common], help="constrained entanglement of N Bell pairs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha-sq", type=float, default=0.5)
    p.add_argument("--mode", choices=["closed", "brute"], default="closed")

    p = sub.add_parser("recover", parents=[common], help="multi-copy recovery table")
    p.add_argument("--c-max", type=int, default=20)

    p = sub.add_parser("refframe", parents=[common], help="Gram diagnostics of the fiducial frame family")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)

    sub.add_parser("demos", parents=[common], help="activation, distillation and shared-frame checks")

    p = sub.add_parser("bell", parents=[common], help="Bell violation scan for the singlet ensemble")
    p.add_argument("--j", type=float, required=True)
    p.add_argument("--grid", type=int, default=400)
    p.add_argument("--mode", choices=["exact", "approx"], default="exact")
    return parser


DEFAULT_FORMAT = {"recover": "csv"}


def _error_payload(kind: str, message: str) -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION, "error": {"type": kind, "message": message}},
                      ensure_ascii=False) + "\n"


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    out = None
    try:
        args = build_parser().parse_args(argv)
        out = args.out
        if args.format is None:
            args.format = DEFAULT_FORMAT.get(args.command, "json")
        text = COMMANDS[args.command](args)
    except BudgetError as exc:
        _emit(_error_payload("budget", str(exc)), out)
        return EXIT_BUDGET
    except (ValidationError, ValueError) as exc:
        _emit(_error_payload("validation", str(exc)), out)
        return EXIT_VALIDATION
    _emit(text, out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
