"""workdeficit command line.

    workdeficit gen --family phi-mixture --p 0.8 --out rho.json
    workdeficit compute rho.json --mode one-way --seed 0
    workdeficit oracle rho.json --grid-theta 181 --grid-phi 360
    workdeficit protocol rho.json --builtin cc-measure-send

Reports go to stdout (or --out); diagnostics go to stderr.
Exit codes: 0 ok, 2 unreadable input or bad arguments, 3 invalid state,
4 state does not fit the requested mode.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path
from typing import Any, Optional

import numpy as np

from workdeficit import __version__, deficit, protocol, states
from workdeficit.channels import BasisAngles
from workdeficit.errors import (
    DimensionError,
    FamilyMismatchError,
    InvalidStateError,
    LocalityError,
)
from workdeficit.qstate import BipartiteState, LocalBasis, PureState, partial_trace, von_neumann_entropy

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INVALID = 3
EXIT_MISMATCH = 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# -- JSON with 17 significant digits ----------------------------------------------

def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite number {x!r} cannot be serialized")
    s = format(x, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """json.dumps with every float written using 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
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
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# -- state files -------------------------------------------------------------------

def state_to_record(s: BipartiteState) -> dict:
    return {
        "dims": [s.dim_a, s.dim_b],
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in s.rho],
    }


def state_from_record(rec: Any) -> BipartiteState:
    """Parse a StateFile object; malformed input raises CliError(EXIT_PARSE)."""
    try:
        da, db = (int(x) for x in rec["dims"])
        arr = np.asarray(rec["matrix"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"malformed state file: {exc}", EXIT_PARSE) from exc
    d = da * db
    if da < 1 or db < 1 or arr.shape != (d, d, 2):
        raise CliError(
            f"matrix shape {arr.shape} does not match dims [{da}, {db}] "
            f"(expected {d}x{d} [re, im] pairs)",
            EXIT_PARSE,
        )
    return BipartiteState(arr[..., 0] + 1j * arr[..., 1], da, db)


def load_state(path: str) -> BipartiteState:
    try:
        text = Path(path).read_text(encoding="utf-8")
        rec = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read state file {path}: {exc}", EXIT_PARSE) from exc
    s = state_from_record(rec)
    diag = states.validate(s)
    if not diag.ok:
        raise CliError(
            "invalid state: hermitian residual {:.3g}, trace residual {:.3g}, "
            "min eigenvalue {:.3g}".format(diag.hermitian_residual, diag.trace_residual, diag.min_eigenvalue),
            EXIT_INVALID,
        )
    return s


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text + "\n")


def _basis_record(b: BasisAngles) -> dict:
    if b.dim == 2:
        return {"dim": 2, "theta": b.theta, "phi": b.phi}
    return {"dim": b.dim, "params": list(b.params)}


def _header(command: str, s: BipartiteState, seed: Optional[int] = None) -> dict:
    rec = {"tool": "workdeficit", "version": __version__, "command": command, "dims": [s.dim_a, s.dim_b]}
    if seed is not None:
        rec["seed"] = seed
    return rec


# -- commands -----------------------------------------------------------------------

def _parse_matrix_arg(text: str, name: str) -> np.ndarray:
    try:
        arr = np.asarray(json.loads(text))
    except json.JSONDecodeError as exc:
        raise CliError(f"--{name} is not valid JSON: {exc}", EXIT_PARSE) from exc
    if arr.ndim == 3 and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    return arr


def cmd_gen(args) -> dict:
    family = args.family.replace("-", "_")
    spec_kwargs: dict = {"family": family, "seed": args.seed}
    if args.dims:
        spec_kwargs["dim_a"], spec_kwargs["dim_b"] = args.dims
    if args.d is not None:
        spec_kwargs["d"] = args.d
    if args.p is not None:
        spec_kwargs["p"] = args.p
    if args.rank is not None:
        spec_kwargs["rank"] = args.rank
    if args.sigma is not None:
        spec_kwargs["sigma"] = _parse_matrix_arg(args.sigma, "sigma")
    if args.probs is not None:
        spec_kwargs["probs"] = _parse_matrix_arg(args.probs, "probs").real
    try:
        s = states.gen(states.FamilySpec(**spec_kwargs))
    except (ValueError, DimensionError) as exc:
        raise CliError(f"bad family parameters: {exc}", EXIT_PARSE) from exc
    if isinstance(s, PureState):
        s = s.density()
    return state_to_record(s)


def _config(args) -> deficit.OptimizerConfig:
    try:
        return deficit.OptimizerConfig(
            restarts=args.restarts,
            max_iters=args.max_iters,
            f_tol=args.f_tol,
            x_tol=args.x_tol,
            seed=args.seed,
        )
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PARSE) from exc


def _as_pure(s: BipartiteState) -> PureState:
    w, v = np.linalg.eigh(s.rho)
    if w[-1] < 1 - 1e-9:
        raise FamilyMismatchError(f"state is not pure (largest eigenvalue {w[-1]:.12g})")
    psi = v[:, -1]
    return PureState(psi / np.linalg.norm(psi), s.dim_a, s.dim_b)


def _work_fields(s: BipartiteState) -> dict:
    try:
        return {"n": s.n_qubits, "w_total": deficit.total_work(s)}
    except DimensionError:
        return {"n": None, "w_total": None}


def cmd_compute(args) -> dict:
    s = load_state(args.state)
    rec = _header("compute", s, args.seed if args.mode == "one-way" else None)
    rec["mode"] = args.mode
    if args.mode == "one-way":
        r = deficit.one_way_deficit(s, _config(args), reverse=args.reverse)
        rec.update({
            "n": r.n,
            "w_total": r.w_total,
            "w_local": r.w_local,
            "s_a": r.s_a,
            "s_b": r.s_b,
            "s_total": r.s_total,
            "delta_one_way": r.delta_one_way,
            "lower_bound": r.lower_bound,
            "direction": r.direction,
            "best_basis": _basis_record(r.best_basis),
            "closed_form": r.closed_form,
            "closed_form_family": r.closed_form_family,
            "optimizer": {
                "restarts": r.restarts,
                "max_iters": args.max_iters,
                "f_tol": args.f_tol,
                "x_tol": args.x_tol,
                "winner_restart": r.winner_restart,
                "iterations": r.iterations,
                "evaluations": r.evaluations,
                "restart_values": list(r.restart_values),
            },
        })
        return rec
    s_a = von_neumann_entropy(partial_trace(s, "A"))
    s_b = von_neumann_entropy(partial_trace(s, "B"))
    s_total = von_neumann_entropy(s.rho)
    rec.update(_work_fields(s))
    rec.update({"s_a": s_a, "s_b": s_b, "s_total": s_total})
    if args.mode == "bound":
        rec["lower_bound"] = deficit.deficit_lower_bound(s)
    elif args.mode == "pure":
        rec["pure_state_deficit"] = deficit.pure_state_deficit(_as_pure(s))
    elif args.mode == "maxcorr":
        rec["maxcorr_deficit"] = deficit.maxcorr_deficit(s)
    return rec


def cmd_oracle(args) -> dict:
    s = load_state(args.state)
    g = deficit.grid_search(s, args.grid_theta, args.grid_phi)
    rec = _header("oracle", s)
    rec.update({
        "grid_theta": g.grid_theta,
        "grid_phi": g.grid_phi,
        "delta_grid": g.value,
        "theta": g.theta,
        "phi": g.phi,
    })
    return rec


def _load_script(path: str) -> list:
    try:
        recs = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(recs, list):
            raise ValueError("script must be a JSON array of step records")
        return [protocol.step_from_record(r) for r in recs]
    except (OSError, json.JSONDecodeError, ValueError, KeyError, TypeError) as exc:
        raise CliError(f"cannot read protocol script {path}: {exc}", EXIT_PARSE) from exc


def cmd_protocol(args) -> dict:
    s = load_state(args.state)
    ledger = protocol.ledger_init(s)
    if args.script:
        steps = _load_script(args.script)
        source = args.script
    else:
        basis = None
        if args.builtin.replace("-", "_") == "schmidt_dephase":
            _, v = np.linalg.eigh(partial_trace(s, "A"))
            basis = LocalBasis(v[:, ::-1])
        steps = protocol.builtin_script(args.builtin, ledger, basis)
        source = args.builtin
    final = protocol.replay(ledger, steps)
    result = protocol.ledger_finalize(final)
    w_total = deficit.total_work(s)
    rec = _header("protocol", s)
    rec.update({
        "script": source,
        "steps": [protocol.step_to_record(st) for st in steps],
        "n": result.n,
        "k": result.k,
        "w_total": w_total,
        "w_local": result.w_local,
        "delta": w_total - result.w_local,
        "s_a_final": result.s_a_final,
        "s_b_final": result.s_b_final,
        "holders_final": list(final.holders),
    })
    return rec


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="workdeficit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a state file for one of the built-in families")
    g.add_argument("--family", required=True, choices=[f.replace("_", "-") for f in states.FAMILIES])
    g.add_argument("--d", type=int, help="local dimension for max-entangled")
    g.add_argument("--p", type=float, help="mixing weight for phi-mixture")
    g.add_argument("--dims", type=int, nargs=2, metavar=("DA", "DB"), help="dimensions for random families")
    g.add_argument("--rank", type=int, help="rank for random-mixed")
    g.add_argument("--sigma", help="JSON matrix for max-correlated (real entries or [re, im] pairs)")
    g.add_argument("--probs", help="JSON probability table for classically-correlated")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("compute", help="deficit, bound or closed forms for a state file")
    c.add_argument("state")
    c.add_argument("--mode", choices=["one-way", "bound", "pure", "maxcorr"], default="one-way")
    c.add_argument("--restarts", type=int, default=32)
    c.add_argument("--max-iters", type=int, default=2000)
    c.add_argument("--f-tol", type=float, default=1e-10)
    c.add_argument("--x-tol", type=float, default=1e-8)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--reverse", action="store_true", help="let Bob dephase and send instead of Alice")
    c.add_argument("--out")
    c.set_defaults(func=cmd_compute)

    o = sub.add_parser("oracle", help="grid search over Alice's qubit bases")
    o.add_argument("state")
    o.add_argument("--grid-theta", type=int, default=181)
    o.add_argument("--grid-phi", type=int, default=360)
    o.add_argument("--out")
    o.set_defaults(func=cmd_oracle)

    p = sub.add_parser("protocol", help="replay a protocol script on a state file")
    p.add_argument("state")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--script", help="JSON array of step records")
    src.add_argument("--builtin", choices=["cc-measure-send", "schmidt-dephase", "maxcorr-dephase"])
    p.add_argument("--out")
    p.set_defaults(func=cmd_protocol)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        rec = args.func(args)
        if args.command != "gen":
            rec["duration_s"] = time.perf_counter() - start
        text = dumps(rec)
    except CliError as exc:
        print(f"workdeficit: {exc}", file=sys.stderr)
        return exc.code
    except InvalidStateError as exc:
        print(f"workdeficit: invalid state: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (FamilyMismatchError, DimensionError, LocalityError) as exc:
        print(f"workdeficit: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    _emit(text, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
