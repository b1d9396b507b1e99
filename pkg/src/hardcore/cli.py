"""``hardcore`` command-line entry point.

Exit codes: 0 success, 2 parse errors, 3 size-cap errors, 4 numerical errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import complex as cplx
from .errors import HardcoreError, ParseError
from .fock import enumerate_basis
from .gadgets import FLAVORS, effective_matrix, verify_simulation, xz_target
from .graph import ConstraintGraph, loads_graph
from .operators import DENSE_LIMIT, SEED, SparseHermitian, assemble_hopping, lowest_eigenpairs, pauli_decompose

HEAD = 8


@dataclass
class RunConfig:
    command: str
    input: Path | None = None
    output: Path | None = None
    k: int | None = None
    deltas: list[float] = field(default_factory=list)
    flavor: str | None = None
    method: str = "auto"
    tol: float | None = None
    seed: int = SEED
    which: str | None = None

    def __post_init__(self):
        if self.tol is not None and not self.tol > 0:
            raise ParseError("--tol must be positive")
        if any(b <= a for a, b in zip(self.deltas, self.deltas[1:])):
            raise ParseError("--deltas must be strictly increasing")


# Serialization ---------------------------------------------------------------


def _encode(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "null"
        return format(x, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """JSON text with every float printed to 17 significant digits."""
    return _encode(obj) + "\n"


# Commands --------------------------------------------------------------------


def _read(path: Path | None) -> str:
    if path is None:
        raise ParseError("--input is required")
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _sector_report(op: SparseHermitian, cfg: RunConfig) -> dict:
    if op.dim == 0:
        return {"dim": 0, "min_eig": None, "spectrum_head": []}
    count = min(HEAD, op.dim)
    dense = cfg.method == "dense" or (cfg.method == "auto" and op.dim <= DENSE_LIMIT)
    vals, _ = lowest_eigenpairs(op, count if dense else 1, method=cfg.method, seed=cfg.seed, tol=cfg.tol or 0.0)
    out = {"dim": op.dim, "min_eig": float(vals[0])}
    out["spectrum_head"] = [float(v) for v in vals] if dense else []
    return out


def _hamiltonian(graph: ConstraintGraph, k: int, flavor: str) -> SparseHermitian:
    if flavor == "laplacian":
        return cplx.build_susy_hamiltonian(graph, k)
    return assemble_hopping(graph, enumerate_basis(graph, k))


def cmd_spectrum(cfg: RunConfig) -> dict:
    graph = loads_graph(_read(cfg.input))
    k = 1 if cfg.k is None else cfg.k
    flavor = cfg.flavor or "fis"
    report = {"command": "spectrum", "flavor": flavor, "k": k}
    report.update(_sector_report(_hamiltonian(graph, k, flavor), cfg))
    return report


def cmd_homology(cfg: RunConfig) -> dict:
    graph = loads_graph(_read(cfg.input))
    k = 1 if cfg.k is None else cfg.k
    report = {"command": "homology", "k": k}
    report.update(_sector_report(cplx.laplacian(graph, k), cfg))
    report["betti"] = cplx.betti(graph, k, tol=cfg.tol or cplx.RANK_TOL)
    return report


def cmd_effective(cfg: RunConfig) -> dict:
    flavor = cfg.flavor or "fis"
    which = cfg.which or "vmain"
    m = effective_matrix(flavor, which)
    ps = pauli_decompose(m, tol=1e-12)
    return {
        "command": "effective",
        "flavor": flavor,
        "which": which,
        "matrix": [[float(x) for x in row] for row in m],
        "pauli": [{"coeff": c, "word": w} for c, w in ps.terms],
    }


def load_target(text: str):
    """Parse ``{"n_qubits", "edges": [[i, j, mu], ...], "flavor"}``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        n = int(doc["n_qubits"])
        flavor = str(doc.get("flavor", "fis"))
        couplings = {}
        for row in doc.get("edges", []):
            i, j, mu = int(row[0]), int(row[1]), float(row[2])
            couplings[(min(i, j), max(i, j))] = couplings.get((min(i, j), max(i, j)), 0.0) + mu
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ParseError(f"invalid target document: {exc}") from None
    if flavor not in FLAVORS:
        raise ParseError(f"unknown flavor {flavor!r}")
    if n < 1:
        raise ParseError("n_qubits must be positive")
    return n, couplings, flavor


def cmd_compile_verify(cfg: RunConfig):
    n, couplings, flavor = load_target(_read(cfg.input))
    flavor = cfg.flavor or flavor
    deltas = cfg.deltas or [1e2, 1e3, 1e4]
    target = xz_target(n, couplings, flavor)
    report = verify_simulation(target, deltas, flavor, method=cfg.method, seed=cfg.seed)
    out = {"command": "compile-verify", "target": [{"coeff": c, "word": w} for c, w in target.terms]}
    out.update(report.to_dict())
    return out, report.to_csv()


# Argument parsing ------------------------------------------------------------


def _deltas(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid delta list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", type=Path)
    common.add_argument("--output", type=Path)
    common.add_argument("--k", type=int)
    common.add_argument("--deltas", type=_deltas, default=[])
    common.add_argument("--flavor", choices=FLAVORS)
    common.add_argument("--method", choices=("auto", "dense", "iterative"), default="auto")
    common.add_argument("--seed", type=lambda s: int(s, 0), default=SEED)
    common.add_argument("--tol", type=float)

    parser = argparse.ArgumentParser(prog="hardcore", description="Hard-core fermion spectra, independence-complex homology and XZ gadget compilation.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="lowest eigenvalues of a graph Hamiltonian in a k-sector")
    sub.add_parser("homology", parents=[common], help="Laplacian spectrum and reduced Betti number at level k")
    eff = sub.add_parser("effective", parents=[common], help="effective 4x4 interaction of the two-qubit gadget")
    eff.add_argument("which", nargs="?", default="vmain", choices=("v1p", "v1", "v2", "vmain", "vextra"))
    sub.add_parser("compile-verify", parents=[common], help="compile an XZ target and sweep delta")
    return parser


COMMANDS = {
    "spectrum": cmd_spectrum,
    "homology": cmd_homology,
    "effective": cmd_effective,
}


def run(cfg: RunConfig) -> tuple[str, str | None]:
    if cfg.command == "compile-verify":
        report, csv_text = cmd_compile_verify(cfg)
        return dumps(report), csv_text
    return dumps(COMMANDS[cfg.command](cfg)), None


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(
            command=args.command,
            input=args.input,
            output=args.output,
            k=args.k,
            deltas=args.deltas,
            flavor=args.flavor,
            method=args.method,
            tol=args.tol,
            seed=args.seed,
            which=getattr(args, "which", None),
        )
        text, csv_text = run(cfg)
    except HardcoreError as exc:
        print(f"hardcore: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"hardcore: error: {exc}", file=sys.stderr)
        return ParseError.exit_code
    if cfg.output is None:
        sys.stdout.write(text)
    else:
        cfg.output.write_text(text)
        if csv_text is not None:
            cfg.output.with_suffix(".csv").write_text(csv_text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
