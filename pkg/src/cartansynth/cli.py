"""Command-line interface: ``cartansynth {algebra,decompose,synth,verify,anderson}``.

Exit codes: 0 success, 1 usage or input error, 2 verification failure,
3 resource cap exceeded.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import platform
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__, kernels
from .algebra import AlgebraCapExceeded, expected_dimension, generate_algebra, verify_structure
from .anderson import DEFAULT_BUDGETS, anderson_run
from .cartan import CartanError
from .khk import DecompositionResult, SolveError, SolverConfig
from .models import (KINDS, ModelError, ModelParams, build_model, hamiltonian_to_json, normalize_hamiltonian,
                     parse_hamiltonian_file)
from .oracle import OracleCapExceeded, Spectral, circuit_unitary, unitary_distance
from .pauli import PauliError
from .pipeline import ANSATZ, compile_hamiltonian, evolution_circuit, k_circuit, reduced_k_layer

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_CAP = 0, 1, 2, 3

log = logging.getLogger("cartansynth")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_times(text: str) -> list[float]:
    """``0.5,5,50`` or ``start:stop:count`` (inclusive grid)."""
    try:
        if ":" in text:
            a, b, k = text.split(":")
            return [float(x) for x in np.linspace(float(a), float(b), int(k))]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"cannot parse times {text!r}") from None


def _model_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model")
    g.add_argument("--model", choices=[k for k in KINDS if k != "File"], help="built-in chain model")
    g.add_argument("--file", type=Path, help="JSON Hamiltonian file instead of --model")
    g.add_argument("--n", type=int, help="number of sites")
    g.add_argument("--sigma", type=float, default=0.0, help="std. dev. of random fields (default 0)")
    g.add_argument("--seed", type=int, default=0, help="seed for the random fields (default 0)")
    g.add_argument("--fields", help="comma-separated site fields (overrides --sigma/--seed)")
    g.add_argument("--normalize", action="store_true", help="scale H so that tr(H^2) = 1")
    g.add_argument("--cap", type=int, default=None, help="algebra size cap (default 16 n^2)")


def _solver_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("solver")
    g.add_argument("--gamma", type=float, default=SolverConfig.gamma, help="weight base of v (default ln 2)")
    g.add_argument("--grad-tol", type=float, default=SolverConfig.grad_tol)
    g.add_argument("--residual-tol", type=float, default=SolverConfig.residual_tol)
    g.add_argument("--solver-seed", type=int, default=SolverConfig.seed)
    g.add_argument("--max-restarts", type=int, default=SolverConfig.max_restarts)
    g.add_argument("--h-seed", default="0", help="index or label of the m string that seeds h")
    g.add_argument("--ansatz", choices=ANSATZ, default="auto", help="ordering of K generators")
    g.add_argument("--cache-dir", type=Path, default=None,
                   help="decomposition cache (default $CARTANSYNTH_CACHE or ~/.cache/cartansynth)")
    g.add_argument("--no-cache", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cartansynth", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"cartansynth {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("algebra", help="closure dimension vs. closed form")
    _model_args(a)
    a.add_argument("--list", action="store_true", help="print the basis")
    a.add_argument("--format", choices=("text", "json"), default="text")

    d = sub.add_parser("decompose", help="find K and h, write the result as JSON")
    _model_args(d)
    _solver_args(d)
    d.add_argument("--out", type=Path, help="output JSON (default stdout)")

    s = sub.add_parser("synth", help="emit U(t) circuits")
    _model_args(s)
    _solver_args(s)
    s.add_argument("--time", type=float, help="single evolution time")
    s.add_argument("--times", help="times as a,b,c or start:stop:count")
    s.add_argument("--reduce", action="store_true", help="also emit the compressed TFXY circuits")
    s.add_argument("--format", choices=("qasm", "json"), default="qasm")
    s.add_argument("--out", type=Path, default=Path("."), help="output directory")

    v = sub.add_parser("verify", help="compare circuits with the dense exact evolution")
    _model_args(v)
    _solver_args(v)
    v.add_argument("--result", type=Path, help="decomposition JSON to check instead of solving")
    v.add_argument("--times", default="0.5,5,50")
    v.add_argument("--time", type=float)
    v.add_argument("--reduce", action="store_true")
    v.add_argument("--threshold", type=float, default=1e-5)
    v.add_argument("--out", type=Path, help="JSON report path")

    e = sub.add_parser("anderson", help="excitation spread: exact vs Cartan vs Trotter, as CSV")
    e.add_argument("--n", type=int, default=10)
    e.add_argument("--sigma", type=float, default=0.0)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--times", default="0:40:81")
    e.add_argument("--budgets", default=",".join(map(str, DEFAULT_BUDGETS)), help="Trotter step counts")
    _solver_args(e)
    e.add_argument("--out", type=Path, help="CSV path (default stdout)")
    return p


# --- helpers ---------------------------------------------------------------------

def load_hamiltonian(args):
    if (args.model is None) == (args.file is None):
        raise UsageError("give exactly one of --model or --file")
    if args.file is not None:
        try:
            text = args.file.read_text()
        except OSError as e:
            raise UsageError(f"cannot read {args.file}: {e.strerror}") from None
        H = parse_hamiltonian_file(text)
        if args.normalize:
            H = normalize_hamiltonian(H)
        return H
    if args.n is None:
        raise UsageError("--model needs --n")
    fields = None
    if args.fields is not None:
        try:
            fields = [float(x) for x in args.fields.split(",")]
        except ValueError:
            raise UsageError(f"cannot parse fields {args.fields!r}") from None
    return build_model(ModelParams(args.model, args.n, fields=fields, sigma=args.sigma, seed=args.seed,
                                   normalize=args.normalize))


def solver_config(args) -> SolverConfig:
    return SolverConfig(gamma=args.gamma, grad_tol=args.grad_tol, residual_tol=args.residual_tol,
                        seed=args.solver_seed, max_restarts=args.max_restarts)


def _h_seed(args):
    return int(args.h_seed) if args.h_seed.lstrip("-").isdigit() else args.h_seed


def cache_key(H, cfg: SolverConfig, args) -> str:
    doc = {
        "H": json.loads(hamiltonian_to_json(H)),
        "closure": [p.label for p in getattr(H, "closure_strings", ())],
        "gamma": cfg.gamma, "grad_tol": cfg.grad_tol, "residual_tol": cfg.residual_tol,
        "seed": cfg.seed, "max_restarts": cfg.max_restarts,
        "h_seed": args.h_seed, "ansatz": args.ansatz, "version": __version__,
    }
    return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()[:24]


def _cache_dir(args) -> Path:
    if args.cache_dir is not None:
        return args.cache_dir
    env = os.environ.get("CARTANSYNTH_CACHE")
    return Path(env) if env else Path.home() / ".cache" / "cartansynth"


def decompose_cached(H, args) -> tuple[DecompositionResult, bool]:
    """Solve once per (model, tolerances, seed); later calls read the cached JSON."""
    cfg = solver_config(args)
    path = None
    if not args.no_cache:
        path = _cache_dir(args) / f"{cache_key(H, cfg, args)}.json"
        if path.exists():
            try:
                return DecompositionResult.from_dict(json.loads(path.read_text())), True
            except (ValueError, KeyError):
                log.warning("ignoring unreadable cache entry %s", path)
    comp = compile_hamiltonian(H, cfg, args.cap, _h_seed(args), args.ansatz)
    if path is not None:
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(comp.result.to_dict()))
        except OSError as e:
            log.warning("could not write cache %s: %s", path, e)
    return comp.result, False


def write_manifest(path: Path, args, outputs: Sequence[str], extra: dict | None = None) -> None:
    cfg = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items()}
    doc = {
        "cartansynth": __version__,
        "kernel_backend": kernels.BACKEND,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "config": cfg,
        "outputs": list(outputs),
    }
    if extra:
        doc.update(extra)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)


def _times(args) -> list[float]:
    if getattr(args, "time", None) is not None:
        return [args.time]
    if args.times is None:
        raise UsageError("give --time or --times")
    ts = parse_times(args.times)
    if not ts:
        raise UsageError("empty time list")
    return ts


# --- commands --------------------------------------------------------------------

def cmd_algebra(args) -> int:
    H = load_hamiltonian(args)
    g = generate_algebra(H, args.cap)
    kind = getattr(H, "kind", "File")
    report: dict = {"model": kind, "n": H.n, "dimension": len(g)}
    code = EXIT_OK
    if kind != "File":
        exp = expected_dimension(kind, H.n)
        report["expected"] = exp
        report["match"] = exp == len(g)
        st = verify_structure(g, kind)
        report["structure_ok"] = st.ok
        if exp <= 0:
            report["note"] = f"closed form gives {exp} at n={H.n}, which is degenerate"
        if not report["match"]:
            code = EXIT_VERIFY
    if args.list:
        report["basis"] = g.labels
    if args.format == "json":
        print(json.dumps(report, indent=2))
    else:
        line = f"{kind} n={H.n}: dim g = {len(g)}"
        if "expected" in report:
            line += f" (closed form {report['expected']}, {'match' if report['match'] else 'MISMATCH'})"
        print(line)
        if "note" in report:
            print(f"note: {report['note']}")
        for lab in report.get("basis", []):
            print(lab)
    return code


def cmd_decompose(args) -> int:
    H = load_hamiltonian(args)
    result, cached = decompose_cached(H, args)
    doc = result.to_dict()
    doc["hamiltonian"] = json.loads(hamiltonian_to_json(H))
    doc["cached"] = cached
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    if args.out is not None:
        write_manifest(args.out.with_suffix(".manifest.json"), args, [str(args.out)])
    ok = result.residual_off_h <= args.residual_tol * H.norm()
    print(f"residual_off_h = {result.residual_off_h:.3e} ({'ok' if ok else 'above tolerance'})", file=sys.stderr)
    return EXIT_OK if ok else EXIT_VERIFY


def _tag(t: float) -> str:
    return f"{t:.6g}".replace("-", "m")


def cmd_synth(args) -> int:
    H = load_hamiltonian(args)
    times = _times(args)
    result, _ = decompose_cached(H, args)
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    ext = args.format
    written: list[str] = []
    counts: dict = {}

    def save(c, name):
        p = out / f"{name}.{ext}"
        p.write_text(c.to_qasm() if ext == "qasm" else c.to_json() + "\n")
        written.append(str(p))
        counts[name] = c.cnot_count

    variants = [("raw", False)]
    if args.reduce:
        if reduced_k_layer(result) is None:
            log.warning("K is not TFXY-shaped; only the raw circuit is emitted")
        else:
            variants.append(("reduced", True))
    for name, red in variants:
        save(k_circuit(result, red), f"K_{name}")
        for t in times:
            save(evolution_circuit(result, t, red), f"U_{name}_t{_tag(t)}")
    for name, c in counts.items():
        print(f"{name}: {c} CNOTs")
    write_manifest(out / "manifest.json", args, written, {"cnot_counts": counts})
    return EXIT_OK


def cmd_verify(args) -> int:
    H = load_hamiltonian(args)
    times = _times(args)
    if args.result is not None:
        try:
            result = DecompositionResult.from_dict(json.loads(args.result.read_text()))
        except (OSError, ValueError, KeyError) as e:
            raise UsageError(f"cannot load {args.result}: {e}") from None
        if result.n != H.n:
            raise UsageError(f"result is for {result.n} qubits, Hamiltonian has {H.n}")
    else:
        result, _ = decompose_cached(H, args)
    spec = Spectral(H)
    rows = []
    for t in times:
        d = unitary_distance(circuit_unitary(evolution_circuit(result, t, args.reduce)), spec.unitary(t))
        rows.append({"t": t, "distance": d, "ok": d <= args.threshold})
        print(f"t = {t:<10.6g} distance = {d:.3e}  {'ok' if d <= args.threshold else 'FAIL'}")
    ok = all(r["ok"] for r in rows)
    if args.out is not None:
        _emit(json.dumps({"threshold": args.threshold, "rows": rows, "ok": ok}, indent=2) + "\n", args.out)
        write_manifest(args.out.with_suffix(".manifest.json"), args, [str(args.out)])
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_anderson(args) -> int:
    times = parse_times(args.times)
    try:
        budgets = [int(b) for b in args.budgets.split(",") if b.strip()]
    except ValueError:
        raise UsageError(f"cannot parse budgets {args.budgets!r}") from None
    if any(b < 1 for b in budgets):
        raise UsageError("Trotter budgets must be >= 1 step")
    series = anderson_run(args.n, args.sigma, args.seed, times, budgets, solver_config(args))
    _emit(series.to_csv(), args.out)
    if args.out is not None:
        write_manifest(args.out.with_suffix(".manifest.json"), args, [str(args.out)],
                       {"trotter_steps": {str(k): v for k, v in series.trotter_steps.items()},
                        "cartan_cnots": series.cartan_cnots})
    return EXIT_OK


COMMANDS = {
    "algebra": cmd_algebra,
    "decompose": cmd_decompose,
    "synth": cmd_synth,
    "verify": cmd_verify,
    "anderson": cmd_anderson,
}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:  # usage errors, --help, --version
        return int(e.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ModelError, PauliError, CartanError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (AlgebraCapExceeded, OracleCapExceeded) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAP
    except SolveError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
