"""Command-line front end: ``blindmatch {generate,match,bounds,identify,sweep}``.

A run directory produced by ``generate`` holds the graph pair, the ground
truth permutation, both signal batches and a manifest; the other commands
read it back and write JSON reports next to it (or to ``--out``).
"""
from __future__ import annotations

import argparse
import hashlib
import json
import platform
import sys
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .analysis import (eigenvalues_aligned, error_probability_bound, gap_bound_value, leakage_profile,
                       noise_ceiling,
                       realized_optimality_gap, spectral_diagnostics)
from .config import ExperimentConfig, load_config
from .errors import (BlindMatchError, ConfigError, DataError, FormatError, InsufficientDataError,
                     InvalidArgumentError, NumericDomainError)
from .experiment import (aggregate, blind_params, build_instance, draw_signals, run_sweep,
                         write_records, write_sweep_csv)
from .formats import (ensure_dir, load_edge_list, load_permutation_csv, load_signals,
                      save_edge_list, save_permutation_csv, save_signals)
from .graphs import is_identifiable_known, laplacian, symmetric_swaps
from .matching import BlindParams, blind_match, spectral_match_known
from .signals import SignalBatch, sample_covariance, true_covariance
from .spectral import abs_basis, eig_sym, identifiability_blind, numerical_rank, select_k

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4

GRAPH_FILES = ("graph1.edges", "graph2.edges")
SIGNAL_FILES = ("signals1.bin", "signals2.bin")


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _versions() -> dict:
    return {"blindmatch": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


def _write_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n",
                    encoding="utf-8")


def _json_default(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.generic):
        return x.item()
    raise TypeError(f"not JSON serializable: {type(x).__name__}")


def _write_manifest(out: Path, cfg: ExperimentConfig, command: str, files: list[str]) -> None:
    # no timestamps: a rerun must reproduce the manifest byte for byte
    _write_json({
        "command": command,
        "config": cfg.to_dict(),
        "config_hash": cfg.config_hash(),
        "seed": cfg.seed,
        "versions": _versions(),
        "files": {name: _sha256(out / name) for name in sorted(files)},
    }, out / "manifest.json")


def _load_config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    return cfg.with_overrides(seed=args.seed, solver=args.solver, identifiability_mode=args.mode)


# -- run directory -----------------------------------------------------------

class RunDir:
    """Lazy reader for a ``generate`` output directory."""

    def __init__(self, path):
        self.path = Path(path)
        if not self.path.is_dir():
            raise DataError(f"input directory {self.path} does not exist")
        manifest = self.path / "manifest.json"
        self.manifest = json.loads(manifest.read_text(encoding="utf-8")) if manifest.exists() else None

    def config(self) -> ExperimentConfig | None:
        if self.manifest is None:
            return None
        return ExperimentConfig(**self.manifest["config"])

    def batches(self) -> tuple[SignalBatch, SignalBatch]:
        out = []
        for name in SIGNAL_FILES:
            p = self.path / name
            if not p.exists():
                raise DataError(f"missing signal file {p}")
            out.append(SignalBatch(load_signals(p)))
        return out[0], out[1]

    def laplacians(self):
        paths = [self.path / name for name in GRAPH_FILES]
        if not all(p.exists() for p in paths):
            return None
        return tuple(laplacian(load_edge_list(p)) for p in paths)

    def p_star(self):
        p = self.path / "p_star.csv"
        return load_permutation_csv(p) if p.exists() else None


def _params(args, cfg: ExperimentConfig | None) -> BlindParams:
    base = blind_params(cfg) if cfg is not None else BlindParams()
    return BlindParams(
        eps=args.eps if args.eps is not None else base.eps,
        varsigma=args.varsigma if args.varsigma is not None else base.varsigma,
        solver=args.solver or base.solver,
        identifiability_mode=args.mode or base.identifiability_mode,
        k_override=args.k,
    )


# -- commands ----------------------------------------------------------------

def cmd_generate(args) -> int:
    cfg = _load_config(args)
    out = ensure_dir(args.out)
    point = cfg.grid()[0]
    inst = build_instance(cfg, point, cfg.seed, 0, 0)
    b1, b2 = draw_signals(cfg, inst, cfg.seed, 0, 0)
    save_edge_list(inst.g1, out / GRAPH_FILES[0])
    save_edge_list(inst.g2, out / GRAPH_FILES[1])
    save_permutation_csv(inst.p_star, out / "p_star.csv")
    save_signals(b1.samples, out / SIGNAL_FILES[0])
    save_signals(b2.samples, out / SIGNAL_FILES[1])
    _write_manifest(out, cfg, "generate", [*GRAPH_FILES, "p_star.csv", *SIGNAL_FILES])
    print(f"wrote n={inst.g1.n} M={inst.m} run to {out}")
    return EXIT_OK


def cmd_match(args) -> int:
    run = RunDir(args.input)
    cfg = run.config()
    params = _params(args, cfg)
    b1, b2 = run.batches()
    laps = run.laplacians()
    p_star = run.p_star()
    result = {"blind": blind_match(b1, b2, params, p_star, laps).to_dict(), "blind_by_solver": {}}
    for solver in ("hungarian", "greedy"):
        alt = BlindParams(params.eps, params.varsigma, solver, params.identifiability_mode, params.k_override)
        result["blind_by_solver"][solver] = blind_match(b1, b2, alt, p_star, laps).to_dict()
    if laps is not None:
        result["error_free"] = spectral_match_known(laps[0], laps[1], "hungarian", p_star).to_dict()
    out = ensure_dir(args.out or args.input)
    _write_json(result, out / "match.json")
    b = result["blind"]
    print(f"blind: K={b['k_used']} solver={b['solver']} fraction_correct={b['fraction_correct']} "
          f"identifiability={b['identifiability']}")
    return EXIT_OK


def bounds_report(run: RunDir, params: BlindParams) -> dict:
    """Diagnostics for a synthetic run whose filters and noise level are known."""
    cfg = run.config()
    laps = run.laplacians()
    p_star = run.p_star()
    if cfg is None or laps is None or p_star is None:
        raise DataError("bounds need a generated run (manifest, graphs and p_star)")
    b1, b2 = run.batches()
    n = b1.n
    f1, f2 = cfg.filters_for(cfg.grid()[0]["alpha"])
    sigma2 = float(cfg.grid()[0]["sigma2"])
    # Delta is measured against the noiseless covariance, so it absorbs sigma^2 I
    t1 = eig_sym(true_covariance(laps[0], f1))
    t2 = eig_sym(true_covariance(laps[1], f2))
    s1, s2 = sample_covariance(b1), sample_covariance(b2)
    e1, e2 = eig_sym(s1), eig_sym(s2)
    eps, varsigma = params.resolved(n)
    if params.k_override is not None:
        k = params.k_override
    else:
        k = select_k(e1.values, e2.values, varsigma, numerical_rank(e1.values), numerical_rank(e2.values))
    diag = spectral_diagnostics(t1, t2, s1, s2, k, batches=(b1, b2))
    v1, v2 = abs_basis(t1, k), abs_basis(t2, k)
    u1, u2 = abs_basis(e1, k), abs_basis(e2, k)
    true_leak = leakage_profile(v1, v2, p_star)
    blind_leak = leakage_profile(u1, u2, p_star)
    report = blind_match(b1, b2, BlindParams(eps, varsigma, params.solver, params.identifiability_mode, k),
                         p_star, laps)
    ceiling = noise_ceiling(true_leak.rho, diag.delta_min_k, k) if diag.delta_min_k > 0 else 0.0
    gap_bound = (gap_bound_value(diag.delta_norms[0], diag.delta_norms[1], diag.delta_min_k, k, n)
                 if diag.delta_min_k > 0 else None)
    result = {
        "K": k,
        "diagnostics": diag.to_dict(),
        "leakage_true": true_leak.to_dict(),
        "leakage_blind_surrogate": blind_leak.to_dict(),
        "noise_ceiling": ceiling,
        "sigma2": sigma2,
        "optimality_gap_bound": gap_bound,
        "realized_optimality_gap": realized_optimality_gap(report.permutation, v1, v2),
        "fraction_correct": report.fraction_correct,
        "lambda_c2": t2.values.tolist(),
        "lambda_c2_with_noise": (t2.values + sigma2).tolist(),
        "eigenvalues_aligned": bool(np.all(eigenvalues_aligned(e1.values, t1.values)[:k])
                                    and np.all(eigenvalues_aligned(e2.values, t2.values)[:k])),
    }
    try:
        result["error_probability_bound"] = error_probability_bound(b1.M, n, sigma2, ceiling)
        result["error_probability_reason"] = None
    except NumericDomainError as exc:
        result["error_probability_bound"] = None
        result["error_probability_reason"] = str(exc)
    return result


def cmd_bounds(args) -> int:
    run = RunDir(args.input)
    result = bounds_report(run, _params(args, run.config()))
    out = ensure_dir(args.out or args.input)
    _write_json(result, out / "bounds.json")
    print(f"K={result['K']} realized gap={result['realized_optimality_gap']:.4g} "
          f"bound={result['optimality_gap_bound']} noise ceiling={result['noise_ceiling']:.4g}")
    return EXIT_OK


def identify_report(run: RunDir, params: BlindParams) -> dict:
    b1, b2 = run.batches()
    n = b1.n
    eps, varsigma = params.resolved(n)
    e1, e2 = eig_sym(sample_covariance(b1)), eig_sym(sample_covariance(b2))
    if params.k_override is not None:
        k = params.k_override
    else:
        k = select_k(e1.values, e2.values, varsigma, numerical_rank(e1.values), numerical_rank(e2.values))
    verdict = identifiability_blind(abs_basis(e1, k), abs_basis(e2, k), eps, params.identifiability_mode)
    result = {
        "K": k,
        "blind": {"label": verdict.label, "mode": verdict.mode, "eps": verdict.eps,
                  "min_distance": verdict.min_distance,
                  "offending": [list(t) for t in verdict.offending]},
    }
    laps = run.laplacians()
    if laps is not None:
        known = is_identifiable_known(*laps)
        result["topology"] = {
            "verdict": known.value,
            "symmetric_swaps_g1": [list(s) for s in symmetric_swaps(laps[0])],
            "symmetric_swaps_g2": [list(s) for s in symmetric_swaps(laps[1])],
        }
        result["agree"] = (known.value == "identifiable") == verdict.identifiable
    return result


def cmd_identify(args) -> int:
    run = RunDir(args.input)
    result = identify_report(run, _params(args, run.config()))
    out = ensure_dir(args.out or args.input)
    _write_json(result, out / "identify.json")
    line = f"blind: {result['blind']['label']} (min distance {result['blind']['min_distance']:.4g})"
    if "topology" in result:
        line += f"; topology: {result['topology']['verdict']}; agree={result['agree']}"
    print(line)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    out = ensure_dir(args.out or cfg.outputs)
    records = run_sweep(cfg, threads=args.threads,
                        progress=lambda r: print(f"grid {r['grid_index']} trial {r['trial']}: "
                                                 f"fc={r['fraction_correct']:.3f}", file=sys.stderr))
    write_records(records, out / "trials.jsonl")
    write_sweep_csv(aggregate(records), out / "sweep.csv")
    # outputs carry wall-clock timings, so they are not hashed
    _write_manifest(out, cfg, "sweep", [])
    print(f"{len(records)} trials over {len(cfg.grid())} grid points -> {out}")
    return EXIT_OK


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blindmatch", description="Blind graph matching from filtered signals.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input: bool):
        p.add_argument("--config", help="key = value experiment config file")
        p.add_argument("--out", help="output directory")
        if needs_input:
            p.add_argument("--input", required=True, help="run directory written by 'generate'")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--solver", choices=("hungarian", "greedy", "auto"))
        p.add_argument("--mode", choices=("self_swap", "paper_literal"), help="identifiability scan mode")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--eps", type=float, help="swap-scan threshold (default n/20)")
        p.add_argument("--varsigma", type=float, help="K line-search threshold (default (10n)^-2)")
        p.add_argument("--k", type=int, help="fix K instead of searching")

    for name, fn, needs_input, help_ in (
        ("generate", cmd_generate, False, "write a graph pair, ground truth and signals"),
        ("match", cmd_match, True, "blind matching plus the error-free baseline"),
        ("bounds", cmd_bounds, True, "spectral diagnostics and bound values"),
        ("identify", cmd_identify, True, "blind and topology identifiability scans"),
        ("sweep", cmd_sweep, False, "Monte Carlo sweep over one axis"),
    ):
        p = sub.add_parser(name, help=help_)
        common(p, needs_input)
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "generate" and not args.out:
        args.out = "run"
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericDomainError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataError, FormatError, InsufficientDataError, InvalidArgumentError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except BlindMatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
