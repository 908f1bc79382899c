#!/usr/bin/env python3
"""
Command line - lattice, spectrum, sdrg and entropy runs

Exit codes: 0 success, 2 parameter error, 3 numerical failure.
"""

import argparse
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, TypeVar

import pandas as pd

from analysis.entanglement import (analytic_ground_state, exact_ground_state, fidelity,
                                   lowest_eigenvalues, parse_cut, schmidt)
from analysis.sdrg import effective_flow, flow_couplings
from analysis.simplex_spectrum import (MAX_ED_K, offdiag_spectrum, perm_spectrum,
                                       verify_against_ed)
from core.config import configure_logging, get_settings
from core.eigensolver import SOLVERS
from core.errors import MatryoshkaError, ParameterError
from core.lattice import build_lattice, embed_lattice, validate_parameters

from .output import emit

logger = logging.getLogger(__name__)

COMMANDS = ('lattice', 'spectrum', 'sdrg', 'entropy')
DEFAULT_FORMAT = {'lattice': 'json', 'spectrum': 'csv', 'sdrg': 'json', 'entropy': 'csv'}

T = TypeVar('T')


@dataclass(frozen=True)
class RunConfig:
    command: str
    k: int
    layers: int
    alphas: Tuple[float, ...] = ()
    content: Optional[Tuple[int, ...]] = None
    full_basis: bool = False
    solver: str = 'auto'
    tol: Optional[float] = None
    seed: Optional[int] = None
    out: Optional[str] = None
    fmt: str = 'json'
    embed: bool = False
    simplex: bool = False
    variant: str = 'permutation'
    lowest: int = 4
    cut: Optional[str] = None
    analytic: bool = False
    log_base: str = 'e'


def _parse_floats(text: Optional[str], name: str) -> Tuple[float, ...]:
    if text is None or text.strip() == '':
        return ()
    try:
        return tuple(float(v) for v in text.split(','))
    except ValueError:
        raise ParameterError(f"{name} must be a comma-separated list of numbers, got {text!r}")


def _parse_ints(text: Optional[str], name: str) -> Optional[Tuple[int, ...]]:
    if text is None:
        return None
    try:
        return tuple(int(v) for v in text.split(','))
    except ValueError:
        raise ParameterError(f"{name} must be a comma-separated list of integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='matryoshka',
        description='Nested-simplex SU(k+1) antiferromagnet: lattices, spectra, RG and entanglement')

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--k', type=int, required=True, help='Simplex dimension (k+1 colors)')
    common.add_argument('--out', default=None, help='Output file (default: stdout)')
    common.add_argument('--format', dest='fmt', choices=['json', 'csv'], default=None,
                        help='Output format (default depends on the command)')
    common.add_argument('--seed', type=int, default=None, help='Solver seed (default: MATRYOSHKA_SEED)')
    common.add_argument('--tol', type=float, default=None, help='Numerical tolerance (default: MATRYOSHKA_TOL)')

    solve = argparse.ArgumentParser(add_help=False)
    solve.add_argument('--solver', choices=SOLVERS, default='auto', help='Eigensolver (default: auto)')
    solve.add_argument('--content', default=None, help='Color sector as n0,n1,... (default: balanced)')
    solve.add_argument('--full-basis', action='store_true', help='Solve on the full basis instead of a sector')

    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('lattice', parents=[common], help='Emit lattice JSON')
    p.add_argument('--layers', type=int, default=1)
    p.add_argument('--alpha', default='0.1', help='Inhomogeneity in (0, 1), or a comma list')
    p.add_argument('--embed', action='store_true', help='Include simplex embedding coordinates')

    p = sub.add_parser('spectrum', parents=[common, solve], help='Simplex or lattice spectrum')
    p.add_argument('--simplex', action='store_true', help='Analytic single-simplex table checked against ED')
    p.add_argument('--variant', choices=['permutation', 'off-diagonal'], default='permutation')
    p.add_argument('--layers', type=int, default=None)
    p.add_argument('--alpha', default=None)
    p.add_argument('--lowest', type=int, default=4, help='Number of lowest eigenvalues')

    p = sub.add_parser('sdrg', parents=[common], help='Schrieffer-Wolff RG flow per layer')
    p.add_argument('--layers', type=int, default=2)
    p.add_argument('--alpha', required=True)

    p = sub.add_parser('entropy', parents=[common, solve], help='Entanglement entropy and fidelity')
    p.add_argument('--layers', type=int, default=2)
    p.add_argument('--alpha', default=None)
    p.add_argument('--cut', required=True, help='even-odd | concentric:L | radial:m1,... | sites:i,...')
    p.add_argument('--analytic', action='store_true', help='Use the analytic layer-singlet state')
    p.add_argument('--log-base', choices=['e', 'k+1'], default='e', help='Entropy log base')
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        k=args.k,
        layers=args.layers if args.layers is not None else 1,
        alphas=_parse_floats(getattr(args, 'alpha', None), '--alpha'),
        content=_parse_ints(getattr(args, 'content', None), '--content'),
        full_basis=getattr(args, 'full_basis', False),
        solver=getattr(args, 'solver', 'auto'),
        tol=args.tol,
        seed=args.seed,
        out=args.out,
        fmt=args.fmt or DEFAULT_FORMAT[args.command],
        embed=getattr(args, 'embed', False),
        simplex=getattr(args, 'simplex', False),
        variant=getattr(args, 'variant', 'permutation'),
        lowest=getattr(args, 'lowest', 4),
        cut=getattr(args, 'cut', None),
        analytic=getattr(args, 'analytic', False),
        log_base=getattr(args, 'log_base', 'e'),
    )


def validate_config(config: RunConfig) -> None:
    """Check every precondition before any allocation"""
    if config.command not in COMMANDS:
        raise ParameterError(f"unknown command {config.command!r}")
    if isinstance(config.k, bool) or not isinstance(config.k, int) or config.k < 1:
        raise ParameterError(f"k must be an integer >= 1, got {config.k!r}")
    if config.layers < 1:
        raise ParameterError(f"layers must be >= 1, got {config.layers}")
    if config.tol is not None and not config.tol > 0:
        raise ParameterError(f"--tol must be positive, got {config.tol}")
    if config.seed is not None and config.seed < 0:
        raise ParameterError(f"--seed must be >= 0, got {config.seed}")
    if config.solver not in SOLVERS:
        raise ParameterError(f"solver must be one of {SOLVERS}, got {config.solver!r}")
    if config.lowest < 1:
        raise ParameterError(f"--lowest must be >= 1, got {config.lowest}")
    if config.content is not None:
        if config.full_basis:
            raise ParameterError("--content and --full-basis are mutually exclusive")
        if len(config.content) != config.k + 1 or any(c < 0 for c in config.content) \
                or sum(config.content) != (config.k + 1) * config.layers:
            raise ParameterError(
                f"--content needs {config.k + 1} counts >= 0 summing to {(config.k + 1) * config.layers}")
    for alpha in config.alphas:
        validate_parameters(config.k, config.layers, alpha)

    needs_alpha = (config.command in ('lattice', 'sdrg')
                   or (config.command == 'spectrum' and not config.simplex)
                   or (config.command == 'entropy' and not config.analytic))
    if needs_alpha and not config.alphas:
        raise ParameterError(f"{config.command} needs --alpha")
    if config.command == 'sdrg' and config.layers < 2:
        raise ParameterError("sdrg needs --layers >= 2")
    if config.command == 'spectrum' and config.simplex and config.variant == 'off-diagonal' and config.k > 6:
        raise ParameterError("off-diagonal simplex spectrum supports k <= 6")
    if config.command == 'entropy':
        parse_cut(config.cut or '', config.k, config.layers)


def run_sweep(task: Callable[[float], T], alphas: Sequence[float]) -> List[T]:
    """Evaluate sweep points on a bounded pool; results keep input order"""
    workers = min(get_settings().workers, max(1, len(alphas)))
    if workers <= 1:
        return [task(a) for a in alphas]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, alphas))


# ── commands ─────────────────────────────────────────────────────────────────

def cmd_lattice(config: RunConfig) -> int:
    def one(alpha: float) -> dict:
        lattice = build_lattice(config.k, config.layers, alpha)
        return lattice.to_dict(embed_lattice(lattice) if config.embed else None)

    payloads = run_sweep(one, config.alphas)
    payload = payloads[0] if len(payloads) == 1 else payloads
    frame = pd.DataFrame([{'alpha': p['alpha'], 'i': b['i'], 'j': b['j'], 'coupling': b['coupling']}
                          for p in payloads for b in p['bonds']])
    emit(payload, frame, config.fmt, config.out)
    return 0


def cmd_spectrum(config: RunConfig) -> int:
    if config.simplex:
        spectrum = perm_spectrum(config.k) if config.variant == 'permutation' else offdiag_spectrum(config.k)
        provenance = spectrum.provenance
        if config.k <= MAX_ED_K:
            report = verify_against_ed(config.k, tol=config.tol or 1e-10)
            provenance = 'analytic+ed'
            logger.info(f"ED cross-check passed (max residual {report.max_residual:.2e})")
        frame = spectrum.to_frame()
        payload = {
            'k': config.k,
            'variant': spectrum.variant,
            'provenance': provenance,
            'total_degeneracy': spectrum.total_degeneracy,
            'entries': frame.to_dict(orient='records'),
        }
        emit(payload, frame, config.fmt, config.out)
        return 0

    def one(alpha: float) -> dict:
        lattice = build_lattice(config.k, config.layers, alpha)
        values = lowest_eigenvalues(lattice, config.lowest, content=config.content, solver=config.solver,
                                    seed=config.seed, full_basis=config.full_basis)
        return {'alpha': alpha, 'eigenvalues': [float(v) for v in values], 'warnings': list(lattice.warnings)}

    results = run_sweep(one, config.alphas)
    frame = pd.DataFrame([{'k': config.k, 'layers': config.layers, 'alpha': r['alpha'], 'index': i,
                           'eigenvalue': v}
                          for r in results for i, v in enumerate(r['eigenvalues'])])
    payload = {'k': config.k, 'layers': config.layers, 'provenance': 'numeric', 'results': results}
    emit(payload, frame, config.fmt, config.out)
    return 0


def cmd_sdrg(config: RunConfig) -> int:
    def one(alpha: float) -> dict:
        lattice = build_lattice(config.k, config.layers, alpha)
        reports = effective_flow(lattice, tol=config.tol)
        return {
            'k': config.k,
            'layers': config.layers,
            'alpha': alpha,
            'couplings': flow_couplings(reports),
            'steps': [r.to_dict() for r in reports],
            'warnings': sorted({w for r in reports for w in r.warnings}),
        }

    results = run_sweep(one, config.alphas)
    payload = results[0] if len(results) == 1 else results
    frame = pd.DataFrame([{'k': r['k'], 'layers': r['layers'], 'alpha': r['alpha'],
                           **{key: step[key] for key in ('layer', 'J', 'J_tilde', 'J_tilde_relative_deviation',
                                                      'shift', 'deviation', 'gap')},
                           'warnings': '; '.join(step['warnings'])}
                          for r in results for step in r['steps']])
    emit(payload, frame, config.fmt, config.out)
    return 0


def cmd_entropy(config: RunConfig) -> int:
    cut = parse_cut(config.cut, config.k, config.layers)
    log_scale = 1.0 if config.log_base == 'e' else math.log(config.k + 1)

    if config.analytic:
        state = analytic_ground_state(config.k, config.layers, full_basis=config.full_basis)
        entropy = schmidt(state, cut).entropy
        energy = -float(math.comb(config.k + 1, 2))
        alphas = config.alphas or (None,)
        rows = [{'k': config.k, 'layers': config.layers, 'alpha': a, 'cut_descriptor': cut.descriptor,
                 'entropy': entropy / log_scale, 'fidelity': 1.0, 'E0': energy} for a in alphas]
    else:
        reference = None
        if config.content is None:
            reference = analytic_ground_state(config.k, config.layers, full_basis=config.full_basis)

        def one(alpha: float) -> dict:
            lattice = build_lattice(config.k, config.layers, alpha)
            ground = exact_ground_state(lattice, content=config.content, solver=config.solver,
                                        seed=config.seed, full_basis=config.full_basis, tol=config.tol)
            result = schmidt(ground.state, cut)
            overlap = fidelity(ground.state, reference) if reference is not None else float('nan')
            return {'k': config.k, 'layers': config.layers, 'alpha': alpha, 'cut_descriptor': cut.descriptor,
                    'entropy': result.entropy / log_scale, 'fidelity': overlap, 'E0': ground.energy}

        rows = run_sweep(one, config.alphas)

    frame = pd.DataFrame(rows, columns=['k', 'layers', 'alpha', 'cut_descriptor', 'entropy', 'fidelity', 'E0'])
    payload = {'log_base': config.log_base, 'analytic': config.analytic, 'rows': rows}
    emit(payload, frame, config.fmt, config.out)
    return 0


DISPATCH = {'lattice': cmd_lattice, 'spectrum': cmd_spectrum, 'sdrg': cmd_sdrg, 'entropy': cmd_entropy}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        configure_logging()
        config = config_from_args(args)
        validate_config(config)
        logger.debug(f"Run config: {config}")
        return DISPATCH[config.command](config)
    except MatryoshkaError as exc:
        logger.error(f"❌ {type(exc).__name__}: {exc}")
        return exc.exit_code
