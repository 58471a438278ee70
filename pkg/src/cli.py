"""
Interfaz de línea de comandos de polyprec.

    polyprec run <escenario.toml> [--jobs N] [--out DIR]
    polyprec gen-matrix <familia> [clave=valor ...] -o archivo.mtx
    polyprec certify <archivo.poly> [--grid a,b,npuntos]

Códigos de salida: 0 todo convergió / certificado válido, 2 alguna corrida
sin converger / certificado fallido, 64 configuración inválida, 74 E/S.
"""

import argparse
import sys
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
from rich.console import Console
from rich.table import Table

from src.config.settings import get_settings
from src.operators.matrix_market import write_matrix_market
from src.operators.model_problems import make_model_problem, make_random_digraph
from src.pipeline import EXIT_CONFIG, EXIT_IO, EXIT_NOT_CONVERGED, EXIT_OK, run_scenario
from src.poly.branch import certify_branch
from src.poly.serialization import load_polynomial
from src.report.summary import render_summary
from src.utils.errors import ConfigError, IoError, PolyprecError
from src.utils.logger import configure_from_settings, get_logger

logger = get_logger(__name__)

FAMILY_ALIASES = {
    "laplace1d": "laplace1d",
    "laplace2d": "laplace2d",
    "laplace3d": "laplace3d",
    "graph": "graph_in_degree_laplacian",
    "graph_in_degree_laplacian": "graph_in_degree_laplacian",
    "synthetic": "synthetic_nonhermitian",
    "synthetic_nonhermitian": "synthetic_nonhermitian",
    "adjacency": "adjacency",
}

INT_PARAMS = {"N", "n", "seed", "out_degree"}
FLOAT_PARAMS = {"skew_scale", "shift"}


# ═══════════════════════════════════════════════════════════════════════════
# PARSER
# ═══════════════════════════════════════════════════════════════════════════

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyprec",
        description="Arnoldi con precondicionamiento polinomial para A^{-1/2}b, A^{1/2}b y sign(A)b",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Logs en nivel DEBUG")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Ejecutar un escenario TOML")
    run.add_argument("scenario", type=Path, help="Archivo de escenario")
    run.add_argument("--jobs", type=int, default=None, help="Corridas en paralelo")
    run.add_argument("--out", type=Path, default=None, help="Directorio de salida")
    run.add_argument("--no-progress", action="store_true", help="Sin barra de progreso")

    gen = sub.add_parser("gen-matrix", help="Generar un problema modelo en Matrix Market")
    gen.add_argument("family", help=f"Familia: {', '.join(sorted(FAMILY_ALIASES))}")
    gen.add_argument("params", nargs="*", help="Parámetros clave=valor (N=50, n=100, seed=7, ...)")
    gen.add_argument("-o", "--output", type=Path, required=True, help="Archivo .mtx")

    cert = sub.add_parser("certify", help="Verificar el certificado de rama de un polinomio")
    cert.add_argument("poly_file", type=Path, help="Archivo .poly escrito por 'run'")
    cert.add_argument("--grid", default=None, help="a,b,npuntos (por defecto la muestra propia)")

    return parser


def parse_params(tokens: List[str]) -> Dict[str, float]:
    """
    Convierte ["N=50", "seed=7"] en {"N": 50, "seed": 7}.

    Raises:
        ConfigError: token mal formado o parámetro desconocido
    """
    params: Dict[str, float] = {}
    for token in tokens:
        key, sep, value = token.partition("=")
        if not sep or not key or not value:
            raise ConfigError(f"parámetro mal formado: {token!r} (se espera clave=valor)")
        try:
            if key in INT_PARAMS:
                params[key] = int(value)
            elif key in FLOAT_PARAMS:
                params[key] = float(value)
            else:
                raise ConfigError(f"parámetro desconocido: {key}")
        except ValueError as e:
            raise ConfigError(f"valor inválido para {key}: {value!r}") from e
    return params


def parse_grid(text: str):
    """'a,b,n' → np.linspace(a, b, n)."""
    parts = text.split(",")
    if len(parts) != 3:
        raise ConfigError(f"--grid debe ser a,b,npuntos: {text!r}")
    try:
        a, b, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as e:
        raise ConfigError(f"--grid inválido: {text!r}") from e
    if count < 1 or not b >= a:
        raise ConfigError(f"--grid inválido: {text!r}")
    return np.linspace(a, b, count)


# ═══════════════════════════════════════════════════════════════════════════
# COMANDOS
# ═══════════════════════════════════════════════════════════════════════════

def cmd_run(args: argparse.Namespace, console: Console) -> int:
    result = run_scenario(
        args.scenario,
        output_dir=args.out,
        jobs=args.jobs,
        show_progress=not args.no_progress,
    )
    if result.reports:
        render_summary(result.reports, console, title=result.scenario.name)
    for label in result.failed:
        console.print(f"[red]✗ {label}: la corrida falló (ver logs)[/red]")
    console.print(f"Salida: {result.output_dir}")
    return result.exit_code


def cmd_gen_matrix(args: argparse.Namespace, console: Console) -> int:
    family = FAMILY_ALIASES.get(args.family)
    if family is None:
        raise ConfigError(f"familia desconocida: {args.family}")
    params = parse_params(args.params)
    seed = params.pop("seed", None)
    if seed is None:
        seed = get_settings().POLYPREC_SEED or 0

    try:
        if family == "adjacency":
            if "n" not in params:
                raise ConfigError("adjacency requiere n")
            matrix = make_random_digraph(
                int(params["n"]), int(params.get("out_degree", 3)), int(seed)
            )
        else:
            matrix = make_model_problem(family, seed=int(seed), **params)
    except PolyprecError:
        raise
    except (ValueError, TypeError) as e:
        raise ConfigError(f"parámetros inválidos para {family}: {e}") from e

    comment = f"polyprec gen-matrix {args.family} " + " ".join(args.params)
    write_matrix_market(args.output, matrix, comment=comment.strip())
    console.print(f"✅ {args.output} ({matrix.shape[0]}×{matrix.shape[1]}, nnz={matrix.nnz})")
    return EXIT_OK


def cmd_certify(args: argparse.Namespace, console: Console) -> int:
    q = load_polynomial(args.poly_file)
    sample = parse_grid(args.grid) if args.grid else None
    certificate = certify_branch(q, sample)

    table = Table(title=f"Certificado de rama: {args.poly_file.name}")
    table.add_column("campo")
    table.add_column("valor", justify="right")
    table.add_row("tipo", q.kind.value)
    table.add_row("grado", str(q.degree))
    table.add_row("puntos", str(certificate.n_points))
    table.add_row("min Re q(z)", f"{certificate.min_real_part:.6e}")
    table.add_row("Re q > 0", "sí" if certificate.satisfied else "no")
    table.add_row("|q − z^{-1/2}| ≤ |z^{-1/2}|/√2", "sí" if certificate.relative_condition_holds else "no")
    console.print(table)
    return EXIT_OK if certificate.satisfied else EXIT_NOT_CONVERGED


COMMANDS = {
    "run": cmd_run,
    "gen-matrix": cmd_gen_matrix,
    "certify": cmd_certify,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Punto de entrada; devuelve el código de salida.

    Example:
        >>> main(["run", "scenarios/laplace2d_golden.toml", "--jobs", "2"])
        0
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_from_settings(verbose=args.verbose)
    console = Console()
    err_console = Console(stderr=True)

    try:
        return COMMANDS[args.command](args, console)
    except ConfigError as e:
        err_console.print(f"[red]Error de configuración:[/red] {e}")
        return EXIT_CONFIG
    except IoError as e:
        err_console.print(f"[red]Error de E/S:[/red] {e}")
        return EXIT_IO
    except PolyprecError as e:
        err_console.print(f"[red]{type(e).__name__}:[/red] {e}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
