"""CLI entry point for tropsev."""

import json
import logging
import random
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional

import click

from .core.arith import CoeffRing, ascending_coefficients
from .core.classifier import classify, cones_table, enumerate_cones, sample_interior_point
from .core.minors import is_exceptional_affine, minor_poly
from .core.newton import WeightVector
from .core.oracle import cross_validate
from .core.precision import MAX_TRUNC_ENV, PrecisionPolicy, parse_cap
from .core.puiseux import PuiseuxTrunc
from .core.trop_kernel import ValMatrix, in_trop_kernel, in_trop_kernel_via_circuits
from .core.witness import build_witness, verify_witness
from .errors import TropSevError
from .utils.file_utils import get_output_filename, read_matrix_file, validate_file_path
from .utils.serialization import (
    SCHEMA,
    decode_witness,
    encode_certificate,
    encode_classification,
    encode_report,
    encode_weight,
    encode_witness,
    format_int_poly,
    parse_indices,
    parse_rational,
    parse_series_literal,
    parse_weights,
)
from .utils.svg import NewtonDiagramRenderer

logger = logging.getLogger(__name__)

DEFAULT_DIAGRAM = "newton_diagram"


def _emit(data: Dict[str, Any]) -> None:
    click.echo(json.dumps(data, indent=2))


def _fail(data: Dict[str, Any]) -> None:
    _emit(data)
    sys.exit(1)


def _error_payload(e: Exception) -> Dict[str, Any]:
    return {"schema": SCHEMA, "error": str(e), "type": type(e).__name__}


def _weights_callback(
    ctx: click.Context, param: click.Parameter, value: Optional[str]
) -> Optional[WeightVector]:
    if value is None:
        return None
    try:
        return parse_weights(value)
    except ValueError as e:
        raise click.BadParameter(str(e)) from e


def _cap_callback(
    ctx: click.Context, param: click.Parameter, value: Optional[str]
) -> Optional[Fraction]:
    if value is None or value == "":
        return None
    try:
        return parse_cap(value)
    except ValueError as e:
        raise click.BadParameter(str(e)) from e


def _check_degree(w: WeightVector, n: Optional[int]) -> None:
    if n is not None and w.n != n:
        raise click.BadParameter(
            f"weight vector has {len(w)} entries, expected {n + 1} for n={n}",
            param_hint="'--w'",
        )


def _policy(ctx: click.Context, trunc: Optional[str] = None) -> PrecisionPolicy:
    max_trunc = ctx.obj["max_trunc"]
    min_trunc = None
    if trunc is not None:
        try:
            min_trunc = parse_rational(trunc)
        except ValueError as e:
            raise click.BadParameter(str(e), param_hint="'--trunc'") from e
        if min_trunc <= 0:
            raise click.BadParameter("must be positive", param_hint="'--trunc'")
    return PrecisionPolicy(max_trunc=max_trunc, min_trunc=min_trunc)


def _say(ctx: click.Context, message: str) -> None:
    if ctx.obj["verbose"]:
        click.echo(message, err=True)


def _run(action) -> None:
    """Run a subcommand body with the shared error handling."""
    try:
        action()
    except click.ClickException:
        raise
    except TropSevError as e:
        _fail(_error_payload(e))
    except Exception as e:
        click.echo(f"Error: {e}", err=True)
        sys.exit(1)


weights_option = click.option(
    "--w",
    "weights",
    required=True,
    callback=_weights_callback,
    help="Weight vector as comma-separated rationals, e.g. 2,0,1/2,0,1,0",
)
degree_option = click.option(
    "--n", "n", type=click.IntRange(min=4), help="Degree; checked against the weight length"
)


@click.group()
@click.option(
    "--verbose",
    "-v",
    is_flag=True,
    help="Enable verbose output",
)
@click.option(
    "--max-trunc",
    envvar=MAX_TRUNC_ENV,
    callback=_cap_callback,
    help=f"Cap on truncation orders during precision retries (env: {MAX_TRUNC_ENV})",
)
@click.pass_context
def main(ctx: click.Context, verbose: bool, max_trunc: Optional[Fraction]) -> None:
    """Tropical Severi varieties of univariate polynomials with two nodes."""
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    ctx.obj["max_trunc"] = max_trunc
    if verbose:
        logging.basicConfig(level=logging.DEBUG, format="%(levelname)s %(name)s: %(message)s")


@main.command("classify")
@degree_option
@weights_option
@click.pass_context
def classify_command(ctx: click.Context, n: Optional[int], weights: WeightVector) -> None:
    """Decide membership and list cone certificates."""
    _check_degree(weights, n)

    def action() -> None:
        result = classify(weights)
        _say(ctx, f"Found {len(result.certificates)} certificate(s)")
        data = encode_classification(result)
        if not result.member:
            _fail(data)
        _emit(data)

    _run(action)


@main.command("witness")
@degree_option
@weights_option
@click.option("--trunc", help="Smallest truncation order to start from")
@click.pass_context
def witness_command(
    ctx: click.Context, n: Optional[int], weights: WeightVector, trunc: Optional[str]
) -> None:
    """Construct a witness polynomial and verify it."""
    _check_degree(weights, n)
    policy = _policy(ctx, trunc)

    def action() -> None:
        witness = build_witness(weights, policy=policy)
        _say(ctx, f"Built type {witness.kind} witness over {witness.ring!r}")
        report = verify_witness(weights, witness)
        data = {
            "schema": SCHEMA,
            "witness": encode_witness(witness),
            "verification": encode_report(report),
        }
        if not report.passed:
            _fail(data)
        _emit(data)

    _run(action)


@main.command("verify")
@click.argument("file", type=click.File("r"))
@click.option("--lenient", is_flag=True, help="Skip the strict truncation requirement")
@click.pass_context
def verify_command(ctx: click.Context, file, lenient: bool) -> None:
    """Verify a witness document produced by the witness command.

    FILE: JSON document, or - for standard input
    """
    try:
        document = json.load(file)
    except json.JSONDecodeError as e:
        raise click.BadParameter(f"not a JSON document: {e}", param_hint="'FILE'") from e

    def action() -> None:
        payload = document.get("witness", document)
        try:
            witness = decode_witness(payload)
        except ValueError as e:
            raise click.BadParameter(str(e), param_hint="'FILE'") from e
        report = verify_witness(witness.weight, witness, strict=not lenient)
        data = {"schema": SCHEMA, "verification": encode_report(report)}
        if not report.passed:
            _fail(data)
        _emit(data)

    _run(action)


@main.command("minors")
@click.option("--J", "indices", required=True, help="Four indices, e.g. 0,1,2,3")
def minors_command(indices: str) -> None:
    """Print the minor D_J and its structure."""
    try:
        minor = minor_poly(parse_indices(indices))
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint="'--J'") from e
    image = is_exceptional_affine(minor.J)
    _emit(
        {
            "schema": SCHEMA,
            "J": list(minor.J),
            "poly": format_int_poly(ascending_coefficients(minor.poly)),
            "degree": minor.degree,
            "order": minor.order,
            "palindromic": minor.is_palindromic(),
            "exceptional": None
            if image is None
            else {"base": list(image.base), "s": image.s, "r": image.r},
        }
    )


@main.command("cones")
@click.option("--n", "n", required=True, type=int, help="Degree")
@click.option(
    "--format",
    "-f",
    "output_format",
    type=click.Choice(["json", "table"]),
    default="json",
    help="Output format (default: json)",
)
@click.option("--sample", is_flag=True, help="Add a strictly interior point per cone")
@click.option("--seed", type=int, default=0, help="Seed for --sample (default: 0)")
def cones_command(n: int, output_format: str, sample: bool, seed: int) -> None:
    """List every maximal cone for degree n with its H-description."""

    def action() -> None:
        if output_format == "table":
            click.echo(cones_table(n).to_string(index=False))
            return
        rng = random.Random(seed)
        cones = []
        for cone in enumerate_cones(n):
            entry = {
                "certificate": encode_certificate(cone.certificate),
                "equalities": [[str(a) for a in row] for row in cone.h_description.equalities],
                "inequalities": [[str(a) for a in row] for row in cone.h_description.inequalities],
            }
            if sample:
                entry["sample"] = encode_weight(sample_interior_point(cone.certificate, n, rng))
            cones.append(entry)
        _emit({"schema": SCHEMA, "n": n, "count": len(cones), "cones": cones})

    _run(action)


def _read_matrix(file: Path) -> ValMatrix:
    try:
        validate_file_path(file)
        raw = read_matrix_file(file)
        parsed = [[parse_series_literal(entry) for entry in row] for row in raw]
    except (OSError, ValueError) as e:
        raise click.BadParameter(str(e), param_hint="'FILE'") from e
    ring = CoeffRing.rationals()
    if all(trunc is None for row in parsed for _, trunc in row):
        return ValMatrix.exact(ring, [[terms for terms, _ in row] for row in parsed])
    truncs = [trunc for row in parsed for _, trunc in row if trunc is not None]
    common = min(truncs)
    # Exact entries are only known up to the shortest O-term of the file.
    return ValMatrix.from_series(
        [[PuiseuxTrunc.from_terms(ring, terms, common) for terms, _ in row] for row in parsed]
    )


@main.command("tropkernel")
@click.argument("file", type=click.Path(exists=True, path_type=Path))
@weights_option
@click.option("--threads", type=click.IntRange(min=1), default=1, help="Worker threads")
@click.pass_context
def tropkernel_command(ctx: click.Context, file: Path, weights: WeightVector, threads: int) -> None:
    """Test a weight against the tropicalized kernel of a matrix.

    FILE: One matrix row per line, comma-separated series literals such as
    "1 + 2*t^(1/2) + O(t^4)"
    """
    matrix = _read_matrix(file)
    policy = _policy(ctx)

    def action() -> None:
        try:
            membership = in_trop_kernel(matrix, list(weights), policy, threads)
            by_circuits = in_trop_kernel_via_circuits(matrix, list(weights), policy, threads)
        except TropSevError:
            raise
        except ValueError as e:
            raise click.BadParameter(str(e)) from e
        data = {
            "schema": SCHEMA,
            "member": membership.member,
            "circuits_agree": membership.member == by_circuits.member,
        }
        if not membership.member:
            data["violating_J"] = list(membership.violating_J)
            data["minimizer"] = membership.minimizer
            _fail(data)
        _emit(data)

    _run(action)


@main.command("diagram")
@weights_option
@click.option(
    "--output",
    "-o",
    type=click.Path(path_type=Path),
    help=f"Output SVG path (default: {DEFAULT_DIAGRAM}.svg, numbered if taken)",
)
@click.pass_context
def diagram_command(ctx: click.Context, weights: WeightVector, output: Optional[Path]) -> None:
    """Draw the Newton diagram of a weight vector as SVG."""

    def action() -> None:
        target = output
        if target is None:
            target = get_output_filename(Path.cwd() / DEFAULT_DIAGRAM)
        renderer = NewtonDiagramRenderer()
        renderer.write(renderer.render(weights), target)
        _say(ctx, f"Rendered diagram of {weights}")
        click.echo(f"Successfully wrote {target}")

    _run(action)


@main.command("crossval")
@click.option("--n", "n", required=True, type=click.IntRange(4, 10), help="Degree")
@click.option("--samples", type=click.IntRange(min=1), default=100, help="Number of samples")
@click.option("--seed", type=int, default=0, help="Seed (default: 0)")
@click.pass_context
def crossval_command(ctx: click.Context, n: int, samples: int, seed: int) -> None:
    """Classify forward samples of polynomials with two double roots."""
    policy = _policy(ctx)

    def action() -> None:
        report = cross_validate(n, samples, seed, policy=policy)
        _say(ctx, report.histogram().to_string())
        data: Dict[str, Any] = {"schema": SCHEMA}
        data.update(report.as_dict())
        if not report.ok:
            _fail(data)
        _emit(data)

    _run(action)


if __name__ == "__main__":
    main()
