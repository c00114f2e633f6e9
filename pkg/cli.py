#!/usr/bin/env python3
import click
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

# Add the project root directory to Python path
root_dir = Path(__file__).parent.absolute()
sys.path.append(str(root_dir))

from cutpoint.config.settings import get_settings, override_settings
from cutpoint.errors.handlers import EXIT_CERTIFICATION, handle_errors, resolve_exit
from cutpoint.kernel.digits import IrrationalParam
from cutpoint.kernel.expressions import Quadratic, to_text
from cutpoint.models.automata import CutpointAcceptor
from cutpoint.models.schemas import Report
from cutpoint.services import constructions, separation, verification
from cutpoint.services.reporting import build_report, format_value, render
from cutpoint.services.simulation import accept_prob, language_slice, member, words_up_to
from cutpoint.services.spec_parser import build_automaton, parse_expression, parse_spec, render_spec
from cutpoint.utils.logging_config import setup_logging, get_logger

# Set up logging
setup_logging()
logger = get_logger(__name__)


def _emit(ctx: click.Context, report: Report) -> None:
    started = ctx.find_root().obj["started"]
    report.timing_seconds = round(time.perf_counter() - started, 6)
    click.echo(render(report, ctx.find_root().obj["format"]))
    logger.info("Command finished", extra={"command": report.command, "seconds": report.timing_seconds})


def _load_spec(spec: Optional[str], spec_file: Optional[str]):
    if (spec is None) == (spec_file is None):
        raise click.UsageError("give exactly one of --spec and --spec-file")
    text = spec if spec is not None else Path(spec_file).read_text()
    parsed = parse_spec(text)
    return parsed, build_automaton(parsed)


def _param(text: str, assume_irrational: bool = False) -> IrrationalParam:
    expr = parse_expression(text)
    if isinstance(expr, Quadratic):
        return IrrationalParam.from_expr(expr)
    return IrrationalParam.from_expr(expr, label=text, asserted_irrational=assume_irrational)


def spec_options(command):
    command = click.option("--spec-file", type=click.Path(exists=True, dir_okay=False), help="File holding an automaton spec")(command)
    command = click.option("--spec", help='Automaton spec, e.g. "pfa rabin"')(command)
    return command


@click.group()
@click.option("--precision-bits", type=int, default=None, help="Precision of printed enclosures (default 256)")
@click.option("--max-bits", type=int, default=None, help="Last rung of the precision ladder (default 4096)")
@click.option("--scan-cap", type=int, default=None, help="Hard cap on unary witness scans (default 1000000)")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", help="Report format")
@click.pass_context
@handle_errors
def cli(ctx, precision_bits, max_bits, scan_cap, fmt):
    """Certified simulation and witness search for probabilistic and quantum finite automata."""
    override_settings(PRECISION_BITS=precision_bits, MAX_BITS=max_bits, SCAN_CAP=scan_cap)
    ctx.obj = {"format": fmt, "started": time.perf_counter()}
    logger.info("Command started", extra={"command": ctx.invoked_subcommand})


@cli.command("prob")
@spec_options
@click.option("--word", default="", help="Input word (empty by default)")
@click.pass_context
@handle_errors
def prob(ctx, spec, spec_file, word):
    """Acceptance probability of a word."""
    parsed, automaton = _load_spec(spec, spec_file)
    probability = accept_prob(automaton, word)
    report = build_report(
        "prob",
        inputs={"spec": render_spec(parsed).strip(), "word": word},
        outputs={"probability": format_value(probability)},
    )
    _emit(ctx, report)


@cli.command("member")
@spec_options
@click.option("--cutpoint", required=True, help="Cutpoint in [0, 1)")
@click.option("--word", default="", help="Input word (empty by default)")
@click.pass_context
@handle_errors
def member_command(ctx, spec, spec_file, cutpoint, word):
    """Cutpoint membership: is the acceptance probability strictly above the cutpoint?"""
    parsed, automaton = _load_spec(spec, spec_file)
    acceptor = CutpointAcceptor.of(automaton, parse_expression(cutpoint))
    verdict = member(acceptor, word, get_settings().MAX_BITS)
    report = build_report(
        "member",
        inputs={"spec": render_spec(parsed).strip(), "cutpoint": to_text(acceptor.cutpoint), "word": word},
        outputs={"probability": format_value(accept_prob(automaton, word)), "member": verdict},
        verdicts=[verdict],
    )
    _emit(ctx, report)


@cli.command("table")
@spec_options
@click.option("--max-length", type=click.IntRange(min=0), default=4, help="Longest word tabulated")
@click.option("--cutpoint", help="Also list the cutpoint language up to --max-length")
@click.pass_context
@handle_errors
def table(ctx, spec, spec_file, max_length, cutpoint):
    """Tabulate acceptance probabilities over all words up to a length."""
    parsed, automaton = _load_spec(spec, spec_file)
    probabilities = {
        word or "(empty)": format_value(accept_prob(automaton, word))
        for word in words_up_to(automaton.alphabet, max_length)
    }
    outputs = {"probability": probabilities}
    inputs = {"spec": render_spec(parsed).strip(), "max_length": max_length}
    if cutpoint is not None:
        acceptor = CutpointAcceptor.of(automaton, parse_expression(cutpoint))
        outputs["members"] = [word or "(empty)" for word in language_slice(acceptor, max_length)]
        inputs["cutpoint"] = to_text(acceptor.cutpoint)
    _emit(ctx, build_report("table", inputs=inputs, outputs=outputs))


@cli.group()
def oracle():
    """Closed-form acceptance probabilities."""
    pass


@oracle.command("bin-reverse")
@click.option("--word", required=True, help="Binary word")
@click.pass_context
@handle_errors
def oracle_bin_reverse(ctx, word):
    """bin(reverse(word)), the acceptance probability of Rabin's automaton."""
    value = constructions.bin_reverse_oracle(word)
    _emit(ctx, build_report("oracle bin-reverse", inputs={"word": word}, outputs={"value": format_value(value)}))


@oracle.command("cos2")
@click.option("--alpha", required=True, help='Rotation parameter, or "fixed" for the 3-4-5 rotation')
@click.option("--j", "j", type=click.IntRange(min=0), required=True, help="Number of rotations")
@click.option("--assume-irrational", is_flag=True, help="Treat a symbolic alpha as irrational")
@click.pass_context
@handle_errors
def oracle_cos2(ctx, alpha, j, assume_irrational):
    """cos^2(2*pi*j*alpha)."""
    rotation = constructions.fixed_rotation() if alpha == "fixed" else _param(alpha, assume_irrational)
    value = constructions.qfa_prob_oracle(rotation, j)
    _emit(ctx, build_report("oracle cos2", inputs={"alpha": alpha, "j": j}, outputs={"value": format_value(value)}))


@oracle.command("eigenform")
@click.option("--x", "x", required=True, help="Parameter x in (0, 1/2]")
@click.option("--m", "m", type=click.IntRange(min=0), required=True, help="Input length")
@click.pass_context
@handle_errors
def oracle_eigenform(ctx, x, m):
    """Closed form of f(0^m) for B_x, next to its eigenvalue form and the cutpoint lambda_x."""
    value = parse_expression(x)
    outputs = {
        "closed_form": format_value(constructions.closed_form_prob(value, m)),
        "eigen_form": format_value(constructions.eigen_form_prob(value, m)),
        "lambda": format_value(constructions.cutpoint_lambda(value)),
    }
    _emit(ctx, build_report("oracle eigenform", inputs={"x": to_text(value), "m": m}, outputs=outputs))


@oracle.command("primed")
@click.option("--x", "x", required=True, help="Parameter x in (0, 1/10)")
@click.option("--m", "m", type=click.IntRange(min=0), required=True, help="Input length")
@click.pass_context
@handle_errors
def oracle_primed(ctx, x, m):
    """Closed form of f(0^m) for the primed automaton with alpha = (3x+1)/2."""
    value = parse_expression(x)
    outputs = {
        "closed_form": format_value(constructions.primed_closed_form_prob(value, m)),
        "alpha": format_value(constructions.qprime_alpha(value)),
    }
    _emit(ctx, build_report("oracle primed", inputs={"x": to_text(value), "m": m}, outputs=outputs))


@cli.group()
def separate():
    """Find and certify inputs that separate two cutpoint languages."""
    pass


@separate.command("pfa-binary")
@click.option("--lambda", "lam", required=True, help="Common cutpoint")
@click.option("--alpha1", required=True, help="Smaller scaling parameter")
@click.option("--alpha2", required=True, help="Larger scaling parameter")
@click.pass_context
@handle_errors
def separate_pfa_binary(ctx, lam, alpha1, alpha2):
    """Two scaled Rabin automata with one cutpoint."""
    certificate = separation.scaled_pair_separation(
        parse_expression(lam), parse_expression(alpha1), parse_expression(alpha2)
    )
    inputs = {"lambda": lam, "alpha1": alpha1, "alpha2": alpha2}
    _emit(ctx, build_report("separate pfa-binary", inputs=inputs, verdicts=certificate.verdicts, certificates=[certificate]))


@separate.command("pfa-cutpoints")
@click.option("--lambda1", required=True, help="Smaller cutpoint")
@click.option("--lambda2", required=True, help="Larger cutpoint")
@click.pass_context
@handle_errors
def separate_pfa_cutpoints(ctx, lambda1, lambda2):
    """Rabin's automaton with two different cutpoints."""
    certificate = separation.rabin_cutpoint_separation(parse_expression(lambda1), parse_expression(lambda2))
    inputs = {"lambda1": lambda1, "lambda2": lambda2}
    _emit(ctx, build_report("separate pfa-cutpoints", inputs=inputs, verdicts=certificate.verdicts, certificates=[certificate]))


@separate.command("qfa")
@click.option("--alpha", required=True, help="First rotation parameter in (0, 1/4)")
@click.option("--beta", required=True, help="Second rotation parameter in (0, 1/4)")
@click.option("--max-index", type=int, default=None, help="Largest digit index inspected")
@click.option("--assume-irrational", is_flag=True, help="Treat symbolic parameters as irrational")
@click.pass_context
@handle_errors
def separate_qfa(ctx, alpha, beta, max_index, assume_irrational):
    """Two rotation automata with cutpoint 1/2."""
    certificate = separation.qfa_quadrant_witness(
        _param(alpha, assume_irrational), _param(beta, assume_irrational), max_index
    )
    inputs = {"alpha": alpha, "beta": beta}
    _emit(ctx, build_report("separate qfa", inputs=inputs, verdicts=certificate.verdicts, certificates=[certificate]))


@separate.command("qfa-density")
@click.option("--alpha", required=True, help='Rotation parameter, or "fixed" for the 3-4-5 rotation')
@click.option("--lambda1", required=True, help="Lower bound")
@click.option("--lambda2", required=True, help="Upper bound")
@click.option("--assume-irrational", is_flag=True, help="Treat a symbolic alpha as irrational")
@click.pass_context
@handle_errors
def separate_qfa_density(ctx, alpha, lambda1, lambda2, assume_irrational):
    """Smallest j with lambda1 < cos^2(2*pi*j*alpha) < lambda2."""
    rotation = constructions.fixed_rotation() if alpha == "fixed" else _param(alpha, assume_irrational)
    j = separation.qfa_density_witness(rotation, parse_expression(lambda1), parse_expression(lambda2))
    outputs = {"j": str(j), "probability": format_value(constructions.qfa_prob_oracle(rotation, j))}
    inputs = {"alpha": alpha, "lambda1": lambda1, "lambda2": lambda2}
    _emit(ctx, build_report("separate qfa-density", inputs=inputs, outputs=outputs))


def _unary(ctx, x1: str, x2: str, mode: str, command: str) -> None:
    certificate = separation.unary_pfa_witness(parse_expression(x1), parse_expression(x2), mode)
    _emit(ctx, build_report(command, inputs={"x1": x1, "x2": x2}, verdicts=certificate.verdicts, certificates=[certificate]))


@separate.command("pfa-unary")
@click.option("--x1", required=True, help="Smaller parameter in (0, 1/2]")
@click.option("--x2", required=True, help="Larger parameter in (0, 1/2]")
@click.pass_context
@handle_errors
def separate_pfa_unary(ctx, x1, x2):
    """B_x1 and B_x2 with their own cutpoints lambda_x."""
    _unary(ctx, x1, x2, separation.VARIABLE, "separate pfa-unary")


@separate.command("pfa-unary-fixed")
@click.option("--x1", required=True, help="Smaller parameter in (0, 1/10)")
@click.option("--x2", required=True, help="Larger parameter in (0, 1/10)")
@click.pass_context
@handle_errors
def separate_pfa_unary_fixed(ctx, x1, x2):
    """The primed automata of x1 and x2 with cutpoint 1/2."""
    _unary(ctx, x1, x2, separation.FIXED, "separate pfa-unary-fixed")


@cli.command("verify")
@click.option("--quick", is_flag=True, help="Smaller samples")
@click.option("--claim", "names", multiple=True, type=click.Choice(list(verification.CLAIMS)), help="Run only these claims")
@click.pass_context
@handle_errors
def verify(ctx, quick, names):
    """Run the claims suite; exits 1 if any claim fails."""
    claims = verification.run_claims(quick=quick, names=names)
    inputs = {"quick": quick, "claims": ",".join(names) if names else "all"}
    _emit(ctx, build_report("verify", inputs=inputs, claims=claims))
    if not all(c.passed for c in claims):
        raise click.exceptions.Exit(EXIT_CERTIFICATION)


def run_command(argv: Sequence[str]) -> int:
    """Run one command line and return its exit code; the report goes to stdout."""
    try:
        code = cli.main(args=list(argv), prog_name="cutpoint", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.exceptions.Abort:
        return EXIT_CERTIFICATION
    except click.ClickException as e:
        code, message = resolve_exit(e)
        click.echo(f"Error: {message}")
        return code
    return code if isinstance(code, int) else 0


if __name__ == "__main__":
    cli()
