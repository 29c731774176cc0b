"""
gen-traces command.
"""

import logging

import click

from app.commands.common import exit_on_error
from app.traces import generate_traces, save_traces
from app.utils.config_loader import load_synthetic_spec

logger = logging.getLogger(__name__)


@click.command("gen-traces")
@click.option("--spec", "spec_path", required=True, type=click.Path(dir_okay=False), help="SyntheticSpec YAML.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False), help="Output .csv or .json file.")
@exit_on_error
def gen_traces_command(spec_path: str, out_path: str):
    """Generate synthetic tuning traces; the format follows the output suffix."""
    spec = load_synthetic_spec(spec_path)
    traces = generate_traces(spec)
    path = save_traces(traces, out_path)
    click.echo(f"Wrote {len(traces)} traces ({spec.n_datasets} datasets x {spec.n_arms} arms) to {path}")
