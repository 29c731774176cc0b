"""
CLI entrypoint for lcbandit.
Registers the run, sweep, analyze and gen-traces commands.
"""

import logging

import click

from app.commands import analyze_command, gen_traces_command, run_command, sweep_command
from app.core.config import settings
from app.core.logger import setup_logging

logger = logging.getLogger(__name__)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--verbose", "-v", is_flag=True, default=False, help="Debug logging.")
@click.version_option(settings.VERSION, prog_name=settings.APP_NAME)
def cli(verbose: bool):
    """Learning-curve bandits replayed on recorded tuning traces."""
    setup_logging(verbose=True if verbose else None)
    logger.debug(f"{settings.APP_NAME} {settings.VERSION} starting in {settings.environment.value} mode")


cli.add_command(run_command)
cli.add_command(sweep_command)
cli.add_command(analyze_command)
cli.add_command(gen_traces_command)


if __name__ == "__main__":
    cli()
