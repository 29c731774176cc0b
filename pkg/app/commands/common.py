"""
Shared plumbing for CLI commands.
"""

import functools
import logging
import sys

import click

from app.core.errors import LCBanditError

logger = logging.getLogger(__name__)


def exit_on_error(func):
    """Map expected failures to their exit code and anything else to 1."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except LCBanditError as e:
            logger.error(f"{type(e).__name__}: {e}")
            click.echo(f"Error: {e}", err=True)
            sys.exit(e.exit_code)
        except Exception as e:
            logger.exception(f"Unhandled exception: {str(e)}")
            click.echo(f"Error: internal error: {e}", err=True)
            sys.exit(1)

    return wrapper


workers_option = click.option(
    "--workers",
    type=click.IntRange(min=1),
    default=None,
    help="Worker processes (default: config, then LCBANDIT_WORKERS).",
)
