"""Shared helpers for management commands."""
import json
from contextlib import contextmanager

from django.core.exceptions import ValidationError
from django.core.management.base import CommandError

from variational.exceptions import DvqoaError

BASE_OPTIONS = {
    "verbosity",
    "settings",
    "pythonpath",
    "traceback",
    "no_color",
    "force_color",
    "skip_checks",
    "stdout",
    "stderr",
}


def resolved_options(options):
    return {k: v for k, v in sorted(options.items()) if k not in BASE_OPTIONS}


def echo_config(command, options, **derived):
    """Print the fully resolved configuration block before a run."""
    block = resolved_options(options)
    block.update(derived)
    command.stdout.write("Effective config: " + json.dumps(block, default=str))
    return block


@contextmanager
def translate_errors():
    """Input errors exit with status 2, runtime failures with status 1."""
    try:
        yield
    except ValidationError as exc:
        raise CommandError("; ".join(exc.messages), returncode=2) from exc
    except DvqoaError as exc:
        raise CommandError(str(exc), returncode=1) from exc
