"""Common function related to the CLI."""

import argparse
import logging

import ska_ser_logging

from ska_sdp_double_bubble.configuration.config import LOG_LEVEL
from ska_sdp_double_bubble.geometry.lattice import Lattice, make_lattice
from ska_sdp_double_bubble.utilities.errors import InvalidParameterError, UsageError

LATTICE_GRAMMAR = "cubic:L | rect:a,b,c | rhombic:s,h"


class ArgumentParser(argparse.ArgumentParser):
    """Parser raising ``UsageError`` instead of exiting."""

    def error(self, message):
        raise UsageError(message)


def setup_parser(doc: str) -> ArgumentParser:
    """Create the parser with default options."""

    parser = ArgumentParser(
        description=doc,
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--verbose", help="Output verbose", action="store_true", default=False)
    parser.add_argument("--debug", help="Output debug logs", action="store_true", default=False)
    return parser


def configure_logging(args: argparse.Namespace):
    """Set up the logging from the environment level and the verbosity flags."""

    level = LOG_LEVEL
    if args.verbose:
        level = min(level, logging.INFO)
    if args.debug:
        level = logging.DEBUG

    ska_ser_logging.configure_logging(level)


def lattice_spec_parse(text: str) -> Lattice:
    """
    Parse a lattice specification such as ``cubic:1`` or ``rhombic:1,0.8``.

    Raises:
        UsageError: if the text does not follow the grammar or a length is invalid.
    """
    kind, sep, values = text.strip().partition(":")
    if not sep or not values:
        raise UsageError(f"Bad lattice {text!r}, expected {LATTICE_GRAMMAR}")
    try:
        params = [float(v) for v in values.split(",")]
        return make_lattice(kind.strip().lower(), params)
    except InvalidParameterError as err:
        raise UsageError(f"Bad lattice {text!r}: {err}; expected {LATTICE_GRAMMAR}") from err
    except ValueError as err:
        raise UsageError(f"Bad lattice {text!r}, expected {LATTICE_GRAMMAR}") from err
