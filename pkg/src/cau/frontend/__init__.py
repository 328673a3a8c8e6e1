"""Surface syntax, pretty-printing, JSON Lines traces and the command line."""

from .parser import ParseError, parse_program, parse_term  # noqa: F401
from .printer import print_subst, print_term, print_trail  # noqa: F401
