"""Exact symbolic kernel and jet-space field-theory identity checks."""

from ._core import (
    Document,
    Expr,
    compute,
    einstein_from_currents,
    equal_numeric,
    parse_document,
    parse_expr,
    print_document,
    rational,
    run_report,
    variable,
)

__all__ = [
    "Document",
    "Expr",
    "compute",
    "einstein_from_currents",
    "equal_numeric",
    "parse_document",
    "parse_expr",
    "print_document",
    "rational",
    "run_report",
    "variable",
]
