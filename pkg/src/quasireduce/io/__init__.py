"""Expression parser, session files and report documents."""

from .parser import SymbolTable, parse_expr
from .report import parse_report, render_json, render_text
from .session import Session, load, loads

__all__ = ["Session", "SymbolTable", "load", "loads", "parse_expr", "parse_report", "render_json", "render_text"]
