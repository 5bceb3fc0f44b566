"""Exact source-text slicing for statements and expressions.

Node positions are byte offsets within parser lines (split on \\n, \\r\\n,
and \\r only, unlike ``str.splitlines``), so slicing encodes each boundary
line. The line split is cached per source text; the stdlib helper re-splits
the whole file on every call, which is quadratic over a large file.
"""

from __future__ import annotations

import ast
import textwrap
from functools import lru_cache


@lru_cache(maxsize=16)
def _lines_keepends(text: str) -> tuple[str, ...]:
    lines: list[str] = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            lines.append(text[start : i + 1])
            start = i + 1
        elif ch == "\r":
            if i + 1 < n and text[i + 1] == "\n":
                i += 1
            lines.append(text[start : i + 1])
            start = i + 1
        i += 1
    if start < n:
        lines.append(text[start:])
    return tuple(lines)


def expression_text(source_text: str, node: ast.AST) -> str:
    """Return the exact source slice of a node."""
    lineno = getattr(node, "lineno", None)
    end_lineno = getattr(node, "end_lineno", None)
    end_col = getattr(node, "end_col_offset", None)
    if lineno is None or end_lineno is None or end_col is None:
        raise ValueError("node carries no source positions")
    lines = _lines_keepends(source_text)
    col = node.col_offset
    if lineno == end_lineno:
        return lines[lineno - 1].encode()[col:end_col].decode()
    first = lines[lineno - 1].encode()[col:].decode()
    middle = lines[lineno : end_lineno - 1]
    last = lines[end_lineno - 1].encode()[:end_col].decode()
    return "".join([first, *middle, last])


def statement_text(source_text: str, node: ast.stmt) -> str:
    """Return the dedented source slice of a statement, decorators included.

    When the statement owns its lines, whole lines are sliced so compound
    bodies keep their relative indentation, then the common leading indent
    is stripped. A statement sharing a line with other statements (via
    ``;``) falls back to the bare segment.
    """
    lines = _lines_keepends(source_text)
    start = node.lineno
    decorators = getattr(node, "decorator_list", None)
    if decorators:
        start = min(start, min(d.lineno for d in decorators))
    end = node.end_lineno or start
    head = (
        lines[start - 1].encode()[: node.col_offset].decode()
        if start == node.lineno
        else ""
    )
    tail = lines[end - 1].encode()[node.end_col_offset or 0 :].decode()
    shares_line = bool(head.strip()) or bool(tail.split("#", 1)[0].strip())
    if shares_line and not decorators:
        return expression_text(source_text, node)
    sliced = "".join(lines[start - 1 : end])
    return textwrap.dedent(sliced).rstrip("\r\n")
