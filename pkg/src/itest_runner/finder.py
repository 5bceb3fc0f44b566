"""Locate the marker import and inline-test statements in a parsed file."""

from __future__ import annotations

import ast
from dataclasses import dataclass

from .discovery import SourceFile

CONSTRUCTOR_NAME = "itest"


@dataclass
class RawInlineTest:
    """One located use of the inline-test constructor, still unvalidated.

    ``is_expression_statement`` is False when the chain was used as a
    sub-expression (for example assigned to a variable); the extractor
    rejects those as malformed rather than silently ignoring them.
    """

    statement: ast.stmt
    chain: ast.expr
    path: str
    line: int  # 1-based
    column: int  # 0-based
    enclosing_block: list[ast.stmt]
    index_in_block: int
    is_expression_statement: bool = True
    # Index of the nearest preceding non-inline-test statement in the block,
    # precomputed during the single finder pass; None if nothing precedes.
    target_index: int | None = None


def has_marker_import(tree: ast.Module) -> bool:
    """True if any import in the file binds the bare name ``itest``."""
    for node in ast.walk(tree):
        if isinstance(node, ast.Import):
            for alias in node.names:
                bound = alias.asname if alias.asname else alias.name.split(".")[0]
                if bound == CONSTRUCTOR_NAME:
                    return True
        elif isinstance(node, ast.ImportFrom):
            for alias in node.names:
                if alias.name == "*":
                    continue
                bound = alias.asname if alias.asname else alias.name
                if bound == CONSTRUCTOR_NAME:
                    return True
    return False


def is_inline_test_statement(stmt: ast.stmt) -> bool:
    """True for an expression statement whose chain starts with ``itest(...)``."""
    return isinstance(stmt, ast.Expr) and _chain_root(stmt.value) is not None


def find_inline_tests(source: SourceFile) -> list[RawInlineTest]:
    """Find every inline-test chain in the file, in source order.

    Files without an import binding ``itest`` are not scanned at all, so a
    local function that happens to share the name never triggers discovery.
    """
    if not has_marker_import(source.tree):
        return []
    found: list[RawInlineTest] = []
    for block in _statement_blocks(source.tree):
        last_non_test: int | None = None
        for index, stmt in enumerate(block):
            if is_inline_test_statement(stmt):
                chain = stmt.value  # type: ignore[attr-defined]
                found.append(
                    RawInlineTest(
                        statement=stmt,
                        chain=chain,
                        path=source.path,
                        line=chain.lineno,
                        column=chain.col_offset,
                        enclosing_block=block,
                        index_in_block=index,
                        target_index=last_non_test,
                    )
                )
                constructor_calls = {id(_constructor_call(chain))}
            else:
                last_non_test = index
                constructor_calls = set()
            # Constructor calls anywhere else in the statement's own
            # expressions are misuse (NOT_A_STATEMENT). Nested statement
            # bodies are scanned as blocks of their own.
            for node in _walk_own_expressions(stmt):
                if (
                    isinstance(node, ast.Call)
                    and isinstance(node.func, ast.Name)
                    and node.func.id == CONSTRUCTOR_NAME
                    and id(node) not in constructor_calls
                ):
                    found.append(
                        RawInlineTest(
                            statement=stmt,
                            chain=node,
                            path=source.path,
                            line=node.lineno,
                            column=node.col_offset,
                            enclosing_block=block,
                            index_in_block=index,
                            is_expression_statement=False,
                        )
                    )
    found.sort(key=lambda raw: (raw.line, raw.column))
    return found


def _statement_blocks(tree: ast.Module):
    """Yield every statement list in the tree (module, bodies, branches, ...)."""
    stack: list[ast.AST] = [tree]
    while stack:
        node = stack.pop()
        for _, value in ast.iter_fields(node):
            if isinstance(value, list):
                if value and all(isinstance(v, ast.stmt) for v in value):
                    yield value
                for item in value:
                    if isinstance(item, ast.AST):
                        stack.append(item)
            elif isinstance(value, ast.AST):
                stack.append(value)


def _walk_own_expressions(stmt: ast.stmt):
    """Walk a statement's expression subtree without entering child statements."""
    stack: list[ast.AST] = [stmt]
    while stack:
        node = stack.pop()
        if node is not stmt and isinstance(node, ast.stmt):
            continue
        yield node
        stack.extend(ast.iter_child_nodes(node))


def _chain_root(expr: ast.expr) -> ast.Name | None:
    """The ``itest`` name at the base of a call chain, if this is one."""
    node = expr
    called = False
    while True:
        if isinstance(node, ast.Call):
            node = node.func
            called = True
        elif isinstance(node, ast.Attribute):
            node = node.value
            called = False
        elif isinstance(node, ast.Name):
            if called and node.id == CONSTRUCTOR_NAME:
                return node
            return None
        else:
            return None


def _constructor_call(expr: ast.expr) -> ast.Call | None:
    """The innermost ``itest(...)`` call of a chain."""
    node = expr
    innermost = None
    while True:
        if isinstance(node, ast.Call):
            innermost = node
            node = node.func
        elif isinstance(node, ast.Attribute):
            node = node.value
        else:
            return innermost
