"""Validate inline-test chains and bind them to their target statements."""

from __future__ import annotations

import ast
from dataclasses import dataclass, field

from . import nameflow, srctext
from .discovery import SourceFile
from .finder import RawInlineTest, is_inline_test_statement

# Malformed-usage reason codes.
UNKNOWN_METHOD = "UNKNOWN_METHOD"
NO_CHECK = "NO_CHECK"
BAD_ARITY = "BAD_ARITY"
BAD_CONSTRUCTOR_ARG = "BAD_CONSTRUCTOR_ARG"
GIVEN_AFTER_CHECK = "GIVEN_AFTER_CHECK"
NON_IDENTIFIER_GIVEN_TARGET = "NON_IDENTIFIER_GIVEN_TARGET"
DUPLICATE_GIVEN = "DUPLICATE_GIVEN"
NOT_A_STATEMENT = "NOT_A_STATEMENT"
PARAM_LENGTH_MISMATCH = "PARAM_LENGTH_MISMATCH"
PARAM_NOT_LIST = "PARAM_NOT_LIST"

BINARY_CHECK_KINDS = ("eq", "neq", "same", "not_same")
UNARY_CHECK_KINDS = ("true", "false", "none", "not_none")
CHECK_METHODS = {f"check_{kind}": kind for kind in BINARY_CHECK_KINDS + UNARY_CHECK_KINDS}


class MalformedError(Exception):
    """An inline test misuses the API; rejected at collection time."""

    def __init__(self, reason: str, message: str, path: str, line: int):
        super().__init__(f"{path}:{line}: {reason}: {message}")
        self.reason = reason
        self.message = message
        self.path = path
        self.line = line


class NoTargetError(Exception):
    """The inline test is the first statement of its block."""

    def __init__(self, path: str, line: int):
        super().__init__(
            f"{path}:{line}: no statement precedes the inline test in its block"
        )
        self.path = path
        self.line = line


@dataclass
class Check:
    """One oracle from the chain; expected_expr is set only for binary kinds."""

    kind: str
    actual_expr: str
    expected_expr: str | None = None

    def call_text(self) -> str:
        if self.expected_expr is None:
            return f"check_{self.kind}({self.actual_expr})"
        return f"check_{self.kind}({self.actual_expr}, {self.expected_expr})"


@dataclass
class TargetStatement:
    """The statement under test, with its name usage summary."""

    statement_text: str
    path: str
    line: int
    column: int
    free_names: frozenset
    bound_names: frozenset


@dataclass
class InlineTestDecl:
    """A validated inline test: constructor options, inputs, and oracles."""

    path: str
    line: int
    column: int
    target: TargetStatement
    test_name: str | None = None
    parameterized: bool = False
    repeated: int = 1
    tags: list[str] = field(default_factory=list)
    disabled: bool = False
    timeout: float | None = None
    assumptions: list[str] = field(default_factory=list)
    assignments: list[tuple[str, str]] = field(default_factory=list)
    checks: list[Check] = field(default_factory=list)


def resolve_target(raw: RawInlineTest, source: SourceFile) -> TargetStatement:
    """Bind a found inline test to the nearest preceding non-inline-test statement.

    Consecutive inline tests therefore share one target. The finder records
    the target's block index during its pass; raws built by hand fall back
    to a backward scan.
    """
    index = raw.target_index
    if index is None:
        for candidate in range(raw.index_in_block - 1, -1, -1):
            if not is_inline_test_statement(raw.enclosing_block[candidate]):
                index = candidate
                break
    if index is None:
        raise NoTargetError(source.path, raw.line)
    stmt = raw.enclosing_block[index]
    flow = nameflow.statement_flow(stmt)
    return TargetStatement(
        statement_text=srctext.statement_text(source.text, stmt),
        path=source.path,
        line=stmt.lineno,
        column=stmt.col_offset,
        free_names=flow.reads,
        bound_names=flow.binds,
    )


def extract_declaration(
    raw: RawInlineTest, source: SourceFile, target: TargetStatement | None
) -> InlineTestDecl:
    """Walk the chain left to right and build the validated declaration."""
    if not raw.is_expression_statement or target is None:
        raise MalformedError(
            NOT_A_STATEMENT,
            "inline test used as a sub-expression; it must stand alone as a statement",
            raw.path,
            raw.line,
        )
    segments = _unroll_chain(raw)
    decl = InlineTestDecl(path=raw.path, line=raw.line, column=raw.column, target=target)
    _apply_constructor_options(decl, segments[0][1], raw)
    seen_check = False
    seen_vars: set = set()
    for name, call in segments[1:]:
        if name in CHECK_METHODS:
            kind = CHECK_METHODS[name]
            arity = 2 if kind in BINARY_CHECK_KINDS else 1
            args = _call_args(call, name, arity, raw)
            texts = [srctext.expression_text(source.text, a) for a in args]
            decl.checks.append(Check(kind, texts[0], texts[1] if arity == 2 else None))
            seen_check = True
        elif name == "given":
            if seen_check:
                raise MalformedError(
                    GIVEN_AFTER_CHECK,
                    "given() must come before the first check_* call",
                    raw.path,
                    raw.line,
                )
            var_node, value_node = _call_args(call, name, 2, raw)
            if not isinstance(var_node, ast.Name):
                raise MalformedError(
                    NON_IDENTIFIER_GIVEN_TARGET,
                    "first argument of given() must be a bare variable name",
                    raw.path,
                    raw.line,
                )
            if var_node.id in seen_vars:
                raise MalformedError(
                    DUPLICATE_GIVEN,
                    f"variable {var_node.id!r} assigned by more than one given()",
                    raw.path,
                    raw.line,
                )
            seen_vars.add(var_node.id)
            decl.assignments.append(
                (var_node.id, srctext.expression_text(source.text, value_node))
            )
        elif name == "assume":
            if seen_check:
                # Same chain-order rule as given(): preconditions precede checks.
                raise MalformedError(
                    GIVEN_AFTER_CHECK,
                    "assume() must come before the first check_* call",
                    raw.path,
                    raw.line,
                )
            (cond,) = _call_args(call, name, 1, raw)
            decl.assumptions.append(srctext.expression_text(source.text, cond))
        else:
            raise MalformedError(
                UNKNOWN_METHOD,
                f"{name}() is not part of the inline-test API",
                raw.path,
                raw.line,
            )
    if not decl.checks:
        raise MalformedError(
            NO_CHECK, "inline test declares no check_* oracle", raw.path, raw.line
        )
    return decl


def validate_parameterization(decl: InlineTestDecl) -> int:
    """Return the parameter count of a declaration.

    For parameterized tests, every given() value must be a list literal and
    all list literals (given values and check arguments alike) must share
    one length n >= 1; non-list check arguments are constants replicated
    across indices. Non-parameterized declarations have count 1.
    """
    if not decl.parameterized:
        return 1
    lengths: list[int] = []
    for var, value_text in decl.assignments:
        node = nameflow.parse_expression(value_text)
        if not isinstance(node, ast.List):
            raise MalformedError(
                PARAM_NOT_LIST,
                f"parameterized test requires a list literal for given({var}, ...)",
                decl.path,
                decl.line,
            )
        lengths.append(len(node.elts))
    for check in decl.checks:
        for text in filter(None, (check.actual_expr, check.expected_expr)):
            node = nameflow.parse_expression(text)
            if isinstance(node, ast.List):
                lengths.append(len(node.elts))
    if not lengths:
        return 1
    if len(set(lengths)) > 1 or lengths[0] < 1:
        raise MalformedError(
            PARAM_LENGTH_MISMATCH,
            f"parameter lists must share one nonzero length, got {sorted(set(lengths))}",
            decl.path,
            decl.line,
        )
    return lengths[0]


def unused_given_variables(decl: InlineTestDecl) -> list[str]:
    """Given variables the target statement never reads (likely typos)."""
    return [var for var, _ in decl.assignments if var not in decl.target.free_names]


_CONSTRUCTOR_OPTIONS = {
    "test_name": "a string",
    "parameterized": "a boolean",
    "repeated": "a positive integer",
    "tag": "a list of strings",
    "disabled": "a boolean",
    "timeout": "a positive number",
}


def _apply_constructor_options(
    decl: InlineTestDecl, call: ast.Call, raw: RawInlineTest
) -> None:
    def bad(detail: str) -> MalformedError:
        return MalformedError(BAD_CONSTRUCTOR_ARG, detail, raw.path, raw.line)

    if call.args:
        raise bad("constructor options must be passed as keywords")
    for kw in call.keywords:
        if kw.arg is None:
            raise bad("** argument unpacking is not allowed in the constructor")
        if kw.arg not in _CONSTRUCTOR_OPTIONS:
            raise bad(f"unknown constructor option {kw.arg!r}")
        try:
            value = ast.literal_eval(kw.value)
        except (ValueError, SyntaxError, TypeError):
            raise bad(
                f"{kw.arg} must be a literal ({_CONSTRUCTOR_OPTIONS[kw.arg]})"
            ) from None
        if kw.arg == "test_name" and isinstance(value, str):
            decl.test_name = value
        elif kw.arg == "parameterized" and isinstance(value, bool):
            decl.parameterized = value
        elif kw.arg == "disabled" and isinstance(value, bool):
            decl.disabled = value
        elif (
            kw.arg == "repeated"
            and isinstance(value, int)
            and not isinstance(value, bool)
            and value >= 1
        ):
            decl.repeated = value
        elif (
            kw.arg == "timeout"
            and isinstance(value, (int, float))
            and not isinstance(value, bool)
            and value > 0
        ):
            decl.timeout = float(value)
        elif (
            kw.arg == "tag"
            and isinstance(value, list)
            and all(isinstance(item, str) for item in value)
        ):
            decl.tags = list(value)
        else:
            raise bad(f"{kw.arg} must be {_CONSTRUCTOR_OPTIONS[kw.arg]}")


def _unroll_chain(raw: RawInlineTest) -> list[tuple[str, ast.Call]]:
    """Split the chain into (method name, call) segments, constructor first."""
    segments: list[tuple[str, ast.Call]] = []
    node = raw.chain
    while True:
        if isinstance(node, ast.Call):
            func = node.func
            if isinstance(func, ast.Attribute):
                segments.append((func.attr, node))
                node = func.value
            elif isinstance(func, ast.Name):
                segments.append((func.id, node))
                break
            else:
                raise MalformedError(
                    UNKNOWN_METHOD,
                    "chain may only contain itest() followed by method calls",
                    raw.path,
                    raw.line,
                )
        elif isinstance(node, ast.Attribute):
            raise MalformedError(
                UNKNOWN_METHOD,
                f"method {node.attr!r} referenced but never called",
                raw.path,
                raw.line,
            )
        else:
            raise MalformedError(
                UNKNOWN_METHOD,
                "chain may only contain itest() followed by method calls",
                raw.path,
                raw.line,
            )
    segments.reverse()
    return segments


def _call_args(call: ast.Call, method: str, arity: int, raw: RawInlineTest) -> list[ast.expr]:
    if call.keywords or len(call.args) != arity or any(
        isinstance(a, ast.Starred) for a in call.args
    ):
        raise MalformedError(
            BAD_ARITY,
            f"{method}() takes exactly {arity} positional argument{'s' if arity != 1 else ''}",
            raw.path,
            raw.line,
        )
    return list(call.args)
