"""Expand declarations into test cases and generate standalone programs.

Each generated program is self-contained: the support statements copied
from the subject file, the given-input assignments, the target statement,
and instrumented assertions, ending with a sentinel print that tells the
executor how the run ended.
"""

from __future__ import annotations

import ast
import hashlib
import importlib.util
import json
import re
import textwrap
from dataclasses import dataclass, field

from . import nameflow, srctext
from .discovery import SourceFile
from .extractor import Check, InlineTestDecl

PASS_SENTINEL = "ITEST-PASS"
SKIP_SENTINEL = "ITEST-SKIP-ASSUMPTION"
FAIL_SENTINEL_PREFIX = "ITEST-FAIL "

_PLUMBING = '''\
import json as __itest_json
import sys as __itest_sys


def __itest_fail(record):
    print("ITEST-FAIL " + __itest_json.dumps(record))
    __itest_sys.exit(1)
'''

_FAIL_CONDITIONS = {
    "eq": "not (__itest_actual == __itest_expected)",
    "neq": "not (__itest_actual != __itest_expected)",
    "true": "not __itest_actual",
    "false": "__itest_actual",
    "none": "__itest_actual is not None",
    "not_none": "__itest_actual is None",
    "same": "__itest_actual is not __itest_expected",
    "not_same": "__itest_actual is __itest_expected",
}


class UnresolvedNameError(Exception):
    """A name needed by the assembled program has no top-level origin.

    ``missing_module`` is set when the name is bound by a subject import
    whose module fails the availability probe.
    """

    def __init__(self, name: str, test_id: str, path: str, line: int,
                 missing_module: str | None = None):
        detail = f"cannot resolve name {name!r} for inline test {test_id}"
        if missing_module:
            detail += f" (module {missing_module!r} is not importable)"
        super().__init__(detail)
        self.name = name
        self.test_id = test_id
        self.path = path
        self.line = line
        self.missing_module = missing_module


@dataclass
class SentinelProtocol:
    pass_marker: str = PASS_SENTINEL
    skip_marker: str = SKIP_SENTINEL
    fail_prefix: str = FAIL_SENTINEL_PREFIX


@dataclass
class TestProgram:
    support_statements: list[str]
    input_statements: list[str]
    target_text: str
    assertion_statements: list[str]
    assumption_expr: str | None
    sentinel_protocol: SentinelProtocol = field(default_factory=SentinelProtocol)


@dataclass
class TestCase:
    """One executable unit after parameterization expansion."""

    id: str
    display_name: str
    decl: InlineTestDecl
    param_index: int
    tags: list[str]
    disabled: bool
    repeated: int
    timeout: float | None
    program: TestProgram
    file: str
    line: int
    program_path: str | None = None


def base_id(decl: InlineTestDecl) -> str:
    return f"{decl.path}::{decl.line}"


def expand(
    decl: InlineTestDecl,
    count: int,
    support: list[str],
    default_timeout: float | None = None,
) -> list[TestCase]:
    """Expand a declaration into ``count`` cases, pairing list elements by index."""
    cases = []
    for index in range(count):
        case_id = base_id(decl)
        if decl.parameterized:
            case_id += f"[p{index}]"
        inputs = [
            f"{var} = {_element_text(value, index) if decl.parameterized else value}"
            for var, value in decl.assignments
        ]
        checks = [
            Check(
                check.kind,
                _element_text(check.actual_expr, index) if decl.parameterized else check.actual_expr,
                None
                if check.expected_expr is None
                else (_element_text(check.expected_expr, index) if decl.parameterized else check.expected_expr),
            )
            for check in decl.checks
        ]
        assumption = (
            " and ".join(f"({a})" for a in decl.assumptions) if decl.assumptions else None
        )
        program = TestProgram(
            support_statements=list(support),
            input_statements=inputs,
            target_text=decl.target.statement_text,
            assertion_statements=[_render_check(c, i) for i, c in enumerate(checks)],
            assumption_expr=assumption,
        )
        cases.append(
            TestCase(
                id=case_id,
                display_name=decl.test_name if decl.test_name else case_id,
                decl=decl,
                param_index=index,
                tags=list(decl.tags),
                disabled=decl.disabled,
                repeated=decl.repeated,
                timeout=decl.timeout if decl.timeout is not None else default_timeout,
                program=program,
                file=decl.path,
                line=decl.line,
            )
        )
    return cases


def _element_text(expr_text: str, index: int) -> str:
    """Element ``index`` of a list-literal expression, or the expression itself."""
    node = nameflow.parse_expression(expr_text)
    if isinstance(node, ast.List):
        return srctext.expression_text(expr_text, node.elts[index])
    return expr_text


def resolve_dependencies(
    decl: InlineTestDecl,
    source: SourceFile,
    probe_cache: dict | None = None,
) -> list[str]:
    """Copy the subject's top-level statements the assembled body needs.

    Free names of the body resolve against the subject file's top level:
    imports are copied as-is, and function/class definitions or assignments
    are copied with their own free names resolved transitively, preserving
    source order. Builtins are always available. Modules named by copied
    imports are probed for availability so missing dependencies surface at
    collection time rather than as runtime errors.
    """
    test_id = base_id(decl)
    index = _toplevel_binding_index(source)
    needed = sorted(_declaration_free_names(decl))
    # Names the inputs and the target bind exist by the time copied
    # definitions dereference them; they are never chased transitively.
    bound_by_body = set(decl.target.bound_names) | {var for var, _ in decl.assignments}
    target_position = (decl.target.line, decl.target.column)
    selected: list[ast.stmt] = []
    picked: set = set()
    resolved: set = set()
    queue = list(needed)
    while queue:
        name = queue.pop(0)
        if name in resolved:
            continue
        resolved.add(name)
        # The target statement itself is never support; it runs as the target.
        binders = [
            stmt
            for stmt in index.get(name, [])
            if (stmt.lineno, stmt.col_offset) != target_position
        ]
        if not binders:
            if name in nameflow.BUILTIN_NAMES:
                continue
            raise UnresolvedNameError(name, test_id, decl.path, decl.line)
        for stmt in binders:
            if id(stmt) in picked:
                continue
            picked.add(id(stmt))
            selected.append(stmt)
            reads = nameflow.statement_flow(stmt).reads
            queue.extend(sorted(reads - resolved - bound_by_body))
    selected.sort(key=lambda stmt: (stmt.lineno, stmt.col_offset))
    _probe_imports(selected, decl, test_id, probe_cache if probe_cache is not None else {})
    return [srctext.statement_text(source.text, stmt) for stmt in selected]


def generate_program(case: TestCase) -> str:
    """Render the standalone program text for one case (deterministic)."""
    program = case.program
    sections: list[str] = []
    if program.support_statements:
        sections.append("\n".join(program.support_statements))
    sections.append(_PLUMBING.rstrip("\n"))
    body_lines = list(program.input_statements)
    body_lines.append(program.target_text)
    body_lines.extend(program.assertion_statements)
    body_lines.append(f'print("{PASS_SENTINEL}")')
    body = "\n".join(body_lines)
    if program.assumption_expr is None:
        sections.append(body)
    else:
        sections.append(
            f"if {program.assumption_expr}:\n"
            + textwrap.indent(body, "    ")
            + f'\nelse:\n    print("{SKIP_SENTINEL}")'
        )
    text = "\n\n".join(sections) + "\n"
    ast.parse(text)  # generation bug guard: the program must be a valid module
    return text


def program_file_name(case_id: str) -> str:
    """Deterministic, filesystem-safe file name for a case's program."""
    stem = re.sub(r"[^A-Za-z0-9_.-]+", "_", case_id).strip("_")
    digest = hashlib.sha1(case_id.encode("utf-8")).hexdigest()[:8]
    return f"{stem}_{digest}.py"


def _render_check(check: Check, index: int) -> str:
    lines = [f"__itest_actual = ({check.actual_expr})"]
    record_parts = [
        f'"kind": "{check.kind}"',
        f'"check_index": {index}',
        f'"actual_expr": {json.dumps(check.actual_expr)}',
        '"actual_repr": repr(__itest_actual)',
    ]
    if check.expected_expr is not None:
        lines.append(f"__itest_expected = ({check.expected_expr})")
        record_parts.insert(3, f'"expected_expr": {json.dumps(check.expected_expr)}')
        record_parts.append('"expected_repr": repr(__itest_expected)')
    lines.append(f"if {_FAIL_CONDITIONS[check.kind]}:")
    lines.append("    __itest_fail({" + ", ".join(record_parts) + "})")
    return "\n".join(lines)


def _declaration_free_names(decl: InlineTestDecl) -> set:
    """Names the assembled body reads from module scope, in execution order.

    The assumption guard evaluates before the given assignments run, so its
    reads never come from given variables.
    """
    reads: set = set()
    bound: set = set()
    for condition in decl.assumptions:
        reads |= nameflow.expression_reads(nameflow.parse_expression(condition))
    for var, value in decl.assignments:
        reads |= nameflow.expression_reads(nameflow.parse_expression(value)) - bound
        bound.add(var)
    reads |= decl.target.free_names - bound
    bound |= decl.target.bound_names
    for check in decl.checks:
        for text in filter(None, (check.actual_expr, check.expected_expr)):
            reads |= nameflow.expression_reads(nameflow.parse_expression(text)) - bound
    return reads


def _toplevel_binding_index(source: SourceFile) -> dict:
    """Map each name to the top-level statements that bind it, in source order.

    Only imports, function/class definitions, and assignment forms count as
    origins; a name bound solely inside a conditional or loop body has no
    copyable snapshot.
    """
    index: dict = {}
    for stmt in source.tree.body:
        if isinstance(stmt, (ast.Import, ast.ImportFrom)):
            names = {
                alias.asname if alias.asname else alias.name.split(".")[0]
                for alias in stmt.names
                if alias.name != "*"
            }
        elif isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
            names = {stmt.name}
        elif isinstance(stmt, (ast.Assign, ast.AnnAssign, ast.AugAssign)):
            names = set(nameflow.statement_flow(stmt).binds)
        else:
            continue
        for name in names:
            index.setdefault(name, []).append(stmt)
    return index


def _probe_imports(
    selected: list[ast.stmt],
    decl: InlineTestDecl,
    test_id: str,
    cache: dict,
) -> None:
    for stmt in selected:
        if isinstance(stmt, ast.Import):
            for alias in stmt.names:
                bound = alias.asname if alias.asname else alias.name.split(".")[0]
                if not _module_available(alias.name, cache):
                    raise UnresolvedNameError(
                        bound, test_id, decl.path, decl.line, missing_module=alias.name
                    )
        elif isinstance(stmt, ast.ImportFrom):
            if stmt.level:
                name = stmt.names[0].asname or stmt.names[0].name
                raise UnresolvedNameError(
                    name, test_id, decl.path, decl.line,
                    missing_module="." * stmt.level + (stmt.module or ""),
                )
            if stmt.module and not _module_available(stmt.module, cache):
                for alias in stmt.names:
                    bound = alias.asname if alias.asname else alias.name
                    raise UnresolvedNameError(
                        bound, test_id, decl.path, decl.line, missing_module=stmt.module
                    )


def _module_available(module: str, cache: dict) -> bool:
    if module not in cache:
        try:
            cache[module] = importlib.util.find_spec(module) is not None
        except (ImportError, ValueError):
            cache[module] = False
    return cache[module]
