"""Read/bind analysis of statements for dependency resolution.

Two cooperating walkers:

* an ordered, statement-level walker for code that runs in the module scope
  of a generated program (``statement_flow`` / ``body_flow``): a name counts
  as a read only if the sequence may load it before binding it, with branch
  bindings merged optimistically;
* an unordered scope analyzer for nested functions, lambdas, comprehensions,
  and classes, where Python's assigned-anywhere-is-local rule applies and
  closure lookups climb the enclosing function scopes.

Reads are names the analyzed code needs from outside itself. Builtins are
not filtered here; callers subtract ``BUILTIN_NAMES``.
"""

from __future__ import annotations

import ast
import builtins
from dataclasses import dataclass

BUILTIN_NAMES = frozenset(dir(builtins)) | {
    "__file__",
    "__name__",
    "__doc__",
    "__package__",
    "__spec__",
    "__loader__",
    "__builtins__",
    "__debug__",
    "__annotations__",
}

_Chain = tuple[frozenset, ...]


@dataclass(frozen=True)
class Flow:
    """Names a piece of code reads from its surroundings and names it binds."""

    reads: frozenset
    binds: frozenset


def statement_flow(stmt: ast.stmt) -> Flow:
    """Flow of a single statement viewed from module scope."""
    reads, bound = _flow_stmt(stmt, set())
    return Flow(frozenset(reads), frozenset(bound))


def body_flow(stmts: list[ast.stmt]) -> Flow:
    """Flow of an ordered statement sequence at one scope."""
    reads, bound = _flow_stmts(stmts, set())
    return Flow(frozenset(reads), frozenset(bound))


def expression_reads(node: ast.expr) -> frozenset:
    """Names an expression reads (walrus targets excluded)."""
    reads, _ = _flow_expr(node, set())
    return frozenset(reads)


def parse_expression(text: str) -> ast.expr:
    try:
        return ast.parse(text, mode="eval").body
    except SyntaxError:
        # A bare generator expression passed as a sole call argument needs
        # parentheses to stand alone.
        return ast.parse(f"({text})", mode="eval").body


# ---------------------------------------------------------------------------
# Ordered statement-level walker.


def _flow_stmts(stmts, bound: set) -> tuple[set, set]:
    reads: set = set()
    bound = set(bound)
    for stmt in stmts:
        r, bound = _flow_stmt(stmt, bound)
        reads |= r
    return reads, bound


def _flow_stmt(stmt, bound: set) -> tuple[set, set]:
    reads: set = set()
    bound = set(bound)

    def expr(node) -> None:
        nonlocal bound
        if node is None:
            return
        r, bound = _flow_expr(node, bound)
        reads.update(r)

    if isinstance(stmt, (ast.Assign,)):
        expr(stmt.value)
        for target in stmt.targets:
            r, b = _target_flow(target, bound)
            reads |= r
            bound |= b
    elif isinstance(stmt, ast.AnnAssign):
        expr(stmt.annotation)
        if stmt.value is not None:
            expr(stmt.value)
            r, b = _target_flow(stmt.target, bound)
            reads |= r
            bound |= b
    elif isinstance(stmt, ast.AugAssign):
        if isinstance(stmt.target, ast.Name):
            if stmt.target.id not in bound:
                reads.add(stmt.target.id)
        else:
            r, _ = _target_flow(stmt.target, bound)
            reads |= r
        expr(stmt.value)
        r, b = _target_flow(stmt.target, bound)
        reads |= r
        bound |= b
    elif isinstance(stmt, (ast.Import, ast.ImportFrom)):
        bound |= _import_bound_names(stmt)
    elif isinstance(stmt, ast.If):
        expr(stmt.test)
        r1, b1 = _flow_stmts(stmt.body, bound)
        r2, b2 = _flow_stmts(stmt.orelse, bound)
        reads |= r1 | r2
        bound = b1 | b2
    elif isinstance(stmt, (ast.While,)):
        expr(stmt.test)
        r1, b1 = _flow_stmts(stmt.body, bound)
        r2, b2 = _flow_stmts(stmt.orelse, b1)
        reads |= r1 | r2
        bound = b1 | b2
    elif isinstance(stmt, (ast.For, ast.AsyncFor)):
        expr(stmt.iter)
        r, b = _target_flow(stmt.target, bound)
        reads |= r
        bound |= b
        r1, b1 = _flow_stmts(stmt.body, bound)
        r2, b2 = _flow_stmts(stmt.orelse, b1)
        reads |= r1 | r2
        bound = b1 | b2
    elif isinstance(stmt, (ast.With, ast.AsyncWith)):
        for item in stmt.items:
            expr(item.context_expr)
            if item.optional_vars is not None:
                r, b = _target_flow(item.optional_vars, bound)
                reads |= r
                bound |= b
        r, bound = _flow_stmts(stmt.body, bound)
        reads |= r
    elif isinstance(stmt, ast.Try):
        r1, b1 = _flow_stmts(stmt.body, bound)
        reads |= r1
        merged = set(b1)
        for handler in stmt.handlers:
            hb = set(bound)
            if handler.type is not None:
                hr, hb = _flow_expr(handler.type, hb)
                reads |= hr
            if handler.name:
                hb.add(handler.name)
            hr, hb = _flow_stmts(handler.body, hb)
            reads |= hr
            hb.discard(handler.name)
            merged |= hb
        r2, b2 = _flow_stmts(stmt.orelse, b1)
        reads |= r2
        merged |= b2
        r3, b3 = _flow_stmts(stmt.finalbody, bound | merged)
        reads |= r3
        bound = merged | b3
    elif isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef)):
        for dec in stmt.decorator_list:
            expr(dec)
        reads |= _callable_signature_reads(stmt.args, bound)
        if stmt.returns is not None:
            expr(stmt.returns)
        free = _scope_free_function(stmt, chain=())
        reads |= free - bound
        bound.add(stmt.name)
    elif isinstance(stmt, ast.ClassDef):
        for dec in stmt.decorator_list:
            expr(dec)
        for base in stmt.bases:
            expr(base)
        for kw in stmt.keywords:
            expr(kw.value)
        free = _scope_free_class(stmt, chain=())
        reads |= free - bound
        bound.add(stmt.name)
    elif isinstance(stmt, ast.Match):
        expr(stmt.subject)
        merged: set = set()
        any_case = False
        for case in stmt.cases:
            cb = set(bound)
            pr, pb = _pattern_flow(case.pattern, cb)
            reads |= pr
            cb |= pb
            if case.guard is not None:
                gr, cb = _flow_expr(case.guard, cb)
                reads |= gr
            br, cb = _flow_stmts(case.body, cb)
            reads |= br
            merged |= cb
            any_case = True
        bound = merged if any_case else bound
    elif isinstance(stmt, ast.Delete):
        for target in stmt.targets:
            if not isinstance(target, ast.Name):
                r, _ = _target_flow(target, bound)
                reads |= r
    elif isinstance(stmt, (ast.Global, ast.Nonlocal, ast.Pass, ast.Break, ast.Continue)):
        pass
    else:
        # Expr, Return, Raise, Assert, and anything else purely expression-based.
        for node in ast.iter_child_nodes(stmt):
            if isinstance(node, ast.expr):
                expr(node)
    return reads, bound


def _target_flow(target, bound: set) -> tuple[set, set]:
    """Reads and binds produced by an assignment target."""
    reads: set = set()
    binds: set = set()
    if isinstance(target, ast.Name):
        binds.add(target.id)
    elif isinstance(target, ast.Starred):
        r, b = _target_flow(target.value, bound)
        reads |= r
        binds |= b
    elif isinstance(target, (ast.Tuple, ast.List)):
        for elt in target.elts:
            r, b = _target_flow(elt, bound)
            reads |= r
            binds |= b
    elif isinstance(target, (ast.Attribute, ast.Subscript)):
        r, _ = _flow_expr(target.value, bound)
        reads |= r
        if isinstance(target, ast.Subscript):
            r, _ = _flow_expr(target.slice, bound)
            reads |= r
    return reads, binds


def _flow_expr(node, bound: set) -> tuple[set, set]:
    """Reads of an expression; walrus targets extend the bound set."""
    reads: set = set()
    bound = set(bound)

    def walk(n) -> None:
        nonlocal bound
        if isinstance(n, ast.Name):
            if isinstance(n.ctx, ast.Load) and n.id not in bound:
                reads.add(n.id)
            elif isinstance(n.ctx, ast.Store):
                bound.add(n.id)
            return
        if isinstance(n, ast.NamedExpr):
            walk(n.value)
            bound.add(n.target.id)
            return
        if isinstance(n, ast.Lambda):
            for default in list(n.args.defaults) + [d for d in n.args.kw_defaults if d]:
                walk(default)
            free = _scope_free_expr(n.body, _arg_names(n.args), chain=())
            reads.update(free - bound)
            return
        if isinstance(n, (ast.ListComp, ast.SetComp, ast.GeneratorExp, ast.DictComp)):
            reads.update(_comprehension_free(n, chain=()) - bound)
            # The first iterable is evaluated in the enclosing scope.
            walk(n.generators[0].iter)
            return
        for child in ast.iter_child_nodes(n):
            walk(child)

    walk(node)
    return reads, bound


def _pattern_flow(pattern, bound: set) -> tuple[set, set]:
    reads: set = set()
    binds: set = set()
    for node in ast.walk(pattern):
        if isinstance(node, ast.MatchValue):
            r, _ = _flow_expr(node.value, bound)
            reads |= r
        elif isinstance(node, ast.MatchClass):
            r, _ = _flow_expr(node.cls, bound)
            reads |= r
        elif isinstance(node, (ast.MatchAs, ast.MatchStar)) and node.name:
            binds.add(node.name)
        elif isinstance(node, ast.MatchMapping) and node.rest:
            binds.add(node.rest)
    return reads, binds


def _import_bound_names(stmt) -> set:
    names = set()
    for alias in stmt.names:
        if alias.name == "*":
            continue
        names.add(alias.asname if alias.asname else alias.name.split(".")[0])
    return names


def _callable_signature_reads(args: ast.arguments, bound: set) -> set:
    reads: set = set()
    for default in list(args.defaults) + [d for d in args.kw_defaults if d]:
        r, _ = _flow_expr(default, bound)
        reads |= r
    for arg in _all_args(args):
        if arg.annotation is not None:
            r, _ = _flow_expr(arg.annotation, bound)
            reads |= r
    return reads


# ---------------------------------------------------------------------------
# Unordered scope analyzer for nested scopes.


def _all_args(args: ast.arguments):
    return [*args.posonlyargs, *args.args, *args.kwonlyargs] + (
        [args.vararg] if args.vararg else []
    ) + ([args.kwarg] if args.kwarg else [])


def _arg_names(args: ast.arguments) -> set:
    return {a.arg for a in _all_args(args)}


def _scope_free_function(node, chain: _Chain) -> set:
    """Free names of a function body relative to module scope."""
    locals_ = _arg_names(node.args) | _scope_locals(node.body)
    declared = _declared_names(node.body)
    locals_ -= declared["global"]
    return _free_in_block(node.body, locals_, declared["global"], chain)


def _scope_free_expr(body: ast.expr, params: set, chain: _Chain) -> set:
    free: set = set()
    _walk_scope_expr(body, params, set(), chain, free)
    return free


def _scope_free_class(node: ast.ClassDef, chain: _Chain) -> set:
    """Free names of a class body; methods do not see the class scope."""
    class_locals = _scope_locals(node.body)
    declared = _declared_names(node.body)
    class_locals -= declared["global"]
    free: set = set()
    for stmt in node.body:
        if isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef)):
            for dec in stmt.decorator_list:
                _walk_scope_expr(dec, class_locals, declared["global"], chain, free)
            for default in list(stmt.args.defaults) + [d for d in stmt.args.kw_defaults if d]:
                _walk_scope_expr(default, class_locals, declared["global"], chain, free)
            free |= _scope_free_function(stmt, chain)  # class scope skipped
        elif isinstance(stmt, ast.ClassDef):
            free |= _scope_free_class(stmt, chain)
            for dec in stmt.decorator_list:
                _walk_scope_expr(dec, class_locals, declared["global"], chain, free)
            for base in stmt.bases:
                _walk_scope_expr(base, class_locals, declared["global"], chain, free)
        else:
            free |= _free_in_block([stmt], class_locals, declared["global"], chain)
    return free


def _free_in_block(stmts, locals_: set, globals_: set, chain: _Chain) -> set:
    free: set = set()
    for stmt in stmts:
        _walk_scope_stmt(stmt, locals_, globals_, chain, free)
    return free


def _walk_scope_stmt(stmt, locals_: set, globals_: set, chain: _Chain, free: set) -> None:
    if isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef)):
        for dec in stmt.decorator_list:
            _walk_scope_expr(dec, locals_, globals_, chain, free)
        for default in list(stmt.args.defaults) + [d for d in stmt.args.kw_defaults if d]:
            _walk_scope_expr(default, locals_, globals_, chain, free)
        for arg in _all_args(stmt.args):
            if arg.annotation is not None:
                _walk_scope_expr(arg.annotation, locals_, globals_, chain, free)
        if stmt.returns is not None:
            _walk_scope_expr(stmt.returns, locals_, globals_, chain, free)
        free |= _scope_free_function(stmt, chain + (frozenset(locals_),))
        return
    if isinstance(stmt, ast.ClassDef):
        for dec in stmt.decorator_list:
            _walk_scope_expr(dec, locals_, globals_, chain, free)
        for base in stmt.bases:
            _walk_scope_expr(base, locals_, globals_, chain, free)
        for kw in stmt.keywords:
            _walk_scope_expr(kw.value, locals_, globals_, chain, free)
        free |= _scope_free_class(stmt, chain + (frozenset(locals_),))
        return
    if isinstance(stmt, (ast.Global, ast.Nonlocal)):
        return
    for child in ast.iter_child_nodes(stmt):
        if isinstance(child, ast.expr):
            _walk_scope_expr(child, locals_, globals_, chain, free)
        elif isinstance(child, ast.stmt):
            _walk_scope_stmt(child, locals_, globals_, chain, free)
        elif isinstance(child, ast.excepthandler):
            if child.type is not None:
                _walk_scope_expr(child.type, locals_, globals_, chain, free)
            for sub in child.body:
                _walk_scope_stmt(sub, locals_, globals_, chain, free)
        elif isinstance(child, ast.match_case):
            for node in ast.walk(child.pattern):
                if isinstance(node, ast.MatchValue):
                    _walk_scope_expr(node.value, locals_, globals_, chain, free)
                elif isinstance(node, ast.MatchClass):
                    _walk_scope_expr(node.cls, locals_, globals_, chain, free)
            if child.guard is not None:
                _walk_scope_expr(child.guard, locals_, globals_, chain, free)
            for sub in child.body:
                _walk_scope_stmt(sub, locals_, globals_, chain, free)


def _walk_scope_expr(node, locals_: set, globals_: set, chain: _Chain, free: set) -> None:
    if isinstance(node, ast.Name):
        if isinstance(node.ctx, ast.Load):
            name = node.id
            if name in globals_:
                free.add(name)
            elif name not in locals_ and not any(name in scope for scope in chain):
                free.add(name)
        return
    if isinstance(node, ast.Lambda):
        for default in list(node.args.defaults) + [d for d in node.args.kw_defaults if d]:
            _walk_scope_expr(default, locals_, globals_, chain, free)
        inner_chain = chain + (frozenset(locals_),)
        free |= _scope_free_expr(node.body, _arg_names(node.args), inner_chain)
        return
    if isinstance(node, (ast.ListComp, ast.SetComp, ast.GeneratorExp, ast.DictComp)):
        _walk_scope_expr(node.generators[0].iter, locals_, globals_, chain, free)
        free |= _comprehension_free(node, chain + (frozenset(locals_),))
        return
    for child in ast.iter_child_nodes(node):
        if isinstance(child, (ast.expr, ast.keyword, ast.comprehension, ast.arguments)):
            _walk_scope_expr(child, locals_, globals_, chain, free)
        elif isinstance(child, ast.stmt):
            _walk_scope_stmt(child, locals_, globals_, chain, free)


def _comprehension_free(node, chain: _Chain) -> set:
    """Free names of a comprehension, excluding the first iterable."""
    comp_locals: set = set()
    for gen in node.generators:
        _, binds = _target_flow(gen.target, set())
        comp_locals |= binds
    free: set = set()
    parts: list[ast.expr] = []
    if isinstance(node, ast.DictComp):
        parts += [node.key, node.value]
    else:
        parts.append(node.elt)
    for i, gen in enumerate(node.generators):
        if i > 0:
            parts.append(gen.iter)
        parts.extend(gen.ifs)
    for part in parts:
        _walk_scope_expr(part, comp_locals, set(), chain, free)
    return free


def _scope_locals(stmts) -> set:
    """Names bound anywhere at this scope level (nested scopes excluded)."""
    binds: set = set()
    for stmt in stmts:
        _collect_binds(stmt, binds)
    return binds


def _collect_binds(stmt, binds: set) -> None:
    if isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
        binds.add(stmt.name)
        return
    if isinstance(stmt, (ast.Import, ast.ImportFrom)):
        binds |= _import_bound_names(stmt)
        return
    if isinstance(stmt, ast.Assign):
        for target in stmt.targets:
            _, b = _target_flow(target, set())
            binds |= b
    elif isinstance(stmt, ast.AnnAssign):
        # Annotation alone already makes the name scope-local.
        if isinstance(stmt.target, ast.Name):
            binds.add(stmt.target.id)
    elif isinstance(stmt, ast.AugAssign):
        _, b = _target_flow(stmt.target, set())
        binds |= b
    elif isinstance(stmt, (ast.For, ast.AsyncFor)):
        _, b = _target_flow(stmt.target, set())
        binds |= b
    elif isinstance(stmt, (ast.With, ast.AsyncWith)):
        for item in stmt.items:
            if item.optional_vars is not None:
                _, b = _target_flow(item.optional_vars, set())
                binds |= b
    elif isinstance(stmt, ast.Match):
        for case in stmt.cases:
            _, b = _pattern_flow(case.pattern, set())
            binds |= b
    # Walrus targets bind in the containing scope.
    for node in _walk_same_scope(stmt):
        if isinstance(node, ast.NamedExpr):
            binds.add(node.target.id)
    for child in ast.iter_child_nodes(stmt):
        if isinstance(child, ast.stmt):
            _collect_binds(child, binds)
        elif isinstance(child, ast.excepthandler):
            for sub in child.body:
                _collect_binds(sub, binds)
        elif isinstance(child, ast.match_case):
            for sub in child.body:
                _collect_binds(sub, binds)


def _walk_same_scope(node):
    """Walk expression nodes without descending into nested scopes."""
    stack = [node]
    while stack:
        current = stack.pop()
        yield current
        if isinstance(current, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef,
                                ast.Lambda, ast.ListComp, ast.SetComp, ast.GeneratorExp,
                                ast.DictComp)):
            continue
        stack.extend(ast.iter_child_nodes(current))


def _declared_names(stmts) -> dict:
    declared = {"global": set(), "nonlocal": set()}
    for stmt in stmts:
        for node in _walk_same_scope_stmts(stmt):
            if isinstance(node, ast.Global):
                declared["global"] |= set(node.names)
            elif isinstance(node, ast.Nonlocal):
                declared["nonlocal"] |= set(node.names)
    return declared


def _walk_same_scope_stmts(stmt):
    stack = [stmt]
    while stack:
        current = stack.pop()
        yield current
        for child in ast.iter_child_nodes(current):
            if isinstance(child, (ast.FunctionDef, ast.AsyncFunctionDef,
                                  ast.ClassDef, ast.Lambda)):
                continue
            if isinstance(child, (ast.stmt, ast.excepthandler, ast.match_case)):
                stack.append(child)
