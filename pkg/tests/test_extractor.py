from __future__ import annotations

import pytest

from conftest import CORPUS, line_of, write_source
from itest_runner import extractor
from itest_runner.discovery import load_source
from itest_runner.extractor import (
    BAD_ARITY,
    BAD_CONSTRUCTOR_ARG,
    DUPLICATE_GIVEN,
    GIVEN_AFTER_CHECK,
    NO_CHECK,
    NON_IDENTIFIER_GIVEN_TARGET,
    NOT_A_STATEMENT,
    PARAM_LENGTH_MISMATCH,
    PARAM_NOT_LIST,
    UNKNOWN_METHOD,
    MalformedError,
    NoTargetError,
    extract_declaration,
    resolve_target,
    validate_parameterization,
)
from itest_runner.finder import find_inline_tests


def _decls_of(path):
    source = load_source(str(path))
    decls = []
    for raw in find_inline_tests(source):
        target = resolve_target(raw, source) if raw.is_expression_statement else None
        decls.append(extract_declaration(raw, source, target))
    return decls


def _single_decl(tmp_path, body: str, name: str = "subject.py"):
    path = write_source(tmp_path, name, body)
    (decl,) = _decls_of(path)
    return decl


def test_fig1_target_is_the_preceding_match_assignment():
    source = load_source(str(CORPUS / "fig1.py"))
    (raw,) = find_inline_tests(source)
    target = resolve_target(raw, source)
    assert target.line == line_of(CORPUS / "fig1.py", "m = re.match")
    assert target.statement_text == 'm = re.match("^(.+):\\\\d+$", name)'
    assert target.bound_names == {"m"}
    assert {"re", "name"} <= set(target.free_names)


def test_consecutive_tests_share_one_target(tmp_path):
    path = write_source(
        tmp_path,
        "shared.py",
        """\
        from inline import itest


        def f(seq):
            total = sum(seq)
            itest().given(seq, [1]).check_eq(total, 1)
            itest().given(seq, [2, 3]).check_eq(total, 5)
        """,
    )
    first, second = _decls_of(path)
    expected_line = line_of(path, "total = sum(seq)")
    assert first.target.line == second.target.line == expected_line
    assert first.target.statement_text == second.target.statement_text == "total = sum(seq)"


def test_inline_test_first_in_block_has_no_target(tmp_path):
    path = write_source(
        tmp_path,
        "first.py",
        """\
        from inline import itest


        def f(x):
            itest().given(x, 1).check_true(x)
        """,
    )
    source = load_source(str(path))
    (raw,) = find_inline_tests(source)
    with pytest.raises(NoTargetError):
        resolve_target(raw, source)


def test_fig1_declaration_fields():
    (decl,) = _decls_of(CORPUS / "fig1.py")
    assert decl.test_name == "check_match_name"
    assert decl.assignments == [("name", '"a:0"')]
    assert len(decl.checks) == 1
    check = decl.checks[0]
    assert (check.kind, check.actual_expr, check.expected_expr) == ("eq", "m.group(1)", '"a"')
    assert not decl.parameterized and decl.repeated == 1 and not decl.disabled
    assert decl.timeout is None and decl.tags == [] and decl.assumptions == []


def test_timeout_option_without_given(tmp_path):
    decl = _single_decl(
        tmp_path,
        """\
        from inline import itest

        x = 5
        itest(timeout=5).check_true(x)
        """,
    )
    assert decl.timeout == 5.0
    assert decl.assignments == []
    assert [(c.kind, c.actual_expr) for c in decl.checks] == [("true", "x")]


def test_all_constructor_options_parse(tmp_path):
    decl = _single_decl(
        tmp_path,
        """\
        from inline import itest

        x = 5
        itest(test_name="named", parameterized=False, repeated=3,
              tag=["str", "bit"], disabled=True, timeout=2.5).check_true(x)
        """,
    )
    assert decl.test_name == "named"
    assert decl.repeated == 3
    assert decl.tags == ["str", "bit"]
    assert decl.disabled is True
    assert decl.timeout == 2.5


def test_multiple_checks_kept_in_chain_order(tmp_path):
    decl = _single_decl(
        tmp_path,
        """\
        from inline import itest

        pair = (1, 2)
        itest().check_eq(pair[0], 1).check_neq(pair[1], 1).check_not_none(pair)
        """,
    )
    assert [c.kind for c in decl.checks] == ["eq", "neq", "not_none"]


def test_assume_collected_before_checks(tmp_path):
    decl = _single_decl(
        tmp_path,
        """\
        from inline import itest
        import sys

        flag = sys.maxsize > 0
        itest().assume(sys.maxsize > 2).assume(flag or True).check_true(flag)
        """,
    )
    assert decl.assumptions == ["sys.maxsize > 2", "flag or True"]


@pytest.mark.parametrize(
    ("corpus_name", "reason"),
    [
        ("malformed_unknown_method.py", UNKNOWN_METHOD),
        ("malformed_no_check.py", NO_CHECK),
        ("malformed_bad_arity.py", BAD_ARITY),
        ("malformed_bad_constructor_arg.py", BAD_CONSTRUCTOR_ARG),
        ("malformed_given_after_check.py", GIVEN_AFTER_CHECK),
        ("malformed_non_identifier_given.py", NON_IDENTIFIER_GIVEN_TARGET),
        ("malformed_duplicate_given.py", DUPLICATE_GIVEN),
        ("malformed_not_a_statement.py", NOT_A_STATEMENT),
    ],
)
def test_malformed_corpus_reason_codes(corpus_name, reason):
    path = CORPUS / corpus_name
    with pytest.raises(MalformedError) as info:
        _decls_of(path)
    assert info.value.reason == reason
    assert info.value.path == str(path)
    assert info.value.line == line_of(path, "itest(")


@pytest.mark.parametrize(
    ("chain", "reason"),
    [
        ('itest("positional").check_true(x)', BAD_CONSTRUCTOR_ARG),
        ("itest(timeout=duration()).check_true(x)", BAD_CONSTRUCTOR_ARG),
        ("itest(timeout=0).check_true(x)", BAD_CONSTRUCTOR_ARG),
        ("itest(repeated=0).check_true(x)", BAD_CONSTRUCTOR_ARG),
        ("itest(repeated=True).check_true(x)", BAD_CONSTRUCTOR_ARG),
        ("itest(tag=['a', 1]).check_true(x)", BAD_CONSTRUCTOR_ARG),
        ("itest(tag='a').check_true(x)", BAD_CONSTRUCTOR_ARG),
        ("itest(test_name=3).check_true(x)", BAD_CONSTRUCTOR_ARG),
        ("itest().check_true(x, 1)", BAD_ARITY),
        ("itest().check_same(x)", BAD_ARITY),
        ("itest().given(x)", BAD_ARITY),
        ("itest().assume()", BAD_ARITY),
        ("itest().given(x, 1, 2).check_true(x)", BAD_ARITY),
        ("itest().check_eq(actual=x, expected=1)", BAD_ARITY),
        ("itest().check_eq(*pair)", BAD_ARITY),
        ("itest().check_eq(x, 1).assume(True)", GIVEN_AFTER_CHECK),
        ("itest().frobnicate(x).check_true(x)", UNKNOWN_METHOD),
        ("itest().given", UNKNOWN_METHOD),
    ],
)
def test_malformed_chain_variants(tmp_path, chain, reason):
    body = f"from inline import itest\n\nx = 1\npair = (1, 2)\n{chain}\n"
    path = write_source(tmp_path, "variant.py", body)
    with pytest.raises(MalformedError) as info:
        _decls_of(path)
    assert info.value.reason == reason


def test_parameterized_table1_example_has_count_two():
    (decl,) = _decls_of(CORPUS / "table1_parameterized.py")
    assert validate_parameterization(decl) == 2


def test_non_parameterized_count_is_one():
    (decl,) = _decls_of(CORPUS / "fig1.py")
    assert validate_parameterization(decl) == 1


def test_parameter_list_length_mismatch(tmp_path):
    decl = _single_decl(
        tmp_path,
        """\
        from inline import itest

        def f(x):
            y = x + 1
            itest(parameterized=True).given(x, [1, 2]).check_eq(y, [2, 3, 4])
        """,
    )
    with pytest.raises(MalformedError) as info:
        validate_parameterization(decl)
    assert info.value.reason == PARAM_LENGTH_MISMATCH


def test_parameterized_given_must_be_list_literal(tmp_path):
    decl = _single_decl(
        tmp_path,
        """\
        from inline import itest

        def f(x):
            y = x + 1
            itest(parameterized=True).given(x, 1).check_eq(y, [2])
        """,
    )
    with pytest.raises(MalformedError) as info:
        validate_parameterization(decl)
    assert info.value.reason == PARAM_NOT_LIST


def test_parameterized_constant_check_argument_replicates(tmp_path):
    decl = _single_decl(
        tmp_path,
        """\
        from inline import itest

        def f(x):
            y = x * 0
            itest(parameterized=True).given(x, [1, 2, 3]).check_eq(y, 0)
        """,
    )
    assert validate_parameterization(decl) == 3


def test_compound_target_included_verbatim(tmp_path):
    path = write_source(
        tmp_path,
        "compound.py",
        """\
        from inline import itest


        def f(xs):
            total = 0
            for x in xs:
                total += x
            itest().given(xs, [1, 2]).check_eq(total, 3)
        """,
    )
    (decl,) = _decls_of(path)
    assert decl.target.statement_text == "for x in xs:\n    total += x"


def test_unused_given_variable_detected(tmp_path):
    decl = _single_decl(
        tmp_path,
        """\
        from inline import itest

        def f(x):
            y = x + 1
            itest().given(x, 1).given(typo, 9).check_eq(y, 2)
        """,
    )
    assert extractor.unused_given_variables(decl) == ["typo"]


def test_extraction_is_static_no_subject_code_runs(tmp_path):
    marker = tmp_path / "side_effect.txt"
    path = write_source(
        tmp_path,
        "effectful.py",
        f"""\
        from inline import itest

        open({str(marker)!r}, "w").write("ran")
        x = 1
        itest().check_true(x)
        """,
    )
    _decls_of(path)
    assert not marker.exists()


def _serialize(decl) -> str:
    options = []
    if decl.test_name is not None:
        options.append(f"test_name={decl.test_name!r}")
    if decl.parameterized:
        options.append("parameterized=True")
    if decl.repeated != 1:
        options.append(f"repeated={decl.repeated}")
    if decl.tags:
        options.append(f"tag={decl.tags!r}")
    if decl.disabled:
        options.append("disabled=True")
    if decl.timeout is not None:
        options.append(f"timeout={decl.timeout}")
    parts = [f"itest({', '.join(options)})"]
    parts.extend(f"assume({a})" for a in decl.assumptions)
    parts.extend(f"given({var}, {value})" for var, value in decl.assignments)
    parts.extend(check.call_text() for check in decl.checks)
    return ".".join(parts)


@pytest.mark.parametrize(
    "chain",
    [
        'itest().given(x, 1).check_eq(y, 2)',
        'itest(test_name="n", repeated=2, tag=["a"], timeout=1.5)'
        '.assume(x > 0).given(x, 1).check_neq(y, 0).check_not_none(y)',
        'itest(parameterized=True).given(x, [1, 2]).check_eq(y, [2, 3])',
        'itest(disabled=True).check_false([])',
    ],
)
def test_declaration_round_trips_through_reserialization(tmp_path, chain):
    body = f"from inline import itest\n\nx = 0\ny = x + 1\n{chain}\n"
    path = write_source(tmp_path, "original.py", body)
    (decl,) = _decls_of(path)

    rebuilt = f"from inline import itest\n\nx = 0\ny = x + 1\n{_serialize(decl)}\n"
    path2 = write_source(tmp_path, "rebuilt.py", rebuilt)
    (decl2,) = _decls_of(path2)

    for field in ("test_name", "parameterized", "repeated", "tags", "disabled",
                  "timeout", "assumptions", "assignments", "checks"):
        assert getattr(decl, field) == getattr(decl2, field), field
