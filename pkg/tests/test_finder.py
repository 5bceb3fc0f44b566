from __future__ import annotations

import ast

from conftest import CORPUS, line_of, write_source
from itest_runner.discovery import load_source
from itest_runner.finder import find_inline_tests, has_marker_import


def test_fig1_file_yields_one_inline_test_at_the_chain_line():
    source = load_source(str(CORPUS / "fig1.py"))
    found = find_inline_tests(source)
    assert len(found) == 1
    assert found[0].line == line_of(CORPUS / "fig1.py", "itest(")
    assert found[0].is_expression_statement


def test_local_itest_function_without_marker_import_is_not_scanned(tmp_path):
    path = write_source(
        tmp_path,
        "local.py",
        """\
        def itest():
            return None

        x = 1
        itest()
        """,
    )
    assert find_inline_tests(load_source(str(path))) == []


def test_three_consecutive_tests_share_block_with_consecutive_ordinals(tmp_path):
    path = write_source(
        tmp_path,
        "triple.py",
        """\
        from inline import itest


        def f(x):
            y = x + 1
            itest().given(x, 1).check_eq(y, 2)
            itest().given(x, 2).check_eq(y, 3)
            itest().given(x, 3).check_eq(y, 4)
        """,
    )
    source = load_source(str(path))
    found = find_inline_tests(source)

    # Independent oracle: walk every expression statement and re-slice its
    # text from the file; inline tests are exactly those starting "itest".
    expected = []
    for node in ast.walk(source.tree):
        if isinstance(node, ast.Expr):
            segment = ast.get_source_segment(source.text, node)
            if segment is not None and segment.startswith("itest"):
                expected.append(node.lineno)
    assert sorted(expected) == [raw.line for raw in found]

    assert len(found) == 3
    blocks = {id(raw.enclosing_block) for raw in found}
    assert len(blocks) == 1
    ordinals = [raw.index_in_block for raw in found]
    assert ordinals == [ordinals[0], ordinals[0] + 1, ordinals[0] + 2]


def test_every_found_test_resliced_from_source_starts_with_itest():
    for name in ("fig1.py", "table1_oracles.py", "table1_tags.py"):
        source = load_source(str(CORPUS / name))
        for raw in find_inline_tests(source):
            lines = source.text.splitlines()
            sliced = lines[raw.line - 1][raw.column :]
            assert sliced.startswith("itest"), (name, raw.line)


def test_finding_does_not_mutate_the_tree():
    source = load_source(str(CORPUS / "table1_oracles.py"))
    before = ast.dump(source.tree, include_attributes=True)
    find_inline_tests(source)
    assert ast.dump(source.tree, include_attributes=True) == before


def test_marker_import_forms(tmp_path):
    recognized = [
        "from inline import itest\n",
        "import itest\n",
        "import itest.plus.submodule\n",
        "from somewhere.else_ import itest\n",
        "import another as itest\n",
    ]
    unrecognized = [
        "from inline import itest as it\n",
        "import inline\n",
        "from inline import something\n",
    ]
    for index, text in enumerate(recognized):
        path = write_source(tmp_path, f"yes{index}.py", text)
        assert has_marker_import(load_source(str(path)).tree), text
    for index, text in enumerate(unrecognized):
        path = write_source(tmp_path, f"no{index}.py", text)
        assert not has_marker_import(load_source(str(path)).tree), text


def test_chain_used_as_subexpression_is_surfaced_not_ignored():
    source = load_source(str(CORPUS / "malformed_not_a_statement.py"))
    found = find_inline_tests(source)
    assert len(found) == 1
    assert not found[0].is_expression_statement


def test_attribute_access_without_constructor_call_is_not_a_test(tmp_path):
    path = write_source(
        tmp_path,
        "nocall.py",
        """\
        from inline import itest

        x = 1
        itest.given
        """,
    )
    assert find_inline_tests(load_source(str(path))) == []


def test_tests_inside_nested_blocks_are_found_once_each(tmp_path):
    path = write_source(
        tmp_path,
        "nested.py",
        """\
        from inline import itest


        def outer(flag, xs):
            if flag:
                for x in xs:
                    y = x * 2
                    itest().given(x, 3).check_eq(y, 6)
            else:
                z = len(xs)
                itest().given(xs, [1]).check_eq(z, 1)
        """,
    )
    found = find_inline_tests(load_source(str(path)))
    assert [raw.is_expression_statement for raw in found] == [True, True]
    assert len({(raw.line, raw.column) for raw in found}) == 2
