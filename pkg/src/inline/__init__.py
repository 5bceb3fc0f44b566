"""Runtime no-op API for inline tests.

Importing ``itest`` marks a file as containing inline tests. At normal
program run time every call in an ``itest(...)`` chain does nothing and
returns the same chainable object, so annotated code executes unchanged.
The runner never imports this module; it analyzes the source text.
"""

from __future__ import annotations

__all__ = ["itest"]


class _InlineTest:
    __slots__ = ()

    def given(self, variable, value):
        return self

    def assume(self, condition):
        return self

    def check_eq(self, actual, expected):
        return self

    def check_neq(self, actual, expected):
        return self

    def check_true(self, actual):
        return self

    def check_false(self, actual):
        return self

    def check_none(self, actual):
        return self

    def check_not_none(self, actual):
        return self

    def check_same(self, actual, expected):
        return self

    def check_not_same(self, actual, expected):
        return self


_CHAIN = _InlineTest()


def itest(test_name=None, parameterized=False, repeated=1, tag=None,
          disabled=False, timeout=None):
    """Start an inline-test chain; a no-op outside the runner."""
    return _CHAIN
