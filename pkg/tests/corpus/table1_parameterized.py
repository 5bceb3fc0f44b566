from inline import itest
import re


def match_names(names):
    for name in names:
        m = re.match("^(.+):\\d+$", name)
        itest(parameterized=True).given(name, ["a:0", "a:1:1"]).check_eq(m.group(1), ["a", "a:1"])
