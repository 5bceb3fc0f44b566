from inline import itest
import re


def assign_by_name(names):
    for name in names:
        m = re.match("^(.+):\\d+$", name)
        itest(test_name="check_match_name").given(name, "a:0").check_eq(m.group(1), "a")
