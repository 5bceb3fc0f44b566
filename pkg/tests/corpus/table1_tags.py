from inline import itest


def group_filtering(s):
    shouted = s + "!"
    itest(tag=["str"]).given(s, "x").check_eq(shouted, "x!")
    doubled = s * 2
    itest(tag=["regex"]).given(s, "y").check_eq(doubled, "yy")
    trimmed = s.strip()
    itest(tag=["bit", "str"]).given(s, " z ").check_eq(trimmed, "z")
