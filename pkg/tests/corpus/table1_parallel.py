from inline import itest


def independent_math(n):
    doubled = n * 2
    itest().given(n, 2).check_eq(doubled, 4)
    squared = n ** 2
    itest().given(n, 3).check_eq(squared, 9)
    halved = n // 2
    itest().given(n, 10).check_eq(halved, 5)
    negated = -n
    itest().given(n, 7).check_eq(negated, -7)
