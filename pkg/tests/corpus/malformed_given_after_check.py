from inline import itest


def compute(x):
    y = x + 1
    itest().check_eq(y, 2).given(x, 1)
