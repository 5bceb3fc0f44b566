from inline import itest


def compute(x):
    y = x + 1
    itest().given(x, 1)
