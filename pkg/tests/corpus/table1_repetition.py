from inline import itest


def accumulate(seq):
    total = sum(seq)
    itest(repeated=2).given(seq, [1, 2, 3]).check_eq(total, 6)
