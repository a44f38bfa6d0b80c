def clamp(v, lo, hi):
    return max(lo, min(v, hi))


def apply(fn, value):
    return fn(value)
