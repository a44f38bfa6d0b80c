def inc(x):
    return x + 1


def double(x):
    return x * 2


def compose(f, g):
    def both(x):
        return g(f(x))
    return both


def apply_all(fns, value):
    results = []
    for fn in fns:
        results.append(fn(value))
    return results


h = compose(inc, double)
print(h(3))
print(apply_all([inc, double, h], 5))
mapped = list(map(inc, [1, 2, 3]))
kept = list(filter(lambda v: v > 2, mapped))
print(mapped, kept)
ordered = sorted(["bb", "a", "ccc"], key=len)
print(ordered)
