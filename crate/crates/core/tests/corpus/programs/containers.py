def tally(words):
    counts = {}
    for w in words:
        counts[w] = counts.get(w, 0) + 1
    return counts


def unique(values):
    seen = set()
    for v in values:
        seen.add(v)
    return sorted(seen)


def pairs(xs):
    return [(a, b) for a in xs for b in xs if a < b]


words = "a b a c b a".split()
table = tally(words)
print(sorted(table.items()))
print(unique([3, 1, 3, 2]))
print(pairs([1, 2, 3]))
grid = {k: k * k for k in range(3)}
print(grid)
