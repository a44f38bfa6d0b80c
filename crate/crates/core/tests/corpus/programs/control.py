def classify(n):
    if n < 0:
        kind = "negative"
    elif n == 0:
        kind = "zero"
    else:
        kind = "positive"
    return kind


def search(items, target):
    index = -1
    i = 0
    while i < len(items):
        if items[i] == target:
            index = i
            break
        i += 1
    else:
        index = -2
    return index


def skip_odd(values):
    out = []
    for v in values:
        if v % 2:
            continue
        out.append(v)
    return out


for n in (-3, 0, 7):
    print(classify(n))
print(search([4, 5, 6], 5), search([1], 9))
print(skip_odd(range(7)))
