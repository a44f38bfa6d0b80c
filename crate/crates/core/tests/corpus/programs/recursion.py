def fact(n):
    if n <= 1:
        return 1
    return n * fact(n - 1)


def is_even(n):
    if n == 0:
        return True
    return is_odd(n - 1)


def is_odd(n):
    if n == 0:
        return False
    return is_even(n - 1)


def flatten(tree):
    if not isinstance(tree, list):
        return [tree]
    out = []
    for node in tree:
        out.extend(flatten(node))
    return out


print(fact(5), is_even(4), is_odd(3))
print(flatten([1, [2, [3, 4]], 5]))
