def make(n):
    add = lambda v: v + n
    return add(1)
print(make(41))
