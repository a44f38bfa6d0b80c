def tag(name):
    print("eval", name)
    return name
def combine(a, b, c):
    return a + b + c
out = combine(tag("a"), "-", tag("b"))
print(out)
