_ret = "user value"
def inner():
    return 2
def outer(v):
    return v + 1
y = outer(inner())
print(_ret, y)
