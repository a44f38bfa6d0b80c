def table():
    return {"a": [1, 2, 3], "b": [4]}
def key():
    return "a"
first = table()[key()]
print(first)
