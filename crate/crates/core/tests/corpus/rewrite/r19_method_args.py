items = []
def make(v):
    return v * 3
items.append(make(len("abc")))
print(items)
