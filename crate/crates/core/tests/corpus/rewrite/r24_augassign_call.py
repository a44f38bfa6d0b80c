def one():
    return 1
def add(v):
    return v + 10
total = 0
total += add(one())
print(total)
