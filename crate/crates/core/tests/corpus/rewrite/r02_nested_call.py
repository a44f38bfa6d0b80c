def funB():
    return 3
def funA(v):
    return v * 10
x = funA(funB())
print(x)
