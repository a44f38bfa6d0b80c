def size():
    return 4
def big(v):
    return v > 3
if big(size()):
    print("big")
else:
    print("small")
