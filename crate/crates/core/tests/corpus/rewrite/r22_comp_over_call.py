def source():
    print("source called")
    return [3, 1, 2]
doubled = [v * 2 for v in sorted(source())]
print(doubled)
