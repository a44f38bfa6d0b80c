vals = [v * v for v in range(10) if v % 3 == 0]
print(vals)
