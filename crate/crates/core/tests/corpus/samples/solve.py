x = 0
if x > 0:
    def solve():
        return 1
else:
    def solve():
        return 2
solve(x)
