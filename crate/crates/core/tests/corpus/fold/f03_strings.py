s = "ab"
t = s * 3
u = t + "-" + s
v = "x" + str(12)
n = len(u)
