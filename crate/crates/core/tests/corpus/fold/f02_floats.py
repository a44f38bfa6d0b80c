x = 1.5
y = x * 4
z = y / 3
w = 7 / 2
v = z - 0.25
u = 2 ** -1
t = 10 // 4.0
