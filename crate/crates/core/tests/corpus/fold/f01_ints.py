a = 7
b = a * 3 - 4
c = b // 2
d = b % 5
e = -c + d ** 2
f = e << 2
g = f >> 1 | 3
h = g & 12 ^ a
