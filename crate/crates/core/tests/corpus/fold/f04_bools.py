p = 3 > 2
q = not p
r = p and 5
s = q or "fallback"
t = 1 < 2 < 3
u = p == (1 == 1)
k = 0 if q else 9
