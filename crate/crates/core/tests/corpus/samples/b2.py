c = 10
a = -1
if c>0:
    a = a+1
else:
    a = 0
total = c+a
