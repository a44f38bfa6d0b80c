base = 100
rate = 0.05
years = 3
gain = base * rate * years
final = base + gain
label = "total=" + str(final)
ok = final > base
none = None
same = none is None
