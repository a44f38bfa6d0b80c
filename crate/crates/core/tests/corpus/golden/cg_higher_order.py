def g():
    pass

h = g
h()
