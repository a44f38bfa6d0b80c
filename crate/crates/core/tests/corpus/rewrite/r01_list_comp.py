N = 5
lst = [i for i in range(N)]
print(lst)
