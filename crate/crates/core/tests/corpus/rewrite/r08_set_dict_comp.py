words = ["aa", "b", "aa", "ccc"]
lengths = {len(w) for w in words}
index = {w: len(w) for w in words}
print(sorted(lengths), sorted(index.items()))
