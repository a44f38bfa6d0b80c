text = "  Hello World  ".strip().lower().split()
print(text)
