def countdown(n):
    while n > 0:
        yield n
        n -= 1


def evens(limit):
    for i in range(limit):
        if i % 2 == 0:
            yield i


def first(gen):
    for item in gen:
        return item
    return None


print(list(countdown(3)))
print(sum(evens(10)))
print(first(evens(5)))
squares = (v * v for v in range(4))
print(list(squares))
