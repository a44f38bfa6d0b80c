def square(n):
    return n * n


def total(values):
    acc = 0
    for v in values:
        acc += square(v)
    return acc


def mean(values):
    if not values:
        return 0.0
    return total(values) / len(values)


nums = [1, 2, 3, 4]
print(total(nums))
print(mean(nums))
print(mean([]))
