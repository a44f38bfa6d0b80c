class ParseFailure(Exception):
    pass


def parse_int(text):
    try:
        value = int(text)
    except ValueError:
        raise ParseFailure(text)
    return value


def safe_parse(text, default=0):
    try:
        return parse_int(text)
    except ParseFailure as err:
        print("bad", err)
        return default
    finally:
        print("done", text)


print(safe_parse("12"))
print(safe_parse("x1", -1))
