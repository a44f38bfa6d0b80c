from sub_folder1.module2 import twice


class Greeter:
    def __init__(self, name):
        self.name = name

    def greet(self):
        return "hello " + self.name * twice(1)
