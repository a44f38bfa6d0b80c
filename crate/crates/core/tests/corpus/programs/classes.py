class Shape:
    def __init__(self, name):
        self.name = name

    def area(self):
        return 0

    def describe(self):
        return self.name + " " + str(self.area())


class Square(Shape):
    def __init__(self, side):
        super().__init__("square")
        self.side = side

    def area(self):
        return self.side * self.side


class Circle(Shape):
    def __init__(self, r):
        Shape.__init__(self, "circle")
        self.r = r

    def area(self):
        return 3.14 * self.r * self.r


shapes = [Square(2), Circle(1.0)]
for s in shapes:
    print(s.describe())
biggest = max(shapes, key=lambda x: x.area())
print(biggest.name)
