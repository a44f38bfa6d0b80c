from sub_folder1.module1 import Greeter
from sub_folder1 import module2
import sub_folder2.helpers as helpers


def run():
    g = Greeter("world")
    print(g.greet())
    print(module2.twice(helpers.clamp(15, 0, 10)))
    return helpers.apply(module2.twice, 4)


print(run())
