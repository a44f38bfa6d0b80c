"""Map code objects of a project to dotted names using the ast module."""
import ast
import os


def module_name(root, path, standalone):
    if standalone:
        return os.path.splitext(os.path.basename(path))[0]
    rel = os.path.relpath(path, root)
    parts = os.path.splitext(rel)[0].split(os.sep)
    if parts[-1] == "__init__":
        parts = parts[:-1]
    return ".".join([os.path.basename(os.path.abspath(root))] + parts)


def project_files(root, standalone):
    if standalone:
        return [os.path.abspath(root)]
    out = []
    for d, dirs, files in os.walk(root):
        dirs[:] = sorted(x for x in dirs if not x.startswith(".") and x != "__pycache__")
        for f in sorted(files):
            if f.endswith(".py"):
                out.append(os.path.abspath(os.path.join(d, f)))
    return out


class Scopes(ast.NodeVisitor):
    """Records (first line, name) -> (kind, qualname) for every def, class and lambda."""

    def __init__(self):
        self.stack = []
        self.found = {}

    def _first_line(self, node):
        decos = getattr(node, "decorator_list", [])
        return min([node.lineno] + [d.lineno for d in decos])

    def _scope(self, node, kind, name):
        qual = ".".join(self.stack + [name])
        self.found[(self._first_line(node), name)] = (kind, qual)
        for d in getattr(node, "decorator_list", []):
            self.visit(d)
        self.stack.append(name)
        for child in ast.iter_child_nodes(node):
            if child not in getattr(node, "decorator_list", []):
                self.visit(child)
        self.stack.pop()

    def visit_FunctionDef(self, node):
        self._scope(node, "function", node.name)

    visit_AsyncFunctionDef = visit_FunctionDef

    def visit_ClassDef(self, node):
        self._scope(node, "class", node.name)

    def visit_Lambda(self, node):
        qual = ".".join(self.stack + ["<lambda>"])
        self.found[(node.lineno, "<lambda>")] = ("lambda", qual)
        self.generic_visit(node)


class ProjectMap:
    def __init__(self, root, standalone):
        self.root = root
        self.standalone = standalone
        self.modules = {}
        self.scopes = {}
        for path in project_files(root, standalone):
            self.modules[path] = module_name(root, path, standalone)
            with open(path) as fh:
                tree = ast.parse(fh.read(), path)
            s = Scopes()
            s.visit(tree)
            self.scopes[path] = s.found

    def owns(self, filename):
        return os.path.abspath(filename) in self.modules

    def describe(self, code):
        """(kind, module, qualname) for a code object of a project file, else None.

        Comprehension scopes are reported with kind "inline" and the
        qualname of the scope they appear in is resolved by the caller.
        """
        path = os.path.abspath(code.co_filename)
        if path not in self.modules:
            return None
        mod = self.modules[path]
        if code.co_name == "<module>":
            return ("module", mod, None)
        if code.co_name in ("<listcomp>", "<setcomp>", "<dictcomp>", "<genexpr>"):
            return ("inline", mod, None)
        hit = self.scopes[path].get((code.co_firstlineno, code.co_name))
        if hit is None:
            return ("unknown", mod, code.co_name)
        return (hit[0], mod, hit[1])

    def fqn(self, frame):
        """Dotted name of the nearest project scope that owns `frame`."""
        f = frame
        while f is not None:
            d = self.describe(f.f_code)
            if d is not None and d[0] != "inline":
                kind, mod, qual = d
                return mod if qual is None else mod + "." + qual
            f = f.f_back
        return None
