//! Project directory tree, import relations and name qualification.

mod fqn;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::frontend::*;
pub use fqn::{builtin_names, call_sites, resolve_fqn, Binding, CallSite, NameContext, Resolved};

/// A directory or `.py` file. A package directory carries its
/// `__init__.py` as its own module.
#[derive(Debug, Clone)]
pub struct TreeNode {
    pub name: String,
    pub full_name: String,
    pub path: PathBuf,
    pub children: Vec<TreeNode>,
    pub module: Option<Module>,
    /// Set instead of `module` when the file failed to parse.
    pub parse_error: Option<ParseError>,
    /// The node stands for a `.py` file (including `__init__.py`).
    pub is_source: bool,
}

impl TreeNode {
    /// Pre-order traversal.
    pub fn nodes(&self) -> Vec<&TreeNode> {
        let mut out = vec![self];
        for c in &self.children {
            out.extend(c.nodes());
        }
        out
    }

    /// Nodes backed by a source file.
    pub fn source_nodes(&self) -> Vec<&TreeNode> {
        self.nodes().into_iter().filter(|n| n.is_source).collect()
    }

    pub fn find(&self, full_name: &str) -> Option<&TreeNode> {
        self.nodes().into_iter().find(|n| n.full_name == full_name)
    }

    /// Package that relative imports in this module are anchored at.
    pub fn package(&self) -> String {
        let is_init =
            self.path.file_name().is_some_and(|n| n == "__init__.py") || self.path.is_dir();
        if is_init {
            self.full_name.clone()
        } else {
            parent_name(&self.full_name).unwrap_or_default()
        }
    }

    pub fn parse_errors(&self) -> Vec<&ParseError> {
        self.nodes()
            .into_iter()
            .filter_map(|n| n.parse_error.as_ref())
            .collect()
    }
}

fn parent_name(dotted: &str) -> Option<String> {
    dotted.rsplit_once('.').map(|(p, _)| p.to_string())
}

/// Mirror `root` as a tree, parsing every `.py` file. Parse failures are
/// kept on the node; directories without sources are skipped.
pub fn build_dir_tree(root: &Path) -> Result<TreeNode> {
    let meta = std::fs::metadata(root).map_err(|source| Error::Io {
        path: root.to_path_buf(),
        source,
    })?;
    if !meta.is_dir() {
        return Err(Error::Invalid(format!(
            "{}: not a directory",
            root.display()
        )));
    }
    let name = crate::frontend::root_name(root).unwrap_or_else(|| "root".to_string());
    Ok(
        dir_node(root, name.clone(), name.clone())?.unwrap_or_else(|| TreeNode {
            name: name.clone(),
            full_name: name,
            path: root.to_path_buf(),
            children: Vec::new(),
            module: None,
            parse_error: None,
            is_source: false,
        }),
    )
}

fn load(path: &Path) -> Result<(Option<Module>, Option<ParseError>)> {
    let text = read_source(path)?;
    Ok(match parse_module(&text, &path.display().to_string()) {
        Ok(m) => (Some(m), None),
        Err(e) => (None, Some(e)),
    })
}

fn dir_node(dir: &Path, name: String, full_name: String) -> Result<Option<TreeNode>> {
    let io = |source| Error::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()
        .map_err(io)?;
    entries.sort();
    let mut node = TreeNode {
        name,
        full_name: full_name.clone(),
        path: dir.to_path_buf(),
        children: Vec::new(),
        module: None,
        parse_error: None,
        is_source: false,
    };
    for p in entries {
        let fname = p
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        if fname.starts_with('.') || fname == "__pycache__" {
            continue;
        }
        if p.is_dir() {
            if let Some(child) = dir_node(&p, fname.clone(), format!("{full_name}.{fname}"))? {
                node.children.push(child);
            }
        } else if let Some(stem) = fname.strip_suffix(".py") {
            let (module, parse_error) = load(&p)?;
            if stem == "__init__" {
                node.module = module;
                node.parse_error = parse_error;
                node.is_source = true;
                node.path = p;
            } else {
                node.children.push(TreeNode {
                    name: stem.to_string(),
                    full_name: format!("{full_name}.{stem}"),
                    path: p,
                    children: Vec::new(),
                    module,
                    parse_error,
                    is_source: true,
                });
            }
        }
    }
    if node.children.is_empty() && !node.is_source {
        return Ok(None);
    }
    Ok(Some(node))
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ImportedSymbol {
    pub name: String,
    pub asname: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ImportRelation {
    pub importer: String,
    /// Resolved dotted module name; for an unresolvable relative import the
    /// dotted text as written.
    pub imported_module: String,
    pub symbols: Vec<ImportedSymbol>,
    pub relative_level: u32,
    pub wildcard: bool,
    /// Target is a module of the project.
    pub internal: bool,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Diagnostic {
    pub module: String,
    pub line: u32,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}: {}", self.module, self.line, self.message)
    }
}

pub type ModuleDict = BTreeMap<String, Vec<ImportRelation>>;

/// Where an import statement's module name points.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Target {
    Node(String),
    External(String),
    Missing(String),
}

/// Maps import statements to module names. `names` holds every module
/// and package directory; `sources` only those backed by a file.
#[derive(Debug, Clone, Default)]
pub(crate) struct Resolver {
    pub root: String,
    pub names: BTreeSet<String>,
    pub sources: BTreeSet<String>,
}

impl Resolver {
    pub fn new(root: &TreeNode) -> Self {
        Resolver {
            root: root.full_name.clone(),
            names: root.nodes().iter().map(|n| n.full_name.clone()).collect(),
            sources: root
                .source_nodes()
                .iter()
                .map(|n| n.full_name.clone())
                .collect(),
        }
    }

    /// Absolute names may be written from the root's parent (`example.m`)
    /// or from inside the root (`m`).
    pub fn absolute(&self, dotted: &str) -> Target {
        let rooted = format!("{}.{dotted}", self.root);
        for cand in [dotted, rooted.as_str()] {
            if self.names.contains(cand) {
                return Target::Node(cand.to_string());
            }
        }
        Target::External(dotted.to_string())
    }

    pub fn relative(&self, package: &str, level: u32, module: Option<&str>) -> Target {
        let mut base = Some(package.to_string());
        for _ in 1..level {
            base = base.as_deref().and_then(parent_name);
        }
        let written = format!("{}{}", ".".repeat(level as usize), module.unwrap_or(""));
        let Some(base) = base.filter(|b| !b.is_empty()) else {
            return Target::Missing(written);
        };
        let full = match module {
            Some(m) => format!("{base}.{m}"),
            None => base,
        };
        if self.names.contains(&full) {
            Target::Node(full)
        } else {
            Target::Missing(full)
        }
    }

    pub fn is_module(&self, name: &str) -> bool {
        self.sources.contains(name)
    }
}

fn relation(importer: &str, target: &Target, level: u32, line: u32) -> ImportRelation {
    let (name, internal) = match target {
        Target::Node(n) => (n.clone(), true),
        Target::External(n) => (n.clone(), false),
        Target::Missing(n) => (n.clone(), true),
    };
    ImportRelation {
        importer: importer.to_string(),
        imported_module: name,
        symbols: Vec::new(),
        relative_level: level,
        wildcard: false,
        internal,
        line,
    }
}

/// Every import statement of every module (at any nesting depth) as
/// relations, plus diagnostics for relative imports that do not resolve.
pub fn parse_imports(tree: &TreeNode) -> (ModuleDict, Vec<Diagnostic>) {
    let resolver = Resolver::new(tree);
    let mut dict = ModuleDict::new();
    let mut diags = Vec::new();
    for node in tree.source_nodes() {
        let mut rels = Vec::new();
        if let Some(m) = &node.module {
            for n in walk(NodeRef::Module(m), Order::Pre) {
                let NodeRef::Stmt(s) = n else { continue };
                let line = s.span.start_line;
                match &s.kind {
                    StmtKind::Import(names) => {
                        for a in names {
                            let t = resolver.absolute(&a.name);
                            let mut r = relation(&node.full_name, &t, 0, line);
                            r.symbols.push(ImportedSymbol {
                                name: a.name.clone(),
                                asname: a.asname.clone(),
                            });
                            rels.push(r);
                        }
                    }
                    StmtKind::ImportFrom {
                        module,
                        names,
                        level,
                    } => {
                        let base = if *level == 0 {
                            resolver.absolute(module.as_deref().unwrap_or(""))
                        } else {
                            resolver.relative(&node.package(), *level, module.as_deref())
                        };
                        if let Target::Missing(n) = &base {
                            diags.push(Diagnostic {
                                module: node.full_name.clone(),
                                line,
                                message: format!("unresolved relative import `{n}`"),
                            });
                        }
                        // A symbol that is itself a submodule gets its own relation.
                        let mut grouped: BTreeMap<String, (Target, Vec<ImportedSymbol>)> =
                            BTreeMap::new();
                        let mut order = Vec::new();
                        let mut wildcard = false;
                        for a in names {
                            let sym = ImportedSymbol {
                                name: a.name.clone(),
                                asname: a.asname.clone(),
                            };
                            let target = match &base {
                                Target::Node(b)
                                    if a.name != "*"
                                        && resolver.is_module(&format!("{b}.{}", a.name)) =>
                                {
                                    Target::Node(format!("{b}.{}", a.name))
                                }
                                other => other.clone(),
                            };
                            wildcard |= a.name == "*";
                            let key = match &target {
                                Target::Node(n) | Target::External(n) | Target::Missing(n) => {
                                    n.clone()
                                }
                            };
                            if !grouped.contains_key(&key) {
                                order.push(key.clone());
                            }
                            grouped
                                .entry(key)
                                .or_insert((target, Vec::new()))
                                .1
                                .push(sym);
                        }
                        for key in order {
                            let (target, syms) = grouped.remove(&key).unwrap();
                            let mut r = relation(&node.full_name, &target, *level, line);
                            r.wildcard = wildcard && syms.iter().any(|s| s.name == "*");
                            r.symbols = syms;
                            rels.push(r);
                        }
                    }
                    _ => {}
                }
            }
        }
        dict.insert(node.full_name.clone(), rels);
    }
    (dict, diags)
}

#[derive(Debug, Clone)]
pub struct ImportGraph {
    pub tree: TreeNode,
    pub module_dict: ModuleDict,
    pub internal_edges: BTreeSet<(String, String)>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ImportGraph {
    pub fn build(root: &Path) -> Result<ImportGraph> {
        Ok(ImportGraph::from_tree(build_dir_tree(root)?))
    }

    pub fn from_tree(tree: TreeNode) -> ImportGraph {
        let (module_dict, diagnostics) = parse_imports(&tree);
        let sources: BTreeSet<String> = tree
            .source_nodes()
            .iter()
            .map(|n| n.full_name.clone())
            .collect();
        let internal_edges = module_dict
            .values()
            .flatten()
            .filter(|r| r.internal && sources.contains(&r.imported_module))
            .map(|r| (r.importer.clone(), r.imported_module.clone()))
            .collect();
        ImportGraph {
            tree,
            module_dict,
            internal_edges,
            diagnostics,
        }
    }

    /// Every module name, sorted.
    pub fn modules(&self) -> Vec<String> {
        self.module_dict.keys().cloned().collect()
    }

    /// Imported modules outside the project, sorted.
    pub fn external_modules(&self) -> BTreeSet<String> {
        self.module_dict
            .values()
            .flatten()
            .filter(|r| !r.internal)
            .map(|r| r.imported_module.clone())
            .collect()
    }

    /// Name bindings at the top level of a project module.
    pub fn name_context(&self, node: &TreeNode) -> Option<NameContext> {
        let module = node.module.as_ref()?;
        let project: BTreeSet<String> = self
            .tree
            .nodes()
            .iter()
            .map(|n| n.full_name.clone())
            .collect();
        let is_package = node.path.file_name().is_some_and(|n| n == "__init__.py");
        Some(NameContext::project_module(
            &node.full_name,
            is_package,
            module,
            Some(&self.tree.full_name),
            &project,
        ))
    }

    pub fn to_json(&self) -> Value {
        let edges: Vec<Value> = self
            .internal_edges
            .iter()
            .map(|(a, b)| json!([a, b]))
            .collect();
        let leaves: Vec<&str> = leaf_nodes(self)
            .iter()
            .map(|n| n.full_name.as_str())
            .collect();
        json!({"modules": self.modules(), "edges": edges, "leaves": leaves})
    }
}

/// Modules with no outgoing import edge to another project module, sorted
/// by full name.
pub fn leaf_nodes(graph: &ImportGraph) -> Vec<&TreeNode> {
    let importers: BTreeSet<&str> = graph
        .internal_edges
        .iter()
        .map(|(a, _)| a.as_str())
        .collect();
    let mut out: Vec<&TreeNode> = graph
        .tree
        .source_nodes()
        .into_iter()
        .filter(|n| !importers.contains(n.full_name.as_str()))
        .collect();
    out.sort_by(|a, b| a.full_name.cmp(&b.full_name));
    out
}
