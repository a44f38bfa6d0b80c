//! Return types of known callables and result types of operators.

use std::collections::BTreeMap;
use std::path::Path;

use super::{any, TypeSet, ANY};
use crate::error::{Error, Result};
use crate::frontend::{BinOpKind, UnaryOpKind};

/// Environment variable naming a signature file that replaces the
/// built-in one.
pub const SIGNATURES_ENV: &str = "LANCET_SIGNATURES";

const BUILTIN_SIGNATURES: &str = include_str!("../../data/signatures.txt");

#[derive(Debug, Clone, Default, PartialEq)]
pub struct HeuristicTable {
    pub known_signatures: BTreeMap<String, TypeSet>,
}

/// Methods owned by one builtin type, with their return types.
const METHODS: &[(&str, &str, &str)] = &[
    ("str", "upper", "str"),
    ("str", "lower", "str"),
    ("str", "strip", "str"),
    ("str", "lstrip", "str"),
    ("str", "rstrip", "str"),
    ("str", "capitalize", "str"),
    ("str", "title", "str"),
    ("str", "casefold", "str"),
    ("str", "swapcase", "str"),
    ("str", "center", "str"),
    ("str", "ljust", "str"),
    ("str", "rjust", "str"),
    ("str", "zfill", "str"),
    ("str", "format", "str"),
    ("str", "format_map", "str"),
    ("str", "startswith", "bool"),
    ("str", "endswith", "bool"),
    ("str", "isdigit", "bool"),
    ("str", "isalpha", "bool"),
    ("str", "isalnum", "bool"),
    ("str", "isnumeric", "bool"),
    ("str", "isdecimal", "bool"),
    ("str", "isidentifier", "bool"),
    ("str", "isspace", "bool"),
    ("str", "isupper", "bool"),
    ("str", "islower", "bool"),
    ("str", "splitlines", "List"),
    ("str", "encode", "bytes"),
    ("List", "append", "None"),
    ("List", "extend", "None"),
    ("List", "insert", "None"),
    ("List", "sort", "None"),
    ("Dict", "keys", "Any"),
    ("Dict", "values", "Any"),
    ("Dict", "items", "Any"),
    ("Dict", "setdefault", "Any"),
    ("Dict", "popitem", "Tuple"),
    ("Set", "add", "None"),
    ("Set", "discard", "None"),
    ("Set", "union", "Set"),
    ("Set", "intersection", "Set"),
    ("Set", "difference", "Set"),
    ("Set", "symmetric_difference", "Set"),
    ("Set", "issubset", "bool"),
    ("Set", "issuperset", "bool"),
    ("Set", "isdisjoint", "bool"),
];

/// Methods shared by several builtin types, with per-type return types.
const SHARED_METHODS: &[(&str, &str, &str)] = &[
    ("str", "replace", "str"),
    ("str", "join", "str"),
    ("str", "split", "List"),
    ("str", "rsplit", "List"),
    ("str", "partition", "Tuple"),
    ("str", "find", "int"),
    ("str", "rfind", "int"),
    ("str", "count", "int"),
    ("str", "index", "int"),
    ("bytes", "decode", "str"),
    ("List", "count", "int"),
    ("List", "index", "int"),
    ("List", "copy", "List"),
    ("List", "reverse", "None"),
    ("List", "clear", "None"),
    ("List", "remove", "None"),
    ("Tuple", "count", "int"),
    ("Tuple", "index", "int"),
    ("Dict", "copy", "Dict"),
    ("Dict", "update", "None"),
    ("Dict", "clear", "None"),
    ("Set", "copy", "Set"),
    ("Set", "update", "None"),
    ("Set", "clear", "None"),
    ("Set", "remove", "None"),
];

fn num_rank(t: &str) -> Option<u8> {
    match t {
        "bool" => Some(0),
        "int" => Some(1),
        "float" => Some(2),
        "complex" => Some(3),
        _ => None,
    }
}

fn widen(a: &str, b: &str) -> Option<&'static str> {
    let r = num_rank(a)?.max(num_rank(b)?);
    Some(match r {
        0 | 1 => "int",
        2 => "float",
        _ => "complex",
    })
}

impl HeuristicTable {
    /// The table shipped with the library.
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_SIGNATURES).expect("bundled signature table is well formed")
    }

    /// The file named by [`SIGNATURES_ENV`] if set, else the built-in table.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(SIGNATURES_ENV) {
            Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
            _ => Ok(Self::builtin()),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
    }

    /// Parse `<dotted name> <type>` lines. Blank lines and `#` comments are
    /// skipped.
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut table = HeuristicTable::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            match (parts.next(), parts.next(), parts.next()) {
                (Some(name), Some(ty), None) => {
                    table
                        .known_signatures
                        .entry(name.to_string())
                        .or_default()
                        .insert(ty.to_string());
                }
                _ => return Err(format!("line {}: expected `<name> <type>`", n + 1)),
            }
        }
        Ok(table)
    }

    pub fn signature(&self, fqn: &str) -> Option<&TypeSet> {
        self.known_signatures.get(fqn)
    }

    /// Result of `l op r` for single type names; `None` when no rule applies.
    pub fn binop(&self, op: BinOpKind, l: &str, r: &str) -> Option<&'static str> {
        use BinOpKind::*;
        let seq = |t: &str| matches!(t, "str" | "List" | "Tuple" | "bytes");
        let intlike = |t: &str| matches!(t, "int" | "bool");
        match op {
            Add if l == r && seq(l) => Some(match l {
                "str" => "str",
                "List" => "List",
                "Tuple" => "Tuple",
                _ => "bytes",
            }),
            Add | Sub | Mult => {
                if op == Mult && ((seq(l) && intlike(r)) || (intlike(l) && seq(r))) {
                    let s = if seq(l) { l } else { r };
                    return Some(match s {
                        "str" => "str",
                        "List" => "List",
                        "Tuple" => "Tuple",
                        _ => "bytes",
                    });
                }
                if op == Sub && l == "Set" && r == "Set" {
                    return Some("Set");
                }
                widen(l, r)
            }
            Div => widen(l, r).map(|w| if w == "complex" { "complex" } else { "float" }),
            FloorDiv => widen(l, r).filter(|w| *w != "complex"),
            Mod if l == "str" => Some("str"),
            Mod => widen(l, r).filter(|w| *w != "complex"),
            BitOr | BitAnd | BitXor if l == "bool" && r == "bool" => Some("bool"),
            BitOr | BitAnd | BitXor if l == "Set" && r == "Set" => Some("Set"),
            BitOr if l == "Dict" && r == "Dict" => Some("Dict"),
            BitOr | BitAnd | BitXor | LShift | RShift if intlike(l) && intlike(r) => Some("int"),
            _ => None,
        }
    }

    /// `l ** r` may produce a float from integers (negative exponents).
    pub fn pow(&self, l: &str, r: &str) -> TypeSet {
        match widen(l, r) {
            Some("int") => ["int".to_string(), "float".to_string()].into(),
            Some(w) => [w.to_string()].into(),
            None => any(),
        }
    }

    pub fn unary(&self, op: UnaryOpKind, t: &str) -> Option<&'static str> {
        match op {
            UnaryOpKind::Not => Some("bool"),
            UnaryOpKind::Invert if matches!(t, "int" | "bool") => Some("int"),
            UnaryOpKind::Invert => None,
            _ => widen(t, t),
        }
    }

    /// Return type of `method` called on a value of builtin type `ty`.
    pub fn method(&self, ty: &str, method: &str) -> Option<&'static str> {
        METHODS
            .iter()
            .chain(SHARED_METHODS)
            .find(|(t, m, _)| *t == ty && *m == method)
            .map(|(_, _, r)| *r)
    }

    /// The builtin type that alone owns `method`, if any.
    pub fn owner_of_method(&self, method: &str) -> Option<&'static str> {
        METHODS
            .iter()
            .find(|(_, m, _)| *m == method)
            .map(|(t, _, _)| *t)
    }

    pub fn is_builtin_method(&self, method: &str) -> bool {
        METHODS
            .iter()
            .chain(SHARED_METHODS)
            .any(|(_, m, _)| *m == method)
    }
}

impl HeuristicTable {
    /// `Any` when no rule applies.
    pub fn binop_or_any(&self, op: BinOpKind, l: &str, r: &str) -> TypeSet {
        if op == BinOpKind::Pow {
            return self.pow(l, r);
        }
        match self.binop(op, l, r) {
            Some(t) => [t.to_string()].into(),
            None => [ANY.to_string()].into(),
        }
    }
}
