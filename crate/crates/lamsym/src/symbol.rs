//! Symbol tables for jet coordinates, parameters and opaque functions.
//!
//! A table fixes the finite universe of scalar symbols an expression may
//! mention: the independent variable `t`, the derivative chain `x, x1, ...`,
//! the nonlocal chain `w, w1, ...`, and declared parameters. Opaque
//! functions (`c(t)`, `f(x)`, ...) are declared separately; their derivatives
//! of any order are formed on demand and never expand.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Identifier of a scalar symbol (jet variable or parameter) within one table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub(crate) u32);

/// Identifier of a declared opaque function within one table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FuncId(pub(crate) u32);

/// What a symbol denotes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    /// The independent variable.
    T,
    /// The dependent chain; the payload is the derivative order (`x` is 0).
    X(u16),
    /// The nonlocal chain; the payload is the derivative order (`w` is 0).
    W(u16),
    /// A scalar parameter.
    Param,
}

/// A declared opaque function of a single base variable.
#[derive(Clone, Debug)]
pub struct FuncDecl {
    pub name: String,
    pub base: SymbolId,
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum Entry {
    Sym(SymbolId),
    Func(FuncId),
}

/// Immutable symbol universe shared by every expression of one problem.
#[derive(Debug)]
pub struct SymbolTable {
    names: Vec<String>,
    kinds: Vec<VarKind>,
    funcs: Vec<FuncDecl>,
    index: HashMap<String, Entry>,
    cap: u16,
}

/// Builder collecting parameters and opaque functions before the table is
/// frozen. Jet variables are pre-declared up to the cap; asking for a higher
/// derivative later is an error rather than a silent extension.
pub struct SymbolTableBuilder {
    cap: u16,
    params: Vec<String>,
    funcs: Vec<(String, String)>,
}

/// Default highest jet index pre-declared on each chain.
pub const DEFAULT_JET_CAP: u16 = 8;

fn valid_ident(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl SymbolTableBuilder {
    pub fn cap(mut self, cap: u16) -> Self {
        self.cap = cap;
        self
    }

    pub fn param(mut self, name: &str) -> Self {
        self.params.push(name.to_string());
        self
    }

    pub fn params<'a>(mut self, names: impl IntoIterator<Item = &'a str>) -> Self {
        self.params.extend(names.into_iter().map(str::to_string));
        self
    }

    /// Declares an opaque function over the named base variable (`t`, `x` or `w`).
    pub fn func(mut self, name: &str, base: &str) -> Self {
        self.funcs.push((name.to_string(), base.to_string()));
        self
    }

    pub fn build(self) -> Result<SymbolTable> {
        let cap = self.cap;
        let mut names = Vec::new();
        let mut kinds = Vec::new();
        names.push("t".to_string());
        kinds.push(VarKind::T);
        for i in 0..=cap {
            names.push(if i == 0 { "x".to_string() } else { format!("x{i}") });
            kinds.push(VarKind::X(i));
        }
        for j in 0..=cap {
            names.push(if j == 0 { "w".to_string() } else { format!("w{j}") });
            kinds.push(VarKind::W(j));
        }
        let mut table = SymbolTable {
            names,
            kinds,
            funcs: Vec::new(),
            index: HashMap::new(),
            cap,
        };
        for (id, name) in table.names.iter().enumerate() {
            table.index.insert(name.clone(), Entry::Sym(SymbolId(id as u32)));
        }
        for name in &self.params {
            table.check_fresh(name)?;
            let id = SymbolId(table.names.len() as u32);
            table.names.push(name.clone());
            table.kinds.push(VarKind::Param);
            table.index.insert(name.clone(), Entry::Sym(id));
        }
        for (name, base) in &self.funcs {
            table.check_fresh(name)?;
            let base = match table.index.get(base.as_str()) {
                Some(Entry::Sym(s)) if table.base_order(*s) == Some(0) => *s,
                _ => {
                    return Err(Error::BadDeclaration(format!(
                        "opaque function `{name}` must be declared over a base variable, got `{base}`"
                    )))
                }
            };
            let id = FuncId(table.funcs.len() as u32);
            table.funcs.push(FuncDecl { name: name.clone(), base });
            table.index.insert(name.clone(), Entry::Func(id));
        }
        Ok(table)
    }
}

impl SymbolTable {
    pub fn builder() -> SymbolTableBuilder {
        SymbolTableBuilder {
            cap: DEFAULT_JET_CAP,
            params: Vec::new(),
            funcs: Vec::new(),
        }
    }

    fn check_fresh(&self, name: &str) -> Result<()> {
        if !valid_ident(name) {
            return Err(Error::BadDeclaration(format!("`{name}` is not a valid identifier")));
        }
        if name == "exp" {
            return Err(Error::BadDeclaration("`exp` is reserved".into()));
        }
        if self.index.contains_key(name) {
            return Err(Error::BadDeclaration(format!("`{name}` is already declared")));
        }
        Ok(())
    }

    /// Highest pre-declared derivative index on each jet chain.
    pub fn cap(&self) -> u16 {
        self.cap
    }

    pub fn t(&self) -> SymbolId {
        SymbolId(0)
    }

    /// `x_order`; `x(0)` is `x` itself.
    pub fn x(&self, order: u16) -> Result<SymbolId> {
        if order > self.cap {
            return Err(Error::JetCap { name: format!("x{order}"), cap: self.cap });
        }
        Ok(SymbolId(1 + order as u32))
    }

    /// `w_order`; `w(0)` is `w` itself.
    pub fn w(&self, order: u16) -> Result<SymbolId> {
        if order > self.cap {
            return Err(Error::JetCap { name: format!("w{order}"), cap: self.cap });
        }
        Ok(SymbolId(2 + self.cap as u32 + order as u32))
    }

    pub fn param(&self, name: &str) -> Option<SymbolId> {
        match self.index.get(name) {
            Some(Entry::Sym(s)) if matches!(self.kind(*s), VarKind::Param) => Some(*s),
            _ => None,
        }
    }

    pub fn func(&self, name: &str) -> Option<FuncId> {
        match self.index.get(name) {
            Some(Entry::Func(f)) => Some(*f),
            _ => None,
        }
    }

    pub(crate) fn lookup(&self, name: &str) -> Option<Entry> {
        self.index.get(name).copied()
    }

    pub fn kind(&self, s: SymbolId) -> VarKind {
        self.kinds[s.0 as usize]
    }

    pub fn name(&self, s: SymbolId) -> &str {
        &self.names[s.0 as usize]
    }

    pub fn func_decl(&self, f: FuncId) -> &FuncDecl {
        &self.funcs[f.0 as usize]
    }

    pub fn is_param(&self, s: SymbolId) -> bool {
        matches!(self.kind(s), VarKind::Param)
    }

    /// Derivative order of a jet variable, `None` for parameters.
    /// `t` reports order 0 alongside `x` and `w`.
    fn base_order(&self, s: SymbolId) -> Option<u16> {
        match self.kind(s) {
            VarKind::T => Some(0),
            VarKind::X(i) => Some(i),
            VarKind::W(j) => Some(j),
            VarKind::Param => None,
        }
    }

    /// True for `t`, `x` and `w`: the only admissible opaque-function arguments.
    pub fn is_base_var(&self, s: SymbolId) -> bool {
        matches!(self.kind(s), VarKind::T | VarKind::X(0) | VarKind::W(0))
    }

    /// Successor of a jet variable under the total derivative:
    /// `x_i -> x_{i+1}`, `w_j -> w_{j+1}`. Errors past the cap.
    pub fn shift(&self, s: SymbolId) -> Result<Option<SymbolId>> {
        match self.kind(s) {
            VarKind::X(i) => self
                .x(i.checked_add(1).expect("jet order overflow"))
                .map(Some)
                .map_err(|_| Error::JetCap { name: format!("x{}", i + 1), cap: self.cap }),
            VarKind::W(j) => self
                .w(j + 1)
                .map(Some)
                .map_err(|_| Error::JetCap { name: format!("w{}", j + 1), cap: self.cap }),
            VarKind::T | VarKind::Param => Ok(None),
        }
    }

    /// All jet variables in table order (t, x-chain, w-chain).
    pub fn jet_vars(&self) -> impl Iterator<Item = SymbolId> + '_ {
        (0..self.names.len() as u32)
            .map(SymbolId)
            .filter(|s| !self.is_param(*s))
    }

    /// All declared parameters in table order.
    pub fn params_iter(&self) -> impl Iterator<Item = SymbolId> + '_ {
        (0..self.names.len() as u32)
            .map(SymbolId)
            .filter(|s| self.is_param(*s))
    }

    pub fn funcs_iter(&self) -> impl Iterator<Item = FuncId> + '_ {
        (0..self.funcs.len() as u32).map(FuncId)
    }

    /// Display form of the k-th derivative of an opaque function: `c''(t)`.
    pub fn func_atom_name(&self, f: FuncId, order: u32) -> String {
        let decl = self.func_decl(f);
        let mut s = decl.name.clone();
        for _ in 0..order {
            s.push('\'');
        }
        s.push('(');
        s.push_str(self.name(decl.base));
        s.push(')');
        s
    }
}

impl fmt::Display for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_and_lookup() {
        let table = SymbolTable::builder()
            .params(["n", "k"])
            .func("c", "t")
            .func("f", "x")
            .build()
            .unwrap();
        assert_eq!(table.name(table.t()), "t");
        assert_eq!(table.name(table.x(0).unwrap()), "x");
        assert_eq!(table.name(table.x(3).unwrap()), "x3");
        assert_eq!(table.name(table.w(1).unwrap()), "w1");
        assert!(table.param("n").is_some());
        assert!(table.param("x1").is_none());
        assert!(table.func("c").is_some());
        assert_eq!(table.func_atom_name(table.func("c").unwrap(), 2), "c''(t)");
    }

    #[test]
    fn cap_is_enforced() {
        let table = SymbolTable::builder().cap(3).build().unwrap();
        assert!(table.x(3).is_ok());
        assert!(matches!(table.x(4), Err(Error::JetCap { .. })));
        let x3 = table.x(3).unwrap();
        assert!(table.shift(x3).is_err());
    }

    #[test]
    fn declarations_are_validated() {
        assert!(SymbolTable::builder().param("x1").build().is_err());
        assert!(SymbolTable::builder().param("exp").build().is_err());
        assert!(SymbolTable::builder().param("n").param("n").build().is_err());
        assert!(SymbolTable::builder().func("f", "x1").build().is_err());
        assert!(SymbolTable::builder().func("f", "x").build().is_ok());
    }
}
