//! Immutable symbolic expressions.
//!
//! `Expr` is the user-facing tree: exact rational literals, jet variables,
//! parameters, opaque function atoms like `c''(t)`, the designated
//! exponential atom `exp(v)`, and the four field operations plus powers
//! with lattice exponents. Construction does light folding only; real
//! simplification and the zero test live in [`crate::normal`].

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linexp::LinExp;
use crate::symbol::{FuncId, SymbolId, SymbolTable};

#[derive(Debug, PartialEq, Eq)]
pub enum Node {
    Rat(BigRational),
    Sym(SymbolId),
    /// Opaque function atom: function id plus derivative order, e.g. `c''(t)`.
    Func(FuncId, u32),
    /// The designated exponential atom `exp(v)` for a base variable `v`.
    /// Scaled exponentials `e^{C v}` are `Pow(Exp(v), C)`.
    Exp(SymbolId),
    Sum(Vec<Expr>),
    Prod(Vec<Expr>),
    Quot(Expr, Expr),
    Pow(Expr, LinExp),
}

/// Cheaply clonable immutable expression. All operations are pure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr(Arc<Node>);

impl Expr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn rat(r: BigRational) -> Expr {
        Expr(Arc::new(Node::Rat(r)))
    }

    pub fn int(k: i64) -> Expr {
        Expr::rat(BigRational::from_integer(BigInt::from(k)))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn sym(s: SymbolId) -> Expr {
        Expr(Arc::new(Node::Sym(s)))
    }

    pub fn func(f: FuncId, order: u32) -> Expr {
        Expr(Arc::new(Node::Func(f, order)))
    }

    pub fn exp(v: SymbolId) -> Expr {
        Expr(Arc::new(Node::Exp(v)))
    }

    /// Lattice expression as an Expr, e.g. `n+1` becomes `1 + n`.
    pub fn from_linexp(e: &LinExp) -> Expr {
        let mut terms = Vec::new();
        if e.constant() != 0 {
            terms.push(Expr::int(e.constant()));
        }
        for (p, c) in e.param_terms() {
            terms.push(Expr::mul(Expr::int(c), Expr::sym(p)));
        }
        match terms.len() {
            0 => Expr::zero(),
            1 => terms.pop().unwrap(),
            _ => Expr(Arc::new(Node::Sum(terms))),
        }
    }

    pub fn as_rat(&self) -> Option<&BigRational> {
        match self.node() {
            Node::Rat(r) => Some(r),
            _ => None,
        }
    }

    fn is_literal_zero(&self) -> bool {
        matches!(self.node(), Node::Rat(r) if r.is_zero())
    }

    fn is_literal_one(&self) -> bool {
        matches!(self.node(), Node::Rat(r) if r.is_one())
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        if a.is_literal_zero() {
            return b;
        }
        if b.is_literal_zero() {
            return a;
        }
        if let (Node::Rat(x), Node::Rat(y)) = (a.node(), b.node()) {
            return Expr::rat(x + y);
        }
        let mut terms = Vec::new();
        for e in [a, b] {
            match e.node() {
                Node::Sum(ts) => terms.extend(ts.iter().cloned()),
                _ => terms.push(e),
            }
        }
        Expr(Arc::new(Node::Sum(terms)))
    }

    pub fn sum<I: IntoIterator<Item = Expr>>(it: I) -> Expr {
        it.into_iter().fold(Expr::zero(), Expr::add)
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::mul(Expr::int(-1), a)
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::add(a, Expr::neg(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        if a.is_literal_zero() || b.is_literal_zero() {
            return Expr::zero();
        }
        if a.is_literal_one() {
            return b;
        }
        if b.is_literal_one() {
            return a;
        }
        if let (Node::Rat(x), Node::Rat(y)) = (a.node(), b.node()) {
            return Expr::rat(x * y);
        }
        let mut factors = Vec::new();
        for e in [a, b] {
            match e.node() {
                Node::Prod(fs) => factors.extend(fs.iter().cloned()),
                _ => factors.push(e),
            }
        }
        Expr(Arc::new(Node::Prod(factors)))
    }

    pub fn product<I: IntoIterator<Item = Expr>>(it: I) -> Expr {
        it.into_iter().fold(Expr::one(), Expr::mul)
    }

    /// Division. Rejects a literal-zero divisor immediately; symbolic
    /// divisors that normalize to zero are caught later by the zero test.
    pub fn div(a: Expr, b: Expr) -> Result<Expr> {
        if b.is_literal_zero() {
            return Err(Error::DivisionByZero);
        }
        if b.is_literal_one() {
            return Ok(a);
        }
        if a.is_literal_zero() {
            return Ok(Expr::zero());
        }
        if let (Node::Rat(x), Node::Rat(y)) = (a.node(), b.node()) {
            return Ok(Expr::rat(x / y));
        }
        Ok(Expr(Arc::new(Node::Quot(a, b))))
    }

    pub fn pow(base: Expr, e: LinExp) -> Result<Expr> {
        if e.is_zero() {
            return Ok(Expr::one());
        }
        if e.is_one() {
            return Ok(base);
        }
        if let (Node::Rat(r), Some(k)) = (base.node(), e.as_int()) {
            if r.is_zero() {
                return if k > 0 {
                    Ok(Expr::zero())
                } else {
                    Err(Error::DivisionByZero)
                };
            }
            if let Ok(exp) = i32::try_from(k) {
                return Ok(Expr::rat(r.pow(exp)));
            }
        }
        Ok(Expr(Arc::new(Node::Pow(base, e))))
    }

    pub fn powi(base: Expr, k: i64) -> Result<Expr> {
        Expr::pow(base, LinExp::int(k))
    }

    /// Syntactic occurrence check. `normal::depends_on` is the semantic
    /// variant that sees through cancellations.
    pub fn mentions(&self, s: SymbolId, table: &SymbolTable) -> bool {
        match self.node() {
            Node::Rat(_) => false,
            Node::Sym(v) => *v == s,
            Node::Func(f, _) => table.func_decl(*f).base == s,
            Node::Exp(v) => *v == s,
            Node::Sum(ts) | Node::Prod(ts) => ts.iter().any(|e| e.mentions(s, table)),
            Node::Quot(a, b) => a.mentions(s, table) || b.mentions(s, table),
            Node::Pow(b, e) => b.mentions(s, table) || e.mentions(s),
        }
    }

    /// Partial derivative with respect to `v`.
    ///
    /// Opaque atoms follow their declarations: d/dt c''(t) = c'''(t) and
    /// d/dv exp(v) = exp(v). Differentiating a power by a parameter that
    /// occurs in its exponent would leave the rational class (it brings in
    /// a logarithm), so that case is an error.
    pub fn diff(&self, v: SymbolId, table: &SymbolTable) -> Result<Expr> {
        match self.node() {
            Node::Rat(_) => Ok(Expr::zero()),
            Node::Sym(s) => Ok(if *s == v { Expr::one() } else { Expr::zero() }),
            Node::Func(f, k) => {
                if table.func_decl(*f).base == v {
                    Ok(Expr::func(*f, k + 1))
                } else {
                    Ok(Expr::zero())
                }
            }
            Node::Exp(s) => Ok(if *s == v { self.clone() } else { Expr::zero() }),
            Node::Sum(ts) => {
                let mut acc = Expr::zero();
                for t in ts {
                    acc = Expr::add(acc, t.diff(v, table)?);
                }
                Ok(acc)
            }
            Node::Prod(fs) => {
                let mut acc = Expr::zero();
                for (i, fi) in fs.iter().enumerate() {
                    let di = fi.diff(v, table)?;
                    if di.is_literal_zero() {
                        continue;
                    }
                    let mut term = di;
                    for (j, fj) in fs.iter().enumerate() {
                        if j != i {
                            term = Expr::mul(term, fj.clone());
                        }
                    }
                    acc = Expr::add(acc, term);
                }
                Ok(acc)
            }
            Node::Quot(a, b) => {
                let da = a.diff(v, table)?;
                let db = b.diff(v, table)?;
                let num = Expr::sub(Expr::mul(da, b.clone()), Expr::mul(a.clone(), db));
                Expr::div(num, Expr::mul(b.clone(), b.clone()))
            }
            Node::Pow(b, e) => {
                if e.mentions(v) {
                    return Err(Error::NonRationalDerivative {
                        param: table.name(v).to_string(),
                    });
                }
                let db = b.diff(v, table)?;
                if db.is_literal_zero() {
                    return Ok(Expr::zero());
                }
                // d/dv b^e = e * b^(e-1) * b'
                let lower = Expr::pow(b.clone(), e.sub(&LinExp::int(1)))?;
                Ok(Expr::product([Expr::from_linexp(e), lower, db]))
            }
        }
    }

    /// Simultaneous substitution of symbols by expressions. The binding
    /// set must be acyclic: no replacement may mention any substituted
    /// symbol, which makes the result independent of application order.
    ///
    /// Substituting the argument of an opaque atom is rejected (there is
    /// no chain rule in this class). Substituting a parameter that occurs
    /// in an exponent is allowed only for integer values, which fold into
    /// the exponent lattice.
    pub fn substitute(&self, map: &BTreeMap<SymbolId, Expr>, table: &SymbolTable) -> Result<Expr> {
        for rep in map.values() {
            if map.keys().any(|k| rep.mentions(*k, table)) {
                return Err(Error::CyclicSubstitution);
            }
        }
        self.subst_inner(map, table)
    }

    fn subst_inner(&self, map: &BTreeMap<SymbolId, Expr>, table: &SymbolTable) -> Result<Expr> {
        match self.node() {
            Node::Rat(_) => Ok(self.clone()),
            Node::Sym(s) => Ok(map.get(s).cloned().unwrap_or_else(|| self.clone())),
            Node::Func(f, _) => {
                let base = table.func_decl(*f).base;
                if map.contains_key(&base) {
                    return Err(Error::OpaqueArgSubstitution {
                        var: table.name(base).to_string(),
                        atom: table.func_decl(*f).name.clone(),
                    });
                }
                Ok(self.clone())
            }
            Node::Exp(s) => {
                if map.contains_key(s) {
                    return Err(Error::OpaqueArgSubstitution {
                        var: table.name(*s).to_string(),
                        atom: format!("exp({})", table.name(*s)),
                    });
                }
                Ok(self.clone())
            }
            Node::Sum(ts) => {
                let mut acc = Expr::zero();
                for t in ts {
                    acc = Expr::add(acc, t.subst_inner(map, table)?);
                }
                Ok(acc)
            }
            Node::Prod(fs) => {
                let mut acc = Expr::one();
                for f in fs {
                    acc = Expr::mul(acc, f.subst_inner(map, table)?);
                }
                Ok(acc)
            }
            Node::Quot(a, b) => {
                Expr::div(a.subst_inner(map, table)?, b.subst_inner(map, table)?)
            }
            Node::Pow(b, e) => {
                let nb = b.subst_inner(map, table)?;
                let mut ne = e.clone();
                for (p, _) in e.param_terms() {
                    if let Some(rep) = map.get(&p) {
                        let k = rep
                            .as_rat()
                            .filter(|r| r.is_integer())
                            .and_then(|r| r.numer().to_i64())
                            .ok_or_else(|| Error::ExponentSubstitution {
                                param: table.name(p).to_string(),
                            })?;
                        ne = ne.instantiate(p, k);
                    }
                }
                Expr::pow(nb, ne)
            }
        }
    }

    /// Substitute a single symbol.
    pub fn substitute_one(&self, s: SymbolId, rep: &Expr, table: &SymbolTable) -> Result<Expr> {
        let mut map = BTreeMap::new();
        map.insert(s, rep.clone());
        self.substitute(&map, table)
    }
}

/// Debug-oriented display; the canonical printer lives in [`crate::render`].
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Rat(r) => {
                if r.is_negative() {
                    write!(f, "({})", r)
                } else {
                    write!(f, "{}", r)
                }
            }
            Node::Sym(s) => write!(f, "{}", s),
            Node::Func(func, k) => write!(f, "@{}^({})", func.0, k),
            Node::Exp(s) => write!(f, "exp({})", s),
            Node::Sum(ts) => {
                write!(f, "(")?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{}", t)?;
                }
                write!(f, ")")
            }
            Node::Prod(fs) => {
                write!(f, "(")?;
                for (i, t) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{}", t)?;
                }
                write!(f, ")")
            }
            Node::Quot(a, b) => write!(f, "({} / {})", a, b),
            Node::Pow(b, e) => write!(f, "{}^({})", b, e),
        }
    }
}
