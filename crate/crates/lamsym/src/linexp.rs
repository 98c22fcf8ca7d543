//! Lattice exponents: integers plus integer combinations of parameters.
//!
//! Powers like `x^(n+1)` carry a [`LinExp`] exponent. The lattice is closed
//! under addition and subtraction, which is exactly what exponent arithmetic
//! on power products needs; anything else (`x^x1`, `x^(n*m)`) is rejected at
//! construction.

use std::collections::BTreeMap;
use std::fmt;

use crate::symbol::{SymbolId, SymbolTable};

/// `k + sum c_i * p_i` with integer `k`, `c_i` and parameters `p_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LinExp {
    k: i64,
    coeffs: BTreeMap<SymbolId, i64>,
}

impl LinExp {
    pub fn int(k: i64) -> Self {
        LinExp { k, coeffs: BTreeMap::new() }
    }

    pub fn param(p: SymbolId) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(p, 1);
        LinExp { k: 0, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.k == 0 && self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.k == 1 && self.coeffs.is_empty()
    }

    /// The constant value when the parameter part is empty.
    pub fn as_int(&self) -> Option<i64> {
        self.coeffs.is_empty().then_some(self.k)
    }

    pub fn constant(&self) -> i64 {
        self.k
    }

    pub fn param_terms(&self) -> impl Iterator<Item = (SymbolId, i64)> + '_ {
        self.coeffs.iter().map(|(s, c)| (*s, *c))
    }

    pub fn mentions(&self, p: SymbolId) -> bool {
        self.coeffs.contains_key(&p)
    }

    /// Binds one parameter to an integer, folding it into the constant.
    pub fn instantiate(&self, p: SymbolId, value: i64) -> LinExp {
        let mut out = self.clone();
        if let Some(c) = out.coeffs.remove(&p) {
            out.k += c * value;
        }
        out
    }

    pub fn add(&self, other: &LinExp) -> LinExp {
        let mut out = self.clone();
        out.k += other.k;
        for (p, c) in &other.coeffs {
            let slot = out.coeffs.entry(*p).or_insert(0);
            *slot += c;
            if *slot == 0 {
                out.coeffs.remove(p);
            }
        }
        out
    }

    pub fn neg(&self) -> LinExp {
        let mut out = self.clone();
        out.k = -out.k;
        for c in out.coeffs.values_mut() {
            *c = -*c;
        }
        out
    }

    pub fn sub(&self, other: &LinExp) -> LinExp {
        self.add(&other.neg())
    }

    pub fn scale(&self, m: i64) -> LinExp {
        if m == 0 {
            return LinExp::int(0);
        }
        let mut out = self.clone();
        out.k *= m;
        for c in out.coeffs.values_mut() {
            *c *= m;
        }
        out
    }

    /// Evaluates at integer parameter values; missing parameters are an error.
    pub fn eval(&self, values: &BTreeMap<SymbolId, i64>) -> Option<i64> {
        let mut total = self.k;
        for (p, c) in &self.coeffs {
            total += c * values.get(p)?;
        }
        Some(total)
    }

    /// Renders against a table: `3`, `n`, `n+1`, `2*n-3`.
    pub fn render(&self, table: &SymbolTable) -> String {
        if self.coeffs.is_empty() {
            return self.k.to_string();
        }
        let mut out = String::new();
        for (p, c) in &self.coeffs {
            let mag = c.abs();
            if out.is_empty() {
                if *c < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(if *c < 0 { "-" } else { "+" });
            }
            if mag != 1 {
                out.push_str(&format!("{mag}*"));
            }
            out.push_str(table.name(*p));
        }
        if self.k != 0 {
            out.push_str(if self.k < 0 { "-" } else { "+" });
            out.push_str(&self.k.abs().to_string());
        }
        out
    }

    /// True when the rendering needs no parentheses in exponent position:
    /// a bare integer or a bare parameter.
    pub fn is_atomic(&self) -> bool {
        (self.coeffs.is_empty() && self.k >= 0)
            || (self.k == 0 && self.coeffs.len() == 1 && self.coeffs.values().all(|c| *c == 1))
    }
}

impl fmt::Display for LinExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "{}", self.k);
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .map(|(p, c)| format!("{c}*{p}"))
            .collect();
        write!(f, "{}", terms.join("+"))?;
        if self.k != 0 {
            write!(f, "{:+}", self.k)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::SymbolTable;

    #[test]
    fn lattice_arithmetic() {
        let table = SymbolTable::builder().params(["n", "m"]).build().unwrap();
        let n = table.param("n").unwrap();
        let m = table.param("m").unwrap();
        let e = LinExp::param(n).add(&LinExp::int(1));
        assert_eq!(e.render(&table), "n+1");
        let f = e.sub(&LinExp::param(n));
        assert_eq!(f.as_int(), Some(1));
        let g = LinExp::param(n).scale(2).sub(&LinExp::param(m));
        assert_eq!(g.render(&table), "2*n-m");
        assert!(g.eval(&[(n, 3), (m, 1)].into_iter().collect()) == Some(5));
        assert!(g.eval(&BTreeMap::new()).is_none());
    }
}
