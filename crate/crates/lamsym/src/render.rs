//! Canonical text for expressions.
//!
//! Rendering goes through the normal form, so two expressions equal as
//! rational functions print identically and `parse(render(e))` normalizes
//! back to `e`. Layout: a polynomial prints as a sum of terms in descending
//! monomial order; a single-monomial denominator distributes over the terms
//! as simple fractions with per-term cancellation (`x1/x + x*q(t)`); anything
//! else prints as `(num)/(den)`.

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed};

use crate::error::Result;
use crate::expr::Expr;
use crate::linexp::LinExp;
use crate::normal::{normalize, NormalForm};
use crate::poly::{Indet, Monomial, MultiPoly, PowBase};
use crate::symbol::SymbolTable;

pub fn render(e: &Expr, table: &SymbolTable) -> Result<String> {
    Ok(render_nf(&normalize(e, table)?, table))
}

pub fn render_nf(nf: &NormalForm, table: &SymbolTable) -> String {
    if nf.is_zero() {
        return "0".to_string();
    }
    if nf.den().is_one() {
        return render_poly(nf.num(), table);
    }
    if nf.den().term_count() == 1 {
        let (den_m, _) = nf.den().terms().next().expect("nonempty denominator");
        let mut out = String::new();
        for (m, c) in nf.num().terms().rev() {
            push_term(&mut out, m, c, den_m, table);
        }
        return out;
    }
    format!(
        "({})/({})",
        render_poly(nf.num(), table),
        render_poly(nf.den(), table)
    )
}

fn render_poly(p: &MultiPoly, table: &SymbolTable) -> String {
    let mut out = String::new();
    let one = Monomial::one();
    for (m, c) in p.terms().rev() {
        push_term(&mut out, m, c, &one, table);
    }
    out
}

/// Appends one term `c·m / d` with sign joining and monomial cancellation.
fn push_term(out: &mut String, m: &Monomial, c: &BigRational, d: &Monomial, table: &SymbolTable) {
    if out.is_empty() {
        if c.is_negative() {
            out.push('-');
        }
    } else {
        out.push_str(if c.is_negative() { " - " } else { " + " });
    }
    let g = m.gcd(d);
    let mnum = m.try_div(&g).expect("gcd divides");
    let mden = d.try_div(&g).expect("gcd divides");
    let num_factors = factor_strings(&mnum, table);
    let den_factors = factor_strings(&mden, table);

    let cn = c.numer().abs();
    let cd = c.denom().clone();

    if den_factors.is_empty() {
        // pure product term: the whole rational coefficient leads, `3/4*x`
        let coeff_is_one = cn.is_one() && cd.is_one();
        if num_factors.is_empty() || !coeff_is_one {
            out.push_str(&cn.to_string());
            if !cd.is_one() {
                out.push('/');
                out.push_str(&cd.to_string());
            }
            if !num_factors.is_empty() {
                out.push('*');
            }
        }
        out.push_str(&num_factors.join("*"));
        return;
    }

    // fractional term: the coefficient denominator joins the monomial one
    if num_factors.is_empty() || !cn.is_one() {
        out.push_str(&cn.to_string());
        if !num_factors.is_empty() {
            out.push('*');
        }
    }
    out.push_str(&num_factors.join("*"));
    out.push('/');
    let mut parts = Vec::new();
    if !cd.is_one() {
        parts.push(cd.to_string());
    }
    parts.extend(den_factors);
    if parts.len() > 1 {
        out.push('(');
        out.push_str(&parts.join("*"));
        out.push(')');
    } else {
        out.push_str(&parts.join("*"));
    }
}

/// One string per distinct base, with the base's integer and parameter
/// exponent contributions merged: `x`, `x^2`, `x^(n+1)`, `c'(t)`, `2^n`.
fn factor_strings(m: &Monomial, table: &SymbolTable) -> Vec<String> {
    let mut merged: BTreeMap<PowBase, LinExp> = BTreeMap::new();
    for (v, k) in m.iter() {
        let (base, lin) = match v {
            Indet::Sym(s) => (PowBase::Sym(*s), LinExp::int(i64::from(*k))),
            Indet::Func(f, o) => (PowBase::Func(*f, *o), LinExp::int(i64::from(*k))),
            Indet::Exp(s) => (PowBase::Exp(*s), LinExp::int(i64::from(*k))),
            Indet::Pow(b, p) => (b.clone(), LinExp::param(*p).scale(i64::from(*k))),
        };
        let slot = merged.entry(base).or_insert_with(|| LinExp::int(0));
        *slot = slot.add(&lin);
    }
    merged
        .into_iter()
        .map(|(base, lin)| {
            let b = base_string(&base, table);
            if lin.is_one() {
                b
            } else if lin.is_atomic() {
                format!("{b}^{}", lin.render(table))
            } else {
                format!("{b}^({})", lin.render(table))
            }
        })
        .collect()
}

fn base_string(b: &PowBase, table: &SymbolTable) -> String {
    match b {
        PowBase::Sym(s) => table.name(*s).to_string(),
        PowBase::Func(f, o) => table.func_atom_name(*f, *o),
        PowBase::Exp(s) => format!("exp({})", table.name(*s)),
        PowBase::Rat(r) => {
            if r.is_integer() && r.numer() > &BigInt::from(0) {
                r.numer().to_string()
            } else {
                format!("({r})")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal::expr_eq;
    use crate::parse::parse;

    fn table() -> SymbolTable {
        SymbolTable::builder()
            .params(["n", "k"])
            .func("c", "t")
            .func("q", "t")
            .func("s", "t")
            .build()
            .unwrap()
    }

    fn roundtrips(src: &str, tb: &SymbolTable) -> String {
        let e = parse(src, tb).unwrap();
        let text = render(&e, tb).unwrap();
        let back = parse(&text, tb).unwrap();
        assert!(
            expr_eq(&e, &back, tb).unwrap(),
            "round trip changed value: {src} -> {text}"
        );
        text
    }

    #[test]
    fn simple_fraction_layout() {
        let tb = table();
        assert_eq!(roundtrips("x1/x", &tb), "x1/x");
        // single-monomial denominator distributes with per-term cancellation
        let got = roundtrips("x1/x + x*q(t) + s(t)/x", &tb);
        assert_eq!(got, "x*q(t) + x1/x + s(t)/x");
        assert_eq!(roundtrips("3/4*x", &tb), "3/4*x");
        assert_eq!(roundtrips("3/(4*x)", &tb), "3/(4*x)");
        assert_eq!(roundtrips("0", &tb), "0");
        assert_eq!(roundtrips("x - x", &tb), "0");
    }

    #[test]
    fn multi_term_denominator_is_parenthesized() {
        let tb = table();
        let got = roundtrips("x/(x + 1)", &tb);
        assert_eq!(got, "(x)/(x + 1)");
        // canonical: equal functions print identically
        let a = parse("(x^2 - 1)/(x - 1)", &tb).unwrap();
        let b = parse("x + 1", &tb).unwrap();
        assert_eq!(render(&a, &tb).unwrap(), render(&b, &tb).unwrap());
    }

    #[test]
    fn lattice_exponents_merge_per_base() {
        let tb = table();
        assert_eq!(roundtrips("x*x^n", &tb), "x^(n+1)");
        assert_eq!(roundtrips("x^(n+1)/x^n", &tb), "x");
        assert_eq!(roundtrips("4^n", &tb), "2^(2*n)");
        roundtrips("exp(w)^k*c''(t)", &tb);
        roundtrips("x^(n-1)", &tb);
        roundtrips("x^n/x^k + 1/x", &tb);
    }

    #[test]
    fn determinism_across_equivalent_inputs() {
        let tb = table();
        let a = parse("x1/x + c(t)*x^n", &tb).unwrap();
        let b = parse("(x1 + c(t)*x^(n+1))/x", &tb).unwrap();
        assert_eq!(render(&a, &tb).unwrap(), render(&b, &tb).unwrap());
    }
}
