//! Text to [`Expr`]: a small Pratt parser over the expression grammar.
//!
//! Identifiers resolve against a [`SymbolTable`]; unknown names are errors
//! with byte offsets, not implicit declarations. `^` is right-associative
//! and binds tighter than unary minus; exponents must live in the integer
//! parameter lattice. Opaque functions apply to their declared base variable
//! only, with derivative marks as postfix apostrophes: `c''(t)`.

use num::bigint::BigInt;
use num::rational::BigRational;

use crate::error::{Error, Result};
use crate::expr::{Expr, Node};
use crate::linexp::LinExp;
use crate::symbol::{Entry, SymbolTable};

#[derive(Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Quote,
}

struct Lexed {
    tok: Tok,
    off: usize,
}

fn err_at(off: usize, message: impl Into<String>) -> Error {
    Error::Parse { offset: off, message: message.into() }
}

fn lex(input: &str) -> Result<Vec<Lexed>> {
    let bytes = input.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\r' | '\n' => i += 1,
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let digits = &input[start..i];
                let value = digits
                    .parse::<BigInt>()
                    .map_err(|_| err_at(start, "malformed integer literal"))?;
                out.push(Lexed { tok: Tok::Int(value), off: start });
            }
            'A'..='Z' | 'a'..='z' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push(Lexed { tok: Tok::Ident(input[start..i].to_string()), off: start });
            }
            _ => {
                let tok = match c {
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '/' => Tok::Slash,
                    '^' => Tok::Caret,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '\'' => Tok::Quote,
                    _ => return Err(err_at(i, format!("unexpected character `{c}`"))),
                };
                out.push(Lexed { tok, off: i });
                i += 1;
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Lexed>,
    pos: usize,
    table: &'a SymbolTable,
    end: usize,
}

/// Parses `input` against the table's symbol universe.
pub fn parse(input: &str, table: &SymbolTable) -> Result<Expr> {
    let toks = lex(input)?;
    let mut p = Parser { toks, pos: 0, table, end: input.len() };
    let e = p.expr(0)?;
    if let Some(t) = p.peek() {
        return Err(err_at(t.off, "expected an operator or end of input"));
    }
    Ok(e)
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Lexed> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<&Lexed> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |t| t.off)
    }

    fn expect_rparen(&mut self) -> Result<()> {
        match self.next() {
            Some(Lexed { tok: Tok::RParen, .. }) => Ok(()),
            Some(t) => Err(err_at(t.off, "expected `)`")),
            None => Err(err_at(self.end, "expected `)`")),
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr> {
        let mut lhs = self.prefix()?;
        loop {
            let (lbp, rbp, tok_off) = match self.peek() {
                Some(t) => match t.tok {
                    Tok::Plus | Tok::Minus => (10, 11, t.off),
                    Tok::Star | Tok::Slash => (20, 21, t.off),
                    // right-associative: parse the right side below ^'s own binding power
                    Tok::Caret => (30, 29, t.off),
                    _ => break,
                },
                None => break,
            };
            if lbp <= min_bp {
                break;
            }
            let op = match &self.next().unwrap().tok {
                Tok::Plus => '+',
                Tok::Minus => '-',
                Tok::Star => '*',
                Tok::Slash => '/',
                Tok::Caret => '^',
                _ => unreachable!(),
            };
            let rhs_off = self.here();
            let rhs = self.expr(rbp)?;
            lhs = match op {
                '+' => Expr::add(lhs, rhs),
                '-' => Expr::sub(lhs, rhs),
                '*' => Expr::mul(lhs, rhs),
                '/' => Expr::div(lhs, rhs).map_err(|_| {
                    err_at(tok_off, "division by a literal zero")
                })?,
                '^' => {
                    let lin = to_linexp(&rhs, self.table).ok_or_else(|| {
                        err_at(
                            rhs_off,
                            "exponent must be an integer combination of parameters",
                        )
                    })?;
                    Expr::pow(lhs, lin).map_err(|_| {
                        err_at(tok_off, "zero raised to a non-positive power")
                    })?
                }
                _ => unreachable!(),
            };
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr> {
        let off = self.here();
        match self.next().map(|t| (&t.tok, t.off)) {
            Some((Tok::Int(v), _)) => {
                Ok(Expr::rat(BigRational::from_integer(v.clone())))
            }
            Some((Tok::Ident(name), off)) => {
                let name = name.clone();
                self.ident(&name, off)
            }
            Some((Tok::Minus, _)) => {
                // unary minus binds looser than ^: -x^2 is -(x^2)
                let inner = self.expr(25)?;
                Ok(Expr::neg(inner))
            }
            Some((Tok::LParen, _)) => {
                let inner = self.expr(0)?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Some((_, off)) => Err(err_at(off, "expected an expression")),
            None => Err(err_at(off, "expected an expression")),
        }
    }

    fn ident(&mut self, name: &str, off: usize) -> Result<Expr> {
        let mut quotes: u32 = 0;
        while matches!(self.peek(), Some(Lexed { tok: Tok::Quote, .. })) {
            self.next();
            quotes += 1;
        }
        if name == "exp" {
            if quotes > 0 {
                return Err(err_at(off, "`exp` does not take derivative marks"));
            }
            let arg = self.argument(name)?;
            return match self.table.lookup(&arg.0) {
                Some(Entry::Sym(s)) if self.table.is_base_var(s) => Ok(Expr::exp(s)),
                _ => Err(err_at(arg.1, "`exp` expects a base variable (t, x or w)")),
            };
        }
        match self.table.lookup(name) {
            Some(Entry::Sym(s)) => {
                if quotes > 0 {
                    return Err(err_at(
                        off,
                        format!("derivative marks apply to declared functions, not `{name}`"),
                    ));
                }
                Ok(Expr::sym(s))
            }
            Some(Entry::Func(f)) => {
                let arg = self.argument(name)?;
                let base = self.table.func_decl(f).base;
                match self.table.lookup(&arg.0) {
                    Some(Entry::Sym(s)) if s == base => Ok(Expr::func(f, quotes)),
                    Some(Entry::Sym(s)) if self.table.is_base_var(s) => Err(err_at(
                        arg.1,
                        format!(
                            "`{name}` is declared over `{}`, not `{}`",
                            self.table.name(base),
                            arg.0
                        ),
                    )),
                    _ => Err(err_at(
                        arg.1,
                        "opaque function argument must be a base variable",
                    )),
                }
            }
            None => Err(err_at(off, format!("unknown identifier `{name}`"))),
        }
    }

    /// `( ident )` after a function head; returns the identifier and its offset.
    fn argument(&mut self, head: &str) -> Result<(String, usize)> {
        match self.next() {
            Some(Lexed { tok: Tok::LParen, .. }) => {}
            Some(t) => return Err(err_at(t.off, format!("`{head}` expects an argument list"))),
            None => return Err(err_at(self.end, format!("`{head}` expects an argument list"))),
        }
        let arg = match self.next() {
            Some(Lexed { tok: Tok::Ident(a), off }) => (a.clone(), *off),
            Some(t) => return Err(err_at(t.off, "expected a variable name")),
            None => return Err(err_at(self.end, "expected a variable name")),
        };
        self.expect_rparen()?;
        Ok(arg)
    }
}

/// Converts an exponent-position expression into the integer lattice, if it
/// lies there: integer literals, parameters, sums and integer multiples.
fn to_linexp(e: &Expr, table: &SymbolTable) -> Option<LinExp> {
    match e.node() {
        Node::Rat(r) => {
            if !r.is_integer() {
                return None;
            }
            i64::try_from(r.numer().clone()).ok().map(LinExp::int)
        }
        Node::Sym(s) if table.is_param(*s) => Some(LinExp::param(*s)),
        Node::Sum(ts) => {
            let mut acc = LinExp::int(0);
            for t in ts {
                acc = acc.add(&to_linexp(t, table)?);
            }
            Some(acc)
        }
        Node::Prod(fs) => {
            let mut scale: i64 = 1;
            let mut lin: Option<LinExp> = None;
            for f in fs {
                match f.node() {
                    Node::Rat(r) if r.is_integer() => {
                        scale = scale.checked_mul(i64::try_from(r.numer().clone()).ok()?)?;
                    }
                    _ => {
                        if lin.is_some() {
                            return None;
                        }
                        lin = Some(to_linexp(f, table)?);
                    }
                }
            }
            Some(match lin {
                Some(l) => l.scale(scale),
                None => LinExp::int(scale),
            })
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal::expr_eq;
    use crate::symbol::SymbolTable;

    fn table() -> SymbolTable {
        SymbolTable::builder()
            .params(["n", "k"])
            .func("c", "t")
            .func("f", "x")
            .build()
            .unwrap()
    }

    #[test]
    fn grammar_cases() {
        let tb = table();
        let x = Expr::sym(tb.x(0).unwrap());
        let x1 = Expr::sym(tb.x(1).unwrap());

        let got = parse("x1^2/x", &tb).unwrap();
        let want = Expr::div(Expr::powi(x1.clone(), 2).unwrap(), x.clone()).unwrap();
        assert_eq!(got, want);

        let got = parse("c'(t)*x^(n+1)", &tb).unwrap();
        let n = tb.param("n").unwrap();
        let want = Expr::mul(
            Expr::func(tb.func("c").unwrap(), 1),
            Expr::pow(x.clone(), LinExp::param(n).add(&LinExp::int(1))).unwrap(),
        );
        assert_eq!(got, want);

        // rationals via division fold at construction
        assert_eq!(
            parse("3/4", &tb).unwrap(),
            Expr::rat(BigRational::new(3.into(), 4.into()))
        );
    }

    #[test]
    fn precedence_and_associativity() {
        let tb = table();
        // ^ binds tighter than unary minus
        assert!(expr_eq(
            &parse("-x^2", &tb).unwrap(),
            &parse("0 - x^2", &tb).unwrap(),
            &tb
        )
        .unwrap());
        // ^ tighter than *
        assert!(expr_eq(
            &parse("2*x^2", &tb).unwrap(),
            &parse("2*(x^2)", &tb).unwrap(),
            &tb
        )
        .unwrap());
        // left-assoc chain of / and *
        assert!(expr_eq(
            &parse("3/4*x", &tb).unwrap(),
            &parse("(3/4)*x", &tb).unwrap(),
            &tb
        )
        .unwrap());
        // right-assoc ^ with an inner lattice failure: x^(n^2)
        assert!(matches!(
            parse("x^n^2", &tb),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn resolution_errors_carry_offsets() {
        let tb = table();
        match parse("x + foo", &tb) {
            Err(Error::Parse { offset, message }) => {
                assert_eq!(offset, 4);
                assert!(message.contains("foo"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(parse("f(x1)", &tb), Err(Error::Parse { .. })));
        assert!(matches!(parse("c(x)", &tb), Err(Error::Parse { .. })));
        assert!(matches!(parse("x^(1/2)", &tb), Err(Error::Parse { .. })));
        assert!(matches!(parse("x^x", &tb), Err(Error::Parse { .. })));
        assert!(matches!(parse("exp(x1)", &tb), Err(Error::Parse { .. })));
        assert!(matches!(parse("x +", &tb), Err(Error::Parse { .. })));
        assert!(matches!(parse("(x", &tb), Err(Error::Parse { .. })));
    }

    #[test]
    fn exponent_lattice_forms() {
        let tb = table();
        let n = tb.param("n").unwrap();
        let k = tb.param("k").unwrap();
        let x = Expr::sym(tb.x(0).unwrap());

        let got = parse("x^(2*n - k + 3)", &tb).unwrap();
        let want = Expr::pow(
            x.clone(),
            LinExp::param(n)
                .scale(2)
                .sub(&LinExp::param(k))
                .add(&LinExp::int(3)),
        )
        .unwrap();
        assert_eq!(got, want);

        // negative integer exponents are lattice points
        assert!(expr_eq(
            &parse("x^-2", &tb).unwrap(),
            &parse("1/x^2", &tb).unwrap(),
            &tb
        )
        .unwrap());

        // exp(w) raised to a parameter
        let got = parse("exp(w)^k", &tb).unwrap();
        let want = Expr::pow(Expr::exp(tb.w(0).unwrap()), LinExp::param(k)).unwrap();
        assert_eq!(got, want);
    }
}
