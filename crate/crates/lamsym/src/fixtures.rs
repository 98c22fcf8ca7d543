//! Worked families with known symmetry structure, shared by the test
//! suites, the benches and the CLI examples. Every claim a fixture carries
//! is meant to pass its corresponding check exactly; the one deliberate
//! exception is [`Fixture::negative_invariant`], kept as a regression
//! control for a form that circulates in the literature but is not
//! actually invariant.

use std::sync::Arc;

use crate::error::Result;
use crate::expr::Expr;
use crate::jet::{Covering, OdeProblem};
use crate::parse::parse;
use crate::prolong::{LambdaPair, TelescopicField};
use crate::symbol::SymbolTable;
use crate::transforms::{InvariantPair, NonlocalSymmetry};

/// One second-order equation with its verified symmetry data.
pub struct Fixture {
    pub name: String,
    pub table: Arc<SymbolTable>,
    pub problem: OdeProblem,
    /// Pairs expected to pass `check_lambda_symmetry`; index 0 is canonical.
    pub pairs: Vec<LambdaPair>,
    /// Solution of the ∂w-coefficient equation for `pairs[0]`, when known.
    pub psi: Option<Expr>,
    /// `(f, ψ̃)`: rescaling factor and the solution for the rescaled pair.
    pub rescale: Option<(Expr, Expr)>,
    /// Invariants of the first prolongation of `pairs[0]`.
    pub invariants: Option<InvariantPair>,
    /// Reduced right-hand side over the parameters `z`, `u`, when the
    /// reduction is autonomous enough to be written that way.
    pub reduced_body: Option<Expr>,
    /// A candidate that fails `check_invariants` for generic data.
    pub negative_invariant: Option<InvariantPair>,
}

fn must(table: &SymbolTable, src: &str) -> Expr {
    parse(src, table).unwrap_or_else(|e| panic!("fixture expression `{src}`: {e}"))
}

fn pair(table: &SymbolTable, rho: &str, phi0: &str, lam: &str) -> LambdaPair {
    LambdaPair::new(table, must(table, rho), must(table, phi0), must(table, lam))
        .expect("fixture pair")
}

/// `x2 = x1²/x + (c(t)xᵖ + b(t))x1 + (c′(t) − b(t)c(t))xᵖ⁺¹/p + d(t)x`,
/// integrable by quadratures for every exponent although generic members
/// have no Lie point symmetries. `p = None` keeps the exponent symbolic.
pub fn power_law(p: Option<i64>) -> Fixture {
    let mut builder = SymbolTable::builder()
        .func("a", "t")
        .func("b", "t")
        .func("c", "t")
        .func("d", "t");
    if p.is_none() {
        builder = builder.param("n");
    }
    let table = Arc::new(builder.build().expect("fixture table"));
    let n = match p {
        Some(k) => k.to_string(),
        None => "n".to_string(),
    };
    let rhs = format!(
        "x1^2/x + (c(t)*x^({n}) + b(t))*x1 + (c'(t) - b(t)*c(t))*x^({n}+1)/({n}) + d(t)*x"
    );
    let problem =
        OdeProblem::new(Arc::clone(&table), 2, must(&table, &rhs)).expect("fixture problem");
    let lam = format!("x1/x + c(t)*x^({n})");
    let pairs = vec![
        pair(&table, "0", "1", &lam),
        pair(
            &table,
            "0",
            "a(t)*x",
            &format!("c(t)*x^({n}) - a'(t)/a(t)"),
        ),
    ];
    Fixture {
        name: match p {
            Some(k) => format!("power-law-{k}"),
            None => "power-law".to_string(),
        },
        psi: Some(must(&table, &format!("(({n})+1)/x"))),
        rescale: Some((
            must(&table, "a(t)*x"),
            must(&table, &format!("a(t)*({n})")),
        )),
        invariants: None,
        reduced_body: None,
        negative_invariant: None,
        table,
        problem,
        pairs,
    }
}

/// `x2 = d(t)x − b′(t)/(2x) − b(t)²/(4x³)`; the Ermakov–Pinney equation
/// when `b` is constant. The second pair is the first one rescaled by
/// `a(t)x`, which is how it arises from an exponential nonlocal symmetry.
pub fn pinney() -> Fixture {
    let table = Arc::new(
        SymbolTable::builder()
            .func("a", "t")
            .func("b", "t")
            .func("d", "t")
            .build()
            .expect("fixture table"),
    );
    let problem = OdeProblem::new(
        Arc::clone(&table),
        2,
        must(&table, "d(t)*x - b'(t)/(2*x) - b(t)^2/(4*x^3)"),
    )
    .expect("fixture problem");
    let pairs = vec![
        pair(&table, "0", "1", "x1/x + b(t)/x^2"),
        pair(&table, "0", "a(t)*x", "b(t)/x^2 - a'(t)/a(t)"),
    ];
    let invariants = InvariantPair::new(
        &table,
        must(&table, "t"),
        must(&table, "x1/x + b(t)/(2*x^2)"),
    )
    .expect("fixture invariants");
    Fixture {
        name: "ermakov-pinney".to_string(),
        psi: Some(must(&table, "-1/x")),
        rescale: None,
        invariants: Some(invariants),
        // the chain closes on d(t) − ζ², which is not autonomous
        reduced_body: None,
        negative_invariant: None,
        table,
        problem,
        pairs,
    }
}

/// The member of the Pinney family with `b(t) = t`, `d = −1`:
/// `x2 = −x − 1/(2x) − t²/(4x³)`. Its reduction is autonomous, so this is
/// the variant that exercises `verify_reduction`.
pub fn pinney_special() -> Fixture {
    let table = Arc::new(
        SymbolTable::builder()
            .params(["z", "u"])
            .build()
            .expect("fixture table"),
    );
    let problem = OdeProblem::new(
        Arc::clone(&table),
        2,
        must(&table, "-x - 1/(2*x) - t^2/(4*x^3)"),
    )
    .expect("fixture problem");
    let pairs = vec![
        pair(&table, "0", "1", "x1/x + t/x^2"),
        pair(&table, "0", "x", "t/x^2"),
    ];
    let invariants = InvariantPair::new(
        &table,
        must(&table, "t"),
        must(&table, "x1/x + t/(2*x^2)"),
    )
    .expect("fixture invariants");
    Fixture {
        name: "ermakov-pinney-special".to_string(),
        psi: Some(must(&table, "-1/x")),
        rescale: None,
        invariants: Some(invariants),
        reduced_body: Some(must(&table, "-1 - u^2")),
        negative_invariant: None,
        table,
        problem,
        pairs,
    }
}

fn painleve_with(constant_coefficients: bool) -> Fixture {
    let table = Arc::new(
        if constant_coefficients {
            SymbolTable::builder().params(["q", "s", "z", "u"])
        } else {
            SymbolTable::builder().func("q", "t").func("s", "t").params(["z", "u"])
        }
        .build()
        .expect("fixture table"),
    );
    let (q, s, drift) = if constant_coefficients {
        ("q", "s", String::new())
    } else {
        ("q(t)", "s(t)", " - s'(t) + q'(t)*x^2".to_string())
    };
    let problem = OdeProblem::new(
        Arc::clone(&table),
        2,
        must(&table, &format!("x1^2/x + ({q}*x + {s}/x)*x1{drift}")),
    )
    .expect("fixture problem");
    let pairs = vec![
        pair(&table, "0", "1", &format!("x1/x + {q}*x + {s}/x")),
        pair(&table, "0", "x", &format!("{q}*x + {s}/x")),
    ];
    let invariants = InvariantPair::new(
        &table,
        must(&table, "t"),
        must(&table, &format!("x1/x - {q}*x + {s}/x")),
    )
    .expect("fixture invariants");
    Fixture {
        name: if constant_coefficients {
            "painleve-xiv-constant".to_string()
        } else {
            "painleve-xiv".to_string()
        },
        // no solution rational in (t, x, x1) exists for generic q(t), s(t)
        psi: constant_coefficients.then(|| must(&table, "2*q*x/x1")),
        rescale: None,
        invariants: Some(invariants),
        // ζ is a first integral here: the reduction is a quadrature
        reduced_body: Some(Expr::zero()),
        negative_invariant: None,
        table,
        problem,
        pairs,
    }
}

/// Painlevé XIV, `x2 = x1²/x + (q(t)x + s(t)/x)x1 − s′(t) + q′(t)x²`.
pub fn painleve() -> Fixture {
    painleve_with(false)
}

/// Painlevé XIV with constant coefficients, the variant whose
/// ∂w-obligation has a rational solution.
pub fn painleve_constant() -> Fixture {
    painleve_with(true)
}

/// `x2 + (xf′(x) + 2f(x) + c1)x1 + (f(x)² + c1f(x) + c2)x = 0`, a family
/// covering several classical nonlinear oscillators. `f` is any expression
/// in `x` (it may use the parameter `k` or the opaque function `f`).
pub fn oscillator(tag: &str, f: &str, c1: &str) -> Fixture {
    let table = Arc::new(
        SymbolTable::builder()
            .func("f", "x")
            .params(["k", "c1", "c2", "z", "u"])
            .build()
            .expect("fixture table"),
    );
    let x = table.x(0).expect("x");
    let x1 = Expr::sym(table.x(1).expect("x1"));
    let fe = must(&table, f);
    let c1e = must(&table, c1);
    let c2e = must(&table, "c2");
    let fp = fe.diff(x, &table).expect("f is differentiable");
    let damping = Expr::sum(vec![
        Expr::mul(Expr::sym(x), fp.clone()),
        Expr::mul(Expr::int(2), fe.clone()),
        c1e.clone(),
    ]);
    let restoring = Expr::sum(vec![
        Expr::mul(fe.clone(), fe.clone()),
        Expr::mul(c1e.clone(), fe.clone()),
        c2e.clone(),
    ]);
    let rhs = Expr::neg(Expr::add(
        Expr::mul(damping, x1.clone()),
        Expr::mul(restoring, Expr::sym(x)),
    ));
    let problem = OdeProblem::new(Arc::clone(&table), 2, rhs).expect("fixture problem");
    let over_x = Expr::div(x1.clone(), Expr::sym(x)).expect("x is nonzero");
    let lam = Expr::sub(over_x.clone(), Expr::mul(Expr::sym(x), fp.clone()));
    let pairs = vec![LambdaPair::new(&table, Expr::zero(), Expr::one(), lam.clone())
        .expect("fixture pair")];
    let invariants = InvariantPair::new(
        &table,
        Expr::sym(table.t()),
        Expr::add(over_x, fe.clone()),
    )
    .expect("fixture invariants");
    let negative = InvariantPair::new(&table, Expr::sym(table.t()), lam)
        .expect("fixture invariants");
    let u = Expr::sym(table.param("u").expect("u"));
    let body = Expr::neg(Expr::sum(vec![
        Expr::mul(u.clone(), u.clone()),
        Expr::mul(c1e, u),
        c2e,
    ]));
    Fixture {
        name: format!("oscillator-{tag}"),
        psi: None,
        rescale: None,
        invariants: Some(invariants),
        reduced_body: Some(body),
        negative_invariant: Some(negative),
        table,
        problem,
        pairs,
    }
}

/// The family member with opaque `f(x)`.
pub fn oscillator_generic() -> Fixture {
    oscillator("generic", "f(x)", "c1")
}

/// One equation in covering form together with a symmetry of the covering.
pub struct CoveringFixture {
    pub name: String,
    pub table: Arc<SymbolTable>,
    pub covering: Covering,
    pub symmetry: NonlocalSymmetry,
    /// The pair the symmetry projects onto.
    pub pair: LambdaPair,
}

/// Two nonlinear oscillators on a curved configuration space
/// (Mathews–Lakshmanan type) with symmetries `e^w∂x + (H/x1)e^w∂w` of
/// their coverings `x2 = F, w1 = H`.
pub fn curved_oscillators() -> Vec<CoveringFixture> {
    let table = Arc::new(
        SymbolTable::builder()
            .params(["k", "alpha"])
            .build()
            .expect("fixture table"),
    );
    let data = [
        (
            "curved-oscillator-1",
            "(k*x*x1^2 - alpha^2*x)/(1 + k*x^2)",
            "-(x*(alpha^2 - k*x1^2))/((k*x^2 + 1)*x1)",
        ),
        (
            "curved-oscillator-2",
            "-k*x*x1^2/(1 + k*x^2) - alpha^2*x/(1 + k*x^2)^3",
            "(-k*x*(1 + k*x^2)^2*x1^2 - alpha^2*x)/((k*x^2 + 1)^3*x1)",
        ),
    ];
    data.iter()
        .map(|(name, f, h)| {
            let problem = OdeProblem::new(Arc::clone(&table), 2, must(&table, f))
                .expect("fixture problem");
            let covering =
                Covering::new(problem, must(&table, h)).expect("fixture covering");
            let ew = Expr::exp(table.w(0).expect("w"));
            let psi0 = Expr::mul(
                Expr::div(must(&table, h), Expr::sym(table.x(1).expect("x1")))
                    .expect("x1 is nonzero"),
                ew.clone(),
            );
            let symmetry = NonlocalSymmetry::new(&table, Expr::zero(), ew, psi0)
                .expect("fixture symmetry");
            CoveringFixture {
                name: name.to_string(),
                table: Arc::clone(&table),
                pair: pair(&table, "0", "1", h),
                covering,
                symmetry,
            }
        })
        .collect()
}

/// A telescopic field that is not any λ-prolongation on the nose:
/// `τ = x1∂x + x∂x1 + …` on `x2 = x`.
pub struct TelescopicFixture {
    pub table: Arc<SymbolTable>,
    pub problem: OdeProblem,
    pub field: TelescopicField,
}

pub fn telescopic() -> TelescopicFixture {
    let table = Arc::new(SymbolTable::builder().build().expect("fixture table"));
    let problem =
        OdeProblem::new(Arc::clone(&table), 2, must(&table, "x")).expect("fixture problem");
    let field = TelescopicField::new(
        &table,
        Expr::zero(),
        must(&table, "x1"),
        must(&table, "x"),
    )
    .expect("fixture field");
    TelescopicFixture { table, problem, field }
}

/// Every second-order fixture, for suite-wide sweeps.
pub fn all() -> Vec<Fixture> {
    vec![
        power_law(None),
        power_law(Some(1)),
        power_law(Some(2)),
        power_law(Some(3)),
        pinney(),
        pinney_special(),
        painleve(),
        painleve_constant(),
        oscillator_generic(),
        oscillator("modified-emden", "k*x", "0"),
        oscillator("generalized-emden", "k*x", "c1"),
        oscillator("duffing-van-der-pol", "k*x^2", "c1"),
    ]
}

/// Used by `all()` consumers that need a `Result` context.
pub fn try_all() -> Result<Vec<Fixture>> {
    Ok(all())
}
