//! Verdicts for invariance claims. Every check reduces to zero-testing a
//! handful of named residuals on the solution manifold; the residuals stay
//! in the report so a failing claim shows its obstruction.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::{Covering, OdeProblem};
use crate::normal::is_zero;
use crate::prolong::{covering_prolong, lambda_prolong, std_prolong, LambdaPair, TelescopicField};
use crate::symbol::SymbolTable;
use crate::transforms::NonlocalSymmetry;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
}

/// Which characterization of a λ-symmetry produced a residual: tangency of
/// the prolonged field to the manifold, or closure of its commutator with
/// the equation's vector field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Tangency,
    Bracket,
}

/// Outcome of one check. `route` is `None` when residuals from both
/// characterizations are present (they are then named accordingly).
/// `cleared` lists denominators dropped before zero-testing, so spurious
/// zeros at their roots can be audited.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub verdict: Verdict,
    pub route: Option<Route>,
    pub residuals: Vec<(String, Expr)>,
    pub cleared: Vec<Expr>,
}

impl CheckReport {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub(crate) fn from_residuals(
        route: Option<Route>,
        residuals: Vec<(String, Expr)>,
        cleared: Vec<Expr>,
        table: &SymbolTable,
    ) -> Result<CheckReport> {
        let mut verdict = Verdict::Holds;
        for (_, r) in &residuals {
            if !is_zero(r, table)? {
                verdict = Verdict::Fails;
                break;
            }
        }
        Ok(CheckReport { verdict, route, residuals, cleared })
    }
}

/// `ξ·g_t + Σ η^i·g_{x_i}` for however many coefficients are supplied.
pub(crate) fn apply_field(xi: &Expr, etas: &[Expr], g: &Expr, table: &SymbolTable) -> Result<Expr> {
    let mut acc = Expr::mul(xi.clone(), g.diff(table.t(), table)?);
    for (i, eta) in etas.iter().enumerate() {
        let v = table.x(i as u16)?;
        if g.mentions(v, table) {
            acc = Expr::add(acc, Expr::mul(eta.clone(), g.diff(v, table)?));
        }
    }
    Ok(acc)
}

fn require_point(name: &str, e: &Expr, table: &SymbolTable) -> Result<()> {
    for k in 1..=table.cap() {
        if e.mentions(table.x(k)?, table) {
            return Err(Error::Validation(format!(
                "{name} must be a function of t and x, found x{k}"
            )));
        }
    }
    for j in 0..=table.cap() {
        if e.mentions(table.w(j)?, table) {
            return Err(Error::Validation(format!(
                "{name} must be a function of t and x, found a nonlocal variable"
            )));
        }
    }
    Ok(())
}

/// Tangency of the standard prolongation of `ξ∂t + η⁰∂x` to `x_n = F`.
pub fn check_lie_point(problem: &OdeProblem, xi: &Expr, eta0: &Expr) -> Result<CheckReport> {
    let table = problem.table();
    require_point("xi", xi, table)?;
    require_point("eta0", eta0, table)?;
    let n = problem.order();
    let etas = std_prolong(xi, eta0, n, table)?;
    let action = apply_field(xi, &etas[..n as usize], problem.rhs(), table)?;
    let residual = problem.restrict(&Expr::sub(etas[n as usize].clone(), action))?;
    CheckReport::from_residuals(
        Some(Route::Tangency),
        vec![("tangency".into(), residual)],
        Vec::new(),
        table,
    )
}

/// Both characterizations of a λ-symmetry, cross-checked. The tangency route
/// tests `φ^{[λ,(n)]} = X^{[λ,(n)]}(F)` on the manifold; the bracket route
/// tests `[Y, A] = λY + μA` coefficient-wise for `Y` the (n−1)-prolongation
/// restricted to the manifold and `μ = −(A(ρ) + λρ)`. The two verdicts agree
/// for every input; a mismatch is a bug in this crate, not a statement about
/// the claim.
pub fn check_lambda_symmetry(problem: &OdeProblem, pair: &LambdaPair) -> Result<CheckReport> {
    let table = problem.table();
    let n = problem.order();
    // a generalized λ rides on x2 only through the equation
    let lam = problem.restrict(pair.lambda())?;
    let etas = lambda_prolong(pair.rho(), pair.phi0(), &lam, n, table)?;

    let action = apply_field(pair.rho(), &etas[..n as usize], problem.rhs(), table)?;
    let tangency = problem.restrict(&Expr::sub(etas[n as usize].clone(), action))?;

    let mut residuals = vec![("tangency".into(), tangency)];
    let a_rho = problem.apply_a(pair.rho())?;
    let mu = Expr::neg(Expr::add(a_rho.clone(), Expr::mul(lam.clone(), pair.rho().clone())));
    let audit = Expr::neg(Expr::sum(vec![
        a_rho,
        Expr::mul(lam.clone(), pair.rho().clone()),
        mu.clone(),
    ]));
    residuals.push((format!("bracket {}", table.name(table.t())), audit));
    for i in 0..n as usize {
        let (bracket, flow) = if i + 1 < n as usize {
            (
                problem.restrict(&etas[i + 1])?,
                Expr::sym(table.x(i as u16 + 1)?),
            )
        } else {
            (
                problem.restrict(&apply_field(pair.rho(), &etas[..n as usize], problem.rhs(), table)?)?,
                problem.rhs().clone(),
            )
        };
        let defect = Expr::sub(
            bracket,
            Expr::sum(vec![
                problem.apply_a(&etas[i])?,
                Expr::mul(lam.clone(), etas[i].clone()),
                Expr::mul(mu.clone(), flow),
            ]),
        );
        residuals.push((
            format!("bracket {}", table.name(table.x(i as u16)?)),
            problem.restrict(&defect)?,
        ));
    }

    let report = CheckReport::from_residuals(None, residuals, Vec::new(), table)?;
    let tangency_holds = is_zero(&report.residuals[0].1, table)?;
    let bracket_holds = report.residuals[1..]
        .iter()
        .map(|(_, r)| is_zero(r, table))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .all(|z| z);
    if tangency_holds != bracket_holds {
        return Err(Error::Internal(
            "tangency and bracket routes disagree on a λ-symmetry claim".into(),
        ));
    }
    Ok(report)
}

/// The first-order quasi-linear PDE a canonical `λ` of a second-order
/// equation satisfies: `λ_t + x1·λ_x + F·λ_{x1} + λ² − F_x − λ·F_{x1} = 0`.
pub fn check_determining(problem: &OdeProblem, lam: &Expr) -> Result<CheckReport> {
    let table = problem.table();
    if problem.order() != 2 {
        return Err(Error::Validation(
            "the determining equation is stated for second-order equations".into(),
        ));
    }
    for k in 2..=table.cap() {
        if lam.mentions(table.x(k)?, table) {
            return Err(Error::Validation(format!(
                "lambda must be a function of t, x and x1, found x{k}"
            )));
        }
    }
    let x1 = table.x(1)?;
    let f = problem.rhs();
    let residual = Expr::sub(
        Expr::sum(vec![
            lam.diff(table.t(), table)?,
            Expr::mul(Expr::sym(x1), lam.diff(table.x(0)?, table)?),
            Expr::mul(f.clone(), lam.diff(x1, table)?),
            Expr::mul(lam.clone(), lam.clone()),
        ]),
        Expr::add(
            f.diff(table.x(0)?, table)?,
            Expr::mul(lam.clone(), f.diff(x1, table)?),
        ),
    );
    CheckReport::from_residuals(
        Some(Route::Bracket),
        vec![("determining".into(), residual)],
        Vec::new(),
        table,
    )
}

/// Tangency of the telescopic prolongation to `x_n = F`. For second-order
/// problems the verdict is cross-checked against the equivalent λ-pair
/// `(∂x, (γ⁽¹⁾ − αF)/(β − αx1))`; disagreement is a bug, not an input fact.
pub fn check_telescopic(problem: &OdeProblem, tau: &TelescopicField) -> Result<CheckReport> {
    let table = problem.table();
    let n = problem.order();
    let gammas = tau.prolong(n, table)?;
    let action = apply_field(tau.alpha(), &gammas[..n as usize], problem.rhs(), table)?;
    let residual = problem.restrict(&Expr::sub(gammas[n as usize].clone(), action))?;
    let report = CheckReport::from_residuals(
        Some(Route::Tangency),
        vec![("tangency".into(), residual)],
        Vec::new(),
        table,
    )?;
    if n == 2 {
        let pair = crate::transforms::telescopic_to_lambda(table, tau, Some(problem))?;
        let lambda_report = check_lambda_symmetry(problem, &pair)?;
        if lambda_report.verdict != report.verdict {
            return Err(Error::Internal(
                "telescopic and λ-pair routes disagree on an order-2 claim".into(),
            ));
        }
    }
    Ok(report)
}

/// Generalized-symmetry condition for a field
/// `v = ξ∂t + η⁰∂x + η¹∂x1 + ψ⁰∂w` on the covering `x2 = F, w1 = H`: the
/// prolonged coefficients must reproduce the action of `v` on both equations
/// once everything determined is eliminated.
pub fn check_covering_symmetry(covering: &Covering, v: &NonlocalSymmetry) -> Result<CheckReport> {
    let table = covering.table();
    let (etas, psis) = covering_prolong(v.xi(), v.eta0(), v.psi0(), 2, table)?;
    let jet_action = apply_field(v.xi(), &etas[..2], covering.base().rhs(), table)?;
    let jet_residual =
        covering.restrict(&Expr::sub(etas[2].clone(), jet_action))?;
    let w_action = apply_field(v.xi(), &etas[..2], covering.h(), table)?;
    let w_residual = covering.restrict(&Expr::sub(psis[1].clone(), w_action))?;
    CheckReport::from_residuals(
        Some(Route::Tangency),
        vec![("x2".into(), jet_residual), ("w1".into(), w_residual)],
        Vec::new(),
        table,
    )
}

/// Residual of the ∂w-coefficient PDE for the covering built from a pair on
/// a second-order equation:
/// `ψ_t + ψ_x·x1 + ψ_{x1}·F + ψ·λ − (D_t(ρ)·λ + ρλ² + X^{[λ,(1)]}(λ))`.
/// With `rescale = Some(f)` the same obligation is checked for the rescaled
/// pair `(fρ, fφ⁰, λ − D_t(f)/f)`, which carries its own ψ.
pub fn verify_psi(
    problem: &OdeProblem,
    pair: &LambdaPair,
    psi: &Expr,
    rescale: Option<&Expr>,
) -> Result<CheckReport> {
    let table = problem.table();
    if problem.order() != 2 {
        return Err(Error::Validation(
            "the ψ-obligation is stated for second-order equations".into(),
        ));
    }
    for k in 2..=table.cap() {
        if psi.mentions(table.x(k)?, table) {
            return Err(Error::Validation(format!(
                "psi must be a function of t, x and x1, found x{k}"
            )));
        }
    }
    for j in 0..=table.cap() {
        if psi.mentions(table.w(j)?, table) {
            return Err(Error::Validation(
                "psi must be a function of t, x and x1, found a nonlocal variable".into(),
            ));
        }
    }
    let scaled;
    let pair = match rescale {
        Some(f) => {
            scaled = crate::transforms::rescale_pair(table, pair, f)?;
            &scaled
        }
        None => pair,
    };
    let lam = problem.restrict(pair.lambda())?;
    let rhs = crate::transforms::psi_obligation_rhs(problem, pair.rho(), pair.phi0(), &lam, table)?;
    let x1 = table.x(1)?;
    let lhs = Expr::sum(vec![
        psi.diff(table.t(), table)?,
        Expr::mul(psi.diff(table.x(0)?, table)?, Expr::sym(x1)),
        Expr::mul(psi.diff(x1, table)?, problem.rhs().clone()),
        Expr::mul(psi.clone(), lam),
    ]);
    let residual = problem.restrict(&Expr::sub(lhs, rhs))?;
    CheckReport::from_residuals(
        None,
        vec![("psi".into(), residual)],
        Vec::new(),
        table,
    )
}
