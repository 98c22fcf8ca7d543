//! Prolongation formulas: the standard jet lift of a point field, its
//! λ-deformation, the telescopic recurrence, and the lift to a covering
//! system. Plus the commutation defect of a prolonged field against the
//! total derivative, which is what most verdicts in this crate reduce to.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::total_derivative;
use crate::normal::{is_zero, normalize};
use crate::symbol::SymbolTable;

/// A point vector field `ρ(t,x)∂t + φ⁰(t,x)∂x` together with the function
/// `λ` deforming its prolongation. `λ` normally lives on `(t,x,x1)`; a
/// dependence on `x2` is allowed and marks the pair as generalized, which
/// downstream checks handle by restricting `λ` to the equation first.
#[derive(Clone, Debug)]
pub struct LambdaPair {
    rho: Expr,
    phi0: Expr,
    lambda: Expr,
    generalized: bool,
}

impl LambdaPair {
    pub fn new(table: &SymbolTable, rho: Expr, phi0: Expr, lambda: Expr) -> Result<LambdaPair> {
        for (name, e) in [("rho", &rho), ("phi0", &phi0)] {
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
        }
        if is_zero(&rho, table)? && is_zero(&phi0, table)? {
            return Err(Error::Validation("the zero field carries no symmetry".into()));
        }
        for k in 3..=table.cap() {
            if lambda.mentions(table.x(k)?, table) {
                return Err(Error::Validation(format!(
                    "lambda may depend on the jet only through x1 and x2, found x{k}"
                )));
            }
        }
        for j in 0..=table.cap() {
            if lambda.mentions(table.w(j)?, table) {
                return Err(Error::Validation(
                    "lambda cannot depend on the nonlocal chain".into(),
                ));
            }
        }
        let generalized = normalize(&lambda, table)?.depends_on(table.x(2)?, table);
        Ok(LambdaPair { rho, phi0, lambda, generalized })
    }

    pub fn rho(&self) -> &Expr {
        &self.rho
    }

    pub fn phi0(&self) -> &Expr {
        &self.phi0
    }

    pub fn lambda(&self) -> &Expr {
        &self.lambda
    }

    pub fn generalized(&self) -> bool {
        self.generalized
    }

    /// `[φ⁰, φ^{[λ,(1)]}, …, φ^{[λ,(k)]}]`.
    pub fn prolong(&self, k: u16, table: &SymbolTable) -> Result<Vec<Expr>> {
        lambda_prolong(&self.rho, &self.phi0, &self.lambda, k, table)
    }
}

/// Standard prolongation of `ξ∂t + η∂x`:
/// `η^i = D_t(η^{i−1}) − D_t(ξ)·x_i`. Returns `[η⁰, …, η^k]`.
pub fn std_prolong(xi: &Expr, eta0: &Expr, k: u16, table: &SymbolTable) -> Result<Vec<Expr>> {
    let dxi = total_derivative(xi, table)?;
    let mut etas = vec![eta0.clone()];
    for i in 1..=k {
        let prev = etas.last().unwrap();
        let next = Expr::sub(
            total_derivative(prev, table)?,
            Expr::mul(dxi.clone(), Expr::sym(table.x(i)?)),
        );
        etas.push(next);
    }
    Ok(etas)
}

/// λ-deformed prolongation:
/// `φ^{[λ,(i)]} = D_t(φ^{[λ,(i−1)]}) − D_t(ρ)·x_i + λ·(φ^{[λ,(i−1)]} − ρ·x_i)`.
pub fn lambda_prolong(
    rho: &Expr,
    phi0: &Expr,
    lambda: &Expr,
    k: u16,
    table: &SymbolTable,
) -> Result<Vec<Expr>> {
    let drho = total_derivative(rho, table)?;
    let mut etas = vec![phi0.clone()];
    for i in 1..=k {
        let prev = etas.last().unwrap();
        let xi_var = Expr::sym(table.x(i)?);
        let next = Expr::add(
            Expr::sub(
                total_derivative(prev, table)?,
                Expr::mul(drho.clone(), xi_var.clone()),
            ),
            Expr::mul(
                lambda.clone(),
                Expr::sub(prev.clone(), Expr::mul(rho.clone(), xi_var)),
            ),
        );
        etas.push(next);
    }
    Ok(etas)
}

/// Telescopic data `α∂t + β∂x + γ¹∂x1 + …`: all three functions live on
/// `(t,x,x1)` and `β − α·x1` must not vanish identically; the quotient
/// defining the higher coefficients divides by it.
#[derive(Clone, Debug)]
pub struct TelescopicField {
    alpha: Expr,
    beta: Expr,
    gamma1: Expr,
}

impl TelescopicField {
    pub fn new(table: &SymbolTable, alpha: Expr, beta: Expr, gamma1: Expr) -> Result<TelescopicField> {
        for (name, e) in [("alpha", &alpha), ("beta", &beta), ("gamma1", &gamma1)] {
            for k in 2..=table.cap() {
                if e.mentions(table.x(k)?, table) {
                    return Err(Error::Validation(format!(
                        "{name} must be a function of t, x and x1, found x{k}"
                    )));
                }
            }
            for j in 0..=table.cap() {
                if e.mentions(table.w(j)?, table) {
                    return Err(Error::Validation(format!(
                        "{name} must be a function of t, x and x1, found a nonlocal variable"
                    )));
                }
            }
        }
        let pivot = Expr::sub(beta.clone(), Expr::mul(alpha.clone(), Expr::sym(table.x(1)?)));
        if is_zero(&pivot, table)? {
            return Err(Error::Validation(
                "degenerate telescopic data: beta - alpha*x1 vanishes identically".into(),
            ));
        }
        Ok(TelescopicField { alpha, beta, gamma1 })
    }

    pub fn alpha(&self) -> &Expr {
        &self.alpha
    }

    pub fn beta(&self) -> &Expr {
        &self.beta
    }

    pub fn gamma1(&self) -> &Expr {
        &self.gamma1
    }

    /// `β − α·x1`, the quantity every telescopic quotient divides by.
    pub fn pivot(&self, table: &SymbolTable) -> Result<Expr> {
        Ok(Expr::sub(
            self.beta.clone(),
            Expr::mul(self.alpha.clone(), Expr::sym(table.x(1)?)),
        ))
    }

    /// The function `λ` such that `[τ, D_t] = λτ + μD_t`:
    /// `(γ¹ + x1·D_t(α) − D_t(β)) / (β − x1·α)`.
    pub fn lambda_free(&self, table: &SymbolTable) -> Result<Expr> {
        let x1 = Expr::sym(table.x(1)?);
        let num = Expr::add(
            self.gamma1.clone(),
            Expr::sub(
                Expr::mul(x1, total_derivative(&self.alpha, table)?),
                total_derivative(&self.beta, table)?,
            ),
        );
        Expr::div(num, self.pivot(table)?)
    }

    /// `[β, γ¹, γ⁽²⁾, …, γ⁽ᵏ⁾]` where for `i ≥ 2`
    /// `γ⁽ⁱ⁾ = D_t(γ⁽ⁱ⁻¹⁾) − D_t(α)·x_i + λ·(γ⁽ⁱ⁻¹⁾ − α·x_i)`
    /// with `λ` the free-bracket function above. `γ¹` is input data, not a
    /// value of the recurrence; the recurrence starts one step later.
    pub fn prolong(&self, k: u16, table: &SymbolTable) -> Result<Vec<Expr>> {
        let mut etas = vec![self.beta.clone()];
        if k == 0 {
            return Ok(etas);
        }
        etas.push(self.gamma1.clone());
        let dalpha = total_derivative(&self.alpha, table)?;
        let lam = self.lambda_free(table)?;
        for i in 2..=k {
            let prev = etas.last().unwrap();
            let xi_var = Expr::sym(table.x(i)?);
            let next = Expr::add(
                Expr::sub(
                    total_derivative(prev, table)?,
                    Expr::mul(dalpha.clone(), xi_var.clone()),
                ),
                Expr::mul(
                    lam.clone(),
                    Expr::sub(prev.clone(), Expr::mul(self.alpha.clone(), xi_var)),
                ),
            );
            etas.push(next);
        }
        Ok(etas)
    }
}

/// Standard prolongation over a covering: the total derivative carries the
/// `w`-chain, so `η^i = D_t(η^{i−1}) − D_t(ξ)·x_i` picks up `w`-terms from
/// coefficients that mention `w`, and the single ∂w-coefficient lifts as
/// `ψ¹ = D_t(ψ⁰) − D_t(ξ)·w1`. Nothing is restricted here; residual
/// computations restrict afterwards.
pub fn covering_prolong(
    xi: &Expr,
    eta0: &Expr,
    psi0: &Expr,
    k: u16,
    table: &SymbolTable,
) -> Result<(Vec<Expr>, Vec<Expr>)> {
    let etas = std_prolong(xi, eta0, k, table)?;
    let dxi = total_derivative(xi, table)?;
    let psi1 = Expr::sub(
        total_derivative(psi0, table)?,
        Expr::mul(dxi, Expr::sym(table.w(1)?)),
    );
    Ok((etas, vec![psi0.clone(), psi1]))
}

/// Commutation defect of `Y = ξ∂t + Σ η^i ∂x_i` against `D_t` relative to
/// the pair `(λ, μ)` with `μ = −(D_t + λ)(ξ)`: the coefficients of
/// `[Y, D_t] − λY − μD_t` in the directions `∂t, ∂x, …, ∂x_{k−1}`. The top
/// direction `∂x_k` is not a defect: the bracket's coefficient there
/// involves `η^{k+1}`, which the input does not carry.
#[derive(Clone, Debug)]
pub struct BracketReport {
    pub mu: Expr,
    pub coefficients: Vec<(String, Expr)>,
}

pub fn bracket_defect(
    xi: &Expr,
    etas: &[Expr],
    lambda: &Expr,
    table: &SymbolTable,
) -> Result<BracketReport> {
    if etas.is_empty() {
        return Err(Error::Validation("a prolonged field needs an ∂x coefficient".into()));
    }
    let dxi = total_derivative(xi, table)?;
    let mu = Expr::neg(Expr::add(dxi.clone(), Expr::mul(lambda.clone(), xi.clone())));
    let mut coefficients = Vec::new();
    let audit = Expr::neg(Expr::sum(vec![
        dxi,
        Expr::mul(lambda.clone(), xi.clone()),
        mu.clone(),
    ]));
    coefficients.push((table.name(table.t()).to_string(), audit));
    for i in 0..etas.len() - 1 {
        let next_var = Expr::sym(table.x(i as u16 + 1)?);
        let defect = Expr::sub(
            etas[i + 1].clone(),
            Expr::sum(vec![
                total_derivative(&etas[i], table)?,
                Expr::mul(lambda.clone(), etas[i].clone()),
                Expr::mul(mu.clone(), next_var),
            ]),
        );
        coefficients.push((table.name(table.x(i as u16)?).to_string(), defect));
    }
    Ok(BracketReport { mu, coefficients })
}
