use super::density::DensityMatrix;
use super::liouvillian::Liouvillian;
use super::propagate::{propagate_with, Integrator, PropagateOptions};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::model::{ModelParams, MIN_DIM};

/// `𝓛ⁿ ρ(0)` by repeated application.
pub fn taylor_term(l: &Liouvillian, rho0: &DensityMatrix, n: usize) -> Result<ComplexMatrix> {
    let mut x = rho0.matrix().clone();
    for _ in 0..n {
        x = l.apply_matrix(&x)?;
    }
    Ok(x)
}

/// `Σ_{n ≤ order} τⁿ/n! 𝓛ⁿ ρ(0)`.
pub fn taylor_series(
    l: &Liouvillian,
    rho0: &DensityMatrix,
    order: usize,
    tau: f64,
) -> Result<ComplexMatrix> {
    let mut term = rho0.matrix().clone();
    let mut sum = term.clone();
    for k in 1..=order {
        term = l.apply_matrix(&term)?.scale_real(tau / k as f64);
        sum += &term;
    }
    Ok(sum)
}

/// `‖ρ(τ) − Σ_{n ≤ order} τⁿ/n! 𝓛ⁿ ρ(0)‖_F`, with `ρ(τ)` from the exact
/// propagator. Meaningful while `τ‖𝓛‖₁ < 1`.
pub fn short_time_check(
    l: &Liouvillian,
    rho0: &DensityMatrix,
    order: usize,
    tau: f64,
) -> Result<f64> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::InvalidParameter {
            name: "tau",
            reason: format!("must be finite and >= 0, got {tau}"),
        });
    }
    let series = taylor_series(l, rho0, order, tau)?;
    if tau == 0.0 {
        return Ok((&series - rho0.matrix()).frobenius_norm());
    }
    let opts = PropagateOptions {
        integrator: Integrator::Exact,
        ..Default::default()
    };
    let (states, _) = propagate_with(l, rho0, &[tau], &opts)?;
    Ok((states[0].matrix() - &series).frobenius_norm())
}

/// Closed forms of `𝓛|0⟩⟨0|` and `𝓛²|0⟩⟨0|`. Needs at least three levels
/// for the `|0⟩⟨2|` coherence of the second term.
pub fn vacuum_terms(p: &ModelParams) -> Result<(ComplexMatrix, ComplexMatrix)> {
    p.validate()?;
    if p.dim < MIN_DIM + 1 {
        return Err(Error::DimensionTooSmall {
            dim: p.dim,
            min: MIN_DIM + 1,
        });
    }
    let (a, g) = (p.alpha, p.gamma);
    let e1 = p.detuning + p.chi / (1.0 + p.n_s);
    let mut first = ComplexMatrix::zeros(p.dim);
    first[(0, 1)] = C64::new(0.0, a);
    first[(1, 0)] = C64::new(0.0, -a);
    let mut second = ComplexMatrix::zeros(p.dim);
    second[(0, 0)] = C64::new(-2.0 * a * a, 0.0);
    second[(1, 1)] = C64::new(2.0 * a * a, 0.0);
    second[(0, 2)] = C64::new(-std::f64::consts::SQRT_2 * a * a, 0.0);
    second[(2, 0)] = second[(0, 2)];
    second[(0, 1)] = C64::new(0.0, a) * C64::new(-0.5 * g, e1);
    second[(1, 0)] = C64::new(0.0, a) * C64::new(0.5 * g, e1);
    Ok((first, second))
}

/// Least-squares slope of `log r(τ)` against `log τ` for the truncated
/// series, over `τ₀, τ₀/2, …, τ₀/2^halvings`. Approaches `order + 1`.
pub fn convergence_order(
    l: &Liouvillian,
    rho0: &DensityMatrix,
    order: usize,
    tau0: f64,
    halvings: usize,
) -> Result<f64> {
    if halvings == 0 || !(tau0 > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tau0",
            reason: "need tau0 > 0 and at least one halving".into(),
        });
    }
    let mut pts = Vec::with_capacity(halvings + 1);
    for k in 0..=halvings {
        let tau = tau0 / f64::powi(2.0, k as i32);
        let r = short_time_check(l, rho0, order, tau)?;
        pts.push((tau.ln(), r.max(f64::MIN_POSITIVE).ln()));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::build_liouvillian;

    /// `𝓛² |0⟩⟨0|` worked out by hand.
    fn second_order_vacuum(p: &ModelParams) -> ComplexMatrix {
        let (a, g) = (p.alpha, p.gamma);
        let e1 = p.detuning + p.chi / (1.0 + p.n_s);
        let mut m = ComplexMatrix::zeros(p.dim);
        m[(0, 0)] = C64::new(-2.0 * a * a, 0.0);
        m[(1, 1)] = C64::new(2.0 * a * a, 0.0);
        m[(0, 2)] = C64::new(-(2f64).sqrt() * a * a, 0.0);
        m[(2, 0)] = m[(0, 2)];
        m[(0, 1)] = C64::new(-a * e1, -0.5 * a * g);
        m[(1, 0)] = C64::new(-a * e1, 0.5 * a * g);
        m
    }

    fn params() -> ModelParams {
        ModelParams {
            dim: 8,
            n_s: 0.6,
            ..ModelParams::default()
        }
    }

    #[test]
    fn zeroth_term_is_initial_state() {
        let l = build_liouvillian(&params()).unwrap();
        let rho0 = DensityMatrix::coherent(8, C64::new(0.2, 0.4)).unwrap();
        assert_eq!(&taylor_term(&l, &rho0, 0).unwrap(), rho0.matrix());
    }

    #[test]
    fn first_and_second_terms_from_vacuum() {
        let p = params();
        let l = build_liouvillian(&p).unwrap();
        let rho0 = DensityMatrix::ground(p.dim);
        let t1 = taylor_term(&l, &rho0, 1).unwrap();
        let mut want = ComplexMatrix::zeros(p.dim);
        want[(0, 1)] = C64::new(0.0, p.alpha);
        want[(1, 0)] = C64::new(0.0, -p.alpha);
        assert!(t1.max_abs_diff(&want) < 1e-14);
        let t2 = taylor_term(&l, &rho0, 2).unwrap();
        assert!(t2.max_abs_diff(&second_order_vacuum(&p)) < 1e-12);
    }

    #[test]
    fn residual_scales_with_next_order() {
        let l = build_liouvillian(&params()).unwrap();
        let rho0 = DensityMatrix::ground(8);
        let r1 = short_time_check(&l, &rho0, 2, 0.02).unwrap();
        let r2 = short_time_check(&l, &rho0, 2, 0.01).unwrap();
        let ratio = r1 / r2;
        assert!((6.0..=10.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn closed_forms_match_hand_expansion() {
        let p = params();
        let (t1, t2) = vacuum_terms(&p).unwrap();
        assert_eq!(t1[(0, 1)], C64::new(0.0, p.alpha));
        assert!(t2.max_abs_diff(&second_order_vacuum(&p)) < 1e-15);
        let tiny = ModelParams { dim: 2, ..p };
        assert!(vacuum_terms(&tiny).is_err());
    }

    #[test]
    fn fitted_orders() {
        let l = build_liouvillian(&params()).unwrap();
        let rho0 = DensityMatrix::ground(8);
        let tau0 = 0.5 / l.superoperator().norm1();
        let k1 = convergence_order(&l, &rho0, 1, tau0, 4).unwrap();
        let k2 = convergence_order(&l, &rho0, 2, tau0, 4).unwrap();
        assert!((k1 - 2.0).abs() < 0.2, "{k1}");
        assert!((k2 - 3.0).abs() < 0.2, "{k2}");
    }

    #[test]
    fn trivial_residuals() {
        let l = build_liouvillian(&params()).unwrap();
        let rho0 = DensityMatrix::ground(8);
        assert_eq!(short_time_check(&l, &rho0, 0, 0.0).unwrap(), 0.0);
        let p = ModelParams {
            alpha: 0.0,
            gamma: 0.0,
            ..params()
        };
        let l = build_liouvillian(&p).unwrap();
        let rho0 = DensityMatrix::diagonal(&[0.5, 0.2, 0.1, 0.1, 0.05, 0.05, 0.0, 0.0]).unwrap();
        assert!(short_time_check(&l, &rho0, 1, 0.3).unwrap() < 1e-14);
    }
}
