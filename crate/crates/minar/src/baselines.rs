//! Univariate INAR(1) comparison models fitted by conditional maximum
//! likelihood, one independent model per component: Poisson innovations or
//! geometric innovations (support `{0, 1, 2, ...}`). Each component carries
//! two free parameters, so a fit to an N-variate series uses `2N`.

use crate::likelihood::binomial_log_pmf;
use crate::math::{ln_factorial, logsumexp, sigmoid};
use crate::process::CountSeries;
use crate::{Error, Result};

/// Baseline innovation family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineFamily {
    Poisson,
    Geometric,
}

impl std::fmt::Display for BaselineFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BaselineFamily::Poisson => "poisson-inar",
            BaselineFamily::Geometric => "geometric-inar",
        })
    }
}

/// Innovation log PMF; `theta` is the Poisson rate or the geometric success
/// probability.
pub fn innovation_log_pmf(family: BaselineFamily, r: u64, theta: f64) -> f64 {
    match family {
        BaselineFamily::Poisson => r as f64 * theta.ln() - theta - ln_factorial(r),
        BaselineFamily::Geometric => theta.ln() + r as f64 * (1.0 - theta).ln(),
    }
}

/// Log transition probability of a univariate INAR(1) step.
pub fn inar1_transition_log_pmf(
    family: BaselineFamily,
    x_prev: u64,
    x_curr: u64,
    alpha: f64,
    theta: f64,
) -> Result<f64> {
    check_theta(family, theta)?;
    let m = x_prev.min(x_curr);
    let terms: Vec<f64> = (0..=m)
        .map(|k| {
            Ok(binomial_log_pmf(x_prev, k, alpha)?
                + innovation_log_pmf(family, x_curr - k, theta))
        })
        .collect::<Result<_>>()?;
    Ok(logsumexp(&terms))
}

fn check_theta(family: BaselineFamily, theta: f64) -> Result<()> {
    let ok = match family {
        BaselineFamily::Poisson => theta > 0.0 && theta.is_finite(),
        BaselineFamily::Geometric => theta > 0.0 && theta < 1.0,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{family} innovation parameter {theta} out of range"
        )))
    }
}

/// Conditional log-likelihood of one component series.
pub fn inar1_log_likelihood(
    xs: &[u64],
    family: BaselineFamily,
    alpha: f64,
    theta: f64,
) -> Result<f64> {
    if xs.len() < 2 {
        return Err(Error::SeriesTooShort {
            min: 2,
            got: xs.len(),
        });
    }
    let mut total = 0.0;
    for w in xs.windows(2) {
        total += inar1_transition_log_pmf(family, w[0], w[1], alpha, theta)?;
    }
    Ok(total)
}

/// Estimates for one component.
#[derive(Debug, Clone)]
pub struct ComponentFit {
    pub alpha: f64,
    pub theta: f64,
    pub loglik: f64,
    pub converged: bool,
}

/// A baseline fitted independently to every component of a series.
#[derive(Debug, Clone)]
pub struct BaselineFit {
    pub family: BaselineFamily,
    pub components: Vec<ComponentFit>,
    /// Sum of the per-component conditional log-likelihoods.
    pub loglik: f64,
    /// Two per component.
    pub n_params: usize,
}

/// Fits the baseline by conditional maximum likelihood, component by
/// component, using a derivative-free simplex search on `(logit alpha,
/// transformed theta)`.
pub fn fit_baseline(series: &CountSeries, family: BaselineFamily) -> Result<BaselineFit> {
    if series.len() < 3 {
        return Err(Error::SeriesTooShort {
            min: 3,
            got: series.len(),
        });
    }
    let emp = crate::process::empirical_moments(series, 1)?;
    let mut components = Vec::with_capacity(series.dim());
    for s in 0..series.dim() {
        let xs: Vec<u64> = (0..series.len()).map(|t| series.row(t)[s]).collect();
        if emp.cov.get(s, s) <= 0.0 {
            return Err(Error::DegenerateSeries {
                component: s,
                reason: if emp.mean[s] == 0.0 {
                    "all zero"
                } else {
                    "constant"
                },
            });
        }
        let alpha0 = emp.lag1_autocorr(s).clamp(0.05, 0.95);
        let innov_mean = ((1.0 - alpha0) * emp.mean[s]).max(1e-3);
        let theta0 = match family {
            BaselineFamily::Poisson => innov_mean,
            BaselineFamily::Geometric => 1.0 / (1.0 + innov_mean),
        };
        let start = [logit(alpha0), transform_theta(family, theta0)];
        let objective = |v: &[f64]| {
            let alpha = sigmoid(v[0]);
            let theta = untransform_theta(family, v[1]);
            match inar1_log_likelihood(&xs, family, alpha, theta) {
                Ok(ll) => -ll,
                Err(_) => f64::INFINITY,
            }
        };
        let (best, neg_ll, converged) = nelder_mead(&objective, &start, 0.25, 1e-8, 2_000);
        components.push(ComponentFit {
            alpha: sigmoid(best[0]),
            theta: untransform_theta(family, best[1]),
            loglik: -neg_ll,
            converged,
        });
    }
    let loglik = components.iter().map(|c| c.loglik).sum();
    Ok(BaselineFit {
        family,
        n_params: 2 * components.len(),
        components,
        loglik,
    })
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

fn transform_theta(family: BaselineFamily, theta: f64) -> f64 {
    match family {
        BaselineFamily::Poisson => theta.ln(),
        BaselineFamily::Geometric => logit(theta),
    }
}

fn untransform_theta(family: BaselineFamily, v: f64) -> f64 {
    match family {
        BaselineFamily::Poisson => v.exp(),
        BaselineFamily::Geometric => sigmoid(v),
    }
}

/// Nelder-Mead simplex minimization. Convergence declares when the simplex
/// function values collapse within `tol` relative to the best value.
pub(crate) fn nelder_mead(
    f: &dyn Fn(&[f64]) -> f64,
    x0: &[f64],
    initial_step: f64,
    tol: f64,
    max_iter: usize,
) -> (Vec<f64>, f64, bool) {
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += initial_step;
        let fv = f(&v);
        simplex.push((v, fv));
    }

    let mut converged = false;
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        if (worst - best).abs() <= tol * (1.0 + best.abs()) {
            converged = true;
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|d| simplex[..n].iter().map(|(v, _)| v[d]).sum::<f64>() / n as f64)
            .collect();
        let blend = |a: f64| -> Vec<f64> {
            (0..n)
                .map(|d| centroid[d] + a * (simplex[n].0[d] - centroid[d]))
                .collect()
        };

        let reflected = blend(-1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = blend(-2.0);
            let fe = f(&expanded);
            simplex[n] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let contracted = if fr < simplex[n].1 {
                blend(-0.5)
            } else {
                blend(0.5)
            };
            let fc = f(&contracted);
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (contracted, fc);
            } else {
                // shrink toward the best vertex
                let anchor = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    for d in 0..n {
                        vertex.0[d] = anchor[d] + 0.5 * (vertex.0[d] - anchor[d]);
                    }
                    vertex.1 = f(&vertex.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, fx) = simplex.swap_remove(0);
    (x, fx, converged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMatrix;
    use crate::mixtures::{Family, MixtureParams};
    use crate::process::{simulate, ModelParams};
    use crate::thinning::ThinningMatrix;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::Distribution;

    #[test]
    fn transition_pmf_hand_computed() {
        // sum over k of Bin(k; 3, 0.4) * Pois(2 - k; 1)
        let mut expect = 0.0;
        let binom = [0.216, 3.0 * 0.4 * 0.36, 3.0 * 0.16 * 0.6];
        let e = (-1.0_f64).exp();
        let pois = [e, e, e / 2.0]; // Pois(0), Pois(1), Pois(2) at rate 1
        for k in 0..=2usize {
            expect += binom[k] * pois[2 - k];
        }
        let got = inar1_transition_log_pmf(BaselineFamily::Poisson, 3, 2, 0.4, 1.0).unwrap();
        assert_relative_eq!(got.exp(), expect, epsilon = 1e-12);
    }

    #[test]
    fn matches_degenerate_multivariate_kernels() {
        // a one-component mixture with vanishing latent variance collapses to
        // the corresponding univariate baseline
        let lam = 1.7_f64;
        let params = ModelParams::new(
            ThinningMatrix::new(vec![0.45]).unwrap(),
            MixtureParams::new(
                Family::PoissonLognormal,
                vec![lam.ln()],
                SymMatrix::diagonal(&[1e-10]),
            )
            .unwrap(),
        )
        .unwrap();
        let rule = params.innovations().quad_rule(5).unwrap();
        for (xp, xc) in [(3u64, 2u64), (0, 4), (5, 5)] {
            let multivariate =
                crate::likelihood::transition_log_pmf(&[xp], &[xc], &params, &rule).unwrap();
            let univariate =
                inar1_transition_log_pmf(BaselineFamily::Poisson, xp, xc, 0.45, lam).unwrap();
            assert_relative_eq!(multivariate, univariate, epsilon = 1e-6);
        }

        let pi = 0.35_f64;
        let params = ModelParams::new(
            ThinningMatrix::new(vec![0.45]).unwrap(),
            MixtureParams::new(
                Family::GeometricLogitnormal,
                vec![(pi / (1.0 - pi)).ln()],
                SymMatrix::diagonal(&[1e-10]),
            )
            .unwrap(),
        )
        .unwrap();
        let rule = params.innovations().quad_rule(5).unwrap();
        for (xp, xc) in [(3u64, 2u64), (1, 6)] {
            let multivariate =
                crate::likelihood::transition_log_pmf(&[xp], &[xc], &params, &rule).unwrap();
            let univariate =
                inar1_transition_log_pmf(BaselineFamily::Geometric, xp, xc, 0.45, pi).unwrap();
            assert_relative_eq!(multivariate, univariate, epsilon = 1e-6);
        }
    }

    #[test]
    fn nelder_mead_minimizes_shifted_quadratic() {
        let f = |v: &[f64]| (v[0] - 1.5).powi(2) + 3.0 * (v[1] + 0.5).powi(2) + 2.0;
        let (x, fx, converged) = nelder_mead(&f, &[0.0, 0.0], 0.5, 1e-12, 2_000);
        assert!(converged);
        assert_relative_eq!(x[0], 1.5, epsilon = 1e-4);
        assert_relative_eq!(x[1], -0.5, epsilon = 1e-4);
        assert_relative_eq!(fx, 2.0, epsilon = 1e-8);
    }

    fn simulate_univariate_inar(
        family: BaselineFamily,
        alpha: f64,
        theta: f64,
        t_len: usize,
        seed: u64,
    ) -> CountSeries {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let innov = |rng: &mut ChaCha8Rng| -> u64 {
            match family {
                BaselineFamily::Poisson => {
                    let d: f64 = rand_distr::Poisson::new(theta).unwrap().sample(rng);
                    d as u64
                }
                BaselineFamily::Geometric => {
                    rand_distr::Geometric::new(theta).unwrap().sample(rng)
                }
            }
        };
        let mut x = innov(&mut rng);
        let mut rows = Vec::with_capacity(t_len);
        for step in 0..200 + t_len {
            x = crate::thinning::thin(alpha, x, &mut rng).unwrap() + innov(&mut rng);
            if step >= 200 {
                rows.push(vec![x]);
            }
        }
        CountSeries::from_rows(&rows).unwrap()
    }

    #[test]
    fn recovers_poisson_truth() {
        let series = simulate_univariate_inar(BaselineFamily::Poisson, 0.4, 2.0, 2_000, 4242);
        let fit = fit_baseline(&series, BaselineFamily::Poisson).unwrap();
        assert!(fit.components[0].converged);
        assert!((fit.components[0].alpha - 0.4).abs() < 0.06);
        assert!((fit.components[0].theta - 2.0).abs() < 0.2);
        // the maximized likelihood cannot fall below the value at the truth
        let at_truth =
            inar1_log_likelihood(
                &(0..series.len()).map(|t| series.row(t)[0]).collect::<Vec<_>>(),
                BaselineFamily::Poisson,
                0.4,
                2.0,
            )
            .unwrap();
        assert!(fit.loglik >= at_truth - 1e-6);
        assert_eq!(fit.n_params, 2);
    }

    #[test]
    fn recovers_geometric_truth() {
        let series = simulate_univariate_inar(BaselineFamily::Geometric, 0.3, 0.4, 2_000, 777);
        let fit = fit_baseline(&series, BaselineFamily::Geometric).unwrap();
        assert!(fit.components[0].converged);
        assert!((fit.components[0].alpha - 0.3).abs() < 0.07);
        assert!((fit.components[0].theta - 0.4).abs() < 0.05);
    }

    #[test]
    fn multicomponent_fit_sums_loglik() {
        let truth = crate::scenarios::Scenario::parse("A2B1C1")
            .unwrap()
            .model_params(Family::PoissonLognormal)
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let series = simulate(&truth, 150, 300, &mut rng).unwrap();
        let fit = fit_baseline(&series, BaselineFamily::Poisson).unwrap();
        assert_eq!(fit.components.len(), 3);
        assert_eq!(fit.n_params, 6);
        let sum: f64 = fit.components.iter().map(|c| c.loglik).sum();
        assert_relative_eq!(fit.loglik, sum, epsilon = 1e-12);
    }
}
