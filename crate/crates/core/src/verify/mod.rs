//! Seeded randomized checks of the identities relating the Toda, Moser and
//! action-angle descriptions.
//!
//! Every check samples `trials` random states of dimension `n`, evaluates a
//! deviation per trial and reports the maximum against a tolerance taken
//! from [`ToleranceConfig`]. A failing numerical routine counts as an
//! infinite deviation. Setting [`CheckContext::corrupted`] feeds each check a
//! deliberately wrong input, which must make it fail.
//!
//! ```
//! use toda_duality::verify::{run_all, VerifyConfig};
//!
//! let config = VerifyConfig { suite: Some("brackets".into()), n: 3, trials: 5, ..VerifyConfig::default() };
//! let reports = run_all(&config).unwrap();
//! assert_eq!(reports.len(), 1);
//! assert!(reports[0].passed);
//! ```

pub mod forms;
pub mod sample;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::ToleranceConfig;
use crate::duality::{
    aa_to_toda, aa_to_toda_direct, aa_to_toda_gauge, dual_flow_exact, dual_flow_numeric, route_deviation,
    toda_flow_exact, toda_to_aa, w_from_angles, ActionAngleState,
};
use crate::error::{Error, Result};
use crate::gauge::{
    hankel, invariant_hamiltonians, minors_cauchy_binet, moment_map, moser_to_toda, toda_to_moser, BigPhasePoint,
    MoserState,
};
use crate::matlin::{leading_minors, shift_lower};
use crate::toda::{hamiltonian, verlet_flow, TodaState};
use forms::MoserCoordinate;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub n: usize,
    pub trials: usize,
    /// Infinite when a trial raised an error; written as `null`.
    #[serde(deserialize_with = "null_as_infinity")]
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub seed: u64,
    /// First numerical error met, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn null_as_infinity<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

impl CheckReport {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

#[derive(Debug, Clone)]
pub struct CheckContext {
    pub n: usize,
    pub seed: u64,
    pub trials: usize,
    pub tol: ToleranceConfig,
    pub corrupted: bool,
}

impl CheckContext {
    pub fn new(n: usize, seed: u64, trials: usize) -> Self {
        Self { n, seed, trials, tol: ToleranceConfig::default(), corrupted: false }
    }

    pub fn corrupt(mut self) -> Self {
        self.corrupted = true;
        self
    }

    fn run(&self, name: &str, tolerance: f64, mut trial: impl FnMut(&mut ChaCha8Rng) -> Result<f64>) -> CheckReport {
        let mut rng = sample::rng_for(self.seed, name);
        let mut max_deviation: f64 = 0.0;
        let mut error = None;
        for _ in 0..self.trials {
            match trial(&mut rng) {
                Ok(d) if d.is_nan() => max_deviation = f64::INFINITY,
                Ok(d) => max_deviation = max_deviation.max(d),
                Err(e) => {
                    max_deviation = f64::INFINITY;
                    error.get_or_insert_with(|| e.to_string());
                }
            }
        }
        CheckReport {
            name: name.to_string(),
            n: self.n,
            trials: self.trials,
            max_deviation,
            tolerance,
            passed: max_deviation <= tolerance,
            seed: self.seed,
            error,
        }
    }
}

fn relative(x: f64, reference: f64) -> f64 {
    (x - reference).abs() / reference.abs().max(f64::MIN_POSITIVE)
}

fn max_relative(x: &[f64], reference: &[f64]) -> f64 {
    x.iter().zip(reference).map(|(a, b)| relative(*a, *b)).fold(0.0, f64::max)
}

fn max_abs_diff(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

fn max_matrix_diff(x: &[Vec<f64>], y: &[Vec<f64>]) -> f64 {
    x.iter().zip(y).map(|(a, b)| max_abs_diff(a, b)).fold(0.0, f64::max)
}

fn nudge_qhat(a: &ActionAngleState, delta: f64, tol: &ToleranceConfig) -> Result<ActionAngleState> {
    let mut qhat = a.qhat().to_vec();
    qhat[0] += delta;
    ActionAngleState::new(a.phat().to_vec(), qhat, tol)
}

fn nudge_w(m: &MoserState, factor: f64, tol: &ToleranceConfig) -> Result<MoserState> {
    let mut w = m.w().to_vec();
    w[0] *= factor;
    MoserState::new(m.phat().to_vec(), w, tol)
}

fn nudge_toda(s: &TodaState, dq: f64, dp: f64) -> Result<TodaState> {
    let (mut q, mut p) = (s.q().to_vec(), s.p().to_vec());
    let last = q.len() - 1;
    q[last] += dq;
    p[0] += dp;
    TodaState::new(q, p)
}

/// Both gauge slices satisfy `Φ = (I₋, 0)`.
pub fn check_moment_constraint(ctx: &CheckContext) -> CheckReport {
    let (n, tol) = (ctx.n, &ctx.tol);
    ctx.run("moment_constraint", tol.moment_constraint, |rng| {
        let toda = BigPhasePoint::toda_slice(&sample::toda(rng, n), tol)?;
        let moser = BigPhasePoint::moser_slice(&sample::moser(rng, n, tol), tol)?;
        let mut target = shift_lower(n);
        let mut worst: f64 = 0.0;
        for mut pt in [toda, moser] {
            if ctx.corrupted {
                if n > 1 {
                    let bump = 0.1 * pt.g.max_abs().max(1.0);
                    pt.g[(n - 1, 0)] += bump;
                } else {
                    // the constraint is empty for n = 1; shift the target instead
                    target[(0, 0)] = 1e-3;
                }
            }
            let (lower, antisym) = moment_map(&pt, tol)?;
            worst = worst.max(lower.max_abs_diff(&target)).max(antisym.max_abs());
        }
        Ok(worst)
    })
}

/// `m_k(ΓᵀΓ) = Π_{j≤k} e^{q_{n+1−j}}` with `q` from the gauge transform.
pub fn check_minor_identity(ctx: &CheckContext) -> CheckReport {
    let (n, tol) = (ctx.n, &ctx.tol);
    ctx.run("minor_identity", tol.minor_identity, |rng| {
        let m = sample::moser(rng, n, tol);
        let s = moser_to_toda(&m, tol)?;
        let m = if ctx.corrupted { nudge_w(&m, 1.01, tol)? } else { m };
        let minors = minors_cauchy_binet(&m, tol)?;
        let expected: Vec<f64> = (1..=n).map(|k| (1..=k).map(|j| s.q()[n - j]).sum::<f64>().exp()).collect();
        Ok(max_relative(&minors, &expected))
    })
}

/// `σ_k(p̂, q̂) = m_k(ΓᵀΓ)` at `w = w(p̂, q̂)`.
pub fn check_sigma_minors(ctx: &CheckContext) -> CheckReport {
    let (n, tol) = (ctx.n, &ctx.tol);
    ctx.run("sigma_minors", tol.sigma_minors, |rng| {
        let a = sample::action_angle(rng, n, tol);
        let minors = minors_cauchy_binet(&w_from_angles(&a, tol)?, tol)?;
        let a = if ctx.corrupted { nudge_qhat(&a, 1e-3, tol)? } else { a };
        let sigmas = (1..=n).map(|k| crate::duality::sigma(&a, k, tol)).collect::<Result<Vec<_>>>()?;
        Ok(max_relative(&sigmas, &minors))
    })
}

/// Closed-form Cauchy–Binet minors agree with LU minors of the Hankel matrix.
pub fn check_cauchy_binet_lu(ctx: &CheckContext) -> CheckReport {
    let (n, tol) = (ctx.n, &ctx.tol);
    ctx.run("cauchy_binet_lu", tol.cauchy_binet_lu, |rng| {
        let m = sample::moser(rng, n, tol);
        let closed = minors_cauchy_binet(&m, tol)?;
        let m = if ctx.corrupted { nudge_w(&m, 1.01, tol)? } else { m };
        Ok(max_relative(&leading_minors(&hankel(&m)), &closed))
    })
}

/// Invariant Hamiltonians agree at gauge-equivalent points of the two slices.
pub fn check_gauge_invariance(ctx: &CheckContext) -> CheckReport {
    let (n, tol) = (ctx.n, &ctx.tol);
    ctx.run("gauge_invariance", tol.gauge_invariance, |rng| {
        let m = sample::moser(rng, n, tol);
        let s = moser_to_toda(&m, tol)?;
        let s = if ctx.corrupted { nudge_toda(&s, 1e-3, 0.0)? } else { s };
        let on_moser = invariant_hamiltonians(&BigPhasePoint::moser_slice(&m, tol)?, tol)?;
        let on_toda = invariant_hamiltonians(&BigPhasePoint::toda_slice(&s, tol)?, tol)?;
        Ok(max_relative(&on_toda, &on_moser))
    })
}

/// `H ∘ R = ½ Σ p̂²`.
pub fn check_free_form(ctx: &CheckContext) -> CheckReport {
    let (n, tol) = (ctx.n, &ctx.tol);
    ctx.run("free_form", tol.free_form, |rng| {
        let a = sample::action_angle(rng, n, tol);
        let s = aa_to_toda(&a, tol)?;
        let s = if ctx.corrupted { nudge_toda(&s, 0.0, 1e-3)? } else { s };
        let free = 0.5 * a.phat().iter().map(|x| x * x).sum::<f64>();
        Ok(relative(hamiltonian(&s, tol)?, free))
    })
}

/// Subset-sum and gauge evaluations of the map agree.
pub fn check_routes(ctx: &CheckContext) -> CheckReport {
    let (n, tol) = (ctx.n, &ctx.tol);
    ctx.run("routes", tol.route_agreement, |rng| {
        let a = sample::action_angle(rng, n, tol);
        let direct = aa_to_toda_direct(&a, tol)?;
        let a = if ctx.corrupted { nudge_qhat(&a, 1e-4, tol)? } else { a };
        Ok(route_deviation(&direct, &aa_to_toda_gauge(&a, tol)?))
    })
}

/// `R⁻¹∘R`, `R∘R⁻¹` and the two gauge transforms compose to the identity.
pub fn check_roundtrip(ctx: &CheckContext) -> CheckReport {
    let (n, tol) = (ctx.n, &ctx.tol);
    ctx.run("roundtrip", tol.roundtrip, |rng| {
        let a = sample::action_angle_with(rng, n, sample::MIN_GAP, sample::GAP_SPREAD, 3.0, tol);
        let s = sample::toda(rng, n);
        let m = sample::moser(rng, n, tol);
        let a_back = toda_to_aa(&aa_to_toda(&a, tol)?, tol)?;
        let a = if ctx.corrupted { nudge_qhat(&a, 1e-6, tol)? } else { a };
        let s_back = aa_to_toda(&toda_to_aa(&s, tol)?, tol)?;
        let s_gauge = moser_to_toda(&toda_to_moser(&s, tol)?, tol)?;
        let m_back = toda_to_moser(&moser_to_toda(&m, tol)?, tol)?;
        Ok(a.max_abs_diff(&a_back)
            .max(s.max_abs_diff(&s_back))
            .max(s.max_abs_diff(&s_gauge))
            .max(max_abs_diff(m.phat(), m_back.phat()))
            .max(max_abs_diff(m.w(), m_back.w())))
    })
}

/// Finite-difference exterior derivative of the pulled-back 1-form matches
/// the closed-form reduced symplectic form, in `(p̂, w)` and in `(p̂, q̂)`.
pub fn check_pullback_form(ctx: &CheckContext) -> CheckReport {
    let (n, tol) = (ctx.n, &ctx.tol);
    let h = tol.pullback_step;
    let w_factor = if ctx.corrupted { -1.9 } else { -2.0 };
    ctx.run("pullback_form", tol.pullback_form, |rng| {
        let a = sample::action_angle(rng, n, tol);
        let m = w_from_angles(&a, tol)?;
        let x: Vec<f64> = m.phat().iter().chain(m.w()).copied().collect();
        let routes = max_abs_diff(&forms::pullback_theta_logdet(&x, -2.0), &forms::pullback_theta_matrix(&x, tol)?);
        let f = forms::exterior_derivative(|x| Ok(forms::pullback_theta_logdet(x, w_factor)), &x, h)?;
        let moser = max_matrix_diff(&forms::to_log_w(&f, m.w()), &forms::expected_moser_form(m.phat()));
        let f_angles = forms::exterior_derivative(|y| forms::pullback_theta_angles(y, tol), &a.to_coords(), h)?;
        let angles = max_matrix_diff(&f_angles, &forms::canonical_matrix(n));
        Ok(routes.max(moser).max(angles))
    })
}

/// Brackets of the Moser variables induced by the canonical brackets on
/// `(p̂, q̂)`, relative to `max(1, |expected|)`.
pub fn check_brackets(ctx: &CheckContext) -> CheckReport {
    let (n, tol) = (ctx.n, &ctx.tol);
    let sign = if ctx.corrupted { -1.0 } else { 1.0 };
    ctx.run("brackets", tol.brackets, |rng| {
        let a = sample::action_angle(rng, n, tol);
        let m = w_from_angles(&a, tol)?;
        let coords: Vec<MoserCoordinate> =
            (0..n).map(MoserCoordinate::Phat).chain((0..n).map(MoserCoordinate::W)).collect();
        let mut worst: f64 = 0.0;
        for &f in &coords {
            for &g in &coords {
                let got = forms::moser_bracket(f, g, m.phat(), m.w(), sign);
                let want = forms::expected_bracket(f, g, m.phat(), m.w());
                worst = worst.max((got - want).abs() / want.abs().max(1.0));
            }
        }
        Ok(worst)
    })
}

/// `Jᵀ Ω J = Ω̂` for the finite-difference Jacobian of the map.
pub fn check_symplectomorphism(ctx: &CheckContext) -> CheckReport {
    let (n, tol) = (ctx.n, &ctx.tol);
    let h = tol.symplectomorphism_step;
    ctx.run("symplectomorphism", tol.symplectomorphism, |rng| {
        let a = sample::action_angle(rng, n, tol);
        if ctx.corrupted {
            let scaled = |a: &ActionAngleState| {
                let s = aa_to_toda(a, tol)?;
                TodaState::new(s.q().to_vec(), s.p().iter().map(|p| 1.01 * p).collect())
            };
            forms::symplectic_defect_of(scaled, &a, h, tol)
        } else {
            forms::symplectic_defect(&a, h, tol)
        }
    })
}

/// Exact Toda flow against Störmer–Verlet.
pub fn check_flow_toda(ctx: &CheckContext) -> CheckReport {
    let (n, tol) = (ctx.n, &ctx.tol);
    let (t, dt) = (tol.flow_time, tol.flow_step);
    let t_exact = if ctx.corrupted { 1.001 * t } else { t };
    ctx.run("flow_toda", tol.flow_toda, |rng| {
        let s = sample::toda(rng, n);
        let exact = toda_flow_exact(&s, t_exact, tol)?;
        Ok(exact.max_abs_diff(verlet_flow(&s, t, dt, tol)?.last()))
    })
}

/// Exact dual flow against implicit midpoint.
pub fn check_flow_dual(ctx: &CheckContext) -> CheckReport {
    let (n, tol) = (ctx.n, &ctx.tol);
    let (t, dt) = (tol.dual_flow_time, tol.dual_flow_step);
    ctx.run("flow_dual", tol.flow_dual, |rng| {
        let a = sample::action_angle_below(rng, n, tol.dual_flow_energy, tol)?;
        let exact = if ctx.corrupted {
            // drift of the wrong sign
            let s = aa_to_toda(&a, tol)?;
            let mut p = s.p().to_vec();
            p[n - 1] += t * s.q()[n - 1].exp();
            toda_to_aa(&TodaState::new(s.q().to_vec(), p)?, tol)?
        } else {
            dual_flow_exact(&a, t, tol)?
        };
        Ok(exact.max_abs_diff(dual_flow_numeric(&a, t, dt, tol)?.last()))
    })
}

/// The dual flow leaves every `q_k` fixed.
pub fn check_dual_actions(ctx: &CheckContext) -> CheckReport {
    let (n, tol) = (ctx.n, &ctx.tol);
    let t = tol.dual_flow_time;
    ctx.run("dual_actions", tol.dual_actions, |rng| {
        let a = sample::action_angle(rng, n, tol);
        let q0 = aa_to_toda(&a, tol)?.q().to_vec();
        let mut worst: f64 = 0.0;
        for fraction in [0.25, 0.5, 1.0] {
            let b = if ctx.corrupted {
                aa_to_toda(&a, tol)
                    .and_then(|s| toda_flow_exact(&s, fraction * t, tol))
                    .and_then(|s| toda_to_aa(&s, tol))?
            } else {
                dual_flow_exact(&a, fraction * t, tol)?
            };
            worst = worst.max(max_abs_diff(aa_to_toda(&b, tol)?.q(), &q0));
        }
        Ok(worst)
    })
}

/// `flow_toda`, `flow_dual` and `dual_actions`.
pub fn check_flow_conjugacy(ctx: &CheckContext) -> Vec<CheckReport> {
    vec![check_flow_toda(ctx), check_flow_dual(ctx), check_dual_actions(ctx)]
}

/// Momenta after a long Verlet run approach `−p̂`.
pub fn check_scattering(ctx: &CheckContext) -> CheckReport {
    let (n, tol) = (ctx.n, &ctx.tol);
    ctx.run("scattering", tol.scattering, |rng| {
        let a = sample::action_angle_with(rng, n, 0.5, 0.5, sample::COORD_BOUND, tol);
        let s = aa_to_toda(&a, tol)?;
        let s = if ctx.corrupted { nudge_toda(&s, 0.0, 0.05)? } else { s };
        let end = verlet_flow(&s, tol.scattering_time, tol.scattering_step, tol)?;
        let minus_phat: Vec<f64> = a.phat().iter().map(|x| -x).collect();
        Ok(max_abs_diff(end.last().p(), &minus_phat))
    })
}

/// A registered check and the suite it belongs to.
pub struct Check {
    pub name: &'static str,
    pub suite: &'static str,
    pub run: fn(&CheckContext) -> CheckReport,
}

pub const CHECKS: &[Check] = &[
    Check { name: "moment_constraint", suite: "moment", run: check_moment_constraint },
    Check { name: "minor_identity", suite: "minors", run: check_minor_identity },
    Check { name: "sigma_minors", suite: "minors", run: check_sigma_minors },
    Check { name: "cauchy_binet_lu", suite: "minors", run: check_cauchy_binet_lu },
    Check { name: "gauge_invariance", suite: "minors", run: check_gauge_invariance },
    Check { name: "free_form", suite: "map", run: check_free_form },
    Check { name: "routes", suite: "map", run: check_routes },
    Check { name: "roundtrip", suite: "map", run: check_roundtrip },
    Check { name: "pullback_form", suite: "pullback", run: check_pullback_form },
    Check { name: "brackets", suite: "brackets", run: check_brackets },
    Check { name: "symplectomorphism", suite: "symplectomorphism", run: check_symplectomorphism },
    Check { name: "flow_toda", suite: "flow", run: check_flow_toda },
    Check { name: "flow_dual", suite: "flow", run: check_flow_dual },
    Check { name: "dual_actions", suite: "flow", run: check_dual_actions },
    Check { name: "scattering", suite: "scattering", run: check_scattering },
];

/// Suite names accepted by [`run_all`], besides `"all"`.
pub fn suites() -> Vec<&'static str> {
    let mut names: Vec<&str> = Vec::new();
    for c in CHECKS {
        if !names.contains(&c.suite) {
            names.push(c.suite);
        }
    }
    names
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    /// `None` or `"all"` runs everything; otherwise a suite or check name.
    pub suite: Option<String>,
    pub n: usize,
    pub seed: u64,
    pub trials: usize,
    pub tol: ToleranceConfig,
    pub corrupted: bool,
    /// Run checks on separate threads.
    pub parallel: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            suite: None,
            n: 4,
            seed: 7,
            trials: 20,
            tol: ToleranceConfig::default(),
            corrupted: false,
            parallel: true,
        }
    }
}

pub fn select(suite: Option<&str>) -> Result<Vec<&'static Check>> {
    let chosen: Vec<&Check> = match suite {
        None | Some("all") => CHECKS.iter().collect(),
        Some(s) => CHECKS.iter().filter(|c| c.suite == s || c.name == s).collect(),
    };
    if chosen.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "unknown suite {:?}; expected all, {}",
            suite.unwrap_or_default(),
            suites().join(", ")
        )));
    }
    Ok(chosen)
}

/// Runs the selected checks; the order of the reports follows [`CHECKS`]
/// regardless of threading.
pub fn run_all(config: &VerifyConfig) -> Result<Vec<CheckReport>> {
    if config.n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    config.tol.validate()?;
    let checks = select(config.suite.as_deref())?;
    let ctx = CheckContext {
        n: config.n,
        seed: config.seed,
        trials: config.trials,
        tol: config.tol.clone(),
        corrupted: config.corrupted,
    };
    if !config.parallel {
        return Ok(checks.iter().map(|c| (c.run)(&ctx)).collect());
    }
    Ok(std::thread::scope(|scope| {
        let handles: Vec<_> = checks.iter().map(|c| scope.spawn(|| (c.run)(&ctx))).collect();
        handles.into_iter().map(|h| h.join().expect("check thread panicked")).collect()
    }))
}
