//! RFcQED design calculator: derived quantities for a circuit design
//! point, a grid-plus-simplex parameter search against target dressed
//! frequencies and cross-Kerr, and thermal-occupation helpers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{angular, ordinary, E_CHARGE, H, K_B, PHI_0_REDUCED};
use crate::error::{Error, Result};
use crate::normalmodes::{
    exact_normal_frequencies_linearized, shifts_beyond_rwa, DeltaConvention, TwoModeSystem,
};
use crate::optimize::nelder_mead;

/// Validity of the dispersive-shift formulas at a design point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DispersiveValidity {
    Dispersive,
    /// g is comparable to or above |Delta|: the perturbative cross-Kerr
    /// is only a lower bound.
    DispersiveBreakdown,
}

/// A candidate circuit realization with its derived quantities.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DesignPoint {
    pub c_a: f64,
    pub c_c: f64,
    pub c_r: f64,
    pub l_j: f64,
    pub l_r: f64,
    pub derived: Option<DerivedQuantities>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DerivedQuantities {
    /// Linearized transmon frequency [rad/s].
    pub omega_a: f64,
    /// Bare resonator frequency [rad/s].
    pub omega_r: f64,
    /// Coupling rate [rad/s].
    pub g: f64,
    /// Coupling ratio g / sqrt(omega_a omega_r).
    pub g_ratio: f64,
    /// Charging energy E_C/h [Hz].
    pub e_c_over_h: f64,
    /// Exact normal-mode frequencies [rad/s].
    pub omega_tilde_a: f64,
    pub omega_tilde_r: f64,
    /// Beyond-RWA cross-Kerr chi/h [Hz]; a lower bound when flagged.
    pub chi_over_h: f64,
    pub validity: DispersiveValidity,
}

/// Derived quantities directly from (linearized) frequencies, coupling
/// and charging energy; this is the table-style evaluation where the
/// quoted atom frequency feeds both the normal-mode closed form and the
/// beyond-RWA cross-Kerr.
pub fn evaluate_frequencies(
    omega_a: f64,
    omega_r: f64,
    g: f64,
    e_c_over_h: f64,
) -> Result<DerivedQuantities> {
    let (omega_tilde_a, omega_tilde_r) = exact_normal_frequencies_linearized(omega_a, omega_r, g)?;
    let sys = TwoModeSystem::new(omega_a, e_c_over_h, omega_r, g);
    let chi = shifts_beyond_rwa(&sys, DeltaConvention::AsPrinted).chi_over_h;
    let delta = (omega_r - omega_a).abs();
    let validity = if g >= delta {
        DispersiveValidity::DispersiveBreakdown
    } else {
        DispersiveValidity::Dispersive
    };
    Ok(DerivedQuantities {
        omega_a,
        omega_r,
        g,
        g_ratio: g / (omega_a * omega_r).sqrt(),
        e_c_over_h,
        omega_tilde_a,
        omega_tilde_r,
        chi_over_h: chi,
        validity,
    })
}

/// Exact single-mode circuit relations for a capacitance-defined point:
/// effective capacitances of the M = 1 network, frequencies from
/// 1/sqrt(L C~) and the closed-form coupling.
pub fn evaluate_design(dp: &DesignPoint) -> Result<DerivedQuantities> {
    let (c_a, c_c, c_r) = (dp.c_a, dp.c_c, dp.c_r);
    for (name, v) in [("C_a", c_a), ("C_c", c_c), ("C_r", c_r), ("L_J", dp.l_j), ("L_r", dp.l_r)] {
        if !(v > 0.0) {
            return Err(Error::Value {
                line: 0,
                message: format!("{name} must be positive, got {v}"),
            });
        }
    }
    // M = 1 effective capacitances (same algebra as the quantizer)
    let denom = c_c * c_a + c_r * (c_c + c_a);
    let c_tilde_a = denom / (c_r + c_c);
    let c_tilde_r = denom / (c_c + c_a);
    let omega_a = 1.0 / (dp.l_j * c_tilde_a).sqrt();
    let omega_r = 1.0 / (dp.l_r * c_tilde_r).sqrt();
    let g = 0.5 * (omega_a * omega_r / ((1.0 + c_a / c_c) * (1.0 + c_r / c_c))).sqrt();
    let e_c_over_h = E_CHARGE * E_CHARGE / (2.0 * c_tilde_a * H);
    evaluate_frequencies(omega_a, omega_r, g, e_c_over_h)
}

/// Back-solves a symmetric-capacitance realization from frequencies, the
/// coupling ratio and the charging energy. Exact inverse of
/// `evaluate_design` for the M = 1 relations.
pub fn point_from_frequencies(
    omega_a: f64,
    omega_r: f64,
    g_ratio: f64,
    e_c_over_h: f64,
) -> Result<DesignPoint> {
    if !(0.0 < g_ratio && g_ratio < 0.5) {
        return Err(Error::Instability(format!(
            "coupling ratio must lie in (0, 1/2), got {g_ratio}"
        )));
    }
    let c_tilde_a = E_CHARGE * E_CHARGE / (2.0 * e_c_over_h * H);
    // symmetric split C_a = C_r = x, C_c = x / rho with
    // rho = 1/(2 r) - 1 so the coupling ratio comes out exactly
    let rho = 1.0 / (2.0 * g_ratio) - 1.0;
    let x = c_tilde_a * (1.0 + rho) / (2.0 + rho);
    let c_c = x / rho;
    let l_j = 1.0 / (omega_a * omega_a * c_tilde_a);
    // symmetric split gives C~_r = C~_a
    let l_r = 1.0 / (omega_r * omega_r * c_tilde_a);
    Ok(DesignPoint {
        c_a: x,
        c_c,
        c_r: x,
        l_j,
        l_r,
        derived: None,
    })
}

/// Bose-Einstein occupation of a mode at frequency f [Hz] and temperature
/// T [K].
pub fn thermal_occupation(f_hz: f64, t_kelvin: f64) -> f64 {
    1.0 / (H * f_hz / (K_B * t_kelvin)).exp_m1()
}

/// Design targets for the parameter search.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DesignTarget {
    /// Target (linearized) transmon frequency [Hz].
    pub omega_a_hz: f64,
    /// Target dressed resonator frequency [Hz].
    pub omega_r_tilde_hz: f64,
    /// Minimum acceptable cross-Kerr [Hz].
    pub chi_min_hz: f64,
    /// Transmon decoherence rate [Hz]; ranking is by chi/gamma.
    pub gamma_hz: f64,
    /// Charging energy target E_C/h [Hz].
    pub e_c_over_h: f64,
}

/// Log-space bounds per design variable, in (C_a, C_c, C_r, L_J, L_r)
/// order.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SearchBounds {
    pub c_a: (f64, f64),
    pub c_c: (f64, f64),
    pub c_r: (f64, f64),
    pub l_j: (f64, f64),
    pub l_r: (f64, f64),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Grid resolution per decade per dimension.
    pub points_per_decade: usize,
    /// Candidates refined by the simplex stage.
    pub refine_top: usize,
    /// Relative tolerance on the dressed resonator frequency.
    pub omega_r_tol: f64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            points_per_decade: 8,
            refine_top: 16,
            omega_r_tol: 0.02,
            seed: 0,
        }
    }
}

/// Transmon-regime ceiling E_C/E_J <= 1/20.
fn transmon_regime_ok(dp: &DesignPoint, derived: &DerivedQuantities) -> bool {
    let e_j_over_h = PHI_0_REDUCED.powi(2) / dp.l_j / H;
    derived.e_c_over_h / e_j_over_h <= 1.0 / 20.0 + 1e-12
}

fn feasibility_margin(target: &DesignTarget, derived: &DerivedQuantities) -> f64 {
    derived.chi_over_h / target.gamma_hz
}

fn meets_target(
    target: &DesignTarget,
    dp: &DesignPoint,
    derived: &DerivedQuantities,
    tol: f64,
) -> bool {
    let wr_ok = (ordinary(derived.omega_tilde_r) - target.omega_r_tilde_hz).abs()
        <= tol * target.omega_r_tilde_hz;
    let wa_ok = (ordinary(derived.omega_a) - target.omega_a_hz).abs() <= tol * target.omega_a_hz;
    wr_ok
        && wa_ok
        && derived.chi_over_h >= target.chi_min_hz
        && derived.validity == DispersiveValidity::Dispersive
        && transmon_regime_ok(dp, derived)
}

fn penalty_objective(target: &DesignTarget, tol: f64, logs: &[f64]) -> f64 {
    let dp = DesignPoint {
        c_a: logs[0].exp(),
        c_c: logs[1].exp(),
        c_r: logs[2].exp(),
        l_j: logs[3].exp(),
        l_r: logs[4].exp(),
        derived: None,
    };
    let derived = match evaluate_design(&dp) {
        Ok(d) => d,
        Err(_) => return 1e12,
    };
    let wr_err = ((ordinary(derived.omega_tilde_r) - target.omega_r_tilde_hz)
        / target.omega_r_tilde_hz)
        .abs();
    let wa_err = ((ordinary(derived.omega_a) - target.omega_a_hz) / target.omega_a_hz).abs();
    let chi_deficit = ((target.chi_min_hz - derived.chi_over_h) / target.chi_min_hz).max(0.0);
    let breakdown = if derived.validity == DispersiveValidity::Dispersive { 0.0 } else { 1.0 };
    let transmon = if transmon_regime_ok(&dp, &derived) { 0.0 } else { 1.0 };
    let margin = feasibility_margin(target, &derived);
    // reward margin once constraints hold; constraints enter quadratically
    1e4 * ((wr_err / tol).max(1.0) - 1.0).powi(2)
        + 1e4 * ((wa_err / tol).max(1.0) - 1.0).powi(2)
        + 1e6 * chi_deficit * chi_deficit
        + 1e8 * (breakdown + transmon)
        - margin.ln_1p()
}

/// Grid scan plus Nelder-Mead refinement over (C_a, C_c, C_r, L_J, L_r).
/// Returns feasible points ranked by chi/gamma margin, deterministic for
/// a given seed and grid spec.
pub fn search(
    target: &DesignTarget,
    bounds: &SearchBounds,
    config: &SearchConfig,
) -> Result<Vec<DesignPoint>> {
    let axes: Vec<Vec<f64>> = [bounds.c_a, bounds.c_c, bounds.c_r, bounds.l_j, bounds.l_r]
        .iter()
        .map(|&(lo, hi)| {
            if !(lo > 0.0 && hi > lo) {
                return Vec::new();
            }
            let decades = (hi / lo).log10();
            let n = ((decades * config.points_per_decade as f64).ceil() as usize).max(1) + 1;
            (0..n)
                .map(|i| lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64)
                .collect()
        })
        .collect();
    if axes.iter().any(|a| a.is_empty()) {
        return Err(Error::Usage("search bounds must be positive with hi > lo".into()));
    }

    // coarse grid scan
    let mut grid: Vec<Vec<f64>> = vec![vec![]];
    for axis in &axes {
        let mut next = Vec::with_capacity(grid.len() * axis.len());
        for point in &grid {
            for &v in axis {
                let mut p = point.clone();
                p.push(v);
                next.push(p);
            }
        }
        grid = next;
    }

    let mut scored: Vec<(f64, Vec<f64>)> = grid
        .into_par_iter()
        .map(|logs| (penalty_objective(target, config.omega_r_tol, &logs), logs))
        .collect();
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    scored.truncate(config.refine_top.max(1));

    // simplex refinement with seeded jitter, clamped back to the box
    let lo_hi: Vec<(f64, f64)> = [bounds.c_a, bounds.c_c, bounds.c_r, bounds.l_j, bounds.l_r]
        .iter()
        .map(|&(lo, hi)| (lo.ln(), hi.ln()))
        .collect();
    let clamp = |logs: &mut Vec<f64>| {
        for (v, &(lo, hi)) in logs.iter_mut().zip(&lo_hi) {
            *v = v.clamp(lo, hi);
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    for (_, logs) in &scored {
        candidates.push(logs.clone());
        let mut start = logs.clone();
        for v in start.iter_mut() {
            *v += rng.random_range(-0.01..0.01);
        }
        clamp(&mut start);
        let mut refined = nelder_mead(
            |x| penalty_objective(target, config.omega_r_tol, x),
            &start,
            0.05,
            600,
            1e-12,
        )
        .x;
        clamp(&mut refined);
        candidates.push(refined);
    }

    let mut results: Vec<(f64, DesignPoint)> = Vec::new();
    for logs in candidates {
        let mut dp = DesignPoint {
            c_a: logs[0].exp(),
            c_c: logs[1].exp(),
            c_r: logs[2].exp(),
            l_j: logs[3].exp(),
            l_r: logs[4].exp(),
            derived: None,
        };
        if let Ok(derived) = evaluate_design(&dp) {
            if meets_target(target, &dp, &derived, config.omega_r_tol) {
                let margin = feasibility_margin(target, &derived);
                dp.derived = Some(derived);
                results.push((margin, dp));
            }
        }
    }
    if results.is_empty() {
        // report the best margin found anyway
        let best = scored
            .first()
            .map(|(_, logs)| {
                let dp = DesignPoint {
                    c_a: logs[0].exp(),
                    c_c: logs[1].exp(),
                    c_r: logs[2].exp(),
                    l_j: logs[3].exp(),
                    l_r: logs[4].exp(),
                    derived: None,
                };
                evaluate_design(&dp)
                    .map(|d| feasibility_margin(target, &d))
                    .unwrap_or(0.0)
            })
            .unwrap_or(0.0);
        return Err(Error::NoFeasiblePoint { best_margin: best });
    }
    results.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    // deduplicate near-identical optima
    let mut out: Vec<DesignPoint> = Vec::new();
    for (_, dp) in results {
        let dup = out.iter().any(|p| {
            (p.c_a / dp.c_a).ln().abs() < 1e-3
                && (p.c_c / dp.c_c).ln().abs() < 1e-3
                && (p.l_r / dp.l_r).ln().abs() < 1e-3
        });
        if !dup {
            out.push(dp);
        }
    }
    Ok(out)
}
