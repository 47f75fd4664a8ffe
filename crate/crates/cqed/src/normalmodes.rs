//! Two-mode normal-mode analysis: exact symplectic (Bogoliubov)
//! diagonalization, perturbative dispersive shifts in and beyond the
//! rotating-wave approximation, and the resonant-regime closed forms.
//!
//! Conventions: `omega_a` is the first transition frequency of the
//! transmon; the linearized frequency `omega_a_bar = omega_a + E_C/hbar`
//! is what enters the quadratic form. Detunings follow
//! `Delta = omega_r - omega_a`, `Sigma = omega_a + omega_r`.

use nalgebra::{DMatrix, Matrix4};
use serde::{Deserialize, Serialize};

use crate::constants::angular;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TwoModeSystem {
    /// First transmon transition frequency [rad/s].
    pub omega_a: f64,
    /// Charging energy E_C/h [Hz].
    pub e_c_over_h: f64,
    /// Resonator frequency [rad/s].
    pub omega_r: f64,
    /// Linear coupling rate [rad/s].
    pub g: f64,
}

impl TwoModeSystem {
    pub fn new(omega_a: f64, e_c_over_h: f64, omega_r: f64, g: f64) -> Self {
        TwoModeSystem { omega_a, e_c_over_h, omega_r, g }
    }

    /// Constructs the system from the linearized atom frequency
    /// omega_a_bar = omega_a + E_C/hbar.
    pub fn from_linearized(omega_a_bar: f64, e_c_over_h: f64, omega_r: f64, g: f64) -> Self {
        TwoModeSystem {
            omega_a: omega_a_bar - angular(e_c_over_h),
            e_c_over_h,
            omega_r,
            g,
        }
    }

    /// Linearized atom frequency entering the quadratic Hamiltonian.
    pub fn omega_a_bar(&self) -> f64 {
        self.omega_a + angular(self.e_c_over_h)
    }

    /// E_C as an angular rate [rad/s].
    pub fn e_c_angular(&self) -> f64 {
        angular(self.e_c_over_h)
    }

    pub fn delta(&self) -> f64 {
        self.omega_r - self.omega_a
    }

    pub fn sigma(&self) -> f64 {
        self.omega_a + self.omega_r
    }
}

/// Which detuning enters the perturbative shift formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DeltaConvention {
    /// Delta and Sigma as printed in the shift equations.
    #[default]
    AsPrinted,
    /// Primed variants Delta' = Delta - E_C/hbar, Sigma' = Sigma + E_C/hbar.
    Primed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeTag {
    Rwa,
    BeyondRwa,
    ResonantLargeG,
    ResonantSmallG,
}

/// Normal-mode frequencies and Kerr coefficients of the coupled system.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DispersiveShifts {
    /// Dressed atom transition frequency [rad/s].
    pub omega_tilde_a: f64,
    /// Dressed resonator frequency [rad/s].
    pub omega_tilde_r: f64,
    /// Atom self-Kerr (anharmonicity) over h [Hz].
    pub a_a_over_h: f64,
    /// Resonator self-Kerr over h [Hz]; an O(g^4/Delta^4) estimate
    /// beyond the RWA.
    pub a_r_over_h: f64,
    /// Cross-Kerr over h [Hz].
    pub chi_over_h: f64,
    /// Normal-mode splitting omega_a - omega_tilde_a [rad/s].
    pub delta_nm: f64,
    pub regime: RegimeTag,
    /// Set when the requested regime's small parameter is not small.
    pub divergence_warning: bool,
}

/// Symplectic transformation F with F^T J F = J that maps the coupled
/// quadratic form onto two independent normal modes.
#[derive(Debug, Clone)]
pub struct SymplecticTransform {
    pub f: Matrix4<f64>,
    /// Raw normal-mode frequencies of the quadratic form [rad/s]; the
    /// atom entry carries the E_C offset of the linearized Hamiltonian.
    pub omega_tilde_a_lin: f64,
    pub omega_tilde_r: f64,
    /// Mode-mixing coefficients: block A (co-rotating) and B
    /// (counter-rotating) of F = [[A, B], [B, A]].
    pub block_a: [[f64; 2]; 2],
    pub block_b: [[f64; 2]; 2],
}

/// The symplectic form J for operator ordering (a, b, a_dag, b_dag).
pub fn symplectic_form() -> Matrix4<f64> {
    let mut j = Matrix4::zeros();
    j[(0, 2)] = 1.0;
    j[(1, 3)] = 1.0;
    j[(2, 0)] = -1.0;
    j[(3, 1)] = -1.0;
    j
}

/// Quadratic-form matrix of the coupled system in units of rad/s,
/// operator ordering (a, b, a_dag, b_dag).
pub fn hamiltonian_matrix(sys: &TwoModeSystem) -> Matrix4<f64> {
    let wa = sys.omega_a_bar();
    let wr = sys.omega_r;
    let g = sys.g;
    0.5 * Matrix4::new(
        0.0, g, wa, -g, //
        g, 0.0, -g, wr, //
        wa, -g, 0.0, g, //
        -g, wr, g, 0.0,
    )
}

/// Exact normal-mode frequencies of the quadratic form:
///
/// omega^2 = ( wa^2 + wr^2 +- sqrt((wa^2 - wr^2)^2 + 16 g^2 wa wr) ) / 2
///
/// with wa the linearized atom frequency. The root nearer the atom is
/// reported first; at resonance the + branch is the atom-like one.
pub fn exact_normal_frequencies_linearized(
    omega_a_bar: f64,
    omega_r: f64,
    g: f64,
) -> Result<(f64, f64)> {
    let wa2 = omega_a_bar * omega_a_bar;
    let wr2 = omega_r * omega_r;
    let radicand = (wa2 - wr2).powi(2) + 16.0 * g * g * omega_a_bar * omega_r;
    if radicand < 0.0 {
        return Err(Error::Instability(format!(
            "negative inner radicand {radicand:.3e}"
        )));
    }
    let root = radicand.sqrt();
    let plus2 = (wa2 + wr2 + root) / 2.0;
    let minus2 = (wa2 + wr2 - root) / 2.0;
    if minus2 < 0.0 {
        return Err(Error::Instability(format!(
            "coupling g = {g:.4e} rad/s exceeds the stability bound (1/2) sqrt(wa wr) = {:.4e}",
            0.5 * (omega_a_bar * omega_r).sqrt()
        )));
    }
    let plus = plus2.sqrt();
    let minus = minus2.sqrt();
    if omega_a_bar >= omega_r {
        Ok((plus, minus))
    } else {
        Ok((minus, plus))
    }
}

/// Exact normal-mode frequencies of a TwoModeSystem; the atom-like entry
/// is returned at the linearized level.
pub fn exact_normal_frequencies(sys: &TwoModeSystem) -> Result<(f64, f64)> {
    exact_normal_frequencies_linearized(sys.omega_a_bar(), sys.omega_r, sys.g)
}

fn nullspace_vector(m: &Matrix4<f64>) -> [f64; 4] {
    let dm = DMatrix::from_iterator(4, 4, m.iter().copied());
    let svd = dm.svd(true, true);
    let v_t = svd.v_t.unwrap();
    // right singular vector for the smallest singular value; nalgebra does
    // not sort them
    let mut min_idx = 0;
    for i in 1..4 {
        if svd.singular_values[i] < svd.singular_values[min_idx] {
            min_idx = i;
        }
    }
    let row = v_t.row(min_idx);
    [row[0], row[1], row[2], row[3]]
}

/// Builds the symplectic transformation by diagonalizing H J, normalizing
/// the eigenvector pairs so F^T J F = J, and fixing signs so F -> identity
/// as g -> 0.
pub fn symplectic_diagonalize(sys: &TwoModeSystem) -> Result<SymplecticTransform> {
    let (wt_a, wt_r) = exact_normal_frequencies(sys)?;
    let h = hamiltonian_matrix(sys);
    let j = symplectic_form();
    let hj = h * j;

    // H J eigenvalues come in pairs -omega/2, +omega/2; the -omega/2
    // eigenvector supplies the annihilation-side column, its half-swapped
    // copy is the +omega/2 partner.
    let mut columns = [[0.0; 4]; 4];
    for (slot, target) in [(0usize, wt_a), (1usize, wt_r)] {
        let lambda = -target / 2.0;
        let shifted = hj - Matrix4::identity() * lambda;
        let mut w = nullspace_vector(&shifted);
        // sign: diagonal component positive so F -> I at g -> 0
        if w[slot] < 0.0 {
            for x in w.iter_mut() {
                *x = -*x;
            }
        }
        let partner = [w[2], w[3], w[0], w[1]];
        // symplectic normalization over the pair
        let d = w[0] * partner[2] + w[1] * partner[3] - w[2] * partner[0] - w[3] * partner[1];
        if d <= 0.0 {
            return Err(Error::Instability(format!(
                "eigenvector pair has non-positive symplectic norm {d:.3e}"
            )));
        }
        let s = d.sqrt();
        columns[slot] = [w[0] / s, w[1] / s, w[2] / s, w[3] / s];
        columns[slot + 2] = [partner[0] / s, partner[1] / s, partner[2] / s, partner[3] / s];
    }

    let mut f = Matrix4::zeros();
    for (c, col) in columns.iter().enumerate() {
        for r in 0..4 {
            f[(r, c)] = col[r];
        }
    }

    let block_a = [[f[(0, 0)], f[(0, 1)]], [f[(1, 0)], f[(1, 1)]]];
    let block_b = [[f[(2, 0)], f[(2, 1)]], [f[(3, 0)], f[(3, 1)]]];

    Ok(SymplecticTransform {
        f,
        omega_tilde_a_lin: wt_a,
        omega_tilde_r: wt_r,
        block_a,
        block_b,
    })
}

impl SymplecticTransform {
    /// Frobenius norm of F^T J F - J; zero for an exact symplectic map.
    pub fn symplectic_defect(&self) -> f64 {
        let j = symplectic_form();
        (self.f.transpose() * j * self.f - j).norm()
    }

    /// Frobenius norm of F J F^T - J.
    pub fn symplectic_defect_transposed(&self) -> f64 {
        let j = symplectic_form();
        (self.f * j * self.f.transpose() - j).norm()
    }

    /// Residual coupling after transforming the quadratic form to the
    /// normal-mode variables eta = F^T v, v = -J F J eta: the
    /// mode-mixing entries of Lambda = F^-1 H F^-T, normalized.
    pub fn residual_coupling(&self, sys: &TwoModeSystem) -> f64 {
        let h = hamiltonian_matrix(sys);
        let j = symplectic_form();
        let f_inv = -j * self.f.transpose() * j;
        let transformed = f_inv * h * f_inv.transpose();
        let mut off = 0.0f64;
        // mode-mixing slots couple index 0/2 (atom) with 1/3 (resonator)
        for (r, c) in [(0, 1), (0, 3), (1, 2), (2, 3), (1, 0), (3, 0), (2, 1), (3, 2)] {
            off = off.max(transformed[(r, c)].abs());
        }
        off / sys.omega_a_bar()
    }
}

fn deltas(sys: &TwoModeSystem, convention: DeltaConvention) -> (f64, f64) {
    let ec = sys.e_c_angular();
    match convention {
        DeltaConvention::AsPrinted => (sys.delta(), sys.sigma()),
        DeltaConvention::Primed => (sys.delta() - ec, sys.sigma() + ec),
    }
}

/// Dispersive shifts to leading order in g/Delta within the RWA.
pub fn shifts_rwa(sys: &TwoModeSystem, convention: DeltaConvention) -> DispersiveShifts {
    let (delta, _) = deltas(sys, convention);
    let g = sys.g;
    let ec_hz = sys.e_c_over_h;
    let ec_w = sys.e_c_angular();
    let r = g / delta;
    let omega_tilde_a = sys.omega_a - g * g / delta - ec_w * r * r;
    let omega_tilde_r = sys.omega_r + g * g / delta + ec_w * r * r;
    DispersiveShifts {
        omega_tilde_a,
        omega_tilde_r,
        a_a_over_h: ec_hz * (1.0 - 2.0 * r * r),
        a_r_over_h: ec_hz * r.powi(4),
        chi_over_h: 2.0 * ec_hz * r * r,
        delta_nm: sys.omega_a - omega_tilde_a,
        regime: RegimeTag::Rwa,
        divergence_warning: (g / delta).abs() > 0.3,
    }
}

/// Dispersive shifts beyond the RWA, valid for g << |Delta| ~ Sigma.
/// The cross-Kerr scales as omega_r^2 here.
pub fn shifts_beyond_rwa(sys: &TwoModeSystem, convention: DeltaConvention) -> DispersiveShifts {
    let (delta, sigma) = deltas(sys, convention);
    let g2 = sys.g * sys.g;
    let wa = sys.omega_a;
    let wr = sys.omega_r;
    let ec_hz = sys.e_c_over_h;
    let ec_w = sys.e_c_angular();
    let ds = delta * sigma;
    let ds2 = ds * ds;
    let omega_tilde_a = wa - g2 * 2.0 * wr / ds - 4.0 * ec_w * g2 * wr * wa / ds2;
    let omega_tilde_r = wr + g2 * 2.0 * wa / ds + 4.0 * ec_w * g2 * wa * wa / ds2;
    let near_resonances = [delta.abs(), (3.0 * wa - wr).abs(), (wa - 3.0 * wr).abs()];
    DispersiveShifts {
        omega_tilde_a,
        omega_tilde_r,
        a_a_over_h: ec_hz * (1.0 - 4.0 * g2 * wr * (wa * wa + wr * wr) / (wa * ds2)),
        a_r_over_h: ec_hz * (g2 / (delta * delta)).powi(2),
        chi_over_h: 8.0 * ec_hz * g2 * wr * wr / ds2,
        delta_nm: wa - omega_tilde_a,
        regime: RegimeTag::BeyondRwa,
        divergence_warning: near_resonances.iter().any(|&x| sys.g > 0.3 * x),
    }
}

/// Resonant regime with E_C/hbar << g << omega: both hybridized modes get
/// anharmonicity E_C/4 and cross-Kerr E_C/2; frequencies
/// omega +- g - g^2/(2 omega).
pub fn resonant_large_g(sys: &TwoModeSystem) -> Result<DispersiveShifts> {
    let omega = sys.omega_a_bar();
    let ec_w = sys.e_c_angular();
    if ec_w / sys.g > 0.5 || sys.g / omega > 0.5 {
        return Err(Error::Regime(format!(
            "resonant large-g form needs E_C/hbar << g << omega; ratios {:.2}, {:.2}",
            ec_w / sys.g,
            sys.g / omega
        )));
    }
    let correction = sys.g * sys.g / (2.0 * omega);
    Ok(DispersiveShifts {
        omega_tilde_a: omega + sys.g - correction,
        omega_tilde_r: omega - sys.g - correction,
        a_a_over_h: sys.e_c_over_h / 4.0,
        a_r_over_h: sys.e_c_over_h / 4.0,
        chi_over_h: sys.e_c_over_h / 2.0,
        delta_nm: sys.g,
        regime: RegimeTag::ResonantLargeG,
        divergence_warning: false,
    })
}

/// One rung of the resonant Jaynes-Cummings ladder.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct JcDoublet {
    pub n: usize,
    /// Energy of |n,+> over h [Hz], ground state at zero.
    pub plus_hz: f64,
    /// Energy of |n,-> over h [Hz].
    pub minus_hz: f64,
}

/// Resonant regime with g << E_C/hbar << omega: the transmon truncates to
/// two levels and the ladder energies are n omega +- sqrt(n) g.
pub fn resonant_small_g(sys: &TwoModeSystem, n_max: usize) -> Vec<JcDoublet> {
    let omega_hz = crate::constants::ordinary(sys.omega_a);
    let g_hz = crate::constants::ordinary(sys.g);
    (1..=n_max)
        .map(|n| JcDoublet {
            n,
            plus_hz: n as f64 * omega_hz + (n as f64).sqrt() * g_hz,
            minus_hz: n as f64 * omega_hz - (n as f64).sqrt() * g_hz,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::angular;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn random_stable_system(rng: &mut impl Rng) -> TwoModeSystem {
        let wa_bar = angular(rng.random_range(0.5e9..10e9));
        let wr = angular(rng.random_range(0.05e9..10e9));
        let ec = rng.random_range(50e6..400e6);
        let ratio = rng.random_range(0.0..0.499);
        let g = ratio * (wa_bar * wr).sqrt();
        TwoModeSystem::from_linearized(wa_bar, ec, wr, g)
    }

    #[test]
    fn zero_coupling_identity() {
        let sys = TwoModeSystem::new(angular(6e9), 200e6, angular(0.2e9), 0.0);
        let (wa, wr) = exact_normal_frequencies(&sys).unwrap();
        assert_relative_eq!(wa, sys.omega_a_bar(), max_relative = 1e-13);
        assert_relative_eq!(wr, sys.omega_r, max_relative = 1e-13);
        let t = symplectic_diagonalize(&sys).unwrap();
        assert!((t.f - Matrix4::identity()).norm() < 1e-10);
    }

    #[test]
    fn thesis_rf_row_normal_mode_frequency() {
        // omega_a_bar/2pi = 6 GHz, omega_r/2pi = 0.2 GHz, g = 0.45 sqrt(wa wr):
        // resonator normal mode lands near 87 MHz
        let wa = angular(6e9);
        let wr = angular(0.2e9);
        let g = 0.45 * (wa * wr).sqrt();
        let (_, wt_r) = exact_normal_frequencies_linearized(wa, wr, g).unwrap();
        let f = wt_r / (2.0 * std::f64::consts::PI);
        assert!((f - 87e6).abs() < 2e6, "f = {f:.4e}");
    }

    #[test]
    fn resonant_expansion_of_exact_frequencies() {
        // at resonance, small g: omega +- g - g^2/(2 omega) to O(g^3/omega^2)
        let omega = angular(5e9);
        let g = angular(50e6);
        let (plus, minus) = exact_normal_frequencies_linearized(omega, omega, g).unwrap();
        let third_order = g.powi(3) / omega.powi(2);
        assert!((plus - (omega + g - g * g / (2.0 * omega))).abs() < 2.0 * third_order);
        assert!((minus - (omega - g - g * g / (2.0 * omega))).abs() < 2.0 * third_order);
    }

    #[test]
    fn instability_detected_beyond_bound() {
        let wa = angular(6e9);
        let wr = angular(0.2e9);
        let g = 0.501 * (wa * wr).sqrt();
        assert!(matches!(
            exact_normal_frequencies_linearized(wa, wr, g),
            Err(Error::Instability(_))
        ));
    }

    #[test]
    fn symplectic_property_over_random_systems() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..300 {
            let sys = random_stable_system(&mut rng);
            let t = symplectic_diagonalize(&sys).unwrap();
            assert!(t.symplectic_defect() < 1e-10, "defect {}", t.symplectic_defect());
            assert!(t.symplectic_defect_transposed() < 1e-10);
            // block structure
            assert_relative_eq!(t.f[(0, 0)], t.f[(2, 2)], epsilon = 1e-10);
            assert_relative_eq!(t.f[(1, 1)], t.f[(3, 3)], epsilon = 1e-10);
            assert_relative_eq!(t.f[(2, 0)], t.f[(0, 2)], epsilon = 1e-10);
            // Hamiltonian equivalence: residual mode-mixing vanishes
            assert!(t.residual_coupling(&sys) < 1e-9);
        }
    }

    #[test]
    fn symplectic_frequencies_match_hj_eigenvalues() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let sys = random_stable_system(&mut rng);
            let (wt_a, wt_r) = exact_normal_frequencies(&sys).unwrap();
            let hj = hamiltonian_matrix(&sys) * symplectic_form();
            let dm = DMatrix::from_iterator(4, 4, hj.iter().copied());
            let eig = dm.complex_eigenvalues();
            let mut mags: Vec<f64> = eig.iter().map(|c| 2.0 * c.norm()).collect();
            mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut expected = [wt_a, wt_a, wt_r, wt_r];
            expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (m, e) in mags.iter().zip(expected.iter()) {
                assert_relative_eq!(m, e, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn rwa_shift_limits() {
        let sys = TwoModeSystem::new(angular(6e9), 200e6, angular(4e9), 0.0);
        let s = shifts_rwa(&sys, DeltaConvention::AsPrinted);
        assert_relative_eq!(s.chi_over_h, 0.0);
        assert_relative_eq!(s.a_a_over_h, 200e6);
        assert_relative_eq!(s.omega_tilde_a, sys.omega_a);
    }

    #[test]
    fn rwa_kerr_product_identity() {
        // chi = 2 sqrt(A_a A_r) within 2 g^2/Delta^2 relative
        let sys = TwoModeSystem::new(angular(6e9), 250e6, angular(4.5e9), angular(80e6));
        let s = shifts_rwa(&sys, DeltaConvention::AsPrinted);
        let product = 2.0 * (s.a_a_over_h * s.a_r_over_h).sqrt();
        let r2 = (sys.g / sys.delta()).powi(2);
        assert!((s.chi_over_h - product).abs() / s.chi_over_h < 2.0 * r2);
    }

    #[test]
    fn rwa_koch_cross_check() {
        let sys = TwoModeSystem::new(angular(6e9), 200e6, angular(4.8e9), angular(60e6));
        let s = shifts_rwa(&sys, DeltaConvention::AsPrinted);
        let delta = sys.delta();
        let ec_w = sys.e_c_angular();
        let koch = 2.0 * sys.e_c_over_h * sys.g * sys.g / (delta * (delta - ec_w));
        let rel = ((s.chi_over_h - koch) / koch).abs();
        assert!(rel <= (ec_w / delta).abs() * 1.05, "rel {rel}");
    }

    #[test]
    fn beyond_rwa_reproduces_thesis_chi_values() {
        // table rows: chi(g-ratio 0.01) = 5.9 Hz, chi(0.2) = 2.38 kHz
        let wa = angular(6e9);
        let wr = angular(0.2e9);
        let sys = |ratio: f64| TwoModeSystem::new(wa, 200e6, wr, ratio * (wa * wr).sqrt());
        let chi1 = shifts_beyond_rwa(&sys(0.01), DeltaConvention::AsPrinted).chi_over_h;
        assert!((chi1 - 5.9).abs() / 5.9 < 0.02, "chi = {chi1}");
        let chi2 = shifts_beyond_rwa(&sys(0.2), DeltaConvention::AsPrinted).chi_over_h;
        assert!((chi2 - 2.38e3).abs() / 2.38e3 < 0.02, "chi = {chi2}");
    }

    #[test]
    fn beyond_rwa_approaches_rwa_at_small_detuning() {
        // Sigma >> |Delta|: chi -> 2 E_C g^2/Delta^2 within 4 |Delta|/Sigma
        let sys = TwoModeSystem::new(angular(6.0e9), 200e6, angular(5.6e9), angular(30e6));
        let b = shifts_beyond_rwa(&sys, DeltaConvention::AsPrinted);
        let r = shifts_rwa(&sys, DeltaConvention::AsPrinted);
        let rel = ((b.chi_over_h - r.chi_over_h) / r.chi_over_h).abs();
        assert!(rel < 4.0 * (sys.delta() / sys.sigma()).abs());
    }

    #[test]
    fn chi_monotone_in_resonator_frequency() {
        // beyond-RWA chi increases with omega_r^2 below omega_a/3
        let wa = angular(6e9);
        let g = angular(20e6);
        let mut last = 0.0;
        for k in 1..=10 {
            let wr = wa / 3.0 * (k as f64) / 11.0;
            let sys = TwoModeSystem::new(wa, 200e6, wr, g);
            let chi = shifts_beyond_rwa(&sys, DeltaConvention::AsPrinted).chi_over_h;
            assert!(chi > last, "chi not increasing at k={k}");
            last = chi;
        }
    }

    #[test]
    fn resonant_large_g_closed_forms() {
        let omega = angular(5e9);
        let g = 0.1 * omega;
        let sys = TwoModeSystem::from_linearized(omega, 200e6, omega, g);
        let s = resonant_large_g(&sys).unwrap();
        assert_relative_eq!(s.a_a_over_h, 50e6);
        assert_relative_eq!(s.chi_over_h, 100e6);
        // omega/2pi = 5 GHz, g/omega = 0.1: modes at 5 GHz +- 500 MHz - 25 MHz
        assert_relative_eq!(s.omega_tilde_a, angular(5e9 + 500e6 - 25e6), max_relative = 1e-12);
        assert_relative_eq!(s.omega_tilde_r, angular(5e9 - 500e6 - 25e6), max_relative = 1e-12);
    }

    #[test]
    fn resonant_large_g_regime_guard() {
        let omega = angular(5e9);
        let sys = TwoModeSystem::from_linearized(omega, 200e6, omega, angular(250e6));
        // E_C/hbar / g = 0.8 > 0.5
        assert!(matches!(resonant_large_g(&sys), Err(Error::Regime(_))));
    }

    #[test]
    fn jc_ladder_spacings() {
        let omega = angular(100e6);
        let g = angular(2e6);
        let sys = TwoModeSystem::new(omega, 50e6, omega, g);
        let ladder = resonant_small_g(&sys, 3);
        let g_hz = 2e6;
        // n = 1 splitting is 2 g
        assert_relative_eq!(ladder[0].plus_hz - ladder[0].minus_hz, 2.0 * g_hz, max_relative = 1e-12);
        // doublet spacing difference (sqrt(2)-1) g ~ g/2
        let spacing = (ladder[1].plus_hz - 100e6 * 2.0) - (ladder[0].plus_hz - 100e6);
        assert_relative_eq!(spacing, (2f64.sqrt() - 1.0) * g_hz, max_relative = 1e-12);
    }

    #[test]
    fn exact_frequencies_continuous_up_to_instability() {
        let wa = angular(3e9);
        let wr = angular(1e9);
        let bound = 0.5 * (wa * wr).sqrt();
        let mut last_r = wr;
        for k in 0..50 {
            let g = bound * (k as f64) / 50.0;
            let (_, wt_r) = exact_normal_frequencies_linearized(wa, wr, g).unwrap();
            assert!(
                wt_r <= last_r * (1.0 + 1e-12),
                "resonator branch should soften monotonically"
            );
            last_r = wt_r;
        }
    }
}

