//! Circuit quantization: capacitance matrix, effective capacitances,
//! zero-point fluctuations, mode frequencies, transmon parameters and
//! coupling rates, plus the Cooper-pair box diagonalized in the charge
//! basis.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::circuit::ReducedCircuit;
use crate::constants::{E_CHARGE, H, HBAR, PHI_0_REDUCED};
use crate::error::{Error, Result};
use crate::linalg::{eigh, fix_phases};

/// Symmetric capacitance matrix, transmon node first, then modes 0..M-1.
#[derive(Debug, Clone)]
pub struct CapacitanceMatrix {
    pub matrix: DMatrix<f64>,
}

/// All Hamiltonian coefficients of the multimode transmon-resonator
/// circuit. Frequencies are angular [rad/s], energies are E/h [Hz],
/// charges in coulombs, fluxes in webers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuantizedSystem {
    pub c_tilde_r: f64,
    pub c_tilde_a: f64,
    pub c_tilde_c: f64,
    /// Mode frequencies omega_m = (2m+1)/sqrt(L_0 C~_r).
    pub omega_m: Vec<f64>,
    /// Per-mode charge zero-point fluctuation.
    pub q_zpf_m: Vec<f64>,
    /// Transmon charge zero-point fluctuation (at zero flux).
    pub q_zpf_a: f64,
    /// Transmon flux zero-point fluctuation (at zero flux).
    pub phi_zpf_a: f64,
    /// Charging energy E_C/h.
    pub e_c_over_h: f64,
    /// Linearized transmon frequency 1/sqrt(L_J C~_a) at zero flux.
    pub omega_a_bar: f64,
    /// Transmon-mode couplings g_m [rad/s].
    pub g_m: Vec<f64>,
    /// Mode-mode couplings G_{m,m'} [rad/s]; the Hamiltonian carries
    /// hbar G_{m,m'} p_m p_m' with p = -i(b - b^dag). Negative by sign
    /// of the inverse capacitance matrix.
    pub g_mode_mode: Vec<Vec<f64>>,
    /// Charge-basis coupling prefactors 2e q_zpf,m C~_c/(C_a C_r) / h [Hz];
    /// multiply by the transmon charge matrix element to get g_{m,i,j}.
    pub charge_coupling_hz: Vec<f64>,
}

/// Builds the (M+1) x (M+1) capacitance matrix: first row C_a + C_c then
/// -C_c; mode block C_r + C_c on the diagonal and +C_c off-diagonal.
pub fn build_capacitance_matrix(rc: &ReducedCircuit, modes: usize) -> CapacitanceMatrix {
    assert!(modes >= 1);
    let n = modes + 1;
    let mut m = DMatrix::zeros(n, n);
    m[(0, 0)] = rc.c_a + rc.c_c;
    for i in 1..n {
        m[(0, i)] = -rc.c_c;
        m[(i, 0)] = -rc.c_c;
        for j in 1..n {
            m[(i, j)] = if i == j { rc.c_r + rc.c_c } else { rc.c_c };
        }
    }
    CapacitanceMatrix { matrix: m }
}

impl CapacitanceMatrix {
    pub fn inverse(&self) -> Result<DMatrix<f64>> {
        self.matrix
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Topology("singular capacitance matrix".into()))
    }
}

/// Closed-form effective capacitances from the printed inverse.
pub fn effective_capacitances(rc: &ReducedCircuit, modes: usize) -> (f64, f64, f64) {
    let m = modes as f64;
    let (ca, cc, cr) = (rc.c_a, rc.c_c, rc.c_r);
    let denom_common = m * cc * ca + cr * (cc + ca);
    let c_tilde_r = cr * denom_common / ((m - 1.0) * cc * ca + cr * (cc + ca));
    let c_tilde_a = cr * denom_common / (cr * cr + m * cr * cc);
    let c_tilde_c = ca * cr * cc / denom_common;
    (c_tilde_r, c_tilde_a, c_tilde_c)
}

/// Evaluates every Hamiltonian coefficient of the M-mode circuit.
pub fn quantize(rc: &ReducedCircuit, modes: usize) -> Result<QuantizedSystem> {
    let cm = build_capacitance_matrix(rc, modes);
    let inv = cm.inverse()?;
    let (c_tilde_r, c_tilde_a, c_tilde_c) = effective_capacitances(rc, modes);

    let mut omega_m = Vec::with_capacity(modes);
    let mut q_zpf_m = Vec::with_capacity(modes);
    for m in 0..modes {
        let odd = (2 * m + 1) as f64;
        let l_m = rc.l_0 / (odd * odd);
        let z_m = (l_m / c_tilde_r).sqrt();
        omega_m.push(odd / (rc.l_0 * c_tilde_r).sqrt());
        q_zpf_m.push((HBAR / (2.0 * z_m)).sqrt());
    }

    let e_j = rc.e_j_max_over_h * H;
    let l_j = PHI_0_REDUCED.powi(2) / e_j;
    let z_a = (l_j / c_tilde_a).sqrt();
    let q_zpf_a = (HBAR / (2.0 * z_a)).sqrt();
    let phi_zpf_a = (HBAR * z_a / 2.0).sqrt();
    let omega_a_bar = 1.0 / (l_j * c_tilde_a).sqrt();
    let e_c_over_h = E_CHARGE * E_CHARGE / (2.0 * c_tilde_a * H);

    let mut g_m = Vec::with_capacity(modes);
    let mut charge_coupling_hz = Vec::with_capacity(modes);
    for m in 0..modes {
        let cinv_am = inv[(0, m + 1)];
        g_m.push(cinv_am * q_zpf_a * q_zpf_m[m] / HBAR);
        charge_coupling_hz.push(cinv_am * 2.0 * E_CHARGE * q_zpf_m[m] / H);
    }

    let mut g_mode_mode = vec![vec![0.0; modes]; modes];
    for m in 0..modes {
        for mp in 0..modes {
            if m != mp {
                g_mode_mode[m][mp] = inv[(m + 1, mp + 1)] * q_zpf_m[m] * q_zpf_m[mp] / HBAR;
            }
        }
    }

    Ok(QuantizedSystem {
        c_tilde_r,
        c_tilde_a,
        c_tilde_c,
        omega_m,
        q_zpf_m,
        q_zpf_a,
        phi_zpf_a,
        e_c_over_h,
        omega_a_bar,
        g_m,
        g_mode_mode,
        charge_coupling_hz,
    })
}

/// Single-mode transmon-resonator coupling rate
/// g = (1/2) sqrt(omega_a_bar omega_r / ((1 + C_a/C_c)(1 + C_r/C_c))),
/// bounded by (1/2) sqrt(omega_a_bar omega_r).
pub fn coupling_single_mode(c_a: f64, c_c: f64, c_r: f64, omega_a_bar: f64, omega_r: f64) -> f64 {
    0.5 * (omega_a_bar * omega_r / ((1.0 + c_a / c_c) * (1.0 + c_r / c_c))).sqrt()
}

/// Flux-tuned Cooper-pair box spectrum in the charge basis.
#[derive(Debug, Clone)]
pub struct CpbSpectrum {
    /// Charge states run from -n_max to n_max.
    pub n_max: usize,
    /// Retained level energies E_i/h [Hz], ascending, ground at index 0.
    pub levels_hz: Vec<f64>,
    /// Charge matrix elements <i|N|j> over the retained levels.
    pub charge_elements: DMatrix<C64>,
    /// Inputs, kept so truncation can be re-checked at larger n_max.
    pub params: CpbParams,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CpbParams {
    pub e_c_over_h: f64,
    pub e_j_max_over_h: f64,
    pub d: f64,
    pub flux_ratio: f64,
    pub n_env: f64,
    pub n_max: usize,
    pub n_levels: usize,
}

/// Diagonalizes 4 E_C (N - N_env)^2 minus the flux-dependent Josephson
/// tunneling. The SQUID asymmetry enters through sin(delta), implemented
/// as (|N><N+1| - |N+1><N|)/(2i); the matrix is then complex Hermitian.
pub fn cpb_diagonalize(params: &CpbParams) -> Result<CpbSpectrum> {
    if params.n_max < 5 {
        return Err(Error::DimensionMismatch(format!(
            "n_max must be at least 5, got {}",
            params.n_max
        )));
    }
    let dim = 2 * params.n_max + 1;
    if params.n_levels > dim {
        return Err(Error::DimensionMismatch(format!(
            "requested {} levels from a {}-state charge basis",
            params.n_levels, dim
        )));
    }

    let pi_flux = std::f64::consts::PI * params.flux_ratio;
    let cos_term = params.e_j_max_over_h * pi_flux.cos();
    let sin_term = params.d * params.e_j_max_over_h * pi_flux.sin();

    let mut h = DMatrix::<C64>::zeros(dim, dim);
    for k in 0..dim {
        let n = k as f64 - params.n_max as f64;
        h[(k, k)] = C64::new(4.0 * params.e_c_over_h * (n - params.n_env).powi(2), 0.0);
        if k + 1 < dim {
            // -E_J(Phi)/2 cos part; +i d E_J/2 sin part from (|N><N+1| - h.c.)/(2i)
            let off = C64::new(-cos_term / 2.0, sin_term / 2.0);
            h[(k, k + 1)] = off;
            h[(k + 1, k)] = off.conj();
        }
    }

    let (values, mut vectors) = eigh(&h);
    fix_phases(&mut vectors);

    // truncation check: retained eigenstates must not lean on the edge
    // charge states
    for lvl in 0..params.n_levels {
        let col = vectors.column(lvl);
        let edge = col[0].norm_sqr() + col[dim - 1].norm_sqr();
        if edge > 1e-8 {
            return Err(Error::Truncation { level: lvl, weight: edge });
        }
    }

    let mut charge = DMatrix::<C64>::zeros(params.n_levels, params.n_levels);
    for i in 0..params.n_levels {
        for j in 0..params.n_levels {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..dim {
                let n = k as f64 - params.n_max as f64;
                acc += vectors[(k, i)].conj() * vectors[(k, j)] * n;
            }
            charge[(i, j)] = acc;
        }
    }

    Ok(CpbSpectrum {
        n_max: params.n_max,
        levels_hz: values[..params.n_levels].to_vec(),
        charge_elements: charge,
        params: *params,
    })
}

impl CpbSpectrum {
    /// First transition frequency (E_1 - E_0)/h [Hz].
    pub fn first_transition_hz(&self) -> f64 {
        self.levels_hz[1] - self.levels_hz[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn thesis_circuit() -> ReducedCircuit {
        ReducedCircuit::new(51e-15, 9e-15, 57.1e-15, 9.65e-9, 46e9, 0.0).unwrap()
    }

    #[test]
    fn capacitance_matrix_one_mode() {
        let rc = ReducedCircuit::new(1e-15, 1e-15, 1e-15, 1e-9, 40e9, 0.0).unwrap();
        let cm = build_capacitance_matrix(&rc, 1);
        let f = 1e-15;
        assert_relative_eq!(cm.matrix[(0, 0)], 2.0 * f);
        assert_relative_eq!(cm.matrix[(0, 1)], -f);
        assert_relative_eq!(cm.matrix[(1, 0)], -f);
        assert_relative_eq!(cm.matrix[(1, 1)], 2.0 * f);
    }

    #[test]
    fn zero_coupling_is_block_diagonal() {
        // C_c = 0 is outside ReducedCircuit's invariants; build the matrix
        // directly from a tiny C_c and compare against the analytic limit.
        let rc = ReducedCircuit::new(50e-15, 1e-25, 60e-15, 2e-9, 40e9, 0.0).unwrap();
        let cm = build_capacitance_matrix(&rc, 2);
        assert!(cm.matrix[(0, 1)].abs() <= 1e-25);
        assert!(cm.matrix[(1, 2)].abs() <= 1e-25);
    }

    #[test]
    fn closed_form_inverse_matches_numeric() {
        let rc = thesis_circuit();
        for modes in [1usize, 3, 4] {
            let cm = build_capacitance_matrix(&rc, modes);
            let inv = cm.inverse().unwrap();
            let m = modes as f64;
            let (ca, cc, cr) = (rc.c_a, rc.c_c, rc.c_r);
            let denom = cr * (m * cc * ca + cr * (cc + ca));
            // printed entries of the closed-form inverse
            assert_relative_eq!(inv[(0, 0)], (cr * cr + m * cr * cc) / denom, max_relative = 1e-12);
            assert_relative_eq!(inv[(0, 1)], cr * cc / denom, max_relative = 1e-12);
            if modes > 1 {
                assert_relative_eq!(
                    inv[(1, 1)],
                    (cr * (cc + ca) + (m - 1.0) * cc * ca) / denom,
                    max_relative = 1e-12
                );
                assert_relative_eq!(inv[(1, 2)], -ca * cc / denom, max_relative = 1e-12);
            }
            // identity check
            let eye = &cm.matrix * &inv;
            let mut defect: f64 = 0.0;
            for i in 0..=modes {
                for j in 0..=modes {
                    let target = if i == j { 1.0 } else { 0.0 };
                    defect = defect.max((eye[(i, j)] - target).abs());
                }
            }
            assert!(defect < 1e-12, "C C^-1 defect {defect}");
        }
    }

    #[test]
    fn quantize_reduces_to_textbook_lc_when_decoupled() {
        let rc = ReducedCircuit::new(60e-15, 1e-22, 80e-15, 3e-9, 30e9, 0.0).unwrap();
        let qs = quantize(&rc, 1).unwrap();
        assert_relative_eq!(qs.omega_m[0], 1.0 / (3e-9f64 * 80e-15).sqrt(), max_relative = 1e-6);
        assert_relative_eq!(
            qs.e_c_over_h,
            E_CHARGE * E_CHARGE / (2.0 * 60e-15 * H),
            max_relative = 1e-6
        );
        assert!(qs.g_m[0].abs() < 1e-7 * qs.omega_m[0]);
    }

    #[test]
    fn large_coupling_capacitor_saturates_g() {
        // C_c = 1e6 max(C_a, C_r): g -> (1/2) sqrt(omega_a_bar omega_r) within 0.1%
        let c_a = 50e-15;
        let c_r = 70e-15;
        let rc = ReducedCircuit::new(c_a, 1e6 * c_r, c_r, 2e-9, 20e9, 0.0).unwrap();
        let qs = quantize(&rc, 1).unwrap();
        let bound = 0.5 * (qs.omega_a_bar * qs.omega_m[0]).sqrt();
        assert!((qs.g_m[0].abs() - bound).abs() / bound < 1e-3);
    }

    #[test]
    fn quantize_matches_single_mode_coupling_formula() {
        let rc = thesis_circuit();
        let qs = quantize(&rc, 1).unwrap();
        let g = coupling_single_mode(rc.c_a, rc.c_c, rc.c_r, qs.omega_a_bar, qs.omega_m[0]);
        assert_relative_eq!(qs.g_m[0].abs(), g, max_relative = 1e-12);
        // strict bound
        assert!(g < 0.5 * (qs.omega_a_bar * qs.omega_m[0]).sqrt());
    }

    #[test]
    fn coupling_ratio_example() {
        // C_a = C_r = 0.01 C_c: g / sqrt(wa wr) = 0.5/1.01
        let g = coupling_single_mode(0.01, 1.0, 0.01, 1.0, 1.0);
        assert_relative_eq!(g, 0.5 / 1.01, max_relative = 1e-12);
    }

    #[test]
    fn cpb_free_rotor_limit() {
        // E_J = 0 approached by tiny E_J: E_N/h = 4 E_C (N - N_env)^2 / h
        let params = CpbParams {
            e_c_over_h: 300e6,
            e_j_max_over_h: 1e-3,
            d: 0.0,
            flux_ratio: 0.0,
            n_env: 0.2,
            n_max: 10,
            n_levels: 5,
        };
        let spec = cpb_diagonalize(&params).unwrap();
        let mut expected: Vec<f64> = (-10i64..=10)
            .map(|n| 4.0 * 300e6 * (n as f64 - 0.2).powi(2))
            .collect();
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for i in 0..5 {
            assert_relative_eq!(spec.levels_hz[i], expected[i], max_relative = 1e-9, epsilon = 1.0);
        }
    }

    #[test]
    fn cpb_half_flux_kills_tunneling_for_symmetric_squid() {
        let base = CpbParams {
            e_c_over_h: 300e6,
            e_j_max_over_h: 30e9,
            d: 0.0,
            flux_ratio: 0.5,
            n_env: 0.13,
            n_max: 12,
            n_levels: 4,
        };
        let at_half = cpb_diagonalize(&base).unwrap();
        let free = cpb_diagonalize(&CpbParams {
            e_j_max_over_h: 1e-6,
            flux_ratio: 0.0,
            ..base
        })
        .unwrap();
        for i in 0..4 {
            assert_relative_eq!(at_half.levels_hz[i], free.levels_hz[i], epsilon = 1e-3);
        }
    }

    #[test]
    fn cpb_transmon_asymptotics() {
        // E_J/E_C = 50: first transition within 1% of sqrt(8 E_J E_C) - E_C,
        // frozen against the same diagonalization at n_max = 60.
        let e_c = 300e6;
        let params = CpbParams {
            e_c_over_h: e_c,
            e_j_max_over_h: 50.0 * e_c,
            d: 0.0,
            flux_ratio: 0.0,
            n_env: 0.0,
            n_max: 20,
            n_levels: 3,
        };
        let spec = cpb_diagonalize(&params).unwrap();
        let asymptotic = (8.0f64 * 50.0 * e_c * e_c).sqrt() - e_c;
        assert!((spec.first_transition_hz() - asymptotic).abs() / asymptotic < 0.01);

        let reference = cpb_diagonalize(&CpbParams { n_max: 60, ..params }).unwrap();
        assert_relative_eq!(
            spec.first_transition_hz(),
            reference.first_transition_hz(),
            max_relative = 1e-10
        );
    }

    #[test]
    fn cpb_spectrum_periodic_and_symmetric_in_offset_charge() {
        let make = |n_env: f64| {
            cpb_diagonalize(&CpbParams {
                e_c_over_h: 400e6,
                e_j_max_over_h: 8e9,
                d: 0.0,
                flux_ratio: 0.0,
                n_env,
                n_max: 20,
                n_levels: 4,
            })
            .unwrap()
        };
        let a = make(0.31);
        let b = make(1.31);
        let c = make(-0.31);
        for i in 0..4 {
            assert_relative_eq!(a.levels_hz[i], b.levels_hz[i], max_relative = 1e-9);
            assert_relative_eq!(a.levels_hz[i], c.levels_hz[i], max_relative = 1e-9);
        }
    }

    #[test]
    fn cpb_truncation_stability() {
        // n_max 20 -> 30 changes retained eigenvalues by < 1e-10 relative
        // for E_J/E_C up to 100
        for ratio in [10.0, 50.0, 100.0] {
            let e_c = 250e6;
            let p20 = CpbParams {
                e_c_over_h: e_c,
                e_j_max_over_h: ratio * e_c,
                d: 0.0,
                flux_ratio: 0.0,
                n_env: 0.0,
                n_max: 20,
                n_levels: 5,
            };
            let s20 = cpb_diagonalize(&p20).unwrap();
            let s30 = cpb_diagonalize(&CpbParams { n_max: 30, ..p20 }).unwrap();
            for i in 0..5 {
                let scale = s20.levels_hz[i].abs().max(e_c);
                assert!(
                    (s20.levels_hz[i] - s30.levels_hz[i]).abs() / scale < 1e-10,
                    "ratio {ratio}, level {i}"
                );
            }
        }
    }

    #[test]
    fn cpb_charge_elements_hermitian() {
        let spec = cpb_diagonalize(&CpbParams {
            e_c_over_h: 426e6,
            e_j_max_over_h: 36.3e9,
            d: 0.01,
            flux_ratio: 0.23,
            n_env: 0.07,
            n_max: 20,
            n_levels: 5,
        })
        .unwrap();
        let defect = (&spec.charge_elements - spec.charge_elements.adjoint()).norm();
        assert!(defect < 1e-12);
        // levels ascending
        for w in spec.levels_hz.windows(2) {
            assert!(w[1] >= w[0]);
        }
    }

    #[test]
    fn cpb_truncation_error_fires() {
        let err = cpb_diagonalize(&CpbParams {
            e_c_over_h: 100e6,
            e_j_max_over_h: 500e9, // huge E_J/E_C spreads the state over charge
            d: 0.0,
            flux_ratio: 0.0,
            n_env: 0.0,
            n_max: 5,
            n_levels: 5,
        })
        .unwrap_err();
        assert!(matches!(err, Error::Truncation { .. }), "{err}");
    }
}
