//! Multimode Rabi Hamiltonian in the transmon eigenbasis: sparse
//! assembly, diagonalization with bare-state labeling, and the
//! truncation convergence check.
//!
//! The Hamiltonian is built in E/h units (Hz). Basis ordering is the
//! transmon factor first, then resonator modes in listed order:
//! index = ((i N_0 + n_0) N_1 + n_1) ...

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::constants::ordinary;
use crate::error::{Error, Result};
use crate::linalg::{eigh, lanczos_lowest, CsrMatrix};
use crate::quantizer::{cpb_diagonalize, CpbParams, CpbSpectrum, QuantizedSystem};

/// Truncation parameters of the tensor-product simulation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TruncationSpec {
    /// Retained transmon levels.
    pub n_q: usize,
    /// Photon levels per resonator mode.
    pub photon_caps: Vec<usize>,
    /// Measured linewidth [Hz] used as the convergence yardstick.
    pub linewidth_hz: f64,
}

impl TruncationSpec {
    pub fn dimension(&self) -> usize {
        self.n_q * self.photon_caps.iter().product::<usize>()
    }
}

/// Basis label (transmon level, photon numbers per mode).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateLabel {
    pub transmon: usize,
    pub photons: Vec<usize>,
}

impl std::fmt::Display for StateLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.transmon)?;
        for n in &self.photons {
            write!(f, ",{n}")?;
        }
        Ok(())
    }
}

/// Diagonalization result: eigenvalues with the ground state subtracted,
/// plus maximum-overlap labels against the bare product basis.
#[derive(Debug, Clone)]
pub struct HamiltonianModel {
    pub dimension: usize,
    /// Eigenvalues as E/h [Hz], ascending, ground at zero.
    pub eigenvalues_hz: Vec<f64>,
    pub labels: Vec<StateLabel>,
    /// Transitions from the ground state: (label of excited state, f [Hz]).
    pub transitions: Vec<(StateLabel, f64)>,
}

fn decode_index(mut idx: usize, n_q: usize, caps: &[usize]) -> StateLabel {
    let mut photons = vec![0usize; caps.len()];
    for (m, &cap) in caps.iter().enumerate().rev() {
        photons[m] = idx % cap;
        idx /= cap;
    }
    let transmon = idx;
    debug_assert!(transmon < n_q);
    StateLabel { transmon, photons }
}

/// Assembles the sparse Hermitian Hamiltonian of the transmon coupled to
/// the retained resonator modes:
///
/// H/h = sum_i E_i |i><i| + sum_m f_m n_m
///     + sum_m sum_ij g_{m,i,j} |i><j| p_m
///     + sum_{m<m'} G_{m,m'} p_m p_m'
///
/// with p = -i(b - b^dag) the charge-side quadrature and
/// g_{m,i,j} = 2e q_zpf,m (C~_c/(C_a C_r)) <i|N|j> / h.
pub fn assemble(qs: &QuantizedSystem, cpb: &CpbSpectrum, trunc: &TruncationSpec) -> Result<CsrMatrix> {
    let modes = qs.omega_m.len();
    if trunc.photon_caps.len() != modes {
        return Err(Error::DimensionMismatch(format!(
            "{} photon caps for {} modes",
            trunc.photon_caps.len(),
            modes
        )));
    }
    if trunc.n_q > cpb.levels_hz.len() {
        return Err(Error::DimensionMismatch(format!(
            "requested {} transmon levels, CPB spectrum holds {}",
            trunc.n_q,
            cpb.levels_hz.len()
        )));
    }
    if trunc.n_q < 2 || trunc.photon_caps.iter().any(|&n| n < 1) {
        return Err(Error::DimensionMismatch(
            "need at least two transmon levels and one photon level per mode".into(),
        ));
    }

    let n_q = trunc.n_q;
    let caps = &trunc.photon_caps;
    let e0 = cpb.levels_hz[0];

    // transmon block
    let transmon_energy = CsrMatrix::from_triplets(
        n_q,
        n_q,
        &(0..n_q)
            .map(|i| (i, i, C64::new(cpb.levels_hz[i] - e0, 0.0)))
            .collect::<Vec<_>>(),
    );
    // charge matrix over retained levels
    let mut charge_triplets = Vec::new();
    for i in 0..n_q {
        for j in 0..n_q {
            let v = cpb.charge_elements[(i, j)];
            if v.norm() > 0.0 {
                charge_triplets.push((i, j, v));
            }
        }
    }
    let charge = CsrMatrix::from_triplets(n_q, n_q, &charge_triplets);

    // mode-local operators
    let mode_number: Vec<CsrMatrix> = caps
        .iter()
        .map(|&cap| {
            CsrMatrix::from_triplets(
                cap,
                cap,
                &(0..cap).map(|n| (n, n, C64::new(n as f64, 0.0))).collect::<Vec<_>>(),
            )
        })
        .collect();
    let mode_p: Vec<CsrMatrix> = caps
        .iter()
        .map(|&cap| {
            // p = -i(b - b^dag): <n-1|p|n> = -i sqrt(n), <n|p|n-1> = +i sqrt(n)
            let mut t = Vec::new();
            for n in 1..cap {
                let s = (n as f64).sqrt();
                t.push((n - 1, n, C64::new(0.0, -s)));
                t.push((n, n - 1, C64::new(0.0, s)));
            }
            CsrMatrix::from_triplets(cap, cap, &t)
        })
        .collect();

    let embed = |ops: Vec<(usize, &CsrMatrix)>| -> CsrMatrix {
        // ops: (factor slot, operator); slot 0 is the transmon
        let mut acc = match ops.iter().find(|(s, _)| *s == 0) {
            Some((_, op)) => (*op).clone(),
            None => CsrMatrix::identity(n_q),
        };
        for (m, &cap) in caps.iter().enumerate() {
            let next = match ops.iter().find(|(s, _)| *s == m + 1) {
                Some((_, op)) => (*op).clone(),
                None => CsrMatrix::identity(cap),
            };
            acc = acc.kron(&next);
        }
        acc
    };

    let dim = trunc.dimension();
    let mut h = CsrMatrix::zeros(dim, dim);

    h = h.add(&embed(vec![(0, &transmon_energy)]));
    for m in 0..modes {
        let f_m = ordinary(qs.omega_m[m]);
        let nm = mode_number[m].scale(C64::new(f_m, 0.0));
        h = h.add(&embed(vec![(m + 1, &nm)]));
        // transmon-mode coupling
        let g_block = charge.scale(C64::new(qs.charge_coupling_hz[m], 0.0));
        h = h.add(&embed(vec![(0, &g_block), (m + 1, &mode_p[m])]));
    }
    for m in 0..modes {
        for mp in (m + 1)..modes {
            let g_hz = ordinary(qs.g_mode_mode[m][mp]);
            if g_hz != 0.0 {
                let scaled = mode_p[m].scale(C64::new(g_hz, 0.0));
                h = h.add(&embed(vec![(m + 1, &scaled), (mp + 1, &mode_p[mp])]));
            }
        }
    }

    debug_assert!(h.hermiticity_defect() == 0.0);
    Ok(h)
}

/// Eigensolver backend selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    /// Dense below dimension 2048, shift-invert Lanczos above.
    Auto,
    Dense,
    ShiftInvertLanczos,
}

/// Diagonalizes the Hamiltonian, returning the lowest `k` eigenpairs with
/// ground-state energy subtracted and maximum-overlap labels.
pub fn diagonalize(h: &CsrMatrix, k: usize, trunc: &TruncationSpec, solver: Solver) -> Result<HamiltonianModel> {
    let dim = h.nrows;
    if k >= dim {
        return Err(Error::DimensionMismatch(format!(
            "requested {k} levels of a dimension-{dim} Hamiltonian"
        )));
    }
    let use_dense = match solver {
        Solver::Dense => true,
        Solver::ShiftInvertLanczos => false,
        Solver::Auto => dim < 2048,
    };
    let (values, vectors) = if use_dense {
        let (vals, vecs) = eigh(&h.to_dense());
        (vals[..=k].to_vec(), vecs.columns(0, k + 1).into_owned())
    } else {
        lanczos_lowest(h, k + 1, 1e-10)?
    };

    let mut labels = Vec::with_capacity(values.len());
    for col in 0..values.len() {
        let column = vectors.column(col);
        let mut best = 0usize;
        let mut best_weight = 0.0;
        for (i, v) in column.iter().enumerate() {
            let w = v.norm_sqr();
            if w > best_weight {
                best_weight = w;
                best = i;
            }
        }
        labels.push(decode_index(best, trunc.n_q, &trunc.photon_caps));
    }

    let ground = values[0];
    let eigenvalues_hz: Vec<f64> = values.iter().map(|v| v - ground).collect();
    let transitions = eigenvalues_hz
        .iter()
        .zip(&labels)
        .skip(1)
        .map(|(&f, l)| (l.clone(), f))
        .collect();
    Ok(HamiltonianModel {
        dimension: dim,
        eigenvalues_hz,
        labels,
        transitions,
    })
}

/// Convenience: assemble and diagonalize for a CPB parameter set.
pub fn spectrum_at(
    qs: &QuantizedSystem,
    cpb_params: &CpbParams,
    trunc: &TruncationSpec,
    k: usize,
    solver: Solver,
) -> Result<HamiltonianModel> {
    let cpb = cpb_diagonalize(cpb_params)?;
    let h = assemble(qs, &cpb, trunc)?;
    diagonalize(&h, k, trunc, solver)
}

/// Per-parameter truncation sweep report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// Tracked transitions of the base run (label text, frequency Hz).
    pub base_transitions: Vec<(String, f64)>,
    /// Maximum transition shift per bumped parameter (name, shift Hz).
    pub shifts_hz: Vec<(String, f64)>,
    pub max_shift_hz: f64,
    /// Pass when the largest shift stays below linewidth/10.
    pub pass: bool,
}

/// Bumps each truncation parameter by one (transmon levels, each photon
/// cap, and the charge-basis size), recomputes the tracked transitions
/// and reports the maximum shift against linewidth/10.
pub fn check_convergence(
    qs: &QuantizedSystem,
    cpb_params: &CpbParams,
    trunc: &TruncationSpec,
    tracked: usize,
) -> Result<ConvergenceReport> {
    if !(trunc.linewidth_hz > 0.0) {
        return Err(Error::Value {
            line: 0,
            message: "convergence check needs a positive linewidth".into(),
        });
    }
    let base_params = CpbParams {
        n_levels: (trunc.n_q + 2).min(2 * cpb_params.n_max + 1),
        ..*cpb_params
    };
    let base = spectrum_at(qs, &base_params, trunc, tracked, Solver::Auto)?;

    let tracked_set: Vec<(StateLabel, f64)> = base.transitions.iter().take(tracked).cloned().collect();

    let mut variants: Vec<(String, CpbParams, TruncationSpec)> = Vec::new();
    variants.push((
        "n_q".into(),
        CpbParams { n_levels: (trunc.n_q + 3).min(2 * cpb_params.n_max + 1), ..base_params },
        TruncationSpec { n_q: trunc.n_q + 1, ..trunc.clone() },
    ));
    for m in 0..trunc.photon_caps.len() {
        let mut caps = trunc.photon_caps.clone();
        caps[m] += 1;
        variants.push((
            format!("photons[{m}]"),
            base_params,
            TruncationSpec { photon_caps: caps, ..trunc.clone() },
        ));
    }
    variants.push((
        "n_max".into(),
        CpbParams { n_max: cpb_params.n_max + 1, ..base_params },
        trunc.clone(),
    ));

    let mut shifts = Vec::new();
    let mut max_shift: f64 = 0.0;
    for (name, params, variant_trunc) in variants {
        let bumped = spectrum_at(qs, &params, &variant_trunc, tracked + 4, Solver::Auto)?;
        let mut worst: f64 = 0.0;
        for (label, f_base) in &tracked_set {
            // match by label; fall back to nearest frequency
            let f_new = bumped
                .transitions
                .iter()
                .find(|(l, _)| l == label)
                .map(|(_, f)| *f)
                .unwrap_or_else(|| {
                    bumped
                        .transitions
                        .iter()
                        .map(|(_, f)| *f)
                        .min_by(|a, b| {
                            (a - f_base).abs().partial_cmp(&(b - f_base).abs()).unwrap()
                        })
                        .unwrap_or(*f_base)
                });
            worst = worst.max((f_new - f_base).abs());
        }
        max_shift = max_shift.max(worst);
        shifts.push((name, worst));
    }

    Ok(ConvergenceReport {
        base_transitions: tracked_set
            .iter()
            .map(|(l, f)| (l.to_string(), *f))
            .collect(),
        shifts_hz: shifts,
        max_shift_hz: max_shift,
        pass: max_shift < trunc.linewidth_hz / 10.0,
    })
}
