//! Steady-state Lindblad spectroscopy: truncated Fock operator algebra,
//! thermal collapse operators, the vectorized-Liouvillian steady-state
//! solve, and drive-frequency sweeps with the appendix parameter sets.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::designer::thermal_occupation;
use crate::error::{Error, Result};
use crate::linalg::{gmres, CsrMatrix, SparseLu};

/// Operator factory for a tensor product of truncated Fock spaces.
#[derive(Debug, Clone)]
pub struct FockSpace {
    pub dims: Vec<usize>,
}

impl FockSpace {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d < 2) {
            return Err(Error::Dimension(format!(
                "every subsystem needs dimension >= 2, got {dims:?}"
            )));
        }
        Ok(FockSpace { dims })
    }

    pub fn dimension(&self) -> usize {
        self.dims.iter().product()
    }

    fn local_annihilator(dim: usize) -> CsrMatrix {
        let mut t = Vec::with_capacity(dim - 1);
        for n in 1..dim {
            t.push((n - 1, n, C64::new((n as f64).sqrt(), 0.0)));
        }
        CsrMatrix::from_triplets(dim, dim, &t)
    }

    /// Annihilation operator on subsystem `k`, identity elsewhere.
    pub fn annihilator(&self, k: usize) -> CsrMatrix {
        assert!(k < self.dims.len());
        let mut acc: Option<CsrMatrix> = None;
        for (i, &d) in self.dims.iter().enumerate() {
            let factor = if i == k {
                Self::local_annihilator(d)
            } else {
                CsrMatrix::identity(d)
            };
            acc = Some(match acc {
                None => factor,
                Some(m) => m.kron(&factor),
            });
        }
        acc.unwrap()
    }

    pub fn identity(&self) -> CsrMatrix {
        CsrMatrix::identity(self.dimension())
    }

    /// Number operator on subsystem `k`.
    pub fn number(&self, k: usize) -> CsrMatrix {
        let a = self.annihilator(k);
        a.dagger().matmul(&a)
    }
}

/// Hamiltonian plus collapse operators, with rates folded in.
#[derive(Debug, Clone)]
pub struct LindbladModel {
    pub hamiltonian: CsrMatrix,
    pub collapse: Vec<CsrMatrix>,
}

impl LindbladModel {
    /// Thermal pair sqrt(kappa (1 + n_th)) a, sqrt(kappa n_th) a^dag.
    pub fn thermal_pair(a: &CsrMatrix, kappa: f64, n_th: f64) -> Vec<CsrMatrix> {
        let mut ops = vec![a.scale(C64::new((kappa * (1.0 + n_th)).sqrt(), 0.0))];
        if n_th > 0.0 {
            ops.push(a.dagger().scale(C64::new((kappa * n_th).sqrt(), 0.0)));
        }
        ops
    }
}

/// Row-major vectorized Liouvillian:
/// L = -i (H (x) I - I (x) H^T) + sum_k [ c (x) c* - 1/2 (c^dag c (x) I + I (x) (c^dag c)^T) ].
pub fn liouvillian(model: &LindbladModel) -> CsrMatrix {
    let dim = model.hamiltonian.nrows;
    let eye = CsrMatrix::identity(dim);
    let minus_i = C64::new(0.0, -1.0);
    let h = &model.hamiltonian;
    let ht = h.dagger().conj(); // transpose = conj(dagger)
    let mut l = h.kron(&eye).add(&eye.kron(&ht).scale(C64::new(-1.0, 0.0))).scale(minus_i);
    for c in &model.collapse {
        let cdc = c.dagger().matmul(c);
        let cdct = cdc.dagger().conj();
        let jump = c.kron(&c.conj());
        let damp = cdc
            .kron(&eye)
            .add(&eye.kron(&cdct))
            .scale(C64::new(-0.5, 0.0));
        l = l.add(&jump).add(&damp);
    }
    l
}

/// Density operator returned by the steady-state solve.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    pub dim: usize,
    /// Row-major dim x dim matrix.
    pub rho: Vec<C64>,
}

impl DensityOperator {
    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.rho[i * self.dim + i]).sum()
    }

    /// Tr(rho op) for a sparse operator.
    pub fn expect(&self, op: &CsrMatrix) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..op.nrows {
            for k in op.indptr[r]..op.indptr[r + 1] {
                let c = op.indices[k];
                // (rho op)_rr accumulates rho[r, c'] op[c', r]; swap to
                // sum rho[c, r] op[r, c] over the sparse entries
                acc += self.rho[c * self.dim + r] * op.data[k];
            }
        }
        acc
    }
}

/// Dimension above which the direct factorization gives way to GMRES.
const DIRECT_SOLVE_LIMIT: usize = 20_000;

/// Solves L[rho] = 0 with trace(rho) = 1 by replacing the first row of
/// the vectorized Liouvillian with the trace constraint and running a
/// sparse direct solve (GMRES fallback above 20k unknowns). The result
/// is Hermitized.
pub fn steady_state(model: &LindbladModel) -> Result<DensityOperator> {
    if model.collapse.is_empty() {
        return Err(Error::SingularLiouvillian { null_dim: None });
    }
    let dim = model.hamiltonian.nrows;
    let n = dim * dim;
    let l = liouvillian(model);

    // replace row 0 with the trace row
    let mut triplets: Vec<(usize, usize, C64)> = Vec::with_capacity(l.nnz() + dim);
    for r in 1..n {
        for k in l.indptr[r]..l.indptr[r + 1] {
            triplets.push((r, l.indices[k], l.data[k]));
        }
    }
    for i in 0..dim {
        triplets.push((0, i * dim + i, C64::new(1.0, 0.0)));
    }
    let system = CsrMatrix::from_triplets(n, n, &triplets);
    let mut rhs = vec![C64::new(0.0, 0.0); n];
    rhs[0] = C64::new(1.0, 0.0);

    let solution = if n <= DIRECT_SOLVE_LIMIT {
        let lu = SparseLu::factor(&system)?;
        lu.solve(&rhs)
    } else {
        gmres(&system, &rhs, None, 80, 400, 1e-12)?
    };

    // residual against the true Liouvillian validates the null vector
    let lr = l.matvec_alloc(&solution);
    let l_scale: f64 = l.data.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let res: f64 = lr.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if !(res <= 1e-9 * l_scale.max(1.0)) {
        return Err(Error::SingularLiouvillian {
            null_dim: Some(2),
        });
    }

    // Hermitize
    let mut rho = vec![C64::new(0.0, 0.0); n];
    for r in 0..dim {
        for c in 0..dim {
            rho[r * dim + c] =
                0.5 * (solution[r * dim + c] + solution[c * dim + r].conj());
        }
    }
    let out = DensityOperator { dim, rho };
    let tr = out.trace();
    if (tr.re - 1.0).abs() > 1e-6 || tr.im.abs() > 1e-6 {
        return Err(Error::SingularLiouvillian { null_dim: Some(2) });
    }
    Ok(out)
}

/// Drive-frequency sweep of a steady-state response.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectroscopyTrace {
    pub drive_hz: Vec<f64>,
    /// Tr(rho i(a - a^dag)); NaN marks per-point solver failures.
    pub response: Vec<f64>,
    pub errors: Vec<String>,
}

/// One steady-state solve per drive point, parallel across points. The
/// builder returns the rotating-frame model and the readout operator.
pub fn sweep<F>(builder: F, drive_hz: &[f64]) -> SpectroscopyTrace
where
    F: Fn(f64) -> (LindbladModel, CsrMatrix) + Sync,
{
    let results: Vec<(f64, Option<String>)> = drive_hz
        .par_iter()
        .map(|&wd| {
            let (model, readout) = builder(wd);
            match steady_state(&model) {
                Ok(rho) => (rho.expect(&readout).re, None),
                Err(e) => (f64::NAN, Some(format!("drive {wd:.6e}: {e}"))),
            }
        })
        .collect();
    SpectroscopyTrace {
        drive_hz: drive_hz.to_vec(),
        response: results.iter().map(|(v, _)| *v).collect(),
        errors: results.into_iter().filter_map(|(_, e)| e).collect(),
    }
}

/// The six appendix parameter sets, frequencies in the units of the
/// listing that defined them (transmon frequency for the two-body cases,
/// low-mode frequency or Hz for the three-body cases).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preset {
    /// Two-body, A_L >> hbar g: Jaynes-Cummings doublets.
    GA,
    /// Two-body, hbar g >> A_L: anharmonic electromechanical mode.
    AG,
    /// Three-body, chi << hbar g << A_L.
    ChiGA,
    /// Three-body, hbar g << A_L, chi.
    GAChi,
    /// Three-body, A_L << chi << hbar g (counter-rotating term retained).
    AChiG,
    /// Three-body, A_L << hbar g << chi (physical-unit listing).
    AGChi,
}

impl Preset {
    pub fn parse(name: &str) -> Option<Preset> {
        match name {
            "g_A" => Some(Preset::GA),
            "A_g" => Some(Preset::AG),
            "chi_g_A" => Some(Preset::ChiGA),
            "g_A_chi" => Some(Preset::GAChi),
            "A_chi_g" => Some(Preset::AChiG),
            "A_g_chi" => Some(Preset::AGChi),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::GA => "g_A",
            Preset::AG => "A_g",
            Preset::ChiGA => "chi_g_A",
            Preset::GAChi => "g_A_chi",
            Preset::AChiG => "A_chi_g",
            Preset::AGChi => "A_g_chi",
        }
    }

    pub fn all() -> [Preset; 6] {
        [
            Preset::GA,
            Preset::AG,
            Preset::ChiGA,
            Preset::GAChi,
            Preset::AChiG,
            Preset::AGChi,
        ]
    }
}

/// Two-body model parameters (transmon "a" + drum "c").
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TwoBodyParams {
    pub n_a: usize,
    pub w_a: f64,
    pub e_c: f64,
    pub k_a: f64,
    pub n_th_a: f64,
    pub n_c: usize,
    pub w_c: f64,
    pub k_c: f64,
    pub n_th_c: f64,
    pub g: f64,
    pub drive_lo: f64,
    pub drive_hi: f64,
    pub points: usize,
}

/// Three-body model parameters (HF "a", LF "b", drum "c").
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ThreeBodyParams {
    pub n_a: usize,
    pub w_a: f64,
    pub a_h: f64,
    pub k_a: f64,
    pub n_th_a: f64,
    pub n_b: usize,
    pub w_b: f64,
    pub a_l: f64,
    pub k_b: f64,
    pub n_th_b: f64,
    pub n_c: usize,
    pub w_c: f64,
    pub k_c: f64,
    pub n_th_c: f64,
    pub chi: f64,
    pub g: f64,
    /// Keep the g(c^dag b^dag + c b) term.
    pub counter_rotating: bool,
    pub drive_lo: f64,
    pub drive_hi: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum PresetParams {
    TwoBody(TwoBodyParams),
    ThreeBody(ThreeBodyParams),
}

/// Parameter sets transcribed from the appendix listings. Dissipation
/// rates keep each listing's unit convention.
pub fn preset_params(preset: Preset) -> PresetParams {
    match preset {
        // Na=4, wa=1, Ec=0.05, ka=1e-4, ntha=1.2; Nc=6, wc=wa, kc=1e-7;
        // g = Ec/10; drive wa-5g .. wa+5g, 201 points
        Preset::GA => PresetParams::TwoBody(TwoBodyParams {
            n_a: 4,
            w_a: 1.0,
            e_c: 0.05,
            k_a: 1e-4,
            n_th_a: 1.2,
            n_c: 6,
            w_c: 1.0,
            k_c: 1e-7,
            n_th_c: 1.2,
            g: 0.05 / 10.0,
            drive_lo: 1.0 - 5.0 * 0.005,
            drive_hi: 1.0 + 5.0 * 0.005,
            points: 201,
        }),
        // Na=6, Ec=0.005, ka=4e-5, g=15 Ec; drive wa-g-2.5Ec .. wa-g+0.5Ec
        Preset::AG => PresetParams::TwoBody(TwoBodyParams {
            n_a: 6,
            w_a: 1.0,
            e_c: 0.005,
            k_a: 4e-5,
            n_th_a: 1.2,
            n_c: 6,
            w_c: 1.0,
            k_c: 1e-7,
            n_th_c: 1.2,
            g: 15.0 * 0.005,
            drive_lo: 1.0 - 0.075 - 2.5 * 0.005,
            drive_hi: 1.0 - 0.075 + 0.5 * 0.005,
            points: 201,
        }),
        // chi=0.0005, g=0.005, Al=0.05, delta=g/0.6, wc=wb+delta-chi
        Preset::ChiGA => PresetParams::ThreeBody(ThreeBodyParams {
            n_a: 3,
            w_a: 50.0,
            a_h: 0.05 * 50.0,
            k_a: 0.01 * 0.0005,
            n_th_a: 0.0,
            n_b: 4,
            w_b: 1.0,
            a_l: 0.05,
            k_b: 0.001 * 0.0005,
            n_th_b: 0.5,
            n_c: 4,
            w_c: 1.0 + 0.005 / 0.6 - 0.0005,
            k_c: 0.001 * 0.0005,
            n_th_c: 0.5,
            chi: 0.0005,
            g: 0.005,
            counter_rotating: false,
            drive_lo: 50.0 - 0.0005,
            drive_hi: 50.0 + 0.3 * 0.0005,
            points: 201,
        }),
        // chi=0.1, g=0.001, Al=0.05, delta=0
        Preset::GAChi => PresetParams::ThreeBody(ThreeBodyParams {
            n_a: 3,
            w_a: 50.0,
            a_h: 0.05 * 50.0,
            k_a: 0.1 * 0.001,
            n_th_a: 0.0,
            n_b: 4,
            w_b: 1.0,
            a_l: 0.05,
            k_b: 0.001 * 0.001,
            n_th_b: 0.5,
            n_c: 4,
            w_c: 1.0,
            k_c: 0.001 * 0.001,
            n_th_c: 0.5,
            chi: 0.1,
            g: 0.001,
            counter_rotating: false,
            drive_lo: 50.0 - 2.5 * 0.001,
            drive_hi: 50.0 + 2.5 * 0.001,
            points: 201,
        }),
        // chi=0.01, g=0.1, Al=0.001, delta=2g; the one listing that keeps
        // the counter-rotating drum term
        Preset::AChiG => PresetParams::ThreeBody(ThreeBodyParams {
            n_a: 3,
            w_a: 50.0,
            a_h: 0.05 * 50.0,
            k_a: 0.01 * 0.01,
            n_th_a: 0.0,
            n_b: 4,
            w_b: 1.0,
            a_l: 0.001,
            k_b: 0.001 * 0.01,
            n_th_b: 0.5,
            n_c: 4,
            w_c: 1.0 + 2.0 * 0.1,
            k_c: 0.001 * 0.01,
            n_th_c: 0.5,
            chi: 0.01,
            g: 0.1,
            counter_rotating: true,
            drive_lo: 50.0 - 2.0 * 0.01,
            drive_hi: 50.0 + 0.2 * 0.01,
            points: 201,
        }),
        // physical units: T=20 mK, f=100 MHz; chi=15e6, g=2e6, wa=5e9,
        // Ah=0.05 wa, ka=500e3, Al=chi^2/(4 Ah), kb=wb/1e4, wc=wb-chi,
        // kc=wc/1e5
        Preset::AGChi => {
            let nth = thermal_occupation(100e6, 20e-3);
            let w_b = 100e6;
            let a_h = 0.05 * 5e9;
            let chi = 15e6;
            let w_c = w_b - chi;
            PresetParams::ThreeBody(ThreeBodyParams {
                n_a: 3,
                w_a: 5e9,
                a_h,
                k_a: 500e3,
                n_th_a: 0.0,
                n_b: 4,
                w_b,
                a_l: chi * chi / (4.0 * a_h),
                k_b: w_b / 1e4,
                n_th_b: nth,
                n_c: 4,
                w_c,
                k_c: w_c / 1e5,
                n_th_c: nth,
                chi,
                g: 2e6,
                counter_rotating: false,
                drive_lo: 5e9 - 3.5 * 2e6,
                drive_hi: 5e9 + 3.5 * 2e6,
                points: 201,
            })
        }
    }
}

/// Rotating-frame model builder for the two-body listings:
/// H = wa a^dag a - Ec/2 a^dag a^dag a a + wc c^dag c + g(a^dag c + a c^dag),
/// probed through H - wd a^dag a - wd c^dag c + (ka/1e3)(a + a^dag).
pub fn two_body_model(p: &TwoBodyParams, wd: f64) -> (LindbladModel, CsrMatrix) {
    let space = FockSpace::new(vec![p.n_a, p.n_c]).unwrap();
    let a = space.annihilator(0);
    let c = space.annihilator(1);
    let ad = a.dagger();
    let cd = c.dagger();
    let na = ad.matmul(&a);
    let nc = cd.matmul(&c);
    let one = C64::new(1.0, 0.0);

    let mut h = na.scale(C64::new(p.w_a - wd, 0.0));
    h = h.add(&ad.matmul(&ad).matmul(&a).matmul(&a).scale(C64::new(-p.e_c / 2.0, 0.0)));
    h = h.add(&nc.scale(C64::new(p.w_c - wd, 0.0)));
    h = h.add(&ad.matmul(&c).add(&a.matmul(&cd)).scale(C64::new(p.g, 0.0)));
    h = h.add(&a.add(&ad).scale(C64::new(p.k_a / 1e3, 0.0)));

    let mut collapse = LindbladModel::thermal_pair(&a, p.k_a, p.n_th_a);
    collapse.extend(LindbladModel::thermal_pair(&c, p.k_c, p.n_th_c));

    let readout = a.scale(C64::new(0.0, 1.0)).add(&ad.scale(C64::new(0.0, -1.0)));
    let _ = one;
    (LindbladModel { hamiltonian: h, collapse }, readout)
}

/// Rotating-frame model builder for the three-body listings:
/// H = wa a^dag a - Ah/2 (a^dag)^2 a^2 - chi a^dag a b^dag b
///   + wb b^dag b - Al/2 (b^dag)^2 b^2 + wc c^dag c + g(c^dag b + c b^dag)
///   [+ g(c^dag b^dag + c b)], probed through H - wd a^dag a
///   + (ka/1e3)(a + a^dag).
pub fn three_body_model(p: &ThreeBodyParams, wd: f64) -> (LindbladModel, CsrMatrix) {
    let space = FockSpace::new(vec![p.n_a, p.n_b, p.n_c]).unwrap();
    let a = space.annihilator(0);
    let b = space.annihilator(1);
    let c = space.annihilator(2);
    let ad = a.dagger();
    let bd = b.dagger();
    let cd = c.dagger();
    let na = ad.matmul(&a);
    let nb = bd.matmul(&b);
    let nc = cd.matmul(&c);

    let mut h = na.scale(C64::new(p.w_a - wd, 0.0));
    h = h.add(&ad.matmul(&ad).matmul(&a).matmul(&a).scale(C64::new(-p.a_h / 2.0, 0.0)));
    h = h.add(&na.matmul(&nb).scale(C64::new(-p.chi, 0.0)));
    h = h.add(&nb.scale(C64::new(p.w_b, 0.0)));
    h = h.add(&bd.matmul(&bd).matmul(&b).matmul(&b).scale(C64::new(-p.a_l / 2.0, 0.0)));
    h = h.add(&nc.scale(C64::new(p.w_c, 0.0)));
    h = h.add(&cd.matmul(&b).add(&c.matmul(&bd)).scale(C64::new(p.g, 0.0)));
    if p.counter_rotating {
        h = h.add(&cd.matmul(&bd).add(&c.matmul(&b)).scale(C64::new(p.g, 0.0)));
    }
    h = h.add(&a.add(&ad).scale(C64::new(p.k_a / 1e3, 0.0)));

    let mut collapse = LindbladModel::thermal_pair(&a, p.k_a, p.n_th_a);
    collapse.extend(LindbladModel::thermal_pair(&b, p.k_b, p.n_th_b));
    collapse.extend(LindbladModel::thermal_pair(&c, p.k_c, p.n_th_c));

    let readout = a.scale(C64::new(0.0, 1.0)).add(&ad.scale(C64::new(0.0, -1.0)));
    (LindbladModel { hamiltonian: h, collapse }, readout)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Runs a preset sweep end to end.
pub fn run_preset(preset: Preset) -> SpectroscopyTrace {
    match preset_params(preset) {
        PresetParams::TwoBody(p) => {
            let drives = linspace(p.drive_lo, p.drive_hi, p.points);
            sweep(|wd| two_body_model(&p, wd), &drives)
        }
        PresetParams::ThreeBody(p) => {
            let drives = linspace(p.drive_lo, p.drive_hi, p.points);
            sweep(|wd| three_body_model(&p, wd), &drives)
        }
    }
}

/// Indices of local maxima above a prominence floor, for peak-position
/// checks of spectroscopy traces.
pub fn peak_indices(trace: &[f64], floor_fraction: f64) -> Vec<usize> {
    let max = trace.iter().cloned().fold(f64::MIN, f64::max);
    let min = trace.iter().cloned().fold(f64::MAX, f64::min);
    let floor = min + floor_fraction * (max - min);
    let mut peaks = Vec::new();
    for i in 1..trace.len().saturating_sub(1) {
        if trace[i] > floor && trace[i] >= trace[i - 1] && trace[i] > trace[i + 1] {
            peaks.push(i);
        }
    }
    peaks
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn annihilator_matrix_elements() {
        let space = FockSpace::new(vec![3]).unwrap();
        let a = space.annihilator(0).to_dense();
        assert_relative_eq!(a[(0, 1)].re, 1.0);
        assert_relative_eq!(a[(1, 2)].re, 2.0f64.sqrt());
        assert_relative_eq!(a[(1, 0)].norm(), 0.0);
    }

    #[test]
    fn commutator_is_identity_below_truncation() {
        let space = FockSpace::new(vec![6]).unwrap();
        let a = space.annihilator(0);
        let comm = a.matmul(&a.dagger()).add(&a.dagger().matmul(&a).scale(C64::new(-1.0, 0.0)));
        let d = comm.to_dense();
        for n in 0..5 {
            assert_relative_eq!(d[(n, n)].re, 1.0, epsilon = 1e-14);
        }
        // the boundary term at the top level is exactly -(dim - 1)
        assert_relative_eq!(d[(5, 5)].re, -5.0, epsilon = 1e-14);
    }

    #[test]
    fn tensor_factors_commute() {
        let space = FockSpace::new(vec![3, 4]).unwrap();
        let a = space.annihilator(0);
        let b = space.annihilator(1);
        let ab = a.matmul(&b);
        let ba = b.matmul(&a);
        let diff = ab.add(&ba.scale(C64::new(-1.0, 0.0)));
        assert!(diff.data.iter().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn dimension_error_for_trivial_subsystem() {
        assert!(matches!(
            FockSpace::new(vec![3, 1]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn thermal_cavity_detailed_balance() {
        // single damped cavity: <a^dag a> equals the truncated-geometric
        // mean to 1e-9, which sits within 1e-4 of n_th at dim 16
        let n_th = 0.4;
        let dim = 16;
        let space = FockSpace::new(vec![dim]).unwrap();
        let a = space.annihilator(0);
        let h = space.number(0).scale(C64::new(1.0, 0.0));
        let model = LindbladModel {
            hamiltonian: h,
            collapse: LindbladModel::thermal_pair(&a, 1e-3, n_th),
        };
        let rho = steady_state(&model).unwrap();
        let n_mean = rho.expect(&space.number(0)).re;

        // truncated-geometric oracle
        let r: f64 = n_th / (1.0 + n_th);
        let z: f64 = (0..dim).map(|n| r.powi(n as i32)).sum();
        let expected: f64 = (0..dim).map(|n| n as f64 * r.powi(n as i32)).sum::<f64>() / z;
        assert!((n_mean - expected).abs() < 1e-9, "{n_mean} vs {expected}");
        assert!((n_mean - n_th).abs() < 1e-4);
        // contract checks
        assert_relative_eq!(rho.trace().re, 1.0, epsilon = 1e-9);
        let dense = nalgebra::DMatrix::from_fn(dim, dim, |r_, c_| rho.rho[r_ * dim + c_]);
        let (vals, _) = crate::linalg::eigh(&dense);
        assert!(vals[0] > -1e-9, "min eigenvalue {}", vals[0]);
    }

    #[test]
    fn driven_cavity_lorentzian_response() {
        // weakly driven damped cavity in the rotating frame:
        // H = -delta n + eps (a + a^dag); input-output gives
        // <i(a - a^dag)> = 2 Im<a> with <a> = eps/(delta + i kappa/2)...
        let kappa = 0.02;
        let eps = kappa / 1e3;
        let dim = 6;
        let space = FockSpace::new(vec![dim]).unwrap();
        let a = space.annihilator(0);
        let ad = a.dagger();
        let deltas = linspace(-0.1, 0.1, 41);
        let trace = sweep(
            |wd| {
                let h = space
                    .number(0)
                    .scale(C64::new(-wd, 0.0))
                    .add(&a.add(&ad).scale(C64::new(eps, 0.0)));
                (
                    LindbladModel {
                        hamiltonian: h,
                        collapse: LindbladModel::thermal_pair(&a, kappa, 0.0),
                    },
                    a.scale(C64::new(0.0, 1.0)).add(&ad.scale(C64::new(0.0, -1.0))),
                )
            },
            &deltas,
        );
        assert!(trace.errors.is_empty(), "{:?}", trace.errors);
        // analytic steady state of the driven damped cavity
        for (i, &delta) in deltas.iter().enumerate() {
            let alpha = C64::new(eps, 0.0) / C64::new(-delta, -kappa / 2.0);
            let expected = C64::new(0.0, 1.0) * alpha + (C64::new(0.0, 1.0) * alpha).conj();
            assert!(
                (trace.response[i] - expected.re).abs() < 1e-6,
                "delta {delta}: {} vs {}",
                trace.response[i],
                expected.re
            );
        }
        // FWHM of |<a>|^2... the dispersive quadrature peaks at +-kappa/2
        let peak = deltas
            .iter()
            .zip(&trace.response)
            .max_by(|x, y| x.1.partial_cmp(y.1).unwrap())
            .unwrap();
        assert!((peak.0.abs() - kappa / 2.0).abs() < 6e-3, "peak at {}", peak.0);
    }

    #[test]
    fn response_linear_in_drive() {
        // doubling the drive amplitude doubles the response within 1%
        let p = match preset_params(Preset::GA) {
            PresetParams::TwoBody(p) => p,
            _ => unreachable!(),
        };
        let wd = p.w_a + 2.0 * p.g;
        let (model1, readout) = two_body_model(&p, wd);
        let r1 = steady_state(&model1).unwrap().expect(&readout).re;
        let mut doubled = p;
        // rebuild with twice the drive by scaling k_a/1e3 term: emulate by
        // building the model manually
        doubled.k_a = p.k_a; // keep dissipation; scale only the drive below
        let space = FockSpace::new(vec![p.n_a, p.n_c]).unwrap();
        let a = space.annihilator(0);
        let ad = a.dagger();
        let (model_base, _) = two_body_model(&p, wd);
        let h2 = model_base
            .hamiltonian
            .add(&a.add(&ad).scale(C64::new(p.k_a / 1e3, 0.0)));
        let model2 = LindbladModel {
            hamiltonian: h2,
            collapse: model_base.collapse,
        };
        let r2 = steady_state(&model2).unwrap().expect(&readout).re;
        assert!(
            (r2 - 2.0 * r1).abs() <= 0.01 * r1.abs().max(1e-12),
            "r1 {r1:.4e}, r2 {r2:.4e}"
        );
    }

    #[test]
    fn zero_drive_gives_flat_trace() {
        let p = match preset_params(Preset::GA) {
            PresetParams::TwoBody(p) => p,
            _ => unreachable!(),
        };
        let space = FockSpace::new(vec![p.n_a, p.n_c]).unwrap();
        let a = space.annihilator(0);
        let c = space.annihilator(1);
        let drives = [p.w_a - p.g, p.w_a, p.w_a + p.g];
        let trace = sweep(
            |wd| {
                let ad = a.dagger();
                let cd = c.dagger();
                let mut h = ad.matmul(&a).scale(C64::new(p.w_a - wd, 0.0));
                h = h.add(&ad.matmul(&ad).matmul(&a).matmul(&a).scale(C64::new(-p.e_c / 2.0, 0.0)));
                h = h.add(&cd.matmul(&c).scale(C64::new(p.w_c - wd, 0.0)));
                h = h.add(&ad.matmul(&c).add(&a.matmul(&cd)).scale(C64::new(p.g, 0.0)));
                let mut collapse = LindbladModel::thermal_pair(&a, p.k_a, p.n_th_a);
                collapse.extend(LindbladModel::thermal_pair(&c, p.k_c, p.n_th_c));
                (
                    LindbladModel { hamiltonian: h, collapse },
                    a.scale(C64::new(0.0, 1.0)).add(&a.dagger().scale(C64::new(0.0, -1.0))),
                )
            },
            &drives,
        );
        for w in trace.response.windows(2) {
            assert!((w[0] - w[1]).abs() < 1e-9, "{:?}", trace.response);
        }
    }

    #[test]
    fn liouvillian_annihilates_steady_state() {
        let p = match preset_params(Preset::GA) {
            PresetParams::TwoBody(p) => p,
            _ => unreachable!(),
        };
        let (model, _) = two_body_model(&p, p.w_a);
        let rho = steady_state(&model).unwrap();
        let l = liouvillian(&model);
        let lr = l.matvec_alloc(&rho.rho);
        let res: f64 = lr.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let l_scale: f64 = l.data.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(res < 1e-9 * l_scale, "residual {res:.3e}");
    }

    #[test]
    fn hilbert_space_enlargement_stability() {
        // +1 on each dim changes the trace by < 2% at listing parameters
        let p = match preset_params(Preset::GA) {
            PresetParams::TwoBody(p) => p,
            _ => unreachable!(),
        };
        let wd = p.w_a + p.g;
        let (model, readout) = two_body_model(&p, wd);
        let r_ref = steady_state(&model).unwrap().expect(&readout).re;
        let mut bigger = p;
        bigger.n_a += 1;
        bigger.n_c += 1;
        let (model2, readout2) = two_body_model(&bigger, wd);
        let r_big = steady_state(&model2).unwrap().expect(&readout2).re;
        assert!(
            (r_ref - r_big).abs() <= 0.02 * r_big.abs(),
            "{r_ref:.5e} vs {r_big:.5e}"
        );
    }
}
