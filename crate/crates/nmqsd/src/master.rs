//! Right-hand side and fixed-step integration of the convolution-less
//! master equation
//!
//! `d rho/dt = -i[H(t), rho] + [L, rho F*(t) L^dag] + [F(t) L rho, L^dag]`
//!
//! with `L = a1 + a2` and `H(t) = Omega (n1 + n2) + k(t) (a1 - a2 + a1^dag -
//! a2^dag)^2`. Expanding the commutators:
//!
//! `d rho/dt = -i[H, rho] + 2 Re F * L rho L^dag - F L^dag L rho
//!             - F* rho L^dag L`.

use std::io::{Read, Write};

use crate::coefficients::CoefficientTrajectory;
use crate::control::ControlSchedule;
use crate::hilbert::{self, TruncationSpec};
use crate::sparse::SparseOp;
use crate::{CMatrix, Error, Result, C64};
use num_complex::Complex64;

/// Operators shared read-only across a run (and across trajectories).
pub struct MasterOperators {
    pub trunc: TruncationSpec,
    pub omega: f64,
    /// Free part `Omega (n1 + n2)`.
    pub h_free: SparseOp,
    /// Control quadratic `(a1 - a2 + a1^dag - a2^dag)^2`, multiplied by k(t).
    pub h_control: SparseOp,
    pub l: SparseOp,
    pub l_dag: SparseOp,
    /// `L^dag L`.
    pub ldl: SparseOp,
}

impl MasterOperators {
    pub fn new(omega: f64, trunc: &TruncationSpec) -> Self {
        let h_free = hilbert::system_hamiltonian(omega, 0.0, trunc);
        let h_full = hilbert::system_hamiltonian(omega, 1.0, trunc);
        let l = hilbert::lindblad_operator(trunc);
        let ldag = l.adjoint();
        let ldl = &ldag * &l;
        Self {
            trunc: *trunc,
            omega,
            h_free: SparseOp::from_dense(&h_free),
            h_control: SparseOp::from_dense(&(h_full - h_free)),
            l: SparseOp::from_dense(&l),
            l_dag: SparseOp::from_dense(&ldag),
            ldl: SparseOp::from_dense(&ldl),
        }
    }

    pub fn dim(&self) -> usize {
        self.trunc.dim()
    }
}

/// The master-equation right-hand side at coefficient value `F` and coupling
/// `k`; returns a freshly allocated matrix.
pub fn me_rhs(ops: &MasterOperators, rho: &CMatrix, f: C64, k: f64) -> CMatrix {
    let d = rho.nrows();
    let mut out = CMatrix::zeros(d, d);
    let minus_i = C64::new(0.0, -1.0);
    let plus_i = C64::new(0.0, 1.0);
    // -i [H, rho]
    ops.h_free.mul_left_acc(minus_i, rho, &mut out);
    ops.h_free.mul_right_acc(plus_i, rho, &mut out);
    if k != 0.0 {
        ops.h_control.mul_left_acc(minus_i * k, rho, &mut out);
        ops.h_control.mul_right_acc(plus_i * k, rho, &mut out);
    }
    // 2 Re F * L rho L^dag
    let mut lrho = CMatrix::zeros(d, d);
    ops.l.mul_left_acc(C64::new(1.0, 0.0), rho, &mut lrho);
    ops.l_dag
        .mul_right_acc(C64::new(2.0 * f.re, 0.0), &lrho, &mut out);
    // -F L^dag L rho - F* rho L^dag L
    ops.ldl.mul_left_acc(-f, rho, &mut out);
    ops.ldl.mul_right_acc(-f.conj(), rho, &mut out);
    out
}

#[derive(Debug, Clone)]
pub struct MasterRun {
    pub rho0: CMatrix,
    pub trunc: TruncationSpec,
    pub omega: f64,
    pub t_end: f64,
    pub dt: f64,
    pub coefficient: CoefficientTrajectory,
    pub schedule: ControlSchedule,
    /// Snapshot every `stride` steps (the initial state is always included).
    pub stride: usize,
}

impl MasterRun {
    pub fn validate(&self) -> Result<()> {
        if self.dt <= 0.0 || self.t_end <= 0.0 {
            return Err(Error::Config(
                "master run: dt and t_end must be positive".into(),
            ));
        }
        if self.stride == 0 {
            return Err(Error::Config("master run: stride must be >= 1".into()));
        }
        if self.t_end > self.coefficient.t_end() + 1e-9 {
            return Err(Error::Config(
                "master run: coefficient grid ends before t_end".into(),
            ));
        }
        self.schedule.validate()?;
        if self.rho0.nrows() != self.trunc.dim() {
            return Err(Error::Config("master run: rho0 dimension mismatch".into()));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

#[derive(Debug, Clone)]
pub struct MasterOutput {
    pub times: Vec<f64>,
    pub snapshots: Vec<CMatrix>,
    pub max_trace_drift: f64,
    pub max_hermiticity_deviation: f64,
    pub max_leakage: f64,
}

const TRACE_ABORT: f64 = 1e-6;

/// Classical fixed-step 4th-order integration with F(t) interpolated
/// linearly, Hermitian symmetrization each step, and trace / leakage
/// monitoring (aborts beyond 1e-6 trace drift or 1e-3 leakage).
pub fn integrate_master(run: &MasterRun) -> Result<MasterOutput> {
    run.validate()?;
    let ops = MasterOperators::new(run.omega, &run.trunc);
    integrate_master_with(run, &ops)
}

/// As `integrate_master` but reusing prebuilt operators.
pub fn integrate_master_with(run: &MasterRun, ops: &MasterOperators) -> Result<MasterOutput> {
    let dt = run.dt;
    let steps = run.steps();
    let trace0 = run.rho0.trace().re;
    let mut rho = hilbert::hermitize(&run.rho0);

    let mut times = Vec::new();
    let mut snapshots = Vec::new();
    let mut max_trace_drift: f64 = 0.0;
    let mut max_herm: f64 = 0.0;
    let mut max_leak: f64 = 0.0;

    let mut record = |step: usize, rho: &CMatrix| {
        times.push(step as f64 * dt);
        snapshots.push(rho.clone());
    };
    record(0, &rho);

    for step in 0..steps {
        let t = step as f64 * dt;
        let f1 = run.coefficient.value_at(t);
        let f2 = run.coefficient.value_at(t + 0.5 * dt);
        let f3 = run.coefficient.value_at(t + dt);
        let k1c = run.schedule.evaluate(t);
        let k2c = run.schedule.evaluate(t + 0.5 * dt);
        let k3c = run.schedule.evaluate(t + dt);

        let k1 = me_rhs(ops, &rho, f1, k1c);
        let k2 = me_rhs(ops, &(&rho + &k1 * C64::new(0.5 * dt, 0.0)), f2, k2c);
        let k3 = me_rhs(ops, &(&rho + &k2 * C64::new(0.5 * dt, 0.0)), f2, k2c);
        let k4 = me_rhs(ops, &(&rho + &k3 * C64::new(dt, 0.0)), f3, k3c);
        rho += (k1 + k2 * Complex64::new(2.0, 0.0) + k3 * Complex64::new(2.0, 0.0) + k4)
            * C64::new(dt / 6.0, 0.0);

        // enforce Hermiticity, track how much it drifted
        let herm_dev = max_abs(&(&rho - rho.adjoint()));
        max_herm = max_herm.max(0.5 * herm_dev);
        rho = hilbert::hermitize(&rho);

        let drift = (rho.trace().re - trace0).abs();
        max_trace_drift = max_trace_drift.max(drift);
        if drift > TRACE_ABORT {
            return Err(Error::RunFailure(format!(
                "master integration aborted at t = {:.6}: trace drift {:.3e} exceeds {TRACE_ABORT:.0e}",
                t + dt,
                drift
            )));
        }
        let leak = hilbert::rho_leakage(&rho, &run.trunc);
        max_leak = max_leak.max(leak);
        if leak > hilbert::LEAKAGE_ERROR {
            return Err(Error::RunFailure(format!(
                "master integration aborted at t = {:.6}: truncation leakage {:.3e} exceeds {:.0e}; increase levels_per_mode",
                t + dt,
                leak,
                hilbert::LEAKAGE_ERROR
            )));
        }

        if (step + 1) % run.stride == 0 || step + 1 == steps {
            record(step + 1, &rho);
        }
    }

    Ok(MasterOutput {
        times,
        snapshots,
        max_trace_drift,
        max_hermiticity_deviation: max_herm,
        max_leakage: max_leak,
    })
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

const RHO_DUMP_MAGIC: u32 = 0x4e4d_5144; // "NMQD"

/// Raw snapshot dump: 16-byte header (magic u32, dim u32, count u64, all
/// little-endian) followed by column-major complex doubles.
pub fn dump_rho_binary<W: Write>(mut w: W, snapshots: &[CMatrix]) -> Result<()> {
    let d = snapshots.first().map(|m| m.nrows()).unwrap_or(0);
    w.write_all(&RHO_DUMP_MAGIC.to_le_bytes())?;
    w.write_all(&(d as u32).to_le_bytes())?;
    w.write_all(&(snapshots.len() as u64).to_le_bytes())?;
    for snap in snapshots {
        for v in snap.iter() {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn load_rho_binary<R: Read>(mut r: R) -> Result<Vec<CMatrix>> {
    let mut head = [0u8; 16];
    r.read_exact(&mut head)?;
    let magic = u32::from_le_bytes(head[0..4].try_into().unwrap());
    if magic != RHO_DUMP_MAGIC {
        return Err(Error::Config("rho dump: bad magic".into()));
    }
    let d = u32::from_le_bytes(head[4..8].try_into().unwrap()) as usize;
    let count = u64::from_le_bytes(head[8..16].try_into().unwrap()) as usize;
    let mut out = Vec::with_capacity(count);
    let mut buf = vec![0u8; d * d * 16];
    for _ in 0..count {
        r.read_exact(&mut buf)?;
        let mut m = CMatrix::zeros(d, d);
        for (idx, chunk) in buf.chunks_exact(16).enumerate() {
            let re = f64::from_le_bytes(chunk[0..8].try_into().unwrap());
            let im = f64::from_le_bytes(chunk[8..16].try_into().unwrap());
            m[(idx % d, idx / d)] = C64::new(re, im);
        }
        out.push(m);
    }
    Ok(out)
}
