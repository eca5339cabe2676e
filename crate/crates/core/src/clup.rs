//! CLuP outer loop with the nuclear-norm restriction, plus the calibration
//! problems for the residual radius r and the nuclear budget s.
//!
//! Each outer round solves
//!     min -Re<x_prev, x>  s.t.  ||y - A x|| <= r,  ||H(x_h)||_* <= s,  box,
//! then renormalizes the solution to unit norm and repeats. The inner
//! problem is solved by consensus splitting: copies of the variable are
//! projected onto the individual sets and averaged, with a linear drift
//! term carrying the objective. The nuclear constraint lives on a lifted
//! matrix variable tied to the radar block through an explicit graph set.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linop::HankelLift;
use crate::prox::{
    box_violation, nuclear_norm, project_box, project_nuclear_ball,
    singular_value_soft_threshold, ProjectionToolkit,
};
use crate::scalar::{czero, real, Cx, Scalar};

/// Knobs of the consensus-splitting inner solver.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerSolverParams<T> {
    /// Iteration cap per inner solve.
    pub max_iters: usize,
    /// Consensus-movement tolerance declaring the iterate stationary.
    pub move_tol: T,
    /// Target on residual-ball and nuclear-ball violations.
    pub feas_tol: T,
    /// Target on the box violation (tighter; the output is clamped).
    pub box_tol: T,
    /// Drift step of the linear objective (and of the nuclear prox when
    /// calibrating s).
    pub step: T,
}

impl<T: Scalar> Default for InnerSolverParams<T> {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            move_tol: real(1e-7),
            feas_tol: real(1e-6),
            box_tol: real(1e-9),
            step: real(0.5),
        }
    }
}

/// How the outer loop picks its starting direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitStrategy {
    /// Normalized adjoint image A* y (default; fewer outer rounds).
    AdjointImage,
    /// Deterministic pseudo-random unit vector from the given seed.
    Random { seed: u64 },
}

/// Parameters of the CLuP outer loop.
#[derive(Debug, Clone, PartialEq)]
pub struct ClupParams<T> {
    /// Radius multiplier r = c0 * r_min (c0 >= 1).
    pub c0: T,
    /// Nuclear budget multiplier s = c1 * s_min (c1 >= 1).
    pub c1: T,
    pub max_outer: usize,
    /// Stop when successive unit directions move less than this.
    pub outer_tol: T,
    pub inner: InnerSolverParams<T>,
    pub init: InitStrategy,
    /// Optional Hankel split override (defaults to the balanced split).
    pub p1: Option<usize>,
    /// Calibrate s with the deployed radius c0*r_min (true) or with the
    /// bare minimum r_min (false).
    pub calibrate_s_at_scaled_radius: bool,
}

impl<T: Scalar> Default for ClupParams<T> {
    fn default() -> Self {
        Self {
            c0: T::one(),
            c1: T::one(),
            max_outer: 50,
            outer_tol: real(1e-6),
            inner: InnerSolverParams::default(),
            init: InitStrategy::AdjointImage,
            p1: None,
            calibrate_s_at_scaled_radius: true,
        }
    }
}

impl<T: Scalar> ClupParams<T> {
    pub fn validate(&self) -> Result<()> {
        if self.c0 < T::one() || self.c1 < T::one() {
            return Err(Error::Config(
                "c0 and c1 must be at least 1 so the calibrated sets stay nonempty".into(),
            ));
        }
        if self.max_outer == 0 || self.inner.max_iters == 0 {
            return Err(Error::Config("iteration budgets must be positive".into()));
        }
        if self.outer_tol <= T::zero() || self.inner.move_tol <= T::zero() {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// One outer round of the solver history.
#[derive(Debug, Clone)]
pub struct OuterRecord<T> {
    pub iter: usize,
    /// Attained inner objective -Re<x_prev, x_hat>.
    pub objective: T,
    pub residual_violation: T,
    pub nuclear_violation: T,
    pub box_violation: T,
    /// NMSE against ground truth when supplied.
    pub nmse: Option<T>,
    pub inner_iters: usize,
    pub inner_converged: bool,
    /// Movement of the unit direction after this round.
    pub direction_change: T,
}

/// Full outcome of a CLuP run.
#[derive(Debug, Clone)]
pub struct ClupState<T> {
    /// Last inner solution in normalized units (the estimate).
    pub x_hat: DVector<Cx<T>>,
    /// Final unit direction.
    pub x_dir: DVector<Cx<T>>,
    pub r: T,
    pub s: T,
    pub r_min: T,
    pub s_min: T,
    pub history: Vec<OuterRecord<T>>,
    pub converged: bool,
    pub outer_iters: usize,
    /// Outer rounds where the inner objective failed to decrease.
    pub monotonicity_violations: usize,
}

/// Minimum residual over the box alone (the polytope relaxation), solved by
/// projected gradient with the fixed step 1/||A||^2.
pub fn compute_r_min<T: Scalar>(tk: &ProjectionToolkit<T>, y: &DVector<Cx<T>>) -> Result<T> {
    let op = tk.op();
    if y.len() != op.dims().n_meas() {
        return Err(Error::Dimension {
            context: "compute_r_min measurements",
            expected: op.dims().n_meas(),
            got: y.len(),
        });
    }
    let b = tk.box_bound();
    let norm_sq = tk.op_norm() * tk.op_norm();
    if norm_sq <= T::zero() {
        return Ok(y.norm());
    }
    let step = T::one() / norm_sq;
    let mut x = DVector::from_element(op.dims().n_unknown(), czero::<T>());
    if y.norm() == T::zero() {
        return Ok(T::zero());
    }
    let mut f_prev: Option<T> = None;
    let rel_tol: T = real(1e-9);
    let floor: T = real(1e-13);
    let max_iters = 100_000usize;
    for _ in 0..max_iters {
        let resid = y - op.apply(&x)?;
        let f = resid.norm();
        if f <= floor {
            return Ok(f);
        }
        if let Some(fp) = f_prev {
            if (fp - f).abs() <= rel_tol * fp.max(floor) {
                return Ok(f);
            }
        }
        f_prev = Some(f);
        let grad = op.adjoint(&resid)?;
        for i in 0..x.len() {
            x[i] += grad[i].scale(step);
        }
        x = project_box(&x, b);
    }
    Err(Error::Solver(format!(
        "polytope relaxation did not converge within {max_iters} iterations"
    )))
}

/// A point of the product space the splitting operates on: the unknown
/// vector and the lifted matrix variable.
#[derive(Clone)]
struct Pt<T: Scalar> {
    x: DVector<Cx<T>>,
    z: DMatrix<Cx<T>>,
}

impl<T: Scalar> Pt<T> {
    fn scale(&self, t: T) -> Self {
        Self {
            x: self.x.map(|v| v.scale(t)),
            z: self.z.map(|v| v.scale(t)),
        }
    }

    fn add(&self, other: &Self) -> Self {
        Self {
            x: &self.x + &other.x,
            z: &self.z + &other.z,
        }
    }

    fn sub(&self, other: &Self) -> Self {
        Self {
            x: &self.x - &other.x,
            z: &self.z - &other.z,
        }
    }

    fn norm(&self) -> T {
        (self.x.norm_squared() + self.z.norm_squared()).sqrt()
    }
}

/// Warm-startable state of the consensus splitting (one copy per set).
#[derive(Clone)]
pub struct InnerState<T: Scalar> {
    copies: Vec<Pt<T>>,
}

/// Convergence report of one inner solve.
#[derive(Debug, Clone, Copy)]
pub struct InnerReport<T> {
    pub iters: usize,
    pub converged: bool,
    pub objective: T,
    pub residual_violation: T,
    pub nuclear_violation: T,
    pub box_violation: T,
}

enum BlockSet<T> {
    Box_,
    Residual { r: T },
    NuclearBall { s: T },
    Graph,
}

enum Drift<'a, T: Scalar> {
    Linear { c: &'a DVector<Cx<T>> },
    NuclearProx,
}

struct Splitting<'a, T: Scalar> {
    tk: &'a ProjectionToolkit<T>,
    lift: &'a HankelLift,
    y: &'a DVector<Cx<T>>,
    sets: Vec<BlockSet<T>>,
    drift: Drift<'a, T>,
    step: T,
}

impl<'a, T: Scalar> Splitting<'a, T> {
    fn radar_len(&self) -> usize {
        let dims = self.tk.op().dims();
        dims.m * dims.p
    }

    fn lift_of(&self, x: &DVector<Cx<T>>) -> DMatrix<Cx<T>> {
        let h = x.rows(0, self.radar_len()).into_owned();
        self.lift.lift(&h).expect("lift dims fixed by operator")
    }

    fn project_graph(&self, pt: &Pt<T>) -> Pt<T> {
        let mp = self.radar_len();
        let hz = self.lift.adjoint(&pt.z).expect("adjoint dims fixed");
        let m = self.lift.block_height();
        let mut x = pt.x.clone();
        for q in 0..(mp / m) {
            let w = real::<T>(self.lift.multiplicity(q) as f64);
            let denom = T::one() + w;
            for n in 0..m {
                let i = q * m + n;
                x[i] = (pt.x[i] + hz[i]).unscale(denom);
            }
        }
        let z = self.lift_of(&x);
        Pt { x, z }
    }

    fn project_set(&self, set: &BlockSet<T>, pt: Pt<T>) -> Pt<T> {
        match set {
            BlockSet::Box_ => Pt {
                x: project_box(&pt.x, self.tk.box_bound()),
                z: pt.z,
            },
            BlockSet::Residual { r } => Pt {
                x: self
                    .tk
                    .project_residual_ball(&pt.x, self.y, *r)
                    .expect("radius checked against the reachable floor"),
                z: pt.z,
            },
            BlockSet::NuclearBall { s } => Pt {
                x: pt.x,
                z: project_nuclear_ball(&pt.z, *s),
            },
            BlockSet::Graph => self.project_graph(&pt),
        }
    }

    fn apply_drift(&self, avg: &mut Pt<T>) {
        let k = real::<T>(self.sets.len() as f64);
        match &self.drift {
            Drift::Linear { c } => {
                let t = self.step / k;
                for i in 0..avg.x.len() {
                    avg.x[i] += c[i].scale(t);
                }
            }
            Drift::NuclearProx => {
                avg.z = singular_value_soft_threshold(&avg.z, self.step / k);
            }
        }
    }

    fn violations(&self, x: &DVector<Cx<T>>, r: T, s: Option<T>) -> (T, T, T) {
        let resid = (self.y - self.tk.op().apply(x).expect("dims fixed")).norm();
        let res_viol = (resid - r).max(T::zero());
        let nuc_viol = match s {
            Some(s) => (nuclear_norm(&self.lift_of(x)) - s).max(T::zero()),
            None => T::zero(),
        };
        let box_viol = box_violation(x, self.tk.box_bound());
        (res_viol, nuc_viol, box_viol)
    }
}

fn initial_state<T: Scalar>(split: &Splitting<'_, T>, x0: &DVector<Cx<T>>) -> InnerState<T> {
    let z = split.lift_of(x0);
    let pt = Pt { x: x0.clone(), z };
    InnerState {
        copies: vec![pt; split.sets.len()],
    }
}

fn consensus_average<T: Scalar>(copies: &[Pt<T>]) -> Pt<T> {
    let mut acc = copies[0].clone();
    for c in &copies[1..] {
        acc = acc.add(c);
    }
    acc.scale(T::one() / real::<T>(copies.len() as f64))
}

/// One consensus-splitting sweep: prox of the drifted average, then
/// reflected projections per set. Returns the candidate solution point.
fn splitting_round<T: Scalar>(split: &Splitting<'_, T>, state: &mut InnerState<T>) -> Pt<T> {
    let mut wbar = consensus_average(&state.copies);
    split.apply_drift(&mut wbar);
    let two = real::<T>(2.0);
    for (i, set) in split.sets.iter().enumerate() {
        let reflected = wbar.scale(two).sub(&state.copies[i]);
        let projected = split.project_set(set, reflected);
        state.copies[i] = state.copies[i].add(&projected.sub(&wbar));
    }
    wbar
}

/// Solve the inner CLuP problem
///     min -Re<x_prev, x>  s.t.  residual ball, nuclear ball, box.
///
/// Returns the (box-clamped) solution, a convergence report and the
/// warm-startable splitting state. Hitting the iteration cap is not an
/// error: the best iterate is returned flagged as non-converged.
pub fn solve_inner<T: Scalar>(
    tk: &ProjectionToolkit<T>,
    lift: &HankelLift,
    y: &DVector<Cx<T>>,
    x_prev: &DVector<Cx<T>>,
    r: T,
    s: T,
    params: &InnerSolverParams<T>,
    warm: Option<InnerState<T>>,
) -> Result<(DVector<Cx<T>>, InnerReport<T>, InnerState<T>)> {
    let floor = tk.residual_floor(y);
    if r < floor {
        return Err(Error::Infeasible(format!(
            "residual radius {} below reachable floor {}",
            r.to_f64_lossy(),
            floor.to_f64_lossy()
        )));
    }
    let split = Splitting {
        tk,
        lift,
        y,
        sets: vec![
            BlockSet::Box_,
            BlockSet::Residual { r },
            BlockSet::NuclearBall { s },
            BlockSet::Graph,
        ],
        drift: Drift::Linear { c: x_prev },
        step: params.step,
    };
    let mut state = warm.unwrap_or_else(|| initial_state(&split, x_prev));
    let mut prev = consensus_average(&state.copies);
    let mut report = InnerReport {
        iters: 0,
        converged: false,
        objective: T::zero(),
        residual_violation: T::zero(),
        nuclear_violation: T::zero(),
        box_violation: T::zero(),
    };
    let mut wbar = prev.clone();
    for iter in 1..=params.max_iters {
        wbar = splitting_round(&split, &mut state);
        let (res_v, nuc_v, box_v) = split.violations(&wbar.x, r, Some(s));
        let movement = wbar.sub(&prev).norm();
        prev = wbar.clone();
        report.iters = iter;
        report.residual_violation = res_v;
        report.nuclear_violation = nuc_v;
        report.box_violation = box_v;
        let half = real::<T>(0.5);
        if res_v <= params.feas_tol * half
            && nuc_v <= params.feas_tol * half
            && box_v <= params.box_tol
            && movement <= params.move_tol * wbar.norm().max(T::one())
        {
            report.converged = true;
            break;
        }
    }
    let x_out = project_box(&wbar.x, tk.box_bound());
    report.objective = -x_prev.dotc(&x_out).re;
    let (res_v, nuc_v, box_v) = split.violations(&x_out, r, Some(s));
    report.residual_violation = res_v;
    report.nuclear_violation = nuc_v;
    report.box_violation = box_v;
    Ok((x_out, report, state))
}

/// Minimum nuclear norm of the lifted radar block over the residual ball
/// and the box: the calibration problem for the budget s.
pub fn compute_s_min<T: Scalar>(
    tk: &ProjectionToolkit<T>,
    lift: &HankelLift,
    y: &DVector<Cx<T>>,
    r: T,
    params: &InnerSolverParams<T>,
) -> Result<T> {
    let floor = tk.residual_floor(y);
    if r < floor {
        return Err(Error::Infeasible(format!(
            "residual radius {} below reachable floor {}",
            r.to_f64_lossy(),
            floor.to_f64_lossy()
        )));
    }
    let split = Splitting {
        tk,
        lift,
        y,
        sets: vec![BlockSet::Box_, BlockSet::Residual { r }, BlockSet::Graph],
        drift: Drift::NuclearProx,
        step: params.step,
    };
    let x0 = DVector::from_element(tk.op().dims().n_unknown(), czero::<T>());
    let mut state = initial_state(&split, &x0);
    let mut objective = T::zero();
    let mut last_check = T::max_value().unwrap_or_else(T::one);
    let rel_tol: T = real(1e-6);
    let window = 25usize;
    let mut feasible_and_stationary = false;
    let mut best_res_viol = T::max_value().unwrap_or_else(T::one);
    let mut stall = 0usize;
    let mut x_best = x0.clone();
    for iter in 1..=params.max_iters {
        let wbar = splitting_round(&split, &mut state);
        let (res_v, _, box_v) = split.violations(&wbar.x, r, None);
        objective = nuclear_norm(&split.lift_of(&wbar.x));
        if res_v < best_res_viol - params.feas_tol {
            best_res_viol = res_v;
            stall = 0;
        } else {
            stall += 1;
        }
        x_best = wbar.x.clone();
        if iter % window == 0 {
            let drift = (objective - last_check).abs();
            let feasible = res_v <= params.feas_tol && box_v <= params.feas_tol;
            if feasible && drift <= rel_tol * objective.max(T::one()) {
                feasible_and_stationary = true;
                break;
            }
            last_check = objective;
        }
        if stall > 2_000 && res_v > params.feas_tol * real::<T>(10.0) {
            return Err(Error::Infeasible(format!(
                "nuclear calibration cannot reach the residual ball (gap {})",
                res_v.to_f64_lossy()
            )));
        }
    }
    if !feasible_and_stationary {
        objective = nuclear_norm(&split.lift_of(&project_box(&x_best, tk.box_bound())));
    }
    Ok(objective.max(T::zero()))
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn pseudo_random_direction<T: Scalar>(n: usize, seed: u64) -> DVector<Cx<T>> {
    let mut state = seed;
    let mut v = DVector::from_element(n, czero::<T>());
    for i in 0..n {
        let a = splitmix64(&mut state) as f64 / u64::MAX as f64;
        let b = splitmix64(&mut state) as f64 / u64::MAX as f64;
        v[i] = Complex::new(real::<T>(2.0 * a - 1.0), real::<T>(2.0 * b - 1.0));
    }
    let norm = v.norm();
    if norm > T::zero() {
        v = v.map(|z| z.unscale(norm));
    }
    v
}

/// Run the full CLuP pipeline: calibrate r and s, then iterate inner solves
/// with renormalization until the direction settles.
///
/// The returned estimate is the last inner solution (not renormalized), in
/// the same normalized units as the ground truth vector.
pub fn run_clup<T: Scalar>(
    tk: &ProjectionToolkit<T>,
    y: &DVector<Cx<T>>,
    params: &ClupParams<T>,
    truth: Option<&DVector<Cx<T>>>,
) -> Result<ClupState<T>> {
    params.validate()?;
    let dims = tk.op().dims();
    let lift = match params.p1 {
        Some(p1) => HankelLift::with_split(dims.m, dims.p, p1, dims.p + 1 - p1)?,
        None => HankelLift::balanced(dims.m, dims.p),
    };

    let r_min = compute_r_min(tk, y)?;
    let r = params.c0 * r_min;
    let calib_r = if params.calibrate_s_at_scaled_radius {
        r
    } else {
        r_min
    };
    let s_min = compute_s_min(tk, &lift, y, calib_r, &params.inner)?;
    let s = params.c1 * s_min;

    let mut x_prev = match params.init {
        InitStrategy::AdjointImage => {
            let a = tk.op().adjoint(y)?;
            let norm = a.norm();
            if norm > T::zero() {
                a.map(|z| z.unscale(norm))
            } else {
                pseudo_random_direction(dims.n_unknown(), 0)
            }
        }
        InitStrategy::Random { seed } => pseudo_random_direction(dims.n_unknown(), seed),
    };

    let mut history: Vec<OuterRecord<T>> = Vec::new();
    let mut x_hat = x_prev.clone();
    let mut warm: Option<InnerState<T>> = None;
    let mut converged = false;
    let mut monotonicity_violations = 0usize;
    let mut prev_objective: Option<T> = None;

    for iter in 1..=params.max_outer {
        let (sol, rep, state) =
            solve_inner(tk, &lift, y, &x_prev, r, s, &params.inner, warm.take())?;
        warm = Some(state);
        x_hat = sol;

        let norm = x_hat.norm();
        let x_next = if norm > T::zero() {
            x_hat.map(|z| z.unscale(norm))
        } else {
            x_prev.clone()
        };
        let change = (&x_next - &x_prev).norm();
        if let Some(prev) = prev_objective {
            if rep.objective > prev + params.inner.feas_tol {
                monotonicity_violations += 1;
            }
        }
        prev_objective = Some(rep.objective);
        history.push(OuterRecord {
            iter,
            objective: rep.objective,
            residual_violation: rep.residual_violation,
            nuclear_violation: rep.nuclear_violation,
            box_violation: rep.box_violation,
            nmse: truth.map(|t| (&x_hat - t).norm() / t.norm()),
            inner_iters: rep.iters,
            inner_converged: rep.converged,
            direction_change: change,
        });
        x_prev = x_next;
        if change <= params.outer_tol {
            converged = true;
            break;
        }
    }

    Ok(ClupState {
        x_hat,
        x_dir: x_prev,
        r,
        s,
        r_min,
        s_min,
        outer_iters: history.len(),
        history,
        converged,
        monotonicity_violations,
    })
}
