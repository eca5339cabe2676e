//! Ground-truth scenes and noisy frequency-domain measurement synthesis.
//!
//! A scene holds the radar targets (delays, Dopplers, reflectivities), the
//! communication paths, the known waveform spectrum, the message subspace
//! basis and the message coefficients. Measurements are the overlaid
//! frequency-domain samples of both channels plus circular Gaussian noise.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linop::ForwardOperator;
use crate::scalar::{cnorm, real, unit_phasor, Cx, Scalar};

/// Target signal-to-noise ratio, or an exactly noise-free run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Snr<T> {
    Db(T),
    Noiseless,
}

impl<T: Scalar> Snr<T> {
    pub fn is_noiseless(&self) -> bool {
        matches!(self, Snr::Noiseless)
    }
}

/// Dimensions and sampling controls for a synthetic scene.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneConfig<T> {
    /// Frequency samples per pulse.
    pub m: usize,
    /// Pulses / OFDM frames.
    pub p: usize,
    /// Radar targets.
    pub l: usize,
    /// Communication paths.
    pub q: usize,
    /// Message subspace dimension (J < M).
    pub j: usize,
    pub snr_db: Snr<T>,
    /// Wrap-around separation floor between target delays.
    pub min_sep_tau: T,
    /// Wrap-around separation floor between target Dopplers.
    pub min_sep_nu: T,
    pub seed: u64,
}

impl<T: Scalar> SceneConfig<T> {
    /// A scene at the desk-scale dimensions used throughout the experiments.
    pub fn new(m: usize, p: usize, l: usize, q: usize, j: usize) -> Self {
        Self {
            m,
            p,
            l,
            q,
            j,
            snr_db: Snr::Noiseless,
            min_sep_tau: real::<T>(0.0),
            min_sep_nu: real::<T>(0.0),
            seed: 0,
        }
    }

    /// Total number of unknowns N = (M+J)P.
    pub fn n_total(&self) -> usize {
        (self.m + self.j) * self.p
    }

    /// Largest target count for which the balanced Hankel lift can stay
    /// rank-deficient: L < ceil((P+1)/2).
    pub fn max_targets(&self) -> usize {
        (self.p + 2) / 2
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.p == 0 || self.j == 0 {
            return Err(Error::Config("M, P and J must be positive".into()));
        }
        if self.j >= self.m {
            return Err(Error::Config(format!(
                "J < M required, got J={} and M={}",
                self.j, self.m
            )));
        }
        if self.l >= self.max_targets() {
            return Err(Error::Config(format!(
                "L < ceil((P+1)/2) required, got L={} and P={}",
                self.l, self.p
            )));
        }
        let half = real::<T>(0.5);
        for (name, sep) in [("min_sep_tau", self.min_sep_tau), ("min_sep_nu", self.min_sep_nu)] {
            if sep < T::zero() || sep >= half {
                return Err(Error::Config(format!("{name} must lie in [0, 0.5)")));
            }
        }
        if let Snr::Db(db) = self.snr_db {
            if !db.is_finite() {
                return Err(Error::Config("snr_db must be finite".into()));
            }
        }
        Ok(())
    }
}

/// Radar channel ground truth: reflectivities and normalized delay/Doppler.
#[derive(Debug, Clone, PartialEq)]
pub struct RadarTargets<T> {
    pub beta: DVector<Cx<T>>,
    pub tau: DVector<T>,
    pub nu: DVector<T>,
}

/// Known communication channel: path gains and normalized delay/Doppler.
#[derive(Debug, Clone, PartialEq)]
pub struct CommPaths<T> {
    pub alpha: DVector<Cx<T>>,
    pub tau: DVector<T>,
    pub nu: DVector<T>,
}

/// Frequency-domain samples of the radar pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform<T> {
    pub s: DVector<Cx<T>>,
}

/// Block-diagonal real basis mapping message coefficients to symbols,
/// one M x J block per pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis<T> {
    pub blocks: Vec<DMatrix<T>>,
}

impl<T: Scalar> SubspaceBasis<T> {
    pub fn m(&self) -> usize {
        self.blocks.first().map_or(0, |b| b.nrows())
    }

    pub fn j(&self) -> usize {
        self.blocks.first().map_or(0, |b| b.ncols())
    }

    /// g = D v, applied block by block.
    pub fn apply(&self, v: &DVector<Cx<T>>) -> Result<DVector<Cx<T>>> {
        let (m, j, p) = (self.m(), self.j(), self.blocks.len());
        if v.len() != j * p {
            return Err(Error::Dimension {
                context: "SubspaceBasis::apply",
                expected: j * p,
                got: v.len(),
            });
        }
        let mut g = DVector::from_element(m * p, Complex::new(T::zero(), T::zero()));
        for (pi, block) in self.blocks.iter().enumerate() {
            for row in 0..m {
                let mut acc = Complex::new(T::zero(), T::zero());
                for col in 0..j {
                    let d = block[(row, col)];
                    let vc = v[pi * j + col];
                    acc += Complex::new(d * vc.re, d * vc.im);
                }
                g[pi * m + row] = acc;
            }
        }
        Ok(g)
    }
}

/// Unit-norm message coefficient vector (length J*P).
#[derive(Debug, Clone, PartialEq)]
pub struct MessageCoeffs<T> {
    pub v: DVector<Cx<T>>,
}

/// A fully specified ground-truth scene.
#[derive(Debug, Clone)]
pub struct Scene<T> {
    pub config: SceneConfig<T>,
    pub targets: RadarTargets<T>,
    pub paths: CommPaths<T>,
    pub waveform: Waveform<T>,
    pub basis: SubspaceBasis<T>,
    pub message: MessageCoeffs<T>,
}

impl<T: Scalar> Scene<T> {
    /// Per-pulse radar channel stacked into one MP vector.
    pub fn radar_channel(&self) -> DVector<Cx<T>> {
        let (m, p) = (self.config.m, self.config.p);
        let mut h = DVector::from_element(m * p, Complex::new(T::zero(), T::zero()));
        for pi in 0..p {
            let block = radar_channel_block(&self.targets, pi, m);
            for n in 0..m {
                h[pi * m + n] = block[n];
            }
        }
        h
    }

    /// Unknown stacking x = [h_r; v] in model units.
    pub fn x_unnormalized(&self) -> DVector<Cx<T>> {
        let h = self.radar_channel();
        let v = &self.message.v;
        let mut x = DVector::from_element(h.len() + v.len(), Complex::new(T::zero(), T::zero()));
        for i in 0..h.len() {
            x[i] = h[i];
        }
        for i in 0..v.len() {
            x[h.len() + i] = v[i];
        }
        x
    }

    /// Normalized unknown vector (1/sqrt(N)) [h_r; v] the solver estimates.
    pub fn x_true(&self) -> DVector<Cx<T>> {
        let n = self.config.n_total();
        let scale = T::one() / real::<T>(n as f64).sqrt();
        self.x_unnormalized().map(|z| z.scale(scale))
    }

    /// Transmitted message symbols g = D v (model units, length MP).
    pub fn message_g(&self) -> DVector<Cx<T>> {
        self.basis
            .apply(&self.message.v)
            .expect("scene basis and message dimensions agree")
    }
}

/// Frequency-domain measurement vector plus everything needed to score it.
#[derive(Debug, Clone)]
pub struct MeasurementSet<T> {
    pub y: DVector<Cx<T>>,
    pub sigma: T,
    pub snr_db: Snr<T>,
    /// Ground truth in normalized units, kept for scoring.
    pub x_true: DVector<Cx<T>>,
}

/// Vandermonde steering vector: entry m is exp(-j 2 pi tau m).
pub fn steering_vector<T: Scalar>(tau: T, m: usize) -> Result<DVector<Cx<T>>> {
    if tau < T::zero() || tau >= T::one() {
        return Err(Error::Domain(format!(
            "normalized delay must lie in [0,1), got {}",
            tau.to_f64_lossy()
        )));
    }
    Ok(DVector::from_fn(m, |row, _| {
        unit_phasor(tau * real::<T>(row as f64))
    }))
}

/// Radar channel at pulse p: sum of steering vectors weighted by
/// reflectivity and the per-pulse Doppler phase.
pub fn radar_channel_block<T: Scalar>(
    targets: &RadarTargets<T>,
    p: usize,
    m: usize,
) -> DVector<Cx<T>> {
    let mut h = DVector::from_element(m, Complex::new(T::zero(), T::zero()));
    let pf = real::<T>(p as f64);
    for l in 0..targets.beta.len() {
        let doppler = unit_phasor(targets.nu[l] * pf);
        let weight = targets.beta[l] * doppler;
        for n in 0..m {
            h[n] += weight * unit_phasor(targets.tau[l] * real::<T>(n as f64));
        }
    }
    h
}

/// Known comm frequency response at pulse p: entry n is
/// sum_q alpha_q exp(-j 2 pi (n tau_q + p nu_q)).
pub fn comm_response_block<T: Scalar>(
    paths: &CommPaths<T>,
    p: usize,
    m: usize,
) -> DVector<Cx<T>> {
    let mut h = DVector::from_element(m, Complex::new(T::zero(), T::zero()));
    let pf = real::<T>(p as f64);
    for q in 0..paths.alpha.len() {
        let doppler = unit_phasor(paths.nu[q] * pf);
        let weight = paths.alpha[q] * doppler;
        for n in 0..m {
            h[n] += weight * unit_phasor(paths.tau[q] * real::<T>(n as f64));
        }
    }
    h
}

fn sample_standard_normal<T: Scalar, R: Rng>(rng: &mut R) -> T {
    let x: f64 = StandardNormal.sample(rng);
    real::<T>(x)
}

/// Circularly-symmetric complex Gaussian with unit variance per entry.
fn sample_cn<T: Scalar, R: Rng>(rng: &mut R) -> Cx<T> {
    let half = real::<T>(std::f64::consts::FRAC_1_SQRT_2);
    Complex::new(
        sample_standard_normal::<T, _>(rng) * half,
        sample_standard_normal::<T, _>(rng) * half,
    )
}

fn wrap_distance<T: Scalar>(a: T, b: T) -> T {
    let d = (a - b).abs();
    d.min(T::one() - d)
}

const MAX_SEPARATION_ATTEMPTS: usize = 10_000;

/// Draw `count` points uniformly on [0,1) with pairwise wrap-around
/// separation at least `min_sep`, by rejection.
fn sample_separated<T: Scalar, R: Rng>(
    count: usize,
    min_sep: T,
    rng: &mut R,
) -> Result<DVector<T>> {
    let mut accepted: Vec<T> = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while accepted.len() < count {
        attempts += 1;
        if attempts > MAX_SEPARATION_ATTEMPTS {
            return Err(Error::Infeasible(format!(
                "could not place {count} points with wrap-around separation {} \
                 within {MAX_SEPARATION_ATTEMPTS} attempts",
                min_sep.to_f64_lossy()
            )));
        }
        let candidate = real::<T>(rng.random::<f64>());
        if accepted
            .iter()
            .all(|&a| wrap_distance(a, candidate) >= min_sep)
        {
            accepted.push(candidate);
        }
    }
    Ok(DVector::from_vec(accepted))
}

/// Draw a full ground-truth scene from the config.
///
/// Delays and Dopplers are uniform with rejection against the separation
/// floors; reflectivities are complex Gaussian normalized so the magnitudes
/// sum to one; the message is constant-modulus with QPSK phases and unit
/// norm; the waveform spectrum is standard complex normal and the basis
/// blocks are standard real normal. If the resulting stacked unknown
/// violates the per-component box bound used by the solver, reflectivities
/// and message are rescaled jointly to restore feasibility.
pub fn sample_scene<T: Scalar, R: Rng>(config: &SceneConfig<T>, rng: &mut R) -> Result<Scene<T>> {
    config.validate()?;
    let (m, p, l, q, j) = (config.m, config.p, config.l, config.q, config.j);

    let tau_r = sample_separated(l, config.min_sep_tau, rng)?;
    let nu_r = sample_separated(l, config.min_sep_nu, rng)?;
    let mut beta = DVector::from_fn(l, |_, _| sample_cn::<T, _>(rng));
    let mag_sum: T = beta.iter().map(|b| cnorm(*b)).fold(T::zero(), |a, b| a + b);
    if l > 0 {
        if mag_sum <= T::zero() {
            return Err(Error::Infeasible("degenerate zero reflectivities".into()));
        }
        beta = beta.map(|b| b.scale(T::one() / mag_sum));
    }
    let targets = RadarTargets {
        beta,
        tau: tau_r,
        nu: nu_r,
    };

    let tau_c = sample_separated(q, config.min_sep_tau, rng)?;
    let nu_c = sample_separated(q, config.min_sep_nu, rng)?;
    let alpha = DVector::from_fn(q, |_, _| sample_cn::<T, _>(rng));
    let paths = CommPaths {
        alpha,
        tau: tau_c,
        nu: nu_c,
    };

    let mut s = DVector::from_fn(m, |_, _| sample_cn::<T, _>(rng));
    for entry in s.iter_mut() {
        // Zero-probability event, but every row must carry waveform energy.
        while cnorm(*entry) == T::zero() {
            *entry = sample_cn::<T, _>(rng);
        }
    }
    let waveform = Waveform { s };

    let blocks = (0..p)
        .map(|_| DMatrix::from_fn(m, j, |_, _| sample_standard_normal::<T, _>(rng)))
        .collect();
    let basis = SubspaceBasis { blocks };

    let modulus = T::one() / real::<T>((j * p) as f64).sqrt();
    let quarter = real::<T>(std::f64::consts::FRAC_PI_4);
    let half_pi = real::<T>(std::f64::consts::FRAC_PI_2);
    let v = DVector::from_fn(j * p, |_, _| {
        let k: u8 = rng.random_range(0..4);
        let phase = quarter + half_pi * real::<T>(k as f64);
        Complex::new(phase.cos() * modulus, phase.sin() * modulus)
    });
    let message = MessageCoeffs { v };

    let mut scene = Scene {
        config: config.clone(),
        targets,
        paths,
        waveform,
        basis,
        message,
    };

    // The box bound of the solver requires every component of [h_r; v] to
    // have |Re| and |Im| at most 1. The construction guarantees it up to
    // rounding; rescale jointly if rounding pushed something over.
    let x = scene.x_unnormalized();
    let peak = x
        .iter()
        .map(|z| z.re.abs().max(z.im.abs()))
        .fold(T::zero(), |a, b| a.max(b));
    if peak > T::one() {
        let shrink = T::one() / peak;
        scene.targets.beta = scene.targets.beta.map(|b| b.scale(shrink));
        scene.message.v = scene.message.v.map(|v| v.scale(shrink));
    }

    Ok(scene)
}

/// Synthesize the measurement vector y = A(x_true) + noise, where the
/// forward operator already carries the sqrt(N) normalization.
///
/// The noise standard deviation is chosen from the target SNR using the
/// realized norm of the unnormalized unknown vector.
pub fn synthesize<T: Scalar, R: Rng>(scene: &Scene<T>, rng: &mut R) -> Result<MeasurementSet<T>> {
    let op = ForwardOperator::from_scene(scene)?;
    let x_true = scene.x_true();
    let clean = op.apply(&x_true)?;

    let (sigma, noise) = match scene.config.snr_db {
        Snr::Noiseless => (T::zero(), None),
        Snr::Db(db) => {
            let x_norm = scene.x_unnormalized().norm();
            let mp = real::<T>((scene.config.m * scene.config.p) as f64);
            let sigma = x_norm * real::<T>(10.0).powf(-db / real::<T>(20.0)) / mp.sqrt();
            let n = DVector::from_fn(clean.len(), |_, _| sample_cn::<T, _>(rng));
            (sigma, Some(n))
        }
    };

    let y = match &noise {
        Some(n) => {
            let mut y = clean.clone();
            for i in 0..y.len() {
                y[i] += n[i].scale(sigma);
            }
            y
        }
        None => clean,
    };

    Ok(MeasurementSet {
        y,
        sigma,
        snr_db: scene.config.snr_db,
        x_true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn paper_config() -> SceneConfig<f64> {
        let mut cfg = SceneConfig::new(15, 9, 2, 1, 2);
        cfg.min_sep_tau = 1.0 / 15.0;
        cfg.min_sep_nu = 1.0 / 9.0;
        cfg.seed = 7;
        cfg
    }

    #[test]
    fn steering_zero_delay_is_all_ones() {
        let a = steering_vector(0.0, 4).unwrap();
        for z in a.iter() {
            assert!((z - Complex::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn steering_half_delay_alternates() {
        let a = steering_vector(0.5, 4).unwrap();
        let expect = [1.0, -1.0, 1.0, -1.0];
        for (z, e) in a.iter().zip(expect) {
            assert!((z - Complex::new(e, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn steering_quarter_delay_quarter_turns() {
        let a = steering_vector(0.25, 3).unwrap();
        let expect = [
            Complex::new(1.0, 0.0),
            Complex::new(0.0, -1.0),
            Complex::new(-1.0, 0.0),
        ];
        for (z, e) in a.iter().zip(expect) {
            assert!((z - e).norm() < 1e-14);
        }
    }

    #[test]
    fn steering_rejects_out_of_range() {
        assert!(steering_vector(1.0, 4).is_err());
        assert!(steering_vector(-0.1, 4).is_err());
    }

    #[test]
    fn radar_block_static_target_is_all_ones() {
        let targets = RadarTargets {
            beta: DVector::from_vec(vec![Complex::new(1.0, 0.0)]),
            tau: DVector::from_vec(vec![0.0]),
            nu: DVector::from_vec(vec![0.0]),
        };
        for p in 0..3 {
            let h = radar_channel_block(&targets, p, 4);
            for z in h.iter() {
                assert!((z - Complex::new(1.0, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn radar_block_half_doppler_alternates_sign() {
        let targets = RadarTargets {
            beta: DVector::from_vec(vec![Complex::new(1.0, 0.0)]),
            tau: DVector::from_vec(vec![0.0]),
            nu: DVector::from_vec(vec![0.5]),
        };
        for p in 0..4 {
            let h = radar_channel_block(&targets, p, 3);
            let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            for z in h.iter() {
                assert!((z - Complex::new(sign, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn radar_block_two_targets_is_sum() {
        let t1 = RadarTargets {
            beta: DVector::from_vec(vec![Complex::new(0.4, 0.1)]),
            tau: DVector::from_vec(vec![0.3]),
            nu: DVector::from_vec(vec![0.7]),
        };
        let t2 = RadarTargets {
            beta: DVector::from_vec(vec![Complex::new(-0.2, 0.3)]),
            tau: DVector::from_vec(vec![0.8]),
            nu: DVector::from_vec(vec![0.2]),
        };
        let both = RadarTargets {
            beta: DVector::from_vec(vec![t1.beta[0], t2.beta[0]]),
            tau: DVector::from_vec(vec![t1.tau[0], t2.tau[0]]),
            nu: DVector::from_vec(vec![t1.nu[0], t2.nu[0]]),
        };
        let p = 2;
        let sum = radar_channel_block(&t1, p, 5) + radar_channel_block(&t2, p, 5);
        let joint = radar_channel_block(&both, p, 5);
        assert!((joint - sum).norm() < 1e-14);
    }

    #[test]
    fn comm_block_identity_path() {
        let paths = CommPaths {
            alpha: DVector::from_vec(vec![Complex::new(1.0, 0.0)]),
            tau: DVector::from_vec(vec![0.0]),
            nu: DVector::from_vec(vec![0.0]),
        };
        let h = comm_response_block(&paths, 3, 4);
        for z in h.iter() {
            assert!((z - Complex::new(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn comm_block_empty_is_zero() {
        let paths = CommPaths {
            alpha: DVector::from_vec(Vec::<Complex<f64>>::new()),
            tau: DVector::from_vec(vec![]),
            nu: DVector::from_vec(vec![]),
        };
        let h = comm_response_block(&paths, 0, 6);
        assert!(h.norm() == 0.0);
    }

    #[test]
    fn comm_block_two_paths_is_sum() {
        let p1 = CommPaths {
            alpha: DVector::from_vec(vec![Complex::new(0.5, -0.2)]),
            tau: DVector::from_vec(vec![0.1]),
            nu: DVector::from_vec(vec![0.6]),
        };
        let p2 = CommPaths {
            alpha: DVector::from_vec(vec![Complex::new(-0.3, 0.9)]),
            tau: DVector::from_vec(vec![0.9]),
            nu: DVector::from_vec(vec![0.4]),
        };
        let both = CommPaths {
            alpha: DVector::from_vec(vec![p1.alpha[0], p2.alpha[0]]),
            tau: DVector::from_vec(vec![p1.tau[0], p2.tau[0]]),
            nu: DVector::from_vec(vec![p1.nu[0], p2.nu[0]]),
        };
        let sum = comm_response_block(&p1, 1, 7) + comm_response_block(&p2, 1, 7);
        let joint = comm_response_block(&both, 1, 7);
        assert!((joint - sum).norm() < 1e-14);
    }

    #[test]
    fn sample_scene_no_targets_zeroes_radar_block() {
        let mut cfg = SceneConfig::<f64>::new(6, 4, 0, 1, 2);
        cfg.seed = 3;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let scene = sample_scene(&cfg, &mut rng).unwrap();
        let x = scene.x_true();
        let radar: f64 = (0..cfg.m * cfg.p).map(|i| x[i].norm_sqr()).sum();
        assert_eq!(radar, 0.0);
    }

    #[test]
    fn sample_scene_paper_dims_meets_normalizations() {
        let cfg = paper_config();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let scene = sample_scene(&cfg, &mut rng).unwrap();
        let beta_mag: f64 = scene.targets.beta.iter().map(|b| b.norm()).sum();
        assert!((beta_mag - 1.0).abs() < 1e-12);
        assert!((scene.message.v.norm() - 1.0).abs() < 1e-12);
        // box feasibility of the normalized unknown
        let n = cfg.n_total() as f64;
        let bound = 1.0 / n.sqrt() + 1e-15;
        for z in scene.x_true().iter() {
            assert!(z.re.abs() <= bound && z.im.abs() <= bound);
        }
        // separation floors hold
        for a in 0..cfg.l {
            for b in (a + 1)..cfg.l {
                assert!(wrap_distance(scene.targets.tau[a], scene.targets.tau[b]) >= cfg.min_sep_tau);
                assert!(wrap_distance(scene.targets.nu[a], scene.targets.nu[b]) >= cfg.min_sep_nu);
            }
        }
    }

    #[test]
    fn sample_scene_is_deterministic() {
        let cfg = paper_config();
        let s1 = sample_scene(&cfg, &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        let s2 = sample_scene(&cfg, &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        assert_eq!(s1.targets.tau, s2.targets.tau);
        assert_eq!(s1.targets.beta, s2.targets.beta);
        assert_eq!(s1.waveform.s, s2.waveform.s);
        assert_eq!(s1.message.v, s2.message.v);
        assert_eq!(s1.basis.blocks, s2.basis.blocks);
    }

    #[test]
    fn sample_scene_rejects_impossible_separation() {
        let mut cfg = SceneConfig::<f64>::new(8, 7, 3, 1, 2);
        cfg.min_sep_tau = 0.45; // three points cannot be 0.45 apart on the circle
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        match sample_scene(&cfg, &mut rng) {
            Err(Error::Infeasible(_)) => {}
            other => panic!("expected infeasible separation, got {other:?}"),
        }
    }

    #[test]
    fn synthesize_empty_scene_measures_zero() {
        let mut cfg = SceneConfig::<f64>::new(5, 3, 0, 0, 2);
        cfg.seed = 9;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let scene = sample_scene(&cfg, &mut rng).unwrap();
        let meas = synthesize(&scene, &mut rng).unwrap();
        assert!(meas.y.norm() == 0.0);
        assert_eq!(meas.sigma, 0.0);
    }

    #[test]
    fn synthesize_noiseless_matches_forward_model() {
        let cfg = paper_config();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let scene = sample_scene(&cfg, &mut rng).unwrap();
        let meas = synthesize(&scene, &mut rng).unwrap();
        let op = ForwardOperator::from_scene(&scene).unwrap();
        let clean = op.apply(&meas.x_true).unwrap();
        assert!((meas.y.clone() - clean).norm() < 1e-13);
    }

    #[test]
    fn synthesize_realized_snr_tracks_target() {
        let mut cfg = paper_config();
        cfg.snr_db = Snr::Db(28.0);
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let mut avg_db = 0.0;
        let trials = 100;
        for _ in 0..trials {
            let scene = sample_scene(&cfg, &mut rng).unwrap();
            let meas = synthesize(&scene, &mut rng).unwrap();
            let op = ForwardOperator::from_scene(&scene).unwrap();
            let clean = op.apply(&meas.x_true).unwrap();
            let noise_sq = (meas.y.clone() - clean).norm_squared();
            let x_sq = scene.x_unnormalized().norm_squared();
            avg_db += 10.0 * (x_sq / noise_sq).log10();
        }
        avg_db /= trials as f64;
        assert!(
            (avg_db - 28.0).abs() < 0.5,
            "realized SNR {avg_db:.3} dB drifted from target 28 dB"
        );
    }

    #[test]
    fn synthesize_superposition_is_linear() {
        // Two scenes sharing waveform, basis and comm channel but with
        // different unknowns: clean measurements add.
        let cfg = paper_config();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let scene_a = sample_scene(&cfg, &mut rng).unwrap();
        let mut scene_b = scene_a.clone();
        // swap in different unknowns drawn from a fresh stream
        let donor = sample_scene(&cfg, &mut ChaCha8Rng::seed_from_u64(6)).unwrap();
        scene_b.targets = donor.targets;
        scene_b.message = donor.message;

        let mut combined = scene_a.clone();
        let half = Complex::new(0.5, 0.0);
        combined.targets.beta = DVector::from_iterator(
            scene_a.targets.beta.len() + scene_b.targets.beta.len(),
            scene_a
                .targets
                .beta
                .iter()
                .chain(scene_b.targets.beta.iter())
                .map(|b| b * half),
        );
        combined.targets.tau = DVector::from_iterator(
            scene_a.targets.tau.len() + scene_b.targets.tau.len(),
            scene_a
                .targets
                .tau
                .iter()
                .chain(scene_b.targets.tau.iter())
                .copied(),
        );
        combined.targets.nu = DVector::from_iterator(
            scene_a.targets.nu.len() + scene_b.targets.nu.len(),
            scene_a
                .targets
                .nu
                .iter()
                .chain(scene_b.targets.nu.iter())
                .copied(),
        );
        combined.config.l = combined.targets.beta.len();
        combined.config.p = cfg.p; // unchanged; L grew within the rank bound? not needed for synthesis
        combined.message.v = (&scene_a.message.v + &scene_b.message.v).map(|z| z * half);

        let ya = synthesize(&scene_a, &mut rng).unwrap().y;
        let yb = synthesize(&scene_b, &mut rng).unwrap().y;
        let yc = synthesize(&combined, &mut rng).unwrap().y;
        let expect = (ya + yb).map(|z| z * half);
        assert!((yc - expect).norm() < 1e-12);
    }
}
