//! Cusp-ball volumes, fundamental-domain sampling and integral estimates.
//!
//! The closed-form volume of a stabilizer quotient of a cusp ball is
//!
//!   vol = N(a)^{-1} sqrt(disc) * 2^{n-1}/[O^{x,+} : O^{x,2}] * R_K * r^2,
//!
//! independent of the cusp. Everything else is Monte Carlo over the cusp
//! charts: in the chart at infinity the invariant measure factorizes as
//! (uniform on the translation cell) x (uniform on the unit log cell) x
//! (exp(-s) ds on the log-level s), so each chart is sampled by inverse CDF
//! with a constant importance weight and points are pushed forward through
//! the cusp matrix. Membership in the sphere of influence is decided by a
//! ball-inclusion fast path, falling back to a nearest-cusp query.
//!
//! All Monte Carlo randomness derives from one 64-bit seed through
//! per-sample counter streams, so runs are reproducible independently of the
//! thread count; aggregation follows the sample index order.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::action::cusp_matrix;
use crate::cusp::{nearest_cusps, Cusp, HPoint, SearchBudget, SearchContext, TIE_TOLERANCE};
use crate::field::Field;
use crate::ideal::{self, FractionalIdeal};
use crate::numutil::big_to_f64;
use crate::rng::stream_rng;

/// A Monte-Carlo estimate: value, 1-sigma standard error, sample count, seed.
#[derive(Debug, Clone, Serialize)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Closed-form volume of the stabilizer quotient of the ball of a-radius r
/// around any cusp.
pub fn cusp_ball_volume(field: &Field, a: &FractionalIdeal, r: f64) -> f64 {
    assert!(r > 0.0, "radius must be positive");
    let n = field.degree as i32;
    let idx = field.unit_sign_index as f64;
    a.norm_f64().recip()
        * big_to_f64(&field.discriminant).sqrt()
        * (2f64.powi(n - 1) / idx)
        * field.regulator
        * r
        * r
}

/// One cusp chart: the conjugated stabilizer data at infinity.
struct Chart {
    /// Embedded entries of the cusp matrix, per embedding.
    m_emb: Vec<[f64; 4]>,
    q_norm: f64,
    /// Embedded basis of (a q^2)^{-1}, the translation lattice.
    t_basis: Vec<Vec<f64>>,
    vol_t: f64,
    /// Truncation level: the chart covers the pull-back of the sphere.
    t_min: f64,
    /// Importance weight, constant across the chart.
    weight: f64,
    /// Above this chart level the point is inside the sphere by the
    /// ball-inclusion bound; no search is needed.
    safe_level: f64,
}

/// Sampler for the fundamental domain assembled from cusp charts.
pub struct FdSampler {
    pub field: Field,
    pub a: FractionalIdeal,
    charts: Vec<Chart>,
    ctx: SearchContext,
    /// Basis of the unit log cell (rows), shared by all charts.
    g_basis: Vec<Vec<f64>>,
    vol_g: f64,
    c_upper: f64,
}

/// One emitted sample.
#[derive(Debug, Clone)]
pub struct FdSample {
    pub tau: HPoint,
    /// Importance weight; zero when the point fell outside the sphere of
    /// influence of its chart.
    pub weight: f64,
    pub chart: usize,
    /// Chart level: N(Im sigma) of the pre-image in the infinity chart.
    pub level: f64,
    /// mu_a(tau, c_chart), from the conjugation identity.
    pub mu_chart: f64,
    /// mu_1(tau) when it was computed for the membership decision.
    pub mu1: Option<f64>,
    /// False when a search budget was exhausted for this sample.
    pub certified: bool,
}

impl FdSampler {
    pub fn new(field: &Field, a: &FractionalIdeal, reps: &[Cusp], c_upper: f64) -> Self {
        let n = field.degree;
        let n_a = a.norm_f64();
        let two_n = (2 * n) as i32;
        let mut charts = Vec::with_capacity(reps.len());
        for rep in reps {
            let (m, q) = cusp_matrix(field, rep, a).expect("cusp matrix exists");
            let q_norm = q.norm_f64();
            let b = ideal::mul(field, a, &ideal::mul(field, &q, &q));
            let b_inv = ideal::inverse(field, &b);
            let basis = b_inv.basis_elements(field);
            let t_basis: Vec<Vec<f64>> = (0..n)
                .map(|j| (0..n).map(|i| field.embed_f64(&basis[i])[j]).collect())
                .collect();
            let vol_t = crate::numutil::det_f64(&t_basis).abs();
            let t_min = (c_upper.powi(two_n) * n_a * q_norm * q_norm).recip();
            let m_emb: Vec<[f64; 4]> = {
                let ea = field.embed_f64(&m.a);
                let eb = field.embed_f64(&m.b);
                let ec = field.embed_f64(&m.c);
                let ed = field.embed_f64(&m.d);
                (0..n).map(|j| [ea[j], eb[j], ec[j], ed[j]]).collect()
            };
            charts.push(Chart {
                m_emb,
                q_norm,
                t_basis,
                vol_t,
                t_min,
                weight: 0.0, // filled below once vol_g is known
                safe_level: (q_norm * q_norm * n_a).recip(),
            });
        }
        let g_basis = field.tp_log_basis.clone();
        let vol_g = field.tp_log_covolume;
        for c in charts.iter_mut() {
            c.weight = c.vol_t * vol_g / c.t_min;
        }
        FdSampler {
            field: field.clone(),
            a: a.clone(),
            charts,
            ctx: SearchContext::new(field, a),
            g_basis,
            vol_g,
            c_upper,
        }
    }

    pub fn chart_count(&self) -> usize {
        self.charts.len()
    }

    /// Draws sample `index` of the master `seed`.
    ///
    /// `need_mu1` forces the nearest-cusp evaluation even when the
    /// ball-inclusion fast path already certifies membership.
    pub fn sample(&self, seed: u64, index: u64, need_mu1: bool) -> FdSample {
        let n = self.field.degree;
        let r = n - 1;
        let mut rng = stream_rng(seed, index);
        let chart_idx = if self.charts.len() > 1 {
            rng.gen_range(0..self.charts.len())
        } else {
            0
        };
        let chart = &self.charts[chart_idx];

        // translation cell
        let u_t: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let x: Vec<f64> = (0..n)
            .map(|j| (0..n).map(|i| u_t[i] * chart.t_basis[j][i]).sum())
            .collect();
        // unit log cell
        let u_g: Vec<f64> = (0..r).map(|_| rng.gen::<f64>()).collect();
        let v: Vec<f64> = (0..r)
            .map(|j| (0..r).map(|i| u_g[i] * self.g_basis[i][j]).sum())
            .collect();
        // level by inverse CDF of exp(-s) ds above ln t_min
        let u_s: f64 = rng.gen();
        let s = chart.t_min.ln() - (1.0 - u_s).ln();
        let level = s.exp();
        // assemble the imaginary parts
        let mut y = vec![0.0f64; n];
        let mut sum_v = 0.0;
        for j in 0..r {
            y[j] = v[j].exp();
            sum_v += v[j];
        }
        y[n - 1] = (s - sum_v).exp();

        let sigma: Vec<(f64, f64)> = (0..n).map(|j| (x[j], y[j])).collect();
        // push forward through the cusp matrix
        let tau_coords: Vec<(f64, f64)> = (0..n)
            .map(|j| {
                let [a, b, c, d] = self.charts[chart_idx].m_emb[j];
                let (sx, sy) = sigma[j];
                let num_re = a * sx + b;
                let num_im = a * sy;
                let den_re = c * sx + d;
                let den_im = c * sy;
                let den2 = den_re * den_re + den_im * den_im;
                (
                    (num_re * den_re + num_im * den_im) / den2,
                    (num_im * den_re - num_re * den_im) / den2,
                )
            })
            .collect();
        let tau = HPoint::new(tau_coords).expect("homography preserves H^n");
        let mu_chart = chart.q_norm * chart.q_norm * level;

        // sphere membership
        let mut mu1 = None;
        let mut certified = true;
        let member = if level > chart.safe_level && !need_mu1 {
            true
        } else {
            let reports = nearest_cusps(&self.ctx, &tau, 1, self.c_upper, &SearchBudget::default());
            match reports.first() {
                Some(top) => {
                    certified = top.certified;
                    mu1 = Some(top.mu.max(mu_chart));
                    mu_chart >= top.mu * (1.0 - TIE_TOLERANCE)
                }
                None => {
                    certified = false;
                    false
                }
            }
        };
        let weight = if member {
            chart.weight * self.charts.len() as f64
        } else {
            0.0
        };
        FdSample {
            tau,
            weight,
            chart: chart_idx,
            level,
            mu_chart,
            mu1,
            certified,
        }
    }

    /// Materializes a batch of samples (parallel, order-stable).
    pub fn sample_batch(&self, seed: u64, n_samples: u64, need_mu1: bool) -> Vec<FdSample> {
        (0..n_samples)
            .into_par_iter()
            .map(|i| self.sample(seed, i, need_mu1))
            .collect()
    }

    /// Total-volume estimate from sphere-membership saturation.
    pub fn total_volume(&self, seed: u64, n_samples: u64) -> McEstimate {
        let samples = self.sample_batch(seed, n_samples, false);
        mean_stderr(samples.iter().map(|s| s.weight), n_samples, seed)
    }

    pub fn vol_g(&self) -> f64 {
        self.vol_g
    }
}

/// Direct Monte-Carlo estimate of vol(stabilizer \ B(infinity, r)) in the
/// chart at infinity of the group of the ideal a, by counting the sampled
/// levels above 1/r^2. Validates the sampler against [`cusp_ball_volume`].
pub fn mc_ball_volume(
    field: &Field,
    a: &FractionalIdeal,
    r: f64,
    n_samples: u64,
    seed: u64,
) -> McEstimate {
    let reps = [Cusp::infinity(field)];
    let sampler = FdSampler::new(field, a, &reps, field.default_c_upper());
    let chart = &sampler.charts[0];
    let threshold = r.powi(-2);
    assert!(
        threshold >= chart.t_min * (1.0 - 1e-12),
        "ball must lie inside the sampled region"
    );
    let weight = chart.weight;
    let values: Vec<f64> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let n = field.degree;
            let r_dim = n - 1;
            let mut rng = stream_rng(seed, i);
            // draws must mirror FdSampler::sample exactly
            let _: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            let _: Vec<f64> = (0..r_dim).map(|_| rng.gen::<f64>()).collect();
            let u_s: f64 = rng.gen();
            let s = chart.t_min.ln() - (1.0 - u_s).ln();
            if s.exp() > threshold {
                weight
            } else {
                0.0
            }
        })
        .collect();
    mean_stderr(values.into_iter(), n_samples, seed)
}

fn mean_stderr(values: impl Iterator<Item = f64>, n: u64, seed: u64) -> McEstimate {
    let vals: Vec<f64> = values.collect();
    let nf = n as f64;
    let mean = pairwise_sum(&vals) / nf;
    let sq: Vec<f64> = vals.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&sq) / (nf - 1.0).max(1.0);
    McEstimate {
        value: mean,
        stderr: (var / nf).sqrt(),
        samples: n,
        seed,
    }
}

/// Pairwise tree summation for stable, order-deterministic accumulation.
fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        2 => v[0] + v[1],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

/// Partial volume function g at x: the volume of the part of the fundamental
/// domain at a-distance below x from its nearest cusp.
///
/// For x below sqrt(N(a)) the balls are disjointly embedded in their spheres
/// and the closed form applies, summed over the h_K cusp classes. For x
/// above c_upper^n sqrt(N(a)) the function saturates at the total volume.
/// In between the value is a Monte-Carlo estimate.
pub fn partial_volume(
    field: &Field,
    a: &FractionalIdeal,
    reps: &[Cusp],
    x: f64,
    c_upper: f64,
    mc_samples: u64,
    seed: u64,
) -> McEstimate {
    assert!(x > 0.0);
    let n_a = a.norm_f64();
    if x <= n_a.sqrt() * (1.0 + 1e-12) {
        let value = reps.len() as f64 * cusp_ball_volume(field, a, x);
        return McEstimate { value, stderr: 0.0, samples: 0, seed };
    }
    let sampler = FdSampler::new(field, a, reps, c_upper);
    let threshold = x.powi(-2); // mu_chart > 1/x^2 means inside the ball
    let samples = sampler.sample_batch(seed, mc_samples, false);
    mean_stderr(
        samples
            .iter()
            .map(|s| if s.mu_chart > threshold { s.weight } else { 0.0 }),
        mc_samples,
        seed,
    )
}

/// Normalized integral of mu_1^t over the fundamental domain, as a ratio of
/// two estimates over the same sample stream (so t = 0 returns exactly 1).
#[derive(Debug, Clone, Serialize)]
pub struct IntegralEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
    /// Fraction of samples whose nearest-cusp search was not certified.
    pub uncertified_fraction: f64,
}

pub fn integral_mu1_t(
    field: &Field,
    a: &FractionalIdeal,
    reps: &[Cusp],
    t: f64,
    n_samples: u64,
    seed: u64,
    c_upper: f64,
) -> IntegralEstimate {
    assert!((0.0..1.0).contains(&t), "t must lie in [0, 1)");
    let sampler = FdSampler::new(field, a, reps, c_upper);
    let samples = sampler.sample_batch(seed, n_samples, true);
    let mut uncertified = 0u64;
    let mut ys = Vec::with_capacity(samples.len());
    let mut xs = Vec::with_capacity(samples.len());
    for s in &samples {
        if !s.certified {
            uncertified += 1;
        }
        let mu1 = s.mu1.unwrap_or(s.mu_chart);
        let f = if t == 0.0 { 1.0 } else { mu1.powf(t) };
        ys.push(s.weight * f);
        xs.push(s.weight);
    }
    let sum_y = pairwise_sum(&ys);
    let sum_x = pairwise_sum(&xs);
    let value = sum_y / sum_x;
    // ratio-estimator linearization
    let resid: Vec<f64> = ys
        .iter()
        .zip(&xs)
        .map(|(y, x)| {
            let z = y - value * x;
            z * z
        })
        .collect();
    let nf = n_samples as f64;
    let var_z = pairwise_sum(&resid) / (nf - 1.0).max(1.0);
    let stderr = (var_z * nf).sqrt() / sum_x;
    IntegralEstimate {
        value,
        stderr,
        samples: n_samples,
        seed,
        uncertified_fraction: uncertified as f64 / nf,
    }
}

/// The two sides of the integral sandwich at a given constant c:
/// lower = N(a)^{-t} (c^{-2nt} (1 - c^{-2n}) + c^{-2n}/(1-t)),
/// upper = N(a)^{-t} / (1-t).
pub fn theorem_bounds(field: &Field, a: &FractionalIdeal, t: f64, c_val: f64) -> (f64, f64) {
    assert!((0.0..1.0).contains(&t));
    assert!(c_val >= 1.0);
    let n = field.degree as f64;
    let na_t = a.norm_f64().powf(-t);
    let c2n = c_val.powf(-2.0 * n);
    let c2nt = c_val.powf(-2.0 * n * t);
    let lower = na_t * (c2nt * (1.0 - c2n) + c2n / (1.0 - t));
    let upper = na_t / (1.0 - t);
    (lower, upper)
}

/// Scans the lower bound over c in [1, c_upper] and checks it never
/// increases (within float tolerance), so evaluating it at c_upper is valid
/// whenever the true constant is at most c_upper.
pub fn lower_bound_nonincreasing(
    field: &Field,
    a: &FractionalIdeal,
    t: f64,
    c_upper: f64,
    grid: usize,
) -> bool {
    let mut prev = f64::INFINITY;
    for i in 0..=grid {
        let c = 1.0 + (c_upper - 1.0) * i as f64 / grid as f64;
        let (lo, _) = theorem_bounds(field, a, t, c);
        if lo > prev * (1.0 + 1e-12) + 1e-15 {
            return false;
        }
        prev = lo;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{builtin, parse_field_config};

    fn sqrt5() -> Field {
        parse_field_config(builtin::Q_SQRT5).unwrap()
    }

    #[test]
    fn ball_volume_closed_form() {
        let k = sqrt5();
        let ok = FractionalIdeal::ring_of_integers(&k);
        // sqrt(5) * 2 * R_K for r = 1
        let expect = 5f64.sqrt() * 2.0 * k.regulator;
        let got = cusp_ball_volume(&k, &ok, 1.0);
        assert!((got - expect).abs() < 1e-12 * expect);
        // quadratic scaling, exact
        let v1 = cusp_ball_volume(&k, &ok, 0.37);
        let v2 = cusp_ball_volume(&k, &ok, 0.74);
        assert_eq!(v2, 4.0 * v1);
        // doubling N(a) halves the value
        let two = FractionalIdeal::principal(&k, &k.from_integer(2)).unwrap();
        assert!((cusp_ball_volume(&k, &two, 1.0) - expect / 4.0).abs() < 1e-12);
    }

    #[test]
    fn sampler_matches_closed_form_ball() {
        let k = sqrt5();
        let ok = FractionalIdeal::ring_of_integers(&k);
        for r in [0.4f64, 1.0] {
            let est = mc_ball_volume(&k, &ok, r, 40_000, 11);
            let expect = cusp_ball_volume(&k, &ok, r);
            assert!(
                (est.value - expect).abs() <= 3.0 * est.stderr,
                "r = {r}: {} vs {} (sigma {})",
                est.value,
                expect,
                est.stderr
            );
        }
    }

    #[test]
    fn sampler_reproducible() {
        let k = sqrt5();
        let ok = FractionalIdeal::ring_of_integers(&k);
        let reps = [Cusp::infinity(&k)];
        let sampler = FdSampler::new(&k, &ok, &reps, k.default_c_upper());
        let a = sampler.sample(5, 17, false);
        let b = sampler.sample(5, 17, false);
        assert_eq!(a.tau.coords, b.tau.coords);
        assert_eq!(a.weight, b.weight);
        // all levels are above the chart threshold
        let batch = sampler.sample_batch(5, 200, false);
        for s in &batch {
            assert!(s.level >= sampler.charts[0].t_min);
        }
    }

    #[test]
    fn partial_volume_closed_form_regime() {
        let k = sqrt5();
        let ok = FractionalIdeal::ring_of_integers(&k);
        let reps = [Cusp::infinity(&k)];
        // g(x)/x^2 constant for x <= sqrt(N(a))
        let g1 = partial_volume(&k, &ok, &reps, 0.3, k.default_c_upper(), 0, 0);
        let g2 = partial_volume(&k, &ok, &reps, 0.9, k.default_c_upper(), 0, 0);
        let r1 = g1.value / (0.3 * 0.3);
        let r2 = g2.value / (0.9 * 0.9);
        assert!((r1 - r2).abs() < 1e-12 * r1);
        assert_eq!(g1.stderr, 0.0);
    }

    #[test]
    fn theorem_bounds_values() {
        let k = sqrt5();
        let ok = FractionalIdeal::ring_of_integers(&k);
        // t = 0 collapses the sandwich
        let (lo, up) = theorem_bounds(&k, &ok, 0.0, 2.0);
        assert!((lo - 1.0).abs() < 1e-15 && (up - 1.0).abs() < 1e-15);
        // frozen instance: t = 1/2, c = sqrt(2) * 5^(1/4)
        let c = 2f64.sqrt() * 5f64.powf(0.25);
        let (lo, up) = theorem_bounds(&k, &ok, 0.5, c);
        assert!((up - 2.0).abs() < 1e-14);
        // lower = (1/sqrt(20)) (1 - 1/20) + 2/20
        let expect = (1.0 / 20f64.sqrt()) * (1.0 - 0.05) + 0.1;
        assert!((lo - expect).abs() < 1e-14);
        assert!((lo - 0.3124).abs() < 5e-5);
    }

    #[test]
    fn lower_bound_scan() {
        let k = sqrt5();
        let ok = FractionalIdeal::ring_of_integers(&k);
        for t in [0.0, 0.25, 0.5, 0.75, 0.9] {
            assert!(lower_bound_nonincreasing(&k, &ok, t, k.default_c_upper(), 512));
        }
    }

    #[test]
    fn integral_t0_is_exactly_one() {
        let k = sqrt5();
        let ok = FractionalIdeal::ring_of_integers(&k);
        let reps = [Cusp::infinity(&k)];
        let est = integral_mu1_t(&k, &ok, &reps, 0.0, 2_000, 3, k.default_c_upper());
        assert!((est.value - 1.0).abs() <= 1e-12);
        assert_eq!(est.stderr, 0.0);
        assert!(est.uncertified_fraction < 1e-3);
    }
}
