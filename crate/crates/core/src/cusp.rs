//! Distances to cusps, adelic heights, and the nearest-cusp search.
//!
//! A cusp is a projective point [alpha : beta] of P^1(K) with integral
//! coordinates. For a fractional ideal a, the distance data comes from
//!
//!   mu_a(tau, [alpha:beta]) =
//!       N(alpha O_K + beta a^{-1})^2 N(Im tau) / |N(-beta tau + alpha)|^2,
//!
//! whose inverse square root is the a-distance from tau to the cusp. The
//! ideal norm is exact; the archimedean product is evaluated in f64.
//!
//! The nearest-cusp search enumerates candidate pairs with beta in a and
//! alpha in O_K. Every cusp admits such a representative whose gcd ideal
//! q = alpha O_K + beta a^{-1} is integral of norm at most the Minkowski
//! bound, and the pruning radii below are derived from that worst case, so
//! an exhausted enumeration certifies the reported maxima.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::Zero;
use serde::Serialize;

use crate::field::{Field, FieldElement};
use crate::ideal::{self, FractionalIdeal};
use crate::numutil::{common_denominator, format_rational, rat_to_f64};

#[derive(Debug, thiserror::Error)]
pub enum CuspError {
    #[error("cusp [0:0] is not a projective point")]
    ZeroVector,
    #[error("cusp coordinates must be integral")]
    NotIntegral,
    #[error("archimedean factor underflowed to zero; precision bug for points in H^n")]
    CuspAtPoint,
    #[error("point has a non-positive imaginary part")]
    NotUpperHalfPlane,
    #[error("enumeration budget exceeded before certification")]
    BudgetExceeded,
}

/// A point of H^n: n complex coordinates with positive imaginary parts, plus
/// the precision the coordinates are trusted to.
#[derive(Debug, Clone, PartialEq)]
pub struct HPoint {
    pub coords: Vec<(f64, f64)>,
    pub prec_bits: u32,
}

impl HPoint {
    pub fn new(coords: Vec<(f64, f64)>) -> Result<Self, CuspError> {
        if coords.iter().any(|&(_, y)| !(y > 0.0) || !y.is_finite()) {
            return Err(CuspError::NotUpperHalfPlane);
        }
        Ok(HPoint { coords, prec_bits: 53 })
    }

    pub fn degree(&self) -> usize {
        self.coords.len()
    }

    /// Product of the imaginary parts.
    pub fn norm_imag(&self) -> f64 {
        self.coords.iter().map(|&(_, y)| y).product()
    }

    pub fn imag(&self) -> Vec<f64> {
        self.coords.iter().map(|&(_, y)| y).collect()
    }

    pub fn real(&self) -> Vec<f64> {
        self.coords.iter().map(|&(x, _)| x).collect()
    }
}

/// A cusp [alpha : beta] with integral coordinates, not both zero.
///
/// Equality is projective: alpha beta' - alpha' beta = 0 exactly.
#[derive(Debug, Clone)]
pub struct Cusp {
    pub alpha: FieldElement,
    pub beta: FieldElement,
}

impl Cusp {
    /// Builds a cusp from integral coordinates.
    pub fn new(alpha: FieldElement, beta: FieldElement) -> Result<Self, CuspError> {
        if alpha.is_zero() && beta.is_zero() {
            return Err(CuspError::ZeroVector);
        }
        if !alpha.is_integral() || !beta.is_integral() {
            return Err(CuspError::NotIntegral);
        }
        Ok(Cusp { alpha, beta })
    }

    /// Builds a cusp from arbitrary K-coordinates by clearing denominators
    /// and stripping the integer content (the cusp is unchanged).
    pub fn from_k_pair(alpha: &FieldElement, beta: &FieldElement) -> Result<Self, CuspError> {
        if alpha.is_zero() && beta.is_zero() {
            return Err(CuspError::ZeroVector);
        }
        let mut all: Vec<BigRational> = alpha.coords.clone();
        all.extend(beta.coords.iter().cloned());
        let d = common_denominator(&all);
        let scale = BigRational::from_integer(d);
        let ints: Vec<BigInt> = all.iter().map(|c| (c * &scale).numer().clone()).collect();
        let mut g = BigInt::zero();
        for v in &ints {
            g = num::Integer::gcd(&g, v);
        }
        let n = alpha.coords.len();
        let mk = |slice: &[BigInt]| {
            FieldElement::new(
                slice
                    .iter()
                    .map(|v| BigRational::from_integer(v / &g))
                    .collect(),
            )
        };
        Ok(Cusp { alpha: mk(&ints[..n]), beta: mk(&ints[n..]) })
    }

    /// The cusp at infinity, [1 : 0].
    pub fn infinity(field: &Field) -> Self {
        Cusp { alpha: field.one(), beta: field.zero() }
    }

    pub fn is_infinity(&self) -> bool {
        self.beta.is_zero()
    }

    /// Exact projective equality.
    pub fn projectively_equal(&self, field: &Field, other: &Cusp) -> bool {
        let lhs = field.mul(&self.alpha, &other.beta);
        let rhs = field.mul(&other.alpha, &self.beta);
        lhs == rhs
    }

    /// Canonical projective key: the slope beta/alpha, or the point [0:1].
    pub fn key(&self, field: &Field) -> CuspKey {
        if self.alpha.is_zero() {
            CuspKey::AlphaZero
        } else {
            let inv = field.inv(&self.alpha).expect("alpha non-zero");
            CuspKey::Slope(field.mul(&self.beta, &inv).coords)
        }
    }

    /// The gcd ideal q = alpha O_K + beta a^{-1} attached to the cusp.
    pub fn q_ideal(&self, field: &Field, a_inv: &FractionalIdeal) -> FractionalIdeal {
        ideal::from_generators(
            field,
            &[self.alpha.clone(), self.beta.clone()],
            Some(&[FractionalIdeal::ring_of_integers(field), a_inv.clone()]),
        )
        .expect("cusp coordinates are not both zero")
    }
}

/// Projective equivalence class key for hashing and dedup.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CuspKey {
    AlphaZero,
    Slope(Vec<BigRational>),
}

/// The involution [x : y] -> [y : -x] of P^1(K).
pub fn iota(field: &Field, c: &Cusp) -> Cusp {
    Cusp { alpha: c.beta.clone(), beta: field.neg(&c.alpha) }
}

/// |N(-beta tau + alpha)|^2 as a product over the embeddings.
fn archimedean_denominator(field: &Field, tau: &HPoint, alpha: &FieldElement, beta: &FieldElement) -> f64 {
    let ea = field.embed_f64(alpha);
    let eb = field.embed_f64(beta);
    let mut prod = 1.0;
    for (j, &(x, y)) in tau.coords.iter().enumerate() {
        let re = ea[j] - eb[j] * x;
        let im = eb[j] * y;
        prod *= re * re + im * im;
    }
    prod
}

/// The mu function: exact gcd-ideal norm squared, times N(Im tau), divided
/// by the squared archimedean norm. Invariant under rescaling of the pair.
pub fn mu(field: &Field, tau: &HPoint, c: &Cusp, a: &FractionalIdeal) -> Result<f64, CuspError> {
    let a_inv = ideal::inverse(field, a);
    mu_with_inverse(field, tau, c, &a_inv)
}

/// As [`mu`] with the inverse ideal precomputed by the caller.
pub fn mu_with_inverse(
    field: &Field,
    tau: &HPoint,
    c: &Cusp,
    a_inv: &FractionalIdeal,
) -> Result<f64, CuspError> {
    let q = c.q_ideal(field, a_inv);
    let nq = q.norm_f64();
    let denom = archimedean_denominator(field, tau, &c.alpha, &c.beta);
    if denom == 0.0 {
        return Err(CuspError::CuspAtPoint);
    }
    Ok(nq * nq * tau.norm_imag() / denom)
}

/// Height of a non-zero vector (alpha, beta) in the rank-2 adelic space
/// attached to (a, tau), straight from the adelic definition: finite part
/// N(alpha O_K + beta a)^{-1/n}, archimedean part
/// prod_j (y_j^{-1/2} |sigma_j(alpha) tau_j + sigma_j(beta)|)^{1/n}.
pub fn adelic_height(
    field: &Field,
    tau: &HPoint,
    a: &FractionalIdeal,
    alpha: &FieldElement,
    beta: &FieldElement,
) -> Result<f64, CuspError> {
    if alpha.is_zero() && beta.is_zero() {
        return Err(CuspError::ZeroVector);
    }
    let n = field.degree as f64;
    let finite = ideal::two_generator_norm(field, alpha, beta, a)
        .map_err(|_| CuspError::ZeroVector)?;
    let finite_part = rat_to_f64(&finite).powf(-1.0 / n);
    let ea = field.embed_f64(alpha);
    let eb = field.embed_f64(beta);
    let mut inf_part = 1.0;
    for (j, &(x, y)) in tau.coords.iter().enumerate() {
        let re = ea[j] * x + eb[j];
        let im = ea[j] * y;
        let modulus = (re * re + im * im).sqrt();
        inf_part *= (modulus / y.sqrt()).powf(1.0 / n);
    }
    Ok(finite_part * inf_part)
}

/// Height of the whole space: N(a)^{-1/n}, independent of tau.
pub fn total_space_height(field: &Field, a: &FractionalIdeal) -> f64 {
    a.norm_f64().powf(-1.0 / (field.degree as f64))
}

/// Result of a nearest-cusp query.
#[derive(Debug, Clone)]
pub struct MuReport {
    pub cusp: Cusp,
    pub mu: f64,
    pub rank: u8,
    pub enumeration_bound_used: f64,
    pub certified: bool,
}

impl MuReport {
    pub fn to_json(&self, prec_bits: u32) -> serde_json::Value {
        serde_json::json!({
            "cusp": {
                "alpha": self.cusp.alpha.coords.iter().map(format_rational).collect::<Vec<_>>(),
                "beta": self.cusp.beta.coords.iter().map(format_rational).collect::<Vec<_>>(),
            },
            "mu": self.mu,
            "a_distance": self.mu.powf(-0.5),
            "rank": self.rank,
            "enumeration_bound_used": self.enumeration_bound_used,
            "certified": self.certified,
            "precision_bits": prec_bits,
        })
    }
}

/// Serializable form used by the command-line reports.
#[derive(Debug, Clone, Serialize)]
pub struct MuReportRecord {
    pub alpha: Vec<String>,
    pub beta: Vec<String>,
    pub mu: f64,
    pub a_distance: f64,
    pub rank: u8,
    pub enumeration_bound_used: f64,
    pub certified: bool,
    pub precision_bits: u32,
}

impl From<(&MuReport, u32)> for MuReportRecord {
    fn from((r, prec): (&MuReport, u32)) -> Self {
        MuReportRecord {
            alpha: r.cusp.alpha.coords.iter().map(format_rational).collect(),
            beta: r.cusp.beta.coords.iter().map(format_rational).collect(),
            mu: r.mu,
            a_distance: r.mu.powf(-0.5),
            rank: r.rank,
            enumeration_bound_used: r.enumeration_bound_used,
            certified: r.certified,
            precision_bits: prec,
        }
    }
}

/// Relative tolerance treating two mu values as tied.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Node budget for one nearest-cusp query.
#[derive(Debug, Clone, Copy)]
pub struct SearchBudget {
    pub max_nodes: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_nodes: 20_000_000 }
    }
}

/// Precomputed data for nearest-cusp searches over a fixed (field, a).
///
/// The per-candidate hot path (gcd-ideal norms and projective dedup keys)
/// runs entirely in machine integers; the exact rational layer is only
/// touched when a report is materialized.
pub struct SearchContext {
    pub field: Field,
    pub a: FractionalIdeal,
    pub a_inv: FractionalIdeal,
    pub n_a: f64,
    /// Worst-case minimal norm of an integral ideal over the ideal classes
    /// (the Minkowski bound, floored).
    pub class_norm_bound: f64,
    /// Embedding columns of the basis of a (beta lattice).
    beta_emb: Vec<Vec<f64>>,
    beta_emb_inv: Vec<Vec<f64>>,
    beta_basis: Vec<FieldElement>,
    /// Inverse of the (n-1)x(n-1) system solving for unit exponents.
    unit_solve: Vec<Vec<f64>>,
    /// Balancing blow-up: |sigma_j beta| <= c_bal |Norm beta|^{1/n} for the
    /// unit-canonical representative.
    c_bal: f64,
    /// Structure constants of the order, [i*n*n + j*n + k].
    table: Vec<i64>,
    /// Integer basis matrix of d_a * a (row-major) and d_a itself.
    a_hnf: Vec<i64>,
    a_denom: i64,
    /// Integer basis matrix of D * a^{-1} (row-major) and D itself.
    ainv_hnf: Vec<i64>,
    ainv_denom: i64,
    /// (d_a * D)^n as f64, the norm rescaling of the integer q-lattice.
    q_scale_pow: f64,
}

impl SearchContext {
    pub fn new(field: &Field, a: &FractionalIdeal) -> Self {
        use num::ToPrimitive;
        let n = field.degree;
        let a_inv = ideal::inverse(field, a);
        let beta_basis = a.basis_elements(field);
        let beta_emb: Vec<Vec<f64>> = (0..n)
            .map(|j| (0..n).map(|i| field.embed_f64(&beta_basis[i])[j]).collect())
            .collect();
        let beta_emb_inv = crate::numutil::invert_f64(&beta_emb).expect("full-rank ideal");
        let unit_logs = field.unit_logs.clone();
        let r = n - 1;
        let solve = if r == 0 {
            Vec::new()
        } else {
            let m: Vec<Vec<f64>> = (0..r)
                .map(|j| (0..r).map(|i| unit_logs[i][j]).collect())
                .collect();
            crate::numutil::invert_f64(&m).expect("independent unit logs")
        };
        let c_red: f64 = unit_logs
            .iter()
            .map(|l| l.iter().fold(0.0f64, |m, v| m.max(v.abs())))
            .sum();
        let c_bal = (c_red * (1.0 + 1e-9)).exp() * (1.0 + 1e-9);
        let mink = minkowski_bound(field);
        let to_i64 =
            |m: &crate::matrix::IMat| -> Vec<i64> {
                m.data.iter().map(|x| x.to_i64().expect("lattice entry fits i64")).collect()
            };
        let a_denom = a.denom.to_i64().expect("denominator fits i64");
        let ainv_denom = a_inv.denom.to_i64().expect("denominator fits i64");
        let q_scale = (a_denom * ainv_denom) as f64;
        SearchContext {
            field: field.clone(),
            a: a.clone(),
            a_inv: a_inv.clone(),
            n_a: a.norm_f64(),
            class_norm_bound: mink.floor().max(1.0),
            beta_emb,
            beta_emb_inv,
            beta_basis,
            unit_solve: solve,
            c_bal,
            table: field.structure_constants_i64(),
            a_hnf: to_i64(&a.hnf),
            a_denom,
            ainv_hnf: to_i64(&a_inv.hnf),
            ainv_denom,
            q_scale_pow: q_scale.powi(n as i32),
        }
    }

    /// Coordinates of d_a * beta over the integral basis.
    fn beta_scaled_coords(&self, bc: &[i64]) -> Vec<i128> {
        let n = self.field.degree;
        (0..n)
            .map(|k| (0..n).map(|i| self.a_hnf[k * n + i] as i128 * bc[i] as i128).sum())
            .collect()
    }

    /// Multiplication matrix (column-major action) of an element with i128
    /// coordinates over the integral basis.
    fn mul_matrix_i128(&self, coords: &[i128]) -> Vec<i128> {
        let n = self.field.degree;
        let mut m = vec![0i128; n * n]; // m[k*n + j] = coeff of omega_k in x*omega_j
        for i in 0..n {
            let ci = coords[i];
            if ci == 0 {
                continue;
            }
            for j in 0..n {
                for k in 0..n {
                    m[k * n + j] += ci * self.table[(i * n + j) * n + k] as i128;
                }
            }
        }
        m
    }

    /// Exact norm of q = alpha O_K + beta a^{-1} for a candidate pair given
    /// by integer coordinates (alpha over the integral basis, beta over the
    /// basis of a), through an integer Hermite reduction.
    fn q_norm(&self, ac: &[i64], bc: &[i64]) -> f64 {
        let n = self.field.degree;
        let scale = (self.a_denom * self.ainv_denom) as i128;
        let mut cols: Vec<Vec<i128>> = Vec::with_capacity(2 * n);
        if ac.iter().any(|&c| c != 0) {
            let acc: Vec<i128> = ac.iter().map(|&c| c as i128).collect();
            let m = self.mul_matrix_i128(&acc);
            for j in 0..n {
                cols.push((0..n).map(|k| m[k * n + j] * scale).collect());
            }
        }
        if bc.iter().any(|&c| c != 0) {
            let bd = self.beta_scaled_coords(bc);
            let m = self.mul_matrix_i128(&bd);
            // columns of (d_a beta) * (D a^{-1}): multiply by the integer
            // basis columns of D a^{-1}
            for j in 0..n {
                let lam: Vec<i128> = (0..n).map(|k| self.ainv_hnf[k * n + j] as i128).collect();
                let col: Vec<i128> = (0..n)
                    .map(|k| (0..n).map(|i| m[k * n + i] * lam[i]).sum())
                    .collect();
                cols.push(col);
            }
        }
        let det = lattice_det_i128(n, cols).expect("candidate pair is non-zero");
        det as f64 / self.q_scale_pow
    }

    /// Canonical projective key of the candidate pair, integer-only.
    fn candidate_key(&self, ac: &[i64], bc: &[i64]) -> IntKey {
        let n = self.field.degree;
        if ac.iter().all(|&c| c == 0) {
            return IntKey::AlphaZero;
        }
        let acc: Vec<i128> = ac.iter().map(|&c| c as i128).collect();
        let m = self.mul_matrix_i128(&acc);
        let adj = adjugate_i128(n, &m);
        let det = det_i128(n, &m);
        let bd = self.beta_scaled_coords(bc);
        // v = adj(Mul(alpha)) * (d_a beta): coordinates of N(alpha) beta/alpha * d_a
        let mut v: Vec<i128> = (0..n)
            .map(|k| (0..n).map(|i| adj[k * n + i] * bd[i]).sum())
            .collect();
        let mut den = det * self.a_denom as i128;
        // primitive form with positive denominator
        let mut g = den.unsigned_abs();
        for x in &v {
            g = gcd_u128(g, x.unsigned_abs());
        }
        let g = g.max(1) as i128;
        for x in v.iter_mut() {
            *x /= g;
        }
        den /= g;
        if den < 0 {
            den = -den;
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
        IntKey::Slope(v, den)
    }

    /// Exponent coordinates of the trace-zero log vector of beta over the
    /// unit log basis.
    fn unit_coordinates(&self, emb: &[f64]) -> Vec<f64> {
        let n = self.field.degree;
        let r = n - 1;
        if r == 0 {
            return Vec::new();
        }
        let mean: f64 = emb.iter().map(|v| v.abs().ln()).sum::<f64>() / n as f64;
        let reduced: Vec<f64> = (0..r).map(|j| emb[j].abs().ln() - mean).collect();
        (0..r)
            .map(|i| (0..r).map(|j| self.unit_solve[i][j] * reduced[j]).sum())
            .collect()
    }

    /// True when beta is the unit- and sign-canonical representative among
    /// its associates: unit exponents in [0, 1) (with a small tolerance
    /// window so borderline cusps are kept on both sides) and the first
    /// non-zero integer coordinate positive.
    fn is_canonical(&self, coords: &[i64], emb: &[f64]) -> bool {
        match coords.iter().find(|&&c| c != 0) {
            Some(&c) if c < 0 => return false,
            None => return false,
            _ => {}
        }
        let t = self.unit_coordinates(emb);
        t.iter().all(|&ti| (-1e-9..1.0 + 1e-9).contains(&ti))
    }
}

/// Minkowski bound n!/n^n sqrt(disc) for a totally real field: every ideal
/// class contains an integral ideal of norm below it.
pub fn minkowski_bound(field: &Field) -> f64 {
    let n = field.degree as u32;
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    fact / (field.degree as f64).powi(field.degree as i32)
        * crate::numutil::big_to_f64(&field.discriminant).sqrt()
}

/// Integer projective key: the slope beta/alpha as a primitive integer
/// vector with positive denominator, or the alpha = 0 class.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IntKey {
    AlphaZero,
    Slope(Vec<i128>, i128),
}

/// Euclidean lattice determinant: reduces 2n integer columns to an upper
/// triangular basis and returns the absolute product of the pivots.
fn lattice_det_i128(n: usize, mut cols: Vec<Vec<i128>>) -> Option<i128> {
    let mut prod: i128 = 1;
    let mut active: Vec<usize> = (0..cols.len()).collect();
    for row in (0..n).rev() {
        loop {
            let nz: Vec<usize> = active
                .iter()
                .copied()
                .filter(|&j| cols[j][row] != 0)
                .collect();
            if nz.is_empty() {
                return None;
            }
            if nz.len() == 1 {
                prod = prod.checked_mul(cols[nz[0]][row].unsigned_abs() as i128)?;
                active.retain(|&j| j != nz[0]);
                break;
            }
            let mut small = nz[0];
            for &j in &nz[1..] {
                if cols[j][row].unsigned_abs() < cols[small][row].unsigned_abs() {
                    small = j;
                }
            }
            for &j in &nz {
                if j == small {
                    continue;
                }
                let q = div_round_i128(cols[j][row], cols[small][row]);
                if q != 0 {
                    for r in 0..=row {
                        cols[j][r] -= q * cols[small][r];
                    }
                }
            }
        }
    }
    Some(prod)
}

fn div_round_i128(a: i128, b: i128) -> i128 {
    let q = a.div_euclid(b);
    let r = a - q * b; // 0 <= r < |b|
    if 2 * r >= b.abs() {
        q + b.signum()
    } else {
        q
    }
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn det_i128(n: usize, m: &[i128]) -> i128 {
    match n {
        1 => m[0],
        2 => m[0] * m[3] - m[1] * m[2],
        3 => {
            m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
                + m[2] * (m[3] * m[7] - m[4] * m[6])
        }
        _ => {
            // cofactor expansion along the first row; fields here are small
            let mut det = 0i128;
            for j in 0..n {
                let minor = minor_i128(n, m, 0, j);
                let sign = if j % 2 == 0 { 1 } else { -1 };
                det += sign * m[j] * det_i128(n - 1, &minor);
            }
            det
        }
    }
}

fn minor_i128(n: usize, m: &[i128], skip_r: usize, skip_c: usize) -> Vec<i128> {
    let mut out = Vec::with_capacity((n - 1) * (n - 1));
    for r in 0..n {
        if r == skip_r {
            continue;
        }
        for c in 0..n {
            if c == skip_c {
                continue;
            }
            out.push(m[r * n + c]);
        }
    }
    out
}

/// Adjugate (transpose cofactor matrix) of a small integer matrix.
fn adjugate_i128(n: usize, m: &[i128]) -> Vec<i128> {
    if n == 1 {
        return vec![1];
    }
    let mut adj = vec![0i128; n * n];
    for r in 0..n {
        for c in 0..n {
            let minor = minor_i128(n, m, r, c);
            let sign = if (r + c) % 2 == 0 { 1 } else { -1 };
            adj[c * n + r] = sign * det_i128(n - 1, &minor);
        }
    }
    adj
}

struct Candidates {
    /// Key-deduplicated candidates with their coordinates and mu values.
    entries: std::collections::HashMap<IntKey, (Vec<i64>, Vec<i64>, f64)>,
    nodes: u64,
    budget_hit: bool,
}

impl Candidates {
    fn push(&mut self, key: IntKey, ac: &[i64], bc: &[i64], mu: f64) {
        use std::collections::hash_map::Entry;
        match self.entries.entry(key) {
            Entry::Occupied(mut e) => {
                if mu > e.get().2 {
                    e.get_mut().2 = mu;
                }
            }
            Entry::Vacant(e) => {
                e.insert((ac.to_vec(), bc.to_vec(), mu));
            }
        }
    }
}

/// Enumerates every cusp with mu_a(tau, .) >= mu_t (up to the tie tolerance),
/// plus the cusp at infinity unconditionally.
fn enumerate_candidates(
    ctx: &SearchContext,
    tau: &HPoint,
    mu_t: f64,
    budget: &SearchBudget,
) -> Candidates {
    let field = &ctx.field;
    let n = field.degree;
    let nim = tau.norm_imag();
    let mut out = Candidates {
        entries: std::collections::HashMap::new(),
        nodes: 0,
        budget_hit: false,
    };

    // infinity first: q = O_K, so mu is exactly N(Im tau)
    let one_coords: Vec<i64> = {
        use num::ToPrimitive;
        field
            .one()
            .coords
            .iter()
            .map(|c| c.to_integer().to_i64().expect("coords of 1 fit i64"))
            .collect()
    };
    let zero_coords = vec![0i64; n];
    let inf_key = ctx.candidate_key(&one_coords, &zero_coords);
    out.push(inf_key, &one_coords, &zero_coords, nim);

    let mu_eff = mu_t * (1.0 - TIE_TOLERANCE);
    let m_enum = ctx.class_norm_bound;
    let bnorm = m_enum / mu_eff.sqrt();
    let beta_box = ctx.c_bal * bnorm.powf(1.0 / n as f64) * (1.0 + 1e-9);
    let r2 = m_enum * m_enum * nim / mu_eff * (1.0 + 1e-9);

    // integer ranges for beta over the basis of a
    let beta_bounds: Vec<i64> = (0..n)
        .map(|i| {
            let b: f64 = (0..n).map(|j| ctx.beta_emb_inv[i][j].abs() * beta_box).sum();
            (b * (1.0 + 1e-9)).floor() as i64
        })
        .collect();

    let mut coords = vec![0i64; n];
    let mut stack_emb = vec![vec![0.0f64; n]; n + 1];
    enumerate_beta(
        ctx,
        tau,
        &mut out,
        &beta_bounds,
        beta_box,
        bnorm,
        r2,
        nim,
        mu_eff,
        budget,
        &mut coords,
        &mut stack_emb,
        0,
    );
    out
}

#[allow(clippy::too_many_arguments)]
fn enumerate_beta(
    ctx: &SearchContext,
    tau: &HPoint,
    out: &mut Candidates,
    bounds: &[i64],
    beta_box: f64,
    bnorm: f64,
    r2: f64,
    nim: f64,
    mu_eff: f64,
    budget: &SearchBudget,
    coords: &mut Vec<i64>,
    partial: &mut Vec<Vec<f64>>,
    level: usize,
) {
    let field = &ctx.field;
    let n = field.degree;
    if out.budget_hit {
        return;
    }
    if level == n {
        out.nodes += 1;
        if out.nodes > budget.max_nodes {
            out.budget_hit = true;
            return;
        }
        if coords.iter().all(|&c| c == 0) {
            return;
        }
        let emb = partial[n].clone();
        if emb.iter().any(|v| v.abs() > beta_box) {
            return;
        }
        if !ctx.is_canonical(coords, &emb) {
            return;
        }
        let norm_beta: f64 = emb.iter().map(|v| v.abs()).product();
        if norm_beta > bnorm * (1.0 + 1e-6) {
            return;
        }
        handle_beta(ctx, tau, out, coords, &emb, r2, nim, mu_eff, budget);
        return;
    }
    // interval pruning: embeddings reachable from the remaining coordinates
    for v in -bounds[level]..=bounds[level] {
        if out.budget_hit {
            return;
        }
        coords[level] = v;
        for j in 0..n {
            partial[level + 1][j] = partial[level][j] + v as f64 * ctx.beta_emb[j][level];
        }
        // prune when some embedding is unreachable within the box
        let mut feasible = true;
        for j in 0..n {
            let mut slack = 0.0;
            for i in (level + 1)..n {
                slack += bounds[i] as f64 * ctx.beta_emb[j][i].abs();
            }
            if partial[level + 1][j].abs() - slack > beta_box {
                feasible = false;
                break;
            }
        }
        if !feasible {
            continue;
        }
        enumerate_beta(
            ctx, tau, out, bounds, beta_box, bnorm, r2, nim, mu_eff, budget, coords, partial,
            level + 1,
        );
    }
    coords[level] = 0;
}

/// For a fixed beta, enumerate the alpha box and evaluate candidates.
#[allow(clippy::too_many_arguments)]
fn handle_beta(
    ctx: &SearchContext,
    tau: &HPoint,
    out: &mut Candidates,
    beta_coords: &[i64],
    beta_emb: &[f64],
    r2: f64,
    nim: f64,
    mu_eff: f64,
    budget: &SearchBudget,
) {
    let n = ctx.field.degree;
    // lower bounds d_j^2 of the archimedean factors
    let d2: Vec<f64> = (0..n)
        .map(|j| {
            let d = beta_emb[j] * tau.coords[j].1;
            d * d
        })
        .collect();
    let d2_prod: f64 = d2.iter().product();
    if d2_prod > r2 {
        return;
    }
    // per-embedding radii and centers
    let mut centers = vec![0.0; n];
    let mut radii = vec![0.0; n];
    for j in 0..n {
        let others = d2_prod / d2[j];
        let rj2 = r2 / others;
        centers[j] = beta_emb[j] * tau.coords[j].0;
        radii[j] = rj2.sqrt() * (1.0 + 1e-9);
    }
    // integer ranges for alpha over the integral basis
    let lo_hi: Vec<(i64, i64)> = (0..n)
        .map(|i| {
            let mut lo = 0.0;
            let mut hi = 0.0;
            for j in 0..n {
                let inv = ctx.field.emb_inv_f64[i][j];
                let a = inv * (centers[j] - radii[j]);
                let b = inv * (centers[j] + radii[j]);
                lo += a.min(b);
                hi += a.max(b);
            }
            ((lo - 1e-9).floor() as i64, (hi + 1e-9).ceil() as i64)
        })
        .collect();

    let mut alpha_coords = vec![0i64; n];
    let mut partial = vec![vec![0.0f64; n]; n + 1];
    alpha_dfs(
        ctx, out, beta_coords, &d2, &centers, &lo_hi, r2, nim, mu_eff, budget,
        &mut alpha_coords, &mut partial, 0,
    );
}

#[allow(clippy::too_many_arguments)]
fn alpha_dfs(
    ctx: &SearchContext,
    out: &mut Candidates,
    beta_coords: &[i64],
    d2: &[f64],
    centers: &[f64],
    lo_hi: &[(i64, i64)],
    r2: f64,
    nim: f64,
    mu_eff: f64,
    budget: &SearchBudget,
    coords: &mut Vec<i64>,
    partial: &mut Vec<Vec<f64>>,
    level: usize,
) {
    let field = &ctx.field;
    let n = field.degree;
    if out.budget_hit {
        return;
    }
    if level == n {
        out.nodes += 1;
        if out.nodes > budget.max_nodes {
            out.budget_hit = true;
            return;
        }
        let emb = &partial[n];
        let mut denom = 1.0;
        for j in 0..n {
            let re = emb[j] - centers[j];
            denom *= re * re + d2[j];
        }
        if denom > r2 {
            return;
        }
        // cheap upper bound on mu with the worst-case class norm
        let cheap = ctx.class_norm_bound * ctx.class_norm_bound * nim / denom;
        if cheap < mu_eff {
            return;
        }
        let nq = ctx.q_norm(coords, beta_coords);
        let mu_val = nq * nq * nim / denom;
        if mu_val >= mu_eff {
            let key = ctx.candidate_key(coords, beta_coords);
            out.push(key, coords, beta_coords, mu_val);
        }
        return;
    }
    for v in lo_hi[level].0..=lo_hi[level].1 {
        if out.budget_hit {
            return;
        }
        coords[level] = v;
        for j in 0..n {
            partial[level + 1][j] = partial[level][j] + v as f64 * field.emb_f64[j][level];
        }
        // product lower-bound pruning over the remaining coordinate ranges
        let mut lower = 1.0;
        for j in 0..n {
            let mut slack = 0.0;
            for i in (level + 1)..n {
                slack += lo_hi[i].0.abs().max(lo_hi[i].1.abs()) as f64 * field.emb_f64[j][i].abs();
            }
            let dist = (partial[level + 1][j] - centers[j]).abs() - slack;
            let f = if dist > 0.0 { dist * dist + d2[j] } else { d2[j] };
            lower *= f;
        }
        if lower > r2 {
            continue;
        }
        out.nodes += 1;
        if out.nodes > budget.max_nodes {
            out.budget_hit = true;
            return;
        }
        alpha_dfs(
            ctx, out, beta_coords, d2, centers, lo_hi, r2, nim, mu_eff, budget, coords, partial,
            level + 1,
        );
    }
    coords[level] = 0;
}

fn materialize(field: &Field, basis: &[FieldElement], coords: &[i64]) -> FieldElement {
    let mut x = field.zero();
    for (i, b) in basis.iter().enumerate() {
        if coords[i] != 0 {
            x = field.add(&x, &field.scale(b, &crate::numutil::rat_from_i64(coords[i])));
        }
    }
    x
}

fn materialize_integral(coords: &[i64]) -> FieldElement {
    FieldElement::new(coords.iter().map(|&c| crate::numutil::rat_from_i64(c)).collect())
}

/// Finds the top-k (k = 1 or 2) values of mu_a(tau, .) over the cusps.
///
/// The first pass prunes with the unconditional lower bound
/// mu_1 >= 1/(c_upper^{2n} N(a)); when the runner-up falls below that
/// threshold a second pass reruns the enumeration at the level guaranteed
/// for mu_2 by the product bound. Reports are certified when no budget was
/// exhausted, meaning the pruning radii alone prove completeness.
pub fn nearest_cusps(
    ctx: &SearchContext,
    tau: &HPoint,
    k: usize,
    c_upper: f64,
    budget: &SearchBudget,
) -> Vec<MuReport> {
    assert!(k == 1 || k == 2, "k must be 1 or 2");
    let field = &ctx.field;
    let two_n = 2 * field.degree as i32;
    let b_low = (c_upper.powi(two_n) * ctx.n_a).recip();

    let mut cands = enumerate_candidates(ctx, tau, b_low, budget);
    let mut bound_used = b_low;
    let (mut best, mut second) = top_two(&cands);

    if k == 2 {
        let need_second_pass = match &second {
            Some(s) => s.2 < b_low,
            None => true,
        };
        if need_second_pass && !cands.budget_hit {
            let mu1 = best.as_ref().map(|b| b.2).unwrap_or(b_low);
            let mut t2 = b_low * b_low / mu1;
            if let Some(s) = &second {
                t2 = t2.max(s.2 * (1.0 - 1e-6));
            }
            let t2 = t2 * (1.0 - 1e-9);
            if t2 < b_low {
                cands = enumerate_candidates(ctx, tau, t2, budget);
                bound_used = t2;
                let (b2, s2) = top_two(&cands);
                best = b2;
                second = s2;
            }
        }
    }

    let certified = !cands.budget_hit;
    let mut reports = Vec::new();
    if let Some((ac, bc, mu1)) = best {
        reports.push(MuReport {
            cusp: materialize_cusp(ctx, &ac, &bc),
            mu: mu1,
            rank: 1,
            enumeration_bound_used: bound_used,
            certified,
        });
        if k == 2 {
            if let Some((ac2, bc2, mut mu2)) = second {
                // ties within tolerance are reported as exact ties
                if (mu1 - mu2).abs() <= TIE_TOLERANCE * mu1 {
                    mu2 = mu1;
                }
                reports.push(MuReport {
                    cusp: materialize_cusp(ctx, &ac2, &bc2),
                    mu: mu2,
                    rank: 2,
                    enumeration_bound_used: bound_used,
                    certified,
                });
            }
        }
    }
    reports
}

fn materialize_cusp(ctx: &SearchContext, ac: &[i64], bc: &[i64]) -> Cusp {
    let field = &ctx.field;
    let alpha = materialize_integral(ac);
    let beta = materialize(field, &ctx.beta_basis, bc);
    Cusp::from_k_pair(&alpha, &beta).expect("candidate pair is non-zero")
}

/// Largest entry and largest entry projectively distinct from it.
#[allow(clippy::type_complexity)]
fn top_two(
    cands: &Candidates,
) -> (Option<(Vec<i64>, Vec<i64>, f64)>, Option<(Vec<i64>, Vec<i64>, f64)>) {
    let mut best: Option<(Vec<i64>, Vec<i64>, f64)> = None;
    let mut second: Option<(Vec<i64>, Vec<i64>, f64)> = None;
    for (ac, bc, mu) in cands.entries.values() {
        if best.as_ref().map(|b| *mu > b.2).unwrap_or(true) {
            second = best.take();
            best = Some((ac.clone(), bc.clone(), *mu));
        } else if second.as_ref().map(|s| *mu > s.2).unwrap_or(true) {
            second = Some((ac.clone(), bc.clone(), *mu));
        }
    }
    (best, second)
}

/// Exhaustive evaluation of mu over all pairs with coordinates in a box of
/// half-width H (alpha over the integral basis, beta over the basis of a).
/// Ground-truth oracle for the pruned search; results are projectively
/// deduplicated and sorted by decreasing mu.
pub fn brute_force_nearest(
    field: &Field,
    tau: &HPoint,
    a: &FractionalIdeal,
    h: i64,
) -> Vec<MuReport> {
    use std::collections::HashMap;
    let n = field.degree;
    let a_inv = ideal::inverse(field, a);
    let beta_basis = a.basis_elements(field);
    let mut seen: HashMap<CuspKey, (Cusp, f64)> = HashMap::new();

    let mut alpha_coords = vec![0i64; n];
    let mut beta_coords = vec![0i64; n];
    fn rec(
        bounds: i64,
        coords: &mut Vec<i64>,
        level: usize,
        f: &mut impl FnMut(&[i64]),
    ) {
        if level == coords.len() {
            f(coords);
            return;
        }
        for v in -bounds..=bounds {
            coords[level] = v;
            rec(bounds, coords, level + 1, f);
        }
        coords[level] = 0;
    }

    let mut alphas: Vec<FieldElement> = Vec::new();
    rec(h, &mut alpha_coords, 0, &mut |c| {
        alphas.push(materialize_integral(c));
    });
    let mut betas: Vec<FieldElement> = Vec::new();
    rec(h, &mut beta_coords, 0, &mut |c| {
        betas.push(materialize(field, &beta_basis, c));
    });

    for alpha in &alphas {
        for beta in &betas {
            if alpha.is_zero() && beta.is_zero() {
                continue;
            }
            let Ok(cusp) = Cusp::from_k_pair(alpha, beta) else { continue };
            let key = cusp.key(field);
            if seen.contains_key(&key) {
                continue;
            }
            let mu_val = mu_with_inverse(field, tau, &cusp, &a_inv).expect("regular point");
            seen.insert(key, (cusp, mu_val));
        }
    }
    let mut list: Vec<(Cusp, f64)> = seen.into_values().collect();
    list.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    let top = list.first().map(|e| e.1).unwrap_or(0.0);
    list.into_iter()
        .map(|(cusp, m)| MuReport {
            cusp,
            mu: m,
            rank: if m >= top * (1.0 - TIE_TOLERANCE) { 1 } else { 2 },
            enumeration_bound_used: h as f64,
            certified: false,
        })
        .collect()
}

/// Membership in the sphere of influence of c: mu_a(tau, c) is the maximum
/// over all cusps, boundaries included (tie tolerance applies).
pub fn sphere_membership(
    ctx: &SearchContext,
    tau: &HPoint,
    c: &Cusp,
    c_upper: f64,
    budget: &SearchBudget,
) -> Result<bool, CuspError> {
    let reports = nearest_cusps(ctx, tau, 1, c_upper, budget);
    let Some(top) = reports.first() else {
        return Err(CuspError::BudgetExceeded);
    };
    if !top.certified {
        return Err(CuspError::BudgetExceeded);
    }
    let mu_c = mu_with_inverse(&ctx.field, tau, c, &ctx.a_inv)?;
    Ok(mu_c >= top.mu * (1.0 - TIE_TOLERANCE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{builtin, parse_field_config};

    fn sqrt5() -> Field {
        parse_field_config(builtin::Q_SQRT5).unwrap()
    }

    fn hp(coords: &[(f64, f64)]) -> HPoint {
        HPoint::new(coords.to_vec()).unwrap()
    }

    fn ii() -> HPoint {
        hp(&[(0.0, 1.0), (0.0, 1.0)])
    }

    #[test]
    fn mu_at_infinity_is_norm_imag() {
        let k = sqrt5();
        let ok = FractionalIdeal::ring_of_integers(&k);
        let tau = hp(&[(0.3, 2.0), (-1.2, 0.7)]);
        let inf = Cusp::infinity(&k);
        let m = mu(&k, &tau, &inf, &ok).unwrap();
        assert!((m - tau.norm_imag()).abs() < 1e-14);
        // independent of the ideal
        let two = FractionalIdeal::principal(&k, &k.from_integer(2)).unwrap();
        let m2 = mu(&k, &tau, &inf, &two).unwrap();
        assert!((m2 - tau.norm_imag()).abs() < 1e-14);
    }

    #[test]
    fn mu_at_zero_cusp() {
        let k = sqrt5();
        let ok = FractionalIdeal::ring_of_integers(&k);
        let zero = Cusp::new(k.zero(), k.one()).unwrap();
        let m = mu(&k, &ii(), &zero, &ok).unwrap();
        assert!((m - 1.0).abs() < 1e-14);
        // (2i, 2i): mu = 4/16
        let m = mu(&k, &hp(&[(0.0, 2.0), (0.0, 2.0)]), &zero, &ok).unwrap();
        assert!((m - 0.25).abs() < 1e-14);
    }

    #[test]
    fn mu_projective_invariance() {
        let k = sqrt5();
        let ok = FractionalIdeal::ring_of_integers(&k);
        let tau = hp(&[(0.4, 1.3), (0.1, 0.8)]);
        let c1 = Cusp::new(k.theta(), k.from_integer(2)).unwrap();
        let two_alpha = k.mul(&k.from_integer(2), &k.theta());
        let c2 = Cusp::new(two_alpha, k.from_integer(4)).unwrap();
        assert!(c1.projectively_equal(&k, &c2));
        let m1 = mu(&k, &tau, &c1, &ok).unwrap();
        let m2 = mu(&k, &tau, &c2, &ok).unwrap();
        assert!((m1 - m2).abs() <= 1e-12 * m1.abs());
    }

    #[test]
    fn iota_involution() {
        let k = sqrt5();
        let inf = Cusp::infinity(&k);
        let img = iota(&k, &inf);
        let zero = Cusp::new(k.zero(), k.one()).unwrap();
        assert!(img.projectively_equal(&k, &zero));
        assert!(iota(&k, &zero).projectively_equal(&k, &inf));
        let c = Cusp::new(k.theta(), k.from_integer(2)).unwrap();
        assert!(iota(&k, &iota(&k, &c)).projectively_equal(&k, &c));
    }

    #[test]
    fn adelic_height_basics() {
        let k = sqrt5();
        let ok = FractionalIdeal::ring_of_integers(&k);
        let h = adelic_height(&k, &ii(), &ok, &k.one(), &k.zero()).unwrap();
        assert!((h - 1.0).abs() < 1e-14);
        assert!((total_space_height(&k, &ok) - 1.0).abs() < 1e-15);
        assert!(adelic_height(&k, &ii(), &ok, &k.zero(), &k.zero()).is_err());
    }

    #[test]
    fn height_mu_identity() {
        // H([alpha:beta]) = N(a)^{-1/n} mu_a(tau, iota([alpha:beta]))^{-1/2n}
        let k = sqrt5();
        let n = k.degree as f64;
        let ideals = vec![
            FractionalIdeal::ring_of_integers(&k),
            FractionalIdeal::principal(&k, &k.from_integer(2)).unwrap(),
            crate::ideal::codifferent(&k),
        ];
        let taus = [
            hp(&[(0.0, 1.0), (0.0, 1.0)]),
            hp(&[(0.7, 0.4), (-0.3, 2.5)]),
            hp(&[(-1.1, 3.0), (0.2, 0.3)]),
        ];
        let pairs = [(1i64, 0i64, 0i64, 1i64), (2, 1, 1, 0), (3, -1, 0, 2), (1, 1, 1, 1)];
        for a in &ideals {
            let na = a.norm_f64();
            for tau in &taus {
                for &(a0, a1, b0, b1) in &pairs {
                    let alpha = FieldElement::from_i64(2, &[a0, a1]);
                    let beta = FieldElement::from_i64(2, &[b0, b1]);
                    let h = adelic_height(&k, tau, a, &alpha, &beta).unwrap();
                    let c = Cusp::new(alpha, beta).unwrap();
                    let m = mu(&k, tau, &iota(&k, &c), a).unwrap();
                    let expect = na.powf(-1.0 / n) * m.powf(-1.0 / (2.0 * n));
                    assert!(
                        (h - expect).abs() <= 1e-10 * expect,
                        "pair ({a0},{a1};{b0},{b1}): {h} vs {expect}"
                    );
                }
            }
        }
    }

    #[test]
    fn brute_force_small_box() {
        let k = sqrt5();
        let ok = FractionalIdeal::ring_of_integers(&k);
        let list = brute_force_nearest(&k, &ii(), &ok, 1);
        assert!((list[0].mu - 1.0).abs() < 1e-12);
        // the tie between infinity and zero is present
        assert!((list[1].mu - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nearest_at_i_i() {
        let k = sqrt5();
        let ok = FractionalIdeal::ring_of_integers(&k);
        let ctx = SearchContext::new(&k, &ok);
        let reports = nearest_cusps(&ctx, &ii(), 2, k.default_c_upper(), &SearchBudget::default());
        assert_eq!(reports.len(), 2);
        assert!((reports[0].mu - 1.0).abs() < 1e-12);
        assert!((reports[1].mu - 1.0).abs() < 1e-12, "tie reported");
        assert!(reports[0].certified);
    }

    #[test]
    fn nearest_at_2i_2i() {
        let k = sqrt5();
        let ok = FractionalIdeal::ring_of_integers(&k);
        let ctx = SearchContext::new(&k, &ok);
        let tau = hp(&[(0.0, 2.0), (0.0, 2.0)]);
        let reports = nearest_cusps(&ctx, &tau, 2, k.default_c_upper(), &SearchBudget::default());
        assert!((reports[0].mu - 4.0).abs() < 1e-12);
        assert!(reports[0].cusp.is_infinity());
        assert!((reports[1].mu - 0.25).abs() < 1e-12);
        assert!(reports[0].certified && reports[1].certified);
    }

    #[test]
    fn nearest_matches_brute_force() {
        let k = sqrt5();
        let ok = FractionalIdeal::ring_of_integers(&k);
        let ctx = SearchContext::new(&k, &ok);
        let c_up = k.default_c_upper();
        for tau in [
            hp(&[(0.2, 0.9), (-0.4, 1.4)]),
            hp(&[(0.5, 0.5), (0.5, 0.5)]),
            hp(&[(-0.3, 2.2), (0.1, 0.4)]),
        ] {
            let fast = nearest_cusps(&ctx, &tau, 2, c_up, &SearchBudget::default());
            let slow = brute_force_nearest(&k, &tau, &ok, 5);
            assert!(
                (fast[0].mu - slow[0].mu).abs() <= 1e-9 * slow[0].mu,
                "mu1 {} vs {}",
                fast[0].mu,
                slow[0].mu
            );
            assert!(
                (fast[1].mu - slow[1].mu).abs() <= 1e-9 * slow[1].mu,
                "mu2 {} vs {}",
                fast[1].mu,
                slow[1].mu
            );
        }
    }

    #[test]
    fn sphere_membership_examples() {
        let k = sqrt5();
        let ok = FractionalIdeal::ring_of_integers(&k);
        let ctx = SearchContext::new(&k, &ok);
        let inf = Cusp::infinity(&k);
        let budget = SearchBudget::default();
        let c_up = k.default_c_upper();
        let far = hp(&[(0.0, 10.0), (0.0, 10.0)]);
        assert!(sphere_membership(&ctx, &far, &inf, c_up, &budget).unwrap());
        let near_zero = hp(&[(0.0, 0.01), (0.0, 0.01)]);
        assert!(!sphere_membership(&ctx, &near_zero, &inf, c_up, &budget).unwrap());
    }

    #[test]
    fn ball_inclusion_in_sphere() {
        // mu_a(tau, c) > 1/N(a) implies membership in the sphere of c
        let k = sqrt5();
        let two = FractionalIdeal::principal(&k, &k.from_integer(2)).unwrap();
        let ctx = SearchContext::new(&k, &two);
        let inf = Cusp::infinity(&k);
        let budget = SearchBudget::default();
        let c_up = k.default_c_upper();
        for y in [1.0f64, 2.0, 5.0] {
            let tau = hp(&[(0.3, y), (0.1, y)]);
            let m = mu(&k, &tau, &inf, &two).unwrap();
            if m > 1.0 / two.norm_f64() {
                assert!(sphere_membership(&ctx, &tau, &inf, c_up, &budget).unwrap());
            }
        }
    }

    #[test]
    fn cusp_normalization() {
        let k = sqrt5();
        let half = FieldElement::new(vec![BigRational::new(1.into(), 2.into()), BigRational::zero()]);
        let c = Cusp::from_k_pair(&half, &k.one()).unwrap();
        assert!(c.alpha.is_integral() && c.beta.is_integral());
        let direct = Cusp::new(k.one(), k.from_integer(2)).unwrap();
        assert!(c.projectively_equal(&k, &direct));
        assert!(Cusp::new(k.zero(), k.zero()).is_err());
    }
}
