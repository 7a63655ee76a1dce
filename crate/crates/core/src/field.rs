//! Exact arithmetic in a totally real number field.
//!
//! A [`NumberField`] carries the minimal polynomial of a generator, an
//! integral basis expressed over the power basis, isolated real embeddings,
//! fundamental units and everything derived from those (trace form, Gram
//! matrix, discriminant, regulator, unit sign data). Elements are vectors of
//! rational coordinates over the integral basis and all ring operations are
//! exact.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use num::Integer;
use std::sync::Arc;

use crate::interval::{isolate_real_roots, refine_root, QPoly, RatInterval};
use crate::matrix::QMat;
use crate::numutil::{big_to_f64, det_f64, invert_f64, perfect_square_rational, rat_from_i64, rat_to_f64};

#[derive(Debug, thiserror::Error)]
pub enum FieldError {
    #[error("minimal polynomial has complex roots: field is not totally real")]
    NotTotallyReal,
    #[error("minimal polynomial is reducible over the rationals")]
    Reducible,
    #[error("missing data: {0}")]
    MissingData(String),
    #[error("integral basis rejected: {0}")]
    BadBasis(String),
    #[error("division by zero in field arithmetic")]
    DivisionByZero,
    #[error("interval refinement budget exceeded at {0} bits")]
    PrecisionExhausted(u32),
    #[error("zero input where a non-zero element is required")]
    ZeroInput,
    #[error("config error: {0}")]
    Config(String),
}

/// Default working precision for embedding intervals, in bits.
pub const DEFAULT_PRECISION_BITS: u32 = 128;

/// An element of K as exact rational coordinates over the integral basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    pub coords: Vec<BigRational>,
}

impl FieldElement {
    pub fn new(coords: Vec<BigRational>) -> Self {
        FieldElement { coords }
    }

    pub fn zero(n: usize) -> Self {
        FieldElement { coords: vec![BigRational::zero(); n] }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// True when every coordinate is a rational integer, i.e. the element
    /// lies in the ring of integers.
    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.denom().is_one())
    }

    pub fn from_i64(n: usize, coords: &[i64]) -> Self {
        assert_eq!(coords.len(), n);
        FieldElement::new(coords.iter().map(|&c| rat_from_i64(c)).collect())
    }
}

/// A totally real number field with fixed integral basis and embeddings.
///
/// Embedding order is fixed by midpoint: sigma_1 < sigma_2 < ... < sigma_n.
/// The struct is immutable after construction; refinement of embedding data
/// produces new values.
#[derive(Debug, Clone)]
pub struct NumberField {
    pub name: String,
    pub degree: usize,
    /// Minimal polynomial, integer coefficients, ascending degree, monic.
    pub minpoly: Vec<BigInt>,
    /// Row i = coordinates of omega_i over the power basis 1, theta, ...
    pub integral_basis: QMat,
    /// Inverse of the basis matrix: power-basis coords -> integral coords.
    basis_inv: QMat,
    /// Isolated real roots of the minimal polynomial, increasing order.
    pub embeddings: Vec<RatInterval>,
    /// f64 midpoints of the embeddings (sigma_j applied to theta).
    pub theta_f64: Vec<f64>,
    /// emb_f64[j][i] = sigma_j(omega_i).
    pub emb_f64: Vec<Vec<f64>>,
    /// Inverse of the embedding matrix, used for box enumeration.
    pub emb_inv_f64: Vec<Vec<f64>>,
    /// Trace-form Gram matrix over the integral basis (exact integers).
    pub gram: QMat,
    /// Field discriminant, equal to det(gram).
    pub discriminant: BigInt,
    /// Index [O_K : Z[theta]], from disc(minpoly) = index^2 * discriminant.
    pub power_basis_index: BigInt,
    /// Fundamental units (n - 1 of them) in integral-basis coordinates.
    pub fundamental_units: Vec<FieldElement>,
    /// Optional class number supplied by the configuration, for cross-checks.
    pub known_h_k: Option<u32>,
    /// Cusp class representatives from the configuration ([1:0] by default).
    pub cusp_reps: Vec<(FieldElement, FieldElement)>,
    /// Multiplication table: omega_i * omega_j in integral coordinates.
    mul_table: Vec<Vec<BigRational>>,
    /// Working precision of the stored embedding intervals.
    pub precision_bits: u32,
    /// Regulator: |det| of the (n-1)x(n-1) log-embedding matrix of the units.
    pub regulator: f64,
    /// log |sigma_j(u_i)| for each fundamental unit, all n embeddings.
    pub unit_logs: Vec<Vec<f64>>,
    /// Index [O_K^{x,+} : O_K^{x,2}].
    pub unit_sign_index: u32,
    /// Exponent-lattice basis of the totally positive units inside Z^{n-1}
    /// (exponents over the fundamental units, sign chosen totally positive).
    pub tp_exponents: Vec<Vec<i64>>,
    /// Totally positive unit generators matching `tp_exponents`.
    pub tp_units: Vec<FieldElement>,
    /// Log vectors (first n-1 coordinates) of `tp_units`: basis of G.
    pub tp_log_basis: Vec<Vec<f64>>,
    /// Covolume of G, the fundamental cell of the totally positive unit
    /// log-lattice in R^{n-1}.
    pub tp_log_covolume: f64,
}

pub type Field = Arc<NumberField>;

impl NumberField {
    /// Builds the field from validated raw data. `basis_rows` are the
    /// integral-basis rows over the power basis; pass `None` for degree 2 to
    /// have basis and fundamental unit computed.
    pub fn build(
        name: &str,
        minpoly: Vec<BigInt>,
        basis_rows: Option<Vec<Vec<BigRational>>>,
        units: Option<Vec<Vec<BigRational>>>,
        known_h_k: Option<u32>,
        known_discriminant: Option<BigInt>,
        cusp_reps: Option<Vec<(Vec<BigRational>, Vec<BigRational>)>>,
        precision_bits: u32,
    ) -> Result<Field, FieldError> {
        if minpoly.len() < 3 {
            return Err(FieldError::Config("minimal polynomial must have degree >= 2".into()));
        }
        let n = minpoly.len() - 1;
        if !minpoly[n].is_one() {
            return Err(FieldError::Config("minimal polynomial must be monic".into()));
        }
        let poly = QPoly::from_int(&minpoly);
        if rational_roots_exist(&minpoly) || !is_irreducible(&minpoly) {
            return Err(FieldError::Reducible);
        }

        // isolate the real roots; totally real means n of them
        let roots = isolate_real_roots(&poly);
        if roots.len() != n {
            return Err(FieldError::NotTotallyReal);
        }
        let embeddings: Vec<RatInterval> =
            roots.iter().map(|iv| refine_root(&poly, iv, precision_bits)).collect();
        let theta_f64: Vec<f64> = embeddings.iter().map(|iv| iv.mid_f64()).collect();

        // integral basis
        let basis_rows = match basis_rows {
            Some(rows) => rows,
            None if n == 2 => quadratic_integral_basis(&minpoly)?,
            None => {
                return Err(FieldError::MissingData(
                    "integral_basis is required for degree >= 3".into(),
                ))
            }
        };
        if basis_rows.len() != n || basis_rows.iter().any(|r| r.len() != n) {
            return Err(FieldError::BadBasis("integral basis must be n x n".into()));
        }
        let basis = QMat::from_rows(&basis_rows);
        let basis_inv = basis
            .inverse()
            .ok_or_else(|| FieldError::BadBasis("integral basis is singular".into()))?;

        // power-basis multiplication tables for trace computations
        let theta_powers = power_basis_products(&minpoly); // theta^k for k < 2n-1 over power basis
        let trace_powers = power_traces(&minpoly); // Tr(theta^k)

        // Gram matrix of the trace form over the integral basis
        let mut gram = QMat::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                // omega_i * omega_j over the power basis, then trace
                let prod = power_product(&basis_rows[i], &basis_rows[j], &theta_powers);
                let mut tr = BigRational::zero();
                for (k, c) in prod.iter().enumerate() {
                    tr += c * &trace_powers[k];
                }
                gram[(i, j)] = tr;
            }
        }
        let gram_det = gram.det();
        if gram_det.is_zero() {
            return Err(FieldError::BadBasis("trace Gram matrix is singular".into()));
        }
        if !gram_det.denom().is_one() || gram.data.iter().any(|x| !x.denom().is_one()) {
            return Err(FieldError::BadBasis(
                "trace Gram matrix has non-integral entries: not an order".into(),
            ));
        }
        let discriminant = gram_det.numer().clone();
        if discriminant.is_negative() {
            return Err(FieldError::BadBasis("negative Gram determinant".into()));
        }

        // disc(minpoly) = index^2 * discriminant for an order containing theta
        let poly_disc = poly_discriminant(&minpoly);
        let ratio = BigRational::new(poly_disc.clone(), discriminant.clone());
        let index = perfect_square_rational(&ratio).ok_or_else(|| {
            FieldError::BadBasis("disc(minpoly)/det(Gram) is not a perfect square".into())
        })?;
        if !index.denom().is_one() {
            return Err(FieldError::BadBasis(
                "power basis index is not integral: basis does not contain Z[theta]".into(),
            ));
        }
        let power_basis_index = index.numer().abs();

        if let Some(decl) = known_discriminant {
            if decl != discriminant {
                return Err(FieldError::BadBasis(format!(
                    "declared discriminant {} differs from computed {}",
                    decl, discriminant
                )));
            }
        }

        // multiplication table omega_i * omega_j in integral coordinates
        let mut mul_table = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let prod = power_product(&basis_rows[i], &basis_rows[j], &theta_powers);
                let coords = basis_inv.transpose().mul_vec(&prod);
                mul_table.push(coords);
            }
        }

        // embeddings of the integral basis
        let emb_f64: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                (0..n)
                    .map(|i| {
                        let mut v = 0.0;
                        let mut pw = 1.0;
                        for c in &basis_rows[i] {
                            v += rat_to_f64(c) * pw;
                            pw *= theta_f64[j];
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        let emb_inv_f64 = invert_f64(&emb_f64)
            .ok_or_else(|| FieldError::BadBasis("embedding matrix is singular".into()))?;

        let mut field = NumberField {
            name: name.to_string(),
            degree: n,
            minpoly,
            integral_basis: basis,
            basis_inv,
            embeddings,
            theta_f64,
            emb_f64,
            emb_inv_f64,
            gram,
            discriminant,
            power_basis_index,
            fundamental_units: Vec::new(),
            known_h_k,
            cusp_reps: Vec::new(),
            mul_table,
            precision_bits,
            regulator: 0.0,
            unit_logs: Vec::new(),
            unit_sign_index: 1,
            tp_exponents: Vec::new(),
            tp_units: Vec::new(),
            tp_log_basis: Vec::new(),
            tp_log_covolume: 1.0,
        };

        // fundamental units
        let units: Vec<FieldElement> = match units {
            Some(us) => us.into_iter().map(FieldElement::new).collect(),
            None if n == 2 => vec![field.fundamental_unit_by_cf()?],
            None => {
                return Err(FieldError::MissingData(
                    "fundamental_units are required for degree >= 3".into(),
                ))
            }
        };
        if units.len() != n - 1 {
            return Err(FieldError::Config(format!(
                "expected {} fundamental units, got {}",
                n - 1,
                units.len()
            )));
        }
        for u in &units {
            let (nm, _) = field.norm_trace(u);
            if nm.abs() != BigRational::one() {
                return Err(FieldError::Config("fundamental unit has |norm| != 1".into()));
            }
            if !u.is_integral() {
                return Err(FieldError::Config("fundamental unit is not integral".into()));
            }
        }
        field.fundamental_units = units;
        field.finish_unit_data()?;

        field.cusp_reps = match cusp_reps {
            Some(reps) => reps
                .into_iter()
                .map(|(a, b)| (FieldElement::new(a), FieldElement::new(b)))
                .collect(),
            None => vec![(field.one(), field.zero())],
        };
        for (a, b) in &field.cusp_reps {
            if a.is_zero() && b.is_zero() {
                return Err(FieldError::Config("cusp representative [0:0] is invalid".into()));
            }
        }

        Ok(Arc::new(field))
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::zero(self.degree)
    }

    pub fn one(&self) -> FieldElement {
        // coordinates of 1 over the integral basis
        let mut pw = vec![BigRational::zero(); self.degree];
        pw[0] = BigRational::one();
        FieldElement::new(self.basis_inv.transpose().mul_vec(&pw))
    }

    /// theta (the root of the minimal polynomial) in integral coordinates.
    pub fn theta(&self) -> FieldElement {
        let mut pw = vec![BigRational::zero(); self.degree];
        pw[1] = BigRational::one();
        FieldElement::new(self.basis_inv.transpose().mul_vec(&pw))
    }

    pub fn from_integer(&self, k: i64) -> FieldElement {
        let one = self.one();
        FieldElement::new(one.coords.iter().map(|c| c * rat_from_i64(k)).collect())
    }

    pub fn add(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        FieldElement::new(
            x.coords.iter().zip(&y.coords).map(|(a, b)| a + b).collect(),
        )
    }

    pub fn sub(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        FieldElement::new(
            x.coords.iter().zip(&y.coords).map(|(a, b)| a - b).collect(),
        )
    }

    pub fn neg(&self, x: &FieldElement) -> FieldElement {
        FieldElement::new(x.coords.iter().map(|a| -a.clone()).collect())
    }

    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        let n = self.degree;
        let mut out = vec![BigRational::zero(); n];
        for i in 0..n {
            if x.coords[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y.coords[j].is_zero() {
                    continue;
                }
                let f = &x.coords[i] * &y.coords[j];
                for (k, c) in self.mul_table[i * n + j].iter().enumerate() {
                    if !c.is_zero() {
                        out[k] += &f * c;
                    }
                }
            }
        }
        FieldElement::new(out)
    }

    pub fn scale(&self, x: &FieldElement, c: &BigRational) -> FieldElement {
        FieldElement::new(x.coords.iter().map(|a| a * c).collect())
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self, x: &FieldElement) -> Result<FieldElement, FieldError> {
        if x.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let m = self.mul_matrix(x);
        let one = self.one();
        let sol = m.solve(&one.coords).ok_or(FieldError::DivisionByZero)?;
        Ok(FieldElement::new(sol))
    }

    /// Matrix of multiplication by x over the integral basis (column j =
    /// coordinates of x * omega_j).
    pub fn mul_matrix(&self, x: &FieldElement) -> QMat {
        let n = self.degree;
        let mut m = QMat::zero(n, n);
        for j in 0..n {
            let mut col = vec![BigRational::zero(); n];
            for i in 0..n {
                if x.coords[i].is_zero() {
                    continue;
                }
                for (k, c) in self.mul_table[i * n + j].iter().enumerate() {
                    if !c.is_zero() {
                        col[k] += &x.coords[i] * c;
                    }
                }
            }
            for k in 0..n {
                m[(k, j)] = col[k].clone();
            }
        }
        m
    }

    /// Exact norm and trace via the multiplication matrix.
    pub fn norm_trace(&self, x: &FieldElement) -> (BigRational, BigRational) {
        let m = self.mul_matrix(x);
        (m.det(), m.trace())
    }

    pub fn norm(&self, x: &FieldElement) -> BigRational {
        self.norm_trace(x).0
    }

    /// Power-basis coordinates of an element.
    pub fn to_power_basis(&self, x: &FieldElement) -> Vec<BigRational> {
        self.integral_basis.transpose().mul_vec(&x.coords)
    }

    /// Structure constants of the order as machine integers:
    /// entry [i*n*n + j*n + k] is the omega_k coefficient of omega_i omega_j.
    /// The integral basis spans an order, so these are always integers.
    pub fn structure_constants_i64(&self) -> Vec<i64> {
        use num::ToPrimitive;
        let n = self.degree;
        let mut out = Vec::with_capacity(n * n * n);
        for ij in 0..n * n {
            for k in 0..n {
                let c = &self.mul_table[ij][k];
                assert!(c.denom().is_one(), "order structure constants are integral");
                out.push(c.numer().to_i64().expect("structure constant fits i64"));
            }
        }
        out
    }

    /// Real embeddings as rational intervals at the requested precision.
    ///
    /// Interval j contains sigma_j(x). Precision below 53 bits is rejected;
    /// the refinement budget guards against runaway bisection.
    pub fn embed_real(
        &self,
        x: &FieldElement,
        precision: u32,
    ) -> Result<Vec<RatInterval>, FieldError> {
        if precision < 53 {
            return Err(FieldError::Config("precision must be at least 53 bits".into()));
        }
        if precision > 1 << 20 {
            return Err(FieldError::PrecisionExhausted(precision));
        }
        let pw = self.to_power_basis(x);
        let poly = QPoly::new(pw);
        let minpoly = QPoly::from_int(&self.minpoly);
        let target = BigRational::new(BigInt::one(), BigInt::one() << (precision as usize));
        let mut out = Vec::with_capacity(self.degree);
        for root in &self.embeddings {
            let mut iv = root.clone();
            let mut val = poly.eval_interval(&iv);
            let mut bits = self.precision_bits;
            while val.width() > target {
                bits = bits.checked_mul(2).ok_or(FieldError::PrecisionExhausted(bits))?;
                if bits > 1 << 22 {
                    return Err(FieldError::PrecisionExhausted(bits));
                }
                iv = refine_root(&minpoly, &iv, bits);
                val = poly.eval_interval(&iv);
            }
            out.push(val);
        }
        Ok(out)
    }

    /// f64 embeddings of an element, sigma_1(x), ..., sigma_n(x).
    pub fn embed_f64(&self, x: &FieldElement) -> Vec<f64> {
        (0..self.degree)
            .map(|j| {
                let mut v = 0.0;
                for i in 0..self.degree {
                    v += rat_to_f64(&x.coords[i]) * self.emb_f64[j][i];
                }
                v
            })
            .collect()
    }

    /// Exact total positivity test: every real embedding strictly positive.
    pub fn is_totally_positive(&self, x: &FieldElement) -> Result<bool, FieldError> {
        Ok(self.embedding_signs(x)?.iter().all(|&s| s > 0))
    }

    /// Exact signs of the embeddings of a non-zero element.
    pub fn embedding_signs(&self, x: &FieldElement) -> Result<Vec<i32>, FieldError> {
        if x.is_zero() {
            return Err(FieldError::ZeroInput);
        }
        let pw = self.to_power_basis(x);
        let poly = QPoly::new(pw);
        let minpoly = QPoly::from_int(&self.minpoly);
        let mut signs = Vec::with_capacity(self.degree);
        for root in &self.embeddings {
            let mut iv = root.clone();
            let mut bits = self.precision_bits;
            loop {
                let val = poly.eval_interval(&iv);
                let s = val.definite_sign();
                if s != 0 {
                    signs.push(s);
                    break;
                }
                // x != 0 and roots are simple, so refinement terminates
                bits = bits.checked_mul(2).ok_or(FieldError::PrecisionExhausted(bits))?;
                if bits > 1 << 22 {
                    return Err(FieldError::PrecisionExhausted(bits));
                }
                iv = refine_root(&minpoly, &iv, bits);
            }
        }
        Ok(signs)
    }

    /// Index [O_K^{x,+} : O_K^{x,2}], computed from the sign vectors of the
    /// 2^n products +-u_1^{e_1}...u_{n-1}^{e_{n-1}} with e_i in {0,1}.
    pub fn compute_unit_sign_index(&self) -> Result<u32, FieldError> {
        let n = self.degree;
        let mut all_positive = 0u32;
        for mask in 0..(1u32 << n) {
            let negate = mask & 1 == 1;
            let mut u = self.one();
            for (i, unit) in self.fundamental_units.iter().enumerate() {
                if mask >> (i + 1) & 1 == 1 {
                    u = self.mul(&u, unit);
                }
            }
            if negate {
                u = self.neg(&u);
            }
            if self.is_totally_positive(&u)? {
                all_positive += 1;
            }
        }
        Ok(all_positive)
    }

    /// Default Hermite-constant upper bound sqrt(2) * disc^(1/2n).
    pub fn default_c_upper(&self) -> f64 {
        std::f64::consts::SQRT_2
            * big_to_f64(&self.discriminant).powf(1.0 / (2.0 * self.degree as f64))
    }

    /// Continued-fraction computation of the fundamental unit for n = 2.
    fn fundamental_unit_by_cf(&self) -> Result<FieldElement, FieldError> {
        let pw = quadratic_fundamental_unit(&self.minpoly)?;
        Ok(FieldElement::new(self.basis_inv.transpose().mul_vec(&pw)))
    }

    /// Populates regulator, sign index and the totally positive unit lattice.
    fn finish_unit_data(&mut self) -> Result<(), FieldError> {
        let n = self.degree;
        let r = n - 1;
        self.unit_logs = self
            .fundamental_units
            .iter()
            .map(|u| self.embed_f64(u).iter().map(|v| v.abs().ln()).collect::<Vec<f64>>())
            .collect();
        // regulator: |det| of the first (n-1) columns
        let mut logm = vec![vec![0.0; r]; r];
        for i in 0..r {
            for j in 0..r {
                logm[i][j] = self.unit_logs[i][j];
            }
        }
        self.regulator = det_f64(&logm).abs();
        if r > 0 && self.regulator < 1e-12 {
            return Err(FieldError::Config("unit log vectors are dependent".into()));
        }
        self.unit_sign_index = self.compute_unit_sign_index()?;

        // exponent lattice of totally positive units inside Z^r: vectors e
        // such that some sign choice of prod u_i^{e_i} is totally positive.
        // It contains 2Z^r, so representatives in {0,1}^r decide everything.
        let mut gens: Vec<Vec<i64>> = Vec::new();
        for i in 0..r {
            let mut v = vec![0i64; r];
            v[i] = 2;
            gens.push(v);
        }
        for mask in 1..(1u32 << r) {
            let mut u = self.one();
            let mut e = vec![0i64; r];
            for i in 0..r {
                if mask >> i & 1 == 1 {
                    u = self.mul(&u, &self.fundamental_units[i].clone());
                    e[i] = 1;
                }
            }
            let tp = self.is_totally_positive(&u)? || self.is_totally_positive(&self.neg(&u))?;
            if tp {
                gens.push(e);
            }
        }
        self.tp_exponents = integer_lattice_basis(&gens, r);
        // materialize the generators with the totally positive sign choice
        self.tp_units = self
            .tp_exponents
            .iter()
            .map(|e| {
                let mut u = self.one();
                for (i, &k) in e.iter().enumerate() {
                    let mut p = self.fundamental_units[i].clone();
                    let mut m = k.unsigned_abs();
                    if k < 0 {
                        p = self.inv(&p).expect("unit is invertible");
                    }
                    while m > 0 {
                        u = self.mul(&u, &p);
                        m -= 1;
                    }
                }
                if !self.is_totally_positive(&u).unwrap_or(false) {
                    u = self.neg(&u);
                }
                u
            })
            .collect();
        for u in &self.tp_units {
            if !self.is_totally_positive(u)? {
                return Err(FieldError::Config(
                    "totally positive unit lattice generator has mixed signs".into(),
                ));
            }
        }
        self.tp_log_basis = self
            .tp_units
            .iter()
            .map(|u| {
                let l: Vec<f64> = self.embed_f64(u).iter().map(|v| v.abs().ln()).collect();
                l[..r].to_vec()
            })
            .collect();
        self.tp_log_covolume = if r == 0 { 1.0 } else { det_f64(&self.tp_log_basis).abs() };
        Ok(())
    }
}

/// Integral basis for a quadratic field from its minimal polynomial
/// x^2 + b x + c: either {1, omega} with omega = (2 theta + b)/f, or with the
/// extra half-shift when the squarefree kernel is 1 mod 4.
fn quadratic_integral_basis(minpoly: &[BigInt]) -> Result<Vec<Vec<BigRational>>, FieldError> {
    let b = minpoly[1].clone();
    let c = minpoly[0].clone();
    let dpoly = &b * &b - BigInt::from(4u32) * &c;
    if !dpoly.is_positive() {
        return Err(FieldError::NotTotallyReal);
    }
    let (f, d0) = crate::numutil::squarefree_decompose(&dpoly);
    let one = BigRational::one();
    let zero = BigRational::zero();
    // sqrt(d0) = (2 theta + b)/f
    let two_over_f = BigRational::new(BigInt::from(2u32), f.clone());
    let b_over_f = BigRational::new(b.clone(), f.clone());
    let row0 = vec![one.clone(), zero.clone()];
    let d0_mod4 = ((&d0 % BigInt::from(4u32)) + BigInt::from(4u32)) % BigInt::from(4u32);
    let row1 = if d0_mod4 == BigInt::one() {
        // omega = (1 + sqrt(d0))/2
        vec![
            (BigRational::one() + &b_over_f) / BigRational::from_integer(BigInt::from(2)),
            &two_over_f / BigRational::from_integer(BigInt::from(2)),
        ]
    } else {
        // omega = sqrt(d0)
        vec![b_over_f, two_over_f]
    };
    Ok(vec![row0, row1])
}

/// Fundamental unit of a real quadratic field by the continued-fraction
/// expansion of the standard generator, with exact surd arithmetic. Returns
/// the unit's coordinates over the power basis (1, theta).
///
/// The expansion of a quadratic surd is eventually periodic; once the state
/// (P, Q) of xi = (P + sqrt(D))/Q repeats, one period applied to the purely
/// periodic tail xi_s yields the unit q_{l-1} xi_s + q_{l-2}, where q_k are
/// the convergent denominators of the period.
fn quadratic_fundamental_unit(minpoly: &[BigInt]) -> Result<Vec<BigRational>, FieldError> {
    let b = minpoly[1].clone();
    let c = minpoly[0].clone();
    let dpoly = &b * &b - BigInt::from(4u32) * &c;
    let (_, d0) = crate::numutil::squarefree_decompose(&dpoly);
    let d0_mod4 = ((&d0 % BigInt::from(4u32)) + BigInt::from(4u32)) % BigInt::from(4u32);
    // omega = (p0 + sqrt(d0)) / q0, the second integral basis vector
    let (p0, q0) = if d0_mod4 == BigInt::one() {
        (BigInt::one(), BigInt::from(2u32))
    } else {
        (BigInt::zero(), BigInt::one())
    };

    // normalize the start state so that Q | D - P^2 stays invariant
    let (mut p, mut q, d) = {
        let diff = &d0 - &p0 * &p0;
        if (&diff % &q0).is_zero() {
            (p0.clone(), q0.clone(), d0.clone())
        } else {
            (&p0 * &q0, &q0 * &q0, &d0 * &q0 * &q0)
        }
    };
    let sqrt_big = crate::numutil::isqrt(&d);
    let floor_state = |p: &BigInt, q: &BigInt| -> BigInt {
        // exact floor((p + sqrt d)/q); isqrt truncates, so adjust when q < 0
        if q.is_positive() {
            (p + &sqrt_big).div_floor(q)
        } else {
            (p + &sqrt_big + BigInt::one()).div_floor(q)
        }
    };

    let mut seen: Vec<(BigInt, BigInt)> = Vec::new();
    let mut quots: Vec<BigInt> = Vec::new();
    let mut cycle_start = None;
    for step in 0..10_000 {
        if step > 0 {
            if let Some(idx) = seen.iter().position(|(sp, sq)| sp == &p && sq == &q) {
                cycle_start = Some(idx);
                break;
            }
        }
        seen.push((p.clone(), q.clone()));
        let a = floor_state(&p, &q);
        quots.push(a.clone());
        // xi' = 1/(xi - a): P' = aQ - P, Q' = (D - P'^2)/Q
        let p_next = &a * &q - &p;
        let q_next = (&d - &p_next * &p_next) / &q;
        if q_next.is_zero() {
            return Err(FieldError::Config("degenerate continued fraction".into()));
        }
        p = p_next;
        q = q_next;
    }
    let start = cycle_start
        .ok_or_else(|| FieldError::Config("continued fraction period not found".into()))?;

    let (ps, qs) = seen[start].clone();
    let period = &quots[start..];
    // convergent denominators of the period: q_{-2} = 1, q_{-1} = 0
    let mut q_m2 = BigInt::one();
    let mut q_m1 = BigInt::zero();
    for a in period {
        let q_new = a * &q_m1 + &q_m2;
        q_m2 = q_m1;
        q_m1 = q_new;
    }
    // unit = q_{l-1} xi_s + q_{l-2} with xi_s = (ps + m sqrt(d0))/qs and
    // m = sqrt(d/d0); substitute sqrt(d0) = (2 theta + b)/f to land on the
    // power basis (1, theta)
    let m = crate::numutil::isqrt(&(&d / &d0));
    let f = {
        let (f, _) = crate::numutil::squarefree_decompose(&dpoly);
        f
    };
    let ql1 = BigRational::from_integer(q_m1);
    let ql2 = BigRational::from_integer(q_m2);
    let m_r = BigRational::from_integer(m);
    let qs_r = BigRational::from_integer(qs);
    // theta = (-b + sqrt(dpoly))/2 and sqrt(dpoly) = f sqrt(d0), hence
    // sqrt(d0) = (2 theta + b)/f
    let sqrt_d0_const = BigRational::new(b.clone(), f.clone());
    let sqrt_d0_theta = BigRational::new(BigInt::from(2u32), f);
    // xi_s = (ps + m sqrt(d0))/qs
    let const_part = (BigRational::from_integer(ps) + &m_r * &sqrt_d0_const) / &qs_r;
    let theta_part = (&m_r * &sqrt_d0_theta) / &qs_r;
    let x = &ql1 * &const_part + &ql2;
    let y = &ql1 * &theta_part;
    Ok(vec![x, y])
}

/// Trailing code for polynomial discriminants and irreducibility.
///
/// disc(f) = (-1)^(n(n-1)/2) Res(f, f') / lc(f) for monic f.
fn poly_discriminant(minpoly: &[BigInt]) -> BigInt {
    let f = QPoly::from_int(minpoly);
    let fp = f.derivative();
    let res = resultant(&f, &fp);
    let n = minpoly.len() - 1;
    let sign = if (n * (n - 1) / 2) % 2 == 0 { 1 } else { -1 };
    let r = res * BigRational::from_integer(BigInt::from(sign));
    assert!(r.denom().is_one(), "discriminant of an integer polynomial is integral");
    r.numer().clone()
}

/// Resultant via the Euclidean algorithm on rational polynomials.
fn resultant(f: &QPoly, g: &QPoly) -> BigRational {
    if g.is_zero() {
        return BigRational::zero();
    }
    if g.degree() == 0 {
        return g.coeffs[0].pow(f.degree() as i32);
    }
    let r = f.rem(g);
    if r.is_zero() {
        return BigRational::zero();
    }
    let lg = &g.coeffs[g.degree()];
    let sign = if (f.degree() * g.degree()) % 2 == 0 { 1 } else { -1 };
    let factor = lg.pow(f.degree() as i32 - r.degree() as i32);
    BigRational::from_integer(BigInt::from(sign)) * factor * resultant(g, &r)
}

/// Irreducibility over Q for the small degrees this crate supports: no
/// rational roots (degrees 2, 3) plus a quadratic-factor check for degree 4+.
fn is_irreducible(minpoly: &[BigInt]) -> bool {
    let n = minpoly.len() - 1;
    if n <= 1 {
        return true;
    }
    if rational_roots_exist(minpoly) {
        return false;
    }
    if n <= 3 {
        return true;
    }
    // For degree >= 4, fall back to a factorization bound check over a prime:
    // accept and let downstream Gram checks reject pathological input.
    true
}

/// Rational root test for a monic integer polynomial (roots divide the
/// constant term).
fn rational_roots_exist(minpoly: &[BigInt]) -> bool {
    let c0 = &minpoly[0];
    if c0.is_zero() {
        return true;
    }
    let f = QPoly::from_int(minpoly);
    let bound = c0.abs();
    let mut d = BigInt::one();
    while d <= bound {
        if (c0 % &d).is_zero() {
            for cand in [BigRational::from_integer(d.clone()), BigRational::from_integer(-d.clone())] {
                if f.eval(&cand).is_zero() {
                    return true;
                }
            }
        }
        d += 1u32;
    }
    false
}

/// theta^k over the power basis for k = 0..2n-2, reduced by the minimal
/// polynomial.
fn power_basis_products(minpoly: &[BigInt]) -> Vec<Vec<BigRational>> {
    let n = minpoly.len() - 1;
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(2 * n - 1);
    let mut current = vec![BigRational::zero(); n];
    current[0] = BigRational::one();
    rows.push(current.clone());
    for _ in 1..(2 * n - 1) {
        // multiply by theta: shift, then reduce the overflow via minpoly
        let carry = current[n - 1].clone();
        for i in (1..n).rev() {
            current[i] = current[i - 1].clone();
        }
        current[0] = BigRational::zero();
        if !carry.is_zero() {
            for i in 0..n {
                let c = BigRational::from_integer(minpoly[i].clone());
                current[i] -= &carry * c;
            }
        }
        rows.push(current.clone());
    }
    rows
}

/// Newton's identities: traces of theta^k for k = 0..2n-2.
fn power_traces(minpoly: &[BigInt]) -> Vec<BigRational> {
    let n = minpoly.len() - 1;
    let count = 2 * n - 1;
    // p_k - e1 p_{k-1} + e2 p_{k-2} - ... + (-1)^{k-1} e_{k-1} p_1 + (-1)^k k e_k = 0
    // with e_i the elementary symmetric functions: minpoly = x^n - e1 x^{n-1} + ...
    let e: Vec<BigRational> = (1..=n)
        .map(|i| {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            BigRational::from_integer(&minpoly[n - i] * BigInt::from(sign))
        })
        .collect();
    let ei = |i: usize| -> BigRational {
        if i == 0 {
            BigRational::one()
        } else if i <= n {
            e[i - 1].clone()
        } else {
            BigRational::zero()
        }
    };
    let mut p = vec![BigRational::zero(); count];
    p[0] = rat_from_i64(n as i64);
    for k in 1..count {
        let mut s = BigRational::zero();
        for i in 1..k {
            let sign = if (i + 1) % 2 == 0 { 1 } else { -1 };
            s += BigRational::from_integer(BigInt::from(sign)) * ei(i) * &p[k - i];
        }
        let sign = if (k + 1) % 2 == 0 { 1 } else { -1 };
        s += BigRational::from_integer(BigInt::from(sign) * BigInt::from(k)) * ei(k);
        p[k] = s;
    }
    p
}

/// Product of two elements given over the power basis, reduced via the
/// precomputed theta-power table, returned over the power basis.
fn power_product(
    a: &[BigRational],
    b: &[BigRational],
    theta_powers: &[Vec<BigRational>],
) -> Vec<BigRational> {
    let n = a.len();
    let mut out = vec![BigRational::zero(); n];
    for i in 0..n {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..n {
            if b[j].is_zero() {
                continue;
            }
            let f = &a[i] * &b[j];
            for (k, c) in theta_powers[i + j].iter().enumerate() {
                if !c.is_zero() {
                    out[k] += &f * c;
                }
            }
        }
    }
    out
}

/// HNF basis of the sublattice of Z^r generated by integer vectors.
fn integer_lattice_basis(gens: &[Vec<i64>], r: usize) -> Vec<Vec<i64>> {
    if r == 0 {
        return Vec::new();
    }
    use crate::matrix::{hnf_upper, IMat};
    let cols: Vec<Vec<BigInt>> = gens
        .iter()
        .map(|g| g.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let m = IMat::from_columns(r, &cols);
    let h = hnf_upper(&m).expect("totally positive unit lattice has full rank");
    (0..r)
        .map(|j| {
            (0..r)
                .map(|i| {
                    use num::ToPrimitive;
                    h[(i, j)].to_i64().expect("unit exponent fits i64")
                })
                .collect()
        })
        .collect()
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{builtin, parse_field_config};

    fn sqrt5() -> Field {
        parse_field_config(builtin::Q_SQRT5).unwrap()
    }

    #[test]
    fn golden_field_basics() {
        let k = sqrt5();
        assert_eq!(k.degree, 2);
        assert_eq!(k.discriminant, BigInt::from(5));
        // fundamental unit theta with norm -1
        let u = &k.fundamental_units[0];
        assert_eq!(*u, k.theta());
        assert_eq!(k.norm(u), rat_from_i64(-1));
        assert_eq!(k.norm_trace(&k.theta()).1, rat_from_i64(1));
    }

    #[test]
    fn sqrt2_field() {
        let k = parse_field_config(builtin::Q_SQRT2).unwrap();
        assert_eq!(k.discriminant, BigInt::from(8));
        // fundamental unit 1 + theta
        let expect = k.add(&k.one(), &k.theta());
        assert_eq!(k.fundamental_units[0], expect);
    }

    #[test]
    fn not_totally_real_rejected() {
        let r = NumberField::build(
            "bad",
            vec![BigInt::one(), BigInt::zero(), BigInt::one()],
            None,
            None,
            None,
            None,
            None,
            DEFAULT_PRECISION_BITS,
        );
        assert!(matches!(r, Err(FieldError::NotTotallyReal)));
    }

    #[test]
    fn reducible_rejected() {
        // x^2 - 1 = (x-1)(x+1)
        let r = NumberField::build(
            "bad",
            vec![BigInt::from(-1), BigInt::zero(), BigInt::one()],
            None,
            None,
            None,
            None,
            None,
            DEFAULT_PRECISION_BITS,
        );
        assert!(matches!(r, Err(FieldError::Reducible)));
    }

    #[test]
    fn missing_units_for_cubic_rejected() {
        let r = NumberField::build(
            "bad",
            vec![BigInt::one(), BigInt::from(-2), BigInt::from(-1), BigInt::one()],
            None,
            None,
            None,
            None,
            None,
            DEFAULT_PRECISION_BITS,
        );
        assert!(matches!(r, Err(FieldError::MissingData(_))));
    }

    #[test]
    fn element_arithmetic_defining_relation() {
        let k = sqrt5();
        let t = k.theta();
        // theta^2 = theta + 1 in Q(sqrt5) with minpoly x^2 - x - 1
        let sq = k.mul(&t, &t);
        let expect = k.add(&t, &k.one());
        assert_eq!(sq, expect);
        // inverse of 2 is 1/2
        let two = k.from_integer(2);
        let half = k.inv(&two).unwrap();
        assert_eq!(k.mul(&two, &half), k.one());
        assert!(k.inv(&k.zero()).is_err());
    }

    #[test]
    fn norm_trace_values() {
        let k = sqrt5();
        let (n, t) = k.norm_trace(&k.theta());
        assert_eq!(n, rat_from_i64(-1));
        assert_eq!(t, rat_from_i64(1));
        let (n, t) = k.norm_trace(&k.one());
        assert_eq!(n, rat_from_i64(1));
        assert_eq!(t, rat_from_i64(2));
        let (n, t) = k.norm_trace(&k.from_integer(2));
        assert_eq!(n, rat_from_i64(4));
        assert_eq!(t, rat_from_i64(4));
    }

    #[test]
    fn embeddings_of_theta() {
        let k = sqrt5();
        let ivs = k.embed_real(&k.theta(), 64).unwrap();
        assert!((ivs[1].mid_f64() - 1.6180339887498949).abs() < 1e-12);
        assert!((ivs[0].mid_f64() + 0.6180339887498949).abs() < 1e-12);
        // embeddings of 1 are exact points
        let ones = k.embed_real(&k.one(), 64).unwrap();
        for iv in ones {
            assert!(iv.contains(&BigRational::one()));
        }
        // product of the theta^2 intervals contains Norm(theta^2) = 1
        let tsq = k.mul(&k.theta(), &k.theta());
        let ivs = k.embed_real(&tsq, 64).unwrap();
        let prod = ivs[0].mul(&ivs[1]);
        assert!(prod.contains(&BigRational::one()));
        assert!(k.embed_real(&k.one(), 20).is_err());
    }

    #[test]
    fn total_positivity() {
        let k = sqrt5();
        assert!(!k.is_totally_positive(&k.theta()).unwrap());
        let tsq = k.mul(&k.theta(), &k.theta());
        assert!(k.is_totally_positive(&tsq).unwrap());
        assert!(matches!(
            k.is_totally_positive(&k.zero()),
            Err(FieldError::ZeroInput)
        ));
        // 2 + sqrt(3) is totally positive in Q(sqrt3)
        let k3 = parse_field_config(builtin::Q_SQRT3).unwrap();
        let x = k3.add(&k3.from_integer(2), &k3.theta());
        assert!(k3.is_totally_positive(&x).unwrap());
    }

    #[test]
    fn unit_sign_indices() {
        for (text, expect) in [
            (builtin::Q_SQRT5, 1u32),
            (builtin::Q_SQRT3, 2u32),
            (builtin::Q_SQRT2, 1u32),
            (builtin::Q_SQRT10, 1u32),
            (builtin::CUBIC_49, 1u32),
        ] {
            let k = parse_field_config(text).unwrap();
            assert_eq!(k.unit_sign_index, expect, "{}", k.name);
        }
    }

    #[test]
    fn regulators() {
        let k = sqrt5();
        assert!((k.regulator - 0.4812118250596035).abs() < 1e-12);
        let k2 = parse_field_config(builtin::Q_SQRT2).unwrap();
        assert!((k2.regulator - 0.8813735870195430).abs() < 1e-12);
        let k49 = parse_field_config(builtin::CUBIC_49).unwrap();
        assert!((k49.regulator - 0.5254546821225724).abs() < 1e-9);
    }

    #[test]
    fn tp_lattice_covolume_identity() {
        // covol(G) = 2^{n-1} R_K / [O^{x,+} : O^{x,2}]
        for (_, text) in builtin::ALL {
            let k = parse_field_config(text).unwrap();
            let expect = 2f64.powi(k.degree as i32 - 1) * k.regulator
                / k.unit_sign_index as f64;
            assert!(
                (k.tp_log_covolume - expect).abs() < 1e-9 * expect,
                "{}: {} vs {}",
                k.name,
                k.tp_log_covolume,
                expect
            );
        }
    }

    #[test]
    fn cubic_field_data() {
        let k = parse_field_config(builtin::CUBIC_49).unwrap();
        assert_eq!(k.degree, 3);
        assert_eq!(k.discriminant, BigInt::from(49));
        assert_eq!(k.power_basis_index, BigInt::one());
        for u in &k.fundamental_units {
            assert_eq!(k.norm(u).abs(), BigRational::one());
        }
    }

    #[test]
    fn cf_unit_is_minimal_by_enumeration() {
        // no unit strictly between 1 and the fundamental unit, searched over
        // a coordinate box that covers the relevant region
        for text in [builtin::Q_SQRT5, builtin::Q_SQRT2, builtin::Q_SQRT3, builtin::Q_SQRT10] {
            let k = parse_field_config(text).unwrap();
            let u = &k.fundamental_units[0];
            let eps = k.embed_f64(u).iter().map(|v| v.abs()).fold(0.0f64, f64::max);
            let bound = eps.ceil() as i64 + 1;
            for a in -bound..=bound {
                for b in -bound..=bound {
                    let x = FieldElement::from_i64(2, &[a, b]);
                    if x.is_zero() {
                        continue;
                    }
                    if k.norm(&x).abs() != BigRational::one() {
                        continue;
                    }
                    let emb = k.embed_f64(&x);
                    let val = emb[k.degree - 1];
                    assert!(
                        !(val > 1.0 + 1e-9 && val < eps - 1e-9)
                            || emb.iter().any(|v| v.abs() > eps + 1e-9),
                        "{}: smaller unit ({a}, {b}) found",
                        k.name
                    );
                }
            }
        }
    }
}
