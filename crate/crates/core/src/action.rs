//! Action of the generalized Hilbert modular group on H^n and P^1(K).
//!
//! Group elements are 2x2 matrices with exact field-element entries; a,d run
//! over the ring of integers, the upper-right entry over a^{-1}, the
//! lower-left over a, and the determinant over the totally positive units.
//! The group acts componentwise through the real embeddings. Conjugation by
//! a cusp matrix moves any cusp chart to the chart at infinity, which is how
//! both the reduction and the samplers work.

use num::rational::BigRational;
use num::traits::{One, Signed, Zero};

use crate::cusp::{sphere_membership, Cusp, CuspError, HPoint, SearchBudget, SearchContext};
use crate::field::{Field, FieldElement};
use crate::ideal::{self, FractionalIdeal};
use crate::numutil::rat_from_i64;

#[derive(Debug, thiserror::Error)]
pub enum ActionError {
    #[error("matrix determinant is zero")]
    SingularMatrix,
    #[error("determinant is not totally positive: the matrix does not preserve H^n")]
    NotOrientationPreserving,
    #[error("no unimodular completion found; cusp matrix construction failed")]
    NoSolution,
    #[error("cusp representatives {0} and {1} are equivalent")]
    EquivalentReps(usize, usize),
    #[error(transparent)]
    Cusp(#[from] CuspError),
}

/// A 2x2 matrix over K with exact entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModularMatrix {
    pub a: FieldElement,
    pub b: FieldElement,
    pub c: FieldElement,
    pub d: FieldElement,
}

impl ModularMatrix {
    pub fn new(
        field: &Field,
        a: FieldElement,
        b: FieldElement,
        c: FieldElement,
        d: FieldElement,
    ) -> Result<Self, ActionError> {
        let m = ModularMatrix { a, b, c, d };
        if m.det(field).is_zero() {
            return Err(ActionError::SingularMatrix);
        }
        Ok(m)
    }

    pub fn identity(field: &Field) -> Self {
        ModularMatrix { a: field.one(), b: field.zero(), c: field.zero(), d: field.one() }
    }

    pub fn det(&self, field: &Field) -> FieldElement {
        field.sub(&field.mul(&self.a, &self.d), &field.mul(&self.b, &self.c))
    }

    pub fn mul(&self, field: &Field, other: &ModularMatrix) -> ModularMatrix {
        ModularMatrix {
            a: field.add(&field.mul(&self.a, &other.a), &field.mul(&self.b, &other.c)),
            b: field.add(&field.mul(&self.a, &other.b), &field.mul(&self.b, &other.d)),
            c: field.add(&field.mul(&self.c, &other.a), &field.mul(&self.d, &other.c)),
            d: field.add(&field.mul(&self.c, &other.b), &field.mul(&self.d, &other.d)),
        }
    }

    /// Exact inverse (entries divided by the determinant).
    pub fn inverse(&self, field: &Field) -> Result<ModularMatrix, ActionError> {
        let det = self.det(field);
        let det_inv = field.inv(&det).map_err(|_| ActionError::SingularMatrix)?;
        Ok(ModularMatrix {
            a: field.mul(&self.d, &det_inv),
            b: field.neg(&field.mul(&self.b, &det_inv)),
            c: field.neg(&field.mul(&self.c, &det_inv)),
            d: field.mul(&self.a, &det_inv),
        })
    }

    /// Image of a cusp under the projective action.
    pub fn act_cusp(&self, field: &Field, c: &Cusp) -> Result<Cusp, CuspError> {
        let alpha = field.add(&field.mul(&self.a, &c.alpha), &field.mul(&self.b, &c.beta));
        let beta = field.add(&field.mul(&self.c, &c.alpha), &field.mul(&self.d, &c.beta));
        Cusp::from_k_pair(&alpha, &beta)
    }

    /// Serialization as four coordinate lists.
    pub fn serialize(&self) -> Vec<Vec<String>> {
        [&self.a, &self.b, &self.c, &self.d]
            .iter()
            .map(|e| e.coords.iter().map(crate::numutil::format_rational).collect())
            .collect()
    }
}

/// Componentwise homographic action on H^n.
///
/// Requires a totally positive determinant so each factor of H^n is
/// preserved.
pub fn act(field: &Field, m: &ModularMatrix, tau: &HPoint) -> Result<HPoint, ActionError> {
    let det = m.det(field);
    if !field
        .is_totally_positive(&det)
        .map_err(|_| ActionError::SingularMatrix)?
    {
        return Err(ActionError::NotOrientationPreserving);
    }
    let ea = field.embed_f64(&m.a);
    let eb = field.embed_f64(&m.b);
    let ec = field.embed_f64(&m.c);
    let ed = field.embed_f64(&m.d);
    let mut coords = Vec::with_capacity(tau.coords.len());
    for (j, &(x, y)) in tau.coords.iter().enumerate() {
        let num_re = ea[j] * x + eb[j];
        let num_im = ea[j] * y;
        let den_re = ec[j] * x + ed[j];
        let den_im = ec[j] * y;
        let den2 = den_re * den_re + den_im * den_im;
        let xj = (num_re * den_re + num_im * den_im) / den2;
        let yj = (num_im * den_re - num_re * den_im) / den2;
        coords.push((xj, yj));
    }
    let mut out = HPoint::new(coords).map_err(ActionError::Cusp)?;
    out.prec_bits = tau.prec_bits;
    Ok(out)
}

/// Membership in the generalized Hilbert modular group for the ideal a:
/// diagonal entries integral, upper-right in a^{-1}, lower-left in a, and the
/// determinant a totally positive unit. All tests are exact, and they are
/// invariant under the unit-scalar quotient of the group.
pub fn in_group(field: &Field, m: &ModularMatrix, a: &FractionalIdeal) -> bool {
    if !m.a.is_integral() || !m.d.is_integral() {
        return false;
    }
    let a_inv = ideal::inverse(field, a);
    if !a_inv.contains(field, &m.b) || !a.contains(field, &m.c) {
        return false;
    }
    let det = m.det(field);
    if det.is_zero() || !det.is_integral() {
        return false;
    }
    if field.norm(&det).abs() != BigRational::one() {
        return false;
    }
    field.is_totally_positive(&det).unwrap_or(false)
}

/// Cusp matrix: for c = [alpha : beta] with integral coordinates, produces
/// M = [[alpha, alpha*], [beta, beta*]] of determinant one with
/// beta* in q^{-1} and alpha* in a^{-1} q^{-1}, where q = alpha O_K + beta a^{-1}.
/// M sends infinity to c and conjugates the stabilizer of infinity for the
/// ideal a q^2 onto the stabilizer of c for a.
pub fn cusp_matrix(
    field: &Field,
    c: &Cusp,
    a: &FractionalIdeal,
) -> Result<(ModularMatrix, FractionalIdeal), ActionError> {
    let n = field.degree;
    let a_inv = ideal::inverse(field, a);
    let q = c.q_ideal(field, &a_inv);
    let q_inv = ideal::inverse(field, &q);
    let aq_inv = ideal::mul(field, &a_inv, &q_inv);

    // solve 1 = alpha beta* - beta alpha* with beta* in q^{-1} and
    // alpha* in a^{-1} q^{-1}: an integer solve over stacked generators
    let q_inv_basis = q_inv.basis_elements(field);
    let aq_inv_basis = aq_inv.basis_elements(field);
    let mut cols: Vec<Vec<BigRational>> = Vec::with_capacity(2 * n);
    for b in &q_inv_basis {
        cols.push(field.mul(&c.alpha, b).coords.clone());
    }
    for b in &aq_inv_basis {
        cols.push(field.mul(&c.beta, b).coords.clone());
    }
    let mut all: Vec<BigRational> = cols.iter().flatten().cloned().collect();
    all.extend(field.one().coords.iter().cloned());
    let den = crate::numutil::common_denominator(&all);
    let scale = BigRational::from_integer(den);
    let int_cols: Vec<Vec<num::BigInt>> = cols
        .iter()
        .map(|col| col.iter().map(|x| (x * &scale).numer().clone()).collect())
        .collect();
    let mat = crate::matrix::IMat::from_columns(n, &int_cols);
    let target: Vec<num::BigInt> = field
        .one()
        .coords
        .iter()
        .map(|x| (x * &scale).numer().clone())
        .collect();
    let sol = crate::matrix::solve_integral(&mat, &target).ok_or(ActionError::NoSolution)?;

    let mut beta_star = field.zero();
    for (i, b) in q_inv_basis.iter().enumerate() {
        if !sol[i].is_zero() {
            let f = BigRational::from_integer(sol[i].clone());
            beta_star = field.add(&beta_star, &field.scale(b, &f));
        }
    }
    let mut minus_alpha_star = field.zero();
    for (i, b) in aq_inv_basis.iter().enumerate() {
        if !sol[n + i].is_zero() {
            let f = BigRational::from_integer(sol[n + i].clone());
            minus_alpha_star = field.add(&minus_alpha_star, &field.scale(b, &f));
        }
    }
    let alpha_star = field.neg(&minus_alpha_star);

    let m = ModularMatrix {
        a: c.alpha.clone(),
        b: alpha_star.clone(),
        c: c.beta.clone(),
        d: beta_star.clone(),
    };
    // postconditions, all exact
    if m.det(field) != field.one()
        || !q_inv.contains(field, &beta_star)
        || !aq_inv.contains(field, &alpha_star)
    {
        return Err(ActionError::NoSolution);
    }
    Ok((m, q))
}

/// Result of reducing a point into the chart of the cusp at infinity.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub point: HPoint,
    pub gamma: ModularMatrix,
}

/// Reduces tau modulo the stabilizer of infinity in the group of the ideal
/// b: first a totally positive unit scaling placing the log-image of Im tau
/// in the fundamental cell of the unit lattice, then a translation by an
/// element of b^{-1} placing Re tau in the fundamental cell of its embedded
/// lattice. Both cells are half-open and anchored at the origin.
pub fn reduce_point(field: &Field, tau: &HPoint, b: &FractionalIdeal) -> Reduction {
    let n = field.degree;
    let r = n - 1;

    // unit scaling on the first n-1 log coordinates
    let mut eps = field.one();
    if r > 0 {
        let basis: Vec<Vec<f64>> = (0..r)
            .map(|j| (0..r).map(|i| field.tp_log_basis[i][j]).collect())
            .collect();
        let inv = crate::numutil::invert_f64(&basis).expect("independent unit logs");
        let v: Vec<f64> = (0..r).map(|j| tau.coords[j].1.ln()).collect();
        let t: Vec<f64> = (0..r).map(|i| (0..r).map(|j| inv[i][j] * v[j]).sum()).collect();
        for (i, ti) in t.iter().enumerate() {
            let k = ti.floor() as i64;
            if k != 0 {
                let mut p = field.tp_units[i].clone();
                if k < 0 {
                    p = field.inv(&p).expect("unit");
                }
                for _ in 0..k.unsigned_abs() {
                    eps = field.mul(&eps, &p);
                }
            }
        }
        eps = field.inv(&eps).expect("unit"); // move the log-vector back into the cell
    }
    let es = field.embed_f64(&eps);
    let scaled: Vec<(f64, f64)> = tau
        .coords
        .iter()
        .enumerate()
        .map(|(j, &(x, y))| (es[j] * x, es[j] * y))
        .collect();

    // translation by the lattice b^{-1}
    let b_inv = ideal::inverse(field, b);
    let basis_elems = b_inv.basis_elements(field);
    let emb: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| field.embed_f64(&basis_elems[i])[j]).collect())
        .collect();
    let inv = crate::numutil::invert_f64(&emb).expect("full-rank lattice");
    let x: Vec<f64> = scaled.iter().map(|&(x, _)| x).collect();
    let s: Vec<f64> = (0..n).map(|i| (0..n).map(|j| inv[i][j] * x[j]).sum()).collect();
    let mut mu_elem = field.zero();
    for (i, si) in s.iter().enumerate() {
        let k = si.floor() as i64;
        if k != 0 {
            mu_elem = field.add(&mu_elem, &field.scale(&basis_elems[i], &rat_from_i64(-k)));
        }
    }
    let em = field.embed_f64(&mu_elem);
    let coords: Vec<(f64, f64)> = scaled
        .iter()
        .enumerate()
        .map(|(j, &(x, y))| (x + em[j], y))
        .collect();
    let mut point = HPoint::new(coords).expect("positive imaginary parts are preserved");
    point.prec_bits = tau.prec_bits;
    let gamma = ModularMatrix { a: eps, b: mu_elem, c: field.zero(), d: field.one() };
    Reduction { point, gamma }
}

/// True when tau is reduced for the stabilizer of infinity of the ideal b:
/// Re tau in the half-open translation cell, Im tau log-reduced.
pub fn is_reduced(field: &Field, tau: &HPoint, b: &FractionalIdeal) -> bool {
    let n = field.degree;
    let r = n - 1;
    let tol = 1e-9;
    if r > 0 {
        let basis: Vec<Vec<f64>> = (0..r)
            .map(|j| (0..r).map(|i| field.tp_log_basis[i][j]).collect())
            .collect();
        let inv = crate::numutil::invert_f64(&basis).expect("independent unit logs");
        let v: Vec<f64> = (0..r).map(|j| tau.coords[j].1.ln()).collect();
        for i in 0..r {
            let t: f64 = (0..r).map(|j| inv[i][j] * v[j]).sum();
            if t < -tol || t >= 1.0 {
                return false;
            }
        }
    }
    let b_inv = ideal::inverse(field, b);
    let basis_elems = b_inv.basis_elements(field);
    let emb: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| field.embed_f64(&basis_elems[i])[j]).collect())
        .collect();
    let inv = crate::numutil::invert_f64(&emb).expect("full-rank lattice");
    let x: Vec<f64> = tau.coords.iter().map(|&(x, _)| x).collect();
    for i in 0..n {
        let s: f64 = (0..n).map(|j| inv[i][j] * x[j]).sum();
        if s < -tol || s >= 1.0 {
            return false;
        }
    }
    true
}

/// Locates tau in the fundamental domain assembled from the spheres of
/// influence of the representatives: returns the index j such that tau lies
/// in the sphere of c_j and is chart-reduced there, if any.
///
/// Representatives must be pairwise inequivalent; this is checked through
/// the class invariant q = alpha O_K + beta a^{-1} (a principal quotient
/// q_i / q_j within the search bound means equivalent cusps).
pub fn fundamental_domain_contains(
    field: &Field,
    tau: &HPoint,
    a: &FractionalIdeal,
    reps: &[Cusp],
    c_upper: f64,
    budget: &SearchBudget,
) -> Result<Option<usize>, ActionError> {
    let a_inv = ideal::inverse(field, a);
    for i in 0..reps.len() {
        for j in (i + 1)..reps.len() {
            let qi = reps[i].q_ideal(field, &a_inv);
            let qj = reps[j].q_ideal(field, &a_inv);
            let ratio = ideal::mul(field, &qi, &ideal::inverse(field, &qj));
            if ideal::is_principal_smallfield(field, &ratio, 24.0)
                .generator()
                .is_some()
            {
                return Err(ActionError::EquivalentReps(i, j));
            }
        }
    }
    let ctx = SearchContext::new(field, a);
    for (j, rep) in reps.iter().enumerate() {
        if !sphere_membership(&ctx, tau, rep, c_upper, budget)? {
            continue;
        }
        let (m, q) = cusp_matrix(field, rep, a)?;
        let m_inv = m.inverse(field)?;
        let chart = act(field, &m_inv, tau)?;
        let b = ideal::mul(field, a, &ideal::mul(field, &q, &q));
        if is_reduced(field, &chart, &b) {
            return Ok(Some(j));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{builtin, parse_field_config};
    use crate::cusp::mu;

    fn sqrt5() -> Field {
        parse_field_config(builtin::Q_SQRT5).unwrap()
    }

    fn hp(coords: &[(f64, f64)]) -> HPoint {
        HPoint::new(coords.to_vec()).unwrap()
    }

    #[test]
    fn identity_acts_trivially() {
        let k = sqrt5();
        let m = ModularMatrix::identity(&k);
        let tau = hp(&[(0.3, 1.1), (-0.4, 0.6)]);
        let out = act(&k, &m, &tau).unwrap();
        for (a, b) in out.coords.iter().zip(&tau.coords) {
            assert!((a.0 - b.0).abs() < 1e-15 && (a.1 - b.1).abs() < 1e-15);
        }
    }

    #[test]
    fn translation_shifts_real_parts() {
        let k = sqrt5();
        let mu_e = k.theta();
        let m = ModularMatrix { a: k.one(), b: mu_e.clone(), c: k.zero(), d: k.one() };
        let tau = hp(&[(0.0, 1.0), (0.0, 2.0)]);
        let out = act(&k, &m, &tau).unwrap();
        let es = k.embed_f64(&mu_e);
        for j in 0..2 {
            assert!((out.coords[j].0 - es[j]).abs() < 1e-14);
            assert!((out.coords[j].1 - tau.coords[j].1).abs() < 1e-14);
        }
    }

    #[test]
    fn inversion_fixes_i() {
        let k = sqrt5();
        let m = ModularMatrix {
            a: k.zero(),
            b: k.from_integer(-1),
            c: k.one(),
            d: k.zero(),
        };
        let tau = hp(&[(0.0, 1.0), (0.0, 1.0)]);
        let out = act(&k, &m, &tau).unwrap();
        for j in 0..2 {
            assert!(out.coords[j].0.abs() < 1e-15);
            assert!((out.coords[j].1 - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn action_is_a_group_action() {
        let k = sqrt5();
        let m1 = ModularMatrix { a: k.one(), b: k.theta(), c: k.zero(), d: k.one() };
        let m2 = ModularMatrix {
            a: k.zero(),
            b: k.from_integer(-1),
            c: k.one(),
            d: k.from_integer(3),
        };
        let tau = hp(&[(0.2, 0.7), (-0.1, 1.9)]);
        let lhs = act(&k, &m1.mul(&k, &m2), &tau).unwrap();
        let rhs = act(&k, &m1, &act(&k, &m2, &tau).unwrap()).unwrap();
        for j in 0..2 {
            assert!((lhs.coords[j].0 - rhs.coords[j].0).abs() < 1e-10);
            assert!((lhs.coords[j].1 - rhs.coords[j].1).abs() < 1e-10);
        }
    }

    #[test]
    fn group_membership() {
        let k = sqrt5();
        let ok = FractionalIdeal::ring_of_integers(&k);
        assert!(in_group(&k, &ModularMatrix::identity(&k), &ok));
        // b = 1/2 not integral
        let half =
            FieldElement::new(vec![BigRational::new(1.into(), 2.into()), BigRational::zero()]);
        let m = ModularMatrix { a: k.one(), b: half, c: k.zero(), d: k.one() };
        assert!(!in_group(&k, &m, &ok));
        // det = theta is a unit but not totally positive
        let m = ModularMatrix { a: k.theta(), b: k.zero(), c: k.zero(), d: k.one() };
        assert!(!in_group(&k, &m, &ok));
        // det = theta^2 is totally positive
        let m = ModularMatrix {
            a: k.mul(&k.theta(), &k.theta()),
            b: k.zero(),
            c: k.zero(),
            d: k.one(),
        };
        assert!(in_group(&k, &m, &ok));
        // with a = (2): the lower-left entry must be in (2)
        let two = FractionalIdeal::principal(&k, &k.from_integer(2)).unwrap();
        let m = ModularMatrix { a: k.one(), b: k.zero(), c: k.one(), d: k.one() };
        assert!(in_group(&k, &m, &ok));
        assert!(!in_group(&k, &m, &two));
    }

    #[test]
    fn cusp_matrix_infinity_and_zero() {
        let k = sqrt5();
        let ok = FractionalIdeal::ring_of_integers(&k);
        let (m, q) = cusp_matrix(&k, &Cusp::infinity(&k), &ok).unwrap();
        assert_eq!(m, ModularMatrix::identity(&k));
        assert!(q.is_ring_of_integers());
        let zero = Cusp::new(k.zero(), k.one()).unwrap();
        let (m, q) = cusp_matrix(&k, &zero, &ok).unwrap();
        assert!(q.is_ring_of_integers());
        assert_eq!(m.det(&k), k.one());
        let img = m.act_cusp(&k, &Cusp::infinity(&k)).unwrap();
        assert!(img.projectively_equal(&k, &zero));
    }

    #[test]
    fn cusp_matrix_generic() {
        let k = sqrt5();
        let ok = FractionalIdeal::ring_of_integers(&k);
        let c = Cusp::new(k.theta(), k.from_integer(2)).unwrap();
        let (m, q) = cusp_matrix(&k, &c, &ok).unwrap();
        assert_eq!(m.det(&k), k.one());
        let img = m.act_cusp(&k, &Cusp::infinity(&k)).unwrap();
        assert!(img.projectively_equal(&k, &c));
        // mu_a(M tau, c) = N(q)^2 N(Im tau)
        let tau = hp(&[(0.3, 1.4), (0.2, 0.5)]);
        let moved = act(&k, &m, &tau).unwrap();
        let lhs = mu(&k, &moved, &c, &ok).unwrap();
        let nq = q.norm_f64();
        let rhs = nq * nq * tau.norm_imag();
        assert!((lhs - rhs).abs() < 1e-10 * rhs.max(1.0));
    }

    #[test]
    fn cusp_matrix_conjugates_stabilizer() {
        let k = sqrt5();
        let ok = FractionalIdeal::ring_of_integers(&k);
        let c = Cusp::new(k.theta(), k.from_integer(2)).unwrap();
        let (m, q) = cusp_matrix(&k, &c, &ok).unwrap();
        let aq2 = ideal::mul(&k, &ok, &ideal::mul(&k, &q, &q));
        let aq2_inv = ideal::inverse(&k, &aq2);
        // generators of the stabilizer of infinity for a q^2
        let unit = k.mul(&k.theta(), &k.theta());
        let gens = vec![
            ModularMatrix { a: unit, b: k.zero(), c: k.zero(), d: k.one() },
            ModularMatrix {
                a: k.one(),
                b: aq2_inv.basis_elements(&k)[0].clone(),
                c: k.zero(),
                d: k.one(),
            },
            ModularMatrix {
                a: k.one(),
                b: aq2_inv.basis_elements(&k)[1].clone(),
                c: k.zero(),
                d: k.one(),
            },
        ];
        let m_inv = m.inverse(&k).unwrap();
        for g in gens {
            assert!(in_group(&k, &g, &aq2));
            let conj = m.mul(&k, &g).mul(&k, &m_inv);
            assert!(in_group(&k, &conj, &ok), "conjugate must land in the a-group");
        }
    }

    #[test]
    fn reduce_point_idempotent() {
        let k = sqrt5();
        let ok = FractionalIdeal::ring_of_integers(&k);
        let tau = hp(&[(5.3, 0.2), (-7.1, 11.0)]);
        let red = reduce_point(&k, &tau, &ok);
        assert!(in_group(&k, &red.gamma, &ok));
        assert!(is_reduced(&k, &red.point, &ok));
        // gamma really maps tau to the reduced point
        let moved = act(&k, &red.gamma, &tau).unwrap();
        for j in 0..2 {
            assert!((moved.coords[j].0 - red.point.coords[j].0).abs() < 1e-9);
            assert!((moved.coords[j].1 - red.point.coords[j].1).abs() < 1e-9);
        }
        let again = reduce_point(&k, &red.point, &ok);
        assert_eq!(again.gamma, ModularMatrix::identity(&k));
        // the level N(Im tau) is preserved by reduction
        assert!((red.point.norm_imag() - tau.norm_imag()).abs() < 1e-9 * tau.norm_imag());
    }

    #[test]
    fn reduce_point_translation_cell() {
        let k = sqrt5();
        let ok = FractionalIdeal::ring_of_integers(&k);
        // shift a reduced point by a lattice vector and reduce back
        let tau = hp(&[(0.1, 1.0), (0.2, 1.0)]);
        let red0 = reduce_point(&k, &tau, &ok);
        let omega = k.theta();
        let es = k.embed_f64(&omega);
        let shifted = hp(&[
            (red0.point.coords[0].0 + es[0], red0.point.coords[0].1),
            (red0.point.coords[1].0 + es[1], red0.point.coords[1].1),
        ]);
        let red = reduce_point(&k, &shifted, &ok);
        for j in 0..2 {
            assert!((red.point.coords[j].0 - red0.point.coords[j].0).abs() < 1e-9);
        }
    }

    #[test]
    fn reduce_point_unit_scaling() {
        let k = sqrt5();
        let ok = FractionalIdeal::ring_of_integers(&k);
        // scale Im by the totally positive unit theta^2 and reduce back
        let base = hp(&[(0.0, 0.8), (0.0, 1.3)]);
        let red0 = reduce_point(&k, &base, &ok);
        let unit = k.mul(&k.theta(), &k.theta());
        let es = k.embed_f64(&unit);
        let scaled = hp(&[
            (0.0, red0.point.coords[0].1 * es[0]),
            (0.0, red0.point.coords[1].1 * es[1]),
        ]);
        let red = reduce_point(&k, &scaled, &ok);
        for j in 0..2 {
            assert!(
                (red.point.coords[j].1 - red0.point.coords[j].1).abs() < 1e-9,
                "imaginary parts return to the same unit cell"
            );
        }
    }

    #[test]
    fn fundamental_domain_lookup() {
        let k = sqrt5();
        let ok = FractionalIdeal::ring_of_integers(&k);
        let reps = vec![Cusp::infinity(&k)];
        let budget = SearchBudget::default();
        let c_up = k.default_c_upper();
        let far = hp(&[(0.0, 10.0), (0.0, 10.0)]);
        let red = reduce_point(&k, &far, &ok).point;
        let idx = fundamental_domain_contains(&k, &red, &ok, &reps, c_up, &budget).unwrap();
        assert_eq!(idx, Some(0));
        // an unreduced translate is rejected
        let shifted = hp(&[(10.0, 10.0), (14.0, 10.0)]);
        let idx = fundamental_domain_contains(&k, &shifted, &ok, &reps, c_up, &budget).unwrap();
        assert_eq!(idx, None);
    }

    #[test]
    fn equivalent_reps_detected() {
        let k = sqrt5();
        let ok = FractionalIdeal::ring_of_integers(&k);
        let reps = vec![
            Cusp::infinity(&k),
            Cusp::new(k.zero(), k.one()).unwrap(), // equivalent for h = 1
        ];
        let budget = SearchBudget::default();
        let tau = hp(&[(0.0, 2.0), (0.0, 2.0)]);
        let r = fundamental_domain_contains(&k, &tau, &ok, &reps, k.default_c_upper(), &budget);
        assert!(matches!(r, Err(ActionError::EquivalentReps(_, _))));
    }
}
