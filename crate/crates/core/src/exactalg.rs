//! Exact rational, polynomial and number-field arithmetic.
//!
//! Number fields are presented as Q[x]/(f) with f monic; elements are dense
//! coordinate vectors of rationals in the power basis.  Galois automorphisms
//! are input data (polynomial images of the generator) validated here, never
//! discovered here.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

pub type Q = BigRational;

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_ratio(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("invalid automorphism: {0}")]
    InvalidAutomorphism(String),
    #[error("singular linear system")]
    SingularSystem,
}

/// Dense polynomial over Q, coefficients lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QPoly {
    pub coeffs: Vec<Q>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Q::zero());
        }
        QPoly { coeffs }
    }

    pub fn from_ints(cs: &[i64]) -> Self {
        QPoly::new(cs.iter().map(|&c| q_int(c)).collect())
    }

    pub fn zero() -> Self {
        QPoly::new(vec![Q::zero()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn degree(&self) -> usize {
        if self.is_zero() {
            0
        } else {
            self.coeffs.len() - 1
        }
    }

    pub fn is_monic(&self) -> bool {
        !self.is_zero() && self.coeffs.last().unwrap().is_one()
    }

    pub fn derivative(&self) -> QPoly {
        if self.coeffs.len() <= 1 {
            return QPoly::zero();
        }
        QPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * q_int(i as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Remainder of self modulo g (g monic).
    pub fn rem(&self, g: &QPoly) -> QPoly {
        assert!(g.is_monic());
        let dg = g.degree();
        let mut r = self.coeffs.clone();
        while r.len() > dg {
            let lead = r.pop().unwrap();
            if lead.is_zero() {
                continue;
            }
            let k = r.len() - dg;
            for j in 0..dg {
                let v = r[k + j].clone() - &lead * &g.coeffs[j];
                r[k + j] = v;
            }
        }
        QPoly::new(r)
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        let mut out = vec![Q::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let v = out[i + j].clone() + a * b;
                out[i + j] = v;
            }
        }
        QPoly::new(out)
    }

    /// gcd(self, other), monic.
    pub fn gcd(&self, other: &QPoly) -> QPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let lead = b.coeffs.last().unwrap().clone();
            let bm = QPoly::new(b.coeffs.iter().map(|c| c / &lead).collect());
            let r = a.rem(&bm);
            a = bm;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.coeffs.last().unwrap().clone();
        QPoly::new(a.coeffs.iter().map(|c| c / &lead).collect())
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == 0
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// A number field Q[x]/(f) with f monic (irreducibility is the caller's
/// contract; validation checks monicity and squarefreeness).
#[derive(Debug)]
pub struct NumberField {
    pub poly: QPoly,
    pub degree: usize,
}

impl NumberField {
    pub fn new(poly: QPoly) -> Arc<Self> {
        assert!(poly.is_monic(), "defining polynomial must be monic");
        assert!(poly.degree() >= 1);
        let degree = poly.degree();
        Arc::new(NumberField { poly, degree })
    }

    pub fn one(self: &Arc<Self>) -> NFElement {
        let mut c = vec![Q::zero(); self.degree];
        c[0] = Q::one();
        NFElement {
            field: Arc::clone(self),
            coords: c,
        }
    }

    pub fn zero(self: &Arc<Self>) -> NFElement {
        NFElement {
            field: Arc::clone(self),
            coords: vec![Q::zero(); self.degree],
        }
    }

    pub fn gen(self: &Arc<Self>) -> NFElement {
        let mut c = vec![Q::zero(); self.degree];
        if self.degree >= 2 {
            c[1] = Q::one();
        } else {
            // degree-1 field: generator is the root itself
            c[0] = -self.poly.coeffs[0].clone();
        }
        NFElement {
            field: Arc::clone(self),
            coords: c,
        }
    }

    pub fn element(self: &Arc<Self>, coords: Vec<Q>) -> NFElement {
        assert_eq!(coords.len(), self.degree);
        NFElement {
            field: Arc::clone(self),
            coords,
        }
    }

    pub fn from_int(self: &Arc<Self>, n: i64) -> NFElement {
        let mut c = vec![Q::zero(); self.degree];
        c[0] = q_int(n);
        self.element(c)
    }
}

/// Element of a number field, coordinates in the power basis of the generator.
#[derive(Debug, Clone)]
pub struct NFElement {
    pub field: Arc<NumberField>,
    pub coords: Vec<Q>,
}

impl PartialEq for NFElement {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.field, &other.field) && self.coords == other.coords
    }
}
impl Eq for NFElement {}

impl NFElement {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    fn same_field(&self, other: &NFElement) -> Result<(), AlgError> {
        if Arc::ptr_eq(&self.field, &other.field) || self.field.poly == other.field.poly {
            Ok(())
        } else {
            Err(AlgError::FieldMismatch)
        }
    }

    pub fn add(&self, other: &NFElement) -> Result<NFElement, AlgError> {
        self.same_field(other)?;
        Ok(self.field.element(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }

    pub fn sub(&self, other: &NFElement) -> Result<NFElement, AlgError> {
        self.same_field(other)?;
        Ok(self.field.element(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        ))
    }

    pub fn neg(&self) -> NFElement {
        self.field
            .element(self.coords.iter().map(|a| -a.clone()).collect())
    }

    pub fn scale(&self, c: &Q) -> NFElement {
        self.field
            .element(self.coords.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, other: &NFElement) -> Result<NFElement, AlgError> {
        self.same_field(other)?;
        let d = self.field.degree;
        let mut raw = vec![Q::zero(); 2 * d - 1];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coords.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let v = raw[i + j].clone() + a * b;
                raw[i + j] = v;
            }
        }
        // reduce modulo the defining polynomial
        for k in (d..raw.len()).rev() {
            if raw[k].is_zero() {
                continue;
            }
            let c = std::mem::replace(&mut raw[k], Q::zero());
            for j in 0..d {
                let v = raw[k - d + j].clone() - &c * &self.field.poly.coeffs[j];
                raw[k - d + j] = v;
            }
        }
        raw.truncate(d);
        Ok(self.field.element(raw))
    }

    pub fn pow(&self, e: u64) -> NFElement {
        let mut acc = self.field.one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).unwrap();
            }
            base = base.mul(&base).unwrap();
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self) -> Result<NFElement, AlgError> {
        if self.is_zero() {
            return Err(AlgError::DivisionByZero);
        }
        // solve (self * x) = 1 via the multiplication matrix
        let m = self.mul_matrix();
        let d = self.field.degree;
        let mut rhs = vec![Q::zero(); d];
        rhs[0] = Q::one();
        let sol = solve_linear(&m, &rhs)?;
        Ok(self.field.element(sol))
    }

    pub fn div(&self, other: &NFElement) -> Result<NFElement, AlgError> {
        self.mul(&other.inv()?)
    }

    /// Columns are self * gen^j expressed in the power basis.
    pub fn mul_matrix(&self) -> Vec<Vec<Q>> {
        let d = self.field.degree;
        let gen = self.field.gen();
        let mut cols = Vec::with_capacity(d);
        let mut cur = self.clone();
        cols.push(cur.coords.clone());
        for _ in 1..d {
            cur = cur.mul(&gen).unwrap();
            cols.push(cur.coords.clone());
        }
        (0..d)
            .map(|i| (0..d).map(|j| cols[j][i].clone()).collect())
            .collect()
    }

    /// Field norm and trace, as determinant and trace of the
    /// multiplication-by-self matrix.
    pub fn norm_trace(&self) -> (Q, Q) {
        let m = self.mul_matrix();
        let d = self.field.degree;
        let tr = (0..d).fold(Q::zero(), |acc, i| acc + &m[i][i]);
        (determinant(&m), tr)
    }

    pub fn norm(&self) -> Q {
        self.norm_trace().0
    }

    pub fn trace(&self) -> Q {
        self.norm_trace().1
    }

    /// Monic minimal polynomial over Q, found as the first linear dependence
    /// among the powers 1, a, a^2, ...
    pub fn minimal_polynomial(&self) -> QPoly {
        let d = self.field.degree;
        let mut powers: Vec<Vec<Q>> = Vec::new();
        let mut cur = self.field.one();
        powers.push(cur.coords.clone());
        for k in 1..=d {
            cur = cur.mul(self).unwrap();
            powers.push(cur.coords.clone());
            // try to express powers[k] as a combination of the earlier ones
            let m: Vec<Vec<Q>> = (0..d)
                .map(|i| (0..k).map(|j| powers[j][i].clone()).collect())
                .collect();
            let rhs: Vec<Q> = (0..d).map(|i| powers[k][i].clone()).collect();
            if let Ok(sol) = solve_least(&m, &rhs) {
                let mut cs: Vec<Q> = sol.into_iter().map(|c| -c).collect();
                cs.push(Q::one());
                return QPoly::new(cs);
            }
        }
        unreachable!("an element of a degree-d field has degree at most d")
    }
}

/// Galois automorphism given by the image of the field generator.
#[derive(Debug, Clone)]
pub struct FieldAutomorphism {
    pub field: Arc<NumberField>,
    pub image: NFElement,
    pub order: usize,
}

impl FieldAutomorphism {
    pub fn new(field: &Arc<NumberField>, image: NFElement, order: usize) -> Self {
        FieldAutomorphism {
            field: Arc::clone(field),
            image,
            order,
        }
    }

    /// Substitute the generator by `image` in the coordinates of `a`.
    pub fn apply(&self, a: &NFElement) -> NFElement {
        let mut acc = self.field.zero();
        let mut pw = self.field.one();
        for (i, c) in a.coords.iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add(&pw.scale(c)).unwrap();
            }
            if i + 1 < a.coords.len() {
                pw = pw.mul(&self.image).unwrap();
            }
        }
        acc
    }

    /// Image of the composite sigma_self . sigma_other.
    pub fn compose_image(&self, other: &FieldAutomorphism) -> NFElement {
        self.apply(&other.image)
    }

    /// Checks: f(image) = 0, and iterating `order` times returns the generator.
    pub fn validate(&self) -> Result<(), AlgError> {
        let d = self.field.degree;
        // evaluate f at image
        let mut acc = self.field.zero();
        let mut pw = self.field.one();
        for (i, c) in self.field.poly.coeffs.iter().enumerate() {
            acc = acc.add(&pw.scale(c)).unwrap();
            if i < d {
                pw = pw.mul(&self.image).unwrap();
            }
        }
        if !acc.is_zero() {
            return Err(AlgError::InvalidAutomorphism(
                "generator image is not a root of the defining polynomial".into(),
            ));
        }
        let gen = self.field.gen();
        let mut cur = self.image.clone();
        for k in 1..=self.order {
            if cur == gen {
                if k == self.order {
                    return Ok(());
                }
                return Err(AlgError::InvalidAutomorphism(format!(
                    "order is {k}, declared {}",
                    self.order
                )));
            }
            cur = self.apply_to_image(&cur);
        }
        if cur == gen && self.order == 0 {
            return Ok(());
        }
        Err(AlgError::InvalidAutomorphism(format!(
            "iterating {} times does not return the generator",
            self.order
        )))
    }

    fn apply_to_image(&self, cur: &NFElement) -> NFElement {
        // cur with generator replaced by self.image
        let tmp = NFElement {
            field: Arc::clone(&self.field),
            coords: cur.coords.clone(),
        };
        self.apply(&tmp)
    }
}

/// Solve M x = rhs for square M over Q.
pub fn solve_linear(m: &[Vec<Q>], rhs: &[Q]) -> Result<Vec<Q>, AlgError> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .zip(rhs)
        .map(|(row, r)| {
            let mut v = row.clone();
            v.push(r.clone());
            v
        })
        .collect();
    for c in 0..n {
        let piv = (c..n)
            .find(|&r| !a[r][c].is_zero())
            .ok_or(AlgError::SingularSystem)?;
        a.swap(c, piv);
        let pv = a[c][c].clone();
        for v in a[c].iter_mut() {
            *v = &*v / &pv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for j in 0..=n {
                    let v = a[r][j].clone() - &f * &a[c][j];
                    a[r][j] = v;
                }
            }
        }
    }
    Ok((0..n).map(|i| a[i][n].clone()).collect())
}

/// Solve a possibly overdetermined system M x = rhs exactly; errors if
/// inconsistent or underdetermined.
pub fn solve_least(m: &[Vec<Q>], rhs: &[Q]) -> Result<Vec<Q>, AlgError> {
    let rows = m.len();
    if rows == 0 {
        return Err(AlgError::SingularSystem);
    }
    let cols = m[0].len();
    if cols == 0 {
        // consistent iff rhs = 0
        return if rhs.iter().all(|r| r.is_zero()) {
            Ok(vec![])
        } else {
            Err(AlgError::SingularSystem)
        };
    }
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .zip(rhs)
        .map(|(row, r)| {
            let mut v = row.clone();
            v.push(r.clone());
            v
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r0 = 0usize;
    for c in 0..cols {
        if let Some(piv) = (r0..rows).find(|&r| !a[r][c].is_zero()) {
            a.swap(r0, piv);
            let pv = a[r0][c].clone();
            for v in a[r0].iter_mut() {
                *v = &*v / &pv;
            }
            for r in 0..rows {
                if r != r0 && !a[r][c].is_zero() {
                    let f = a[r][c].clone();
                    for j in 0..=cols {
                        let v = a[r][j].clone() - &f * &a[r0][j];
                        a[r][j] = v;
                    }
                }
            }
            pivots.push(c);
            r0 += 1;
        }
    }
    if pivots.len() < cols {
        return Err(AlgError::SingularSystem);
    }
    // consistency of the remaining rows
    for r in r0..rows {
        if !a[r][cols].is_zero() {
            return Err(AlgError::SingularSystem);
        }
    }
    let mut sol = vec![Q::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        sol[c] = a[i][cols].clone();
    }
    Ok(sol)
}

pub fn determinant(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m.to_vec();
    let mut det = Q::one();
    for c in 0..n {
        let piv = match (c..n).find(|&r| !a[r][c].is_zero()) {
            Some(p) => p,
            None => return Q::zero(),
        };
        if piv != c {
            a.swap(c, piv);
            det = -det;
        }
        det = det * &a[c][c];
        let inv = a[c][c].clone().recip();
        for r in c + 1..n {
            if !a[r][c].is_zero() {
                let f = &a[r][c] * &inv;
                for j in c..n {
                    let v = a[r][j].clone() - &f * &a[c][j];
                    a[r][j] = v;
                }
            }
        }
    }
    det
}

/// Bounded search for elements of given absolute norm in a number field of
/// degree <= 4, used to construct ell-units.  Complex embeddings computed by
/// Durand-Kerner give a fast floating filter; hits are verified exactly.
pub struct NormSearch {
    field: Arc<NumberField>,
    roots: Vec<(f64, f64)>,
}

impl NormSearch {
    pub fn new(field: &Arc<NumberField>) -> Self {
        let roots = complex_roots(&field.poly);
        NormSearch {
            field: Arc::clone(field),
            roots,
        }
    }

    fn float_norm(&self, coeffs: &[i64]) -> f64 {
        let mut prod = 1.0f64;
        for &(re, im) in &self.roots {
            let (mut vr, mut vi) = (0.0f64, 0.0f64);
            // Horner for sum coeffs[i] * r^i
            for &c in coeffs.iter().rev() {
                let nr = vr * re - vi * im + c as f64;
                let ni = vr * im + vi * re;
                vr = nr;
                vi = ni;
            }
            prod *= (vr * vr + vi * vi).sqrt();
        }
        prod
    }

    /// Search the coefficient box for elements with |Norm| in `targets`.
    /// Returns (element, |norm|) pairs, first hit per target.
    pub fn search(&self, targets: &[BigInt], bound: i64) -> Vec<(NFElement, BigInt)> {
        let d = self.field.degree;
        assert!(d >= 2 && d <= 4);
        let tset: Vec<(f64, &BigInt)> = targets
            .iter()
            .map(|t| (t.to_string().parse::<f64>().unwrap_or(f64::MAX), t))
            .collect();
        let mut found: Vec<Option<NFElement>> = vec![None; targets.len()];
        let mut remaining = targets.len();
        let mut coeffs = vec![0i64; d];
        let mut stack = vec![-bound - 1; d];
        stack[d - 1] = -1; // leading coefficient from 0 upward (sign symmetry)
        let mut level = d - 1;
        'outer: loop {
            // odometer over the box, leading coefficient >= 0
            loop {
                stack[level] += 1;
                let lim = bound;
                if stack[level] <= lim {
                    coeffs[level] = stack[level];
                    if level == 0 {
                        break;
                    }
                    level -= 1;
                    stack[level] = -bound - 1;
                } else {
                    if level == d - 1 {
                        break 'outer;
                    }
                    level += 1;
                }
            }
            let fnorm = self.float_norm(&coeffs);
            if fnorm > 0.5 {
                for (ti, (tf, tb)) in tset.iter().enumerate() {
                    if found[ti].is_some() {
                        continue;
                    }
                    if (fnorm - tf).abs() / tf < 0.01 {
                        let elt = self
                            .field
                            .element(coeffs.iter().map(|&c| q_int(c)).collect());
                        let n = elt.norm();
                        if n.denom().is_one() && n.numer().abs() == **tb {
                            found[ti] = Some(elt);
                            remaining -= 1;
                            if remaining == 0 {
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        found
            .into_iter()
            .zip(targets)
            .filter_map(|(e, t)| e.map(|e| (e, t.clone())))
            .collect()
    }
}

/// All complex roots of a rational polynomial by Durand-Kerner iteration.
pub fn complex_roots(poly: &QPoly) -> Vec<(f64, f64)> {
    let d = poly.degree();
    let cs: Vec<f64> = poly
        .coeffs
        .iter()
        .map(|c| {
            let n = c.numer().to_string().parse::<f64>().unwrap_or(0.0);
            let q = c.denom().to_string().parse::<f64>().unwrap_or(1.0);
            n / q
        })
        .collect();
    let eval = |re: f64, im: f64| -> (f64, f64) {
        let (mut vr, mut vi) = (0.0f64, 0.0f64);
        for &c in cs.iter().rev() {
            let nr = vr * re - vi * im + c;
            let ni = vr * im + vi * re;
            vr = nr;
            vi = ni;
        }
        (vr, vi)
    };
    let mut rs: Vec<(f64, f64)> = (0..d)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.4;
            let rad = 1.0 + cs[0].abs().powf(1.0 / d as f64);
            (rad * ang.cos(), rad * ang.sin())
        })
        .collect();
    for _ in 0..200 {
        let mut next = rs.clone();
        for i in 0..d {
            let (pr, pi) = eval(rs[i].0, rs[i].1);
            // denominator: prod over j != i of (r_i - r_j)
            let (mut dr, mut di) = (1.0f64, 0.0f64);
            for j in 0..d {
                if j != i {
                    let (er, ei) = (rs[i].0 - rs[j].0, rs[i].1 - rs[j].1);
                    let nr = dr * er - di * ei;
                    let ni = dr * ei + di * er;
                    dr = nr;
                    di = ni;
                }
            }
            let den = dr * dr + di * di;
            if den > 1e-30 {
                let qr = (pr * dr + pi * di) / den;
                let qi = (pi * dr - pr * di) / den;
                next[i] = (rs[i].0 - qr, rs[i].1 - qi);
            }
        }
        rs = next;
    }
    rs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss_field() -> Arc<NumberField> {
        NumberField::new(QPoly::from_ints(&[1, 0, 1])) // x^2 + 1
    }

    fn example1_field() -> Arc<NumberField> {
        NumberField::new(QPoly::from_ints(&[23, 0, 9, 0, -6, 0, 1]))
    }

    #[test]
    fn gaussian_generator_squares_to_minus_one() {
        let f = gauss_field();
        let i = f.gen();
        assert_eq!(i.mul(&i).unwrap(), f.from_int(-1));
    }

    #[test]
    fn inverse_multiplies_to_one() {
        let f = example1_field();
        let a = f.element(vec![
            q_int(2),
            q_ratio(1, 3),
            q_int(0),
            q_int(-5),
            q_int(1),
            q_int(7),
        ]);
        assert_eq!(a.mul(&a.inv().unwrap()).unwrap(), f.one());
    }

    #[test]
    fn elliptic_unit_satisfies_its_cubic() {
        // u = (a^2 - 1)/3 is a root of x^3 - x^2 + 1
        let f = example1_field();
        let u = f.element(vec![
            q_ratio(-1, 3),
            q_int(0),
            q_ratio(1, 3),
            q_int(0),
            q_int(0),
            q_int(0),
        ]);
        let val = u
            .pow(3)
            .sub(&u.pow(2))
            .unwrap()
            .add(&f.one())
            .unwrap();
        assert!(val.is_zero());
        assert_eq!(u.minimal_polynomial(), QPoly::from_ints(&[1, 0, -1, 1]));
        assert_eq!(u.norm(), q_int(1));
    }

    #[test]
    fn norm_trace_of_one() {
        let f = example1_field();
        let (n, t) = f.one().norm_trace();
        assert_eq!(n, q_int(1));
        assert_eq!(t, q_int(6));
    }

    #[test]
    fn seven_unit_norm_and_minpoly() {
        // u(7) = (2a^4 - 7a^2 + 5)/9, a root of x^3 - x^2 + 2x - 7; its
        // H/Q-norm is the square of the cubic norm, 7^2.
        let f = example1_field();
        let u7 = f.element(vec![
            q_ratio(5, 9),
            q_int(0),
            q_ratio(-7, 9),
            q_int(0),
            q_ratio(2, 9),
            q_int(0),
        ]);
        assert_eq!(u7.norm(), q_int(49));
        assert_eq!(u7.minimal_polynomial(), QPoly::from_ints(&[-7, 2, -1, 1]));
    }

    #[test]
    fn lambda13_minpoly() {
        let f = example1_field();
        let u13 = f.element(vec![
            q_int(-37),
            q_int(18),
            q_int(0),
            q_int(-6),
            q_int(0),
            q_int(0),
        ]);
        assert_eq!(u13.minimal_polynomial(), QPoly::from_ints(&[2197, 74, 1]));
    }

    #[test]
    fn minimal_polynomial_of_zero() {
        let f = gauss_field();
        assert_eq!(f.zero().minimal_polynomial(), QPoly::from_ints(&[0, 1]));
    }

    #[test]
    fn automorphism_validation() {
        let f = example1_field();
        // alpha -> -alpha on an even polynomial, order 2
        let neg = FieldAutomorphism::new(&f, f.gen().neg(), 2);
        assert!(neg.validate().is_ok());
        let idm = FieldAutomorphism::new(&f, f.gen(), 1);
        assert!(idm.validate().is_ok());
        // wrong declared order
        let bad = FieldAutomorphism::new(&f, f.gen().neg(), 3);
        assert!(bad.validate().is_err());
        // not a root
        let bad2 = FieldAutomorphism::new(&f, f.one(), 2);
        assert!(bad2.validate().is_err());
    }

    #[test]
    fn norm_invariance_under_automorphism() {
        let f = example1_field();
        let neg = FieldAutomorphism::new(&f, f.gen().neg(), 2);
        let a = f.element(vec![
            q_int(1),
            q_int(2),
            q_ratio(1, 3),
            q_int(0),
            q_int(-1),
            q_int(4),
        ]);
        assert_eq!(neg.apply(&a).norm(), a.norm());
    }

    #[test]
    fn norm_search_finds_small_elements() {
        // cubic field of the elliptic unit: x^3 - x^2 + 1
        let e = NumberField::new(QPoly::from_ints(&[1, 0, -1, 1]));
        let s = NormSearch::new(&e);
        let hits = s.search(&[BigInt::from(7)], 8);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].0.norm().abs(), q_int(7));
    }
}
