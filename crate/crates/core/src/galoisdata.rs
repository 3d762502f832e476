//! Finite Galois group data: multiplication tables built from validated
//! automorphisms, characters realised as p-adic roots of unity, the
//! two-dimensional representation in dihedral or projective form, and the
//! adjoint algebra with its bracket, trace pairing and trilinear determinant.

use crate::exactalg::{AlgError, FieldAutomorphism, NFElement};
use crate::padics::{PadicContext, PadicError, Unramified};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GaloisError {
    #[error("automorphism set is not closed under composition")]
    NotAGroup,
    #[error("character exponents do not define a homomorphism")]
    NotAHomomorphism,
    #[error("root of unity has wrong order")]
    WrongOrder,
    #[error("matrix is not trace zero")]
    NotTraceZero,
    #[error("scalar recovery is ambiguous (trace zero, a_ell = 0)")]
    SignAmbiguity,
    #[error("no scalar matches trace and determinant")]
    NoScalar,
    #[error(transparent)]
    Alg(#[from] AlgError),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

/// Multiplication table of G = Gal(H/Q) built from automorphism data.
/// Index 0 is the identity.
#[derive(Debug, Clone)]
pub struct GroupTable {
    pub n: usize,
    pub mul: Vec<Vec<usize>>,
    pub inv: Vec<usize>,
    pub orders: Vec<usize>,
    /// indices of the abelian normal subgroup Z = Gal(H/K)
    pub z: Vec<usize>,
}

impl GroupTable {
    /// Build from automorphisms (index 0 must be the identity) and the
    /// declared Z; membership of Z is re-derived from the fixed quadratic
    /// element when provided.
    pub fn build(
        autos: &[FieldAutomorphism],
        z: Vec<usize>,
        sqrt_disc: Option<&NFElement>,
    ) -> Result<GroupTable, GaloisError> {
        let n = autos.len();
        let images: Vec<NFElement> = autos.iter().map(|a| a.image.clone()).collect();
        let mut mul = vec![vec![usize::MAX; n]; n];
        for i in 0..n {
            for j in 0..n {
                let img = autos[i].apply(&images[j]);
                let k = images
                    .iter()
                    .position(|m| *m == img)
                    .ok_or(GaloisError::NotAGroup)?;
                mul[i][j] = k;
            }
        }
        if images[0] != autos[0].field.gen() {
            return Err(GaloisError::NotAGroup);
        }
        let inv: Vec<usize> = (0..n)
            .map(|i| (0..n).find(|&j| mul[i][j] == 0).ok_or(GaloisError::NotAGroup))
            .collect::<Result<_, _>>()?;
        let orders: Vec<usize> = (0..n)
            .map(|i| {
                let mut cur = i;
                let mut k = 1;
                while cur != 0 {
                    cur = mul[cur][i];
                    k += 1;
                }
                k
            })
            .collect();
        if let Some(s) = sqrt_disc {
            for &zi in &z {
                if autos[zi].apply(s) != *s {
                    return Err(GaloisError::NotAGroup);
                }
            }
            for i in 0..n {
                if !z.contains(&i) && autos[i].apply(s) == *s {
                    return Err(GaloisError::NotAGroup);
                }
            }
        }
        Ok(GroupTable {
            n,
            mul,
            inv,
            orders,
            z,
        })
    }

    pub fn in_z(&self, i: usize) -> bool {
        self.z.contains(&i)
    }
}

/// Deterministic primitive m-th root of unity: g0^((p^f-1)/m) where g0 is
/// the Teichmüller lift of the least generator of the residue field's
/// multiplicative group (coordinates enumerated lexicographically).
pub fn zeta(ctx: &Arc<PadicContext>, m: u64) -> Result<Unramified, GaloisError> {
    let q = ctx.residue_order();
    if q % m != 0 {
        return Err(GaloisError::WrongOrder);
    }
    let g0 = least_generator(ctx)?;
    let z = g0.pow_i64((q / m) as i64)?;
    check_exact_order(&z, m)?;
    Ok(z)
}

fn least_generator(ctx: &Arc<PadicContext>) -> Result<Unramified, GaloisError> {
    let q = ctx.residue_order();
    let mut divisors = vec![];
    let mut m = q;
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            divisors.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        divisors.push(m);
    }
    // enumerate residue elements lexicographically
    let total = ctx.p.pow(ctx.f as u32);
    for idx in 1..total {
        let mut coords = vec![];
        let mut t = idx;
        for _ in 0..ctx.f {
            coords.push((t % ctx.p) as i64);
            t /= ctx.p;
        }
        // build the element sum coords[i] * t^i
        let mut elt = Unramified::zero(ctx);
        let gen = gen_elt(ctx);
        let mut pw = Unramified::one(ctx);
        for (i, &c) in coords.iter().enumerate() {
            if c != 0 {
                elt = elt.add(&pw.mul(&Unramified::from_i64(ctx, c)));
            }
            if i + 1 < ctx.f {
                pw = pw.mul(&gen);
            }
        }
        if elt.is_zero() || elt.val != 0 {
            continue;
        }
        let w = elt.teichmuller()?;
        let mut is_gen = true;
        for &dv in &divisors {
            if w
                .pow_i64((q / dv) as i64)?
                .eq_to(&Unramified::one(ctx), 1)
            {
                is_gen = false;
                break;
            }
        }
        if is_gen {
            return Ok(w);
        }
    }
    Err(GaloisError::WrongOrder)
}

fn gen_elt(ctx: &Arc<PadicContext>) -> Unramified {
    // the class of x in Z_p[x]/(modulus)
    if ctx.f == 1 {
        return Unramified::one(ctx);
    }
    // t has integral coordinates (0, 1, 0, ...)
    let one = Unramified::one(ctx);
    // build via from_raw-like path: t = root of modulus; use poly evaluation:
    // the element with coords (0,1,0,..) equals... construct by embedding the
    // linear polynomial directly
    let mut t = Unramified::zero_to(ctx, 0);
    let _ = &mut t;
    // simplest: t satisfies raw coords; reconstruct from one and shifting is
    // not available publicly, so rebuild through arithmetic: t = root of the
    // modulus found by lifting the residue (0,1).
    // The modulus is irreducible so its root in this field is the generator.
    let poly = crate::exactalg::QPoly::new(
        ctx.modulus
            .iter()
            .map(|c| crate::exactalg::Q::from_integer(c.clone()))
            .collect(),
    );
    let roots = crate::padics::lift_roots(ctx, &poly).expect("modulus splits over itself");
    // the generator is the root congruent to (0,1) mod p
    for r in &roots {
        let c = r.unit_coords();
        if r.val == 0
            && (c[0].clone() % ctx.p).to_string() == "0"
            && (c[1].clone() % ctx.p).to_string() == "1"
        {
            return r.clone();
        }
    }
    let _ = one;
    roots[0].clone()
}

pub fn check_exact_order(z: &Unramified, m: u64) -> Result<(), GaloisError> {
    let one = Unramified::one(&z.ctx);
    let n = z.ctx.n as i64;
    if !z.pow_i64(m as i64).map_err(GaloisError::Padic)?.eq_to(&one, n) {
        return Err(GaloisError::WrongOrder);
    }
    for k in 1..m {
        if m % k == 0 && z.pow_i64(k as i64).map_err(GaloisError::Padic)?.eq_to(&one, n) {
            return Err(GaloisError::WrongOrder);
        }
    }
    Ok(())
}

/// Character of Z with values in the group generated by a primitive m-th
/// root of unity in the working context.
#[derive(Debug, Clone)]
pub struct Character {
    pub order: u64,
    /// exponent of each group element (indexed by group index; elements not
    /// in the domain hold may hold any value and are unused)
    pub exponents: Vec<i64>,
    pub zeta: Unramified,
}

impl Character {
    pub fn value(&self, g: usize) -> Unramified {
        self.zeta
            .pow_i64(self.exponents[g].rem_euclid(self.order as i64))
            .expect("root of unity power")
    }

    pub fn value_inv(&self, g: usize) -> Unramified {
        self.zeta
            .pow_i64((-self.exponents[g]).rem_euclid(self.order as i64))
            .expect("root of unity power")
    }

    /// Homomorphism check on the subgroup listed in `domain`.
    pub fn validate(&self, table: &GroupTable, domain: &[usize]) -> Result<(), GaloisError> {
        let m = self.order as i64;
        for &a in domain {
            for &b in domain {
                let ab = table.mul[a][b];
                if (self.exponents[a] + self.exponents[b] - self.exponents[ab]).rem_euclid(m) != 0 {
                    return Err(GaloisError::NotAHomomorphism);
                }
            }
        }
        check_exact_order(&self.zeta, self.order)
    }
}

/// 2x2 matrix over the working unramified field; the engines' adjoint
/// elements, representation matrices and deformation matrices all use it.
#[derive(Clone)]
pub struct Mat2 {
    pub e: [[Unramified; 2]; 2],
}

impl std::fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[[{:?}, {:?}], [{:?}, {:?}]]",
            self.e[0][0], self.e[0][1], self.e[1][0], self.e[1][1]
        )
    }
}

impl Mat2 {
    pub fn new(a: Unramified, b: Unramified, c: Unramified, d: Unramified) -> Mat2 {
        Mat2 { e: [[a, b], [c, d]] }
    }

    pub fn zero(ctx: &Arc<PadicContext>) -> Mat2 {
        let z = Unramified::zero(ctx);
        Mat2::new(z.clone(), z.clone(), z.clone(), z)
    }

    pub fn identity(ctx: &Arc<PadicContext>) -> Mat2 {
        let z = Unramified::zero(ctx);
        let o = Unramified::one(ctx);
        Mat2::new(o.clone(), z.clone(), z, o)
    }

    pub fn scalar(v: &Unramified) -> Mat2 {
        let z = Unramified::zero(&v.ctx);
        Mat2::new(v.clone(), z.clone(), z, v.clone())
    }

    pub fn diag(a: &Unramified, d: &Unramified) -> Mat2 {
        let z = Unramified::zero(&a.ctx);
        Mat2::new(a.clone(), z.clone(), z, d.clone())
    }

    pub fn antidiag(b: &Unramified, c: &Unramified) -> Mat2 {
        let z = Unramified::zero(&b.ctx);
        Mat2::new(z.clone(), b.clone(), c.clone(), z)
    }

    pub fn add(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            e: [
                [self.e[0][0].add(&o.e[0][0]), self.e[0][1].add(&o.e[0][1])],
                [self.e[1][0].add(&o.e[1][0]), self.e[1][1].add(&o.e[1][1])],
            ],
        }
    }

    pub fn sub(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            e: [
                [self.e[0][0].sub(&o.e[0][0]), self.e[0][1].sub(&o.e[0][1])],
                [self.e[1][0].sub(&o.e[1][0]), self.e[1][1].sub(&o.e[1][1])],
            ],
        }
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let f = |i: usize, j: usize| {
            self.e[i][0]
                .mul(&o.e[0][j])
                .add(&self.e[i][1].mul(&o.e[1][j]))
        };
        Mat2 {
            e: [[f(0, 0), f(0, 1)], [f(1, 0), f(1, 1)]],
        }
    }

    pub fn scale(&self, v: &Unramified) -> Mat2 {
        Mat2 {
            e: [
                [self.e[0][0].mul(v), self.e[0][1].mul(v)],
                [self.e[1][0].mul(v), self.e[1][1].mul(v)],
            ],
        }
    }

    pub fn neg(&self) -> Mat2 {
        Mat2 {
            e: [
                [self.e[0][0].neg(), self.e[0][1].neg()],
                [self.e[1][0].neg(), self.e[1][1].neg()],
            ],
        }
    }

    pub fn trace(&self) -> Unramified {
        self.e[0][0].add(&self.e[1][1])
    }

    pub fn det(&self) -> Unramified {
        self.e[0][0]
            .mul(&self.e[1][1])
            .sub(&self.e[0][1].mul(&self.e[1][0]))
    }

    pub fn inv(&self) -> Result<Mat2, PadicError> {
        let di = self.det().inv()?;
        Ok(Mat2::new(
            self.e[1][1].mul(&di),
            self.e[0][1].neg().mul(&di),
            self.e[1][0].neg().mul(&di),
            self.e[0][0].mul(&di),
        ))
    }

    pub fn frobenius(&self) -> Mat2 {
        Mat2 {
            e: [
                [self.e[0][0].frobenius(), self.e[0][1].frobenius()],
                [self.e[1][0].frobenius(), self.e[1][1].frobenius()],
            ],
        }
    }

    /// trace-zero projection A - Tr(A)/2.
    pub fn trace_zero_part(&self) -> Mat2 {
        let ctx = &self.e[0][0].ctx;
        let half = Unramified::from_rational(ctx, &crate::exactalg::q_ratio(1, 2));
        let t = self.trace().mul(&half);
        self.sub(&Mat2::scalar(&t))
    }

    pub fn is_zero_to(&self, abs: i64) -> bool {
        self.e
            .iter()
            .flatten()
            .all(|v| v.is_zero() && v.val >= abs || !v.is_zero() && v.val >= abs)
    }

    pub fn min_val(&self) -> i64 {
        self.e.iter().flatten().map(|v| v.val).min().unwrap()
    }

    pub fn eq_to(&self, o: &Mat2, abs: i64) -> bool {
        (0..2).all(|i| (0..2).all(|j| self.e[i][j].eq_to(&o.e[i][j], abs)))
    }
}

/// Lie bracket [A, B] = AB - BA.
pub fn bracket(a: &Mat2, b: &Mat2) -> Mat2 {
    a.mul(b).sub(&b.mul(a))
}

/// Trace pairing <A, B> = Tr(AB).
pub fn pairing(a: &Mat2, b: &Mat2) -> Unramified {
    a.mul(b).trace()
}

/// Trilinear determinant det(A, B, C) = <[A, B], C> on trace-zero matrices.
pub fn det3(a: &Mat2, b: &Mat2, c: &Mat2) -> Result<Unramified, GaloisError> {
    let n = a.e[0][0].ctx.n as i64;
    for m in [a, b, c] {
        let t = m.trace();
        if !(t.is_zero() || t.val >= n.min(t.abs_prec())) {
            return Err(GaloisError::NotTraceZero);
        }
    }
    Ok(pairing(&bracket(a, b), c))
}

/// Conjugation action sigma . A = rho(sigma) A rho(sigma)^{-1}; scalar
/// ambiguity in rho cancels, so projective matrices suffice.
pub fn conj_action(rho: &[Mat2], g: usize, a: &Mat2) -> Mat2 {
    rho[g]
        .mul(a)
        .mul(&rho[g].inv().expect("representation matrices are invertible"))
}

/// Representation data for the engines: matrices for every group element.
/// For fields where the full representation factors through G these are the
/// honest rho(g); otherwise they are fixed projective lifts and the honest
/// per-prime matrices come from frobenius packets.
#[derive(Clone)]
pub struct RepModel {
    pub matrices: Vec<Mat2>,
    /// whether `matrices` are the honest rho(g) (true) or projective lifts
    pub honest: bool,
}

impl RepModel {
    /// Dihedral model: rho(z) = diag(psi_g(z), psi_g'(z)) on Z, and
    /// rho(z tau0) = rho(z) * antidiag(zeta0, zeta0) where tau0 is a
    /// distinguished reflection and zeta0^2 = -chi(p).
    pub fn dihedral(
        table: &GroupTable,
        psi_g: &Character,
        tau0: usize,
        zeta0: &Unramified,
    ) -> RepModel {
        let ctx = &zeta0.ctx;
        let mut mats = vec![Mat2::identity(ctx); table.n];
        for &zi in &table.z {
            mats[zi] = Mat2::diag(&psi_g.value(zi), &psi_g.value_inv(zi));
        }
        let w = Mat2::antidiag(zeta0, zeta0);
        for &zi in &table.z {
            let r = table.mul[zi][tau0];
            mats[r] = mats[zi].mul(&w);
        }
        RepModel {
            matrices: mats,
            honest: true,
        }
    }

    /// Projective model from the ratio character psi = psi_g/psi_g': lifts
    /// diag(d, 1/d) with d^2 = psi(z), reflections via antidiag(1,1).
    /// Only valid for conjugation.
    pub fn projective_dihedral(
        table: &GroupTable,
        psi: &Character,
        tau0: usize,
        ctx: &Arc<PadicContext>,
    ) -> Result<RepModel, GaloisError> {
        let d_root = zeta(ctx, 2 * psi.order)?;
        let mut mats = vec![Mat2::identity(ctx); table.n];
        for &zi in &table.z {
            let d = d_root.pow_i64(psi.exponents[zi].rem_euclid(psi.order as i64))?;
            mats[zi] = Mat2::diag(&d, &d.inv()?);
        }
        let one = Unramified::one(ctx);
        let w = Mat2::antidiag(&one, &one);
        for &zi in &table.z {
            let r = table.mul[zi][tau0];
            mats[r] = mats[zi].mul(&w);
        }
        Ok(RepModel {
            matrices: mats,
            honest: false,
        })
    }
}

/// Recover the honest rho(tau) = c * M from a projective matrix M, the
/// determinant target (nebentypus value) and the trace target (coefficient
/// a_ell).  When the trace of M is zero and a_ell = 0 the sign of c is not
/// determined by local data: both candidates are returned.
pub enum ScalarRecovery {
    Unique(Mat2),
    BothCandidates(Mat2, Mat2),
}

pub fn recover_scalar(
    m: &Mat2,
    det_target: &Unramified,
    trace_target: &Unramified,
    zeta_full: &Unramified,
) -> Result<ScalarRecovery, GaloisError> {
    let ctx = &det_target.ctx;
    let n = ctx.n as i64;
    let c2 = det_target.div(&m.det()).map_err(GaloisError::Padic)?;
    // c is a root of unity: search powers of zeta_full
    let q = ctx.residue_order();
    let full_order: u64 = {
        // order of zeta_full
        let mut o = 1u64;
        let one = Unramified::one(ctx);
        let mut cur = zeta_full.clone();
        while !cur.eq_to(&one, n) && o <= q {
            cur = cur.mul(zeta_full);
            o += 1;
        }
        o
    };
    let mut c = None;
    for k in 0..full_order {
        let cand = zeta_full.pow_i64(k as i64)?;
        if cand.mul(&cand).eq_to(&c2, n - 1) {
            c = Some(cand);
            break;
        }
    }
    let c = c.ok_or(GaloisError::NoScalar)?;
    let r1 = m.scale(&c);
    let r2 = m.scale(&c.neg());
    let t1 = r1.trace();
    let t2 = r2.trace();
    let tz = trace_target.is_zero() || trace_target.val >= n - 1;
    if tz && (t1.is_zero() || t1.val >= n - 1) {
        return Ok(ScalarRecovery::BothCandidates(r1, r2));
    }
    if t1.eq_to(trace_target, n - 1) {
        Ok(ScalarRecovery::Unique(r1))
    } else if t2.eq_to(trace_target, n - 1) {
        Ok(ScalarRecovery::Unique(r2))
    } else {
        Err(GaloisError::NoScalar)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::{One, Zero};

    fn ctx25() -> Arc<PadicContext> {
        PadicContext::new(5, 2, 30, vec![BigInt::from(-2), BigInt::zero(), BigInt::one()])
    }

    fn std_basis(ctx: &Arc<PadicContext>) -> (Mat2, Mat2, Mat2) {
        let one = Unramified::one(ctx);
        let z = Unramified::zero(ctx);
        let e1 = Mat2::new(one.clone(), z.clone(), z.clone(), one.neg());
        let e2 = Mat2::new(z.clone(), one.clone(), z.clone(), z.clone());
        let e3 = Mat2::new(z.clone(), z.clone(), one.clone(), z.clone());
        (e1, e2, e3)
    }

    #[test]
    fn det3_on_standard_basis() {
        let ctx = ctx25();
        let (e1, e2, e3) = std_basis(&ctx);
        let v = det3(&e1, &e2, &e3).unwrap();
        assert!(v.eq_to(&Unramified::from_i64(&ctx, 2), 30));
        // alternating
        let w = det3(&e1, &e1, &e2).unwrap();
        assert!(w.is_zero() || w.val >= 29);
    }

    #[test]
    fn det3_rejects_nonzero_trace() {
        let ctx = ctx25();
        let (e1, e2, _) = std_basis(&ctx);
        let idm = Mat2::identity(&ctx);
        assert!(det3(&idm, &e1, &e2).is_err());
    }

    #[test]
    fn bracket_antisymmetry_and_jacobi() {
        let ctx = ctx25();
        let (e1, e2, e3) = std_basis(&ctx);
        let ab = bracket(&e1, &e2);
        let ba = bracket(&e2, &e1);
        assert!(ab.add(&ba).is_zero_to(29));
        let j = bracket(&e1, &bracket(&e2, &e3))
            .add(&bracket(&e2, &bracket(&e3, &e1)))
            .add(&bracket(&e3, &bracket(&e1, &e2)));
        assert!(j.is_zero_to(29));
    }

    #[test]
    fn pairing_nondegenerate_on_basis() {
        let ctx = ctx25();
        let (e1, e2, e3) = std_basis(&ctx);
        let idm = Mat2::identity(&ctx);
        let basis = [idm, e1, e2, e3];
        // Gram matrix must have unit determinant structure: compute and check
        // it is invertible by checking pairing values
        let g01 = pairing(&basis[0], &basis[1]);
        assert!(g01.is_zero() || g01.val >= 29);
        let g23 = pairing(&basis[2], &basis[3]);
        assert!(g23.eq_to(&Unramified::one(&ctx), 29));
        let g11 = pairing(&basis[1], &basis[1]);
        assert!(g11.eq_to(&Unramified::from_i64(&ctx, 2), 29));
    }

    #[test]
    fn zeta_has_exact_order() {
        let ctx = ctx25();
        let z3 = zeta(&ctx, 3).unwrap();
        assert!(check_exact_order(&z3, 3).is_ok());
        let z24 = zeta(&ctx, 24).unwrap();
        assert!(check_exact_order(&z24, 24).is_ok());
        assert!(zeta(&ctx, 7).is_err());
    }

    #[test]
    fn scalar_recovery_unique_and_ambiguous() {
        let ctx = ctx25();
        let one = Unramified::one(&ctx);
        let m = Mat2::diag(&one, &one.neg()); // trace 0, det -1
        let zf = zeta(&ctx, 24).unwrap();
        // det target -1, trace target 0: ambiguous
        match recover_scalar(&m, &one.neg(), &Unramified::zero(&ctx), &zf).unwrap() {
            ScalarRecovery::BothCandidates(_, _) => {}
            _ => panic!("expected ambiguity"),
        }
        // diag(2,1)-like with nonzero trace: unique
        let m2 = Mat2::diag(&one, &one);
        let tgt = Unramified::from_i64(&ctx, -2);
        match recover_scalar(&m2, &one, &tgt, &zf).unwrap() {
            ScalarRecovery::Unique(r) => assert!(r.trace().eq_to(&tgt, 29)),
            _ => panic!("expected unique"),
        }
    }
}
