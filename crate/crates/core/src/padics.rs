//! Capped-precision arithmetic in unramified extensions Q_{p^f}, with
//! Teichmüller lifts, the p-adic logarithm, Frobenius, root lifting and
//! p-adic embeddings of number fields.
//!
//! Elements carry an explicit valuation and relative precision; every
//! division surfaces its precision cost instead of hiding it.

use crate::exactalg::{NFElement, NumberField, QPoly, Q};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PadicError {
    #[error("not a unit (valuation {0})")]
    NotAUnit(i64),
    #[error("the prime 2 is not supported by the logarithm")]
    EvenPrimeUnsupported,
    #[error("division by zero to working precision")]
    DivisionByZero,
    #[error("polynomial has repeated roots modulo p beyond lifting range")]
    RamifiedOrInseparable,
    #[error("fewer roots than the degree over this residue field")]
    IncompleteSplitting,
    #[error("prime divides the discriminant data; no unramified context")]
    RamifiedPrime,
    #[error("no automorphism matches the frobenius action")]
    NoMatch,
    #[error("context mismatch")]
    ContextMismatch,
}

/// Working context: Z_{p^f} truncated at absolute precision p^n, with
/// internal headroom for series evaluation.
#[derive(Debug)]
pub struct PadicContext {
    pub p: u64,
    pub f: usize,
    pub n: u32,
    /// monic integer polynomial of degree f, irreducible mod p
    pub modulus: Vec<BigInt>,
    work: u32,
    pow_cache: Vec<BigUint>,
    frob_image: Vec<BigUint>, // image of the generator under Frobenius, at work precision
}

pub const HEADROOM: u32 = 24;

impl PadicContext {
    pub fn new(p: u64, f: usize, n: u32, modulus: Vec<BigInt>) -> Arc<Self> {
        assert!(p >= 2);
        assert!(f >= 1);
        assert_eq!(modulus.len(), f + 1);
        assert!(modulus[f].is_one(), "modulus must be monic");
        let work = n + HEADROOM;
        let mut pow_cache = Vec::with_capacity(work as usize + 1);
        let mut cur = BigUint::one();
        let pb = BigUint::from(p);
        for _ in 0..=work {
            pow_cache.push(cur.clone());
            cur *= &pb;
        }
        let mut ctx = PadicContext {
            p,
            f,
            n,
            modulus,
            work,
            pow_cache,
            frob_image: Vec::new(),
        };
        ctx.frob_image = ctx.compute_frob_image();
        Arc::new(ctx)
    }

    /// Q_p itself.
    pub fn base(p: u64, n: u32) -> Arc<Self> {
        PadicContext::new(p, 1, n, vec![BigInt::zero(), BigInt::one()])
    }

    pub fn pk(&self, k: u32) -> &BigUint {
        &self.pow_cache[k.min(self.work) as usize]
    }

    pub fn residue_order(&self) -> u64 {
        // p^f - 1 can overflow u64 only for sizes far beyond this crate's use
        self.p.pow(self.f as u32) - 1
    }

    fn raw_mod(&self, v: &BigInt, k: u32) -> BigUint {
        let m = BigInt::from(self.pk(k).clone());
        let r = v.mod_floor(&m);
        r.to_biguint().unwrap()
    }

    /// Multiply coordinate vectors mod (modulus, p^k).
    fn raw_mul(&self, a: &[BigUint], b: &[BigUint], k: u32) -> Vec<BigUint> {
        let f = self.f;
        let pk = self.pk(k);
        if f == 1 {
            return vec![(&a[0] * &b[0]) % pk];
        }
        let mut wide = vec![BigInt::zero(); 2 * f - 1];
        for i in 0..f {
            if a[i].is_zero() {
                continue;
            }
            let ai = BigInt::from(a[i].clone());
            for j in 0..f {
                if b[j].is_zero() {
                    continue;
                }
                wide[i + j] += &ai * BigInt::from(b[j].clone());
            }
        }
        for d in (f..wide.len()).rev() {
            if wide[d].is_zero() {
                continue;
            }
            let c = std::mem::replace(&mut wide[d], BigInt::zero());
            for j in 0..f {
                wide[d - f + j] -= &c * &self.modulus[j];
            }
        }
        wide.truncate(f);
        wide.iter().map(|v| self.raw_mod(v, k)).collect()
    }

    fn raw_add(&self, a: &[BigUint], b: &[BigUint], k: u32) -> Vec<BigUint> {
        let pk = self.pk(k);
        a.iter().zip(b).map(|(x, y)| (x + y) % pk).collect()
    }

    fn raw_sub(&self, a: &[BigUint], b: &[BigUint], k: u32) -> Vec<BigUint> {
        let pk = self.pk(k);
        a.iter()
            .zip(b)
            .map(|(x, y)| (x + pk - (y % pk)) % pk)
            .collect()
    }

    fn raw_val(&self, a: &[BigUint], cap: u32) -> u32 {
        let mut v = cap;
        let pb = BigUint::from(self.p);
        for c in a {
            if c.is_zero() {
                continue;
            }
            let mut w = 0u32;
            let mut x = c.clone();
            while w < v && (&x % &pb).is_zero() {
                x /= &pb;
                w += 1;
            }
            v = v.min(w);
            if v == 0 {
                return 0;
            }
        }
        v
    }

    /// Inverse of a unit vector mod (modulus, p^k) by lifting the residue
    /// inverse with Newton iteration x -> x(2 - ax).
    fn raw_inv(&self, a: &[BigUint], k: u32) -> Vec<BigUint> {
        let f = self.f;
        // residue inverse via linear algebra over F_p
        let amod: Vec<u64> = a
            .iter()
            .map(|c| (c % BigUint::from(self.p)).to_u64().unwrap())
            .collect();
        let inv0 = self.residue_inv(&amod);
        let mut x: Vec<BigUint> = inv0.iter().map(|&c| BigUint::from(c)).collect();
        let mut prec = 1u32;
        while prec < k {
            prec = (2 * prec).min(k);
            let ax = self.raw_mul(a, &x, prec);
            let mut two_minus = vec![BigUint::zero(); f];
            let pk = self.pk(prec);
            two_minus[0] = (BigUint::from(2u32) + pk - (&ax[0] % pk)) % pk;
            for j in 1..f {
                two_minus[j] = (pk - (&ax[j] % pk)) % pk;
            }
            x = self.raw_mul(&x, &two_minus, prec);
        }
        x
    }

    fn residue_inv(&self, a: &[u64]) -> Vec<u64> {
        let f = self.f;
        let p = self.p;
        // columns: a * t^j reduced
        let modp: Vec<u64> = self
            .modulus
            .iter()
            .map(|c| c.mod_floor(&BigInt::from(p)).to_u64().unwrap())
            .collect();
        let mulr = |x: &[u64], y: &[u64]| -> Vec<u64> {
            let mut wide = vec![0u128; 2 * f - 1];
            for i in 0..f {
                for j in 0..f {
                    wide[i + j] += x[i] as u128 * y[j] as u128;
                }
            }
            for d in (f..wide.len()).rev() {
                let c = (wide[d] % p as u128) as u64;
                wide[d] = 0;
                for j in 0..f {
                    // subtract c * modp[j]: add (p - modp[j]) * c
                    wide[d - f + j] += c as u128 * (p - modp[j] % p) as u128;
                }
            }
            (0..f).map(|i| (wide[i] % p as u128) as u64).collect()
        };
        let mut cols = Vec::with_capacity(f);
        let mut t = vec![0u64; f];
        if f == 1 {
            t[0] = 1;
        } else {
            t[1] = 1;
        }
        let mut cur = a.to_vec();
        cols.push(cur.clone());
        for _ in 1..f {
            cur = mulr(&cur, &t);
            cols.push(cur.clone());
        }
        // solve M x = e0 over F_p
        let mut m: Vec<Vec<u64>> = (0..f)
            .map(|i| {
                let mut row: Vec<u64> = (0..f).map(|j| cols[j][i]).collect();
                row.push(if i == 0 { 1 } else { 0 });
                row
            })
            .collect();
        for c in 0..f {
            let piv = (c..f).find(|&r| m[r][c] % p != 0).expect("unit expected");
            m.swap(c, piv);
            let inv = mod_inv_u64(m[c][c] % p, p);
            for v in m[c].iter_mut() {
                *v = ((*v as u128 * inv as u128) % p as u128) as u64;
            }
            for r in 0..f {
                if r != c && m[r][c] % p != 0 {
                    let fac = m[r][c] % p;
                    for j in 0..=f {
                        let sub = (fac as u128 * m[c][j] as u128) % p as u128;
                        m[r][j] = ((m[r][j] as u128 + p as u128 * p as u128 - sub)
                            % p as u128) as u64;
                    }
                }
            }
        }
        (0..f).map(|i| m[i][f] % p).collect()
    }

    fn compute_frob_image(&self) -> Vec<BigUint> {
        let f = self.f;
        let k = self.work;
        if f == 1 {
            return vec![BigUint::one()];
        }
        // start from t^p, Newton-correct to the root of the modulus congruent
        // to it mod p
        let mut t = vec![BigUint::zero(); f];
        t[1] = BigUint::one();
        let mut x = self.raw_pow(&t, self.p, k);
        let der: Vec<BigInt> = self
            .modulus
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect();
        for _ in 0..(k.ilog2() + 3) {
            let fx = self.raw_poly_eval_int(&self.modulus, &x, k);
            let dfx = self.raw_poly_eval_int(&der, &x, k);
            let dinv = self.raw_inv(&dfx, k);
            let q = self.raw_mul(&fx, &dinv, k);
            x = self.raw_sub(&x, &q, k);
        }
        x
    }

    fn raw_pow(&self, a: &[BigUint], e: u64, k: u32) -> Vec<BigUint> {
        let mut acc = vec![BigUint::zero(); self.f];
        acc[0] = BigUint::one();
        let mut base = a.to_vec();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.raw_mul(&acc, &base, k);
            }
            base = self.raw_mul(&base, &base, k);
            e >>= 1;
        }
        acc
    }

    fn raw_poly_eval_int(&self, cs: &[BigInt], x: &[BigUint], k: u32) -> Vec<BigUint> {
        let f = self.f;
        let mut acc = vec![BigUint::zero(); f];
        for c in cs.iter().rev() {
            acc = self.raw_mul(&acc, x, k);
            acc[0] = self.raw_mod(&(BigInt::from(acc[0].clone()) + c), k);
        }
        acc
    }

    fn raw_frob(&self, a: &[BigUint], k: u32) -> Vec<BigUint> {
        if self.f == 1 {
            return a.to_vec();
        }
        let mut acc = vec![BigUint::zero(); self.f];
        let mut pw = vec![BigUint::zero(); self.f];
        pw[0] = BigUint::one();
        for (i, c) in a.iter().enumerate() {
            if !c.is_zero() {
                let term: Vec<BigUint> = pw.iter().map(|w| (w * c) % self.pk(k)).collect();
                acc = self.raw_add(&acc, &term, k);
            }
            if i + 1 < self.f {
                pw = self.raw_mul(&pw, &self.frob_image, k);
            }
        }
        acc
    }
}

fn mod_inv_u64(a: u64, p: u64) -> u64 {
    // extended euclid
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        t -= q * new_t;
        std::mem::swap(&mut t, &mut new_t);
        r -= q * new_r;
        std::mem::swap(&mut r, &mut new_r);
    }
    ((t % p as i128 + p as i128) % p as i128) as u64
}

/// Element of Q_{p^f}: p^val * unit, with the unit part known to `prec`
/// p-adic digits.  `prec == 0` encodes "zero modulo p^val".
#[derive(Clone)]
pub struct Unramified {
    pub ctx: Arc<PadicContext>,
    pub val: i64,
    pub prec: u32,
    coords: Vec<BigUint>,
}

impl std::fmt::Debug for Unramified {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            write!(f, "O(p^{})", self.val)
        } else {
            write!(
                f,
                "p^{}*{:?} + O(p^{})",
                self.val,
                self.coords,
                self.abs_prec()
            )
        }
    }
}

impl Unramified {
    pub fn zero_to(ctx: &Arc<PadicContext>, abs: i64) -> Self {
        Unramified {
            ctx: Arc::clone(ctx),
            val: abs,
            prec: 0,
            coords: vec![BigUint::zero(); ctx.f],
        }
    }

    pub fn zero(ctx: &Arc<PadicContext>) -> Self {
        Self::zero_to(ctx, ctx.n as i64)
    }

    pub fn one(ctx: &Arc<PadicContext>) -> Self {
        Self::from_i64(ctx, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.prec == 0
    }

    /// Absolute precision: the element is known modulo p^(this).
    pub fn abs_prec(&self) -> i64 {
        self.val + self.prec as i64
    }

    pub fn unit_coords(&self) -> &[BigUint] {
        &self.coords
    }

    /// Build from unit coordinates (not all divisible by p) at given val/prec.
    fn from_unit(ctx: &Arc<PadicContext>, val: i64, prec: u32, coords: Vec<BigUint>) -> Self {
        debug_assert!(prec > 0);
        Unramified {
            ctx: Arc::clone(ctx),
            val,
            prec,
            coords,
        }
    }

    /// Normalise raw coordinates known modulo p^k at base valuation `base`.
    fn normalize(ctx: &Arc<PadicContext>, base: i64, coords: Vec<BigUint>, k: u32) -> Self {
        let w = ctx.raw_val(&coords, k);
        if w >= k {
            return Self::zero_to(ctx, base + k as i64);
        }
        let pw = ctx.pk(w);
        let unit: Vec<BigUint> = coords.iter().map(|c| c / pw).collect();
        let prec = k - w;
        let pk = ctx.pk(prec);
        Unramified {
            ctx: Arc::clone(ctx),
            val: base + w as i64,
            prec,
            coords: unit.iter().map(|c| c % pk).collect(),
        }
    }

    pub fn from_i64(ctx: &Arc<PadicContext>, v: i64) -> Self {
        Self::from_rational(ctx, &Q::from_integer(BigInt::from(v)))
    }

    pub fn from_rational(ctx: &Arc<PadicContext>, r: &Q) -> Self {
        if r.is_zero() {
            return Self::zero(ctx);
        }
        let p = BigInt::from(ctx.p);
        let mut num = r.numer().clone();
        let mut den = r.denom().clone();
        let mut val = 0i64;
        while (&num % &p).is_zero() {
            num /= &p;
            val += 1;
        }
        while (&den % &p).is_zero() {
            den /= &p;
            val -= 1;
        }
        let k = ctx.n;
        let m = BigInt::from(ctx.pk(k).clone());
        let deninv = modpow_inv(&den.mod_floor(&m), &m);
        let u = (num.mod_floor(&m) * deninv).mod_floor(&m);
        let mut coords = vec![BigUint::zero(); ctx.f];
        coords[0] = u.to_biguint().unwrap();
        Unramified {
            ctx: Arc::clone(ctx),
            val,
            prec: k,
            coords,
        }
    }

    /// Construct from residue-field coordinates (used by root lifting).
    fn from_raw(ctx: &Arc<PadicContext>, coords: Vec<BigUint>, k: u32) -> Self {
        Self::normalize(ctx, 0, coords, k)
    }

    /// Raw coordinate vector of the full element mod p^k (shifting the unit
    /// part by p^val); requires val >= 0.
    fn raw_at(&self, k: u32) -> Vec<BigUint> {
        assert!(self.val >= 0, "raw_at needs a p-integral element");
        let pk = self.ctx.pk(k);
        if self.is_zero() {
            return vec![BigUint::zero(); self.ctx.f];
        }
        let shift = self.ctx.pk((self.val as u32).min(self.ctx.work));
        self.coords.iter().map(|c| (c * shift) % pk).collect()
    }

    pub fn add(&self, other: &Unramified) -> Unramified {
        let ctx = &self.ctx;
        let abs = self.abs_prec().min(other.abs_prec());
        if self.is_zero() && other.is_zero() {
            return Self::zero_to(ctx, abs);
        }
        if self.is_zero() {
            return other.truncate_abs(abs);
        }
        if other.is_zero() {
            return self.truncate_abs(abs);
        }
        let base = self.val.min(other.val);
        let k = (abs - base) as u32;
        let sa = ctx.pk((self.val - base) as u32);
        let sb = ctx.pk((other.val - base) as u32);
        let pk = ctx.pk(k);
        let coords: Vec<BigUint> = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a * sa + b * sb) % pk)
            .collect();
        Self::normalize(ctx, base, coords, k)
    }

    pub fn neg(&self) -> Unramified {
        if self.is_zero() {
            return self.clone();
        }
        let pk = self.ctx.pk(self.prec);
        Unramified {
            ctx: Arc::clone(&self.ctx),
            val: self.val,
            prec: self.prec,
            coords: self
                .coords
                .iter()
                .map(|c| (pk - (c % pk)) % pk)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Unramified) -> Unramified {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Unramified) -> Unramified {
        let ctx = &self.ctx;
        if self.is_zero() || other.is_zero() {
            // p^k-zero times p^v-unit is zero mod p^(k+v)
            let abs = if self.is_zero() && other.is_zero() {
                self.val + other.val
            } else if self.is_zero() {
                self.val + other.val
            } else {
                other.val + self.val
            };
            return Self::zero_to(ctx, abs.min(ctx.n as i64 + HEADROOM as i64));
        }
        let prec = self.prec.min(other.prec);
        let coords = ctx.raw_mul(&self.coords, &other.coords, prec);
        Self::from_unit(ctx, self.val + other.val, prec, trim(&coords, ctx, prec))
    }

    pub fn inv(&self) -> Result<Unramified, PadicError> {
        if self.is_zero() {
            return Err(PadicError::DivisionByZero);
        }
        let inv = self.ctx.raw_inv(&self.coords, self.prec);
        Ok(Self::from_unit(
            &self.ctx,
            -self.val,
            self.prec,
            trim(&inv, &self.ctx, self.prec),
        ))
    }

    pub fn div(&self, other: &Unramified) -> Result<Unramified, PadicError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow_i64(&self, e: i64) -> Result<Unramified, PadicError> {
        if e < 0 {
            return Ok(self.inv()?.pow_i64(-e)?);
        }
        let mut acc = Unramified::one(&self.ctx).truncate_rel(self.prec.max(1));
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        Ok(acc)
    }

    fn truncate_abs(&self, abs: i64) -> Unramified {
        if self.is_zero() {
            return Self::zero_to(&self.ctx, self.val.min(abs));
        }
        if abs <= self.val {
            return Self::zero_to(&self.ctx, abs);
        }
        let prec = ((abs - self.val) as u32).min(self.prec);
        let pk = self.ctx.pk(prec);
        Unramified {
            ctx: Arc::clone(&self.ctx),
            val: self.val,
            prec,
            coords: self.coords.iter().map(|c| c % pk).collect(),
        }
    }

    pub fn truncate_rel(&self, prec: u32) -> Unramified {
        if self.is_zero() {
            return self.clone();
        }
        let prec = prec.min(self.prec);
        let pk = self.ctx.pk(prec);
        Unramified {
            ctx: Arc::clone(&self.ctx),
            val: self.val,
            prec,
            coords: self.coords.iter().map(|c| c % pk).collect(),
        }
    }

    /// Valuation of the difference, bounded by the common absolute precision.
    pub fn diff_val(&self, other: &Unramified) -> i64 {
        let d = self.sub(other);
        d.val
    }

    /// Equal at the stated absolute precision (or their common precision if
    /// smaller).
    pub fn eq_to(&self, other: &Unramified, abs: i64) -> bool {
        let bound = abs.min(self.abs_prec()).min(other.abs_prec());
        self.diff_val(other) >= bound
    }

    /// Frobenius: the lift of x -> x^p acting on the generator basis.
    pub fn frobenius(&self) -> Unramified {
        if self.is_zero() || self.ctx.f == 1 {
            return self.clone();
        }
        let coords = self.ctx.raw_frob(&self.coords, self.prec);
        Self::normalize(&self.ctx, self.val, coords, self.prec)
    }

    /// Teichmüller lift: the unique (p^f - 1)-th root of unity congruent to
    /// this unit mod p.
    pub fn teichmuller(&self) -> Result<Unramified, PadicError> {
        if self.is_zero() || self.val != 0 {
            return Err(PadicError::NotAUnit(if self.is_zero() {
                i64::MAX
            } else {
                self.val
            }));
        }
        let k = self.prec;
        let q = self.ctx.p.pow(self.ctx.f as u32);
        let mut x = self.coords.clone();
        // x -> x^{p^f} gains f digits of agreement with the limit per step
        let iters = k / self.ctx.f as u32 + 2;
        for _ in 0..iters {
            x = self.ctx.raw_pow(&x, q, k);
        }
        Ok(Self::from_unit(&self.ctx, 0, k, x))
    }

    /// p-adic logarithm of a unit: kills the Teichmüller part, then applies
    /// the log series to the remaining 1-unit.  Requires p odd.
    pub fn log(&self) -> Result<Unramified, PadicError> {
        if self.ctx.p == 2 {
            return Err(PadicError::EvenPrimeUnsupported);
        }
        if self.is_zero() || self.val != 0 {
            return Err(PadicError::NotAUnit(if self.is_zero() {
                i64::MAX
            } else {
                self.val
            }));
        }
        let ctx = &self.ctx;
        let out_prec = self.prec; // log is an isometry on 1-units for p odd
        let k = (self.prec + HEADROOM).min(ctx.work);
        let w = self.teichmuller()?;
        // lift both to precision k (any lift works: result is taken mod p^out)
        let u = self.coords.clone();
        let winv = ctx.raw_inv(&pad(&w.coords, ctx, k), k);
        let one_unit = ctx.raw_mul(&pad(&u, ctx, k), &winv, k);
        let mut z = one_unit;
        z[0] = (&z[0] + ctx.pk(k) - BigUint::one()) % ctx.pk(k);
        // series sum (-1)^(m+1) z^m / m
        let mut acc_num = vec![BigInt::zero(); ctx.f];
        let mut term = vec![BigUint::zero(); ctx.f];
        term[0] = BigUint::one();
        let kmax = series_terms(ctx.p, k);
        for m in 1..=kmax {
            term = ctx.raw_mul(&term, &z, k);
            let mut mm = m as u64;
            let mut v5 = 0u32;
            while mm % ctx.p == 0 {
                mm /= ctx.p;
                v5 += 1;
            }
            let minv = BigInt::from(modpow_inv(
                &BigInt::from(mm).mod_floor(&BigInt::from(ctx.pk(k).clone())),
                &BigInt::from(ctx.pk(k).clone()),
            ));
            let sign = if m % 2 == 1 { 1 } else { -1 };
            for j in 0..ctx.f {
                let mut t = BigInt::from(term[j].clone()) * &minv * BigInt::from(sign);
                if v5 > 0 {
                    // term z^m/m: v(z^m) >= m > v_p(m), division is exact
                    let pv = BigInt::from(ctx.pk(v5).clone());
                    let tm = t.mod_floor(&BigInt::from(ctx.pk(k).clone()));
                    debug_assert!((&tm % &pv).is_zero());
                    t = tm / pv;
                }
                acc_num[j] += t;
            }
        }
        let coords: Vec<BigUint> = acc_num.iter().map(|v| ctx.raw_mod(v, k)).collect();
        let out = Self::normalize(ctx, 0, coords, k);
        Ok(out.truncate_abs(out_prec as i64))
    }
}

fn trim(coords: &[BigUint], ctx: &PadicContext, prec: u32) -> Vec<BigUint> {
    let pk = ctx.pk(prec);
    coords.iter().map(|c| c % pk).collect()
}

fn pad(coords: &[BigUint], _ctx: &PadicContext, _k: u32) -> Vec<BigUint> {
    coords.to_vec()
}

fn series_terms(p: u64, k: u32) -> u32 {
    // smallest M with m - log_p(m) > k for all m > M
    let mut m = k + 1;
    loop {
        let lg = (m as f64).ln() / (p as f64).ln();
        if m as f64 - lg > k as f64 {
            return m;
        }
        m += 1;
    }
}

fn modpow_inv(a: &BigInt, m: &BigInt) -> BigInt {
    // extended euclid over BigInt
    let (mut t, mut new_t) = (BigInt::zero(), BigInt::one());
    let (mut r, mut new_r) = (m.clone(), a.mod_floor(m));
    while !new_r.is_zero() {
        let q = &r / &new_r;
        let tmp_t = &t - &q * &new_t;
        t = std::mem::replace(&mut new_t, tmp_t);
        let tmp_r = &r - &q * &new_r;
        r = std::mem::replace(&mut new_r, tmp_r);
    }
    t.mod_floor(m)
}

// ---------------------------------------------------------------------------
// residue-field root finding and lifting
// ---------------------------------------------------------------------------

/// Polynomial arithmetic over F_{p^f} with elements as Vec<u64> coordinate
/// vectors (used only for root finding; sizes are tiny).
struct ResidueField {
    p: u64,
    f: usize,
    modp: Vec<u64>,
}

type FqElem = Vec<u64>;

impl ResidueField {
    fn of(ctx: &PadicContext) -> Self {
        ResidueField {
            p: ctx.p,
            f: ctx.f,
            modp: ctx
                .modulus
                .iter()
                .map(|c| c.mod_floor(&BigInt::from(ctx.p)).to_u64().unwrap())
                .collect(),
        }
    }

    fn zero(&self) -> FqElem {
        vec![0; self.f]
    }
    fn one(&self) -> FqElem {
        let mut v = vec![0; self.f];
        v[0] = 1;
        v
    }
    fn is_zero(&self, a: &FqElem) -> bool {
        a.iter().all(|&c| c == 0)
    }

    fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }
    fn sub(&self, a: &FqElem, b: &FqElem) -> FqElem {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x + self.p - y % self.p) % self.p)
            .collect()
    }

    fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let f = self.f;
        let p = self.p as u128;
        let mut wide = vec![0u128; 2 * f - 1];
        for i in 0..f {
            if a[i] == 0 {
                continue;
            }
            for j in 0..f {
                wide[i + j] = (wide[i + j] + a[i] as u128 * b[j] as u128) % p;
            }
        }
        for d in (f..wide.len()).rev() {
            let c = wide[d];
            wide[d] = 0;
            if c != 0 {
                for j in 0..f {
                    wide[d - f + j] =
                        (wide[d - f + j] + c * ((self.p - self.modp[j] % self.p) as u128)) % p;
                }
            }
        }
        (0..f).map(|i| wide[i] as u64).collect()
    }

    fn pow(&self, a: &FqElem, mut e: u128) -> FqElem {
        let mut acc = self.one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    fn inv(&self, a: &FqElem) -> FqElem {
        let q = (self.p as u128).pow(self.f as u32);
        self.pow(a, q - 2)
    }

    // ---- polynomial layer over Fq: Vec<FqElem>, lowest first ----

    fn ptrim(&self, mut v: Vec<FqElem>) -> Vec<FqElem> {
        while v.len() > 1 && self.is_zero(v.last().unwrap()) {
            v.pop();
        }
        if v.is_empty() {
            v.push(self.zero());
        }
        v
    }

    fn pdeg(&self, v: &[FqElem]) -> usize {
        v.len() - 1
    }

    fn peval(&self, v: &[FqElem], x: &FqElem) -> FqElem {
        let mut acc = self.zero();
        for c in v.iter().rev() {
            acc = self.add(&self.mul(&acc, x), c);
        }
        acc
    }

    fn pmonic(&self, v: &[FqElem]) -> Vec<FqElem> {
        let lead = self.inv(v.last().unwrap());
        v.iter().map(|c| self.mul(c, &lead)).collect()
    }

    fn prem(&self, a: &[FqElem], bm: &[FqElem]) -> Vec<FqElem> {
        // bm monic
        let db = self.pdeg(bm);
        let mut r: Vec<FqElem> = a.to_vec();
        while r.len() > db {
            let lead = r.pop().unwrap();
            if self.is_zero(&lead) {
                continue;
            }
            let k = r.len() - db;
            for j in 0..db {
                let t = self.mul(&lead, &bm[j]);
                r[k + j] = self.sub(&r[k + j], &t);
            }
        }
        self.ptrim(r)
    }

    fn pgcd(&self, a: &[FqElem], b: &[FqElem]) -> Vec<FqElem> {
        let mut x = self.ptrim(a.to_vec());
        let mut y = self.ptrim(b.to_vec());
        while !(y.len() == 1 && self.is_zero(&y[0])) {
            let ym = self.pmonic(&y);
            let r = self.prem(&x, &ym);
            x = ym;
            y = r;
        }
        if x.len() == 1 && self.is_zero(&x[0]) {
            return x;
        }
        self.pmonic(&x)
    }

    fn pmulmod(&self, a: &[FqElem], b: &[FqElem], m: &[FqElem]) -> Vec<FqElem> {
        let mut wide = vec![self.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if self.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                let t = self.mul(x, y);
                wide[i + j] = self.add(&wide[i + j], &t);
            }
        }
        self.prem(&wide, m)
    }

    fn ppowmod(&self, a: &[FqElem], mut e: u128, m: &[FqElem]) -> Vec<FqElem> {
        let mut acc = vec![self.one()];
        let mut b = self.prem(a, m);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.pmulmod(&acc, &b, m);
            }
            b = self.pmulmod(&b, &b, m);
            e >>= 1;
        }
        acc
    }

    /// All distinct roots in F_{p^f} of an arbitrary polynomial: recursive
    /// radical computation sound in characteristic p (vanishing derivatives,
    /// multiplicities divisible by p).
    fn residue_roots(&self, poly: &[FqElem], rng_state: &mut u64) -> Vec<FqElem> {
        let poly = self.ptrim(poly.to_vec());
        if self.pdeg(&poly) == 0 {
            return vec![];
        }
        let q = (self.p as u128).pow(self.f as u32);
        let der: Vec<FqElem> = poly
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| {
                c.iter()
                    .map(|&x| ((x as u128 * (i as u128 % self.p as u128)) % self.p as u128) as u64)
                    .collect()
            })
            .collect();
        let der = self.ptrim(der);
        if der.len() == 1 && self.is_zero(&der[0]) {
            // poly = h(x^p): roots are p-th roots (inverse Frobenius powers)
            let h: Vec<FqElem> = poly.iter().step_by(self.p as usize).cloned().collect();
            let inner = self.residue_roots(&h, rng_state);
            return inner
                .into_iter()
                .map(|r| self.pow(&r, q / self.p as u128))
                .collect();
        }
        let g = self.pgcd(&poly, &der);
        let mut out = if self.pdeg(&g) == 0 {
            self.roots_squarefree(&poly, rng_state)
        } else {
            let sqf = self.pquot(&self.pmonic(&poly), &g);
            let mut a = self.roots_squarefree(&sqf, rng_state);
            let mut b = self.residue_roots(&g, rng_state);
            a.append(&mut b);
            a
        };
        out.sort();
        out.dedup();
        out
    }

    /// All roots in F_{p^f} of the squarefree polynomial h (monic).
    fn roots_squarefree(&self, h: &[FqElem], rng_state: &mut u64) -> Vec<FqElem> {
        let h = self.ptrim(h.to_vec());
        if self.pdeg(&h) == 0 {
            return vec![];
        }
        let q = (self.p as u128).pow(self.f as u32);
        // keep only the part splitting into linear factors: gcd(h, x^q - x)
        let xq = {
            let x = vec![self.zero(), self.one()];
            let t = self.ppowmod(&x, q, &h);
            // x^q - x mod h
            let mut t = t;
            while t.len() < 2 {
                t.push(self.zero());
            }
            t[1] = self.sub(&t[1], &self.one());
            self.ptrim(t)
        };
        let lin = self.pgcd(&h, &xq);
        self.split_linear(&lin, q, rng_state)
    }

    fn split_linear(&self, h: &[FqElem], q: u128, rng_state: &mut u64) -> Vec<FqElem> {
        let h = self.ptrim(h.to_vec());
        let d = self.pdeg(&h);
        if d == 0 {
            return vec![];
        }
        if d == 1 {
            // root of x + c (monic): -c
            let c = &h[0];
            return vec![self.sub(&self.zero(), c)];
        }
        // equal-degree splitting for linear factors, p odd; for p = 2 fall
        // back to exhaustive search over small fields
        if self.p == 2 {
            let mut out = Vec::new();
            let total = (self.p as u128).pow(self.f as u32);
            assert!(total <= 1 << 22, "2-adic residue search too large");
            let mut idx = 0u128;
            while idx < total {
                let mut x = vec![0u64; self.f];
                let mut t = idx;
                for v in x.iter_mut() {
                    *v = (t % self.p as u128) as u64;
                    t /= self.p as u128;
                }
                if self.is_zero(&self.peval(&h, &x)) {
                    out.push(x);
                }
                idx += 1;
            }
            return out;
        }
        loop {
            // random a: gcd((x+a)^((q-1)/2) - 1, h) is a proper factor with
            // probability about 1/2
            *rng_state = rng_state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let mut a = vec![0u64; self.f];
            let mut s = *rng_state;
            for v in a.iter_mut() {
                *v = (s % self.p) as u64;
                s = s.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
            }
            let shift = vec![a, self.one()];
            let t = self.ppowmod(&shift, (q - 1) / 2, &h);
            let mut t = t;
            if t.is_empty() {
                t.push(self.zero());
            }
            t[0] = self.sub(&t[0], &self.one());
            let g = self.pgcd(&self.ptrim(t), &h);
            let dg = self.pdeg(&g);
            if dg > 0 && dg < d {
                let mut left = self.split_linear(&g, q, rng_state);
                // h / g
                let quot = self.pquot(&h, &g);
                let mut right = self.split_linear(&quot, q, rng_state);
                left.append(&mut right);
                return left;
            }
        }
    }

    fn pquot(&self, a: &[FqElem], bm: &[FqElem]) -> Vec<FqElem> {
        let db = self.pdeg(bm);
        let mut r: Vec<FqElem> = a.to_vec();
        let mut q = vec![self.zero(); a.len() - db];
        while r.len() > db {
            let lead = r.pop().unwrap();
            if self.is_zero(&lead) {
                continue;
            }
            let k = r.len() - db;
            q[k] = lead.clone();
            for j in 0..db {
                let t = self.mul(&lead, &bm[j]);
                r[k + j] = self.sub(&r[k + j], &t);
            }
        }
        self.ptrim(q)
    }
}

/// All roots of the monic integer polynomial `poly` in the unramified field,
/// lifted to full working precision.  Handles inseparable reduction (index
/// divisors) for residue fields small enough to search digit by digit.
/// Roots are ordered by lexicographic order of the residue coordinates of
/// their mod-p reduction, then by full coordinates.
pub fn lift_roots(ctx: &Arc<PadicContext>, poly: &QPoly) -> Result<Vec<Unramified>, PadicError> {
    assert!(poly.is_monic());
    let cs: Vec<BigInt> = poly
        .coeffs
        .iter()
        .map(|c| {
            assert!(c.denom().is_one(), "integer polynomial expected");
            c.numer().clone()
        })
        .collect();
    let fq = ResidueField::of(ctx);
    let csq: Vec<FqElem> = cs
        .iter()
        .map(|c| {
            let r = c.mod_floor(&BigInt::from(ctx.p)).to_u64().unwrap();
            let mut v = vec![0u64; ctx.f];
            v[0] = r;
            v
        })
        .collect();
    let csq = fq.ptrim(csq);
    let mut rng = 0x9e3779b97f4a7c15u64 ^ (ctx.p as u64);
    let res_roots = fq.residue_roots(&csq, &mut rng);

    let k = ctx.work;
    let derivative: Vec<BigInt> = cs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect();
    let eval = |x: &[BigUint], kk: u32| ctx.raw_poly_eval_int(&cs, x, kk);
    let evald = |x: &[BigUint], kk: u32| ctx.raw_poly_eval_int(&derivative, x, kk);

    let mut found: Vec<Vec<BigUint>> = Vec::new();
    let newton = |start: &[BigUint]| -> Vec<BigUint> {
        let mut x = start.to_vec();
        for _ in 0..(k.ilog2() + 4) {
            let fx = eval(&x, k);
            let dfx = evald(&x, k);
            let vd = ctx.raw_val(&dfx, k);
            let du: Vec<BigUint> = dfx.iter().map(|c| c / ctx.pk(vd)).collect();
            let dinv = ctx.raw_inv(&du, k);
            let q = ctx.raw_mul(&fx, &dinv, k);
            if ctx.raw_val(&q, k) < vd {
                break;
            }
            let qs: Vec<BigUint> = q.iter().map(|c| c / ctx.pk(vd)).collect();
            x = ctx.raw_sub(&x, &qs, k);
        }
        x
    };

    // separate residue roots into simple and multiple
    let mut bfs: Vec<(Vec<BigUint>, u32)> = Vec::new();
    for r in &res_roots {
        let r_raw: Vec<BigUint> = r.iter().map(|&c| BigUint::from(c)).collect();
        let dval = fq.peval(
            &csq.iter()
                .map(|c| c.clone())
                .collect::<Vec<_>>()
                .as_slice()
                .to_vec()
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| {
                    let mut v = vec![0u64; ctx.f];
                    for (kk, &x) in c.iter().enumerate() {
                        v[kk] = (x as u128 * (i as u128 % ctx.p as u128) % ctx.p as u128) as u64;
                    }
                    v
                })
                .collect::<Vec<_>>(),
            r,
        );
        if !fq.is_zero(&dval) {
            found.push(newton(&r_raw));
        } else {
            bfs.push((r_raw, 1));
        }
    }
    // digit-by-digit search around multiple residue roots
    if !bfs.is_empty() {
        let q_size = (ctx.p as u128).pow(ctx.f as u32);
        if q_size > 1 << 22 {
            return Err(PadicError::RamifiedOrInseparable);
        }
        let all_digits: Vec<Vec<BigUint>> = (0..q_size)
            .map(|idx| {
                let mut x = vec![BigUint::zero(); ctx.f];
                let mut t = idx;
                for v in x.iter_mut() {
                    *v = BigUint::from((t % ctx.p as u128) as u64);
                    t /= ctx.p as u128;
                }
                x
            })
            .collect();
        let mut guard = 0;
        let mut steps: u64 = 0;
        while !bfs.is_empty() && guard < 4 * k {
            guard += 1;
            steps += (bfs.len() as u64) * q_size as u64;
            if bfs.len() > 2048 || steps > 400_000 {
                return Err(PadicError::RamifiedOrInseparable);
            }
            let mut next: Vec<(Vec<BigUint>, u32)> = Vec::new();
            let mut seen: std::collections::HashSet<Vec<BigUint>> =
                std::collections::HashSet::new();
            for (x, depth) in &bfs {
                let vf = ctx.raw_val(&eval(x, k), k);
                let vdf = ctx.raw_val(&evald(x, k), k);
                if vf > 2 * vdf {
                    let r = newton(x);
                    if !found.iter().any(|f| f == &r) {
                        found.push(r);
                    }
                    continue;
                }
                let shift = ctx.pk(*depth);
                for d in &all_digits {
                    let xe: Vec<BigUint> = x
                        .iter()
                        .zip(d)
                        .map(|(a, b)| (a + b * shift) % ctx.pk(k))
                        .collect();
                    if ctx.raw_val(&eval(&xe, k), k) >= depth + 1 {
                        let key: Vec<BigUint> =
                            xe.iter().map(|c| c % ctx.pk(depth + 1)).collect();
                        if seen.insert(key) {
                            next.push((xe, depth + 1));
                        }
                    }
                }
            }
            bfs = next;
        }
    }
    // sort deterministically
    let pb = BigUint::from(ctx.p);
    found.sort_by_key(|r| {
        let res: Vec<BigUint> = r.iter().map(|c| c % &pb).collect();
        (res, r.clone())
    });
    found.dedup();
    Ok(found
        .into_iter()
        .map(|r| Unramified::from_raw(ctx, r, k))
        .collect())
}

/// When the defining polynomial reduces badly mod p (large index divisor),
/// switch to an auxiliary generator theta with separable reduction, lift its
/// roots by plain Newton iteration, and express the original generator in the
/// theta power basis.
fn roots_via_generator_change(
    ctx: &Arc<PadicContext>,
    field: &Arc<NumberField>,
) -> Result<Vec<Unramified>, PadicError> {
    use crate::exactalg::{q_int, solve_linear};
    let d = field.degree;
    let gen = field.gen();
    let mut candidates: Vec<NFElement> = Vec::new();
    let g1 = gen.clone();
    let g2 = gen.mul(&gen).unwrap();
    let g3 = gen.pow(3);
    let g4 = gen.pow(4);
    for c4 in 0..2i64 {
        for c3 in 0..4i64 {
            for c2 in 0..4i64 {
                for c1 in 0..4i64 {
                    if c1 + c2 + c3 + c4 == 0 {
                        continue;
                    }
                    let cand = g4
                        .scale(&q_int(c4))
                        .add(&g3.scale(&q_int(c3)))
                        .unwrap()
                        .add(&g2.scale(&q_int(c2)))
                        .unwrap()
                        .add(&g1.scale(&q_int(c1)))
                        .unwrap();
                    candidates.push(cand);
                }
            }
        }
    }
    for theta in candidates {
        let mp = theta.minimal_polynomial();
        if mp.degree() != d {
            continue;
        }
        if mp.coeffs.iter().any(|c| !c.denom().is_one()) {
            continue;
        }
        if !separable_mod_p(&mp, ctx.p) {
            continue;
        }
        let theta_roots = lift_roots(ctx, &mp)?;
        if theta_roots.len() != d {
            continue;
        }
        // express alpha in the power basis of theta
        let mut cols: Vec<Vec<Q>> = Vec::new();
        let mut cur = field.one();
        cols.push(cur.coords.clone());
        for _ in 1..d {
            cur = cur.mul(&theta).unwrap();
            cols.push(cur.coords.clone());
        }
        let m: Vec<Vec<Q>> = (0..d)
            .map(|i| (0..d).map(|j| cols[j][i].clone()).collect())
            .collect();
        let alpha_coords = match solve_linear(&m, &gen.coords) {
            Ok(c) => c,
            Err(_) => continue,
        };
        let mut out = Vec::with_capacity(d);
        for r in &theta_roots {
            let mut acc = Unramified::zero(ctx);
            let mut pw = Unramified::one(ctx);
            for (i, c) in alpha_coords.iter().enumerate() {
                if !c.is_zero() {
                    acc = acc.add(&pw.mul(&Unramified::from_rational(ctx, c)));
                }
                if i + 1 < d {
                    pw = pw.mul(r);
                }
            }
            out.push(acc);
        }
        let pb = BigUint::from(ctx.p);
        out.sort_by_key(|r| {
            if r.is_zero() || r.val != 0 {
                return (vec![BigUint::zero(); ctx.f], vec![]);
            }
            let res: Vec<BigUint> = r.unit_coords().iter().map(|c| c % &pb).collect();
            (res, r.unit_coords().to_vec())
        });
        return Ok(out);
    }
    Err(PadicError::RamifiedOrInseparable)
}

fn separable_mod_p(poly: &QPoly, p: u64) -> bool {
    let fq = ResidueField {
        p,
        f: 1,
        modp: vec![0],
    };
    let g: Vec<FqElem> = poly
        .coeffs
        .iter()
        .map(|c| vec![c.numer().mod_floor(&BigInt::from(p)).to_u64().unwrap()])
        .collect();
    let g = fq.ptrim(g);
    let der: Vec<FqElem> = g
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| vec![(c[0] as u128 * (i as u128 % p as u128) % p as u128) as u64])
        .collect();
    let der = fq.ptrim(der);
    if der.len() == 1 && fq.is_zero(&der[0]) {
        return false;
    }
    fq.pdeg(&fq.pgcd(&g, &der)) == 0
}

/// Number-field embedding into an unramified p-adic field: evaluation of
/// coordinates at a chosen root of the defining polynomial.
#[derive(Clone)]
pub struct PadicEmbedding {
    pub ctx: Arc<PadicContext>,
    pub field: Arc<NumberField>,
    pub root: Unramified,
    pub index: usize,
}

impl PadicEmbedding {
    /// All embeddings, in the deterministic root order.  Errors with
    /// `IncompleteSplitting` if the residue degree of the context does not
    /// split the polynomial completely.
    pub fn all(
        ctx: &Arc<PadicContext>,
        field: &Arc<NumberField>,
    ) -> Result<Vec<PadicEmbedding>, PadicError> {
        let roots = match lift_roots(ctx, &field.poly) {
            Ok(r) if r.len() == field.degree => r,
            Ok(_) | Err(PadicError::RamifiedOrInseparable) => {
                roots_via_generator_change(ctx, field)?
            }
            Err(e) => return Err(e),
        };
        if roots.len() != field.degree {
            return Err(PadicError::IncompleteSplitting);
        }
        Ok(roots
            .into_iter()
            .enumerate()
            .map(|(index, root)| PadicEmbedding {
                ctx: Arc::clone(ctx),
                field: Arc::clone(field),
                root,
                index,
            })
            .collect())
    }

    /// Evaluate the coordinates of `a` at the root.  Denominators prime to p
    /// are inverted; powers of p in denominators shift the valuation.
    pub fn embed(&self, a: &NFElement) -> Unramified {
        let ctx = &self.ctx;
        // headroom: common p-power in denominators
        let mut shift = 0u32;
        let pb = BigInt::from(ctx.p);
        for c in &a.coords {
            let mut d = c.denom().clone();
            let mut w = 0u32;
            while (&d % &pb).is_zero() {
                d /= &pb;
                w += 1;
            }
            shift = shift.max(w);
        }
        let k = ctx.work;
        let m = BigInt::from(ctx.pk(k).clone());
        let mut acc = vec![BigUint::zero(); ctx.f];
        let mut pw = vec![BigUint::zero(); ctx.f];
        pw[0] = BigUint::one();
        let root_raw = self.root.raw_at(k);
        for (i, c) in a.coords.iter().enumerate() {
            if !c.is_zero() {
                let mut num = c.numer().clone();
                let mut den = c.denom().clone();
                let mut w = 0u32;
                while (&den % &pb).is_zero() {
                    den /= &pb;
                    w += 1;
                }
                num *= BigInt::from(ctx.pk(shift - w).clone());
                let deninv = modpow_inv(&den.mod_floor(&m), &m);
                let scalar = (num.mod_floor(&m) * deninv).mod_floor(&m).to_biguint().unwrap();
                for j in 0..ctx.f {
                    acc[j] = (&acc[j] + &pw[j] * &scalar) % ctx.pk(k);
                }
            }
            if i + 1 < a.coords.len() {
                pw = ctx.raw_mul(&pw, &root_raw, k);
            }
        }
        let out = Unramified::normalize(ctx, -(shift as i64), acc, k);
        out.truncate_abs(ctx.n as i64)
    }
}

/// Splitting data of a rational prime q in the field: the embeddings grouped
/// into Frobenius orbits (one orbit per prime above q).
pub struct PrimeSplitting {
    pub ctx: Arc<PadicContext>,
    pub embeddings: Vec<PadicEmbedding>,
    /// orbits of embedding indices under Frobenius; orbit 0 contains root 0
    pub orbits: Vec<Vec<usize>>,
}

impl PrimeSplitting {
    /// Build a q-adic context with the right residue degree by trying
    /// divisor degrees until the polynomial splits completely.
    pub fn analyze(
        q: u64,
        field: &Arc<NumberField>,
        degrees: &[usize],
        prec: u32,
    ) -> Result<PrimeSplitting, PadicError> {
        for &f in degrees {
            let modulus = irreducible_modulus(q, f);
            let ctx = PadicContext::new(q, f, prec, modulus);
            match PadicEmbedding::all(&ctx, field) {
                Ok(embeddings) => {
                    let orbits = frobenius_orbits(&ctx, &embeddings);
                    return Ok(PrimeSplitting {
                        ctx,
                        embeddings,
                        orbits,
                    });
                }
                Err(PadicError::IncompleteSplitting) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(PadicError::IncompleteSplitting)
    }

    /// q-adic valuations of `a` at each prime above q, ordered by the
    /// minimal embedding index in each orbit.
    pub fn valuations(&self, a: &NFElement) -> Vec<i64> {
        self.orbits
            .iter()
            .map(|orb| self.embeddings[orb[0]].embed(a).val)
            .collect()
    }
}

fn frobenius_orbits(_ctx: &Arc<PadicContext>, embs: &[PadicEmbedding]) -> Vec<Vec<usize>> {
    let n = embs.len();
    let mut used = vec![false; n];
    let mut orbits = Vec::new();
    for i in 0..n {
        if used[i] {
            continue;
        }
        let mut orbit = vec![i];
        used[i] = true;
        let mut cur = embs[i].root.clone();
        loop {
            cur = cur.frobenius();
            let j = (0..n)
                .max_by_key(|&j| embs[j].root.diff_val(&cur))
                .unwrap();
            if j == i {
                break;
            }
            if !used[j] {
                used[j] = true;
                orbit.push(j);
            } else {
                break;
            }
        }
        orbits.push(orbit);
    }
    orbits
}

/// Find a monic degree-f polynomial over Z irreducible mod p
/// (deterministic; checked with Rabin's irreducibility criterion).
pub fn irreducible_modulus(p: u64, f: usize) -> Vec<BigInt> {
    if f == 1 {
        return vec![BigInt::zero(), BigInt::one()];
    }
    let fqbase = ResidueField {
        p,
        f: 1,
        modp: vec![0],
    };
    let _ = &fqbase;
    // enumerate candidate coefficient vectors deterministically
    let mut counter = 0u64;
    loop {
        counter += 1;
        let mut cs = vec![BigInt::zero(); f + 1];
        cs[f] = BigInt::one();
        let mut t = counter;
        for c in cs.iter_mut().take(f) {
            *c = BigInt::from((t % p) as i64);
            t /= p;
        }
        if t > 0 {
            panic!("no irreducible polynomial found (impossible)");
        }
        if is_irreducible_mod_p(&cs, p, f) {
            return cs;
        }
    }
}

fn is_irreducible_mod_p(cs: &[BigInt], p: u64, f: usize) -> bool {
    // Rabin: x^{p^f} = x mod g, and gcd(x^{p^{f/q}} - x, g) = 1 for primes q | f
    let fq = ResidueField {
        p,
        f: 1,
        modp: vec![0],
    };
    let g: Vec<FqElem> = cs
        .iter()
        .map(|c| vec![c.mod_floor(&BigInt::from(p)).to_u64().unwrap()])
        .collect();
    let g = fq.ptrim(g);
    if fq.pdeg(&g) != f {
        return false;
    }
    let x = vec![fq.zero(), fq.one()];
    let qf = (p as u128).pow(f as u32);
    let xq = fq.ppowmod(&x, qf, &g);
    let mut diff = xq;
    while diff.len() < 2 {
        diff.push(fq.zero());
    }
    diff[1] = fq.sub(&diff[1], &fq.one());
    let diff = fq.ptrim(diff);
    if !(diff.len() == 1 && fq.is_zero(&diff[0])) {
        return false;
    }
    let mut primes = vec![];
    let mut m = f;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            primes.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        primes.push(m);
    }
    for q in primes {
        let e = (p as u128).pow((f / q) as u32);
        let xe = fq.ppowmod(&x, e, &g);
        let mut diff = xe;
        while diff.len() < 2 {
            diff.push(fq.zero());
        }
        diff[1] = fq.sub(&diff[1], &fq.one());
        let gc = fq.pgcd(&fq.ptrim(diff), &g);
        if fq.pdeg(&gc) != 0 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::q_int;

    fn q25(n: u32) -> Arc<PadicContext> {
        PadicContext::new(5, 2, n, vec![BigInt::from(-2), BigInt::zero(), BigInt::one()])
    }

    #[test]
    fn hensel_roots_of_x2_plus_1_mod_13() {
        let ctx = PadicContext::base(13, 2);
        let roots = lift_roots(&ctx, &QPoly::from_ints(&[1, 0, 1])).unwrap();
        assert_eq!(roots.len(), 2);
        let vals: Vec<BigUint> = roots
            .iter()
            .map(|r| r.unit_coords()[0].clone() % BigUint::from(169u32))
            .collect();
        assert!(vals.contains(&BigUint::from(70u32)));
        assert!(vals.contains(&BigUint::from(99u32)));
    }

    #[test]
    fn root_of_linear() {
        let ctx = PadicContext::base(7, 10);
        let roots = lift_roots(&ctx, &QPoly::from_ints(&[-1, 1])).unwrap();
        assert_eq!(roots.len(), 1);
        assert!(roots[0].eq_to(&Unramified::one(&ctx), 10));
    }

    #[test]
    fn example1_field_splits_in_q25() {
        let ctx = q25(40);
        let field = NumberField::new(QPoly::from_ints(&[23, 0, 9, 0, -6, 0, 1]));
        let embs = PadicEmbedding::all(&ctx, &field).unwrap();
        assert_eq!(embs.len(), 6);
        // three frobenius-conjugate pairs
        let ps = PrimeSplitting {
            ctx: Arc::clone(&ctx),
            orbits: frobenius_orbits(&ctx, &embs),
            embeddings: embs,
        };
        assert_eq!(ps.orbits.len(), 3);
        assert!(ps.orbits.iter().all(|o| o.len() == 2));
    }

    #[test]
    fn teichmuller_of_two_mod_25() {
        let ctx = PadicContext::base(5, 2);
        let t = Unramified::from_i64(&ctx, 2).teichmuller().unwrap();
        assert_eq!(t.unit_coords()[0].clone() % BigUint::from(25u32), BigUint::from(7u32));
        // defining property
        let one = Unramified::one(&ctx);
        assert!(t.pow_i64(24).unwrap().eq_to(&one, 2));
    }

    #[test]
    fn log_of_7_in_q5() {
        let ctx = PadicContext::base(5, 4);
        let l = Unramified::from_i64(&ctx, 7).log().unwrap();
        // independent series oracle: log(7) = log(7^4)/4 with 7^4 = 1 + 2400
        // and 2400 = 5^2*96; modulo 5^4 only the linear term survives:
        // log(7) = 2400/4 = 600 (mod 5^4)
        let expected = Unramified::from_i64(&ctx, 600);
        assert!(l.eq_to(&expected, 4), "{l:?}");
    }

    #[test]
    fn log_kills_teichmuller() {
        let ctx = q25(30);
        let mut x = Unramified::from_i64(&ctx, 3);
        x = x.teichmuller().unwrap();
        let l = x.log().unwrap();
        assert!(l.is_zero() || l.val >= 30, "{l:?}");
        let one = Unramified::one(&ctx);
        assert!(one.log().unwrap().is_zero());
    }

    #[test]
    fn log_is_multiplicative() {
        let ctx = q25(25);
        let a = Unramified::from_i64(&ctx, 7);
        let b = Unramified::from_i64(&ctx, 11);
        let lhs = a.mul(&b).log().unwrap();
        let rhs = a.log().unwrap().add(&b.log().unwrap());
        assert!(lhs.eq_to(&rhs, 24));
    }

    #[test]
    fn frobenius_order_and_log_compat() {
        let ctx = q25(20);
        let field = NumberField::new(QPoly::from_ints(&[23, 0, 9, 0, -6, 0, 1]));
        let embs = PadicEmbedding::all(&ctx, &field).unwrap();
        let x = embs[2].root.clone();
        // frobenius squared is the identity on Q_25
        assert!(x.frobenius().frobenius().eq_to(&x, 18));
        // log commutes with frobenius
        let u = x.mul(&x).add(&Unramified::from_i64(&ctx, 3));
        if u.val == 0 {
            let lhs = u.frobenius().log().unwrap();
            let rhs = u.log().unwrap().frobenius();
            assert!(lhs.eq_to(&rhs, 18));
        }
    }

    #[test]
    fn embedding_is_multiplicative() {
        let ctx = q25(25);
        let field = NumberField::new(QPoly::from_ints(&[23, 0, 9, 0, -6, 0, 1]));
        let embs = PadicEmbedding::all(&ctx, &field).unwrap();
        let e = &embs[0];
        let a = field.element(vec![
            q_int(1),
            q_int(2),
            q_int(0),
            q_int(1),
            q_int(0),
            q_int(3),
        ]);
        let b = field.element(vec![
            q_int(-1),
            q_int(0),
            q_int(5),
            q_int(0),
            q_int(2),
            q_int(0),
        ]);
        let lhs = e.embed(&a.mul(&b).unwrap());
        let rhs = e.embed(&a).mul(&e.embed(&b));
        assert!(lhs.eq_to(&rhs, 24));
        assert!(e.embed(&field.one()).eq_to(&Unramified::one(&ctx), 25));
        assert!(e.embed(&field.gen()).eq_to(&e.root, 25));
    }

    #[test]
    fn division_tracks_precision() {
        let ctx = PadicContext::base(5, 10);
        let a = Unramified::from_i64(&ctx, 35); // val 1
        let b = Unramified::from_i64(&ctx, 50); // val 2
        let q = b.div(&a).unwrap();
        assert_eq!(q.val, 1);
        let r = a.div(&b).unwrap();
        assert_eq!(r.val, -1);
    }

    #[test]
    fn precision_monotonicity_of_log() {
        let low = PadicContext::base(7, 8);
        let high = PadicContext::base(7, 16);
        let a_low = Unramified::from_i64(&low, 2).log().unwrap();
        let a_high = Unramified::from_i64(&high, 2).log().unwrap();
        // the two computations agree modulo 7^8
        let lifted = Unramified::from_rational(
            &low,
            &Q::from_integer(BigInt::from(a_high.unit_coords()[0].clone()) * BigInt::from(7).pow(a_high.val as u32)),
        );
        assert!(a_low.eq_to(&lifted, 8));
    }
}
