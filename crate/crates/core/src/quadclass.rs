//! Binary quadratic form class groups of negative discriminant, and
//! quadratic-field ell-unit construction by norm-form representation.
//!
//! Forms (a, b, c) represent a x^2 + b xy + c y^2 with D = b^2 - 4ac < 0.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QuadError {
    #[error("not a valid negative discriminant")]
    InvalidDiscriminant,
    #[error("forms have different discriminants")]
    DiscriminantMismatch,
    #[error("prime divides the discriminant")]
    RamifiedPrime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        b.abs() <= a && a <= c && (b >= 0 || (b.abs() < a && a < c))
    }

    /// Gauss reduction.
    pub fn reduce(mut self) -> QuadForm {
        loop {
            if self.a > self.c {
                self = QuadForm {
                    a: self.c,
                    b: -self.b,
                    c: self.a,
                };
                continue;
            }
            if self.b.abs() > self.a || (self.b == -self.a) {
                // normalize b into (-a, a]
                let two_a = 2 * self.a;
                let mut b = self.b.rem_euclid(two_a);
                if b > self.a {
                    b -= two_a;
                }
                let c = (b * b - self.discriminant()) / (4 * self.a);
                self = QuadForm { a: self.a, b, c };
                continue;
            }
            if self.a == self.c && self.b < 0 {
                self.b = -self.b;
            }
            return self;
        }
    }
}

/// The class group of primitive reduced forms of a negative discriminant.
#[derive(Debug, Clone)]
pub struct FormClassGroup {
    pub discriminant: i64,
    pub forms: Vec<QuadForm>,
    pub table: Vec<Vec<usize>>,
}

fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    fn g(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            g(b, a % b)
        }
    }
    g(g(a, b), c)
}

pub fn enumerate_reduced_forms(d: i64) -> Result<FormClassGroup, QuadError> {
    if d >= 0 || !(d % 4 == 0 || d.rem_euclid(4) == 1) {
        return Err(QuadError::InvalidDiscriminant);
    }
    let mut forms = Vec::new();
    let bound = (((-d) as f64 / 3.0).sqrt() as i64) + 1;
    for a in 1..=bound {
        for b in -a..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            let f = QuadForm { a, b, c };
            if f.is_reduced() && gcd3(a, b, c) == 1 && f.discriminant() == d {
                forms.push(f);
            }
        }
    }
    forms.sort_by_key(|f| (f.a, f.b, f.c));
    let n = forms.len();
    let mut table = vec![vec![0usize; n]; n];
    for i in 0..n {
        for j in 0..n {
            let comp = compose(&forms[i], &forms[j])?;
            table[i][j] = forms
                .iter()
                .position(|f| *f == comp)
                .expect("composition must land on a reduced form");
        }
    }
    Ok(FormClassGroup {
        discriminant: d,
        forms,
        table,
    })
}

impl FormClassGroup {
    pub fn class_number(&self) -> usize {
        self.forms.len()
    }

    pub fn identity_index(&self) -> usize {
        // principal form has a = 1
        self.forms.iter().position(|f| f.a == 1).unwrap()
    }

    pub fn index_of(&self, f: &QuadForm) -> Option<usize> {
        let r = f.reduce();
        self.forms.iter().position(|g| *g == r)
    }

    pub fn inverse_index(&self, i: usize) -> usize {
        let id = self.identity_index();
        (0..self.forms.len())
            .find(|&j| self.table[i][j] == id)
            .unwrap()
    }

    pub fn order_of(&self, i: usize) -> usize {
        let id = self.identity_index();
        let mut cur = i;
        let mut k = 1;
        while cur != id {
            cur = self.table[cur][i];
            k += 1;
        }
        k
    }
}

/// Gauss composition of primitive forms of the same discriminant.
pub fn compose(f1: &QuadForm, f2: &QuadForm) -> Result<QuadForm, QuadError> {
    if f1.discriminant() != f2.discriminant() {
        return Err(QuadError::DiscriminantMismatch);
    }
    // classical composition (Dirichlet's method)
    let (a1, b1, _c1) = (f1.a, f1.b, f1.c);
    let (a2, b2, c2) = (f2.a, f2.b, f2.c);
    let d = f1.discriminant();
    let s = (b1 + b2) / 2;
    let n = (b2 - b1) / 2;
    // solve for composition using extended gcd
    let (g, u, _v) = ext_gcd(a1, a2);
    let (e, w, t) = ext_gcd(g, s);
    // y2 coefficient
    let a3 = (a1 / e) * (a2 / e);
    let num = (a2 / e) * u * n + (c2 % a3) * t % a3;
    // b3 = b2 + 2 a2/e * (u n w? ...) -- use the standard formula below
    let _ = num;
    // Use the textbook formula: with e = gcd(a1, a2, s), find x, y, z with
    // x a1 + y a2 + z s = e; then
    // a3 = a1 a2 / e^2, b3 = b2 + 2 (a2/e) (n x - c2 z) mod 2 a3
    let (x, y, z) = ext_gcd3(a1, a2, s);
    let _ = (w, y);
    let a3 = (a1 / e) * (a2 / e);
    let mut b3 = b2 + 2 * (a2 / e) * (n * x - c2 * z);
    b3 = b3.rem_euclid(2 * a3);
    if b3 > a3 {
        b3 -= 2 * a3;
    }
    let c3 = (b3 * b3 - d) / (4 * a3);
    Ok(QuadForm {
        a: a3,
        b: b3,
        c: c3,
    }
    .reduce())
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a.abs(), a.signum(), 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

fn ext_gcd3(a: i64, b: i64, c: i64) -> (i64, i64, i64) {
    // x a + y b + z c = gcd
    let (g1, x1, y1) = ext_gcd(a, b);
    let (_g, u, z) = ext_gcd(g1, c);
    (x1 * u, y1 * u, z)
}

/// Splitting behaviour and ideal class of an unramified prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrimeClass {
    /// ell = lambda lambda'; the two indices are the classes of the two
    /// conjugate primes (inverse classes).
    Split { class: usize, conj_class: usize },
    Inert,
}

pub fn class_of_prime(ell: u64, group: &FormClassGroup) -> Result<PrimeClass, QuadError> {
    let d = group.discriminant;
    let l = ell as i64;
    if (d % l) == 0 {
        return Err(QuadError::RamifiedPrime);
    }
    // solve b^2 = D mod 4 ell
    let modulus = 4 * l;
    let mut root = None;
    for b in 0..modulus {
        if (b * b - d).rem_euclid(modulus) == 0 {
            root = Some(b);
            break;
        }
    }
    let b = match root {
        Some(b) => b,
        None => return Ok(PrimeClass::Inert),
    };
    let c = (b * b - d) / (4 * l);
    let f = QuadForm { a: l, b, c }.reduce();
    let idx = group
        .index_of(&f)
        .expect("reduced form of correct discriminant");
    Ok(PrimeClass::Split {
        class: idx,
        conj_class: group.inverse_index(idx),
    })
}

/// Kronecker symbol (d | n) for odd prime n, plus the n = 2 case.
pub fn kronecker(d: i64, n: u64) -> i32 {
    if n == 2 {
        if d % 2 == 0 {
            return 0;
        }
        return match d.rem_euclid(8) {
            1 | 7 => 1,
            _ => -1,
        };
    }
    let p = n as i64;
    let r = d.rem_euclid(p);
    if r == 0 {
        return 0;
    }
    // Euler criterion
    let mut acc = 1i64;
    let mut base = r % p;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    if acc == 1 {
        1
    } else {
        -1
    }
}

/// An element (x + y sqrt(D))/2 of the quadratic field of discriminant D
/// (x = y mod 2 when D = 1 mod 4; y even, x even when D = 0 mod 4 so that
/// the element is x/2 + (y/2) sqrt(D) with integer parts).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadElement {
    pub x: i128,
    pub y: i128,
}

impl QuadElement {
    pub fn norm(&self, d: i64) -> i128 {
        (self.x * self.x - (d as i128) * self.y * self.y) / 4
    }

    pub fn conj(&self) -> QuadElement {
        QuadElement {
            x: self.x,
            y: -self.y,
        }
    }
}

/// Find a generator of lambda^k of absolute norm ell^k in the quadratic
/// order of discriminant D < 0, i.e. (x, y) with x^2 + |D| y^2 = 4 ell^k.
/// Returns the solution with the smallest y > 0 (or y = 0).
pub fn imaginary_generator(d: i64, ell: u64, k: u32) -> Option<QuadElement> {
    assert!(d < 0);
    let target: i128 = 4 * (ell as i128).pow(k);
    let dd = (-d) as i128;
    let mut y: i128 = 0;
    while dd * y * y <= target {
        let rem = target - dd * y * y;
        let x = isqrt(rem);
        if x * x == rem && (x - y * (d as i128)).rem_euclid(2) == 0 && (x + y) % 2 == (if d % 2 == 0 { 0 } else { (x + y) % 2 }) {
            // parity: need x = y D mod 2, i.e. x = y mod 2 for odd D, x even for even D
            let ok = if d.rem_euclid(2) == 0 {
                x % 2 == 0 && y % 2 == 0
            } else {
                (x - y).rem_euclid(2) == 0
            };
            if ok {
                // primitive at ell: not divisible by ell (else it generates (ell) * smaller)
                let elt = QuadElement { x, y };
                if !(elt.x.rem_euclid(ell as i128) == 0 && elt.y.rem_euclid(ell as i128) == 0) {
                    return Some(elt);
                }
            }
        }
        y += 1;
    }
    None
}

/// Find a generator of a prime above ell in a real quadratic field of
/// discriminant D > 0 (class number 1 cases): (x, y) with
/// |x^2 - D y^2| = 4 ell.  Searches small y.
pub fn real_generator(d: i64, ell: u64, y_bound: i128) -> Option<QuadElement> {
    assert!(d > 0);
    let target: i128 = 4 * ell as i128;
    for y in 0..=y_bound {
        for sign in [1i128, -1] {
            let rhs = sign * target + (d as i128) * y * y;
            if rhs < 0 {
                continue;
            }
            let x = isqrt(rhs);
            if x * x == rhs {
                let ok = if d.rem_euclid(2) == 0 {
                    x % 2 == 0 && y % 2 == 0
                } else {
                    (x - y).rem_euclid(2) == 0
                };
                if ok && (x != 0 || y != 0) {
                    return Some(QuadElement { x, y });
                }
            }
        }
    }
    None
}

/// Fundamental ell-unit of norm +1 in the imaginary quadratic field of
/// discriminant D: v = pi / conj(pi) where (pi) = lambda^k with k the order
/// of lambda in the class group.  Returned as (pi, k); the unit itself is
/// the formal quotient.
pub fn norm_one_ell_unit(d: i64, ell: u64) -> Option<(QuadElement, u32)> {
    let group = enumerate_reduced_forms(d).ok()?;
    match class_of_prime(ell, &group).ok()? {
        PrimeClass::Inert => None,
        PrimeClass::Split { class, .. } => {
            let k = group.order_of(class) as u32;
            imaginary_generator(d, ell, k).map(|g| (g, k))
        }
    }
}

fn isqrt(n: i128) -> i128 {
    if n < 0 {
        return -1;
    }
    let mut x = (n as f64).sqrt() as i128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d_minus_4_has_one_class() {
        let g = enumerate_reduced_forms(-4).unwrap();
        assert_eq!(g.class_number(), 1);
        assert_eq!(g.forms[0], QuadForm { a: 1, b: 0, c: 1 });
    }

    #[test]
    fn d_minus_23_has_three_classes() {
        let g = enumerate_reduced_forms(-23).unwrap();
        assert_eq!(g.class_number(), 3);
        let forms: Vec<(i64, i64, i64)> = g.forms.iter().map(|f| (f.a, f.b, f.c)).collect();
        assert!(forms.contains(&(1, 1, 6)));
        assert!(forms.contains(&(2, 1, 3)));
        assert!(forms.contains(&(2, -1, 3)));
    }

    #[test]
    fn d_minus_59_has_three_classes() {
        assert_eq!(enumerate_reduced_forms(-59).unwrap().class_number(), 3);
    }

    #[test]
    fn composition_group_law() {
        let g = enumerate_reduced_forms(-23).unwrap();
        let id = g.identity_index();
        let f = QuadForm { a: 2, b: 1, c: 3 };
        let fi = g.index_of(&f).unwrap();
        // principal . f = f
        assert_eq!(g.table[id][fi], fi);
        // f . f = opposite form
        let sq = g.table[fi][fi];
        assert_eq!(g.forms[sq], QuadForm { a: 2, b: -1, c: 3 });
        // f . f^{-1} = principal
        assert_eq!(g.table[fi][g.inverse_index(fi)], id);
        assert_eq!(g.order_of(fi), 3);
    }

    #[test]
    fn class_of_13_in_minus_23() {
        let g = enumerate_reduced_forms(-23).unwrap();
        match class_of_prime(13, &g).unwrap() {
            PrimeClass::Split { class, conj_class } => {
                assert_eq!(g.order_of(class), 3);
                assert_eq!(g.inverse_index(class), conj_class);
            }
            _ => panic!("13 splits in Q(sqrt -23)"),
        }
    }

    #[test]
    fn seven_is_inert_in_minus_23() {
        let g = enumerate_reduced_forms(-23).unwrap();
        assert_eq!(class_of_prime(7, &g).unwrap(), PrimeClass::Inert);
        assert_eq!(kronecker(-23, 7), -1);
    }

    #[test]
    fn lambda_cubed_generator_for_13() {
        // lambda^3 = (u) with Norm(u) = 13^3 in Q(sqrt -23)
        let g = imaginary_generator(-23, 13, 3).unwrap();
        assert_eq!(g.norm(-23), 13i128.pow(3));
    }

    #[test]
    fn norm_one_unit_in_minus_56() {
        // 3 splits in Q(sqrt -56), class of order 4
        let (pi, k) = norm_one_ell_unit(-56, 3).unwrap();
        assert_eq!(k, 4);
        assert_eq!(pi.norm(-56), 3i128.pow(4));
    }

    #[test]
    fn real_generator_in_q_sqrt_8() {
        // 7 splits in Q(sqrt 2): x^2 - 8 y^2 = +-28
        let g = real_generator(8, 7, 100).unwrap();
        assert_eq!((g.norm(8)).abs(), 7);
    }
}
