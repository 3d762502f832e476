//! The regular-setting engine: the invariant endomorphisms U_g and A_g, the
//! homomorphism Phi_g, the per-prime matrices A_g(lambda), and the
//! coefficient formulas (general trace formula plus the CM-split, CM-inert,
//! RM and genus specialisations).

use crate::exactalg::{NFElement, Q};
use crate::galoisdata::{conj_action, zeta, Character, GroupTable, Mat2, RepModel};
use crate::ingest::{
    dihedral_model, packet_rho, PacketRho, PrimePacket, ProblemSpec, QuadKind, SplitType,
    ValidatedSpec,
};
use crate::padics::{PadicContext, PadicEmbedding, Unramified};
use num_bigint::BigInt;
use num_traits::{One, Signed};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("all seeds produced a zero projection")]
    ZeroProjection,
    #[error("p splits in the real quadratic field: out of scope")]
    DegenerateRmSplit,
    #[error("this dataset is irregular at p")]
    IrregularAtP,
    #[error("no packet for ell = {0}")]
    NoPacket(u64),
    #[error("the shipped unit does not factor as claimed")]
    BadFactorization,
    #[error("denominator vanishes to working precision")]
    ZeroDenominator,
    #[error("wrong splitting type for this formula")]
    WrongSplitting,
    #[error("not a genus (quadratic ring class character) dataset")]
    NotGenusCase,
    #[error("padic error: {0}")]
    Padic(#[from] crate::padics::PadicError),
    #[error("galois error: {0}")]
    Galois(#[from] crate::galoisdata::GaloisError),
}

/// A coefficient value; the scalar of an exotic-style packet with vanishing
/// trace is determined only up to sign by local data, in which case both
/// candidates are reported.
#[derive(Debug, Clone)]
pub enum CoefficientValue {
    Unique(Unramified),
    BothCandidates(Unramified, Unramified),
}

impl CoefficientValue {
    pub fn unique(&self) -> &Unramified {
        match self {
            CoefficientValue::Unique(v) => v,
            CoefficientValue::BothCandidates(v, _) => v,
        }
    }
}

/// Formal product of field elements with rational exponents; logarithms are
/// linear in the exponents so this never extracts roots in H.
#[derive(Debug, Clone)]
pub struct FormalUnit {
    pub factors: Vec<(NFElement, Q)>,
}

pub struct RegularEngine<'a> {
    pub spec: &'a ProblemSpec,
    pub ctx: Arc<PadicContext>,
    pub table: GroupTable,
    pub zeta_m: Unramified,
    /// matrices used for the conjugation action (honest or projective lifts)
    pub rho: RepModel,
    pub embeddings: Vec<PadicEmbedding>,
    /// evaluation element at p: inverse of the matched arithmetic frobenius
    pub tau_wp_hat: usize,
    /// eigenbasis change: columns are (v_alpha, v_beta)
    pub basis: Mat2,
    pub basis_inv: Mat2,
    pub ug: Mat2,
    pub ag: Mat2,
}

impl<'a> RegularEngine<'a> {
    pub fn new(validated: &'a ValidatedSpec) -> Result<Self, EngineError> {
        let spec = &validated.spec;
        if !spec.regular {
            return Err(EngineError::IrregularAtP);
        }
        if spec.kind == QuadKind::Rm {
            // p split in the real field is the out-of-scope setting
            if crate::quadclass::kronecker(spec.quad_disc, spec.p) == 1 {
                return Err(EngineError::DegenerateRmSplit);
            }
        }
        let ctx = PadicContext::new(spec.p, spec.f, spec.precision, spec.modulus.clone());
        let table = GroupTable::build(&spec.autos, spec.z_indices.clone(), Some(&spec.sqrt_disc))
            .expect("validated spec has a group");
        let zeta_m = zeta(&ctx, spec.zeta_order)?;
        let embeddings = PadicEmbedding::all(&ctx, &spec.field)?;
        // matched arithmetic frobenius at the first root; evaluation uses the
        // inverse (geometric normalisation of the reciprocity map)
        let fr = embeddings[0].root.frobenius();
        let matched = (0..table.n)
            .max_by_key(|&i| embeddings[0].embed(&spec.autos[i].image).diff_val(&fr))
            .unwrap();
        let tau_wp_hat = table.inv[matched];
        let rho = build_rep_model(spec, &table, &zeta_m, &ctx)?;
        // eigenbasis of rho(tau_wp_hat)
        let (basis, basis_inv) = eigenbasis(&rho.matrices[tau_wp_hat], spec, &zeta_m, &ctx)?;
        let mut engine = RegularEngine {
            spec,
            ctx,
            table,
            zeta_m,
            rho,
            embeddings,
            tau_wp_hat,
            basis,
            basis_inv,
            ug: Mat2::zero(&PadicContext::base(3, 1)),
            ag: Mat2::zero(&PadicContext::base(3, 1)),
        };
        engine.ug = engine.build_ug()?;
        engine.ag = engine.solve_ag()?;
        Ok(engine)
    }

    pub fn log_conj(&self, x: &NFElement, g: usize) -> Result<Unramified, EngineError> {
        let img = self.spec.autos[g].apply(x);
        Ok(self.embeddings[0].embed(&img).log()?)
    }

    fn log_conj_formal(&self, u: &FormalUnit, g: usize) -> Result<Unramified, EngineError> {
        let mut acc = Unramified::zero(&self.ctx);
        for (x, e) in &u.factors {
            let l = self.log_conj(x, g)?;
            let s = Unramified::from_rational(&self.ctx, e);
            acc = acc.add(&l.mul(&s));
        }
        Ok(acc)
    }

    /// U_g = sum over G of log_wp(sigma u) . (sigma . B) for the first seed B
    /// giving a nonzero projection.
    pub fn build_ug(&self) -> Result<Mat2, EngineError> {
        let one = Unramified::one(&self.ctx);
        let z = Unramified::zero(&self.ctx);
        let seeds = [
            Mat2::new(z.clone(), one.clone(), z.clone(), z.clone()),
            Mat2::new(z.clone(), z.clone(), one.clone(), z.clone()),
            Mat2::diag(&one, &one.neg()),
        ];
        let logs: Vec<Unramified> = (0..self.table.n)
            .map(|g| self.log_conj(&self.spec.unit, g))
            .collect::<Result<_, _>>()?;
        let threshold = self.ctx.n as i64 - 6;
        for seed in &seeds {
            let mut acc = Mat2::zero(&self.ctx);
            for g in 0..self.table.n {
                acc = acc.add(&conj_action(&self.rho.matrices, g, seed).scale(&logs[g]));
            }
            if acc.min_val() < threshold {
                return Ok(acc);
            }
        }
        Err(EngineError::ZeroProjection)
    }

    /// A_g from U_g: in the tau_wp eigenbasis A_g = [[0, x], [0, 1]] with
    /// x = log(u_1) / log(u_{alpha/beta}), normalised to trace 1.
    pub fn solve_ag(&self) -> Result<Mat2, EngineError> {
        let ue = self.basis_inv.mul(&self.ug).mul(&self.basis);
        let log_u1 = &ue.e[0][0];
        let log_uab = &ue.e[1][0];
        if log_uab.is_zero() {
            // trace of A must vanish: RM with p split, routed out of scope
            return Err(EngineError::DegenerateRmSplit);
        }
        let x = log_u1.div(log_uab)?;
        let z = Unramified::zero(&self.ctx);
        let one = Unramified::one(&self.ctx);
        let ae = Mat2::new(z.clone(), x, z, one);
        Ok(self.basis.mul(&ae).mul(&self.basis_inv))
    }

    /// The lambda-unit of a packet normalised to Norm_{H/Q} = ell, as a
    /// formal power.
    pub fn lambda_unit(&self, pk: &PrimePacket) -> Result<FormalUnit, EngineError> {
        let n = pk.unit.norm();
        if !n.denom().is_one() || n.numer().is_negative() {
            return Err(EngineError::BadFactorization);
        }
        let mut m = 0i64;
        let mut v = n.numer().clone();
        let lb = BigInt::from(pk.ell);
        while v > BigInt::from(1) {
            if (&v % &lb) != BigInt::from(0) {
                return Err(EngineError::BadFactorization);
            }
            v /= &lb;
            m += 1;
        }
        if m == 0 {
            return Err(EngineError::BadFactorization);
        }
        Ok(FormalUnit {
            factors: vec![(pk.unit.clone(), Q::new(BigInt::from(1), BigInt::from(m)))],
        })
    }

    /// A_g(lambda) = Phi_g(u(lambda)) = sum log_wp(sigma u(lambda)) .
    /// (sigma^{-1} . A_g).
    pub fn ag_lambda(&self, pk: &PrimePacket) -> Result<Mat2, EngineError> {
        let u = self.lambda_unit(pk)?;
        self.phi(&u)
    }

    pub fn phi(&self, u: &FormalUnit) -> Result<Mat2, EngineError> {
        let mut acc = Mat2::zero(&self.ctx);
        for g in 0..self.table.n {
            let l = self.log_conj_formal(u, g)?;
            acc = acc.add(&conj_action(&self.rho.matrices, self.table.inv[g], &self.ag).scale(&l));
        }
        Ok(acc)
    }

    pub fn rho_of_packet(&self, pk: &PrimePacket) -> Result<PacketRho, EngineError> {
        packet_rho(self.spec, &self.table, &self.zeta_m, pk, &self.ctx)
            .ok_or(EngineError::ZeroProjection)
    }

    /// The general coefficient formula: trace of rho(tau-hat) A_g(lambda).
    pub fn a_ell_regular(&self, ell: u64) -> Result<CoefficientValue, EngineError> {
        let pk = self
            .spec
            .packets
            .get(&ell)
            .ok_or(EngineError::NoPacket(ell))?;
        let agl = self.ag_lambda(pk)?;
        match self.rho_of_packet(pk)? {
            PacketRho::Unique(m) => Ok(CoefficientValue::Unique(m.mul(&agl).trace())),
            PacketRho::Ambiguous(m1, m2) => Ok(CoefficientValue::BothCandidates(
                m1.mul(&agl).trace(),
                m2.mul(&agl).trace(),
            )),
        }
    }

    /// Same trace computed after replacing lambda by its z-conjugate: both
    /// the frobenius and the unit are conjugated coherently.
    pub fn a_ell_regular_conjugated(
        &self,
        ell: u64,
        z: usize,
    ) -> Result<CoefficientValue, EngineError> {
        let pk = self
            .spec
            .packets
            .get(&ell)
            .ok_or(EngineError::NoPacket(ell))?;
        let conj_unit = self.spec.autos[z].apply(&pk.unit);
        let conj_pk = PrimePacket {
            unit: conj_unit,
            frob: self.table.mul[self.table.mul[z][pk.frob]][self.table.inv[z]],
            ..pk.clone()
        };
        let agl = self.ag_lambda(&conj_pk)?;
        let rho = match self.rho_of_packet(pk)? {
            PacketRho::Unique(m) => conj_action(&self.rho.matrices, z, &m),
            PacketRho::Ambiguous(m, _) => conj_action(&self.rho.matrices, z, &m),
        };
        Ok(CoefficientValue::Unique(rho.mul(&agl).trace()))
    }

    pub fn log_p_of(&self, n: u64) -> Result<Unramified, EngineError> {
        Ok(Unramified::from_i64(&self.ctx, n as i64).log()?)
    }

    // ---- psi-projections shared by the specialised formulas ----

    fn psi_character(&self) -> Character {
        // the ring class character psi = psi_g / psi_g' has exponents twice
        // those of psi_g on Z
        Character {
            order: self.spec.zeta_order,
            exponents: self
                .spec
                .psi_exps
                .iter()
                .map(|e| e * (self.spec.zeta_order / self.spec.psi_order) as i64)
                .collect(),
            zeta: self.zeta_m.clone(),
        }
    }

    /// log of the psi-projection of x: sum over Z of psi^{-1}(z) log(z x).
    pub fn log_psi(&self, u: &FormalUnit) -> Result<Unramified, EngineError> {
        let psi = self.psi_character();
        let mut acc = Unramified::zero(&self.ctx);
        for &zi in &self.table.z {
            let l = self.log_conj_formal(u, zi)?;
            acc = acc.add(&l.mul(&psi.value_inv(zi)));
        }
        Ok(acc)
    }

    /// log of tau_wp(psi-projection of x): the same weights on the
    /// tau-hat . z conjugates.
    pub fn log_psi_conj(&self, u: &FormalUnit) -> Result<Unramified, EngineError> {
        let psi = self.psi_character();
        let mut acc = Unramified::zero(&self.ctx);
        for &zi in &self.table.z {
            let g = self.table.mul[self.tau_wp_hat][zi];
            let l = self.log_conj_formal(u, g)?;
            acc = acc.add(&l.mul(&psi.value_inv(zi)));
        }
        Ok(acc)
    }

    fn unit_formal(&self) -> FormalUnit {
        FormalUnit {
            factors: vec![(self.spec.unit.clone(), Q::from_integer(BigInt::from(1)))],
        }
    }

    /// psi_g value at the packet's evaluation element, read off the honest
    /// representation matrix (diagonal entries for split primes).
    fn psi_g_pair(&self, pk: &PrimePacket) -> Result<(Unramified, Unramified), EngineError> {
        match self.rho_of_packet(pk)? {
            PacketRho::Unique(m) => Ok((m.e[0][0].clone(), m.e[1][1].clone())),
            PacketRho::Ambiguous(m, _) => Ok((m.e[0][0].clone(), m.e[1][1].clone())),
        }
    }

    /// eta pair (upper-right, lower-left) of the packet matrix at inert ell.
    fn eta_pair(&self, pk: &PrimePacket) -> Result<Vec<(Unramified, Unramified)>, EngineError> {
        match self.rho_of_packet(pk)? {
            PacketRho::Unique(m) => Ok(vec![(m.e[0][1].clone(), m.e[1][0].clone())]),
            PacketRho::Ambiguous(m1, m2) => Ok(vec![
                (m1.e[0][1].clone(), m1.e[1][0].clone()),
                (m2.e[0][1].clone(), m2.e[1][0].clone()),
            ]),
        }
    }

    /// K-side ell-unit of a split packet, normalised to K-norm ell, plus its
    /// conjugate (application of the distinguished reflection).
    fn split_unit_pair(&self, pk: &PrimePacket) -> Result<(FormalUnit, FormalUnit), EngineError> {
        let u = self.lambda_unit(pk)?; // H-norm ell
        // for an element of K, H-norm = K-norm^{[H:K]}; rescale so the K-norm
        // is ell: multiply the exponent by [H:K] = #Z
        let zn = self.table.z.len() as i64;
        let scale = Q::from_integer(BigInt::from(zn));
        let factors: Vec<(NFElement, Q)> =
            u.factors.iter().map(|(x, e)| (x.clone(), e * &scale)).collect();
        let conj_factors: Vec<(NFElement, Q)> = factors
            .iter()
            .map(|(x, e)| (self.spec.autos[self.tau_wp_hat].apply(x), e.clone()))
            .collect();
        Ok((
            FormalUnit { factors },
            FormalUnit {
                factors: conj_factors,
            },
        ))
    }

    /// ord-1 normalised lambda-unit of an inert packet.
    fn inert_unit(&self, pk: &PrimePacket) -> FormalUnit {
        FormalUnit {
            factors: vec![(pk.unit.clone(), pk.unit_exp.clone())],
        }
    }

    // ---- specialised formulas ----

    /// CM with p split in K: psi_g(lambda) log(u(lambda')) +
    /// psi_g(lambda') log(u(lambda)) at split ell; 0 at inert ell.
    pub fn a_ell_cm_split(&self, ell: u64) -> Result<CoefficientValue, EngineError> {
        if self.spec.kind != QuadKind::Cm
            || crate::quadclass::kronecker(self.spec.quad_disc, self.spec.p) != 1
        {
            return Err(EngineError::WrongSplitting);
        }
        let pk = self
            .spec
            .packets
            .get(&ell)
            .ok_or(EngineError::NoPacket(ell))?;
        if pk.split_type == SplitType::Inert {
            return Ok(CoefficientValue::Unique(Unramified::zero_to(
                &self.ctx,
                self.ctx.n as i64,
            )));
        }
        let (ul, ulp) = self.split_unit_pair(pk)?;
        let (pg, pgp) = self.psi_g_pair(pk)?;
        let l = self.log_conj_formal(&ul, 0)?;
        let lp = self.log_conj_formal(&ulp, 0)?;
        Ok(CoefficientValue::Unique(
            pg.mul(&lp).add(&pgp.mul(&l)),
        ))
    }

    /// CM with p inert in K, Theorem forms (a) and (b).
    pub fn a_ell_cm_inert(&self, ell: u64) -> Result<CoefficientValue, EngineError> {
        if self.spec.kind != QuadKind::Cm
            || crate::quadclass::kronecker(self.spec.quad_disc, self.spec.p) != -1
        {
            return Err(EngineError::WrongSplitting);
        }
        let pk = self
            .spec
            .packets
            .get(&ell)
            .ok_or(EngineError::NoPacket(ell))?;
        let uf = self.unit_formal();
        let lpsi = self.log_psi(&uf)?;
        let lpsip = self.log_psi_conj(&uf)?;
        let den = lpsip.sub(&lpsi);
        if den.is_zero() {
            return Err(EngineError::ZeroDenominator);
        }
        match pk.split_type {
            SplitType::Split => {
                // u_g(lambda) built from psi_g-weighted K-side ell-units
                let (ul, ulp) = self.split_unit_pair(pk)?;
                let (pg, pgp) = self.psi_g_pair(pk)?;
                let l = self.log_conj_formal(&ul, 0)?;
                let lp = self.log_conj_formal(&ulp, 0)?;
                let lug = pg.mul(&l).add(&pgp.mul(&lp));
                let lugp = pg.mul(&lp).add(&pgp.mul(&l));
                let num = lpsip.mul(&lug).sub(&lpsi.mul(&lugp));
                Ok(CoefficientValue::Unique(num.div(&den)?))
            }
            SplitType::Inert => {
                let ul = self.inert_unit(pk);
                let lul = self.log_psi(&ul)?;
                let lulp = self.log_psi_conj(&ul)?;
                let num = lpsip.mul(&lul).sub(&lpsi.mul(&lulp));
                let base = num.div(&den)?;
                let etas = self.eta_pair(pk)?;
                if etas.len() == 1 {
                    Ok(CoefficientValue::Unique(etas[0].1.mul(&base)))
                } else {
                    Ok(CoefficientValue::BothCandidates(
                        etas[0].1.mul(&base),
                        etas[1].1.mul(&base),
                    ))
                }
            }
        }
    }

    /// RM with p inert: (a) split ell: a_ell(g)/2 . log_p(ell);
    /// (b) inert ell: -(1/2)(eta log u_psi'(lambda) + eta' log u_psi(lambda)).
    pub fn a_ell_rm(&self, ell: u64) -> Result<CoefficientValue, EngineError> {
        if self.spec.kind != QuadKind::Rm {
            return Err(EngineError::WrongSplitting);
        }
        let pk = self
            .spec
            .packets
            .get(&ell)
            .ok_or(EngineError::NoPacket(ell))?;
        match pk.split_type {
            SplitType::Split => {
                let a_ell = self
                    .spec
                    .qexp
                    .get(&ell)
                    .map(|g| g.realize(&self.ctx))
                    .unwrap_or_else(|| {
                        // trace of the packet matrix
                        match self.rho_of_packet(pk) {
                            Ok(PacketRho::Unique(m)) => m.trace(),
                            _ => Unramified::zero(&self.ctx),
                        }
                    });
                let half = Unramified::from_rational(&self.ctx, &crate::exactalg::q_ratio(1, 2));
                Ok(CoefficientValue::Unique(
                    a_ell.mul(&half).mul(&self.log_p_of(ell)?),
                ))
            }
            SplitType::Inert => {
                let ul = self.inert_unit(pk);
                let lul = self.log_psi(&ul)?;
                let lulp = self.log_psi_conj(&ul)?;
                let half = Unramified::from_rational(&self.ctx, &crate::exactalg::q_ratio(1, 2));
                let etas = self.eta_pair(pk)?;
                let eval = |eta: &Unramified, etap: &Unramified| {
                    eta.mul(&lulp).add(&etap.mul(&lul)).mul(&half).neg()
                };
                if etas.len() == 1 {
                    Ok(CoefficientValue::Unique(eval(&etas[0].0, &etas[0].1)))
                } else {
                    Ok(CoefficientValue::BothCandidates(
                        eval(&etas[0].0, &etas[0].1),
                        eval(&etas[1].0, &etas[1].1),
                    ))
                }
            }
        }
    }

    /// Genus collapse for quadratic ring class characters: the coefficient is
    /// log_p(ell), 0 or -log_p(ell) according to psi_g(lambda) = 1, +-i, -1.
    pub fn a_ell_genus(&self, ell: u64) -> Result<CoefficientValue, EngineError> {
        let psi = self.psi_character();
        // genus case: psi is quadratic
        let quadratic = self
            .table
            .z
            .iter()
            .all(|&zi| (2 * psi.exponents[zi]).rem_euclid(psi.order as i64) == 0);
        if !quadratic {
            return Err(EngineError::NotGenusCase);
        }
        let pk = self
            .spec
            .packets
            .get(&ell)
            .ok_or(EngineError::NoPacket(ell))?;
        if pk.split_type != SplitType::Split {
            return Err(EngineError::WrongSplitting);
        }
        let (pg, pgp) = self.psi_g_pair(pk)?;
        let logp = self.log_p_of(ell)?;
        let half = Unramified::from_rational(&self.ctx, &crate::exactalg::q_ratio(1, 2));
        // (psi_g(lambda) + psi_g(lambda'))/2 is 1, 0 or -1 in the three cases
        Ok(CoefficientValue::Unique(
            pg.add(&pgp).mul(&half).mul(&logp),
        ))
    }
}

/// Choose the representation model: honest dihedral matrices when the full
/// representation factors through G, projective lifts otherwise (packets
/// then carry the honest matrices).
pub fn build_rep_model(
    spec: &ProblemSpec,
    table: &GroupTable,
    zeta_m: &Unramified,
    ctx: &Arc<PadicContext>,
) -> Result<RepModel, EngineError> {
    let any_explicit = spec.packets.values().any(|p| p.rho.is_some());
    if !any_explicit {
        return dihedral_model(spec, table, zeta_m, ctx).ok_or(EngineError::ZeroProjection);
    }
    // projective model from the ratio character psi = psi_g^2
    let psi = Character {
        order: spec.zeta_order,
        exponents: spec
            .psi_exps
            .iter()
            .map(|e| e * (spec.zeta_order / spec.psi_order) as i64)
            .collect(),
        zeta: zeta_m.clone(),
    };
    let (tau0, _) = crate::ingest::distinguished_reflection(spec, table, ctx)
        .ok_or(EngineError::ZeroProjection)?;
    // lift: diag(d, 1/d) with d^2 = psi(z)
    let mut mats = vec![Mat2::identity(ctx); table.n];
    for &zi in &table.z {
        let e = psi.exponents[zi].rem_euclid(psi.order as i64);
        // d = zeta_m^{e/2} if e even, else a square root via doubled order
        let d = if e % 2 == 0 {
            zeta_m.pow_i64(e / 2)?
        } else {
            let z2 = zeta(ctx, 2 * spec.zeta_order)?;
            z2.pow_i64(e)?
        };
        mats[zi] = Mat2::diag(&d, &d.inv()?);
    }
    let one = Unramified::one(ctx);
    let w = Mat2::antidiag(&one, &one);
    for &zi in &table.z {
        mats[table.mul[zi][tau0]] = mats[zi].mul(&w);
    }
    Ok(RepModel {
        matrices: mats,
        honest: false,
    })
}

/// Deterministic eigenbasis of the evaluation matrix at p: eigenvalues are
/// found among roots of unity (times the lift scalar), eigenvectors sorted
/// deterministically, and the stabilization flag selects which one is
/// v_alpha.
fn eigenbasis(
    m: &Mat2,
    spec: &ProblemSpec,
    _zeta_m: &Unramified,
    ctx: &Arc<PadicContext>,
) -> Result<(Mat2, Mat2), EngineError> {
    let n = ctx.n as i64;
    let tr = m.trace();
    let det = m.det();
    // eigenvalues among c * zeta^(k/2): search the doubled cyclotomic group
    let z2 = zeta(ctx, 2 * spec.zeta_order).or_else(|_| zeta(ctx, spec.zeta_order))?;
    let order = {
        let mut o = 1u64;
        let one = Unramified::one(ctx);
        let mut cur = z2.clone();
        while !cur.eq_to(&one, n) {
            cur = cur.mul(&z2);
            o += 1;
        }
        o
    };
    let mut eigs: Vec<Unramified> = Vec::new();
    for k in 0..order {
        let cand = z2.pow_i64(k as i64)?;
        let v = cand.mul(&cand).sub(&cand.mul(&tr)).add(&det);
        if v.is_zero() || v.val >= n - 1 {
            if !eigs.iter().any(|e| e.eq_to(&cand, n - 1)) {
                eigs.push(cand);
            }
        }
    }
    if eigs.len() != 2 {
        return Err(EngineError::IrregularAtP);
    }
    // deterministic order: compare coordinate strings
    eigs.sort_by_key(|e| {
        e.unit_coords()
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
    });
    let (alpha, beta) = if spec.stabilization == 1 {
        (eigs[0].clone(), eigs[1].clone())
    } else {
        (eigs[1].clone(), eigs[0].clone())
    };
    let vec_of = |lam: &Unramified| -> (Unramified, Unramified) {
        let a = m.e[0][1].clone();
        let b = lam.sub(&m.e[0][0]);
        if !a.is_zero() && a.val < n - 2 || !b.is_zero() && b.val < n - 2 {
            (a, b)
        } else {
            (lam.sub(&m.e[1][1]), m.e[1][0].clone())
        }
    };
    let va = vec_of(&alpha);
    let vb = vec_of(&beta);
    let basis = Mat2::new(va.0, vb.0, va.1, vb.1);
    let basis_inv = basis.inv()?;
    Ok((basis, basis_inv))
}
