//! The irregular-setting engine: averaged adjoint-valued unit vectors w(1)
//! and w(ell), their bracket, generalised-eigenform coefficients as
//! trilinear determinants, and the canonical CM/RM bases with regulators.

use crate::exactalg::{NFElement, Q};
use crate::galoisdata::{bracket, conj_action, det3, pairing, zeta, Character, GroupTable, Mat2};
use crate::ingest::{packet_rho, PacketRho, PrimePacket, ProblemSpec, QuadKind, SplitType,
    ValidatedSpec};
use crate::padics::{PadicContext, PadicEmbedding, Unramified};
use crate::regular_deform::{build_rep_model, CoefficientValue, EngineError, FormalUnit};
use num_bigint::BigInt;
use std::sync::Arc;

pub struct IrregularEngine<'a> {
    pub spec: &'a ProblemSpec,
    pub ctx: Arc<PadicContext>,
    pub table: GroupTable,
    pub zeta_m: Unramified,
    pub rho: crate::galoisdata::RepModel,
    pub embeddings: Vec<PadicEmbedding>,
    /// distinguished reflection used in the psi-projections
    pub tau0: usize,
    pub w1: Mat2,
}

impl<'a> IrregularEngine<'a> {
    pub fn new(validated: &'a ValidatedSpec) -> Result<Self, EngineError> {
        let spec = &validated.spec;
        if spec.regular {
            return Err(EngineError::WrongSplitting);
        }
        let ctx = PadicContext::new(spec.p, spec.f, spec.precision, spec.modulus.clone());
        let table = GroupTable::build(&spec.autos, spec.z_indices.clone(), Some(&spec.sqrt_disc))
            .expect("validated spec has a group");
        let zeta_m = zeta(&ctx, spec.zeta_order)?;
        let embeddings = PadicEmbedding::all(&ctx, &spec.field)?;
        let rho = build_rep_model(spec, &table, &zeta_m, &ctx)?;
        let tau0 = (0..table.n)
            .find(|i| !table.in_z(*i))
            .ok_or(EngineError::ZeroProjection)?;
        let mut engine = IrregularEngine {
            spec,
            ctx,
            table,
            zeta_m,
            rho,
            embeddings,
            tau0,
            w1: Mat2::zero(&PadicContext::base(3, 1)),
        };
        engine.w1 = engine.build_w1()?;
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
            acc = acc.add(&l.mul(&Unramified::from_rational(&self.ctx, e)));
        }
        Ok(acc)
    }

    /// xi_wp(u, w) = (1/#G) sum over G of log_wp(sigma u) . (sigma . w).
    pub fn xi(&self, u: &FormalUnit, w: &Mat2) -> Result<Mat2, EngineError> {
        let mut acc = Mat2::zero(&self.ctx);
        for g in 0..self.table.n {
            let l = self.log_conj_formal(u, g)?;
            acc = acc.add(&conj_action(&self.rho.matrices, g, w).scale(&l));
        }
        let inv_n = Unramified::from_rational(
            &self.ctx,
            &Q::new(BigInt::from(1), BigInt::from(self.table.n as i64)),
        );
        Ok(acc.scale(&inv_n))
    }

    /// Generator of the one-dimensional image line of xi_wp on units.
    pub fn build_w1(&self) -> Result<Mat2, EngineError> {
        let one = Unramified::one(&self.ctx);
        let z = Unramified::zero(&self.ctx);
        let seeds = [
            Mat2::new(z.clone(), one.clone(), z.clone(), z.clone()),
            Mat2::new(z.clone(), z.clone(), one.clone(), z.clone()),
            Mat2::diag(&one, &one.neg()),
        ];
        let u = FormalUnit {
            factors: vec![(self.spec.unit.clone(), Q::from_integer(BigInt::from(1)))],
        };
        let threshold = self.ctx.n as i64 - 6;
        for seed in &seeds {
            let w = self.xi(&u, seed)?;
            if w.min_val() < threshold {
                return Ok(w);
            }
        }
        Err(EngineError::ZeroProjection)
    }

    fn inert_unit(pk: &PrimePacket) -> FormalUnit {
        FormalUnit {
            factors: vec![(pk.unit.clone(), pk.unit_exp.clone())],
        }
    }

    /// w(ell) = xi_wp(u_lambda, w_lambda) with w_lambda the trace-zero part
    /// of the packet's frobenius matrix.  Exactly zero at irregular ell.
    pub fn build_w_ell(&self, ell: u64) -> Result<Mat2, EngineError> {
        let pk = self
            .spec
            .packets
            .get(&ell)
            .ok_or(EngineError::NoPacket(ell))?;
        let rho_l = match packet_rho(self.spec, &self.table, &self.zeta_m, pk, &self.ctx)
            .ok_or(EngineError::ZeroProjection)?
        {
            PacketRho::Unique(m) => m,
            PacketRho::Ambiguous(m, _) => m,
        };
        let w_lambda = rho_l.trace_zero_part();
        if w_lambda.min_val() >= self.ctx.n as i64 - 2 {
            // irregular at ell: scalar frobenius
            return Ok(Mat2::zero(&self.ctx));
        }
        let u = Self::inert_unit(pk);
        self.xi(&u, &w_lambda)
    }

    /// frak W(ell) = [w(1), w(ell)]; independent of the lambda-choice and of
    /// translating w(ell) by multiples of w(1).
    pub fn frak_w(&self, ell: u64) -> Result<Mat2, EngineError> {
        let wl = self.build_w_ell(ell)?;
        Ok(bracket(&self.w1, &wl))
    }

    /// a_ell of the generalised eigenform attached to w:
    /// det(w, w(1), w(ell)) = <w, frak W(ell)>.
    pub fn a_ell_flat(&self, w: &Mat2, ell: u64) -> Result<Unramified, EngineError> {
        let wl = self.build_w_ell(ell)?;
        Ok(det3(w, &self.w1, &wl)?)
    }

    fn psi_character(&self) -> Character {
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

    pub fn log_psi(&self, u: &FormalUnit) -> Result<Unramified, EngineError> {
        let psi = self.psi_character();
        let mut acc = Unramified::zero(&self.ctx);
        for &zi in &self.table.z {
            let l = self.log_conj_formal(u, zi)?;
            acc = acc.add(&l.mul(&psi.value_inv(zi)));
        }
        Ok(acc)
    }

    pub fn log_psi_conj(&self, u: &FormalUnit) -> Result<Unramified, EngineError> {
        let psi = self.psi_character();
        let mut acc = Unramified::zero(&self.ctx);
        for &zi in &self.table.z {
            let g = self.table.mul[self.tau0][zi];
            let l = self.log_conj_formal(u, g)?;
            acc = acc.add(&l.mul(&psi.value_inv(zi)));
        }
        Ok(acc)
    }

    /// The ell-unit regulator R_psi(ell): determinant of the 2x2 matrix of
    /// psi-projected logs of the unit and the ell-unit.
    pub fn regulator(&self, ell: u64) -> Result<Unramified, EngineError> {
        let pk = self
            .spec
            .packets
            .get(&ell)
            .ok_or(EngineError::NoPacket(ell))?;
        if pk.split_type != SplitType::Inert {
            return Err(EngineError::WrongSplitting);
        }
        let uf = FormalUnit {
            factors: vec![(self.spec.unit.clone(), Q::from_integer(BigInt::from(1)))],
        };
        let lu = self.log_psi(&uf)?;
        let lut = self.log_psi_conj(&uf)?;
        let ul = Self::inert_unit(pk);
        let ll = self.log_psi(&ul)?;
        let llt = self.log_psi_conj(&ul)?;
        Ok(lu.mul(&llt).sub(&lut.mul(&ll)))
    }

    /// Canonical-basis coefficients (g_1-flat, g_2-flat) in the CM case:
    /// split ell -> ((psi_g(lambda) - psi_g(lambda')) log(u_l/u_l'), 0);
    /// inert ell -> (0, R_psi(ell)).
    pub fn cm_irregular_coeffs(
        &self,
        ell: u64,
    ) -> Result<(CoefficientValue, CoefficientValue), EngineError> {
        if self.spec.kind != QuadKind::Cm {
            return Err(EngineError::WrongSplitting);
        }
        let pk = self
            .spec
            .packets
            .get(&ell)
            .ok_or(EngineError::NoPacket(ell))?;
        let zero = Unramified::zero(&self.ctx);
        match pk.split_type {
            SplitType::Inert => Ok((
                CoefficientValue::Unique(zero),
                CoefficientValue::Unique(self.regulator(ell)?),
            )),
            SplitType::Split => {
                let rho_l = match packet_rho(self.spec, &self.table, &self.zeta_m, pk, &self.ctx)
                    .ok_or(EngineError::ZeroProjection)?
                {
                    PacketRho::Unique(m) => m,
                    PacketRho::Ambiguous(m, _) => m,
                };
                let diff = rho_l.e[0][0].sub(&rho_l.e[1][1]); // psi_g(l) - psi_g(l')
                if diff.is_zero() || diff.val >= self.ctx.n as i64 - 2 {
                    // irregular at ell
                    return Ok((
                        CoefficientValue::Unique(zero.clone()),
                        CoefficientValue::Unique(zero),
                    ));
                }
                // log(u_lambda / u_lambda'), ord-1 normalised
                let ul = Self::inert_unit(pk);
                let l = self.log_conj_formal(&ul, 0)?;
                let conj: Vec<(NFElement, Q)> = ul
                    .factors
                    .iter()
                    .map(|(x, e)| (self.spec.autos[self.tau0].apply(x), e.clone()))
                    .collect();
                let lp = self.log_conj_formal(&FormalUnit { factors: conj }, 0)?;
                Ok((
                    CoefficientValue::Unique(diff.mul(&l.sub(&lp))),
                    CoefficientValue::Unique(zero),
                ))
            }
        }
    }

    /// Canonical-basis coefficients in the RM case: (0, 0) at split ell;
    /// (log u_psi(ell), log u_psi'(ell)) at inert ell.
    pub fn rm_irregular_coeffs(
        &self,
        ell: u64,
    ) -> Result<(CoefficientValue, CoefficientValue), EngineError> {
        if self.spec.kind != QuadKind::Rm {
            return Err(EngineError::WrongSplitting);
        }
        let pk = self
            .spec
            .packets
            .get(&ell)
            .ok_or(EngineError::NoPacket(ell))?;
        let zero = Unramified::zero(&self.ctx);
        match pk.split_type {
            SplitType::Split => Ok((
                CoefficientValue::Unique(zero.clone()),
                CoefficientValue::Unique(zero),
            )),
            SplitType::Inert => {
                let ul = Self::inert_unit(pk);
                Ok((
                    CoefficientValue::Unique(self.log_psi(&ul)?),
                    CoefficientValue::Unique(self.log_psi_conj(&ul)?),
                ))
            }
        }
    }

    /// Pairing helper for tests: <A, B>.
    pub fn pair(&self, a: &Mat2, b: &Mat2) -> Unramified {
        pairing(a, b)
    }
}
