//! Commutator algebra for operators affine in the initial canonical pair.
//!
//! Every operator the engine handles is a real linear combination
//! `a_q·q(0) + a_p·p(0) + a_cl·q_cl(0) + a_1·1 + a_m·m`, where the photon
//! mass `m` is a classical scalar. Commutators of such operators are
//! c-numbers: `[X, Y] = iħ·chi` with `chi(q(0), p(0)) = +1`, i.e.
//! `[p, q] = -iħ`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Physical constants in scaled units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysConstants {
    pub hbar: f64,
    pub c: f64,
    pub g: f64,
}

impl PhysConstants {
    /// `hbar` and `c` must be positive; `g` may be zero to switch the
    /// gravitational coupling off.
    pub fn new(hbar: f64, c: f64, g: f64) -> Result<Self> {
        let consts = Self { hbar, c, g };
        consts.validate()?;
        Ok(consts)
    }

    /// `ħ = c = g = 1`.
    pub fn unit() -> Self {
        Self {
            hbar: 1.0,
            c: 1.0,
            g: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("constants.hbar", self.hbar)?;
        positive("constants.c", self.c)?;
        if !self.g.is_finite() || self.g < 0.0 {
            return Err(Error::invalid_param(
                "constants.g",
                "must be finite and >= 0",
            ));
        }
        Ok(())
    }

    /// The clock coupling `g/c²`.
    pub fn clock_coupling(&self) -> f64 {
        self.g / (self.c * self.c)
    }
}

/// External potential acting on the box centre of mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Potential {
    /// `V' = 0`: the box moves under gravity alone.
    Free,
    /// `V = k q² / 2`: the box hangs from a spring.
    Harmonic { k: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxParams {
    /// Box mass.
    #[serde(rename = "M")]
    pub mass: f64,
    /// Photon mass, a classical parameter.
    #[serde(rename = "m")]
    pub photon_mass: f64,
    pub potential: Potential,
}

impl BoxParams {
    pub fn new(mass: f64, photon_mass: f64, potential: Potential) -> Result<Self> {
        let params = Self {
            mass,
            photon_mass,
            potential,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn free(mass: f64, photon_mass: f64) -> Result<Self> {
        Self::new(mass, photon_mass, Potential::Free)
    }

    pub fn harmonic(mass: f64, photon_mass: f64, k: f64) -> Result<Self> {
        Self::new(mass, photon_mass, Potential::Harmonic { k })
    }

    pub fn validate(&self) -> Result<()> {
        positive("box.M", self.mass)?;
        if !self.photon_mass.is_finite() || self.photon_mass < 0.0 {
            return Err(Error::invalid_param("box.m", "must be finite and >= 0"));
        }
        if self.photon_mass >= self.mass {
            return Err(Error::invalid_param("box.m", "must be smaller than box.M"));
        }
        if let Potential::Harmonic { k } = self.potential {
            positive("box.potential.k", k)?;
        }
        Ok(())
    }

    /// Spring constant, zero under free fall.
    pub fn spring(&self) -> f64 {
        match self.potential {
            Potential::Free => 0.0,
            Potential::Harmonic { k } => k,
        }
    }

    /// Angular frequency `sqrt(k/M)`, `None` under free fall.
    pub fn omega(&self) -> Option<f64> {
        match self.potential {
            Potential::Free => None,
            Potential::Harmonic { k } => Some((k / self.mass).sqrt()),
        }
    }
}

fn positive(field: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid_param(field, "must be finite and > 0"))
    }
}

/// Coefficients of an operator over `{q(0), p(0), q_cl(0), 1, m}`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct OperatorCoeffs {
    pub a_q: f64,
    pub a_p: f64,
    pub a_cl: f64,
    pub a_1: f64,
    pub a_m: f64,
}

impl OperatorCoeffs {
    pub const ZERO: Self = Self {
        a_q: 0.0,
        a_p: 0.0,
        a_cl: 0.0,
        a_1: 0.0,
        a_m: 0.0,
    };

    pub const fn new(a_q: f64, a_p: f64, a_cl: f64, a_1: f64, a_m: f64) -> Self {
        Self {
            a_q,
            a_p,
            a_cl,
            a_1,
            a_m,
        }
    }

    /// `q(0)`
    pub const fn q() -> Self {
        Self::new(1.0, 0.0, 0.0, 0.0, 0.0)
    }

    /// `p(0)`
    pub const fn p() -> Self {
        Self::new(0.0, 1.0, 0.0, 0.0, 0.0)
    }

    /// `q_cl(0)`
    pub const fn q_cl() -> Self {
        Self::new(0.0, 0.0, 1.0, 0.0, 0.0)
    }

    pub const fn identity() -> Self {
        Self::new(0.0, 0.0, 0.0, 1.0, 0.0)
    }

    /// The photon-mass parameter as an operator slot.
    pub const fn mass() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0, 1.0)
    }

    pub fn to_array(self) -> [f64; 5] {
        [self.a_q, self.a_p, self.a_cl, self.a_1, self.a_m]
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4])
    }

    pub fn scale(self, w: f64) -> Self {
        Self::from_array(self.to_array().map(|x| w * x))
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }

    /// Coefficients on the non-commuting pair `(q(0), p(0))`.
    pub fn canonical_part(&self) -> (f64, f64) {
        (self.a_q, self.a_p)
    }
}

impl std::ops::Add for OperatorCoeffs {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let (a, b) = (self.to_array(), rhs.to_array());
        Self::from_array(std::array::from_fn(|i| a[i] + b[i]))
    }
}

impl std::ops::Sub for OperatorCoeffs {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self + rhs.scale(-1.0)
    }
}

/// `[X, Y] = iħ·chi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CommutatorValue {
    pub chi: f64,
}

impl CommutatorValue {
    pub const fn new(chi: f64) -> Self {
        Self { chi }
    }
}

/// Exact commutator coefficient. Only the `q(0)`, `p(0)` slots contribute.
pub fn commutator(x: &OperatorCoeffs, y: &OperatorCoeffs) -> CommutatorValue {
    CommutatorValue::new(x.a_q * y.a_p - x.a_p * y.a_q)
}

pub fn linear_combine<'a, I>(terms: I) -> OperatorCoeffs
where
    I: IntoIterator<Item = (f64, &'a OperatorCoeffs)>,
{
    terms
        .into_iter()
        .fold(OperatorCoeffs::ZERO, |acc, (w, x)| acc + x.scale(w))
}

/// Expectation of `x` given first moments `(μ_q, μ_p, μ_cl)` and mass `m`.
pub fn mean_of(x: &OperatorCoeffs, mu: [f64; 3], m: f64) -> f64 {
    x.a_q * mu[0] + x.a_p * mu[1] + x.a_cl * mu[2] + x.a_1 + x.a_m * m
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_pair() {
        assert_eq!(
            commutator(&OperatorCoeffs::q(), &OperatorCoeffs::p()).chi,
            1.0
        );
        assert_eq!(
            commutator(&OperatorCoeffs::p(), &OperatorCoeffs::q()).chi,
            -1.0
        );
        assert_eq!(
            commutator(&OperatorCoeffs::p(), &OperatorCoeffs::q_cl()).chi,
            0.0
        );
    }

    #[test]
    fn bilinear_expansion_example() {
        let q = OperatorCoeffs::q();
        let p = OperatorCoeffs::p();
        let x = linear_combine([(2.0, &q), (3.0, &p)]);
        let y = p - q;
        // term by term: 2·(-1)·[q,q] + 2·1·[q,p] + 3·(-1)·[p,q] + 3·1·[p,p]
        let expanded = 2.0 * -1.0 * 0.0 + 2.0 * 1.0 * 1.0 + 3.0 * -1.0 * -1.0 + 3.0 * 1.0 * 0.0;
        assert_eq!(commutator(&x, &y).chi, expanded);
        assert_eq!(expanded, 5.0);
    }

    #[test]
    fn linear_combine_cases() {
        let q = OperatorCoeffs::q();
        let p = OperatorCoeffs::p();
        assert_eq!(linear_combine([(1.0, &q), (0.0, &p)]), q);
        assert_eq!(
            linear_combine([(2.0, &q), (-2.0, &q)]),
            OperatorCoeffs::ZERO
        );
        let plus = q + p;
        let minus = q - p;
        assert_eq!(linear_combine([(0.5, &plus), (0.5, &minus)]), q);
        assert_eq!(linear_combine(std::iter::empty()), OperatorCoeffs::ZERO);
    }

    #[test]
    fn means() {
        assert_eq!(mean_of(&OperatorCoeffs::q(), [3.0, 0.0, 0.0], 1.0), 3.0);
        assert_eq!(
            mean_of(&OperatorCoeffs::identity(), [7.0, -2.0, 4.0], 9.0),
            1.0
        );
        // free-fall momentum p(0) - g·t·m with g = 1, t = 2
        let p_t = OperatorCoeffs::new(0.0, 1.0, 0.0, 0.0, -2.0);
        assert_eq!(mean_of(&p_t, [0.0, 5.0, 0.0], 1.0), 3.0);
    }

    #[test]
    fn parameter_validation() {
        assert!(PhysConstants::new(1.0, 1.0, 0.0).is_ok());
        assert!(PhysConstants::new(0.0, 1.0, 1.0).is_err());
        assert!(PhysConstants::new(1.0, f64::NAN, 1.0).is_err());
        assert!(BoxParams::free(1000.0, 1.0).is_ok());
        assert!(BoxParams::free(1.0, 1.0).is_err());
        assert!(BoxParams::free(10.0, -1.0).is_err());
        let err = BoxParams::harmonic(1000.0, 1.0, 0.0).unwrap_err();
        assert!(err.to_string().contains("box.potential.k"));
        assert_eq!(
            BoxParams::harmonic(1000.0, 1.0, 1000.0).unwrap().omega(),
            Some(1.0)
        );
    }

    fn coeffs() -> impl Strategy<Value = OperatorCoeffs> {
        prop::array::uniform5(-100.0f64..100.0).prop_map(OperatorCoeffs::from_array)
    }

    proptest! {
        #[test]
        fn antisymmetry(x in coeffs(), y in coeffs()) {
            prop_assert_eq!(commutator(&x, &y).chi, -commutator(&y, &x).chi);
        }

        #[test]
        fn bilinearity(x in coeffs(), y in coeffs(), z in coeffs(), a in -10.0f64..10.0, b in -10.0f64..10.0) {
            let lhs = commutator(&linear_combine([(a, &x), (b, &y)]), &z).chi;
            let rhs = a * commutator(&x, &z).chi + b * commutator(&y, &z).chi;
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs().max(lhs.abs())));
        }

        #[test]
        fn central_elements_commute(x in coeffs(), cl in -10.0f64..10.0, one in -10.0f64..10.0, m in -10.0f64..10.0) {
            let central = OperatorCoeffs::new(0.0, 0.0, cl, one, m);
            prop_assert_eq!(commutator(&central, &x).chi, 0.0);
            prop_assert_eq!(commutator(&x, &central).chi, 0.0);
        }
    }
}
