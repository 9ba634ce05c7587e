//! Quaternion algebra on H = R^4 with basis (1, i, j, k).

use std::fmt;
use std::ops::{Mul, Neg};

use nalgebra::{Matrix4, Vector4};
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::{cospi, sinpi, Rational};
use crate::tolerance::{eps, UNIT_RENORM_TOL};

/// `a + b i + c j + d k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Quaternion {
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Quaternion { a, b, c, d }
    }

    pub fn from_vector(v: &Vector4<f64>) -> Self {
        Quaternion::new(v[0], v[1], v[2], v[3])
    }

    pub fn to_vector(self) -> Vector4<f64> {
        Vector4::new(self.a, self.b, self.c, self.d)
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Real part.
    pub fn re(self) -> f64 {
        self.a
    }

    pub fn conj(self) -> Self {
        Quaternion::new(self.a, -self.b, -self.c, -self.d)
    }

    pub fn norm_squared(self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Quaternion::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn distance(self, other: Self) -> f64 {
        (self.to_vector() - other.to_vector()).norm()
    }

    /// Matrix of `x -> self * x` on the basis (1, i, j, k).
    pub fn left_matrix(self) -> Matrix4<f64> {
        let Quaternion { a, b, c, d } = self;
        Matrix4::new(
            a, -b, -c, -d, //
            b, a, -d, c, //
            c, d, a, -b, //
            d, -c, b, a,
        )
    }

    /// Matrix of `x -> x * self` on the basis (1, i, j, k).
    pub fn right_matrix(self) -> Matrix4<f64> {
        let Quaternion { a, b, c, d } = self;
        Matrix4::new(
            a, -b, -c, -d, //
            b, a, d, -c, //
            c, -d, a, b, //
            d, c, -b, a,
        )
    }
}

/// Hamilton product.
pub fn qmul(p: Quaternion, q: Quaternion) -> Quaternion {
    Quaternion::new(
        p.a * q.a - p.b * q.b - p.c * q.c - p.d * q.d,
        p.a * q.b + p.b * q.a + p.c * q.d - p.d * q.c,
        p.a * q.c - p.b * q.d + p.c * q.a + p.d * q.b,
        p.a * q.d + p.b * q.c - p.c * q.b + p.d * q.a,
    )
}

pub fn qconj(q: Quaternion) -> Quaternion {
    q.conj()
}

pub fn qre(q: Quaternion) -> f64 {
    q.re()
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, rhs: Quaternion) -> Quaternion {
        qmul(self, rhs)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        self.scale(-1.0)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {})",
            fmt_real(self.a),
            fmt_real(self.b),
            fmt_real(self.c),
            fmt_real(self.d)
        )
    }
}

/// Stable decimal rendering used in reports: 12 fractional digits, no `-0`.
pub fn fmt_real(x: f64) -> String {
    let x = if x.abs() < 5e-13 { 0.0 } else { x };
    format!("{x:.12}")
}

/// A quaternion of norm one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitQuaternion(Quaternion);

impl UnitQuaternion {
    pub const ONE: UnitQuaternion = UnitQuaternion(Quaternion::ONE);
    pub const I: UnitQuaternion = UnitQuaternion(Quaternion::I);
    pub const J: UnitQuaternion = UnitQuaternion(Quaternion::J);
    pub const K: UnitQuaternion = UnitQuaternion(Quaternion::K);

    /// Renormalizes when `|norm - 1| <= 1e-6`, rejects otherwise.
    pub fn new(q: Quaternion) -> Result<Self> {
        let n = q.norm();
        if !n.is_finite() || (n - 1.0).abs() > UNIT_RENORM_TOL {
            return Err(Error::NotUnit { norm: n });
        }
        Ok(UnitQuaternion(q.scale(1.0 / n)))
    }

    pub fn from_components(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(Quaternion::new(a, b, c, d))
    }

    pub fn quaternion(self) -> Quaternion {
        self.0
    }

    pub fn re(self) -> f64 {
        self.0.a
    }

    pub fn conj(self) -> Self {
        UnitQuaternion(self.0.conj())
    }

    /// For unit quaternions the inverse is the conjugate.
    pub fn inverse(self) -> Self {
        self.conj()
    }

    pub fn pow(self, n: u32) -> Self {
        (0..n).fold(UnitQuaternion::ONE, |acc, _| acc * self)
    }

    /// Multiplicative order, up to `cap`.
    pub fn order(self, cap: usize) -> Option<usize> {
        let mut acc = self;
        for n in 1..=cap {
            if acc.0.distance(Quaternion::ONE) <= eps() {
                return Some(n);
            }
            acc = acc * self;
        }
        None
    }
}

impl Neg for UnitQuaternion {
    type Output = UnitQuaternion;

    fn neg(self) -> UnitQuaternion {
        UnitQuaternion(-self.0)
    }
}

/// Product, renormalized to absorb rounding drift.
impl Mul for UnitQuaternion {
    type Output = UnitQuaternion;

    fn mul(self, other: UnitQuaternion) -> UnitQuaternion {
        let p = qmul(self.0, other.0);
        UnitQuaternion(p.scale(p.norm().recip()))
    }
}

impl fmt::Display for UnitQuaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Whether `z` and `y` are conjugate in the multiplicative group of H.
///
/// Unit quaternions are conjugate exactly when their real parts agree.
pub fn conjugate_in_hx(z: UnitQuaternion, y: UnitQuaternion) -> bool {
    (z.re() - y.re()).abs() <= eps()
}

/// Same as [`conjugate_in_hx`] for raw quaternions; rejects non-unit input.
pub fn conjugate_in_hx_checked(z: Quaternion, y: Quaternion) -> Result<bool> {
    for q in [z, y] {
        if (q.norm() - 1.0).abs() > eps() {
            return Err(Error::NotUnit { norm: q.norm() });
        }
    }
    Ok((z.re() - y.re()).abs() <= eps())
}

/// A unit quaternion drawn uniformly from the 3-sphere.
pub fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> UnitQuaternion {
    loop {
        let q = Quaternion::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = q.norm();
        if n > 0.1 && n <= 1.0 {
            return UnitQuaternion(q.scale(1.0 / n));
        }
    }
}

/// `cos(pi t) + sin(pi t) i`.
pub fn exp_pi_i(t: Rational) -> UnitQuaternion {
    UnitQuaternion(Quaternion::new(cospi(t), sinpi(t), 0.0, 0.0))
}

/// Convenience wrapper for `exp_pi_i(num/den)`.
pub fn exp_pi_i_frac(num: i64, den: i64) -> UnitQuaternion {
    exp_pi_i(Rational::new(num, den).expect("nonzero denominator"))
}

/// The quaternions with conventional names.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedConstant {
    One,
    I,
    J,
    K,
    /// `(-1 + i + j + k)/2`, order 3.
    Omega,
    /// `(j + k)/sqrt 2`.
    IO,
    /// `(i + ((sqrt5-1)/2) j + ((sqrt5+1)/2) k)/2`.
    II,
    /// `(-((sqrt5-1)/2) i - ((sqrt5+1)/2) j + k)/2`.
    IIPrime,
    /// `(1 + i)/sqrt 2`, a primitive 8th root of unity.
    Zeta8,
}

impl NamedConstant {
    pub const ALL: [NamedConstant; 9] = [
        NamedConstant::One,
        NamedConstant::I,
        NamedConstant::J,
        NamedConstant::K,
        NamedConstant::Omega,
        NamedConstant::IO,
        NamedConstant::II,
        NamedConstant::IIPrime,
        NamedConstant::Zeta8,
    ];

    /// Accepts the canonical names and the short keywords used in element strings.
    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "one" | "1" => NamedConstant::One,
            "i" => NamedConstant::I,
            "j" => NamedConstant::J,
            "k" => NamedConstant::K,
            "omega" | "w" => NamedConstant::Omega,
            "iO" => NamedConstant::IO,
            "iI" => NamedConstant::II,
            "iIp" => NamedConstant::IIPrime,
            "zeta8" | "z8" => NamedConstant::Zeta8,
            _ => return Err(Error::UnknownConstant(name.to_string())),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            NamedConstant::One => "one",
            NamedConstant::I => "i",
            NamedConstant::J => "j",
            NamedConstant::K => "k",
            NamedConstant::Omega => "omega",
            NamedConstant::IO => "iO",
            NamedConstant::II => "iI",
            NamedConstant::IIPrime => "iIp",
            NamedConstant::Zeta8 => "zeta8",
        }
    }

    pub fn value(self) -> UnitQuaternion {
        let s5 = 5f64.sqrt();
        let q = match self {
            NamedConstant::One => Quaternion::ONE,
            NamedConstant::I => Quaternion::I,
            NamedConstant::J => Quaternion::J,
            NamedConstant::K => Quaternion::K,
            NamedConstant::Omega => Quaternion::new(-0.5, 0.5, 0.5, 0.5),
            NamedConstant::IO => {
                let r = std::f64::consts::FRAC_1_SQRT_2;
                Quaternion::new(0.0, 0.0, r, r)
            }
            NamedConstant::II => Quaternion::new(0.0, 0.5, (s5 - 1.0) / 4.0, (s5 + 1.0) / 4.0),
            NamedConstant::IIPrime => {
                Quaternion::new(0.0, -(s5 - 1.0) / 4.0, -(s5 + 1.0) / 4.0, 0.5)
            }
            NamedConstant::Zeta8 => return exp_pi_i_frac(1, 4),
        };
        UnitQuaternion::new(q).expect("named constants are unit")
    }
}

/// Look up a named constant by name.
pub fn named_constant(name: &str) -> Result<UnitQuaternion> {
    NamedConstant::from_name(name).map(NamedConstant::value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(p: Quaternion, q: Quaternion, tol: f64) -> bool {
        p.distance(q) <= tol
    }

    fn random_quaternion(rng: &mut impl Rng) -> Quaternion {
        Quaternion::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        )
    }

    #[test]
    fn hamilton_relations() {
        let (i, j, k) = (Quaternion::I, Quaternion::J, Quaternion::K);
        assert_eq!(i * j, k);
        assert_eq!(j * k, i);
        assert_eq!(k * i, j);
        assert_eq!(j * i, -k);
        assert_eq!(i * i, -Quaternion::ONE);
        assert_eq!(i * j * k, -Quaternion::ONE);
    }

    #[test]
    fn omega_cubed_is_one() {
        let w = NamedConstant::Omega.value().quaternion();
        assert!(close(w * w * w, Quaternion::ONE, 1e-15));
    }

    #[test]
    fn i_o_squared_is_minus_one() {
        let q = NamedConstant::IO.value().quaternion();
        assert!(close(q * q, -Quaternion::ONE, 1e-15));
    }

    #[test]
    fn conj_and_re() {
        assert_eq!(qre(NamedConstant::Omega.value().quaternion()), -0.5);
        assert_eq!(qconj(Quaternion::ONE), Quaternion::ONE);
        assert_eq!(qre(NamedConstant::II.value().quaternion()), 0.0);
    }

    #[test]
    fn associativity_and_norm_multiplicativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let (p, q, r) = (
                random_quaternion(&mut rng),
                random_quaternion(&mut rng),
                random_quaternion(&mut rng),
            );
            assert!(close((p * q) * r, p * (q * r), 1e-12));
            assert!(((p * q).norm() - p.norm() * q.norm()).abs() <= 1e-12);
        }
    }

    #[test]
    fn conjugacy_examples() {
        let (one, i, j) = (UnitQuaternion::ONE, UnitQuaternion::I, UnitQuaternion::J);
        // x = (1 + k)/sqrt2 gives x i x^-1 = j
        let x = Quaternion::new(1.0, 0.0, 0.0, 1.0).scale(std::f64::consts::FRAC_1_SQRT_2);
        assert!(close(x * i.quaternion() * x.conj(), j.quaternion(), 1e-15));
        assert!(conjugate_in_hx(i, j));
        assert!(conjugate_in_hx(one, one));
        assert!(!conjugate_in_hx(NamedConstant::Omega.value(), one));
    }

    #[test]
    fn conjugacy_rejects_non_unit() {
        assert!(conjugate_in_hx_checked(Quaternion::new(2.0, 0.0, 0.0, 0.0), Quaternion::ONE).is_err());
        assert_eq!(conjugate_in_hx_checked(Quaternion::I, Quaternion::K), Ok(true));
    }

    #[test]
    fn exp_pi_i_examples() {
        assert_eq!(exp_pi_i_frac(0, 1).quaternion(), Quaternion::ONE);
        let q = exp_pi_i_frac(2, 3).quaternion();
        assert!(close(q, Quaternion::new(-0.5, 3f64.sqrt() / 2.0, 0.0, 0.0), 1e-15));
        let z = exp_pi_i_frac(1, 4).quaternion();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(z, Quaternion::new(r, r, 0.0, 0.0));
    }

    #[test]
    fn named_constants() {
        let omega = named_constant("omega").unwrap().quaternion();
        assert_eq!(omega, Quaternion::new(-0.5, 0.5, 0.5, 0.5));
        let s5 = 5f64.sqrt();
        let ii = named_constant("iI").unwrap().quaternion();
        assert!(close(ii, Quaternion::new(0.0, 0.5, (s5 - 1.0) / 4.0, (s5 + 1.0) / 4.0), 1e-15));
        for c in NamedConstant::ALL {
            let raw = match c {
                NamedConstant::IIPrime => {
                    Quaternion::new(0.0, -(s5 - 1.0) / 4.0, -(s5 + 1.0) / 4.0, 0.5)
                }
                _ => c.value().quaternion(),
            };
            assert!((raw.norm() - 1.0).abs() <= eps(), "{}", c.name());
        }
        assert!(matches!(named_constant("nope"), Err(Error::UnknownConstant(_))));
    }

    #[test]
    fn named_constant_orders() {
        assert_eq!(NamedConstant::Omega.value().order(100), Some(3));
        for c in [NamedConstant::IO, NamedConstant::II, NamedConstant::IIPrime] {
            assert_eq!(c.value().order(100), Some(4), "{}", c.name());
        }
        assert_eq!(NamedConstant::Zeta8.value().order(100), Some(8));
    }

    #[test]
    fn unit_constructor_renormalizes_or_rejects() {
        let q = UnitQuaternion::from_components(1.0 + 1e-8, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(q.quaternion().a, 1.0);
        assert!(UnitQuaternion::from_components(1.1, 0.0, 0.0, 0.0).is_err());
        assert!(UnitQuaternion::from_components(f64::NAN, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn left_and_right_matrices_match_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let (p, x) = (random_quaternion(&mut rng), random_quaternion(&mut rng));
            let l = p.left_matrix() * x.to_vector();
            let r = p.right_matrix() * x.to_vector();
            assert!((l - (p * x).to_vector()).norm() <= 1e-12);
            assert!((r - (x * p).to_vector()).norm() <= 1e-12);
        }
    }

    /// Oracle: unit quaternions are conjugate iff left multiplication by them
    /// has the same eigenvalue multiset. Left multiplication by a unit
    /// quaternion with real part cos(t) has eigenvalues e^{+-it}, each twice,
    /// so the multiset is read off the characteristic polynomial coefficients.
    fn eigen_oracle(z: UnitQuaternion, y: UnitQuaternion) -> bool {
        let spectrum = |q: UnitQuaternion| {
            let m = q.quaternion().left_matrix();
            let eig = m.complex_eigenvalues();
            let mut v: Vec<(f64, f64)> = eig.iter().map(|c| (c.re, c.im)).collect();
            // imaginary parts are macroscopically separated, real parts are not
            v.sort_by(|a, b| a.1.total_cmp(&b.1));
            v
        };
        let (a, b) = (spectrum(z), spectrum(y));
        a.iter().zip(&b).all(|(p, q)| (p.0 - q.0).abs() <= 1e-6 && (p.1 - q.1).abs() <= 1e-6)
    }


    #[test]
    fn conjugacy_agrees_with_eigen_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut pairs = Vec::new();
        for _ in 0..500 {
            let z = random_unit(&mut rng);
            // half the pairs share the real part so both outcomes are exercised
            let y = if rng.gen_bool(0.5) {
                random_unit(&mut rng)
            } else {
                let v = random_unit(&mut rng).quaternion();
                let imag = Quaternion::new(0.0, v.b, v.c, v.d);
                let s = (1.0 - z.re() * z.re()).max(0.0).sqrt() / imag.norm();
                UnitQuaternion::new(Quaternion::new(z.re(), v.b * s, v.c * s, v.d * s)).unwrap()
            };
            pairs.push((z, y));
        }
        for a in NamedConstant::ALL {
            for b in NamedConstant::ALL {
                pairs.push((a.value(), b.value()));
                pairs.push((a.value(), -b.value()));
            }
        }
        let mut agreed_true = 0;
        for (z, y) in pairs {
            let fast = conjugate_in_hx(z, y);
            assert_eq!(fast, eigen_oracle(z, y), "{z} vs {y}");
            agreed_true += fast as usize;
        }
        assert!(agreed_true > 200);
    }
}
