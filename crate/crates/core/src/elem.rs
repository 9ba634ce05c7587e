//! Elements of O(4) as quaternion pairs.
//!
//! `[z, w]` is the rotation `x -> conj(z) x w` and `*[z, w]` is the
//! orientation-reversing map `x -> conj(z) conj(x) w`. Pairs are identified
//! up to simultaneous sign, and products are read left to right: `e1 e2`
//! applies `e1` first.
//!
//! Composition rules, obtained by expanding the actions:
//!
//! ```text
//!  [z1,w1]  [z2,w2] =  [z1 z2, w1 w2]
//!  [z1,w1] *[z2,w2] = *[w1 z2, z1 w2]
//! *[z1,w1]  [z2,w2] = *[z1 z2, w1 w2]
//! *[z1,w1] *[z2,w2] =  [w1 z2, z1 w2]
//! ```

use std::fmt;

use nalgebra::{DMatrix, Matrix4, Vector4};

use crate::error::{Error, Result};
use crate::quat::{exp_pi_i, NamedConstant, Quaternion, UnitQuaternion};
use crate::scalar::{parse_rational_prefix, parse_scalar_prefix, Rational};
use crate::tolerance::{eps, DEFAULT_ORDER_CAP, HASH_DIGITS};

/// `diag(1, -1, -1, -1)`: quaternion conjugation.
fn conjugation_matrix() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::new(1.0, -1.0, -1.0, -1.0))
}

/// Hash key: matrix entries rounded to a fixed number of decimal digits.
pub type ElementKey = [i64; 16];

/// An element of O(4) in quaternion-pair form, with its matrix cached.
#[derive(Debug, Clone)]
pub struct OrthElement {
    star: bool,
    z: UnitQuaternion,
    w: UnitQuaternion,
    matrix: Matrix4<f64>,
}

impl OrthElement {
    /// `[z, w]`, or `*[z, w]` when `star` is set.
    pub fn new(star: bool, z: UnitQuaternion, w: UnitQuaternion) -> Self {
        let (z, w) = canonical_signs(z, w);
        let mut matrix = z.conj().quaternion().left_matrix() * w.quaternion().right_matrix();
        if star {
            matrix *= conjugation_matrix();
        }
        OrthElement { star, z, w, matrix }
    }

    pub fn pair(z: UnitQuaternion, w: UnitQuaternion) -> Self {
        Self::new(false, z, w)
    }

    pub fn star_pair(z: UnitQuaternion, w: UnitQuaternion) -> Self {
        Self::new(true, z, w)
    }

    pub fn identity() -> Self {
        Self::pair(UnitQuaternion::ONE, UnitQuaternion::ONE)
    }

    /// `-I = [-1, 1]`.
    pub fn minus_identity() -> Self {
        Self::pair(-UnitQuaternion::ONE, UnitQuaternion::ONE)
    }

    pub fn is_star(&self) -> bool {
        self.star
    }

    pub fn z(&self) -> UnitQuaternion {
        self.z
    }

    pub fn w(&self) -> UnitQuaternion {
        self.w
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn det(&self) -> f64 {
        if self.star {
            -1.0
        } else {
            1.0
        }
    }

    pub fn apply(&self, x: Quaternion) -> Quaternion {
        let x = if self.star { x.conj() } else { x };
        self.z.conj().quaternion() * x * self.w.quaternion()
    }

    pub fn apply_vector(&self, v: &Vector4<f64>) -> Vector4<f64> {
        self.matrix * v
    }

    /// `self` followed by `other`.
    pub fn compose(&self, other: &OrthElement) -> OrthElement {
        let (z1, w1, z2, w2) = (self.z, self.w, other.z, other.w);
        match (self.star, other.star) {
            (false, false) => Self::pair(z1 * z2, w1 * w2),
            (false, true) => Self::star_pair(w1 * z2, z1 * w2),
            (true, false) => Self::star_pair(z1 * z2, w1 * w2),
            (true, true) => Self::pair(w1 * z2, z1 * w2),
        }
    }

    pub fn inverse(&self) -> OrthElement {
        if self.star {
            Self::star_pair(self.w.conj(), self.z.conj())
        } else {
            Self::pair(self.z.conj(), self.w.conj())
        }
    }

    pub fn pow(&self, n: usize) -> OrthElement {
        (0..n).fold(Self::identity(), |acc, _| acc.compose(self))
    }

    /// `h^-1 self h`, in left-to-right order.
    pub fn conjugate_by(&self, h: &OrthElement) -> OrthElement {
        h.inverse().compose(self).compose(h)
    }

    pub fn is_identity(&self) -> bool {
        (self.matrix - Matrix4::identity()).abs().max() <= eps()
    }

    /// Least `n >= 1` with `self^n = 1`.
    pub fn order_with_cap(&self, cap: usize) -> Result<usize> {
        let mut acc = self.clone();
        for n in 1..=cap {
            if acc.is_identity() {
                return Ok(n);
            }
            acc = acc.compose(self);
        }
        Err(Error::OrderCapExceeded { cap })
    }

    pub fn order(&self) -> Result<usize> {
        self.order_with_cap(DEFAULT_ORDER_CAP)
    }

    /// Whether some line is mapped to itself.
    ///
    /// A rotation `[z, w]` fixes a line iff `z` is conjugate to `w` or `-w`,
    /// i.e. iff the real parts agree up to sign. Orientation-reversing maps
    /// of R^4 always have a real eigenvalue.
    pub fn has_invariant_line(&self) -> bool {
        if self.star {
            return true;
        }
        crate::quat::conjugate_in_hx(self.z, self.w)
            || crate::quat::conjugate_in_hx(self.z, -self.w)
    }

    pub fn key(&self) -> ElementKey {
        let scale = 10f64.powi(HASH_DIGITS);
        let mut key = [0i64; 16];
        for (slot, x) in key.iter_mut().zip(self.matrix.iter()) {
            *slot = (x * scale).round() as i64;
        }
        key
    }

    /// Equality as maps, within `eps()` entrywise.
    pub fn approx_eq(&self, other: &OrthElement) -> bool {
        self.star == other.star && (self.matrix - other.matrix).abs().max() <= eps()
    }

    /// Recover the quaternion pair of an orthogonal matrix.
    pub fn from_matrix(m: &Matrix4<f64>) -> Result<OrthElement> {
        let deviation = (m.transpose() * m - Matrix4::identity()).abs().max();
        if deviation > 1e-6 {
            return Err(Error::NotOrthogonal { deviation });
        }
        let star = m.determinant() < 0.0;
        let proper = if star { m * conjugation_matrix() } else { *m };
        // proper = L(conj z) R(w); p = proper(1) = conj(z) w and
        // proper(x) conj(p) = conj(z) x z.
        let p = Quaternion::from_vector(&proper.column(0).into_owned());
        let mut system = DMatrix::<f64>::zeros(12, 4);
        for (row, x) in [Quaternion::I, Quaternion::J, Quaternion::K].into_iter().enumerate() {
            let image = Quaternion::from_vector(&(proper * x.to_vector())) * p.conj();
            // x z - z image = 0
            let block = x.left_matrix() - image.right_matrix();
            system.view_mut((4 * row, 0), (4, 4)).copy_from(&block);
        }
        let svd = system.svd(false, true);
        let v_t = svd.v_t.expect("requested V^T");
        let (idx, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("four singular values");
        let zv = v_t.row(idx).transpose();
        let z = UnitQuaternion::new(Quaternion::new(zv[0], zv[1], zv[2], zv[3]))?;
        let w = UnitQuaternion::new(z.quaternion() * p)?;
        let e = OrthElement::new(star, z, w);
        let err = (e.matrix - m).abs().max();
        if err > 1e-6 {
            return Err(Error::NotOrthogonal { deviation: err });
        }
        Ok(e)
    }
}

/// Make the first component of `z` exceeding `eps()` in magnitude positive.
fn canonical_signs(z: UnitQuaternion, w: UnitQuaternion) -> (UnitQuaternion, UnitQuaternion) {
    let lead = z
        .quaternion()
        .to_array()
        .into_iter()
        .find(|c| c.abs() > eps())
        .unwrap_or(1.0);
    if lead < 0.0 {
        (-z, -w)
    } else {
        (z, w)
    }
}

/// Render a unit quaternion, by name when it is a signed named constant.
pub fn format_unit(q: UnitQuaternion) -> String {
    const SHORT: [(NamedConstant, &str); 9] = [
        (NamedConstant::One, "1"),
        (NamedConstant::I, "i"),
        (NamedConstant::J, "j"),
        (NamedConstant::K, "k"),
        (NamedConstant::Omega, "w"),
        (NamedConstant::IO, "iO"),
        (NamedConstant::II, "iI"),
        (NamedConstant::IIPrime, "iIp"),
        (NamedConstant::Zeta8, "z8"),
    ];
    let x = q.quaternion();
    for (c, name) in SHORT {
        let v = c.value().quaternion();
        if x.distance(v) <= 1e-12 {
            return name.to_string();
        }
        if x.distance(-v) <= 1e-12 {
            return format!("-{name}");
        }
    }
    format!(
        "({}, {}, {}, {})",
        decimal_literal(x.a),
        decimal_literal(x.b),
        decimal_literal(x.c),
        decimal_literal(x.d)
    )
}

/// `x` rounded to 12 decimals, written as a reduced fraction so that it stays
/// inside the scalar grammar.
fn decimal_literal(x: f64) -> String {
    const SCALE: i64 = 1_000_000_000_000;
    let r = Rational::new((x * SCALE as f64).round() as i64, SCALE).expect("nonzero");
    r.to_string()
}

impl fmt::Display for OrthElement {
    /// Parseable element syntax, e.g. `*[1, -i]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.star {
            f.write_str("*")?;
        }
        write!(f, "[{}, {}]", format_unit(self.z), format_unit(self.w))
    }
}

/// Parse an element string such as `[w, 1]`, `*[i,i][i,1]` or
/// `[(0, 1/2, sqrt(3)/2, 0), exppi(2/5)]`. Factors are composed left to right.
///
/// A quaternion is `['-'] base ['^' n]` where `base` is a keyword
/// (`1 i j k w omega iO iI iIp z8 zeta8`), `exppi(t)` for `cos(pi t) + sin(pi t) i`,
/// `conj(q)`, or a parenthesized 4-tuple of scalar expressions.
pub fn parse_element(text: &str) -> Result<OrthElement> {
    let mut p = ElemParser { text, pos: 0 };
    let mut acc: Option<OrthElement> = None;
    loop {
        p.skip_ws();
        if p.pos == text.len() {
            break;
        }
        let factor = p.factor()?;
        acc = Some(match acc {
            None => factor,
            Some(prev) => prev.compose(&factor),
        });
    }
    acc.ok_or(Error::Syntax {
        offset: 0,
        message: "empty element string".into(),
    })
}

struct ElemParser<'a> {
    text: &'a str,
    pos: usize,
}

impl ElemParser<'_> {
    fn bytes(&self) -> &[u8] {
        self.text.as_bytes()
    }

    fn err(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.bytes()[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes().get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn factor(&mut self) -> Result<OrthElement> {
        let star = self.eat(b'*');
        self.expect(b'[')?;
        let z = self.unit()?;
        self.expect(b',')?;
        let w = self.unit()?;
        self.expect(b']')?;
        Ok(OrthElement::new(star, z, w))
    }

    fn unit(&mut self) -> Result<UnitQuaternion> {
        let at = self.pos;
        let q = self.quaternion()?;
        UnitQuaternion::new(q).map_err(|_| Error::Domain {
            offset: at,
            message: format!("quaternion of norm {} is not unit", q.norm()),
        })
    }

    fn quaternion(&mut self) -> Result<Quaternion> {
        let negate = self.eat(b'-');
        let mut q = self.base()?;
        if self.eat(b'^') {
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.text.len() && self.bytes()[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let n: u32 = self.text[start..self.pos]
                .parse()
                .map_err(|_| self.err("expected a non-negative exponent"))?;
            let base = q;
            q = (0..n).fold(Quaternion::ONE, |acc, _| acc * base);
        }
        Ok(if negate { -q } else { q })
    }

    fn base(&mut self) -> Result<Quaternion> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let mut comps = [0.0; 4];
                for (n, slot) in comps.iter_mut().enumerate() {
                    if n > 0 {
                        self.expect(b',')?;
                    }
                    let (s, end) = parse_scalar_prefix(self.text, self.pos)?;
                    *slot = s.eval();
                    self.pos = end;
                }
                self.expect(b')')?;
                Ok(Quaternion::new(comps[0], comps[1], comps[2], comps[3]))
            }
            Some(c) if c.is_ascii_alphanumeric() => {
                let start = self.pos;
                while self.pos < self.text.len() && self.bytes()[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let word = &self.text[start..self.pos];
                match word {
                    "exppi" => {
                        self.expect(b'(')?;
                        let t = self.rational()?;
                        self.expect(b')')?;
                        Ok(exp_pi_i(t).quaternion())
                    }
                    "conj" => {
                        self.expect(b'(')?;
                        let q = self.quaternion()?;
                        self.expect(b')')?;
                        Ok(q.conj())
                    }
                    _ => NamedConstant::from_name(word)
                        .map(|c| c.value().quaternion())
                        .map_err(|_| Error::Syntax {
                            offset: start,
                            message: format!("unknown quaternion keyword `{word}`"),
                        }),
                }
            }
            _ => Err(self.err("expected a quaternion")),
        }
    }

    fn rational(&mut self) -> Result<Rational> {
        let (r, end) = parse_rational_prefix(self.text, self.pos)?;
        self.pos = end;
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::random_unit;
    use crate::quat::named_constant;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(name: &str) -> UnitQuaternion {
        named_constant(name).unwrap()
    }


    fn random_element(rng: &mut impl Rng) -> OrthElement {
        OrthElement::new(rng.gen_bool(0.5), random_unit(rng), random_unit(rng))
    }

    fn k1() -> OrthElement {
        parse_element("*[i,i][i,1]").unwrap()
    }

    #[test]
    fn apply_examples() {
        let minus = OrthElement::pair(-q("one"), q("one"));
        let x = Quaternion::new(0.3, -1.0, 2.0, 0.5);
        assert_eq!(minus.apply(x), -x);
        assert!(minus.approx_eq(&OrthElement::pair(q("one"), -q("one"))));

        let e = OrthElement::star_pair(q("i"), q("i"));
        assert_eq!(e.apply(Quaternion::J), Quaternion::J);

        let e = OrthElement::pair(q("i"), q("one"));
        assert_eq!(e.apply(Quaternion::ONE), -Quaternion::I);
    }

    #[test]
    fn apply_matches_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let e = random_element(&mut rng);
            let x = Quaternion::new(rng.gen(), rng.gen(), rng.gen(), rng.gen());
            let direct = e.apply(x).to_vector();
            assert!((direct - e.matrix() * x.to_vector()).norm() <= 1e-12);
        }
    }

    #[test]
    fn compose_matches_matrix_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..1000 {
            let (a, b) = (random_element(&mut rng), random_element(&mut rng));
            let c = a.compose(&b);
            assert!((c.matrix() - b.matrix() * a.matrix()).abs().max() <= eps());
            assert_eq!(c.is_star(), a.is_star() != b.is_star());
        }
    }

    #[test]
    fn determinant_tracks_star_flag() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let e = random_element(&mut rng);
            let m = e.matrix();
            assert!((m.transpose() * m - Matrix4::identity()).abs().max() <= eps());
            assert!((m.determinant() - e.det()).abs() <= eps());
        }
    }

    #[test]
    fn sign_canonicalization() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let (z, w) = (random_unit(&mut rng), random_unit(&mut rng));
            let a = OrthElement::pair(z, w);
            let b = OrthElement::pair(-z, -w);
            assert_eq!(a.z(), b.z());
            assert_eq!(a.w(), b.w());
            assert_eq!(a.key(), b.key());
        }
    }

    #[test]
    fn compose_identity_and_polyhedral_product() {
        let e = OrthElement::pair(q("omega"), q("i"));
        assert!(e.compose(&OrthElement::identity()).approx_eq(&e));

        let p = OrthElement::pair(q("omega"), q("omega"))
            .compose(&OrthElement::pair(q("iI"), -q("iIp")));
        let s5 = 5f64.sqrt();
        let z = Quaternion::new(-(s5 + 1.0) / 4.0, 0.0, -(s5 - 1.0) / 4.0, -0.5);
        let w = Quaternion::new(-(s5 - 1.0) / 4.0, -(s5 + 1.0) / 4.0, 0.0, 0.5);
        let expected = OrthElement::pair(UnitQuaternion::new(z).unwrap(), UnitQuaternion::new(w).unwrap());
        assert!(p.approx_eq(&expected));
        assert!(!p.has_invariant_line());
    }

    #[test]
    fn k1_squared_is_minus_one_on_second_plane() {
        // k1 swaps 1 and -i and turns span(j, k) by a quarter, so its square
        // is the identity on span(1, i) and -1 on span(j, k)
        let sq = k1().compose(&k1());
        let expected = Matrix4::from_diagonal(&Vector4::new(1.0, 1.0, -1.0, -1.0));
        assert!((sq.matrix() - expected).abs().max() <= eps());
    }

    #[test]
    fn k1_action_on_basis() {
        let k1 = k1();
        assert!(k1.apply(Quaternion::ONE).distance(-Quaternion::I) <= 1e-15);
        assert!(k1.apply(Quaternion::I).distance(-Quaternion::ONE) <= 1e-15);
        assert!(k1.apply(Quaternion::J).distance(-Quaternion::K) <= 1e-15);
        assert!(k1.apply(Quaternion::K).distance(Quaternion::J) <= 1e-15);
    }

    #[test]
    fn inverse_and_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let e = random_element(&mut rng);
            assert!(e.compose(&e.inverse()).is_identity());
            assert!(e.inverse().compose(&e).is_identity());
        }
        assert_eq!(OrthElement::pair(q("omega"), q("one")).order(), Ok(3));
        assert_eq!(OrthElement::identity().order(), Ok(1));
        assert_eq!(k1().order(), Ok(4));
        let irrational = OrthElement::pair(UnitQuaternion::from_components(0.6, 0.8, 0.0, 0.0).unwrap(), q("one"));
        assert_eq!(irrational.order_with_cap(50), Err(Error::OrderCapExceeded { cap: 50 }));
    }

    #[test]
    fn invariant_line_examples() {
        assert!(!OrthElement::pair(q("i"), q("one")).has_invariant_line());
        assert!(OrthElement::pair(q("i"), q("i")).has_invariant_line());
        assert!(OrthElement::pair(q("i"), -q("j")).has_invariant_line());
        assert!(OrthElement::star_pair(q("omega"), q("iI")).has_invariant_line());
    }

    #[test]
    fn from_matrix_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..300 {
            let e = random_element(&mut rng);
            let back = OrthElement::from_matrix(e.matrix()).unwrap();
            assert!(back.approx_eq(&e));
        }
        let not_orth = Matrix4::from_diagonal(&Vector4::new(2.0, 1.0, 1.0, 1.0));
        assert!(OrthElement::from_matrix(&not_orth).is_err());
    }

    #[test]
    fn parse_keywords_and_chains() {
        let e = parse_element("[w, 1]").unwrap();
        assert!(e.approx_eq(&OrthElement::pair(q("omega"), q("one"))));
        let k2 = parse_element(" * [ k , k ] [ i , 1 ] ").unwrap();
        let manual = OrthElement::star_pair(q("k"), q("k")).compose(&OrthElement::pair(q("i"), q("one")));
        assert!(k2.approx_eq(&manual));
        let t = parse_element("[(0, 1, 0, 0), exppi(1/2)]").unwrap();
        assert!(t.approx_eq(&OrthElement::pair(q("i"), q("i"))));
        let z = parse_element("[z8^3, z8]").unwrap();
        let z3 = q("z8").pow(3);
        assert!(z.approx_eq(&OrthElement::pair(z3, q("z8"))));
        let c = parse_element("*[k,k][z8, conj(z8)]").unwrap();
        assert!(c.is_star());
        let neg = parse_element("[-j, 1]").unwrap();
        assert!(neg.approx_eq(&OrthElement::pair(-q("j"), q("one"))));
        let tuple = parse_element("[((sqrt(5)-1)/4, 1/2, (sqrt(5)+1)/4, 0), -1]").unwrap();
        assert!(!tuple.is_star());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_element(""), Err(Error::Syntax { .. })));
        assert!(matches!(parse_element("[i, 1"), Err(Error::Syntax { offset: 5, .. })));
        assert!(matches!(parse_element("[q, 1]"), Err(Error::Syntax { offset: 1, .. })));
        assert!(matches!(parse_element("[(1,1,0,0), 1]"), Err(Error::Domain { offset: 1, .. })));
        assert!(matches!(parse_element("[exppi(sqrt(2)), 1]"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn display_is_parseable() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut elems: Vec<OrthElement> = (0..50).map(|_| random_element(&mut rng)).collect();
        elems.push(k1());
        elems.push(parse_element("[iI, -iIp]").unwrap());
        for e in elems {
            let printed = e.to_string();
            let back = parse_element(&printed).unwrap();
            assert!(back.approx_eq(&e), "{printed}");
        }
        assert_eq!(k1().to_string(), "*[1, -i]");
    }
}
