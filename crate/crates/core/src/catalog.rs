//! Named groups and elements: toroidal families with their parameters, the
//! group K, and the specific tubical and polyhedral elements used to show
//! those classes contain chiral elements.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;

use crate::elem::{parse_element, OrthElement};
use crate::error::{Error, Result};
use crate::group::{Case, FiniteGroup};
use crate::quat::{exp_pi_i_frac, NamedConstant, UnitQuaternion};
use crate::tolerance::DEFAULT_MAX_ORDER;

pub const K1: &str = "*[i,i][i,1]";
pub const K2: &str = "*[k,k][i,1]";

/// The order-16 group generated by `K1` and `K2`.
pub fn group_k() -> FiniteGroup {
    static K: OnceLock<FiniteGroup> = OnceLock::new();
    K.get_or_init(|| {
        let gens = [parse_element(K1).unwrap(), parse_element(K2).unwrap()];
        FiniteGroup::closure(&gens, DEFAULT_MAX_ORDER).expect("K is finite")
    })
    .clone()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReflectionSubtype {
    P2mm,
    P2mg,
    P2gg,
    C2mm,
}

impl ReflectionSubtype {
    pub const ALL: [ReflectionSubtype; 4] = [
        ReflectionSubtype::P2mm,
        ReflectionSubtype::P2mg,
        ReflectionSubtype::P2gg,
        ReflectionSubtype::C2mm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReflectionSubtype::P2mm => "p2mm",
            ReflectionSubtype::P2mg => "p2mg",
            ReflectionSubtype::P2gg => "p2gg",
            ReflectionSubtype::C2mm => "c2mm",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn index(self) -> i64 {
        Self::ALL.iter().position(|s| *s == self).unwrap() as i64
    }

    pub fn from_index(i: i64) -> Option<Self> {
        usize::try_from(i).ok().and_then(|i| Self::ALL.get(i).copied())
    }
}

/// The two elements whose presence makes every tubical group chiral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TubicalElement {
    I,
    Omega,
}

/// A catalog entry with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FamilySpec {
    TorusTranslation { m: i64, n: i64, s: i64 },
    TorusFlip { m: i64, n: i64, s: i64 },
    TorusReflectionFull { subtype: ReflectionSubtype, m: i64, n: i64 },
    TorusSwapturn { a: i64, b: i64 },
    GroupK,
    TubicalSample(TubicalElement),
    PolyhedralIxIbarMinus,
    PolyhedralIxIbarPlus,
    LemmaEnem { m: i64, n: i64 },
}

/// Family names as used on the command line.
pub const FAMILY_NAMES: [&str; 9] = [
    "torus-translation",
    "torus-flip",
    "torus-reflection-full",
    "torus-swapturn",
    "group-k",
    "tubical-sample",
    "polyhedral-ixibar-minus",
    "polyhedral-ixibar-plus",
    "lemma-enem",
];

/// Parameter names of a family, in tuple order.
pub fn family_params(family: &str) -> Result<&'static [&'static str]> {
    Ok(match family {
        "torus-translation" | "torus-flip" => &["m", "n", "s"],
        "torus-reflection-full" => &["subtype", "m", "n"],
        "torus-swapturn" => &["a", "b"],
        "tubical-sample" => &["element"],
        "lemma-enem" => &["m", "n"],
        "group-k" | "polyhedral-ixibar-minus" | "polyhedral-ixibar-plus" => &[],
        other => return Err(Error::Precondition(format!("unknown family `{other}`"))),
    })
}

fn invalid(family: &str, violated: impl Into<String>) -> Error {
    Error::InvalidParameters {
        family: family.to_string(),
        violated: violated.into(),
    }
}

impl FamilySpec {
    pub fn family(&self) -> &'static str {
        match self {
            FamilySpec::TorusTranslation { .. } => "torus-translation",
            FamilySpec::TorusFlip { .. } => "torus-flip",
            FamilySpec::TorusReflectionFull { .. } => "torus-reflection-full",
            FamilySpec::TorusSwapturn { .. } => "torus-swapturn",
            FamilySpec::GroupK => "group-k",
            FamilySpec::TubicalSample(_) => "tubical-sample",
            FamilySpec::PolyhedralIxIbarMinus => "polyhedral-ixibar-minus",
            FamilySpec::PolyhedralIxIbarPlus => "polyhedral-ixibar-plus",
            FamilySpec::LemmaEnem { .. } => "lemma-enem",
        }
    }

    /// Parameter values in the order of [`family_params`].
    pub fn params(&self) -> Vec<i64> {
        match *self {
            FamilySpec::TorusTranslation { m, n, s } | FamilySpec::TorusFlip { m, n, s } => vec![m, n, s],
            FamilySpec::TorusReflectionFull { subtype, m, n } => vec![subtype.index(), m, n],
            FamilySpec::TorusSwapturn { a, b } => vec![a, b],
            FamilySpec::TubicalSample(e) => vec![e as i64],
            FamilySpec::LemmaEnem { m, n } => vec![m, n],
            FamilySpec::GroupK | FamilySpec::PolyhedralIxIbarMinus | FamilySpec::PolyhedralIxIbarPlus => vec![],
        }
    }

    /// Build from a family name and parameter values keyed by name.
    pub fn from_params(family: &str, values: &BTreeMap<String, i64>) -> Result<FamilySpec> {
        let names = family_params(family)?;
        for key in values.keys() {
            if !names.contains(&key.as_str()) {
                return Err(invalid(family, format!("unknown parameter `{key}`")));
            }
        }
        let get = |k: &str| values.get(k).copied().ok_or_else(|| invalid(family, format!("missing parameter `{k}`")));
        let spec = match family {
            "torus-translation" => FamilySpec::TorusTranslation { m: get("m")?, n: get("n")?, s: get("s")? },
            "torus-flip" => FamilySpec::TorusFlip { m: get("m")?, n: get("n")?, s: get("s")? },
            "torus-reflection-full" => FamilySpec::TorusReflectionFull {
                subtype: ReflectionSubtype::from_index(get("subtype")?)
                    .ok_or_else(|| invalid(family, "subtype index in 0..=3"))?,
                m: get("m")?,
                n: get("n")?,
            },
            "torus-swapturn" => FamilySpec::TorusSwapturn { a: get("a")?, b: get("b")? },
            "group-k" => FamilySpec::GroupK,
            "tubical-sample" => FamilySpec::TubicalSample(match get("element")? {
                0 => TubicalElement::I,
                1 => TubicalElement::Omega,
                _ => return Err(invalid(family, "element in {0 (i), 1 (omega)}")),
            }),
            "polyhedral-ixibar-minus" => FamilySpec::PolyhedralIxIbarMinus,
            "polyhedral-ixibar-plus" => FamilySpec::PolyhedralIxIbarPlus,
            "lemma-enem" => FamilySpec::LemmaEnem { m: get("m")?, n: get("n")? },
            _ => unreachable!("checked by family_params"),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Check the family's parameter constraints, naming the violated one.
    pub fn validate(&self) -> Result<()> {
        let family = self.family();
        match *self {
            FamilySpec::TorusTranslation { m, n, s } | FamilySpec::TorusFlip { m, n, s } => {
                if m < 1 || n < 1 {
                    return Err(invalid(family, "m >= 1 and n >= 1"));
                }
                if 2 * s < -m {
                    return Err(invalid(family, "-m/2 <= s"));
                }
                if 2 * s > -m + n {
                    return Err(invalid(family, "s <= -m/2 + n/2"));
                }
            }
            FamilySpec::TorusReflectionFull { m, n, .. } => {
                if n < 1 || n > m {
                    return Err(invalid(family, "1 <= n <= m"));
                }
                if m == 1 {
                    return Err(invalid(family, "m != 1"));
                }
            }
            FamilySpec::TorusSwapturn { a, b } => {
                if !(a >= b && b >= 0) {
                    return Err(invalid(family, "a >= b >= 0"));
                }
                if a < 2 {
                    return Err(invalid(family, "a >= 2"));
                }
                if (a, b) == (2, 0) {
                    return Err(invalid(family, "(a, b) != (2, 0)"));
                }
            }
            FamilySpec::LemmaEnem { m, n } => {
                if m < 1 || n < 1 {
                    return Err(invalid(family, "m >= 1 and n >= 1"));
                }
            }
            FamilySpec::GroupK
            | FamilySpec::TubicalSample(_)
            | FamilySpec::PolyhedralIxIbarMinus
            | FamilySpec::PolyhedralIxIbarPlus => {}
        }
        Ok(())
    }

    /// Generator list of the family member.
    pub fn generators(&self) -> Result<Vec<OrthElement>> {
        self.validate()?;
        let pair = |z: UnitQuaternion, w: UnitQuaternion| OrthElement::pair(z, w);
        let parse_all = |list: &[&str]| -> Vec<OrthElement> {
            list.iter().map(|s| parse_element(s).expect("catalog element strings parse")).collect()
        };
        Ok(match *self {
            FamilySpec::TorusTranslation { m, n, s } => translation_generators(m, n, s),
            FamilySpec::TorusFlip { m, n, s } => {
                let mut gens = translation_generators(m, n, s);
                gens.push(parse_element("[j,j]")?);
                gens
            }
            FamilySpec::TorusReflectionFull { subtype, m, n } => {
                if m == 2 && n <= 2 {
                    parse_all(reflection_list(subtype, n))
                } else {
                    vec![pair(exp_pi_i_frac(1, n), exp_pi_i_frac(1, n)), pair(exp_pi_i_frac(1, m), exp_pi_i_frac(-1, m))]
                }
            }
            FamilySpec::TorusSwapturn { a, b } => {
                let nn = a * a + b * b;
                vec![
                    pair(exp_pi_i_frac(-(a + b), nn), exp_pi_i_frac(a - b, nn)),
                    pair(exp_pi_i_frac(a - b, nn), exp_pi_i_frac(a + b, nn)),
                    parse_element("*[-j,1]")?,
                ]
            }
            FamilySpec::GroupK => parse_all(&[K1, K2]),
            FamilySpec::TubicalSample(TubicalElement::I) => parse_all(&["[i,1]"]),
            FamilySpec::TubicalSample(TubicalElement::Omega) => parse_all(&["[w,1]"]),
            FamilySpec::PolyhedralIxIbarMinus => parse_all(&["[w,w]", "[iI,-iIp]"]),
            FamilySpec::PolyhedralIxIbarPlus => parse_all(&["[w,w]", "[iI,iIp]"]),
            FamilySpec::LemmaEnem { m, n } => vec![lemma_enem_product(m, n)],
        })
    }

    /// The group generated by [`generators`](Self::generators).
    pub fn group(&self, max_order: usize) -> Result<FiniteGroup> {
        FiniteGroup::closure(&self.generators()?, max_order)
    }

    /// The predicted case, read literally off the family's stated side
    /// conditions and without running the classifier. `None` where no
    /// prediction is made (m = 1 members of the translation and flip families).
    ///
    /// Known to disagree with the computed case for translation and flip
    /// members with m = 2, s = 0, n >= 3, for the c2mm n = 2 reflection list,
    /// for generic reflection members with n <= 2, and for lemma products
    /// with a parameter <= 2 and the other >= 3.
    pub fn expected_classification(&self) -> Option<Case> {
        match *self {
            FamilySpec::TorusTranslation { m, n, s } | FamilySpec::TorusFlip { m, n, s } => match (m, n, s) {
                (1, _, _) => None,
                (2, 1, -1) | (2, 2, 0) => Some(Case::InvariantLine),
                _ => Some(Case::ChiralElement),
            },
            FamilySpec::TorusReflectionFull { subtype, m, n } => Some(match (subtype, m, n) {
                (ReflectionSubtype::P2gg, 2, 2) => Case::GroupK,
                (_, 2, 1 | 2) => Case::InvariantLine,
                _ => Case::ChiralElement,
            }),
            FamilySpec::TorusSwapturn { .. } => Some(Case::ChiralElement),
            FamilySpec::GroupK => Some(Case::GroupK),
            FamilySpec::TubicalSample(_) => Some(Case::ChiralElement),
            FamilySpec::PolyhedralIxIbarMinus | FamilySpec::PolyhedralIxIbarPlus => Some(Case::ChiralElement),
            FamilySpec::LemmaEnem { m, n } => Some(if m.max(n) >= 3 { Case::ChiralElement } else { Case::InvariantLine }),
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.family())?;
        let names = family_params(self.family()).expect("known family");
        for (name, value) in names.iter().zip(self.params()) {
            match self {
                FamilySpec::TorusReflectionFull { subtype, .. } if *name == "subtype" => {
                    write!(f, " subtype={}", subtype.name())?
                }
                _ => write!(f, " {name}={value}")?,
            }
        }
        Ok(())
    }
}

fn translation_generators(m: i64, n: i64, s: i64) -> Vec<OrthElement> {
    vec![
        OrthElement::pair(exp_pi_i_frac(-2, m), UnitQuaternion::ONE),
        OrthElement::pair(exp_pi_i_frac(-(m + 2 * s), m * n), exp_pi_i_frac(1, n)),
    ]
}

fn reflection_list(subtype: ReflectionSubtype, n: i64) -> &'static [&'static str] {
    use ReflectionSubtype::*;
    match (subtype, n) {
        (P2mm, 1) => &["[i,i]", "*[i,i]", "*[k,k]"],
        (P2mm, _) => &["[i,i]", "[i,-i]", "*[i,i]", "*[k,k]"],
        (P2mg, 1) => &["[i,i]", "*[i,i][i,-i]", "*[k,k][i,-i]"],
        (P2mg, _) => &["[i,i]", "[i,-i]", "*[i,i][z8,conj(z8)]", "*[k,k][z8,conj(z8)]"],
        (P2gg, 1) => &["[i,i]", "*[i,i][z8^3,z8]", "*[k,k][z8^3,z8]"],
        (P2gg, _) => &["[i,i]", "[i,-i]", "*[i,i][i,1]", "*[k,k][i,1]"],
        (C2mm, 1) => &["[i,i]", "[z8^3,z8]", "*[i,i]", "*[k,k]"],
        (C2mm, _) => &["[i,i]", "[i,-i]", "[i,1]", "*[i,i]", "*[k,k]"],
    }
}

/// `[e^{pi i/n}, e^{pi i/n}][e^{pi i/m}, e^{-pi i/m}]`.
pub fn lemma_enem_product(m: i64, n: i64) -> OrthElement {
    let a = OrthElement::pair(exp_pi_i_frac(1, n), exp_pi_i_frac(1, n));
    let b = OrthElement::pair(exp_pi_i_frac(1, m), exp_pi_i_frac(-1, m));
    a.compose(&b)
}

/// The product of the two listed generators of the polyhedral group
/// `+-1/60 [I x Ibar]` (`plus = false`) or `+1/60 [I x Ibar]` (`plus = true`).
pub fn polyhedral_product(plus: bool) -> OrthElement {
    let spec = if plus { FamilySpec::PolyhedralIxIbarPlus } else { FamilySpec::PolyhedralIxIbarMinus };
    let gens = spec.generators().expect("fixed generators");
    gens[0].compose(&gens[1])
}

/// Every member of every family with `m, n <= bound` and `a <= bound`.
pub fn sweep_specs(bound: i64) -> Vec<FamilySpec> {
    let mut out = Vec::new();
    for m in 1..=bound {
        for n in 1..=bound {
            for s in translation_s_range(m, n) {
                out.push(FamilySpec::TorusTranslation { m, n, s });
                out.push(FamilySpec::TorusFlip { m, n, s });
            }
        }
    }
    for subtype in ReflectionSubtype::ALL {
        for m in 2..=bound {
            for n in 1..=m {
                out.push(FamilySpec::TorusReflectionFull { subtype, m, n });
            }
        }
    }
    for a in 2..=bound {
        for b in 0..=a {
            if (a, b) != (2, 0) {
                out.push(FamilySpec::TorusSwapturn { a, b });
            }
        }
    }
    out.push(FamilySpec::GroupK);
    out.push(FamilySpec::TubicalSample(TubicalElement::I));
    out.push(FamilySpec::TubicalSample(TubicalElement::Omega));
    out.push(FamilySpec::PolyhedralIxIbarMinus);
    out.push(FamilySpec::PolyhedralIxIbarPlus);
    for m in 1..=bound {
        for n in 1..=bound {
            out.push(FamilySpec::LemmaEnem { m, n });
        }
    }
    out
}

/// Integer `s` with `-m/2 <= s <= -m/2 + n/2`.
pub fn translation_s_range(m: i64, n: i64) -> std::ops::RangeInclusive<i64> {
    let lo = (-m).div_euclid(2) + (-m).rem_euclid(2);
    let hi = (n - m).div_euclid(2);
    lo..=hi
}

/// Every named quaternion constant with its value, for reference output.
pub fn named_constants() -> Vec<(&'static str, UnitQuaternion)> {
    NamedConstant::ALL.iter().map(|c| (c.name(), c.value())).collect()
}
