//! Finite subgroups of O(4): closure, invariant lines, chiral elements and
//! recognition of the exceptional group K.

use std::collections::HashMap;
use std::fmt;

use nalgebra::{DMatrix, Matrix2, Matrix4, Vector2, Vector4};
use serde::{Deserialize, Serialize};

use crate::catalog::group_k;
use crate::elem::{ElementKey, OrthElement};
use crate::error::{Error, Result};
use crate::linalg::{householder, invariant_splitting, null_space};
use crate::tolerance::{eps, HASH_DIGITS};

/// One entry of the conjugacy fingerprint: rounded trace, determinant, order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FingerprintEntry {
    pub trace_key: i64,
    pub det: i8,
    pub order: usize,
}

/// A finite group of orthogonal maps, closed under composition.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    elements: Vec<OrthElement>,
    orders: Vec<usize>,
    generator_indices: Vec<usize>,
    index: HashMap<ElementKey, Vec<usize>>,
    fingerprint: Vec<FingerprintEntry>,
}

impl FiniteGroup {
    /// The group generated by `gens`, by breadth-first right multiplication.
    pub fn closure(gens: &[OrthElement], max_order: usize) -> Result<FiniteGroup> {
        let mut elements = vec![OrthElement::identity()];
        let mut index: HashMap<ElementKey, Vec<usize>> = HashMap::new();
        index.insert(elements[0].key(), vec![0]);
        let mut next = 0;
        while next < elements.len() {
            let x = elements[next].clone();
            next += 1;
            for g in gens {
                let y = x.compose(g);
                if lookup(&index, &elements, &y).is_none() {
                    if elements.len() >= max_order {
                        return Err(Error::MaxOrderExceeded { max_order });
                    }
                    index.entry(y.key()).or_default().push(elements.len());
                    elements.push(y);
                }
            }
        }
        Ok(Self::from_closed(elements, gens))
    }

    /// Build from a set already closed under composition. Elements are sorted
    /// by hash key so the layout does not depend on generator order.
    fn from_closed(mut elements: Vec<OrthElement>, gens: &[OrthElement]) -> FiniteGroup {
        elements.sort_by_key(|e| e.key());
        let mut index: HashMap<ElementKey, Vec<usize>> = HashMap::new();
        for (i, e) in elements.iter().enumerate() {
            index.entry(e.key()).or_default().push(i);
        }
        let mut generator_indices: Vec<usize> = gens
            .iter()
            .filter_map(|g| lookup(&index, &elements, g))
            .collect();
        generator_indices.sort_unstable();
        generator_indices.dedup();
        let n = elements.len();
        let orders: Vec<usize> = elements
            .iter()
            .map(|e| e.order_with_cap(n).expect("element order divides the group order"))
            .collect();
        let mut fingerprint: Vec<FingerprintEntry> = elements
            .iter()
            .zip(&orders)
            .map(|(e, &order)| FingerprintEntry {
                trace_key: (e.trace() * 10f64.powi(HASH_DIGITS)).round() as i64,
                det: e.det() as i8,
                order,
            })
            .collect();
        fingerprint.sort_unstable();
        FiniteGroup {
            elements,
            orders,
            generator_indices,
            index,
            fingerprint,
        }
    }

    pub fn trivial() -> FiniteGroup {
        Self::from_closed(vec![OrthElement::identity()], &[])
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[OrthElement] {
        &self.elements
    }

    /// Order of each element, aligned with [`elements`](Self::elements).
    pub fn element_orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn generators(&self) -> Vec<&OrthElement> {
        self.generator_indices.iter().map(|&i| &self.elements[i]).collect()
    }

    pub fn generator_indices(&self) -> &[usize] {
        &self.generator_indices
    }

    pub fn fingerprint(&self) -> &[FingerprintEntry] {
        &self.fingerprint
    }

    pub fn contains(&self, e: &OrthElement) -> bool {
        self.position(e).is_some()
    }

    pub fn position(&self, e: &OrthElement) -> Option<usize> {
        lookup(&self.index, &self.elements, e)
            .or_else(|| self.elements.iter().position(|x| x.approx_eq(e)))
    }

    pub fn generator_matrices(&self) -> Vec<Matrix4<f64>> {
        self.generators().iter().map(|g| *g.matrix()).collect()
    }

    /// A unit vector spanning a line mapped to itself by every element.
    ///
    /// A line is invariant iff each generator acts on it by +1 or -1, so the
    /// search runs over sign patterns on the generators and intersects the
    /// corresponding eigenspaces.
    pub fn find_invariant_line(&self) -> Option<Vector4<f64>> {
        let gens = self.generator_matrices();
        if gens.is_empty() {
            return Some(Vector4::x());
        }
        let k = gens.len();
        for pattern in 0u32..(1 << k) {
            let mut stacked = DMatrix::<f64>::zeros(4 * k, 4);
            for (gi, g) in gens.iter().enumerate() {
                let sign = if pattern & (1 << gi) == 0 { 1.0 } else { -1.0 };
                let block = g - Matrix4::identity() * sign;
                stacked.view_mut((4 * gi, 0), (4, 4)).copy_from(&block);
            }
            if let Some(v) = null_space(&stacked).first() {
                return Some(Vector4::new(v[0], v[1], v[2], v[3]).normalize());
            }
        }
        None
    }

    /// The first element, in element order, without an invariant line.
    pub fn find_chiral_element(&self) -> Option<&OrthElement> {
        self.elements.iter().find(|e| !e.has_invariant_line())
    }

    /// `h^-1 g h` for every element.
    pub fn conjugate(&self, h: &OrthElement) -> FiniteGroup {
        let elements: Vec<OrthElement> = self.elements.iter().map(|g| g.conjugate_by(h)).collect();
        let gens: Vec<OrthElement> = self.generators().iter().map(|g| g.conjugate_by(h)).collect();
        Self::from_closed(elements, &gens)
    }

    /// Equality as sets of maps.
    pub fn same_elements(&self, other: &FiniteGroup) -> bool {
        self.order() == other.order() && other.elements.iter().all(|e| self.contains(e))
    }

    /// A conjugator `h` with `h^-1 G h = K`, found by aligning the two
    /// invariant planes of the group with span(1, i) and span(j, k).
    ///
    /// Returns `Ok(None)` when the order or fingerprint rule out K, and
    /// `ConjugatorNotFound` when the screens pass but the frame scan fails.
    pub fn find_conjugator_to_k(&self) -> Result<Option<OrthElement>> {
        let k = group_k();
        if self.order() != k.order() || self.fingerprint != k.fingerprint {
            return Ok(None);
        }
        let not_found = |why: &str| Error::ConjugatorNotFound {
            evidence: format!("order 16, fingerprint matches K; {why}"),
        };
        let splitting = invariant_splitting(&self.generator_matrices())
            .ok_or_else(|| not_found("invariant subspaces are not a unique splitting"))?;
        let planes = splitting.subspaces_of_dim(2);
        if planes.len() != 2 || splitting.blocks.len() != 2 {
            return Err(not_found(&format!("{} invariant planes instead of 2", planes.len())));
        }
        for (first, second) in [(0, 1), (1, 0)] {
            let frames_a = reflection_frames(self, &planes[first]);
            let frames_b = reflection_frames(self, &planes[second]);
            for (a1, a2) in &frames_a {
                for (b1, b2) in &frames_b {
                    let basis = Matrix4::from_columns(&[*a1, *a2, *b1, *b2]);
                    let h = OrthElement::from_matrix(&basis.transpose())?;
                    if self.conjugate(&h).same_elements(&k) {
                        return Ok(Some(h));
                    }
                }
            }
        }
        Err(not_found("no aligned frame conjugates the group onto K"))
    }

    /// `find_conjugator_to_k`, run only when neither a common invariant line
    /// nor a chiral element exists.
    pub fn conjugate_to_k(&self) -> Result<Option<OrthElement>> {
        if self.order() != 16 || self.find_invariant_line().is_some() || self.find_chiral_element().is_some() {
            return Ok(None);
        }
        self.find_conjugator_to_k()
    }

    /// Decide which of the three cases holds, checking that exactly one does.
    pub fn classify(&self) -> Result<Classification> {
        let line = self.find_invariant_line();
        let chiral = self.find_chiral_element().cloned();
        let conjugator = match self.find_conjugator_to_k() {
            Ok(h) => h.map(Some),
            Err(Error::ConjugatorNotFound { evidence }) => {
                if line.is_none() && chiral.is_none() {
                    return Err(Error::ConjugatorNotFound { evidence });
                }
                None
            }
            Err(other) => return Err(other),
        };
        let holding = [line.is_some(), chiral.is_some(), conjugator.is_some()];
        let count = holding.iter().filter(|b| **b).count();
        if count != 1 {
            return Err(Error::TrichotomyViolation {
                diagnostics: format!(
                    "order {}, invariant line {:?}, chiral element {}, conjugator to K {}",
                    self.order(),
                    line.map(|v| [v[0], v[1], v[2], v[3]]),
                    chiral.as_ref().map_or("none".to_string(), |e| e.to_string()),
                    conjugator
                        .as_ref()
                        .map_or("none".to_string(), |h| h.as_ref().map_or("?".into(), |e| e.to_string())),
                ),
            });
        }
        let witness = if let Some(v) = line {
            Witness::InvariantLine {
                vector: v,
                reflection: householder(&v),
            }
        } else if let Some(e) = chiral {
            Witness::ChiralElement(e)
        } else {
            Witness::GroupK {
                conjugator: conjugator.flatten(),
            }
        };
        Ok(Classification { witness })
    }
}

fn lookup(index: &HashMap<ElementKey, Vec<usize>>, elements: &[OrthElement], e: &OrthElement) -> Option<usize> {
    index
        .get(&e.key())
        .and_then(|slots| slots.iter().copied().find(|&i| elements[i].approx_eq(e)))
}

/// Oriented orthonormal frames of a 2-plane whose first vector is fixed by
/// some element acting on the plane as a reflection.
fn reflection_frames(group: &FiniteGroup, plane: &[Vector4<f64>]) -> Vec<(Vector4<f64>, Vector4<f64>)> {
    let (p, q) = (plane[0], plane[1]);
    let mut axes: Vec<Vector2<f64>> = Vec::new();
    for g in group.elements() {
        let m = g.matrix();
        let (gp, gq) = (m * p, m * q);
        let r = Matrix2::new(p.dot(&gp), p.dot(&gq), q.dot(&gp), q.dot(&gq));
        if r.determinant() > -0.5 {
            continue;
        }
        let fix = r + Matrix2::identity();
        let col = if fix.column(0).norm() >= fix.column(1).norm() { fix.column(0) } else { fix.column(1) };
        let axis = col.normalize();
        for a in [axis, -axis] {
            if !axes.iter().any(|b| (a - b).norm() <= 1e-6) {
                axes.push(a);
            }
        }
    }
    let mut frames = Vec::new();
    for a in &axes {
        for b in &axes {
            if a.dot(b).abs() <= 1e-6 {
                frames.push((p * a[0] + q * a[1], p * b[0] + q * b[1]));
            }
        }
    }
    frames
}

/// Which case of the trichotomy a group falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    InvariantLine,
    ChiralElement,
    GroupK,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::InvariantLine => "InvariantLine",
            Case::ChiralElement => "ChiralElement",
            Case::GroupK => "GroupK",
        })
    }
}

/// Evidence for a verdict.
#[derive(Debug, Clone)]
pub enum Witness {
    /// A common invariant line and the commuting reflection `I - 2 v v^T`.
    InvariantLine {
        vector: Vector4<f64>,
        reflection: Matrix4<f64>,
    },
    /// An element with no invariant line.
    ChiralElement(OrthElement),
    /// A conjugator `h` with `h^-1 G h = K`.
    GroupK { conjugator: Option<OrthElement> },
}

/// Verdict with a checkable witness.
#[derive(Debug, Clone)]
pub struct Classification {
    pub witness: Witness,
}

impl Classification {
    pub fn case(&self) -> Case {
        match self.witness {
            Witness::InvariantLine { .. } => Case::InvariantLine,
            Witness::ChiralElement(_) => Case::ChiralElement,
            Witness::GroupK { .. } => Case::GroupK,
        }
    }

    /// Re-check the witness against the group.
    pub fn verify(&self, group: &FiniteGroup) -> bool {
        match &self.witness {
            Witness::InvariantLine { vector, reflection } => group.elements().iter().all(|g| {
                let image = g.matrix() * vector;
                let on_line = (image - vector).norm() <= eps() * 10.0 || (image + vector).norm() <= eps() * 10.0;
                let commutes = (reflection * g.matrix() - g.matrix() * reflection).abs().max() <= eps() * 10.0;
                on_line && commutes
            }),
            Witness::ChiralElement(e) => group.contains(e) && !e.has_invariant_line(),
            Witness::GroupK { conjugator } => match conjugator {
                Some(h) => group.conjugate(h).same_elements(&group_k()),
                None => false,
            },
        }
    }
}
