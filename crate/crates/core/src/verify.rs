//! Executable checks of the case analysis, grouped into named suites.
//! Each suite reports pass/fail with human-readable details.

use std::collections::BTreeMap;

use nalgebra::{Matrix4, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::catalog::{group_k, lemma_enem_product, polyhedral_product, sweep_specs, FamilySpec, ReflectionSubtype, K1, K2};
use crate::chirality::{block_rotation, chirality_invariant, chirality_invariant_random, orbit_permutation};
use crate::elem::{parse_element, OrthElement};
use crate::group::{Case, FiniteGroup};
use crate::linalg::{commutant, invariant_splitting, is_invariant_subspace, lcp_witness, orthogonalize, rotation_decomposition};
use crate::quat::{random_unit, Quaternion};
use crate::report::{InputEcho, Report, SweepReport, SweepRow};
use crate::scalar::{parse_scalar, random_scalar};
use crate::tolerance::{eps, DEFAULT_MAX_ORDER};

pub const SUITES: [&str; 8] = [
    "k-structure",
    "trichotomy-sweep",
    "chiral-element",
    "trace-separation",
    "lcp-equivalence",
    "chirality-invariant",
    "orbit-permutation",
    "determinism",
];

/// Parameter bound for the catalog sweeps.
pub const SWEEP_BOUND: i64 = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub claim: String,
    pub passed: bool,
    pub detail: String,
}

impl SuiteResult {
    fn new(name: &str, checks: Vec<Check>) -> SuiteResult {
        SuiteResult {
            name: name.to_string(),
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    pub fn line(&self) -> String {
        let failed: Vec<&str> = self.checks.iter().filter(|c| !c.passed).map(|c| c.claim.as_str()).collect();
        if failed.is_empty() {
            format!("PASS {} ({} checks)", self.name, self.checks.len())
        } else {
            format!("FAIL {} ({} of {} checks failed: {})", self.name, failed.len(), self.checks.len(), failed.join("; "))
        }
    }
}

fn check(claim: &str, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        claim: claim.to_string(),
        passed,
        detail: detail.into(),
    }
}

/// Run one suite by name.
pub fn run_suite(name: &str) -> Option<SuiteResult> {
    let checks = match name {
        "k-structure" => k_structure(),
        "trichotomy-sweep" => trichotomy_sweep(),
        "chiral-element" => chiral_element(),
        "trace-separation" => trace_separation(),
        "lcp-equivalence" => lcp_equivalence(),
        "chirality-invariant" => chirality_invariant_suite(),
        "orbit-permutation" => orbit_permutation_suite(),
        "determinism" => determinism(),
        _ => return None,
    };
    Some(SuiteResult::new(name, checks))
}

pub fn run_all() -> Vec<SuiteResult> {
    SUITES.iter().map(|s| run_suite(s).expect("known suite")).collect()
}

fn el(s: &str) -> OrthElement {
    parse_element(s).expect("fixed element strings parse")
}

/// Whether the matrix has a real eigenvalue, from its complex spectrum.
pub fn eigen_oracle_has_real(m: &Matrix4<f64>) -> bool {
    m.complex_eigenvalues().iter().any(|z| z.im.abs() <= 1e-6)
}

fn catalog_groups() -> Vec<(FamilySpec, FiniteGroup)> {
    sweep_specs(SWEEP_BOUND)
        .into_iter()
        .filter_map(|s| s.group(DEFAULT_MAX_ORDER).ok().map(|g| (s, g)))
        .collect()
}

fn projector(basis: &[Vector4<f64>]) -> Matrix4<f64> {
    basis.iter().fold(Matrix4::zeros(), |acc, b| acc + b * b.transpose())
}

fn k_structure() -> Vec<Check> {
    let k = group_k();
    let (k1, k2) = (el(K1), el(K2));
    let minus = OrthElement::minus_identity();
    let mut out = vec![
        check("|K| = 16", k.order() == 16, format!("closure has {} elements", k.order())),
        check(
            "k1 and k2 have order 4",
            k1.order() == Ok(4) && k2.order() == Ok(4),
            format!("orders {:?}, {:?}", k1.order(), k2.order()),
        ),
        check(
            "k1 k2 = -k2 k1",
            k1.compose(&k2).approx_eq(&k2.compose(&k1).compose(&minus)),
            "",
        ),
        check("k1^2 k2^2 = -I", k1.pow(2).compose(&k2.pow(2)).approx_eq(&minus), ""),
    ];
    let central = k
        .elements()
        .iter()
        .all(|g| [k1.pow(2), k2.pow(2)].iter().all(|c| c.compose(g).approx_eq(&g.compose(c))));
    out.push(check("k1^2 and k2^2 are central", central, ""));

    let mut words = Vec::new();
    for e1 in 0..4 {
        for e2 in 0..4 {
            words.push(k1.pow(e1).compose(&k2.pow(e2)));
        }
    }
    let unique = words.iter().enumerate().all(|(i, a)| words[..i].iter().all(|b| !a.approx_eq(b)));
    let covers = words.iter().all(|w| k.contains(w));
    out.push(check("every element is k1^a k2^b uniquely", unique && covers, ""));

    let all_real = k.elements().iter().all(|g| eigen_oracle_has_real(g.matrix()));
    out.push(check("every element of K has a real eigenvalue", all_real, "complex spectrum of all 16 matrices"));
    out.push(check(
        "no K-invariant line",
        k.find_invariant_line().is_none(),
        "sign-pattern search over generators",
    ));

    let v1 = projector(&[Vector4::x(), Vector4::y()]);
    let v2 = projector(&[Vector4::z(), Vector4::w()]);
    let comm = commutant(&k.generator_matrices());
    let splitting = invariant_splitting(&k.generator_matrices());
    let planes: Vec<Matrix4<f64>> = splitting
        .map(|s| s.subspaces_of_dim(2).iter().map(|b| projector(b)).collect())
        .unwrap_or_default();
    let expected = |ps: &[Matrix4<f64>]| {
        ps.len() == 2
            && [v1, v2].iter().all(|p| ps.iter().any(|q| (p - q).abs().max() < 1e-8))
    };
    out.push(check(
        "exactly two invariant planes, span(1,i) and span(j,k)",
        comm.dim() == 2 && expected(&planes),
        format!("commutant dimension {}, {} invariant planes", comm.dim(), planes.len()),
    ));

    // candidate planes from the rotation decompositions of proper elements
    let mut candidates: Vec<Matrix4<f64>> = Vec::new();
    for g in k.elements().iter().filter(|g| !g.is_star()) {
        let Ok(d) = rotation_decomposition(g.matrix()) else { continue };
        let mut bases: Vec<Vec<Vector4<f64>>> = d.planes.iter().map(|p| vec![p.u, p.v]).collect();
        for space in [&d.fixed_space, &d.negated_space] {
            if space.len() == 2 {
                bases.push(space.clone());
            }
        }
        for b in bases {
            let p = projector(&b);
            let invariant = k.elements().iter().all(|h| is_invariant_subspace(h.matrix(), &b));
            if invariant && !candidates.iter().any(|q| (p - q).abs().max() < 1e-8) {
                candidates.push(p);
            }
        }
    }
    out.push(check(
        "decomposition planes invariant under K are span(1,i) and span(j,k)",
        expected(&candidates),
        format!("{} distinct invariant candidate planes", candidates.len()),
    ));
    out
}

fn trichotomy_sweep() -> Vec<Check> {
    let rows: Vec<SweepRow> = sweep_specs(SWEEP_BOUND).iter().map(|s| SweepRow::run(s, DEFAULT_MAX_ORDER)).collect();
    let errors: Vec<String> = rows
        .iter()
        .filter_map(|r| r.error.as_ref().map(|e| format!("{}: {e}", r.label())))
        .collect();
    let mismatches: Vec<&SweepRow> = rows.iter().filter(|r| r.matches == Some(false)).collect();
    let mut grouped: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for r in &mismatches {
        grouped
            .entry(format!("{} ({} expected, computed {})", r.family, r.expected.unwrap(), r.case.unwrap()))
            .or_default()
            .push(r.label().trim_start_matches(r.family.as_str()).trim().replace(' ', ","));
    }
    let mismatch_detail = grouped
        .iter()
        .map(|(k, v)| format!("{k}: [{}]", v.join("] [")))
        .collect::<Vec<_>>()
        .join("\n");
    let k_rows: Vec<String> = rows
        .iter()
        .filter(|r| r.case == Some(Case::GroupK) && r.family != "group-k")
        .map(|r| r.label().to_string())
        .collect();
    let k_expected = FamilySpec::TorusReflectionFull { subtype: ReflectionSubtype::P2gg, m: 2, n: 2 };
    let k_expected_label = SweepRow::run(&k_expected, DEFAULT_MAX_ORDER).label().to_string();

    // every computed verdict carries a witness that re-verifies
    let witnesses_ok = catalog_groups().iter().all(|(_, g)| g.classify().map(|c| c.verify(g)).unwrap_or(false));
    vec![
        check(
            "exactly one case holds for every catalog group",
            errors.is_empty(),
            format!("{} groups, {} failures {}", rows.len(), errors.len(), errors.join("; ")),
        ),
        check("every witness re-verifies", witnesses_ok, ""),
        check(
            "computed cases match the predicted cases",
            mismatches.is_empty(),
            format!("{} mismatches of {} groups\n{mismatch_detail}", mismatches.len(), rows.len()),
        ),
        check(
            "exactly one GroupK verdict across the parameterized families (p2gg, n = 2)",
            k_rows == vec![k_expected_label],
            format!("GroupK at: {}", k_rows.join(", ")),
        ),
    ]
}

fn chiral_element() -> Vec<Check> {
    let mut disagreements = Vec::new();
    let mut total = 0;
    for (spec, g) in catalog_groups() {
        for e in g.elements() {
            total += 1;
            if e.has_invariant_line() != eigen_oracle_has_real(e.matrix()) {
                disagreements.push(format!("{spec}: {e}"));
            }
        }
    }
    let catalog = check(
        "has_invariant_line agrees with the eigenvalue oracle on catalog groups",
        disagreements.is_empty(),
        format!("{total} elements, {} disagreements {}", disagreements.len(), disagreements.join("; ")),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut random_bad = 0;
    let mut with_line = 0;
    for i in 0..1000 {
        let z = random_unit(&mut rng);
        let w = match i % 4 {
            // w conjugate to +-z: has an invariant line
            0 | 1 => {
                let x = random_unit(&mut rng);
                let c = x.inverse() * z * x;
                if i % 4 == 0 {
                    c
                } else {
                    -c
                }
            }
            _ => random_unit(&mut rng),
        };
        let e = OrthElement::new(i % 10 == 9, z, w);
        with_line += e.has_invariant_line() as usize;
        if e.has_invariant_line() != eigen_oracle_has_real(e.matrix()) {
            random_bad += 1;
        }
    }
    let random = check(
        "has_invariant_line agrees with the eigenvalue oracle on 1000 random elements",
        random_bad == 0,
        format!("{random_bad} disagreements, {with_line} elements with a line"),
    );

    let mut failing = Vec::new();
    for m in 2..=12 {
        for n in 2..=12 {
            if m.max(n) >= 3 && eigen_oracle_has_real(lemma_enem_product(m, n).matrix()) {
                failing.push(format!("({m},{n})"));
            }
        }
    }
    let lemma = check(
        "lemma product has no real eigenspace for 2 <= m, n <= 12, max(m, n) >= 3",
        failing.is_empty(),
        format!(
            "real eigenvalue at {} pairs: {} (the product rotates by 2 pi/m and 2 pi/n)",
            failing.len(),
            failing.join(" ")
        ),
    );
    let boundary = check(
        "lemma product at m = n = 2 is -I",
        lemma_enem_product(2, 2).approx_eq(&OrthElement::minus_identity()),
        "",
    );
    vec![catalog, random, lemma, boundary]
}

fn trace_separation() -> Vec<Check> {
    let s5 = 5f64.sqrt();
    let expected_z = Quaternion::new(-(s5 + 1.0) / 4.0, 0.0, -(s5 - 1.0) / 4.0, -0.5);
    let expected_w = [
        Quaternion::new(-(s5 - 1.0) / 4.0, -(s5 + 1.0) / 4.0, 0.0, 0.5),
        Quaternion::new((s5 - 1.0) / 4.0, (s5 + 1.0) / 4.0, 0.0, -0.5),
    ];
    let traces = [(-(s5 + 1.0) / 2.0, (1.0 - s5) / 2.0), (-(s5 + 1.0) / 2.0, (s5 - 1.0) / 2.0)];
    let mut out = Vec::new();
    for (idx, plus) in [false, true].into_iter().enumerate() {
        let name = if plus { "+1/60 [I x Ibar]" } else { "+-1/60 [I x Ibar]" };
        let p = polyhedral_product(plus);
        // pairs are defined up to a simultaneous sign
        let sign = if p.z().quaternion().distance(expected_z) < 0.5 { 1.0 } else { -1.0 };
        let (z, w) = (p.z().quaternion().scale(sign), p.w().quaternion().scale(sign));
        let tz = z.re() * 2.0;
        let tw = w.re() * 2.0;
        out.push(check(
            &format!("{name}: product matches the displayed pair"),
            z.distance(expected_z) <= 1e-9 && w.distance(expected_w[idx]) <= 1e-9,
            format!("z = {z}, w = {w}"),
        ));
        out.push(check(
            &format!("{name}: traces z + zbar and w + wbar"),
            (tz - traces[idx].0).abs() <= 1e-9 && (tw - traces[idx].1).abs() <= 1e-9,
            format!("{tz:.12}, {tw:.12}"),
        ));
        out.push(check(
            &format!("{name}: product has no invariant line"),
            !p.has_invariant_line() && !eigen_oracle_has_real(p.matrix()),
            "",
        ));
    }
    out
}

fn lcp_equivalence() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1c9);
    let mut bad_equiv = Vec::new();
    let mut bad_witness = Vec::new();
    let mut bad_scan = Vec::new();
    let groups = catalog_groups();
    for (spec, g) in &groups {
        let witness = lcp_witness(g);
        if witness.is_some() != g.find_invariant_line().is_some() {
            bad_equiv.push(spec.to_string());
        }
        match witness {
            Some(w) => {
                let det_ok = (w.determinant() + 1.0).abs() <= eps() * 10.0;
                let commutes = g.elements().iter().all(|e| (w * e.matrix() - e.matrix() * w).abs().max() <= eps() * 10.0);
                if !det_ok || !commutes {
                    bad_witness.push(spec.to_string());
                }
            }
            None => {
                let gens = g.generator_matrices();
                let comm = commutant(&gens);
                for _ in 0..200 {
                    let h = OrthElement::new(true, random_unit(&mut rng), random_unit(&mut rng));
                    let Some(x) = orthogonalize(&comm.project(h.matrix())) else { continue };
                    // commuting with the generators is commuting with the group
                    if x.determinant() < 0.0 && gens.iter().all(|e| (x * e - e * x).abs().max() <= 1e-6) {
                        bad_scan.push(spec.to_string());
                        break;
                    }
                }
            }
        }
    }
    vec![
        check(
            "a witness exists iff there is an invariant line",
            bad_equiv.is_empty(),
            format!("{} groups; {}", groups.len(), bad_equiv.join(", ")),
        ),
        check(
            "every witness has det -1 and commutes with the group",
            bad_witness.is_empty(),
            bad_witness.join(", "),
        ),
        check(
            "no det -1 orthogonal commuting matrix found for groups without a witness",
            bad_scan.is_empty(),
            format!("200 projected samples per group; {}", bad_scan.join(", ")),
        ),
    ]
}

/// Fifty double rotations of orders 3 to 12: all ordinary ones with
/// `1 <= a1 < a2 < m/2`, topped up with isoclinic ones.
pub fn double_rotation_test_set() -> Vec<(i64, i64, i64)> {
    let gcd = |mut a: i64, mut b: i64| {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };
    let mut ordinary = Vec::new();
    let mut isoclinic = Vec::new();
    for m in 3..=12i64 {
        for a1 in 1..m {
            for a2 in a1..m {
                if 2 * a2 >= m || gcd(gcd(a1, a2), m) != 1 {
                    continue;
                }
                if a1 == a2 {
                    isoclinic.push((a1, a2, m));
                } else {
                    ordinary.push((a1, a2, m));
                }
            }
        }
    }
    let mut set = ordinary;
    set.truncate(50);
    let room = 50 - set.len();
    set.extend(isoclinic.into_iter().take(room));
    set
}

fn chirality_invariant_suite() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc41);
    let set = double_rotation_test_set();
    let orders_ok = set.len() == 50 && set.iter().all(|&(_, _, m)| (3..=12).contains(&m));
    let isoclinic_count = set.iter().filter(|(a1, a2, _)| a1 == a2).count();
    let mut proper_bad = Vec::new();
    let mut improper_bad = Vec::new();
    let mut redecomp_bad = Vec::new();
    let mut errors = Vec::new();
    for &(a1, a2, m) in &set {
        let e = match OrthElement::from_matrix(&block_rotation(a1, a2, m)) {
            Ok(e) => e,
            Err(err) => {
                errors.push(format!("({a1},{a2},{m}): {err}"));
                continue;
            }
        };
        let base = match chirality_invariant(&e) {
            Ok(d) => d,
            Err(err) => {
                errors.push(format!("({a1},{a2},{m}): {err}"));
                continue;
            }
        };
        if (base.a1 as i64, base.a2 as i64, base.m as i64) != (a1, a2, m) {
            errors.push(format!("({a1},{a2},{m}): read back {base:?}"));
        }
        for star in [false, true] {
            for _ in 0..200 {
                let h = OrthElement::new(star, random_unit(&mut rng), random_unit(&mut rng));
                let expected = if star { (m as usize - base.lk_class) % m as usize } else { base.lk_class };
                let ok = chirality_invariant(&e.conjugate_by(&h)).map(|d| d.lk_class == expected).unwrap_or(false);
                if !ok {
                    let bucket = if star { &mut improper_bad } else { &mut proper_bad };
                    bucket.push(format!("({a1},{a2},{m})"));
                    break;
                }
            }
        }
        if base.isoclinic {
            for _ in 0..20 {
                if chirality_invariant_random(&e, &mut rng).ok() != Some(base) {
                    redecomp_bad.push(format!("({a1},{a2},{m})"));
                    break;
                }
            }
        }
    }
    vec![
        check(
            "test set: 50 double rotations of orders 3 to 12, ordinary and isoclinic",
            orders_ok && isoclinic_count > 0 && isoclinic_count < 50 && errors.is_empty(),
            format!("{isoclinic_count} isoclinic; {}", errors.join("; ")),
        ),
        check(
            "lk class constant under 200 random SO(4) conjugations",
            proper_bad.is_empty(),
            proper_bad.join(" "),
        ),
        check(
            "lk class negated mod m under 200 random O(4) \\ SO(4) conjugations",
            improper_bad.is_empty(),
            improper_bad.join(" "),
        ),
        check(
            "isoclinic invariant constant across 20 random re-decompositions",
            redecomp_bad.is_empty(),
            redecomp_bad.join(" "),
        ),
    ]
}

fn orbit_permutation_suite() -> Vec<Check> {
    let mut reversal_bad = Vec::new();
    let mut cases = 0;
    for m in 3..=30i64 {
        for a in 1..m {
            let Ok(p) = orbit_permutation(a, m) else { continue };
            cases += 1;
            let mut r = orbit_permutation(m - a, m).expect("m - a is valid whenever a is");
            r.reverse();
            if p != r {
                reversal_bad.push(format!("({a},{m})"));
            }
        }
    }
    vec![
        check(
            "orbit_permutation(1, 5) = (1,2,3,4)",
            orbit_permutation(1, 5).ok() == Some(vec![1, 2, 3, 4]),
            "",
        ),
        check(
            "orbit_permutation(4, 5) = (4,3,2,1)",
            orbit_permutation(4, 5).ok() == Some(vec![4, 3, 2, 1]),
            "",
        ),
        check(
            "orbit_permutation(2, 5) = (3,1,4,2)",
            orbit_permutation(2, 5).ok() == Some(vec![3, 1, 4, 2]),
            "",
        ),
        check(
            "(m - a, m) reverses (a, m) for all m <= 30",
            reversal_bad.is_empty(),
            format!("{cases} pairs; {}", reversal_bad.join(" ")),
        ),
    ]
}

/// Canonical reports for a fixed set of inputs, concatenated.
pub fn determinism_fixture() -> String {
    let inputs: [(&str, &[&str]); 4] = [
        ("K", &[K1, K2]),
        ("trivial", &["[1,1]"]),
        ("omega", &["[w,1]"]),
        ("p2mm", &["[i,i]", "[i,-i]", "*[i,i]", "*[k,k]"]),
    ];
    let mut out = String::new();
    for (name, gens) in inputs {
        let elems: Vec<OrthElement> = gens.iter().map(|s| el(s)).collect();
        let g = FiniteGroup::closure(&elems, DEFAULT_MAX_ORDER).expect("fixture groups are finite");
        let c = g.classify().expect("fixture groups classify");
        let input = InputEcho {
            name: name.to_string(),
            generators: gens.iter().map(|s| s.to_string()).collect(),
            max_order: DEFAULT_MAX_ORDER,
        };
        out.push_str(&Report::new(input, &g, &c, None).to_json());
    }
    let rows = sweep_specs(3).iter().map(|s| SweepRow::run(s, DEFAULT_MAX_ORDER)).collect();
    out.push_str(&SweepReport::new(rows).to_json());
    out
}

fn determinism() -> Vec<Check> {
    let first = determinism_fixture();
    let second = determinism_fixture();
    let mut rng = ChaCha8Rng::seed_from_u64(0x500);
    let mut round_trip_bad = Vec::new();
    for _ in 0..500 {
        let depth = rng.gen_range(1..5);
        let expr = random_scalar(&mut rng, depth);
        let printed = expr.to_string();
        match parse_scalar(&printed) {
            Ok(back) if back.to_string() == printed && back == expr => {}
            Ok(back) => round_trip_bad.push(format!("{printed} -> {back}")),
            Err(e) => round_trip_bad.push(format!("{printed}: {e}")),
        }
    }
    vec![
        check(
            "byte-identical reports across runs",
            first == second,
            format!("{} bytes", first.len()),
        ),
        check(
            "scalar parse/print round trip on 500 generated expressions",
            round_trip_bad.is_empty(),
            round_trip_bad.join("; "),
        ),
    ]
}
