//! Constant-modulus factor constellations and their Kronecker expansion.
//!
//! An `M`-PSK set can be generated as the elementwise-product expansion of
//! smaller unit-modulus sets. Two constructions are supported:
//!
//! * **Scheme 1** factors an `M`-PSK set into `P = log2(M)` binary sets: the
//!   antipodal pair `{1, e^{j*pi}}` plus `P - 1` binary sets rotated by
//!   `pi / 2^p`.
//! * **Scheme 2** uses ordinary `M_p`-PSK sets of lower or equal order.
//!
//! All points carry Gray bit labels so a single symbol error costs as few bit
//! errors as possible.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for the unit-modulus invariant.
pub const MODULUS_TOL: f64 = 1e-12;
/// Two expanded points closer than this are treated as the same point.
pub const MERGE_TOL: f64 = 1e-9;

/// Which of the two factorization constructions produced a set or config.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SchemeId {
    Scheme1,
    Scheme2,
}

/// An ordered list of unit-modulus points with a bijective bit-label map.
///
/// `labels[i]` is the bit pattern of `points[i]`, `bits_per_symbol` wide,
/// serialized MSB first.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstellationSet {
    points: Vec<Complex64>,
    labels: Vec<u32>,
    index_of_label: Vec<usize>,
    bits_per_symbol: u32,
}

impl ConstellationSet {
    /// Builds a set, enforcing the type invariants: every point unit modulus,
    /// all points pairwise distinct, cardinality a power of two, and labels a
    /// bijection onto `{0,1}^bits_per_symbol`.
    pub fn new(points: Vec<Complex64>, labels: Vec<u32>) -> Result<Self> {
        let m = points.len();
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::InvalidCardinality(m));
        }
        if labels.len() != m {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {} points",
                labels.len(),
                m
            )));
        }
        for p in &points {
            if (p.norm() - 1.0).abs() >= MODULUS_TOL {
                return Err(Error::InvalidArgument(format!(
                    "point {p} is not unit modulus"
                )));
            }
        }
        for i in 0..m {
            for j in (i + 1)..m {
                if (points[i] - points[j]).norm() < MERGE_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "points {i} and {j} coincide"
                    )));
                }
            }
        }
        let bits_per_symbol = m.trailing_zeros();
        let mut index_of_label = vec![usize::MAX; m];
        for (i, &l) in labels.iter().enumerate() {
            if l as usize >= m || index_of_label[l as usize] != usize::MAX {
                return Err(Error::InvalidArgument(
                    "labels are not a bijection".into(),
                ));
            }
            index_of_label[l as usize] = i;
        }
        Ok(ConstellationSet {
            points,
            labels,
            index_of_label,
            bits_per_symbol,
        })
    }

    pub fn cardinality(&self) -> usize {
        self.points.len()
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.bits_per_symbol
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn point(&self, index: usize) -> Complex64 {
        self.points[index]
    }

    /// The pilot value: the first point of the set.
    pub fn first_point(&self) -> Complex64 {
        self.points[0]
    }

    pub fn label_of(&self, index: usize) -> u32 {
        self.labels[index]
    }

    pub fn index_of_label(&self, label: u32) -> usize {
        self.index_of_label[label as usize]
    }

    /// Index of the nearest point in Euclidean distance; ties resolve to the
    /// lowest point index.
    pub fn nearest_index(&self, z: Complex64) -> usize {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let d = (z - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Exact membership lookup (within `MERGE_TOL`).
    pub fn exact_index(&self, z: Complex64) -> Option<usize> {
        self.points
            .iter()
            .position(|p| (z - p).norm() < MERGE_TOL)
    }

    /// Appends the label bits of `point_index`, MSB first.
    pub fn push_label_bits(&self, point_index: usize, out: &mut Vec<u8>) {
        let label = self.labels[point_index];
        for k in (0..self.bits_per_symbol).rev() {
            out.push(((label >> k) & 1) as u8);
        }
    }

    /// Reads `bits_per_symbol` bits (MSB first) into a label value.
    pub fn label_from_bits(&self, bits: &[u8]) -> u32 {
        debug_assert_eq!(bits.len(), self.bits_per_symbol as usize);
        bits.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32)
    }
}

fn gray(m: u32) -> u32 {
    m ^ (m >> 1)
}

/// Standard `M`-PSK generator: points `e^{j(2*pi*m/M + rotation)}` in
/// ascending phase order with Gray bit labels.
pub fn make_psk(m: usize, rotation: f64) -> Result<ConstellationSet> {
    if m < 2 || !m.is_power_of_two() {
        return Err(Error::InvalidCardinality(m));
    }
    let points = (0..m)
        .map(|k| {
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / m as f64 + rotation)
        })
        .collect();
    let labels = (0..m as u32).map(gray).collect();
    ConstellationSet::new(points, labels)
}

/// Scheme-1 factor sets for an `M`-PSK target: the antipodal binary set
/// followed by `log2(M) - 1` binary sets whose second point sits at
/// `pi + pi/2^p`.
pub fn scheme1_sets(m: usize) -> Result<Vec<ConstellationSet>> {
    if m < 2 || !m.is_power_of_two() {
        return Err(Error::InvalidCardinality(m));
    }
    let p_count = m.trailing_zeros();
    let mut sets = Vec::with_capacity(p_count as usize);
    sets.push(make_psk(2, 0.0)?);
    for p in 1..p_count {
        let phase = std::f64::consts::PI + std::f64::consts::PI / f64::from(1u32 << p);
        let points = vec![Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, phase)];
        sets.push(ConstellationSet::new(points, vec![0, 1])?);
    }
    Ok(sets)
}

/// Scheme-2 factor sets: one unrotated `M_p`-PSK per requested cardinality.
pub fn scheme2_sets(cardinalities: &[usize]) -> Result<Vec<ConstellationSet>> {
    if cardinalities.is_empty() {
        return Err(Error::InvalidArgument(
            "scheme 2 needs at least one factor cardinality".into(),
        ));
    }
    cardinalities.iter().map(|&m| make_psk(m, 0.0)).collect()
}

/// Expands factor sets into the set of all elementwise products, merging
/// duplicates and sorting by phase. Labels are Gray-assigned in phase order.
pub fn kron_expand(sets: &[ConstellationSet]) -> Result<ConstellationSet> {
    if sets.is_empty() {
        return Err(Error::InvalidArgument("empty factor list".into()));
    }
    let mut products = vec![Complex64::new(1.0, 0.0)];
    for set in sets {
        let mut next = Vec::with_capacity(products.len() * set.cardinality());
        for a in &products {
            for b in set.points() {
                next.push(a * b);
            }
        }
        products = next;
    }
    let mut distinct: Vec<Complex64> = Vec::new();
    for z in products {
        if !distinct.iter().any(|p| (z - p).norm() < MERGE_TOL) {
            distinct.push(z);
        }
    }
    distinct.sort_by(|a, b| {
        let pa = a.arg().rem_euclid(2.0 * std::f64::consts::PI);
        let pb = b.arg().rem_euclid(2.0 * std::f64::consts::PI);
        pa.partial_cmp(&pb).unwrap()
    });
    let labels = (0..distinct.len() as u32).map(gray).collect();
    ConstellationSet::new(distinct, labels)
}

/// Minimum Euclidean distance over distinct point pairs.
pub fn min_distance(set: &ConstellationSet) -> Result<f64> {
    if set.cardinality() < 2 {
        return Err(Error::UndefinedDistance);
    }
    let pts = set.points();
    let mut d = f64::INFINITY;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            d = d.min((pts[i] - pts[j]).norm());
        }
    }
    Ok(d)
}

/// Gaussian tail integral `Q(x) = erfc(x / sqrt(2)) / 2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Bit-error probability of a binary factor set over AWGN with noise spectral
/// density `n0`: `Q(d_min / sqrt(2 * n0))`.
///
/// Only binary sets have this closed form here; larger factor sets are
/// measured empirically by the simulation harness.
pub fn set_error_prob(set: &ConstellationSet, n0: f64) -> Result<f64> {
    if set.cardinality() != 2 {
        return Err(Error::UnsupportedCardinality(set.cardinality()));
    }
    if n0 <= 0.0 {
        return Err(Error::Domain(format!("n0 must be positive, got {n0}")));
    }
    Ok(q_function(min_distance(set)? / (2.0 * n0).sqrt()))
}

/// Describes the factorization behind a set family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeSpec {
    pub scheme: SchemeId,
    /// Target (expanded) cardinality for Scheme 1.
    pub base_m: usize,
    /// Factor cardinalities; Scheme 2 only.
    pub factor_cardinalities: Vec<usize>,
}

impl SchemeSpec {
    pub fn scheme1(m: usize) -> Self {
        SchemeSpec {
            scheme: SchemeId::Scheme1,
            base_m: m,
            factor_cardinalities: Vec::new(),
        }
    }

    pub fn scheme2(cardinalities: Vec<usize>) -> Self {
        let base_m = cardinalities.iter().copied().max().unwrap_or(0);
        SchemeSpec {
            scheme: SchemeId::Scheme2,
            base_m,
            factor_cardinalities: cardinalities,
        }
    }

    /// Materializes the factor sets, validating the construction rules.
    pub fn sets(&self) -> Result<Vec<ConstellationSet>> {
        match self.scheme {
            SchemeId::Scheme1 => scheme1_sets(self.base_m),
            SchemeId::Scheme2 => {
                for &c in &self.factor_cardinalities {
                    if c > self.base_m {
                        return Err(Error::InvalidConfig(format!(
                            "factor cardinality {c} exceeds base cardinality {}",
                            self.base_m
                        )));
                    }
                }
                scheme2_sets(&self.factor_cardinalities)
            }
        }
    }
}

/// JSON-facing description of one set: points as `[re, im]` pairs and labels
/// as binary strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SetDescriptor {
    pub cardinality: usize,
    pub points: Vec<[f64; 2]>,
    pub labels: Vec<String>,
}

impl From<&ConstellationSet> for SetDescriptor {
    fn from(set: &ConstellationSet) -> Self {
        let bits = set.bits_per_symbol() as usize;
        SetDescriptor {
            cardinality: set.cardinality(),
            points: set.points().iter().map(|p| [p.re, p.im]).collect(),
            labels: (0..set.cardinality())
                .map(|i| format!("{:0width$b}", set.label_of(i), width = bits))
                .collect(),
        }
    }
}

/// Full dump produced by the `constellation` CLI subcommand: the factor sets
/// of a scheme plus their expansion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstellationReport {
    pub scheme: u8,
    pub m: usize,
    pub factor_cardinalities: Vec<usize>,
    pub factors: Vec<SetDescriptor>,
    pub expanded: SetDescriptor,
}

pub fn constellation_report(scheme: SchemeId, m: usize, factors: &[usize]) -> Result<ConstellationReport> {
    let spec = match scheme {
        SchemeId::Scheme1 => SchemeSpec::scheme1(m),
        SchemeId::Scheme2 => {
            let mut spec = SchemeSpec::scheme2(factors.to_vec());
            spec.base_m = spec.base_m.max(m);
            spec
        }
    };
    let sets = spec.sets()?;
    let expanded = kron_expand(&sets)?;
    Ok(ConstellationReport {
        scheme: match scheme {
            SchemeId::Scheme1 => 1,
            SchemeId::Scheme2 => 2,
        },
        m,
        factor_cardinalities: sets.iter().map(|s| s.cardinality()).collect(),
        factors: sets.iter().map(SetDescriptor::from).collect(),
        expanded: SetDescriptor::from(&expanded),
    })
}
