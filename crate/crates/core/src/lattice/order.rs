use std::collections::BTreeSet;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest Boolean lattice order accepted (`D = 2^20`).
pub const MAX_BOOLEAN_ORDER: u32 = 20;
/// Largest lattice built from an explicit cover relation.
pub const MAX_GENERAL_SIZE: usize = 4096;
/// Largest lattice for which a dense zeta matrix is materialised.
pub const MAX_DENSE_ZETA: usize = 4096;

/// A finite lattice with its elements stored in a fixed linear extension.
///
/// Index 0 is the least element and `i ≤ j` in the order implies `i ≤ j` as
/// indices, so the zeta matrix is upper triangular with a unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    labels: Vec<String>,
    repr: Repr,
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    /// `{0,1}^n` under the bitwise order, sorted by (popcount, value).
    Boolean {
        order: u32,
        masks: Vec<u32>,
        index_of: Vec<u32>,
    },
    Dense {
        /// Row `i` is the up-set of `i` as a bitset.
        up: Vec<Vec<u64>>,
        join: Vec<u32>,
        covers: Vec<(usize, usize)>,
    },
}

/// Serialized form: `{ "size", "cover_pairs", "labels" }`, with 0-based
/// indices into `labels`. A pair `[a, b]` states `a < b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub size: usize,
    pub cover_pairs: Vec<(usize, usize)>,
    #[serde(default)]
    pub labels: Vec<String>,
}

fn words(n: usize) -> usize {
    n.div_ceil(64)
}

fn bit(set: &[u64], i: usize) -> bool {
    set[i / 64] >> (i % 64) & 1 == 1
}

fn set_bit(set: &mut [u64], i: usize) {
    set[i / 64] |= 1 << (i % 64);
}

/// Boolean lattice `{0,1}^n`: `D = 2^n` elements, join is bitwise OR.
pub fn build_boolean_lattice(n: u32) -> Result<Lattice> {
    if n == 0 || n > MAX_BOOLEAN_ORDER {
        return Err(Error::precondition(format!(
            "Boolean lattice order must be in 1..={MAX_BOOLEAN_ORDER}, got {n}"
        )));
    }
    let size = 1usize << n;
    let mut masks: Vec<u32> = (0..size as u32).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let mut index_of = vec![0u32; size];
    for (i, &m) in masks.iter().enumerate() {
        index_of[m as usize] = i as u32;
    }
    let labels = masks
        .iter()
        .map(|m| (0..n).map(|b| if m >> b & 1 == 1 { '1' } else { '0' }).collect())
        .collect();
    Ok(Lattice {
        labels,
        repr: Repr::Boolean {
            order: n,
            masks,
            index_of,
        },
    })
}

/// Builds a lattice from a strict cover (or any generating) relation.
///
/// The order is the reflexive-transitive closure of `cover_pairs`. Elements
/// are renumbered into a linear extension (ties broken by input index), so
/// `labels` of the result follow the new order.
pub fn build_lattice_from_covers(
    size: usize,
    cover_pairs: &[(usize, usize)],
    labels: Option<&[String]>,
) -> Result<Lattice> {
    if size == 0 || size > MAX_GENERAL_SIZE {
        return Err(Error::precondition(format!(
            "lattice size must be in 1..={MAX_GENERAL_SIZE}, got {size}"
        )));
    }
    let input_labels: Vec<String> = match labels {
        Some(l) if !l.is_empty() => {
            if l.len() != size {
                return Err(Error::precondition(format!(
                    "{} labels given for {size} elements",
                    l.len()
                )));
            }
            l.to_vec()
        }
        _ => (0..size).map(|i| i.to_string()).collect(),
    };
    let mut succ = vec![BTreeSet::new(); size];
    let mut indegree = vec![0usize; size];
    for &(a, b) in cover_pairs {
        if a >= size || b >= size {
            return Err(Error::InvalidOrder(format!(
                "cover pair ({a}, {b}) out of range for size {size}"
            )));
        }
        if a == b {
            return Err(Error::InvalidOrder(format!("cover pair ({a}, {a}) is a loop")));
        }
        if succ[a].insert(b) {
            indegree[b] += 1;
        }
    }

    // Kahn's algorithm, smallest ready index first
    let mut ready: BTreeSet<usize> = (0..size).filter(|&i| indegree[i] == 0).collect();
    let mut extension = Vec::with_capacity(size);
    while let Some(i) = ready.pop_first() {
        extension.push(i);
        for &j in &succ[i] {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                ready.insert(j);
            }
        }
    }
    if extension.len() != size {
        return Err(Error::InvalidOrder("cover relation contains a cycle".into()));
    }
    let mut position = vec![0usize; size];
    for (pos, &old) in extension.iter().enumerate() {
        position[old] = pos;
    }
    let labels: Vec<String> = extension.iter().map(|&old| input_labels[old].clone()).collect();
    let covers: Vec<(usize, usize)> = extension
        .iter()
        .flat_map(|&old| succ[old].iter().map(move |&s| (old, s)))
        .map(|(a, b)| (position[a], position[b]))
        .collect();

    // up-sets in reverse linear-extension order
    let w = words(size);
    let mut up = vec![vec![0u64; w]; size];
    for i in (0..size).rev() {
        let mut row = vec![0u64; w];
        set_bit(&mut row, i);
        for &(a, b) in covers.iter().filter(|&&(a, _)| a == i) {
            debug_assert_eq!(a, i);
            for (r, u) in row.iter_mut().zip(&up[b]) {
                *r |= u;
            }
        }
        up[i] = row;
    }

    let minimal: Vec<usize> = (0..size)
        .filter(|&j| (0..j).all(|i| !bit(&up[i], j)))
        .collect();
    if minimal.len() > 1 {
        return Err(Error::NotALattice {
            left: labels[minimal[0]].clone(),
            right: labels[minimal[1]].clone(),
            bound: "meet",
        });
    }

    let mut join = vec![0u32; size * size];
    let mut common = vec![0u64; w];
    for i in 0..size {
        join[i * size + i] = i as u32;
        for j in i + 1..size {
            for (c, (a, b)) in common.iter_mut().zip(up[i].iter().zip(&up[j])) {
                *c = a & b;
            }
            let candidate = common
                .iter()
                .enumerate()
                .find(|(_, &word)| word != 0)
                .map(|(k, &word)| k * 64 + word.trailing_zeros() as usize);
            let least = candidate.filter(|&c| {
                common
                    .iter()
                    .zip(&up[c])
                    .all(|(need, have)| need & !have == 0)
            });
            match least {
                Some(c) => {
                    join[i * size + j] = c as u32;
                    join[j * size + i] = c as u32;
                }
                None => {
                    return Err(Error::NotALattice {
                        left: labels[i].clone(),
                        right: labels[j].clone(),
                        bound: "join",
                    })
                }
            }
        }
    }

    let lattice = Lattice {
        labels,
        repr: Repr::Dense { up, join, covers },
    };
    lattice.check_structure()?;
    Ok(lattice)
}

impl Lattice {
    /// Parses `bool:n` shorthand.
    pub fn parse_shorthand(s: &str) -> Result<Lattice> {
        let rest = s
            .strip_prefix("bool:")
            .ok_or_else(|| Error::precondition(format!("unknown lattice shorthand {s:?}")))?;
        let n: u32 = rest
            .trim()
            .parse()
            .map_err(|_| Error::precondition(format!("bad Boolean lattice order in {s:?}")))?;
        build_boolean_lattice(n)
    }

    pub fn from_spec(spec: &LatticeSpec) -> Result<Lattice> {
        build_lattice_from_covers(spec.size, &spec.cover_pairs, Some(&spec.labels))
    }

    /// Serialized form, in this lattice's linear extension.
    pub fn to_spec(&self) -> LatticeSpec {
        LatticeSpec {
            size: self.size(),
            cover_pairs: self.cover_pairs(),
            labels: self.labels.clone(),
        }
    }

    /// `D = |P|`.
    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `n` for a Boolean lattice `{0,1}^n`.
    pub fn boolean_order(&self) -> Option<u32> {
        match &self.repr {
            Repr::Boolean { order, .. } => Some(*order),
            Repr::Dense { .. } => None,
        }
    }

    /// `ζ(i, j) = 1` iff `i ≤ j`.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        match &self.repr {
            Repr::Boolean { masks, .. } => masks[i] & !masks[j] == 0,
            Repr::Dense { up, .. } => bit(&up[i], j),
        }
    }

    /// Least upper bound `i ∨ j`.
    pub fn join(&self, i: usize, j: usize) -> usize {
        match &self.repr {
            Repr::Boolean {
                masks, index_of, ..
            } => index_of[(masks[i] | masks[j]) as usize] as usize,
            Repr::Dense { join, .. } => join[i * self.size() + j] as usize,
        }
    }

    /// Generating relation: covers for Boolean lattices, the input pairs
    /// (renumbered) otherwise.
    pub fn cover_pairs(&self) -> Vec<(usize, usize)> {
        match &self.repr {
            Repr::Boolean {
                order,
                masks,
                index_of,
            } => {
                let mut out = Vec::new();
                for (i, &m) in masks.iter().enumerate() {
                    for b in 0..*order {
                        if m >> b & 1 == 0 {
                            out.push((i, index_of[(m | 1 << b) as usize] as usize));
                        }
                    }
                }
                out
            }
            Repr::Dense { covers, .. } => covers.clone(),
        }
    }

    /// Dense zeta matrix `Z_ij = ζ(i, j)`.
    pub fn zeta_matrix(&self) -> Result<DMatrix<f64>> {
        let d = self.size();
        if d > MAX_DENSE_ZETA {
            return Err(Error::precondition(format!(
                "dense zeta matrix refused for D = {d} > {MAX_DENSE_ZETA}"
            )));
        }
        Ok(DMatrix::from_fn(d, d, |i, j| if self.leq(i, j) { 1.0 } else { 0.0 }))
    }

    /// Number of comparable pairs, `Σ ζ`.
    pub fn zeta_count(&self) -> usize {
        match &self.repr {
            Repr::Boolean { order, .. } => 3usize.pow(*order),
            Repr::Dense { up, .. } => up
                .iter()
                .map(|row| row.iter().map(|w| w.count_ones() as usize).sum::<usize>())
                .sum(),
        }
    }

    /// `η = Z·δ`, i.e. `η_p = Σ_{q ≥ p} δ_q`.
    pub fn zeta_apply(&self, delta: &[f64]) -> Vec<f64> {
        assert_eq!(delta.len(), self.size());
        match &self.repr {
            Repr::Boolean {
                order,
                masks,
                index_of,
            } => {
                // superset-sum transform, O(n·2^n)
                let mut acc: Vec<f64> = (0..delta.len())
                    .map(|m| delta[index_of[m] as usize])
                    .collect();
                for b in 0..*order {
                    let bit = 1usize << b;
                    for m in 0..acc.len() {
                        if m & bit == 0 {
                            acc[m] += acc[m | bit];
                        }
                    }
                }
                masks.iter().map(|&m| acc[m as usize]).collect()
            }
            Repr::Dense { up, .. } => up
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    (i..delta.len())
                        .filter(|&j| bit(row, j))
                        .map(|j| delta[j])
                        .sum()
                })
                .collect(),
        }
    }

    /// Structural checks: least element at index 0, zeta upper triangular
    /// with unit diagonal (so `det Z = 1`), joins are upper bounds.
    pub fn check_structure(&self) -> Result<()> {
        let d = self.size();
        for j in 0..d {
            if !self.leq(0, j) {
                return Err(Error::InvalidOrder(format!(
                    "index 0 is not below {}",
                    self.labels[j]
                )));
            }
        }
        if d <= MAX_DENSE_ZETA {
            for i in 0..d {
                if !self.leq(i, i) {
                    return Err(Error::InvalidOrder(format!("{} not reflexive", self.labels[i])));
                }
                for j in 0..i {
                    if self.leq(i, j) {
                        return Err(Error::InvalidOrder(format!(
                            "linear extension violated: {} ≤ {}",
                            self.labels[i], self.labels[j]
                        )));
                    }
                }
                for j in 0..d {
                    let k = self.join(i, j);
                    if !self.leq(i, k) || !self.leq(j, k) {
                        return Err(Error::InvalidOrder(format!(
                            "join of {} and {} is not an upper bound",
                            self.labels[i], self.labels[j]
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> Lattice {
        let covers: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        build_lattice_from_covers(n, &covers, None).unwrap()
    }

    fn diamond() -> Lattice {
        let labels: Vec<String> = ["bot", "a", "b", "top"].iter().map(|s| s.to_string()).collect();
        build_lattice_from_covers(4, &[(0, 1), (0, 2), (1, 3), (2, 3)], Some(&labels)).unwrap()
    }

    #[test]
    fn boolean_one_is_two_chain() {
        let l = build_boolean_lattice(1).unwrap();
        assert_eq!(l.size(), 2);
        let z = l.zeta_matrix().unwrap();
        assert_eq!(z, DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]));
    }

    #[test]
    fn boolean_two_join_is_or() {
        let l = build_boolean_lattice(2).unwrap();
        assert_eq!(l.size(), 4);
        // labels list bit 1 first: "10" is p = (1, 0)
        let a = l.index_of_label("10").unwrap();
        let b = l.index_of_label("01").unwrap();
        assert_eq!(l.label(l.join(a, b)), "11");
    }

    #[test]
    fn boolean_zeta_counts() {
        for n in 1..=6 {
            let l = build_boolean_lattice(n).unwrap();
            let z = l.zeta_matrix().unwrap();
            assert_eq!(z.sum() as usize, 3usize.pow(n));
            assert_eq!(l.zeta_count(), 3usize.pow(n));
            l.check_structure().unwrap();
        }
    }

    #[test]
    fn boolean_size_guard() {
        assert!(build_boolean_lattice(0).is_err());
        assert!(build_boolean_lattice(21).is_err());
    }

    #[test]
    fn chain_join_is_max() {
        let l = chain(3);
        assert_eq!(l.join(1, 2), 2);
        assert_eq!(l.join(0, 1), 1);
    }

    #[test]
    fn diamond_join() {
        let l = diamond();
        let (a, b) = (l.index_of_label("a").unwrap(), l.index_of_label("b").unwrap());
        assert_eq!(l.label(l.join(a, b)), "top");
        assert_eq!(l.zeta_count(), 9);
    }

    #[test]
    fn m_shaped_poset_is_not_a_lattice() {
        // bot < a, b;  a, b < c, d
        let err = build_lattice_from_covers(
            5,
            &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 3), (2, 4)],
            None,
        )
        .unwrap_err();
        match err {
            Error::NotALattice { left, right, bound } => {
                assert_eq!((left.as_str(), right.as_str(), bound), ("1", "2", "join"));
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn two_minimal_elements_rejected() {
        let err = build_lattice_from_covers(3, &[(0, 2), (1, 2)], None).unwrap_err();
        assert!(matches!(err, Error::NotALattice { bound: "meet", .. }));
    }

    #[test]
    fn cycle_rejected() {
        assert!(matches!(
            build_lattice_from_covers(3, &[(0, 1), (1, 2), (2, 1)], None),
            Err(Error::InvalidOrder(_))
        ));
    }

    #[test]
    fn input_order_is_renumbered() {
        // element 2 is the bottom in the input numbering
        let l = build_lattice_from_covers(3, &[(2, 0), (0, 1)], None).unwrap();
        assert_eq!(l.labels(), ["2", "0", "1"]);
        assert!(l.leq(0, 2));
    }

    #[test]
    fn spec_round_trip() {
        let l = diamond();
        let spec = l.to_spec();
        let json = serde_json::to_string(&spec).unwrap();
        let back = Lattice::from_spec(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, l);
    }

    #[test]
    fn boolean_and_cover_built_agree() {
        let b = build_boolean_lattice(3).unwrap();
        let d = Lattice::from_spec(&b.to_spec()).unwrap();
        assert_eq!(b.labels(), d.labels());
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(b.leq(i, j), d.leq(i, j));
                assert_eq!(b.join(i, j), d.join(i, j));
            }
        }
    }

    #[test]
    fn shorthand() {
        assert_eq!(Lattice::parse_shorthand("bool:3").unwrap().size(), 8);
        assert!(Lattice::parse_shorthand("bool:x").is_err());
        assert!(Lattice::parse_shorthand("chain:3").is_err());
    }
}
