//! Synthetic molecular graphs for property tests and benchmarks.
//!
//! Generates random valence-respecting graphs directly (no SMILES text):
//! a spanning tree over 2–12 heavy atoms plus up to two ring-closing
//! edges, with bond orders drawn against per-element valence budgets so
//! perception never rejects the result. Everything is driven by a
//! caller-supplied PCG32 state, so generated corpora are reproducible.

use crate::pcg::Pcg32;
use crate::smiles::{molecule_from_graph, AtomSpec, BondOrder, Molecule, ParseOptions};

/// Element pool with valence budgets (lowest default valence).
const POOL: [(u8, u8); 8] = [
    (6, 4),
    (6, 4),
    (6, 4),
    (6, 4), // carbon-weighted
    (7, 3),
    (8, 2),
    (16, 2),
    (9, 1),
];

/// A raw graph that can be instantiated (optionally permuted) into a
/// perceived molecule.
#[derive(Debug, Clone)]
pub struct GraphSpec {
    pub atoms: Vec<AtomSpec>,
    pub bonds: Vec<(usize, usize, BondOrder)>,
}

impl GraphSpec {
    pub fn build(&self, opts: &ParseOptions) -> Molecule {
        molecule_from_graph(self.atoms.clone(), self.bonds.clone(), opts)
            .expect("generated graph respects valence budgets")
    }

    /// The same graph with atom `i` moved to position `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> GraphSpec {
        assert_eq!(perm.len(), self.atoms.len());
        let mut atoms = vec![AtomSpec::organic(6); self.atoms.len()];
        for (i, spec) in self.atoms.iter().enumerate() {
            atoms[perm[i]] = spec.clone();
        }
        let bonds = self
            .bonds
            .iter()
            .map(|&(a, b, o)| (perm[a], perm[b], o))
            .collect();
        GraphSpec { atoms, bonds }
    }
}

/// Random graph over 2..=12 atoms.
pub fn random_graph(rng: &mut Pcg32) -> GraphSpec {
    let n = 2 + rng.next_bounded(11) as usize;
    let mut atoms = Vec::with_capacity(n);
    let mut budget = Vec::with_capacity(n);
    for _ in 0..n {
        let (element, b) = POOL[rng.next_bounded(POOL.len() as u32) as usize];
        atoms.push(AtomSpec::organic(element));
        budget.push(b);
    }

    let mut bonds: Vec<(usize, usize, BondOrder)> = Vec::new();
    let bonded = |a: usize, b: usize, bonds: &[(usize, usize, BondOrder)]| {
        bonds
            .iter()
            .any(|&(x, y, _)| (x == a && y == b) || (x == b && y == a))
    };

    // spanning tree; atoms whose candidates are exhausted stay detached
    // (disconnected graphs are legal molecules)
    for i in 1..n {
        let candidates: Vec<usize> = (0..i).filter(|&p| budget[p] >= 1).collect();
        if candidates.is_empty() || budget[i] == 0 {
            continue;
        }
        let parent = candidates[rng.next_bounded(candidates.len() as u32) as usize];
        let double = budget[i] >= 2 && budget[parent] >= 2 && rng.next_bounded(4) == 0;
        let (order, cost) = if double {
            (BondOrder::Double, 2)
        } else {
            (BondOrder::Single, 1)
        };
        bonds.push((parent, i, order));
        budget[parent] -= cost;
        budget[i] -= cost;
    }

    // up to two ring-closing edges
    for _ in 0..2 {
        if rng.next_bounded(2) == 0 {
            continue;
        }
        let a = rng.next_bounded(n as u32) as usize;
        let b = rng.next_bounded(n as u32) as usize;
        if a == b || budget[a] == 0 || budget[b] == 0 || bonded(a, b, &bonds) {
            continue;
        }
        bonds.push((a.min(b), a.max(b), BondOrder::Single));
        budget[a] -= 1;
        budget[b] -= 1;
    }

    GraphSpec { atoms, bonds }
}

/// Random permutation of `0..n`.
pub fn random_permutation(rng: &mut Pcg32, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut perm);
    perm
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_graphs_always_perceive() {
        let mut rng = Pcg32::new(2024, 0);
        for _ in 0..200 {
            let spec = random_graph(&mut rng);
            let mol = spec.build(&ParseOptions::default());
            assert!(mol.atom_count() >= 2);
            for atom in &mol.atoms {
                assert!(atom.implicit_h <= 4);
            }
        }
    }

    #[test]
    fn permutation_preserves_structure() {
        let mut rng = Pcg32::new(7, 7);
        let spec = random_graph(&mut rng);
        let n = spec.atoms.len();
        let perm = random_permutation(&mut rng, n);
        let permuted = spec.permuted(&perm);
        assert_eq!(permuted.bonds.len(), spec.bonds.len());
        let a = spec.build(&ParseOptions::default());
        let b = permuted.build(&ParseOptions::default());
        assert_eq!(a.atom_count(), b.atom_count());
        assert_eq!(a.bond_count(), b.bond_count());
    }
}
