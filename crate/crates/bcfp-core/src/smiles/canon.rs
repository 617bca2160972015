//! Relabeling-invariant graph hashing for dataset deduplication.

use std::collections::HashMap;

use crate::fingerprint::{self, TupleHasher, TAG_CANON};
use crate::smiles::Molecule;

/// A 64-bit value invariant under any relabeling of atom indices.
///
/// Per-atom identifiers start from the atom invariant and are refined
/// with the neighborhood-update rule until the partition they induce on
/// the atoms stops changing (or `atom_count` iterations at most). The
/// hash combines the sorted multiset of converged identifiers with the
/// atom and bond counts.
pub fn canonical_hash(mol: &Molecule) -> u64 {
    let n = mol.atom_count();
    let mut ids: Vec<u64> = (0..n)
        .map(|i| fingerprint::atom_invariant(mol, i))
        .collect();

    for _ in 0..n {
        let next: Vec<u64> = (0..n)
            .map(|i| fingerprint::refine_atom_id(mol, i, &ids))
            .collect();
        let stable = same_partition(&ids, &next);
        ids = next;
        if stable {
            break;
        }
    }

    ids.sort_unstable();
    let mut h = TupleHasher::new(TAG_CANON);
    for id in &ids {
        h.field(0, *id);
    }
    h.field(1, n as u64);
    h.field(2, mol.bond_count() as u64);
    h.finish()
}

/// True when two identifier vectors induce the same partition of atoms.
fn same_partition(a: &[u64], b: &[u64]) -> bool {
    let mut fwd: HashMap<u64, u64> = HashMap::new();
    let mut rev: HashMap<u64, u64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b.iter()) {
        if *fwd.entry(x).or_insert(y) != y {
            return false;
        }
        if *rev.entry(y).or_insert(x) != x {
            return false;
        }
    }
    true
}
