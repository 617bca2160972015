//! Substructure key generation: atom-centered and bond-centered circular
//! environments, hashed to 64-bit keys.
//!
//! The atom-centered variant follows the classic extended-connectivity
//! construction: per-atom invariants are iteratively rehashed with sorted
//! (bond order, neighbor key) pairs, and environments of one iteration
//! that cover the same bond set collapse to a single entry (the smallest
//! key, so the choice never depends on atom numbering). The bond-centered
//! variant does the same with bonds as centers: a bond's neighbors are the
//! bonds sharing exactly one endpoint, its radius-0 key is derived from
//! its order, ring flag, and the sorted pair of endpoint atom invariants,
//! and neighbor keys are aggregated by sorted value alone (the connecting
//! atom's identity is already inside both bond keys).
//!
//! Everything bottoms out in FNV-1a over tagged, fixed-width little-endian
//! fields, so keys are identical across runs and platforms.

use std::collections::BTreeMap;
use std::collections::HashMap;

use crate::smiles::Molecule;

/// FNV-1a offset basis.
pub const FNV_OFFSET: u64 = 14695981039346656037;
/// FNV-1a prime.
pub const FNV_PRIME: u64 = 1099511628211;

/// Domain tags keep the different tuple kinds from colliding.
pub(crate) const TAG_ATOM: u8 = 0x01;
pub(crate) const TAG_BOND: u8 = 0x02;
pub(crate) const TAG_ECFP_ITER: u8 = 0x03;
pub(crate) const TAG_BCFP_ITER: u8 = 0x04;
pub(crate) const TAG_CANON: u8 = 0x05;
pub(crate) const TAG_REFINE: u8 = 0x06;

/// FNV-1a over a byte sequence.
pub fn hash64(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Incremental FNV-1a tuple hasher. Every field is folded as a one-byte
/// tag followed by the value as a fixed-width little-endian integer.
#[derive(Debug, Clone)]
pub(crate) struct TupleHasher {
    state: u64,
}

impl TupleHasher {
    pub(crate) fn new(domain: u8) -> Self {
        let mut h = TupleHasher { state: FNV_OFFSET };
        h.byte(domain);
        h
    }

    fn byte(&mut self, b: u8) {
        self.state ^= b as u64;
        self.state = self.state.wrapping_mul(FNV_PRIME);
    }

    pub(crate) fn field(&mut self, tag: u8, value: u64) {
        self.byte(tag);
        for b in value.to_le_bytes() {
            self.byte(b);
        }
    }

    pub(crate) fn field_i64(&mut self, tag: u8, value: i64) {
        self.field(tag, value as u64);
    }

    pub(crate) fn finish(&self) -> u64 {
        self.state
    }
}

/// Multiset of substructure keys with positive counts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KeyMultiset {
    counts: BTreeMap<u64, u32>,
}

impl KeyMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, key: u64) {
        *self.counts.entry(key).or_insert(0) += 1;
    }

    pub fn add_count(&mut self, key: u64, count: u32) {
        if count > 0 {
            *self.counts.entry(key).or_insert(0) += count;
        }
    }

    pub fn count(&self, key: u64) -> u32 {
        self.counts.get(&key).copied().unwrap_or(0)
    }

    pub fn contains(&self, key: u64) -> bool {
        self.counts.contains_key(&key)
    }

    /// Number of distinct keys.
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    /// Sum of all counts.
    pub fn total(&self) -> u64 {
        self.counts.values().map(|&c| c as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Iterate (key, count) in ascending key order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.counts.iter().map(|(&k, &c)| (k, c))
    }

    /// Componentwise `self[k] >= other[k]` for every key of `other`.
    pub fn contains_multiset(&self, other: &KeyMultiset) -> bool {
        other.iter().all(|(k, c)| self.count(k) >= c)
    }
}

impl FromIterator<(u64, u32)> for KeyMultiset {
    fn from_iter<T: IntoIterator<Item = (u64, u32)>>(iter: T) -> Self {
        let mut ms = KeyMultiset::new();
        for (k, c) in iter {
            ms.add_count(k, c);
        }
        ms
    }
}

/// Atom environment key at radius 0: a function of the atom's local
/// chemistry only, never of its index.
pub fn atom_invariant(mol: &Molecule, atom: usize) -> u64 {
    let a = &mol.atoms[atom];
    let mut h = TupleHasher::new(TAG_ATOM);
    h.field(0, a.element as u64);
    h.field(1, a.degree as u64);
    h.field_i64(2, a.formal_charge as i64);
    h.field(3, a.total_h() as u64);
    h.field(4, a.in_ring as u64);
    h.field(5, a.aromatic as u64);
    h.finish()
}

/// Bond environment key at radius 0: order category, ring flag, and the
/// sorted pair of endpoint atom invariants (direction-independent).
pub fn bond_invariant(mol: &Molecule, bond: usize) -> u64 {
    let b = &mol.bonds[bond];
    let ka = atom_invariant(mol, b.a);
    let kb = atom_invariant(mol, b.b);
    let (lo, hi) = if ka <= kb { (ka, kb) } else { (kb, ka) };
    let mut h = TupleHasher::new(TAG_BOND);
    h.field(0, b.order.code() as u64);
    h.field(1, b.in_ring as u64);
    h.field(2, lo);
    h.field(3, hi);
    h.finish()
}

/// One refinement step of the atom-identifier update (shared with the
/// canonical hash): rehash the previous center key with the sorted
/// (bond order, neighbor key) pairs.
pub(crate) fn refine_atom_id(mol: &Molecule, atom: usize, ids: &[u64]) -> u64 {
    let mut pairs: Vec<(u8, u64)> = mol
        .neighbors(atom)
        .map(|(nbr, bi)| (mol.bonds[bi].order.code(), ids[nbr]))
        .collect();
    pairs.sort_unstable();
    let mut h = TupleHasher::new(TAG_REFINE);
    h.field(0, ids[atom]);
    h.field(1, pairs.len() as u64);
    for (order, key) in pairs {
        h.field(2, order as u64);
        h.field(3, key);
    }
    h.finish()
}

/// Bit set over bond indices; the coverage footprint of an environment.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct BondSet {
    words: Vec<u64>,
}

impl BondSet {
    fn new(n_bonds: usize) -> Self {
        BondSet {
            words: vec![0; n_bonds.div_ceil(64)],
        }
    }

    fn insert(&mut self, bond: usize) {
        self.words[bond / 64] |= 1 << (bond % 64);
    }

    fn union_with(&mut self, other: &BondSet) {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
    }
}

/// Count multiset of atom-centered keys over radii `0..=r`.
///
/// Radius 0 keeps every atom's invariant. Each later iteration rehashes
/// every atom that has neighbors, then keeps one environment per
/// distinct covered bond set: the one with the smallest key, a
/// relabeling-independent tie-break. Identifier evolution is unaffected
/// by the drop.
pub fn ecfp_keys(mol: &Molecule, radius: u8) -> KeyMultiset {
    let n = mol.atom_count();
    let mut multiset = KeyMultiset::new();
    let mut ids: Vec<u64> = (0..n).map(|i| atom_invariant(mol, i)).collect();
    let mut coverage: Vec<BondSet> = (0..n).map(|_| BondSet::new(mol.bond_count())).collect();

    for &id in &ids {
        multiset.add(id);
    }

    for k in 1..=radius {
        let mut next_ids = ids.clone();
        let mut next_coverage = coverage.clone();
        let mut retained: HashMap<BondSet, u64> = HashMap::new();

        for atom in 0..n {
            if mol.adjacency[atom].is_empty() {
                continue;
            }
            let mut pairs: Vec<(u8, u64)> = mol
                .neighbors(atom)
                .map(|(nbr, bi)| (mol.bonds[bi].order.code(), ids[nbr]))
                .collect();
            pairs.sort_unstable();

            let mut h = TupleHasher::new(TAG_ECFP_ITER);
            h.field(0, k as u64);
            h.field(1, ids[atom]);
            h.field(2, pairs.len() as u64);
            for &(order, key) in &pairs {
                h.field(3, order as u64);
                h.field(4, key);
            }
            let key = h.finish();

            let mut set = coverage[atom].clone();
            for (nbr, bi) in mol.neighbors(atom) {
                set.union_with(&coverage[nbr]);
                set.insert(bi);
            }

            next_ids[atom] = key;
            next_coverage[atom] = set.clone();
            retained
                .entry(set)
                .and_modify(|k| *k = (*k).min(key))
                .or_insert(key);
        }

        for &key in retained.values() {
            multiset.add(key);
        }
        ids = next_ids;
        coverage = next_coverage;
    }

    multiset
}

/// Count multiset of bond-centered keys over radii `0..=r`. A molecule
/// with no bonds yields an empty multiset.
pub fn bcfp_keys(mol: &Molecule, radius: u8) -> KeyMultiset {
    let nb = mol.bond_count();
    let mut multiset = KeyMultiset::new();
    if nb == 0 {
        return multiset;
    }

    // bonds sharing exactly one endpoint
    let neighbors: Vec<Vec<usize>> = (0..nb)
        .map(|bi| {
            let bond = &mol.bonds[bi];
            let mut out: Vec<usize> = mol.adjacency[bond.a]
                .iter()
                .chain(mol.adjacency[bond.b].iter())
                .copied()
                .filter(|&other| other != bi)
                .collect();
            out.sort_unstable();
            out.dedup();
            out
        })
        .collect();

    let mut ids: Vec<u64> = (0..nb).map(|bi| bond_invariant(mol, bi)).collect();
    let mut coverage: Vec<BondSet> = (0..nb)
        .map(|bi| {
            let mut s = BondSet::new(nb);
            s.insert(bi);
            s
        })
        .collect();

    for &id in &ids {
        multiset.add(id);
    }

    for k in 1..=radius {
        let mut next_ids = ids.clone();
        let mut next_coverage = coverage.clone();
        let mut retained: HashMap<BondSet, u64> = HashMap::new();

        for bi in 0..nb {
            if neighbors[bi].is_empty() {
                continue;
            }
            let mut nbr_keys: Vec<u64> = neighbors[bi].iter().map(|&o| ids[o]).collect();
            nbr_keys.sort_unstable();

            let mut h = TupleHasher::new(TAG_BCFP_ITER);
            h.field(0, k as u64);
            h.field(1, ids[bi]);
            h.field(2, nbr_keys.len() as u64);
            for &key in &nbr_keys {
                h.field(3, key);
            }
            let key = h.finish();

            let mut set = coverage[bi].clone();
            for &other in &neighbors[bi] {
                set.union_with(&coverage[other]);
            }

            next_ids[bi] = key;
            next_coverage[bi] = set.clone();
            retained
                .entry(set)
                .and_modify(|k| *k = (*k).min(key))
                .or_insert(key);
        }

        for &key in retained.values() {
            multiset.add(key);
        }
        ids = next_ids;
        coverage = next_coverage;
    }

    multiset
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smiles::parse_smiles;

    #[test]
    fn fnv_reference_vectors() {
        assert_eq!(hash64(b""), 14695981039346656037);
        assert_eq!(hash64(b"a"), 12638187200555641996);
        assert_eq!(hash64(b"foobar"), 9625390261332436968);
    }

    #[test]
    fn atom_invariants_distinguish_and_share() {
        let cco = parse_smiles("CCO").unwrap();
        // terminal C (deg 1, 3 H) vs terminal O (deg 1, 1 H)
        assert_ne!(atom_invariant(&cco, 0), atom_invariant(&cco, 2));
        // center-for-center identical across permuted spellings
        let occ = parse_smiles("OCC").unwrap();
        assert_eq!(atom_invariant(&cco, 1), atom_invariant(&occ, 1));
        assert_eq!(atom_invariant(&cco, 0), atom_invariant(&occ, 2));
        // all six benzene carbons share one key
        let benzene = parse_smiles("c1ccccc1").unwrap();
        let k0 = atom_invariant(&benzene, 0);
        assert!((1..6).all(|i| atom_invariant(&benzene, i) == k0));
    }

    #[test]
    fn bond_invariants_symmetry() {
        let co2 = parse_smiles("O=C=O").unwrap();
        assert_eq!(bond_invariant(&co2, 0), bond_invariant(&co2, 1));
        let cco = parse_smiles("CCO").unwrap();
        assert_ne!(bond_invariant(&cco, 0), bond_invariant(&cco, 1));
        // direction independence: the C-O bond keyed from either end
        let occ = parse_smiles("OCC").unwrap();
        assert_eq!(bond_invariant(&cco, 1), bond_invariant(&occ, 0));
    }

    #[test]
    fn ecfp_methane_single_key() {
        let mol = parse_smiles("C").unwrap();
        let keys = ecfp_keys(&mol, 1);
        assert_eq!(keys.distinct(), 1);
        assert_eq!(keys.total(), 1);
    }

    #[test]
    fn ecfp_ethanol_radius0_and_radius1() {
        let mol = parse_smiles("CCO").unwrap();
        let r0 = ecfp_keys(&mol, 0);
        assert_eq!(r0.distinct(), 3);
        assert_eq!(r0.total(), 3);
        // three radius-0 plus three radius-1 environments, no dedup
        let r1 = ecfp_keys(&mol, 1);
        assert_eq!(r1.total(), 6);
    }

    #[test]
    fn ecfp_benzene_symmetry() {
        let mol = parse_smiles("c1ccccc1").unwrap();
        let keys = ecfp_keys(&mol, 1);
        // one shared radius-0 key and one shared radius-1 key
        assert_eq!(keys.distinct(), 2);
        let counts: Vec<u32> = keys.iter().map(|(_, c)| c).collect();
        assert_eq!(counts, vec![6, 6]);
        assert_eq!(keys.total(), 12);
    }

    #[test]
    fn bcfp_no_bonds_empty() {
        let mol = parse_smiles("C").unwrap();
        for r in 0..=3 {
            assert!(bcfp_keys(&mol, r).is_empty());
        }
    }

    #[test]
    fn bcfp_carbon_dioxide() {
        let mol = parse_smiles("O=C=O").unwrap();
        let r0 = bcfp_keys(&mol, 0);
        assert_eq!(r0.distinct(), 1);
        assert_eq!(r0.total(), 2);
        // radius-1 environments of both bonds cover the same bond set;
        // one is dropped
        let r1 = bcfp_keys(&mol, 1);
        assert_eq!(r1.total(), 3);
    }

    #[test]
    fn bcfp_ethanol_radius0() {
        let mol = parse_smiles("CCO").unwrap();
        let r0 = bcfp_keys(&mol, 0);
        assert_eq!(r0.distinct(), 2);
        assert_eq!(r0.total(), 2);
    }

    #[test]
    fn linear_chain_totals() {
        // path molecule with n atoms: n atom-centered keys, n-1
        // bond-centered keys at radius 0
        for n in 2..8usize {
            let smiles = "C".repeat(n);
            let mol = parse_smiles(&smiles).unwrap();
            assert_eq!(ecfp_keys(&mol, 0).total(), n as u64);
            assert_eq!(bcfp_keys(&mol, 0).total(), (n - 1) as u64);
        }
    }

    #[test]
    fn radius_nesting() {
        let mol = parse_smiles("CC(=O)Oc1ccccc1C(=O)O").unwrap();
        for r in 1..=3u8 {
            let smaller = ecfp_keys(&mol, r - 1);
            let larger = ecfp_keys(&mol, r);
            assert!(larger.contains_multiset(&smaller), "ecfp radius {r}");
            let smaller = bcfp_keys(&mol, r - 1);
            let larger = bcfp_keys(&mol, r);
            assert!(larger.contains_multiset(&smaller), "bcfp radius {r}");
        }
    }

    #[test]
    fn dedup_keeps_environments_distinct_per_iteration() {
        // cyclopropane: radius-1 environments cover distinct bond pairs,
        // radius-2 environments all cover the full ring and collapse to one
        let mol = parse_smiles("C1CC1").unwrap();
        assert_eq!(ecfp_keys(&mol, 1).total(), 3 + 3);
        assert_eq!(ecfp_keys(&mol, 2).total(), 3 + 3 + 1);
    }
}
