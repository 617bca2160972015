//! SMILES parsing and molecular graph perception.
//!
//! The parser covers the organic subset (B, C, N, O, P, S, F, Cl, Br, I),
//! bracket atoms with isotope / charge / explicit hydrogens, branches,
//! ring closures (including `%nn`), explicit bond symbols, and
//! dot-disconnected components. Chirality markers and stereo bond
//! symbols (`/`, `\`) are parsed and discarded.
//!
//! Perception fills in ring membership (any atom or bond on a cycle),
//! implicit hydrogen counts from default valences, and heavy-atom
//! degrees. An optional normalization pass collapses alternating
//! single/double six-membered C/N rings onto their aromatic spelling so
//! that Kekulé and aromatic inputs of the same ring hash identically.

mod canon;
mod parser;
mod perceive;

pub use canon::canonical_hash;

use thiserror::Error;

/// Bond order categories. Stereo bond symbols map to `Single`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Contribution to an atom's valence sum. Aromatic bonds count 1.5.
    pub fn valence(self) -> f64 {
        match self {
            BondOrder::Single => 1.0,
            BondOrder::Double => 2.0,
            BondOrder::Triple => 3.0,
            BondOrder::Aromatic => 1.5,
        }
    }

    /// Stable small integer used in hashing.
    pub fn code(self) -> u8 {
        match self {
            BondOrder::Single => 0,
            BondOrder::Double => 1,
            BondOrder::Triple => 2,
            BondOrder::Aromatic => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    /// Atomic number, 1–118.
    pub element: u8,
    pub formal_charge: i8,
    /// Hydrogen count from a bracket specification (0 otherwise).
    pub explicit_h: u8,
    /// Computed hydrogen count; always 0 for bracket atoms.
    pub implicit_h: u8,
    pub aromatic: bool,
    pub in_ring: bool,
    pub isotope: Option<u16>,
    /// Heavy-neighbor count, equal to the number of incident bonds.
    pub degree: u32,
    /// Whether the atom came from a bracket expression. Bracket atoms
    /// never receive implicit hydrogens.
    pub bracket: bool,
}

impl Atom {
    pub fn total_h(&self) -> u32 {
        self.explicit_h as u32 + self.implicit_h as u32
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bond {
    /// Endpoint atom indices; unordered pair, stored as written.
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
    pub in_ring: bool,
    /// True when the order came from an explicit bond symbol in the
    /// input rather than from adjacency defaults.
    pub explicit_order: bool,
}

impl Bond {
    /// The endpoint opposite to `atom`.
    pub fn other(&self, atom: usize) -> usize {
        if self.a == atom {
            self.b
        } else {
            self.a
        }
    }
}

/// A perceived molecular graph. May be disconnected (salt components).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Molecule {
    pub atoms: Vec<Atom>,
    pub bonds: Vec<Bond>,
    /// Incident bond indices per atom.
    pub adjacency: Vec<Vec<usize>>,
    /// Original SMILES text (empty for graphs built directly).
    pub source: String,
}

impl Molecule {
    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn bond_count(&self) -> usize {
        self.bonds.len()
    }

    /// Neighbor atoms of `atom` as (atom index, bond index) pairs.
    pub fn neighbors(&self, atom: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency[atom]
            .iter()
            .map(move |&bi| (self.bonds[bi].other(atom), bi))
    }
}

/// Atom description for building a graph without SMILES text.
#[derive(Debug, Clone)]
pub struct AtomSpec {
    pub element: u8,
    pub formal_charge: i8,
    pub explicit_h: u8,
    pub isotope: Option<u16>,
    pub aromatic: bool,
    pub bracket: bool,
}

impl AtomSpec {
    /// An organic-subset atom with everything default.
    pub fn organic(element: u8) -> Self {
        AtomSpec {
            element,
            formal_charge: 0,
            explicit_h: 0,
            isotope: None,
            aromatic: false,
            bracket: false,
        }
    }
}

/// Parse-time options.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ParseOptions {
    /// Mark six-membered all-C/N rings with alternating single/double
    /// bonds as aromatic, so Kekulé and aromatic spellings of such rings
    /// collapse to the same graph. Off by default; the dataset pipeline
    /// turns it on.
    pub normalize_rings: bool,
}

impl ParseOptions {
    /// Options used by the dataset cleanup and featurization pipeline.
    pub fn pipeline() -> Self {
        ParseOptions {
            normalize_rings: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmilesError {
    #[error("empty SMILES input")]
    EmptyInput,
    #[error("unknown symbol {found:?} at position {position}")]
    UnknownSymbol { position: usize, found: char },
    #[error("unbalanced parenthesis")]
    UnbalancedParenthesis,
    #[error("ring closure {ring} opened but never closed")]
    UnclosedRing { ring: u16 },
    #[error("conflicting or self-referential ring closure {ring}")]
    RingBondConflict { ring: u16 },
    #[error("duplicate bond between atoms {a} and {b}")]
    DuplicateBond { a: usize, b: usize },
    #[error("bond symbol with no following atom")]
    DanglingBond,
    #[error("explicit valence {valence} on atom {atom} exceeds every allowed default")]
    ValenceError { atom: usize, valence: u32 },
}

/// Parse a SMILES string with default options (input aromatic flags are
/// trusted; no ring normalization).
pub fn parse_smiles(text: &str) -> Result<Molecule, SmilesError> {
    parse_smiles_with(text, &ParseOptions::default())
}

/// Parse a SMILES string with explicit options.
pub fn parse_smiles_with(text: &str, opts: &ParseOptions) -> Result<Molecule, SmilesError> {
    let raw = parser::parse(text)?;
    perceive::perceive(raw, text, opts)
}

/// Build a molecule directly from atom and bond lists, running the same
/// perception as the parser. Bonds are (atom, atom, order) triples.
pub fn molecule_from_graph(
    atoms: Vec<AtomSpec>,
    bonds: Vec<(usize, usize, BondOrder)>,
    opts: &ParseOptions,
) -> Result<Molecule, SmilesError> {
    let raw = parser::RawMolecule::from_graph(atoms, bonds)?;
    perceive::perceive(raw, "", opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ethanol_counts_and_hydrogens() {
        let mol = parse_smiles("CCO").unwrap();
        assert_eq!(mol.atom_count(), 3);
        assert_eq!(mol.bond_count(), 2);
        assert!(mol.bonds.iter().all(|b| b.order == BondOrder::Single));
        let hs: Vec<u8> = mol.atoms.iter().map(|a| a.implicit_h).collect();
        assert_eq!(hs, vec![3, 2, 1]);
    }

    #[test]
    fn benzene_aromatic_ring() {
        let mol = parse_smiles("c1ccccc1").unwrap();
        assert_eq!(mol.atom_count(), 6);
        assert_eq!(mol.bond_count(), 6);
        for a in &mol.atoms {
            assert_eq!(a.element, 6);
            assert!(a.aromatic);
            assert!(a.in_ring);
            assert_eq!(a.implicit_h, 1); // 4 - ceil(3.0)
        }
        for b in &mol.bonds {
            assert_eq!(b.order, BondOrder::Aromatic);
            assert!(b.in_ring);
        }
    }

    #[test]
    fn unclosed_ring_is_rejected() {
        match parse_smiles("C1CC") {
            Err(SmilesError::UnclosedRing { ring: 1 }) => {}
            other => panic!("expected UnclosedRing, got {other:?}"),
        }
    }

    #[test]
    fn pyrrole_like_bracket_nitrogen() {
        let mol = parse_smiles("[nH]1cccc1").unwrap();
        let n = &mol.atoms[0];
        assert_eq!(n.element, 7);
        assert_eq!(n.explicit_h, 1);
        assert_eq!(n.implicit_h, 0);
        assert!(n.aromatic);
        assert!(n.in_ring);
    }

    #[test]
    fn empty_input_is_rejected() {
        assert_eq!(parse_smiles(""), Err(SmilesError::EmptyInput));
        assert_eq!(parse_smiles("   "), Err(SmilesError::EmptyInput));
    }

    #[test]
    fn branches_and_double_bonds() {
        let mol = parse_smiles("CC(=O)O").unwrap(); // acetic acid
        assert_eq!(mol.atom_count(), 4);
        assert_eq!(mol.bond_count(), 3);
        let double = mol
            .bonds
            .iter()
            .filter(|b| b.order == BondOrder::Double)
            .count();
        assert_eq!(double, 1);
        // carbonyl O has no H, hydroxyl O has one
        assert_eq!(mol.atoms[2].implicit_h, 0);
        assert_eq!(mol.atoms[3].implicit_h, 1);
    }

    #[test]
    fn unbalanced_parenthesis_is_rejected() {
        assert!(matches!(
            parse_smiles("CC(C"),
            Err(SmilesError::UnbalancedParenthesis)
        ));
        assert!(matches!(
            parse_smiles("CC)C"),
            Err(SmilesError::UnbalancedParenthesis)
        ));
    }

    #[test]
    fn unknown_symbol_is_rejected() {
        assert!(matches!(
            parse_smiles("C~C"),
            Err(SmilesError::UnknownSymbol { .. })
        ));
        // wildcard atoms are out of scope
        assert!(matches!(
            parse_smiles("C*"),
            Err(SmilesError::UnknownSymbol { .. })
        ));
    }

    #[test]
    fn charged_bracket_atoms() {
        let mol = parse_smiles("[NH4+]").unwrap();
        let n = &mol.atoms[0];
        assert_eq!(n.element, 7);
        assert_eq!(n.formal_charge, 1);
        assert_eq!(n.explicit_h, 4);
        assert_eq!(n.implicit_h, 0);

        let mol = parse_smiles("[O-]C").unwrap();
        assert_eq!(mol.atoms[0].formal_charge, -1);
    }

    #[test]
    fn isotope_and_two_letter_elements() {
        let mol = parse_smiles("[13C]([35Cl])Br").unwrap();
        assert_eq!(mol.atoms[0].isotope, Some(13));
        assert_eq!(mol.atoms[1].element, 17);
        assert_eq!(mol.atoms[1].isotope, Some(35));
        assert_eq!(mol.atoms[2].element, 35);
    }

    #[test]
    fn chirality_is_parsed_and_discarded() {
        let plain = parse_smiles("NC(C)C(=O)O").unwrap();
        let chiral = parse_smiles("N[C@@H](C)C(=O)O").unwrap();
        assert_eq!(canonical_hash(&plain), canonical_hash(&chiral));
    }

    #[test]
    fn stereo_bond_symbols_become_single() {
        let mol = parse_smiles("F/C=C/F").unwrap();
        assert_eq!(mol.bond_count(), 3);
        let orders: Vec<BondOrder> = mol.bonds.iter().map(|b| b.order).collect();
        assert_eq!(
            orders,
            vec![BondOrder::Single, BondOrder::Double, BondOrder::Single]
        );
    }

    #[test]
    fn dot_disconnection() {
        let mol = parse_smiles("[Na+].[Cl-]").unwrap();
        assert_eq!(mol.atom_count(), 2);
        assert_eq!(mol.bond_count(), 0);
    }

    #[test]
    fn percent_ring_closure() {
        let a = parse_smiles("C%12CCCCC%12").unwrap();
        let b = parse_smiles("C1CCCCC1").unwrap();
        assert_eq!(canonical_hash(&a), canonical_hash(&b));
    }

    #[test]
    fn ring_membership_flags() {
        let mol = parse_smiles("C1CC1C").unwrap(); // cyclopropane + methyl
        assert!(mol.atoms[0].in_ring);
        assert!(mol.atoms[1].in_ring);
        assert!(mol.atoms[2].in_ring);
        assert!(!mol.atoms[3].in_ring);
        let ring_bonds = mol.bonds.iter().filter(|b| b.in_ring).count();
        assert_eq!(ring_bonds, 3);
    }

    #[test]
    fn over_valent_nitrogen_is_rejected() {
        // old-style uncharged nitro nitrogen carries valence 5
        assert!(matches!(
            parse_smiles("CN(=O)=O"),
            Err(SmilesError::ValenceError { .. })
        ));
        // the charge-separated spelling is fine
        assert!(parse_smiles("C[N+](=O)[O-]").is_ok());
    }

    #[test]
    fn over_valent_bracket_hydrogens_are_rejected() {
        assert!(matches!(
            parse_smiles("C=[NH2]"),
            Err(SmilesError::ValenceError { .. })
        ));
        // three explicit Hs plus one bond is exactly nitrogen's default
        assert!(parse_smiles("C[NH2]").is_ok());
    }

    #[test]
    fn sulfur_hypervalent_states_are_allowed() {
        let mol = parse_smiles("CS(=O)(=O)C").unwrap(); // sulfone, S valence 6
        assert_eq!(mol.atoms[1].implicit_h, 0);
        let mol = parse_smiles("CS(=O)C").unwrap(); // sulfoxide, S valence 4
        assert_eq!(mol.atoms[1].implicit_h, 0);
        let mol = parse_smiles("CSC").unwrap();
        assert_eq!(mol.atoms[1].implicit_h, 0);
        let mol = parse_smiles("S").unwrap();
        assert_eq!(mol.atoms[0].implicit_h, 2);
    }

    #[test]
    fn phosphorus_valences() {
        let mol = parse_smiles("CP(C)C").unwrap();
        assert_eq!(mol.atoms[1].implicit_h, 0);
        let mol = parse_smiles("OP(=O)(O)O").unwrap(); // phosphate, valence 5
        assert_eq!(mol.atoms[1].implicit_h, 0);
        let mol = parse_smiles("P").unwrap();
        assert_eq!(mol.atoms[0].implicit_h, 3);
    }

    #[test]
    fn kekule_pyridine_normalizes_to_aromatic_spelling() {
        let opts = ParseOptions {
            normalize_rings: true,
        };
        let kekule = parse_smiles_with("C1=CC=NC=C1", &opts).unwrap();
        let aromatic = parse_smiles_with("c1ccncc1", &opts).unwrap();
        assert_eq!(canonical_hash(&kekule), canonical_hash(&aromatic));
        assert!(kekule.atoms.iter().all(|a| a.aromatic));
        // without normalization the spellings stay distinct
        let k2 = parse_smiles("C1=CC=NC=C1").unwrap();
        let a2 = parse_smiles("c1ccncc1").unwrap();
        assert_ne!(canonical_hash(&k2), canonical_hash(&a2));
    }

    #[test]
    fn normalization_leaves_saturated_rings_alone() {
        let opts = ParseOptions {
            normalize_rings: true,
        };
        let mol = parse_smiles_with("C1CCCCC1", &opts).unwrap();
        assert!(mol.atoms.iter().all(|a| !a.aromatic));
    }

    #[test]
    fn lowercase_atom_outside_ring_is_demoted() {
        // aromatic flags require ring membership after perception
        let mol = parse_smiles("cc").unwrap();
        assert!(mol.atoms.iter().all(|a| !a.aromatic));
        assert_eq!(mol.atoms[0].implicit_h, 3);
    }

    #[test]
    fn explicit_aromatic_bond_symbol_is_honored() {
        let mol = parse_smiles("C:C").unwrap();
        assert_eq!(mol.bonds[0].order, BondOrder::Aromatic);
    }

    #[test]
    fn neutral_hydrogen_atoms_fold_into_neighbors() {
        let with_h = parse_smiles("[H]OC([H])([H])[H]").unwrap();
        let plain = parse_smiles("OC").unwrap();
        assert_eq!(with_h.atom_count(), 2);
        assert_eq!(canonical_hash(&with_h), canonical_hash(&plain));
        // charged hydrogen stays a graph atom
        let proton = parse_smiles("[H+].[Cl-]").unwrap();
        assert_eq!(proton.atom_count(), 2);
    }

    #[test]
    fn duplicate_and_self_ring_closures_are_rejected() {
        assert!(matches!(
            parse_smiles("C11"),
            Err(SmilesError::RingBondConflict { .. })
        ));
        assert!(matches!(
            parse_smiles("C1C1"),
            Err(SmilesError::DuplicateBond { .. })
        ));
    }

    #[test]
    fn ring_closure_bond_order_conflict() {
        assert!(matches!(
            parse_smiles("C=1CCCCC#1"),
            Err(SmilesError::RingBondConflict { .. })
        ));
        // matching explicit orders are fine
        let mol = parse_smiles("C=1CCCCC=1").unwrap();
        assert_eq!(
            mol.bonds
                .iter()
                .filter(|b| b.order == BondOrder::Double)
                .count(),
            1
        );
    }

    #[test]
    fn dangling_bond_is_rejected() {
        assert!(matches!(
            parse_smiles("CC="),
            Err(SmilesError::DanglingBond)
        ));
        assert!(matches!(
            parse_smiles("C=.C"),
            Err(SmilesError::DanglingBond)
        ));
    }

    #[test]
    fn adjacency_is_consistent_with_bonds() {
        let mol = parse_smiles("CC(=O)Oc1ccccc1C(=O)O").unwrap(); // aspirin
        for (bi, bond) in mol.bonds.iter().enumerate() {
            assert!(mol.adjacency[bond.a].contains(&bi));
            assert!(mol.adjacency[bond.b].contains(&bi));
        }
        for (ai, inc) in mol.adjacency.iter().enumerate() {
            assert_eq!(mol.atoms[ai].degree as usize, inc.len());
            for &bi in inc {
                let b = &mol.bonds[bi];
                assert!(b.a == ai || b.b == ai);
            }
        }
    }
}
