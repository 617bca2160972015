//! SMILES tokenizer and graph builder.
//!
//! Produces a raw (unperceived) atom/bond list; ring membership,
//! implicit hydrogens, and valence checks happen in `perceive`.

use std::collections::HashMap;

use crate::element;
use crate::smiles::{AtomSpec, BondOrder, SmilesError};

pub(crate) struct RawMolecule {
    pub atoms: Vec<AtomSpec>,
    pub bonds: Vec<(usize, usize, BondOrder, bool)>, // (a, b, order, explicit)
}

impl RawMolecule {
    pub(crate) fn from_graph(
        atoms: Vec<AtomSpec>,
        bonds: Vec<(usize, usize, BondOrder)>,
    ) -> Result<Self, SmilesError> {
        let n = atoms.len();
        let mut seen: HashMap<(usize, usize), ()> = HashMap::new();
        for &(a, b, _) in &bonds {
            assert!(a < n && b < n, "bond endpoint out of range");
            assert_ne!(a, b, "self bonds are not allowed");
            let key = (a.min(b), a.max(b));
            if seen.insert(key, ()).is_some() {
                return Err(SmilesError::DuplicateBond { a, b });
            }
        }
        Ok(RawMolecule {
            atoms,
            bonds: bonds.into_iter().map(|(a, b, o)| (a, b, o, true)).collect(),
        })
    }
}

struct Tokenizer<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Tokenizer<'a> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek();
        if b.is_some() {
            self.pos += 1;
        }
        b
    }

    fn eat(&mut self, byte: u8) -> bool {
        if self.peek() == Some(byte) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self, max: usize) -> Option<u32> {
        let start = self.pos;
        while self.pos - start < max && self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return None;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()?
            .parse()
            .ok()
    }

    fn unknown(&self) -> SmilesError {
        let found = self.bytes.get(self.pos).map(|&b| b as char).unwrap_or('?');
        SmilesError::UnknownSymbol {
            position: self.pos,
            found,
        }
    }
}

/// Pending bond state between an atom and whatever comes next.
#[derive(Clone, Copy, PartialEq)]
enum Pending {
    None,
    Bond(BondOrder),
    Dot,
}

pub(crate) fn parse(text: &str) -> Result<RawMolecule, SmilesError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(SmilesError::EmptyInput);
    }
    let mut tz = Tokenizer {
        bytes: trimmed.as_bytes(),
        pos: 0,
    };

    let mut atoms: Vec<AtomSpec> = Vec::new();
    let mut bonds: Vec<(usize, usize, BondOrder, bool)> = Vec::new();
    let mut bond_index: HashMap<(usize, usize), ()> = HashMap::new();
    // open ring closures: ring number -> (atom, explicit order)
    let mut open_rings: HashMap<u16, (usize, Option<BondOrder>)> = HashMap::new();
    let mut branch_stack: Vec<usize> = Vec::new();
    let mut prev: Option<usize> = None;
    let mut pending = Pending::None;

    let add_bond = |bonds: &mut Vec<(usize, usize, BondOrder, bool)>,
                    bond_index: &mut HashMap<(usize, usize), ()>,
                    a: usize,
                    b: usize,
                    order: BondOrder,
                    explicit: bool|
     -> Result<(), SmilesError> {
        let key = (a.min(b), a.max(b));
        if bond_index.insert(key, ()).is_some() {
            return Err(SmilesError::DuplicateBond { a, b });
        }
        bonds.push((a, b, order, explicit));
        Ok(())
    };

    while let Some(byte) = tz.peek() {
        match byte {
            b'-' | b'=' | b'#' | b':' | b'/' | b'\\' => {
                if pending != Pending::None {
                    return Err(SmilesError::DanglingBond);
                }
                let order = match byte {
                    b'-' | b'/' | b'\\' => BondOrder::Single,
                    b'=' => BondOrder::Double,
                    b'#' => BondOrder::Triple,
                    b':' => BondOrder::Aromatic,
                    _ => unreachable!(),
                };
                tz.pos += 1;
                pending = Pending::Bond(order);
            }
            b'.' => {
                if pending != Pending::None {
                    return Err(SmilesError::DanglingBond);
                }
                tz.pos += 1;
                pending = Pending::Dot;
            }
            b'(' => {
                if pending != Pending::None {
                    return Err(SmilesError::DanglingBond);
                }
                let Some(p) = prev else {
                    return Err(SmilesError::UnbalancedParenthesis);
                };
                branch_stack.push(p);
                tz.pos += 1;
            }
            b')' => {
                if pending != Pending::None {
                    return Err(SmilesError::DanglingBond);
                }
                let Some(p) = branch_stack.pop() else {
                    return Err(SmilesError::UnbalancedParenthesis);
                };
                prev = Some(p);
                tz.pos += 1;
            }
            b'0'..=b'9' | b'%' => {
                // ring closure on the current atom
                let Some(cur) = prev else {
                    return Err(tz.unknown());
                };
                let explicit = match pending {
                    Pending::None => None,
                    Pending::Bond(o) => Some(o),
                    Pending::Dot => return Err(SmilesError::DanglingBond),
                };
                pending = Pending::None;
                let ring = if byte == b'%' {
                    tz.pos += 1;
                    let start = tz.pos;
                    let n = tz.digits(2).ok_or_else(|| tz.unknown())?;
                    if tz.pos - start != 2 {
                        return Err(tz.unknown());
                    }
                    n as u16
                } else {
                    tz.pos += 1;
                    (byte - b'0') as u16
                };
                match open_rings.remove(&ring) {
                    None => {
                        open_rings.insert(ring, (cur, explicit));
                    }
                    Some((other, other_explicit)) => {
                        if other == cur {
                            return Err(SmilesError::RingBondConflict { ring });
                        }
                        let order = match (other_explicit, explicit) {
                            (Some(a), Some(b)) if a != b => {
                                return Err(SmilesError::RingBondConflict { ring });
                            }
                            (Some(o), _) | (_, Some(o)) => Some(o),
                            (None, None) => None,
                        };
                        let (order, was_explicit) = match order {
                            Some(o) => (o, true),
                            None => {
                                let aromatic = atoms[other].aromatic && atoms[cur].aromatic;
                                (
                                    if aromatic {
                                        BondOrder::Aromatic
                                    } else {
                                        BondOrder::Single
                                    },
                                    false,
                                )
                            }
                        };
                        add_bond(&mut bonds, &mut bond_index, other, cur, order, was_explicit)?;
                    }
                }
            }
            _ => {
                let spec = parse_atom(&mut tz)?;
                let idx = atoms.len();
                let aromatic_new = spec.aromatic;
                atoms.push(spec);
                match (prev, pending) {
                    (_, Pending::Dot) | (None, Pending::None) => {}
                    (Some(p), Pending::None) => {
                        let order = if atoms[p].aromatic && aromatic_new {
                            BondOrder::Aromatic
                        } else {
                            BondOrder::Single
                        };
                        add_bond(&mut bonds, &mut bond_index, p, idx, order, false)?;
                    }
                    (Some(p), Pending::Bond(order)) => {
                        add_bond(&mut bonds, &mut bond_index, p, idx, order, true)?;
                    }
                    (None, Pending::Bond(_)) => return Err(SmilesError::DanglingBond),
                }
                pending = Pending::None;
                prev = Some(idx);
            }
        }
    }

    if pending != Pending::None {
        return Err(SmilesError::DanglingBond);
    }
    if !branch_stack.is_empty() {
        return Err(SmilesError::UnbalancedParenthesis);
    }
    if let Some((&ring, _)) = open_rings.iter().min_by_key(|(&r, _)| r) {
        return Err(SmilesError::UnclosedRing { ring });
    }

    Ok(RawMolecule { atoms, bonds })
}

fn parse_atom(tz: &mut Tokenizer) -> Result<AtomSpec, SmilesError> {
    if tz.peek() == Some(b'[') {
        return parse_bracket_atom(tz);
    }
    let start = tz.pos;
    let byte = tz.peek().ok_or_else(|| tz.unknown())?;
    // two-letter organic subset first
    if byte == b'C' && tz.bytes.get(tz.pos + 1) == Some(&b'l') {
        tz.pos += 2;
        return Ok(AtomSpec::organic(17));
    }
    if byte == b'B' && tz.bytes.get(tz.pos + 1) == Some(&b'r') {
        tz.pos += 2;
        return Ok(AtomSpec::organic(35));
    }
    let (element, aromatic) = match byte {
        b'B' => (5, false),
        b'C' => (6, false),
        b'N' => (7, false),
        b'O' => (8, false),
        b'P' => (15, false),
        b'S' => (16, false),
        b'F' => (9, false),
        b'I' => (53, false),
        b'b' => (5, true),
        b'c' => (6, true),
        b'n' => (7, true),
        b'o' => (8, true),
        b'p' => (15, true),
        b's' => (16, true),
        _ => {
            tz.pos = start;
            return Err(tz.unknown());
        }
    };
    tz.pos += 1;
    let mut spec = AtomSpec::organic(element);
    spec.aromatic = aromatic;
    Ok(spec)
}

fn parse_bracket_atom(tz: &mut Tokenizer) -> Result<AtomSpec, SmilesError> {
    debug_assert_eq!(tz.peek(), Some(b'['));
    tz.pos += 1;

    let isotope = tz.digits(3).map(|n| n as u16);

    let (element, aromatic) = parse_bracket_symbol(tz)?;

    // chirality: parsed and discarded
    if tz.eat(b'@') {
        tz.eat(b'@');
        // named classes like TH1, AL2, SP3, TB15, OH26
        let save = tz.pos;
        let two_upper = tz.peek().is_some_and(|b| b.is_ascii_uppercase())
            && tz
                .bytes
                .get(tz.pos + 1)
                .is_some_and(|b| b.is_ascii_uppercase());
        if two_upper {
            tz.pos += 2;
            if tz.digits(2).is_none() {
                tz.pos = save;
            }
        }
    }

    let explicit_h = if tz.eat(b'H') {
        tz.digits(1).unwrap_or(1) as u8
    } else {
        0
    };

    let mut charge: i32 = 0;
    if tz.peek() == Some(b'+') || tz.peek() == Some(b'-') {
        let sign: i32 = if tz.peek() == Some(b'+') { 1 } else { -1 };
        let sign_byte = tz.bump().unwrap();
        if let Some(n) = tz.digits(2) {
            charge = sign * n as i32;
        } else {
            charge = sign;
            while tz.peek() == Some(sign_byte) {
                tz.pos += 1;
                charge += sign;
            }
        }
    }
    if charge < i8::MIN as i32 || charge > i8::MAX as i32 {
        return Err(tz.unknown());
    }

    // atom class: parsed and discarded
    if tz.eat(b':') {
        tz.digits(4).ok_or_else(|| tz.unknown())?;
    }

    if !tz.eat(b']') {
        return Err(tz.unknown());
    }

    Ok(AtomSpec {
        element,
        formal_charge: charge as i8,
        explicit_h,
        isotope,
        aromatic,
        bracket: true,
    })
}

fn parse_bracket_symbol(tz: &mut Tokenizer) -> Result<(u8, bool), SmilesError> {
    let byte = tz.peek().ok_or_else(|| tz.unknown())?;
    if byte.is_ascii_lowercase() {
        // aromatic symbols, two-letter first
        for (sym, z) in [("se", 34u8), ("as", 33), ("te", 52)] {
            if tz.bytes[tz.pos..].starts_with(sym.as_bytes()) {
                tz.pos += 2;
                return Ok((z, true));
            }
        }
        let z = match byte {
            b'b' => 5,
            b'c' => 6,
            b'n' => 7,
            b'o' => 8,
            b'p' => 15,
            b's' => 16,
            _ => return Err(tz.unknown()),
        };
        tz.pos += 1;
        return Ok((z, true));
    }
    if !byte.is_ascii_uppercase() {
        return Err(tz.unknown());
    }
    // try the two-letter symbol, then fall back to one letter
    if tz
        .bytes
        .get(tz.pos + 1)
        .is_some_and(|b| b.is_ascii_lowercase())
    {
        let sym = std::str::from_utf8(&tz.bytes[tz.pos..tz.pos + 2]).unwrap();
        if let Some(z) = element::atomic_number(sym) {
            tz.pos += 2;
            return Ok((z, false));
        }
    }
    let sym = std::str::from_utf8(&tz.bytes[tz.pos..tz.pos + 1]).unwrap();
    if let Some(z) = element::atomic_number(sym) {
        tz.pos += 1;
        return Ok((z, false));
    }
    Err(tz.unknown())
}
