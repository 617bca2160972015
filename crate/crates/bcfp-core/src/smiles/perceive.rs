//! Graph perception: hydrogen folding, ring membership, aromatic flag
//! cleanup, optional Kekulé-ring normalization, implicit hydrogens, and
//! valence checking.

use crate::element;
use crate::smiles::parser::RawMolecule;
use crate::smiles::{Atom, Bond, BondOrder, Molecule, ParseOptions, SmilesError};

pub(crate) fn perceive(
    raw: RawMolecule,
    source: &str,
    opts: &ParseOptions,
) -> Result<Molecule, SmilesError> {
    let (specs, bonds) = fold_hydrogens(raw);

    let mut atoms: Vec<Atom> = specs
        .iter()
        .map(|s| Atom {
            element: s.element,
            formal_charge: s.formal_charge,
            explicit_h: s.explicit_h,
            implicit_h: 0,
            aromatic: s.aromatic,
            in_ring: false,
            isotope: s.isotope,
            degree: 0,
            bracket: s.bracket,
        })
        .collect();

    let mut bonds: Vec<Bond> = bonds
        .into_iter()
        .map(|(a, b, order, explicit_order)| Bond {
            a,
            b,
            order,
            in_ring: false,
            explicit_order,
        })
        .collect();

    let adjacency = build_adjacency(atoms.len(), &bonds);
    mark_rings(&mut atoms, &mut bonds, &adjacency);

    // Aromatic atoms must lie in rings; demote stray lowercase flags and
    // downgrade the implicit aromatic bond orders they induced. Bonds
    // written with an explicit ':' keep their order.
    for atom in atoms.iter_mut() {
        if atom.aromatic && !atom.in_ring {
            atom.aromatic = false;
        }
    }
    for bond in bonds.iter_mut() {
        if bond.order == BondOrder::Aromatic
            && !bond.explicit_order
            && !(atoms[bond.a].aromatic && atoms[bond.b].aromatic)
        {
            bond.order = BondOrder::Single;
        }
    }

    if opts.normalize_rings {
        normalize_kekule_rings(&mut atoms, &mut bonds, &adjacency);
    }

    assign_hydrogens(&mut atoms, &bonds, &adjacency)?;

    for (i, atom) in atoms.iter_mut().enumerate() {
        atom.degree = adjacency[i].len() as u32;
    }

    Ok(Molecule {
        atoms,
        bonds,
        adjacency,
        source: source.to_string(),
    })
}

/// (a, b, order, explicit-order flag) bond rows during perception.
type RawBond = (usize, usize, BondOrder, bool);

/// Fold neutral, isotope-free, singly-bonded explicit hydrogens into
/// their heavy neighbor's hydrogen count. Charged or isolated hydrogens
/// stay as graph atoms.
fn fold_hydrogens(raw: RawMolecule) -> (Vec<crate::smiles::AtomSpec>, Vec<RawBond>) {
    let n = raw.atoms.len();
    let mut bond_count = vec![0usize; n];
    for &(a, b, _, _) in &raw.bonds {
        bond_count[a] += 1;
        bond_count[b] += 1;
    }

    let mut fold_into: Vec<Option<usize>> = vec![None; n];
    for (i, spec) in raw.atoms.iter().enumerate() {
        if spec.element == 1
            && spec.formal_charge == 0
            && spec.isotope.is_none()
            && spec.explicit_h == 0
            && bond_count[i] == 1
        {
            let bond = raw
                .bonds
                .iter()
                .find(|&&(a, b, _, _)| a == i || b == i)
                .unwrap();
            let neighbor = if bond.0 == i { bond.1 } else { bond.0 };
            if bond.2 == BondOrder::Single && raw.atoms[neighbor].element != 1 {
                fold_into[i] = Some(neighbor);
            }
        }
    }

    let mut specs = Vec::with_capacity(n);
    let mut remap = vec![usize::MAX; n];
    for (i, spec) in raw.atoms.into_iter().enumerate() {
        match fold_into[i] {
            Some(_) => {}
            None => {
                remap[i] = specs.len();
                specs.push(spec);
            }
        }
    }
    for (i, target) in fold_into.iter().enumerate() {
        if let Some(t) = target {
            specs[remap[*t]].explicit_h = specs[remap[*t]].explicit_h.saturating_add(1);
            let _ = i;
        }
    }

    let bonds = raw
        .bonds
        .into_iter()
        .filter(|&(a, b, _, _)| fold_into[a].is_none() && fold_into[b].is_none())
        .map(|(a, b, o, e)| (remap[a], remap[b], o, e))
        .collect();

    (specs, bonds)
}

fn build_adjacency(n_atoms: usize, bonds: &[Bond]) -> Vec<Vec<usize>> {
    let mut adjacency = vec![Vec::new(); n_atoms];
    for (bi, bond) in bonds.iter().enumerate() {
        adjacency[bond.a].push(bi);
        adjacency[bond.b].push(bi);
    }
    adjacency
}

/// Mark every atom and bond lying on a cycle. A bond is on a cycle iff it
/// is not a bridge; bridges are found with an iterative low-link DFS.
fn mark_rings(atoms: &mut [Atom], bonds: &mut [Bond], adjacency: &[Vec<usize>]) {
    let n = atoms.len();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut timer = 0usize;

    // frame: (atom, parent bond, incident iterator position)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        stack.push((root, usize::MAX, 0));
        while let Some(&mut (u, pbond, ref mut it)) = stack.last_mut() {
            if *it < adjacency[u].len() {
                let bi = adjacency[u][*it];
                *it += 1;
                if bi == pbond {
                    continue;
                }
                let v = bonds[bi].other(u);
                if disc[v] == usize::MAX {
                    disc[v] = timer;
                    low[v] = timer;
                    timer += 1;
                    stack.push((v, bi, 0));
                } else {
                    // non-tree edge: always part of a cycle
                    bonds[bi].in_ring = true;
                    low[u] = low[u].min(disc[v]);
                }
            } else {
                stack.pop();
                if let Some(&mut (parent, _, _)) = stack.last_mut() {
                    low[parent] = low[parent].min(low[u]);
                    if low[u] > disc[parent] {
                        // pbond is a bridge: leave it unmarked
                    } else {
                        bonds[pbond].in_ring = true;
                    }
                }
            }
        }
    }

    for bond in bonds.iter() {
        if bond.in_ring {
            atoms[bond.a].in_ring = true;
            atoms[bond.b].in_ring = true;
        }
    }
}

/// Mark six-membered all-C/N rings whose bonds alternate single/double
/// as aromatic. Each pass evaluates every candidate ring against the
/// state at the start of the pass, so the outcome is independent of ring
/// enumeration order; passes repeat until nothing changes.
fn normalize_kekule_rings(atoms: &mut [Atom], bonds: &mut [Bond], adjacency: &[Vec<usize>]) {
    let cycles = six_cycles(atoms.len(), bonds, adjacency);
    if cycles.is_empty() {
        return;
    }
    loop {
        let mut to_mark: Vec<usize> = Vec::new();
        for (ci, cycle) in cycles.iter().enumerate() {
            if !cycle
                .atoms
                .iter()
                .all(|&a| matches!(atoms[a].element, 6 | 7))
            {
                continue;
            }
            let orders: Vec<BondOrder> = cycle.bonds.iter().map(|&bi| bonds[bi].order).collect();
            if orders
                .iter()
                .any(|o| !matches!(o, BondOrder::Single | BondOrder::Double))
            {
                continue;
            }
            let doubles = orders.iter().filter(|&&o| o == BondOrder::Double).count();
            let adjacent_doubles = (0..6).any(|i| {
                orders[i] == BondOrder::Double && orders[(i + 1) % 6] == BondOrder::Double
            });
            if doubles == 3 && !adjacent_doubles {
                to_mark.push(ci);
            }
        }
        if to_mark.is_empty() {
            break;
        }
        for ci in to_mark {
            for &a in &cycles[ci].atoms {
                atoms[a].aromatic = true;
            }
            for &bi in &cycles[ci].bonds {
                bonds[bi].order = BondOrder::Aromatic;
            }
        }
    }
}

struct Cycle {
    atoms: [usize; 6],
    bonds: [usize; 6],
}

/// Enumerate simple six-cycles over ring bonds. Each cycle is produced
/// once: the walk starts at its smallest atom and moves first toward the
/// smaller of the two possible directions.
fn six_cycles(n_atoms: usize, bonds: &[Bond], adjacency: &[Vec<usize>]) -> Vec<Cycle> {
    let mut cycles = Vec::new();
    let mut path = [0usize; 6];
    let mut path_bonds = [0usize; 6];

    fn extend(
        start: usize,
        depth: usize,
        path: &mut [usize; 6],
        path_bonds: &mut [usize; 6],
        bonds: &[Bond],
        adjacency: &[Vec<usize>],
        cycles: &mut Vec<Cycle>,
    ) {
        let current = path[depth - 1];
        for &bi in &adjacency[current] {
            let bond = &bonds[bi];
            if !bond.in_ring {
                continue;
            }
            let next = bond.other(current);
            if depth == 6 {
                if next == start && path[1] < path[5] {
                    path_bonds[5] = bi;
                    cycles.push(Cycle {
                        atoms: *path,
                        bonds: *path_bonds,
                    });
                }
                continue;
            }
            if next <= start || path[..depth].contains(&next) {
                continue;
            }
            path[depth] = next;
            path_bonds[depth - 1] = bi;
            extend(start, depth + 1, path, path_bonds, bonds, adjacency, cycles);
        }
    }

    for start in 0..n_atoms {
        path[0] = start;
        extend(
            start,
            1,
            &mut path,
            &mut path_bonds,
            bonds,
            adjacency,
            &mut cycles,
        );
    }
    cycles
}

/// Compute implicit hydrogens and enforce the valence contract.
///
/// Organic-subset atoms receive `smallest fitting default − bond sum`
/// hydrogens; aromatic ones use the lowest default with the 1.5-per-
/// aromatic-bond rule and clamp at zero (real toolkits validate these
/// through kekulization instead of the valence sum). Bracket atoms
/// never get implicit hydrogens; neutral non-aromatic ones with a known
/// default valence are checked against it.
fn assign_hydrogens(
    atoms: &mut [Atom],
    bonds: &[Bond],
    adjacency: &[Vec<usize>],
) -> Result<(), SmilesError> {
    for i in 0..atoms.len() {
        let sum: f64 = adjacency[i]
            .iter()
            .map(|&bi| bonds[bi].order.valence())
            .sum();
        let explicit_valence = (sum.ceil() as u32) + atoms[i].explicit_h as u32;
        let defaults = element::default_valences(atoms[i].element);

        if atoms[i].bracket {
            atoms[i].implicit_h = 0;
            if atoms[i].formal_charge == 0 && !atoms[i].aromatic {
                if let Some(defaults) = defaults {
                    let max = *defaults.last().unwrap() as u32;
                    if explicit_valence > max {
                        return Err(SmilesError::ValenceError {
                            atom: i,
                            valence: explicit_valence,
                        });
                    }
                }
            }
            continue;
        }

        // organic subset: defaults always known; folded-in explicit
        // hydrogens count toward the valence
        let defaults = defaults.expect("organic subset element");
        let needed = sum.ceil() as u32 + atoms[i].explicit_h as u32;
        if atoms[i].aromatic {
            let base = defaults[0] as u32;
            atoms[i].implicit_h = base.saturating_sub(needed) as u8;
        } else {
            match defaults.iter().find(|&&d| d as u32 >= needed) {
                Some(&d) => atoms[i].implicit_h = (d as u32 - needed) as u8,
                None => {
                    return Err(SmilesError::ValenceError {
                        atom: i,
                        valence: explicit_valence,
                    });
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smiles::parse_smiles;

    #[test]
    fn bridges_are_not_ring_bonds() {
        let mol = parse_smiles("C1CC1CC1CC1").unwrap(); // two rings, one linker
        let ring_bonds = mol.bonds.iter().filter(|b| b.in_ring).count();
        assert_eq!(ring_bonds, 6);
        assert_eq!(mol.bond_count(), 8);
    }

    #[test]
    fn fused_rings_all_marked() {
        let mol = parse_smiles("C1CC2CCC1CC2").unwrap(); // bicyclic, all bonds in rings
        assert!(mol.bonds.iter().all(|b| b.in_ring));
        assert!(mol.atoms.iter().all(|a| a.in_ring));
    }

    #[test]
    fn spiro_center_in_ring() {
        let mol = parse_smiles("C1CCC2(CC1)CCCC2").unwrap();
        assert!(mol.atoms.iter().all(|a| a.in_ring));
    }

    #[test]
    fn six_cycle_enumeration_counts() {
        let benzene = parse_smiles("c1ccccc1").unwrap();
        let cycles = six_cycles(benzene.atom_count(), &benzene.bonds, &benzene.adjacency);
        assert_eq!(cycles.len(), 1);

        // naphthalene: two six-cycles (the ten-membered perimeter is ignored)
        let naph = parse_smiles("c1ccc2ccccc2c1").unwrap();
        let cycles = six_cycles(naph.atom_count(), &naph.bonds, &naph.adjacency);
        assert_eq!(cycles.len(), 2);

        let cyclohexane = parse_smiles("C1CCCCC1").unwrap();
        let cycles = six_cycles(
            cyclohexane.atom_count(),
            &cyclohexane.bonds,
            &cyclohexane.adjacency,
        );
        assert_eq!(cycles.len(), 1);
    }

    #[test]
    fn normalization_requires_alternation() {
        use crate::smiles::{parse_smiles_with, ParseOptions};
        let opts = ParseOptions {
            normalize_rings: true,
        };
        // 1,3-cyclohexadiene: two doubles only, not aromatic
        let diene = parse_smiles_with("C1=CC=CCC1", &opts).unwrap();
        assert!(diene.atoms.iter().all(|a| !a.aromatic));
        // benzene Kekulé: alternating, normalized
        let benzene = parse_smiles_with("C1=CC=CC=C1", &opts).unwrap();
        assert!(benzene.atoms.iter().all(|a| a.aromatic));
        assert_eq!(benzene.atoms[0].implicit_h, 1);
    }

    #[test]
    fn normalization_skips_hetero_rings() {
        use crate::smiles::{parse_smiles_with, ParseOptions};
        let opts = ParseOptions {
            normalize_rings: true,
        };
        // pyran-like ring with oxygen: not all C/N
        let mol = parse_smiles_with("O1C=CC=CC1", &opts).unwrap();
        assert!(mol.atoms.iter().all(|a| !a.aromatic));
    }
}
