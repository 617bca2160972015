//! Element symbol table and default valences.

/// Symbols indexed by atomic number − 1.
const SYMBOLS: [&str; 118] = [
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S", "Cl",
    "Ar", "K", "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As",
    "Se", "Br", "Kr", "Rb", "Sr", "Y", "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In",
    "Sn", "Sb", "Te", "I", "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd", "Tb",
    "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W", "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl",
    "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U", "Np", "Pu", "Am", "Cm", "Bk",
    "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn", "Nh",
    "Fl", "Mc", "Lv", "Ts", "Og",
];

/// Look up an atomic number (1-based) from an element symbol.
pub fn atomic_number(symbol: &str) -> Option<u8> {
    SYMBOLS
        .iter()
        .position(|&s| s == symbol)
        .map(|i| (i + 1) as u8)
}

/// Element symbol for an atomic number, if valid.
pub fn symbol(atomic_number: u8) -> Option<&'static str> {
    if atomic_number == 0 {
        return None;
    }
    SYMBOLS.get(atomic_number as usize - 1).copied()
}

/// Default valences for the organic subset, lowest state first.
/// Elements outside this set never receive implicit hydrogens and are
/// never valence-checked.
pub fn default_valences(atomic_number: u8) -> Option<&'static [u8]> {
    match atomic_number {
        5 => Some(&[3]),                // B
        6 => Some(&[4]),                // C
        7 => Some(&[3]),                // N
        8 => Some(&[2]),                // O
        15 => Some(&[3, 5]),            // P
        16 => Some(&[2, 4, 6]),         // S
        9 | 17 | 35 | 53 => Some(&[1]), // F Cl Br I
        _ => None,
    }
}

/// Elements that may carry the aromatic flag when written lowercase.
pub fn can_be_aromatic(atomic_number: u8) -> bool {
    matches!(atomic_number, 5 | 6 | 7 | 8 | 15 | 16 | 33 | 34 | 52)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_roundtrip() {
        for z in 1..=118u8 {
            let s = symbol(z).unwrap();
            assert_eq!(atomic_number(s), Some(z), "symbol {s}");
        }
    }

    #[test]
    fn organic_subset_lookup() {
        assert_eq!(atomic_number("C"), Some(6));
        assert_eq!(atomic_number("Cl"), Some(17));
        assert_eq!(atomic_number("Br"), Some(35));
        assert_eq!(atomic_number("Xx"), None);
    }

    #[test]
    fn valence_tables() {
        assert_eq!(default_valences(6), Some(&[4][..]));
        assert_eq!(default_valences(16), Some(&[2, 4, 6][..]));
        assert_eq!(default_valences(26), None); // Fe: no implicit H model
    }
}
