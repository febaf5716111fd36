//! FCIDUMP integral files.
//!
//! The header is a Fortran namelist `&FCI NORB=..,NELEC=..,MS2=.. /` (the
//! terminator may also be `&END`), followed by one `value i j k l` record per
//! line with 1-based orbital indices:
//!
//! * `i j k l` all nonzero: two-electron integral `(ij|kl)` in chemist notation
//! * `i j 0 0`: one-electron integral `h_ij`
//! * `0 0 0 0`: core energy
//!
//! Point-group labels (`ORBSYM`, `ISYM`) are read and ignored.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Entries that map to the same canonical key must agree within this.
const DUPLICATE_TOLERANCE: f64 = 1e-10;

/// One- and two-electron integrals over spatial orbitals (0-based indices).
///
/// Two-electron integrals are kept in chemist notation `(pq|rs)` under the
/// 8-fold real-orbital permutational symmetry, so only canonical keys are
/// stored.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralTable {
    pub n_orbitals: usize,
    pub n_electrons: usize,
    pub ms2: i32,
    pub e_core: f64,
    h: BTreeMap<(usize, usize), f64>,
    g: BTreeMap<(usize, usize, usize, usize), f64>,
}

fn pair_key(p: usize, q: usize) -> (usize, usize) {
    if p >= q {
        (p, q)
    } else {
        (q, p)
    }
}

fn pair_index(p: usize, q: usize) -> usize {
    p * (p + 1) / 2 + q
}

/// Canonical representative of `(pq|rs)` under 8-fold symmetry.
fn quad_key(p: usize, q: usize, r: usize, s: usize) -> (usize, usize, usize, usize) {
    let (a, b) = pair_key(p, q);
    let (c, d) = pair_key(r, s);
    if pair_index(a, b) >= pair_index(c, d) {
        (a, b, c, d)
    } else {
        (c, d, a, b)
    }
}

impl IntegralTable {
    pub fn new(n_orbitals: usize, n_electrons: usize, ms2: i32, e_core: f64) -> Result<Self> {
        if n_electrons > 2 * n_orbitals {
            return Err(Error::Config(format!(
                "{n_electrons} electrons do not fit in {n_orbitals} spatial orbitals"
            )));
        }
        if 2 * n_orbitals > crate::hamiltonian::MAX_QUBITS {
            return Err(Error::Config(format!(
                "{n_orbitals} spatial orbitals exceed the {}-qubit limit",
                crate::hamiltonian::MAX_QUBITS
            )));
        }
        Ok(Self {
            n_orbitals,
            n_electrons,
            ms2,
            e_core,
            h: BTreeMap::new(),
            g: BTreeMap::new(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.n_orbitals
    }

    /// `h_pq`, symmetric in `p, q`.
    pub fn h(&self, p: usize, q: usize) -> f64 {
        self.h.get(&pair_key(p, q)).copied().unwrap_or(0.0)
    }

    /// `(pq|rs)` in chemist notation.
    pub fn g(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.g.get(&quad_key(p, q, r, s)).copied().unwrap_or(0.0)
    }

    pub fn set_h(&mut self, p: usize, q: usize, value: f64) {
        self.check_index(&[p, q]);
        self.h.insert(pair_key(p, q), value);
    }

    pub fn set_g(&mut self, p: usize, q: usize, r: usize, s: usize, value: f64) {
        self.check_index(&[p, q, r, s]);
        self.g.insert(quad_key(p, q, r, s), value);
    }

    fn check_index(&self, idx: &[usize]) {
        assert!(
            idx.iter().all(|&i| i < self.n_orbitals),
            "orbital index out of range"
        );
    }

    /// Canonical one-electron entries `(p, q) -> h_pq` with `p >= q`.
    pub fn one_electron(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.h
    }

    /// Canonical two-electron entries.
    pub fn two_electron(&self) -> &BTreeMap<(usize, usize, usize, usize), f64> {
        &self.g
    }

    /// Energy of the Slater determinant occupying the given spin-orbitals.
    ///
    /// Spin-orbital `2p` is the alpha partner of spatial orbital `p` and
    /// `2p + 1` the beta partner.
    pub fn determinant_energy(&self, occupied: &[usize]) -> f64 {
        let spatial = |i: usize| i / 2;
        let spin = |i: usize| i % 2;
        let mut e = self.e_core;
        for &i in occupied {
            e += self.h(spatial(i), spatial(i));
        }
        for &i in occupied {
            for &j in occupied {
                let (p, q) = (spatial(i), spatial(j));
                e += 0.5 * self.g(p, p, q, q);
                if spin(i) == spin(j) {
                    e -= 0.5 * self.g(p, q, q, p);
                }
            }
        }
        e
    }

    /// Energy of the Hartree-Fock reference (lowest spin-orbitals filled).
    pub fn hartree_fock_energy(&self) -> f64 {
        let occ: Vec<usize> = (0..self.n_electrons).collect();
        self.determinant_energy(&occ)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
        parse_fcidump(&text).map_err(|e| e.in_file(path))
    }

    /// Serializes back to FCIDUMP text (canonical entries only).
    pub fn to_fcidump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            " &FCI NORB={},NELEC={},MS2={},",
            self.n_orbitals, self.n_electrons, self.ms2
        );
        let _ = writeln!(out, "  ORBSYM={}", "1,".repeat(self.n_orbitals));
        let _ = writeln!(out, "  ISYM=1,");
        let _ = writeln!(out, " &END");
        for (&(p, q, r, s), v) in &self.g {
            let _ = writeln!(out, " {:.17e} {} {} {} {}", v, p + 1, q + 1, r + 1, s + 1);
        }
        for (&(p, q), v) in &self.h {
            let _ = writeln!(out, " {:.17e} {} {} 0 0", v, p + 1, q + 1);
        }
        let _ = writeln!(out, " {:.17e} 0 0 0 0", self.e_core);
        out
    }
}

#[derive(Default)]
struct Header {
    norb: Option<usize>,
    nelec: Option<usize>,
    ms2: Option<i32>,
}

fn parse_header(text: &str, line: usize) -> Result<Header> {
    // Tokenize on commas/whitespace, keeping '=' as its own token.
    let mut tokens: Vec<String> = Vec::new();
    for chunk in text.split(|c: char| c == ',' || c.is_whitespace()) {
        let mut rest = chunk;
        while let Some(pos) = rest.find('=') {
            if pos > 0 {
                tokens.push(rest[..pos].to_string());
            }
            tokens.push("=".into());
            rest = &rest[pos + 1..];
        }
        if !rest.is_empty() {
            tokens.push(rest.to_string());
        }
    }

    let mut header = Header::default();
    let mut i = 0;
    while i < tokens.len() {
        if tokens.get(i + 1).map(String::as_str) != Some("=") {
            // Orphan token outside KEY=value (list continuation values are
            // consumed below), so the namelist is malformed.
            return Err(Error::parse(line, format!("unexpected token `{}` in header", tokens[i])));
        }
        let key = tokens[i].to_ascii_uppercase();
        i += 2;
        let mut values = Vec::new();
        while i < tokens.len() && tokens.get(i + 1).map(String::as_str) != Some("=") {
            if tokens[i] == "=" {
                return Err(Error::parse(line, "missing key before `=`"));
            }
            values.push(tokens[i].clone());
            i += 1;
        }
        let scalar = |name: &str| -> Result<&String> {
            match values.as_slice() {
                [v] => Ok(v),
                _ => Err(Error::parse(line, format!("{name} expects one value"))),
            }
        };
        match key.as_str() {
            "NORB" => {
                header.norb = Some(
                    scalar("NORB")?
                        .parse()
                        .map_err(|_| Error::parse(line, "NORB is not an integer"))?,
                )
            }
            "NELEC" => {
                header.nelec = Some(
                    scalar("NELEC")?
                        .parse()
                        .map_err(|_| Error::parse(line, "NELEC is not an integer"))?,
                )
            }
            "MS2" => {
                header.ms2 = Some(
                    scalar("MS2")?
                        .parse()
                        .map_err(|_| Error::parse(line, "MS2 is not an integer"))?,
                )
            }
            // ORBSYM, ISYM, UHF, IUHF, ... are accepted and ignored.
            _ => {}
        }
    }
    Ok(header)
}

fn parse_value(token: &str) -> Option<f64> {
    token.replace(['D', 'd'], "E").parse().ok()
}

/// Parses FCIDUMP text into an [`IntegralTable`].
pub fn parse_fcidump(text: &str) -> Result<IntegralTable> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    // Header: from `&FCI` up to `/` or `&END`.
    let mut header_text = String::new();
    let mut header_start = 0;
    let mut closed = false;
    for (n, raw) in lines.by_ref() {
        let line = raw.trim();
        if header_start == 0 {
            if line.is_empty() {
                continue;
            }
            let upper = line.to_ascii_uppercase();
            let Some(rest) = upper.strip_prefix("&FCI") else {
                return Err(Error::parse(n, "expected `&FCI` namelist header"));
            };
            header_start = n;
            let body = &line[line.len() - rest.len()..];
            if let Some(end) = header_terminator(body) {
                header_text.push_str(&body[..end]);
                closed = true;
                break;
            }
            header_text.push_str(body);
            header_text.push(' ');
            continue;
        }
        if let Some(end) = header_terminator(line) {
            header_text.push_str(&line[..end]);
            closed = true;
            break;
        }
        header_text.push_str(line);
        header_text.push(' ');
    }
    if header_start == 0 {
        return Err(Error::parse(1, "missing `&FCI` header"));
    }
    if !closed {
        return Err(Error::parse(header_start, "unterminated `&FCI` header"));
    }
    let header = parse_header(&header_text, header_start)?;
    let norb = header
        .norb
        .ok_or_else(|| Error::parse(header_start, "header is missing NORB"))?;
    let nelec = header
        .nelec
        .ok_or_else(|| Error::parse(header_start, "header is missing NELEC"))?;
    let mut table = IntegralTable::new(norb, nelec, header.ms2.unwrap_or(0), 0.0)
        .map_err(|e| Error::parse(header_start, e.to_string()))?;

    let mut core_seen: Option<f64> = None;
    for (n, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(Error::parse(n, format!("expected `value i j k l`, got `{line}`")));
        }
        let value =
            parse_value(fields[0]).ok_or_else(|| Error::parse(n, format!("bad value `{}`", fields[0])))?;
        let mut idx = [0usize; 4];
        for (slot, f) in idx.iter_mut().zip(&fields[1..]) {
            *slot = f
                .parse()
                .map_err(|_| Error::parse(n, format!("bad orbital index `{f}`")))?;
            if *slot > norb {
                return Err(Error::parse(n, format!("orbital index {slot} exceeds NORB={norb}")));
            }
        }
        let conflict = |old: f64| {
            Error::parse(
                n,
                format!("entry conflicts with an earlier symmetry-equivalent value {old}"),
            )
        };
        match idx {
            [0, 0, 0, 0] => {
                if let Some(old) = core_seen {
                    if (old - value).abs() > DUPLICATE_TOLERANCE {
                        return Err(conflict(old));
                    }
                }
                core_seen = Some(value);
                table.e_core = value;
            }
            [i, j, 0, 0] if i > 0 && j > 0 => {
                let key = pair_key(i - 1, j - 1);
                if let Some(&old) = table.h.get(&key) {
                    if (old - value).abs() > DUPLICATE_TOLERANCE {
                        return Err(conflict(old));
                    }
                }
                table.h.insert(key, value);
            }
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                let key = quad_key(i - 1, j - 1, k - 1, l - 1);
                if let Some(&old) = table.g.get(&key) {
                    if (old - value).abs() > DUPLICATE_TOLERANCE {
                        return Err(conflict(old));
                    }
                }
                table.g.insert(key, value);
            }
            // Orbital energies (`i 0 0 0`) and other partial records carry
            // no Hamiltonian information.
            [_, 0, 0, 0] => {}
            _ => {
                return Err(Error::parse(n, format!("unsupported index pattern {idx:?}")));
            }
        }
    }
    Ok(table)
}

fn header_terminator(line: &str) -> Option<usize> {
    let upper = line.to_ascii_uppercase();
    match (upper.find("&END"), line.find('/')) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const H2: &str = include_str!("../../data/fcidump/h2.fcidump");

    #[test]
    fn single_line_header() {
        let t = parse_fcidump("&FCI NORB=2,NELEC=2,MS2=0 /\n 0.7137 0 0 0 0\n").unwrap();
        assert_eq!((t.n_orbitals, t.n_electrons, t.ms2), (2, 2, 0));
        assert_eq!(t.e_core, 0.7137);
    }

    #[test]
    fn multi_line_header_with_symmetry_labels() {
        let t = parse_fcidump(H2).unwrap();
        assert_eq!(t.n_orbitals, 2);
        assert_eq!(t.n_electrons, 2);
        assert!((t.e_core - 0.7209498786376022).abs() < 1e-15);
        assert!((t.h(0, 0) + 1.256946259950979).abs() < 1e-15);
        // (11|22) and (22|11) collapse into one key.
        assert_eq!(t.two_electron().len(), 4);
        assert_eq!(t.g(0, 0, 1, 1), t.g(1, 1, 0, 0));
        assert_eq!(t.g(1, 0, 1, 0), t.g(0, 1, 0, 1));
        assert_eq!(t.g(1, 0, 0, 1), t.g(0, 1, 1, 0));
    }

    #[test]
    fn fortran_exponents() {
        let t = parse_fcidump("&FCI NORB=1,NELEC=1 /\n 1.5D-01 1 1 0 0\n").unwrap();
        assert!((t.h(0, 0) - 0.15).abs() < 1e-15);
    }

    #[test]
    fn missing_norb_is_an_error() {
        let err = parse_fcidump("&FCI NELEC=2,MS2=0 /\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn missing_nelec_is_an_error() {
        let err = parse_fcidump("\n&FCI NORB=2 /\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn malformed_header() {
        let err = parse_fcidump("NORB=2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_fcidump("&FCI NORB=x,NELEC=2 /\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_fcidump("&FCI NORB=2,NELEC=2\n 1.0 1 1 0 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn malformed_record_reports_line() {
        let err = parse_fcidump("&FCI NORB=2,NELEC=2 /\n 0.5 1 1 0 0\n 0.3 1 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse_fcidump("&FCI NORB=2,NELEC=2 /\n 0.5 3 1 0 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn conflicting_duplicates_rejected() {
        let text = "&FCI NORB=2,NELEC=2 /\n 0.5 1 2 1 2\n 0.6 2 1 2 1\n";
        let err = parse_fcidump(text).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        // Equivalent entries within tolerance are fine.
        let ok = "&FCI NORB=2,NELEC=2 /\n 0.5 1 2 1 2\n 0.50000000000001 2 1 1 2\n";
        assert!(parse_fcidump(ok).is_ok());
    }

    #[test]
    fn too_many_electrons() {
        assert!(parse_fcidump("&FCI NORB=1,NELEC=3 /\n").is_err());
    }

    #[test]
    fn serialization_round_trip() {
        let t = parse_fcidump(H2).unwrap();
        let again = parse_fcidump(&t.to_fcidump()).unwrap();
        assert_eq!(t, again);
    }

    #[test]
    fn h2_hartree_fock_energy() {
        let t = parse_fcidump(H2).unwrap();
        // RHF total energy reported by the generating SCF run.
        assert!((t.hartree_fock_energy() + 1.1170416281381552).abs() < 1e-10);
    }
}
