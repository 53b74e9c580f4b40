//! Expansion files. Layout (see `schema/expansion.schema.json`):
//!
//! ```json
//! {"alpha": [..], "beta": [..], "basis": "standard" | {"shifted": i}, "N": n,
//!  "coeffs": [{"k": [..], "v": x}, ..]}
//! ```
//!
//! Shifted coordinates are one-based on disk and zero-based in the library. Files
//! written by the CLI carry an extra `config` key, ignored on input.

use std::collections::BTreeSet;
use std::io::Read;
use std::path::Path;

use jacobi_core::{Basis, Expansion, MultiIndex, ParamVector};
use serde::{Deserialize, Serialize};

use crate::error::{usage, CliError};
use crate::output::{num, Table};

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(untagged)]
pub enum BasisField {
    Named(String),
    Shifted { shifted: usize },
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Coeff {
    pub k: Vec<u32>,
    pub v: f64,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExpansionFile {
    #[serde(default, skip_serializing)]
    config: Option<serde_json::Value>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub basis: BasisField,
    #[serde(rename = "N")]
    pub n: u32,
    pub coeffs: Vec<Coeff>,
}

impl ExpansionFile {
    pub fn from_expansion(f: &Expansion) -> Self {
        let basis = match f.basis() {
            Basis::Standard => BasisField::Named("standard".into()),
            Basis::Shifted(i) => BasisField::Shifted { shifted: i + 1 },
        };
        Self {
            config: None,
            alpha: f.params().alphas(),
            beta: f.params().betas(),
            basis,
            n: f.degree_cap(),
            coeffs: f
                .coefficients()
                .iter()
                .map(|(k, &v)| Coeff {
                    k: k.as_slice().to_vec(),
                    v,
                })
                .collect(),
        }
    }

    pub fn to_expansion(&self) -> Result<Expansion, CliError> {
        let params = ParamVector::new(&self.alpha, &self.beta)?;
        let d = params.dim();
        let basis = match &self.basis {
            BasisField::Named(s) if s == "standard" => Basis::Standard,
            BasisField::Named(s) => return Err(usage(format!("unknown basis `{s}`"))),
            BasisField::Shifted { shifted } if (1..=d).contains(shifted) => {
                Basis::Shifted(shifted - 1)
            }
            BasisField::Shifted { shifted } => {
                return Err(usage(format!(
                    "shifted coordinate {shifted} out of range for d = {d}"
                )))
            }
        };
        let mut f = Expansion::new(params, basis, self.n)?;
        let mut seen = BTreeSet::new();
        for c in &self.coeffs {
            if !c.v.is_finite() {
                return Err(usage(format!("coefficient at k={:?} is not finite", c.k)));
            }
            if !seen.insert(c.k.clone()) {
                return Err(usage(format!("duplicate coefficient at k={:?}", c.k)));
            }
            f.set(MultiIndex::new(c.k.clone()), c.v)?;
        }
        Ok(f)
    }

    pub fn table(&self) -> Table {
        let d = self.alpha.len();
        let mut cols: Vec<String> = (1..=d).map(|i| format!("k{i}")).collect();
        cols.push("v".into());
        let mut t = Table {
            columns: cols,
            ..Table::default()
        };
        t.note("alpha", crate::output::join(&self.alpha));
        t.note("beta", crate::output::join(&self.beta));
        t.note(
            "basis",
            match &self.basis {
                BasisField::Named(s) => s.clone(),
                BasisField::Shifted { shifted } => format!("shifted {shifted}"),
            },
        );
        t.note("N", self.n);
        for c in &self.coeffs {
            let mut row: Vec<String> = c.k.iter().map(u32::to_string).collect();
            row.push(num(c.v));
            t.rows.push(row);
        }
        t
    }
}

pub fn read_expansion(path: &Path) -> Result<Expansion, CliError> {
    let mut text = String::new();
    let res = if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text)
    } else {
        std::fs::File::open(path).and_then(|mut f| f.read_to_string(&mut text))
    };
    res.map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let file: ExpansionFile = serde_json::from_str(&text)
        .map_err(|e| usage(format!("{}: not an expansion file: {e}", path.display())))?;
    file.to_expansion()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifted_basis_is_one_based_on_disk() {
        let p = ParamVector::new(&[0.5, -0.25], &[1.0, 0.0]).unwrap();
        let mut f = Expansion::new(p, Basis::Shifted(1), 3).unwrap();
        f.set(MultiIndex::new(vec![1, 2]), -0.125).unwrap();
        let file = ExpansionFile::from_expansion(&f);
        let json = serde_json::to_string(&file).unwrap();
        assert_eq!(
            json,
            r#"{"alpha":[0.5,-0.25],"beta":[1.0,0.0],"basis":{"shifted":2},"N":3,"coeffs":[{"k":[1,2],"v":-0.125}]}"#
        );
        let back: ExpansionFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_expansion().unwrap(), f);
    }

    #[test]
    fn floats_reload_bit_exactly() {
        use rand_chacha::rand_core::{RngCore, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut coeffs = Vec::new();
        while coeffs.len() < 20_000 {
            let v = f64::from_bits(rng.next_u64());
            if v.is_finite() {
                coeffs.push(Coeff { k: vec![0], v });
            }
        }
        let file = ExpansionFile {
            config: None,
            alpha: vec![0.1],
            beta: vec![0.2],
            basis: BasisField::Named("standard".into()),
            n: 0,
            coeffs,
        };
        let back: ExpansionFile =
            serde_json::from_str(&serde_json::to_string(&file).unwrap()).unwrap();
        for (a, b) in file.coeffs.iter().zip(&back.coeffs) {
            assert_eq!(a.v.to_bits(), b.v.to_bits());
        }
    }

    #[test]
    fn rejects_bad_files() {
        let bad = [
            r#"{"alpha":[0],"beta":[0],"basis":"weird","N":1,"coeffs":[]}"#,
            r#"{"alpha":[0],"beta":[0],"basis":{"shifted":0},"N":1,"coeffs":[]}"#,
            r#"{"alpha":[0],"beta":[0],"basis":"standard","N":1,"coeffs":[{"k":[2],"v":1}]}"#,
            r#"{"alpha":[0],"beta":[0],"basis":"standard","N":1,"coeffs":[{"k":[1,0],"v":1}]}"#,
            r#"{"alpha":[0],"beta":[0],"basis":"standard","N":1,"coeffs":[{"k":[1],"v":1},{"k":[1],"v":2}]}"#,
            r#"{"alpha":[-1],"beta":[0],"basis":"standard","N":1,"coeffs":[]}"#,
            r#"{"alpha":[0,0],"beta":[0],"basis":"standard","N":1,"coeffs":[]}"#,
        ];
        for s in bad {
            let file: ExpansionFile = serde_json::from_str(s).unwrap();
            assert!(file.to_expansion().is_err(), "{s}");
        }
        assert!(serde_json::from_str::<ExpansionFile>(
            r#"{"alpha":[0],"beta":[0],"basis":"standard","N":1,"coeffs":[],"x":1}"#
        )
        .is_err());
    }
}
