//! The JSON module file format.
//!
//! ```json
//! {"field": 2, "criticals": ["1", "2"], "dims": [0, 1, 1, 1, 0],
//!  "maps": [[[1]], [[1]], [[1]], []]}
//! ```
//!
//! Map `k` goes from piece `k` to piece `k + 1` and has `dims[k + 1]` rows of
//! `dims[k]` entries, each already reduced mod `field`. Critical values are
//! strings holding decimals or fractions.

use obpers::persmod::GridModule;
use obpers::{FieldSpec, Mat, Real};
use serde::Deserialize;

use crate::CliError;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModuleFile {
    field: u64,
    criticals: Vec<String>,
    dims: Vec<usize>,
    maps: Vec<Vec<Vec<i64>>>,
}

pub fn parse_module(text: &str) -> Result<GridModule, CliError> {
    let file: ModuleFile = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    let criticals = file
        .criticals
        .iter()
        .map(|s| s.parse::<Real>().map_err(|e| CliError::Parse(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let field = FieldSpec::new(file.field).map_err(|e| CliError::Invariant(format!("field: {e}")))?;
    if file.dims.len() != 2 * criticals.len() + 1 {
        return Err(CliError::Invariant(format!(
            "dims: expected 2n+1 = {} entries for {} critical values, got {}",
            2 * criticals.len() + 1,
            criticals.len(),
            file.dims.len()
        )));
    }
    if file.maps.len() != 2 * criticals.len() {
        return Err(CliError::Invariant(format!(
            "maps: expected 2n = {} matrices, got {}",
            2 * criticals.len(),
            file.maps.len()
        )));
    }
    let p = field.characteristic() as i64;
    let mut maps = Vec::with_capacity(file.maps.len());
    for (k, rows) in file.maps.iter().enumerate() {
        let (r, c) = (file.dims[k + 1], file.dims[k]);
        if rows.len() != r || rows.iter().any(|row| row.len() != c) {
            return Err(CliError::Invariant(format!("maps[{k}]: expected a {r}x{c} matrix")));
        }
        if let Some(&x) = rows.iter().flatten().find(|&&x| !(0..p).contains(&x)) {
            return Err(CliError::Invariant(format!("maps[{k}]: entry {x} is not reduced mod {p}")));
        }
        let data = rows.iter().flatten().map(|&x| x as u32).collect();
        maps.push(Mat::from_residues(field, r, c, data).map_err(|e| CliError::Invariant(format!("maps[{k}]: {e}")))?);
    }
    GridModule::new(field, criticals, file.dims, maps).map_err(|e| CliError::Invariant(e.to_string()))
}

fn matrix_json(m: &Mat) -> String {
    let rows: Vec<Vec<u32>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
    serde_json::to_string(&rows).expect("plain integers serialize")
}

/// Serializes a module, one matrix per line.
pub fn write_module(v: &GridModule) -> String {
    let criticals: Vec<String> = v.criticals().iter().map(Real::to_string).collect();
    let maps: Vec<String> = v.maps().iter().map(|m| format!("    {}", matrix_json(m))).collect();
    let maps = if maps.is_empty() {
        "[]".to_string()
    } else {
        format!("[\n{}\n  ]", maps.join(",\n"))
    };
    format!(
        "{{\n  \"field\": {},\n  \"criticals\": {},\n  \"dims\": {},\n  \"maps\": {}\n}}\n",
        v.field().characteristic(),
        serde_json::to_string(&criticals).unwrap(),
        serde_json::to_string(v.dims()).unwrap(),
        maps
    )
}
