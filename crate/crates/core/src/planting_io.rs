//! Planting files and generator strings.
//!
//! Files are JSON, either dense `{"n": 4, "a": [2, 0, 1, 0]}` or sparse
//! `{"n": 4, "sparse": {"0": 2, "2": 1}}` with 0-based indices and omitted
//! bins empty. Generator strings are `flat:<k>`, `singlebin:<k>` and
//! `file:<path>`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Planting;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum PlantingFile {
    Dense {
        n: usize,
        a: Vec<i64>,
    },
    Sparse {
        n: usize,
        sparse: BTreeMap<String, i64>,
    },
}

impl PlantingFile {
    pub fn into_planting(self) -> Result<Planting> {
        match self {
            PlantingFile::Dense { n, a } => {
                if a.len() != n {
                    return Err(Error::InvalidPlanting(format!(
                        "n = {n} but {} counts given",
                        a.len()
                    )));
                }
                Planting::new(&a)
            }
            PlantingFile::Sparse { n, sparse } => {
                let mut a = vec![0i64; n];
                for (key, count) in sparse {
                    let idx: usize = key.trim().parse().map_err(|_| {
                        Error::InvalidPlanting(format!("sparse index {key:?} is not an integer"))
                    })?;
                    let slot = a.get_mut(idx).ok_or_else(|| {
                        Error::InvalidPlanting(format!(
                            "sparse index {idx} out of range for n = {n}"
                        ))
                    })?;
                    *slot = count;
                }
                Planting::new(&a)
            }
        }
    }

    pub fn dense(p: &Planting) -> Self {
        PlantingFile::Dense {
            n: p.n(),
            a: p.counts().iter().map(|&x| x as i64).collect(),
        }
    }
}

pub fn parse_planting_json(text: &str) -> Result<Planting> {
    serde_json::from_str::<PlantingFile>(text)?.into_planting()
}

pub fn load_planting_file(path: &Path) -> Result<Planting> {
    let text = std::fs::read_to_string(path)?;
    parse_planting_json(&text)
}

/// Resolves a generator string. `n` is required for `flat:` and `singlebin:`;
/// for `file:` it must agree with the file when given.
pub fn resolve_planting(source: &str, n: Option<usize>) -> Result<Planting> {
    let (kind, arg) = source.split_once(':').ok_or_else(|| {
        Error::InvalidPlanting(format!("unrecognized planting source {source:?}"))
    })?;
    let need_n = || {
        n.ok_or_else(|| Error::InvalidPlanting(format!("{kind}: generator needs a bin count n")))
    };
    let parse_k = || {
        arg.trim()
            .parse::<u64>()
            .map_err(|_| Error::InvalidPlanting(format!("bad ball count in {source:?}")))
    };
    match kind {
        "flat" => Planting::flat(need_n()?, parse_k()?),
        "singlebin" => Planting::single_bin(need_n()?, parse_k()?),
        "file" => {
            let p = load_planting_file(Path::new(arg))?;
            if let Some(n) = n {
                if n != p.n() {
                    return Err(Error::InvalidPlanting(format!(
                        "file has n = {} but n = {n} was requested",
                        p.n()
                    )));
                }
            }
            Ok(p)
        }
        _ => Err(Error::InvalidPlanting(format!(
            "unrecognized planting source {source:?}"
        ))),
    }
}
