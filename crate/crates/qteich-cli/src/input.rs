use std::io::Read;

use anyhow::Result;
use qteich::representations::{LocalRepResolved, RepJson};
use qteich::surface_topology::{examples, IdealTriangulation, TriangulationSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::{usage, Opts};

/// A triangulation given inline or by name.
#[derive(Deserialize, Debug, Clone)]
#[serde(untagged)]
pub enum SurfaceInput {
    Named {
        example: String,
        #[serde(default)]
        p: Option<usize>,
        #[serde(default)]
        case: Option<usize>,
    },
    Spec(TriangulationSpec),
}

impl SurfaceInput {
    pub fn build(&self) -> Result<IdealTriangulation> {
        match self {
            SurfaceInput::Spec(s) => Ok(IdealTriangulation::try_from(s.clone())?),
            SurfaceInput::Named { example, p, case } => named(example, *p, *case),
        }
    }
}

pub fn named(name: &str, p: Option<usize>, case: Option<usize>) -> Result<IdealTriangulation> {
    Ok(match name {
        "triangle" => examples::triangle(),
        "square" => examples::square(),
        "pentagon" => examples::pentagon(),
        "torus" => examples::torus(),
        "polygon" => {
            let p = p.ok_or_else(|| usage("polygon needs \"p\""))?;
            if p < 3 {
                return Err(usage("polygon needs p >= 3"));
            }
            examples::polygon(p)
        }
        "square-case" => {
            let c = case.ok_or_else(|| usage("square-case needs \"case\""))?;
            if !(1..=8).contains(&c) {
                return Err(usage("square-case needs case in 1..=8"));
            }
            examples::square_case(c)
        }
        other => return Err(usage(format!("unknown example '{other}'"))),
    })
}

/// Every field any command reads. A document whose top level has
/// `triangles` is read as the triangulation itself.
#[derive(Deserialize, Debug, Default, Clone)]
#[serde(deny_unknown_fields)]
pub struct Input {
    pub triangulation: Option<SurfaceInput>,
    pub rep: Option<RepJson>,
    #[serde(rename = "move")]
    pub mv: Option<String>,
    pub from: Option<SurfaceInput>,
    pub to: Option<SurfaceInput>,
    pub budget: Option<usize>,
    pub i: Option<usize>,
    pub j: Option<usize>,
    pub moves: Option<Vec<String>>,
    pub edge_map: Option<Vec<usize>>,
    pub shadow: Option<Vec<[f64; 2]>>,
    pub k: Option<i64>,
    pub method: Option<String>,
}

pub fn read(opts: &Opts) -> Result<Input> {
    let Some(path) = &opts.input else { return Ok(Input::default()) };
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| usage(format!("cannot read stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?
    };
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| usage(format!("invalid JSON: {e}")))?;
    if value.get("triangles").is_some() || value.get("example").is_some() {
        let s: SurfaceInput = serde_json::from_value(value).map_err(|e| usage(format!("invalid triangulation: {e}")))?;
        return Ok(Input { triangulation: Some(s), ..Input::default() });
    }
    serde_json::from_value(value).map_err(|e| usage(format!("invalid input: {e}")))
}

impl Input {
    pub fn triangulation_or(&self, default: &str) -> Result<IdealTriangulation> {
        match &self.triangulation {
            Some(s) => s.build(),
            None => named(default, None, None),
        }
    }

    pub fn require_triangulation(&self) -> Result<IdealTriangulation> {
        self.triangulation.as_ref().ok_or_else(|| usage("input needs a triangulation"))?.build()
    }

    /// The supplied representation, or a random one drawn from `--seed`.
    pub fn rep(&self, lambda: &IdealTriangulation, opts: &Opts) -> Result<LocalRepResolved> {
        match &self.rep {
            Some(j) => {
                if let Some(n) = opts.order {
                    if n != j.order {
                        return Err(usage(format!("--N {n} disagrees with the representation's N = {}", j.order)));
                    }
                }
                Ok(LocalRepResolved::from_json(lambda.clone(), j)?)
            }
            None => {
                let n = order(opts)?;
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                Ok(LocalRepResolved::random(lambda, n, &mut rng))
            }
        }
    }
}

pub fn order(opts: &Opts) -> Result<usize> {
    match opts.order {
        Some(0) => Err(usage("--N must be positive")),
        Some(n) => Ok(n),
        None => Ok(3),
    }
}
