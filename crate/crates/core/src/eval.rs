//! Named map evaluation on JSON documents, as exposed by the command line.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bott::{
    bott01_module, bott10_module, bott_0_1, bott_1_0, loop_theta, symmetric_grid, LoopFamily, LoopFlavor, LoopJson,
};
use crate::classes::{cover_map, is_member, theta_conjugate, OperatorClass};
use crate::corpus::{random_member, seeded, Reality};
use crate::error::{Error, Result};
use crate::homotopy::{assemble_from_flag, decompose_to_flag, FlagChain, FlagJson};
use crate::maps::{graded_index, index_shift, star_product};
use crate::module::{build_universe, Context, GradedRealModule};
use crate::spectral::{ConfigJson, HinfOperator};

pub const MAP_NAMES: [&str; 10] = [
    "star", "bott10", "bott01", "loop-theta", "shift", "theta", "cover", "index", "decompose", "assemble",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    /// Universe level the inputs live on.
    pub level: usize,
    /// Level of the `ℋ₀₀` factors used by shifts and Bott maps.
    pub factor_level: usize,
    pub grid: usize,
    /// Context for inputs that carry none (flags).
    pub signature: Option<Context>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            level: 2,
            factor_level: 1,
            grid: 33,
            signature: None,
        }
    }
}

/// Number of input documents `map` expects.
pub fn arity(map: &str) -> Result<usize> {
    match map {
        "star" => Ok(2),
        m if MAP_NAMES.contains(&m) => Ok(1),
        other => Err(Error::UnknownMap(other.to_string())),
    }
}

fn parse_operator(v: &Value) -> Result<HinfOperator> {
    let json: ConfigJson = serde_json::from_value(v.clone())?;
    if json.schema != "config.v1" {
        return Err(Error::Parse(format!("expected config.v1, found {}", json.schema)));
    }
    HinfOperator::from_json(&json)
}

fn universe_of(g: &HinfOperator, level: usize) -> Result<GradedRealModule> {
    let m = build_universe(g.context, level)?;
    if m.dim() != g.ambient_dim() {
        return Err(Error::AmbientMismatch(format!(
            "ambient dimension {} is not that of the level {level} universe for {} ({})",
            g.ambient_dim(),
            g.context,
            m.dim()
        )));
    }
    Ok(m)
}

fn require(g: &HinfOperator, m: &GradedRealModule, cls: OperatorClass) -> Result<()> {
    let report = is_member(g, m, cls)?;
    match report.failures().first() {
        Some(fail) => Err(Error::Precondition {
            check: format!("membership: {}", fail.check),
            residual: fail.residual,
        }),
        None => Ok(()),
    }
}

/// A member operator: parsed, placed in its universe and checked.
fn member(v: &Value, opts: &EvalOptions) -> Result<(HinfOperator, GradedRealModule)> {
    let g = parse_operator(v)?;
    let m = universe_of(&g, opts.level)?;
    require(&g, &m, OperatorClass::Kr)?;
    Ok((g, m))
}

fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    Ok(serde_json::to_value(x)?)
}

/// Evaluates `map` on `inputs`; the result is a JSON document.
pub fn eval_map(map: &str, inputs: &[Value], opts: &EvalOptions) -> Result<Value> {
    let n = arity(map)?;
    if inputs.len() != n {
        return Err(Error::InvalidArgument(format!("{map} takes {n} input(s), got {}", inputs.len())));
    }
    match map {
        "star" => {
            let (g, m) = member(&inputs[0], opts)?;
            let (h, _) = member(&inputs[1], opts)?;
            to_value(&star_product(&g, &m, &h).to_json())
        }
        "bott10" | "bott01" => {
            let (g, _) = member(&inputs[0], opts)?;
            let grid = symmetric_grid(opts.grid)?;
            let family = if map == "bott10" {
                bott_1_0(&g, opts.factor_level, &grid)?
            } else {
                bott_0_1(&g, opts.factor_level, &grid)?
            };
            to_value(&family.to_json())
        }
        "loop-theta" => {
            let json: LoopJson = serde_json::from_value(inputs[0].clone())?;
            let family = LoopFamily::from_json(&json)?;
            let m = loop_module(&family, opts)?;
            to_value(&loop_theta(&family, family.flavor, &m)?.to_json())
        }
        "shift" => {
            let (g, _) = member(&inputs[0], opts)?;
            to_value(&index_shift(&g, opts.factor_level)?.to_json())
        }
        "theta" => {
            let (g, m) = member(&inputs[0], opts)?;
            to_value(&theta_conjugate(&g, &m).to_json())
        }
        "cover" => {
            let (g, m) = member(&inputs[0], opts)?;
            to_value(&cover_map(&g, &m)?.to_json())
        }
        "index" => {
            let (g, m) = member(&inputs[0], opts)?;
            Ok(serde_json::json!({ "index": graded_index(&g, &m) }))
        }
        "decompose" => {
            let (g, _) = member(&inputs[0], opts)?;
            to_value(&decompose_to_flag(&g.config).to_json())
        }
        "assemble" => {
            let json: FlagJson = serde_json::from_value(inputs[0].clone())?;
            if json.schema != "flag.v1" {
                return Err(Error::Parse(format!("expected flag.v1, found {}", json.schema)));
            }
            let flag = FlagChain::from_json(&json)?;
            let ctx = opts
                .signature
                .ok_or_else(|| Error::InvalidArgument("assemble needs a signature".into()))?;
            let m = build_universe(ctx, opts.level)?;
            if m.dim() != flag.ambient_dim {
                return Err(Error::AmbientMismatch(format!(
                    "flag of dimension {} on a universe of dimension {}",
                    flag.ambient_dim,
                    m.dim()
                )));
            }
            let report = flag.validate(&m);
            if let Some(fail) = report.failures().first() {
                return Err(Error::Precondition {
                    check: format!("flag: {}", fail.check),
                    residual: fail.residual,
                });
            }
            to_value(&HinfOperator::new(assemble_from_flag(&flag), ctx).to_json())
        }
        other => Err(Error::UnknownMap(other.to_string())),
    }
}

/// The module carrying a Bott loop of `flavor` over a universe of the
/// source context.
fn loop_module(family: &LoopFamily, opts: &EvalOptions) -> Result<GradedRealModule> {
    let ctx = family.context;
    let dim = family.values[0].ambient_dim();
    let src = match family.flavor {
        LoopFlavor::Omega10 if ctx.q > 0 && ctx.k > 0 => Context::new(ctx.p, ctx.q - 1, ctx.k - 1, ctx.l),
        LoopFlavor::Omega01 if ctx.p > 0 && ctx.l > 0 => Context::new(ctx.p - 1, ctx.q, ctx.k, ctx.l - 1),
        _ => return Err(Error::AmbientMismatch(format!("{ctx} is not a loop context"))),
    };
    let base = build_universe(src, opts.level)?;
    let m = match family.flavor {
        LoopFlavor::Omega10 => bott10_module(&base, opts.factor_level)?,
        LoopFlavor::Omega01 => bott01_module(&base, opts.factor_level)?,
    };
    if m.dim() != dim {
        return Err(Error::AmbientMismatch(format!(
            "loop values of dimension {dim}, expected {} at level {}",
            m.dim(),
            opts.level
        )));
    }
    Ok(m)
}

/// A seeded random member of the level `level` universe for `ctx`.
pub fn sample_member(ctx: Context, level: usize, seed: u64, fixed: bool) -> Result<Value> {
    let mut rng = seeded(seed);
    let reality = if fixed { Reality::Fixed } else { Reality::Generic };
    to_value(&random_member(&mut rng, ctx, level, reality)?.op.to_json())
}
