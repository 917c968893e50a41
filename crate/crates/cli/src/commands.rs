use milnor_core::fibered::{
    blanchfield_from_seifert, from_seifert, levine_tristram, milnor_structure, SeifertInput, BLANCHFIELD_SIGN,
};
use milnor_core::isostruct::{
    milnor_signature, primary_decomposition, total_signature, SkewIsometricStructure, StructureJson,
};
use milnor_core::linkforms::{
    chi_pushforward, elementary_linking, trace_constant, JumpEvaluator, JumpOptions, JumpRoute, LinkingFormJson,
};
use milnor_core::{Backend, CycloNumber, FieldFlavor, FlavorKind, Scalar};
use rayon::prelude::*;
use serde_json::json;

use crate::input::Input;
use crate::output::{Cell, Point, Table};
use crate::CliError;

/// Where the evaluation points come from.
#[derive(Clone, Debug)]
pub enum Points {
    /// Explicit `N/k` specs, in the given order.
    List(Vec<String>),
    /// Every primitive `N/k` with `N <= bound`, by increasing angle.
    Grid(u64),
    /// The points where the structure has a primary part.
    Auto,
}

/// Primitive specs `n/k` (`gcd(k, n) = 1`) with `n <= bound`, skipping
/// `±1`, ordered by angle.
pub fn grid_specs(bound: u64) -> Vec<(u64, i64)> {
    let mut out: Vec<(u64, i64)> = (3..=bound)
        .flat_map(|n| (1..n as i64).map(move |k| (n, k)))
        .filter(|&(n, k)| num_integer::gcd(k as u64, n) == 1)
        .collect();
    out.sort_by(|a, b| (a.1 as u128 * b.0 as u128).cmp(&(b.1 as u128 * a.0 as u128)));
    out
}

fn root<S: Scalar>(n: u64, k: i64, backend: Backend) -> Result<Point<S>, CliError> {
    let value = S::root_of_unity(n, k)?.with_backend(&backend);
    Ok(Point {
        spec: Some(format!("{n}/{}", k.rem_euclid(n as i64))),
        value,
    })
}

fn explicit<S: Scalar>(points: &Points, backend: Backend) -> Result<Option<Vec<Point<S>>>, CliError> {
    Ok(match points {
        Points::List(specs) => Some(
            specs
                .iter()
                .map(|s| {
                    let (n, k) = milnor_core::cyclofield::parse_root_spec(s)?;
                    root(n, k, backend)
                })
                .collect::<Result<_, _>>()?,
        ),
        Points::Grid(bound) => Some(
            grid_specs(*bound)
                .into_iter()
                .map(|(n, k)| root(n, k, backend))
                .collect::<Result<_, _>>()?,
        ),
        Points::Auto => None,
    })
}

/// Explicit points, or the `ξ` of every primary part of `s`.
fn points_for<S: Scalar>(
    points: &Points,
    s: &SkewIsometricStructure<S>,
    backend: Backend,
) -> Result<Vec<Point<S>>, CliError> {
    if let Some(p) = explicit(points, backend)? {
        return Ok(p);
    }
    let mut parts: Vec<Point<S>> = primary_decomposition(s)?
        .parts
        .iter()
        .map(|p| Point::new(p.xi().clone()))
        .collect();
    parts.sort_by(|a, b| {
        let angle = |x: &S| x.to_c64().arg().rem_euclid(std::f64::consts::TAU);
        angle(&a.value).total_cmp(&angle(&b.value))
    });
    Ok(parts)
}

fn unipotent_caveat<S: Scalar>(s: &SkewIsometricStructure<S>) -> Result<String, CliError> {
    Ok(if primary_decomposition(s)?.unipotent.is_empty() {
        String::new()
    } else {
        "t=+-1 torsion present".into()
    })
}

pub fn signature<S: Scalar + Send + Sync>(input: &Input, points: &Points, backend: Backend) -> Result<Table, CliError> {
    let s = input.structure::<S>(backend)?;
    let total = total_signature(&s)?;
    let caveat = unipotent_caveat(&s)?;
    let pts = points_for(points, &s, backend)?;
    let values: Vec<i64> = pts
        .par_iter()
        .map(|p| milnor_signature(&s, &p.value))
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(vec!["xi", "milnor_signature", "total_signature", "caveat"]);
    for (p, v) in pts.iter().zip(values) {
        table.push(vec![Cell::point(p), Cell::Int(v), Cell::Int(total), Cell::Text(caveat.clone())]);
    }
    Ok(table)
}

fn route_label(r: JumpRoute) -> &'static str {
    match r {
        JumpRoute::Devissage => "routeA",
        JumpRoute::Trace => "routeB",
    }
}

/// Jump table; the second value reports whether every row with both routes
/// agreed.
pub fn jumps<S: Scalar>(
    input: &Input,
    points: &Points,
    backend: Backend,
    both: bool,
) -> Result<(Table, bool), CliError> {
    let form = input.linking_form::<S>(backend)?;
    let pts = match explicit(points, backend)? {
        Some(p) => p,
        None => points_for(&Points::Auto, &chi_pushforward(&form)?, backend)?,
    };
    let mut eval = JumpEvaluator::new(
        &form,
        JumpOptions {
            check_both_routes: both,
            force_trace: false,
        },
    );
    let mut columns = vec!["xi", "jump", "route"];
    if both {
        columns.extend(["devissage", "trace", "consistent"]);
    }
    let mut table = Table::new(columns);
    let mut ok = true;
    for p in &pts {
        let r = eval.jump(&p.value)?;
        let mut row = vec![Cell::point(p), Cell::Int(r.value), Cell::Text(route_label(r.route).into())];
        if both {
            ok &= r.consistent();
            row.extend([Cell::OptInt(r.devissage), Cell::OptInt(r.trace), Cell::Bool(r.consistent())]);
        }
        table.push(row);
    }
    Ok((table, ok))
}

fn seifert(input: &Input) -> Result<&SeifertInput, CliError> {
    match input {
        Input::Seifert(s) => {
            s.validate()?;
            Ok(s)
        }
        other => Err(CliError::Validation(format!(
            "expected a Seifert matrix, got a {}",
            other.kind()
        ))),
    }
}

pub fn lt_profile<S: Scalar + Send + Sync>(input: &Input, points: &Points, backend: Backend) -> Result<Table, CliError> {
    let s = seifert(input)?;
    let v = s.matrix::<S>()?;
    let specs: Vec<Point<S>> = match points {
        Points::Auto => explicit(&Points::Grid(24), backend)?.unwrap_or_default(),
        other => explicit(other, backend)?.unwrap_or_default(),
    };
    let rows: Vec<Vec<Cell>> = specs
        .par_iter()
        .map(|p| -> Result<Vec<Cell>, CliError> {
            let omega = &p.value;
            if omega.is_plus_minus_one() {
                return Err(CliError::Validation(format!(
                    "omega = {} is excluded from the profile",
                    p.spec.clone().unwrap_or_default()
                )));
            }
            let order = omega.ambient_order().map_or(1, |o| num_integer::lcm(o, 2));
            let flavor = FieldFlavor::new(FlavorKind::Complex, backend)?.with_ambient(order);
            let structure = milnor_structure(&from_seifert(&v, omega, flavor)?)?;
            let total = total_signature(&structure)?;
            let at = levine_tristram(&v, omega)?;
            let at_neg = levine_tristram(&v, &-omega.clone())?;
            let alexander_root = v.sub(&v.transpose().scale(omega)).det().is_zero();
            let caveat = unipotent_caveat(&structure)?;
            Ok(vec![
                Cell::point(p),
                Cell::Int(at),
                Cell::Int(at_neg),
                Cell::Int(total),
                Cell::Int(at_neg - at),
                Cell::Bool(alexander_root),
                Cell::Text(caveat),
            ])
        })
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(vec![
        "omega",
        "levine_tristram",
        "levine_tristram_neg",
        "total_signature",
        "predicted",
        "alexander_root",
        "caveat",
    ]);
    for row in rows {
        table.push(row);
    }
    Ok(table)
}

/// Per-point agreement report; the second value is the overall verdict.
pub fn crosscheck<S: Scalar + Send + Sync>(
    input: &Input,
    points: &Points,
    backend: Backend,
) -> Result<(Table, bool), CliError> {
    match input {
        Input::Linking(_) => crosscheck_linking::<S>(input, points, backend),
        Input::Seifert(_) => crosscheck_blanchfield::<S>(input, points, backend),
        other => Err(CliError::Validation(format!(
            "crosscheck needs a linking form or a Seifert matrix, got a {}",
            other.kind()
        ))),
    }
}

fn crosscheck_linking<S: Scalar>(input: &Input, points: &Points, backend: Backend) -> Result<(Table, bool), CliError> {
    let form = input.linking_form::<S>(backend)?;
    let pushed = chi_pushforward(&form)?;
    let pts = points_for(points, &pushed, backend)?;
    let mut eval = JumpEvaluator::new(
        &form,
        JumpOptions {
            check_both_routes: true,
            force_trace: false,
        },
    );
    let mut table = Table::new(vec!["xi", "devissage", "trace", "milnor_signature", "constant", "status"]);
    let mut ok = true;
    for p in &pts {
        let r = eval.jump(&p.value)?;
        let milnor = milnor_signature(&pushed, &p.value)?;
        let c = trace_constant(&p.value, form.flavor().kind);
        let status = match r.devissage {
            Some(d) if d * c == milnor && r.consistent() => "ok",
            Some(_) => "mismatch",
            None => "trace-only",
        };
        ok &= status != "mismatch";
        table.push(vec![
            Cell::point(p),
            Cell::OptInt(r.devissage),
            Cell::OptInt(r.trace),
            Cell::Int(milnor),
            Cell::Int(c),
            Cell::Text(status.into()),
        ]);
    }
    Ok((table, ok))
}

fn crosscheck_blanchfield<S: Scalar + Send + Sync>(
    input: &Input,
    points: &Points,
    backend: Backend,
) -> Result<(Table, bool), CliError> {
    let s = seifert(input)?;
    let v = s.matrix::<S>()?;
    let flavor = FieldFlavor::new(FlavorKind::Real, backend)?;
    let pushed = chi_pushforward(&blanchfield_from_seifert(&v, flavor)?)?;
    let fibered = milnor_structure(&from_seifert(&v, &S::one(), flavor)?)?;
    let pts = points_for(points, &fibered, backend)?;
    let mut table = Table::new(vec!["xi", "blanchfield", "fibered", "sign", "status"]);
    let mut ok = true;
    for p in &pts {
        let a = milnor_signature(&pushed, &p.value)?;
        let b = milnor_signature(&fibered, &p.value)?;
        let agree = a == BLANCHFIELD_SIGN * b;
        ok &= agree;
        table.push(vec![
            Cell::point(p),
            Cell::Int(a),
            Cell::Int(b),
            Cell::Int(BLANCHFIELD_SIGN),
            Cell::Text(if agree { "ok" } else { "mismatch" }.into()),
        ]);
    }
    Ok((table, ok))
}

/// `𝔢(n, ε, ξ, F)` and its χ-pushforward `𝐞(n, ε, ξ, F)`, always exact.
pub struct Elementary {
    pub linking: LinkingFormJson,
    pub structure: SkewIsometricStructure<CycloNumber>,
}

pub fn elementary(n: u32, eps: i32, xi: &str, kind: FlavorKind) -> Result<Elementary, CliError> {
    if eps != 1 && eps != -1 {
        return Err(CliError::Validation(format!("eps must be 1 or -1, got {eps}")));
    }
    let z = CycloNumber::parse_root_spec(xi)?;
    let flavor = match kind {
        FlavorKind::Real => FieldFlavor::real(z.order()),
        FlavorKind::Complex => FieldFlavor::complex(z.order()),
    };
    let form = elementary_linking(n, eps, &z, &flavor)?;
    Ok(Elementary {
        linking: LinkingFormJson::from_form(&form),
        structure: chi_pushforward(&form)?,
    })
}

impl Elementary {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "linking_form": self.linking,
            "structure": StructureJson::from_structure(&self.structure),
        })
    }

    /// Entries of `μ` and `t` as `(matrix, row, col, value)` rows.
    pub fn table(&self) -> Table {
        let mut table = Table::new(vec!["matrix", "row", "col", "value"]);
        for (name, m) in [("mu", self.structure.mu()), ("t", self.structure.t())] {
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    table.push(vec![
                        Cell::Text(name.into()),
                        Cell::Int(i as i64),
                        Cell::Int(j as i64),
                        Cell::scalar(&m[(i, j)]),
                    ]);
                }
            }
        }
        table
    }
}
