use std::path::{Path, PathBuf};

use milnor_core::fibered::{milnor_structure, FiberedJson, SeifertInput};
use milnor_core::isostruct::{SkewIsometricStructure, StructureJson};
use milnor_core::linkforms::{chi_pushforward, LinkingForm, LinkingFormJson};
use milnor_core::{Backend, CycloNumber, FieldFlavor, Scalar};
use serde::de::DeserializeOwned;

use crate::CliError;

/// A parsed input file. The shape is recognized by its keys.
#[derive(Debug)]
pub enum Input {
    Seifert(SeifertInput),
    Fibered(FiberedJson),
    Structure(StructureJson),
    Linking(LinkingFormJson),
}

impl Input {
    pub fn kind(&self) -> &'static str {
        match self {
            Input::Seifert(_) => "Seifert matrix",
            Input::Fibered(_) => "fiber data",
            Input::Structure(_) => "skew-isometric structure",
            Input::Linking(_) => "linking form",
        }
    }

    /// The skew-isometric structure the input determines: directly, through
    /// the fibered pipeline, or as the χ-pushforward of a linking form.
    pub fn structure<S: Scalar>(&self, backend: Backend) -> Result<SkewIsometricStructure<S>, CliError> {
        Ok(match self {
            Input::Seifert(s) => milnor_structure(&s.fibered(backend)?)?,
            Input::Fibered(f) => milnor_structure(&f.build(backend)?)?,
            Input::Structure(j) => {
                let exact = j.to_exact()?;
                let flavor = match backend {
                    Backend::ExactCyclotomic { .. } => *exact.flavor(),
                    Backend::FloatComplex { .. } => FieldFlavor::new(j.flavor, backend)?,
                };
                j.to_backend(flavor)?
            }
            // Smith forms are unstable in floating point: push forward
            // exactly, then convert
            Input::Linking(l) => match backend {
                Backend::ExactCyclotomic { .. } => chi_pushforward(&l.build::<S>(backend)?)?,
                Backend::FloatComplex { .. } => {
                    let exact = chi_pushforward(&l.build::<CycloNumber>(Backend::ExactCyclotomic { order: 1 })?)?;
                    StructureJson::from_structure(&exact).to_backend(FieldFlavor::new(exact.flavor().kind, backend)?)?
                }
            },
        })
    }

    pub fn linking_form<S: Scalar>(&self, backend: Backend) -> Result<LinkingForm<S>, CliError> {
        match self {
            Input::Linking(l) => Ok(l.build(backend)?),
            other => Err(CliError::Validation(format!(
                "expected a linking form, got a {}",
                other.kind()
            ))),
        }
    }
}

fn parse_as<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::parse(path, &e))
}

pub fn load(path: &Path) -> Result<Input, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: PathBuf::from(path),
        source: e,
    })?;
    let value: serde_json::Value = parse_as(path, &text)?;
    let obj = value
        .as_object()
        .ok_or_else(|| CliError::Validation(format!("{}: top-level JSON value must be an object", path.display())))?;
    let has = |k: &str| obj.contains_key(k);
    // reparse from text so schema errors keep their line and column
    if has("V") {
        Ok(Input::Seifert(parse_as(path, &text)?))
    } else if has("lambda") || has("phi") {
        Ok(Input::Fibered(parse_as(path, &text)?))
    } else if has("mu") {
        Ok(Input::Structure(parse_as(path, &text)?))
    } else if has("presentation") || has("relations") || has("elementary") {
        Ok(Input::Linking(parse_as(path, &text)?))
    } else {
        Err(CliError::Validation(format!(
            "{}: unrecognized input; expected keys V, lambda/phi, mu/t, presentation, relations or elementary",
            path.display()
        )))
    }
}
