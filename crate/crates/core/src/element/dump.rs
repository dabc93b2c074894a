use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::value::RawValue;

use super::{LocalElement, StabilizationChoice};
use crate::error::Result;
use crate::mesh::Mesh;

/// Per-cell matrices for cross-implementation diffing. Matrices are
/// row-major with 17 significant digits.
#[derive(Debug, Serialize)]
pub struct ElementDump {
    pub cell: usize,
    pub order: usize,
    pub stabilization: &'static str,
    pub dofs: usize,
    #[serde(rename = "D")]
    pub d: Box<RawValue>,
    #[serde(rename = "B")]
    pub b: Box<RawValue>,
    #[serde(rename = "G")]
    pub g: Box<RawValue>,
    #[serde(rename = "M")]
    pub m: Box<RawValue>,
}

fn matrix_json(m: &DMatrix<f64>) -> Box<RawValue> {
    let rows: Vec<String> = m
        .row_iter()
        .map(|r| {
            let vals: Vec<String> = r.iter().map(|v| format!("{v:.16e}")).collect();
            format!("[{}]", vals.join(","))
        })
        .collect();
    RawValue::from_string(format!("[{}]", rows.join(","))).expect("formatted floats are valid json")
}

pub fn dump_element(
    mesh: &Mesh,
    cell: usize,
    order: usize,
    stab: &StabilizationChoice,
) -> Result<ElementDump> {
    let el = LocalElement::new(mesh, cell, order, stab)?;
    Ok(ElementDump {
        cell,
        order,
        stabilization: stab.name(),
        dofs: el.layout.len(),
        d: matrix_json(&el.d),
        b: matrix_json(&el.b),
        g: matrix_json(el.g()),
        m: matrix_json(&el.m),
    })
}
