use super::{parse_case, ModelError, SystemCase};

/// Names of the cases compiled into the crate.
pub const BUNDLED_CASES: [&str; 3] = ["six_bus", "tiny2", "triangle3"];

pub fn bundled_case_json(name: &str) -> Option<&'static str> {
    match name {
        "six_bus" => Some(include_str!("../../fixtures/six_bus.case")),
        "tiny2" => Some(include_str!("../../fixtures/tiny2.case")),
        "triangle3" => Some(include_str!("../../fixtures/triangle3.case")),
        _ => None,
    }
}

pub fn bundled_case(name: &str) -> Result<SystemCase, ModelError> {
    let text = bundled_case_json(name).ok_or_else(|| ModelError::Schema {
        field: "<name>".into(),
        message: format!(
            "no bundled case named {name:?}; known: {}",
            BUNDLED_CASES.join(", ")
        ),
    })?;
    parse_case(text)
}
