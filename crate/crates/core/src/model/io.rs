use std::fs;
use std::path::Path;

use super::{ModelError, SystemCase};

/// Parses and validates a case document.
pub fn parse_case(text: &str) -> Result<SystemCase, ModelError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let case: SystemCase = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        ModelError::Schema {
            field: if field == "." { "<root>".into() } else { field },
            message: e.into_inner().to_string(),
        }
    })?;
    case.validate()?;
    Ok(case)
}

pub fn load_case(path: impl AsRef<Path>) -> Result<SystemCase, ModelError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ModelError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_case(&text)
}

pub fn to_json(case: &SystemCase) -> String {
    let mut s = serde_json::to_string_pretty(case).expect("case serializes");
    s.push('\n');
    s
}

pub fn save_case(case: &SystemCase, path: impl AsRef<Path>) -> Result<(), ModelError> {
    let path = path.as_ref();
    fs::write(path, to_json(case)).map_err(|source| ModelError::Io {
        path: path.display().to_string(),
        source,
    })
}
