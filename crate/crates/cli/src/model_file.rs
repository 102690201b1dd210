//! Versioned JSON model files.

use std::path::Path;

use art_core::{ArtModel, Loss};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const FORMAT: &str = "art-model";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    /// Feature columns in model order.
    pub feature_names: Vec<String>,
    pub response: String,
    pub loss: Loss,
    pub model: ArtModel,
}

impl ModelFile {
    pub fn new(feature_names: Vec<String>, response: String, loss: Loss, model: ArtModel) -> Self {
        ModelFile {
            format: FORMAT.to_string(),
            version: VERSION,
            feature_names,
            response,
            loss,
            model,
        }
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Numerical(format!("cannot serialize model: {e}")))?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        // Check the header first so a foreign or newer file gets a clear message.
        #[derive(Deserialize)]
        struct Header {
            format: Option<String>,
            version: Option<u32>,
        }
        let header: Header = serde_json::from_str(text)
            .map_err(|e| CliError::Data(format!("model file is not valid JSON: {e}")))?;
        if header.format.as_deref() != Some(FORMAT) {
            return Err(CliError::Data(format!(
                "not a model file: format is {:?}, expected `{FORMAT}`",
                header.format
            )));
        }
        if header.version != Some(VERSION) {
            return Err(CliError::Data(format!(
                "unsupported model file version {:?}, expected {VERSION}",
                header.version
            )));
        }
        let file: ModelFile = serde_json::from_str(text)
            .map_err(|e| CliError::Data(format!("malformed model file: {e}")))?;
        if file.feature_names.len() != file.model.n_features {
            return Err(CliError::Data(format!(
                "model file lists {} feature names for {} features",
                file.feature_names.len(),
                file.model.n_features
            )));
        }
        if file.model.candidates.len() != file.model.final_weights.len() {
            return Err(CliError::Data(
                "model file has a different number of candidates and weights".into(),
            ));
        }
        Ok(file)
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_json()?)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use art_core::{art_fit, ArtConfig, Dataset, LearnerSpec, Task};

    fn sample() -> ModelFile {
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|i| vec![i as f64 * 0.1, (i % 7) as f64])
            .collect();
        let y: Vec<f64> = rows.iter().map(|r| 1.0 + 2.0 * r[0] - r[1] / 3.0).collect();
        let primary = Dataset::from_rows(&rows, y.clone(), Task::Regression).unwrap();
        let aux = Dataset::from_rows(&rows, y.iter().map(|v| v + 0.3).collect(), Task::Regression)
            .unwrap();
        let model = art_fit(
            &primary,
            &[aux],
            &LearnerSpec::Ridge { penalty: 0.1 },
            &Loss::Squared,
            &ArtConfig::default(),
        )
        .unwrap();
        ModelFile::new(
            vec!["a".into(), "b".into()],
            "y".into(),
            Loss::Squared,
            model,
        )
    }

    #[test]
    fn serialize_parse_serialize_is_identical() {
        let first = sample().to_json().unwrap();
        let second = ModelFile::from_json(&first).unwrap().to_json().unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn rejects_other_formats_and_versions() {
        let text = sample().to_json().unwrap();
        let newer = text.replacen("\"version\": 1", "\"version\": 2", 1);
        assert!(ModelFile::from_json(&newer)
            .unwrap_err()
            .to_string()
            .contains("version"));
        assert!(ModelFile::from_json("{\"format\": \"other\"}").is_err());
        assert!(ModelFile::from_json("not json").is_err());
    }
}
