use std::path::Path;

use super::types::{validate_channel, RawChannel, StateChannel};
use crate::error::{Error, Result};

/// Parses and validates a channel document.
pub fn channel_from_json(text: &str) -> Result<StateChannel> {
    let raw: RawChannel = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {}, column {}: {}", e.line(), e.column(), e)))?;
    validate_channel(&raw)
}

pub fn channel_to_json(ch: &StateChannel) -> String {
    serde_json::to_string_pretty(&ch.to_raw()).expect("channel serializes")
}

pub fn read_channel(path: &Path) -> Result<StateChannel> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    channel_from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"{
        "nx": 1, "ns": 2, "nj": 1, "ny": 2, "ns_hat": 2,
        "W": [[[[0.5, 0.5]], [[0.25, 0.75]]]],
        "Qs": [0.4, 0.6],
        "distortion": [[0, 1], [1, 0]]
    }"#;

    #[test]
    fn round_trip() {
        let ch = channel_from_json(DOC).unwrap();
        assert_eq!(ch.w(0, 1, 0, 1), 0.75);
        let again = channel_from_json(&channel_to_json(&ch)).unwrap();
        assert_eq!(ch, again);
    }

    #[test]
    fn parse_error_has_location() {
        let err = channel_from_json("{\n  \"nx\": ,\n}").unwrap_err();
        match err {
            Error::Parse(msg) => assert!(msg.starts_with("line 2"), "{msg}"),
            e => panic!("unexpected {e:?}"),
        }
    }
}
