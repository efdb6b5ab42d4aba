//! Space presets and JSON configuration files.

use std::path::Path;

use llcomp_core::spaces::{load_space, AnySpace, SpaceConfig, SpaceInstance};

use crate::error::CliError;

/// Resolves a `--space` argument: `minkowski`, `taxicab`, `ds:<k>`,
/// `ads:<k>` or the path of a JSON space configuration.
///
/// For `ds:` the curvature is `+|k|`, for `ads:` it is `−|k|`.
pub fn resolve_space(arg: &str) -> Result<SpaceConfig, CliError> {
    let curvature = |rest: &str, sign: f64| -> Result<SpaceConfig, CliError> {
        let k: f64 = rest
            .parse()
            .map_err(|_| CliError::Input(format!("invalid curvature in space preset {arg:?}")))?;
        if !(k.is_finite() && k != 0.0) {
            return Err(CliError::Input(format!("curvature in {arg:?} must be finite and nonzero")));
        }
        Ok(SpaceConfig::Model { k: sign * k.abs() })
    };
    match arg {
        "minkowski" => Ok(SpaceConfig::Minkowski),
        "taxicab" => Ok(SpaceConfig::Taxicab),
        _ => {
            if let Some(rest) = arg.strip_prefix("ds:") {
                curvature(rest, 1.0)
            } else if let Some(rest) = arg.strip_prefix("ads:") {
                curvature(rest, -1.0)
            } else {
                read_space_file(Path::new(arg))
            }
        }
    }
}

pub fn read_space_file(path: &Path) -> Result<SpaceConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read space config {}: {e}", path.display())))?;
    parse_space(&text)
}

pub fn parse_space(text: &str) -> Result<SpaceConfig, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("invalid space config: {e}")))
}

/// Builds and validates a space of any kind.
pub fn build_space(config: &SpaceConfig) -> Result<AnySpace, CliError> {
    load_space(config).map_err(|e| CliError::Input(e.to_string()))
}

/// Builds a space whose points are chart events (no products).
pub fn build_instance(config: &SpaceConfig) -> Result<SpaceInstance, CliError> {
    match build_space(config)? {
        AnySpace::Instance(s) => Ok(s),
        AnySpace::Product(_) => Err(CliError::Input(
            "taxicab products support relation and τ queries only".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        assert_eq!(resolve_space("minkowski").unwrap(), SpaceConfig::Minkowski);
        assert_eq!(resolve_space("ds:2").unwrap(), SpaceConfig::Model { k: 2.0 });
        assert_eq!(resolve_space("ads:1").unwrap(), SpaceConfig::Model { k: -1.0 });
        assert_eq!(resolve_space("ads:-1").unwrap(), SpaceConfig::Model { k: -1.0 });
        assert!(resolve_space("ds:0").is_err());
        assert!(resolve_space("nosuch.json").is_err());
    }

    #[test]
    fn json_configs() {
        assert_eq!(parse_space(r#"{"type":"taxicab"}"#).unwrap(), SpaceConfig::Taxicab);
        let tab = r#"{"type":"tabulated",
            "points":[{"id":"p","x":0,"t":0},{"id":"q","x":0,"t":1},{"id":"r","x":0,"t":2}],
            "tau":[[0,1,1.5],[0,0,1],[0,0,0]]}"#;
        let err = build_space(&parse_space(tab).unwrap()).unwrap_err();
        assert!(err.to_string().contains("(p, q, r)"), "{err}");
        let prod = r#"{"type":"taxicab_product",
            "metric_points":{"ids":["a"],"distances":[[0]]},
            "space":{"type":"taxicab"}}"#;
        assert!(matches!(build_space(&parse_space(prod).unwrap()).unwrap(), AnySpace::Product(_)));
        assert!(parse_space(r#"{"type":"nosuch"}"#).is_err());
    }
}
