//! Bundled scenario files. Each is an ordinary config whose first comment
//! line doubles as its description.

use super::config::RunConfig;
use crate::error::{Error, Result};

const FILES: [(&str, &str); 7] = [
    ("fig1", include_str!("../../presets/fig1.toml")),
    ("fig2", include_str!("../../presets/fig2.toml")),
    ("fig3", include_str!("../../presets/fig3.toml")),
    ("fig4", include_str!("../../presets/fig4.toml")),
    ("fig5", include_str!("../../presets/fig5.toml")),
    ("fig6", include_str!("../../presets/fig6.toml")),
    ("fig7", include_str!("../../presets/fig7.toml")),
];

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub description: String,
    pub source: &'static str,
    pub config: RunConfig,
}

fn describe(text: &str) -> String {
    text.lines()
        .next()
        .and_then(|l| l.strip_prefix('#'))
        .map(|l| l.trim().to_string())
        .unwrap_or_default()
}

pub fn list_presets() -> Vec<Preset> {
    FILES
        .iter()
        .map(|&(name, text)| Preset {
            name,
            description: describe(text),
            source: text,
            config: RunConfig::from_toml_str(text)
                .unwrap_or_else(|e| panic!("bundled preset {name} is invalid: {e}")),
        })
        .collect()
}

pub fn preset(name: &str) -> Result<RunConfig> {
    let (_, text) = FILES.iter().find(|(n, _)| *n == name).ok_or_else(|| {
        let known: Vec<_> = FILES.iter().map(|(n, _)| *n).collect();
        Error::InvalidConfig(format!(
            "unknown preset `{name}` (known: {})",
            known.join(", ")
        ))
    })?;
    RunConfig::from_toml_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seven_presets_all_valid() {
        let all = list_presets();
        assert_eq!(all.len(), 7);
        for p in &all {
            p.config.resolved().unwrap();
            assert!(!p.description.is_empty());
        }
    }

    #[test]
    fn presets_round_trip_through_flat_text() {
        for p in list_presets() {
            let text = p.config.to_toml_string().unwrap();
            assert_eq!(
                RunConfig::from_toml_str(&text).unwrap(),
                p.config,
                "{}",
                p.name
            );
            let resolved = p.config.resolved().unwrap();
            let text = resolved.to_toml_string().unwrap();
            assert_eq!(
                RunConfig::from_toml_str(&text).unwrap(),
                resolved,
                "{}",
                p.name
            );
        }
    }

    #[test]
    fn only_fig7_sweeps_its_barrier_height() {
        for p in list_presets() {
            match p.name {
                "fig7" => assert_eq!(p.config.sweep.as_ref().unwrap().name, "potential.v0"),
                _ => assert!(p.config.sweep.is_none()),
            }
        }
    }

    #[test]
    fn unknown_preset_is_an_error() {
        assert!(preset("fig8").is_err());
        assert_eq!(preset("fig1").unwrap(), list_presets()[0].config);
    }
}
