//! Declarative configuration file (TOML) and value resolution.
//!
//! Precedence: command-line flag > SYMOVERLAP_* environment variable
//! (wired through clap) > config file > built-in default. The built-in
//! defaults reproduce the reference figure parameters, so every command
//! runs with no flags at all.

use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    #[serde(default)]
    pub ho_demo: HoDemoFile,
    #[serde(default)]
    pub ball_shell: BallShellFile,
    #[serde(default)]
    pub random_check: RandomCheckFile,
    #[serde(default)]
    pub quad: QuadFile,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct HoDemoFile {
    pub r: Option<f64>,
    pub theta_steps: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct BallShellFile {
    pub mu: Option<f64>,
    pub r_b: Option<f64>,
    pub d_b: Option<f64>,
    pub steps: Option<usize>,
    pub sep_min: Option<f64>,
    pub sep_max: Option<f64>,
    pub mu_min: Option<f64>,
    pub mu_max: Option<f64>,
    pub db_min: Option<f64>,
    pub db_max: Option<f64>,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RandomCheckFile {
    pub n_trials: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct QuadFile {
    pub rel_tol: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
                toml::from_str(&text).map_err(|e| format!("bad config {}: {e}", p.display()))
            }
        }
    }
}

/// flag > (env already folded into the flag by clap) > file > default
pub fn resolve<T: Copy>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_kebab_case_tables() {
        let cfg: FileConfig = toml::from_str(
            r#"
            [ho-demo]
            r = 0.7
            theta-steps = 50

            [ball-shell]
            d-b = 0.4
            sep-max = 0.2

            [quad]
            rel-tol = 1e-9
            "#,
        )
        .unwrap();
        assert_eq!(cfg.ho_demo.r, Some(0.7));
        assert_eq!(cfg.ho_demo.theta_steps, Some(50));
        assert_eq!(cfg.ball_shell.d_b, Some(0.4));
        assert_eq!(cfg.quad.rel_tol, Some(1e-9));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let r: Result<FileConfig, _> = toml::from_str("[ho-demo]\nradius = 1.0\n");
        assert!(r.is_err());
    }

    #[test]
    fn resolution_order() {
        assert_eq!(resolve(Some(1), Some(2), 3), 1);
        assert_eq!(resolve(None, Some(2), 3), 2);
        assert_eq!(resolve::<i32>(None, None, 3), 3);
    }
}
