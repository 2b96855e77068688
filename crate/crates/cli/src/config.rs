//! `key=value` configuration files and gas-profile resolution.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use strato_shear::thermo::GasProfile;

use crate::Failure;

pub const PROFILE_ENV: &str = "STRATO_SHEAR_PROFILE";

/// Keys accepted in a config file.
pub const KEYS: [&str; 7] = ["gas", "mode", "format", "solve", "wall-stress", "tol", "q"];

/// Reads `key = value` lines; `#` starts a comment.
pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text).map_err(|m| Failure::input(format!("{}: {m}", path.display())))
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key=value", n + 1))?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(format!("line {}: unknown key '{k}'", n + 1));
        }
        out.insert(k.to_owned(), v.trim().to_owned());
    }
    Ok(out)
}

/// `paper-atmosphere` or a path to a TOML profile.
pub fn load_profile(spec: &str) -> Result<GasProfile, Failure> {
    if let Some(p) = GasProfile::by_name(spec) {
        return Ok(p);
    }
    let text = fs::read_to_string(spec)
        .map_err(|e| Failure::input(format!("gas profile '{spec}' is neither built in nor readable: {e}")))?;
    toml::from_str(&text).map_err(|e| Failure::input(format!("gas profile {spec}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_rejects_unknown_keys() {
        let c = parse_config("# run\nmode = paper-raw\n\nsolve=true # inline\n").unwrap();
        assert_eq!(c["mode"], "paper-raw");
        assert_eq!(c["solve"], "true");
        assert!(parse_config("colour=red").is_err());
        assert!(parse_config("mode").is_err());
    }

    #[test]
    fn builtin_profile() {
        assert_eq!(
            load_profile("paper-atmosphere").unwrap(),
            GasProfile::paper_atmosphere()
        );
        assert!(load_profile("/nonexistent/profile.toml").is_err());
    }

    #[test]
    fn toml_profile() {
        let text = "name = \"custom\"\n[dry]\nc_p = 1005.0\nr_hat = 287.05\n[vapor]\nc_p = 1870.0\nr_hat = 461.5\n";
        let p: GasProfile = toml::from_str(text).unwrap();
        assert_eq!(p.name, "custom");
        assert_eq!(p.dry.c_p(), 1005.0);
        assert!(toml::from_str::<GasProfile>(
            "name = \"x\"\n[dry]\nc_p = -1.0\nr_hat = 1.0\n[vapor]\nc_p = 1.0\nr_hat = 1.0\n"
        )
        .is_err());
    }
}
