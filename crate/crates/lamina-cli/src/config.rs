//! `--config` files: `key = value` lines supplying defaults for long flags.

use std::ffi::OsString;

/// Flags that take no value; `true` enables them and `false` drops them.
const SWITCHES: &[&str] = &["unsafe-limits", "compare"];

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("config line {}: expected key=value", n + 1))?;
        let key = k.trim().trim_start_matches("--");
        if key.is_empty() || key == "config" {
            return Err(format!("config line {}: bad key {k:?}", n + 1));
        }
        out.push((key.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn present(args: &[OsString], key: &str) -> bool {
    let flag = format!("--{key}");
    let prefix = format!("--{key}=");
    args.iter().filter_map(|a| a.to_str()).any(|a| a == flag || a.starts_with(&prefix))
}

/// Appends each default whose flag is absent from `args`. Command-line
/// values always win.
pub fn merge(mut args: Vec<OsString>, defaults: &[(String, String)]) -> Vec<OsString> {
    for (key, value) in defaults {
        if present(&args, key) {
            continue;
        }
        if SWITCHES.contains(&key.as_str()) {
            if value == "true" {
                args.push(format!("--{key}").into());
            }
        } else {
            args.push(format!("--{key}={value}").into());
        }
    }
    args
}

/// The value of `--config` in raw arguments, if any.
pub fn path(args: &[OsString]) -> Option<String> {
    let mut it = args.iter().filter_map(|a| a.to_str());
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().map(str::to_string);
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn parse_skips_comments_and_rejects_garbage() {
        let kv = parse("# defaults\ndepth = 4\n\n--theta=1/6\n").unwrap();
        assert_eq!(kv, vec![("depth".into(), "4".into()), ("theta".into(), "1/6".into())]);
        assert!(parse("depth 4").is_err());
        assert!(parse("config = x").is_err());
    }

    #[test]
    fn command_line_wins() {
        let args = os(&["lamina", "lam", "L", "--depth", "2"]);
        let kv = vec![("depth".to_string(), "5".to_string()), ("theta".to_string(), "1/6".to_string())];
        let merged = merge(args, &kv);
        assert_eq!(merged, os(&["lamina", "lam", "L", "--depth", "2", "--theta=1/6"]));
    }

    #[test]
    fn switches_follow_their_value() {
        let kv = vec![("unsafe-limits".to_string(), "true".to_string()), ("compare".to_string(), "false".to_string())];
        assert_eq!(merge(os(&["x"]), &kv), os(&["x", "--unsafe-limits"]));
        assert_eq!(path(&os(&["x", "--config", "a.cfg"])), Some("a.cfg".into()));
        assert_eq!(path(&os(&["x", "--config=b.cfg"])), Some("b.cfg".into()));
    }
}
