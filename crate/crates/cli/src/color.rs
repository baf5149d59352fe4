use tm_core::{Diagnostic, Severity};

/// When to emit ANSI colour on stderr, read from `TM_COLOR`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ColorChoice {
    Never,
    #[default]
    Auto,
    Always,
}

impl ColorChoice {
    /// Unknown values fall back to `Auto`.
    pub fn from_env_value(value: Option<&str>) -> Self {
        match value.map(str::to_ascii_lowercase).as_deref() {
            Some("never" | "0" | "off" | "false") => ColorChoice::Never,
            Some("always" | "1" | "on" | "true") => ColorChoice::Always,
            _ => ColorChoice::Auto,
        }
    }

    pub fn enabled(self, is_terminal: bool) -> bool {
        match self {
            ColorChoice::Never => false,
            ColorChoice::Always => true,
            ColorChoice::Auto => is_terminal,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Painter {
    pub enabled: bool,
}

impl Painter {
    pub fn severity(&self, s: Severity) -> String {
        self.paint(s, &s.to_string())
    }

    fn paint(&self, s: Severity, text: &str) -> String {
        if !self.enabled {
            return text.to_string();
        }
        let code = match s {
            Severity::Error => "1;31",
            Severity::Warning => "1;33",
        };
        format!("\x1b[{code}m{text}\x1b[0m")
    }

    pub fn diagnostic(&self, d: &Diagnostic, file: &str) -> String {
        if !self.enabled {
            return d.render(file);
        }
        let tag = self.paint(d.severity, &format!("{}[{}]", d.severity, d.code));
        format!(
            "{}:{}:{}: {}: {}",
            file, d.span.line, d.span.col, tag, d.message
        )
    }
}
