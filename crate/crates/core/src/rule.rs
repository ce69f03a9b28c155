use crate::mention::Mention;

/// What a rule stamps on the mentions it builds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleInfo {
    pub name: String,
    pub labels: Vec<String>,
    pub keep: bool,
}

impl RuleInfo {
    pub fn new(name: impl Into<String>, labels: &[&str]) -> Self {
        RuleInfo {
            name: name.into(),
            labels: labels.iter().map(|l| l.to_string()).collect(),
            keep: true,
        }
    }

    pub(crate) fn stamp(&self, m: Mention) -> Mention {
        m.with_keep(self.keep)
    }
}
