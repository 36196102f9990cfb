use core::fmt;

/// The three refactoring instructions. Texts are fixed byte for byte.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum PromptId {
    General,
    Meaning,
    Comments,
}

impl PromptId {
    pub const ALL: [PromptId; 3] = [PromptId::General, PromptId::Meaning, PromptId::Comments];

    pub fn text(self) -> &'static str {
        match self {
            PromptId::General => "Refactor this code for improved readability.",
            PromptId::Meaning => {
                "Refactor this code for improved readability, especially with respect to identifier naming."
            }
            PromptId::Comments => "Refactor this code for improved readability, especially with respect to comments.",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PromptId::General => "General",
            PromptId::Meaning => "Meaning",
            PromptId::Comments => "Comments",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.as_str() == s)
    }
}

impl fmt::Display for PromptId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
