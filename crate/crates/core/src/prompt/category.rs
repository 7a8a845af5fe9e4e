use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::PromptError;

macro_rules! categories {
    ($($variant:ident => $name:literal;)*) => {
        /// The sixteen ConceptARC concept groups.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum Category {
            $($variant,)*
        }

        impl Category {
            pub const ALL: [Category; 16] = [$(Category::$variant,)*];

            pub fn name(self) -> &'static str {
                match self {
                    $(Category::$variant => $name,)*
                }
            }

            /// Hint text for generation prompts.
            pub fn prompt(self) -> &'static str {
                match self {
                    $(Category::$variant => include_str!(concat!("../../assets/templates/categories/", $name, ".txt")),)*
                }
            }
        }
    };
}

categories! {
    AboveBelow => "AboveBelow";
    Center => "Center";
    CleanUp => "CleanUp";
    CompleteShape => "CompleteShape";
    Copy => "Copy";
    Count => "Count";
    ExtendToBoundary => "ExtendToBoundary";
    ExtractObjects => "ExtractObjects";
    FilledNotFilled => "FilledNotFilled";
    HorizontalVertical => "HorizontalVertical";
    InsideOutside => "InsideOutside";
    MoveToBoundary => "MoveToBoundary";
    Order => "Order";
    SameDifferent => "SameDifferent";
    TopBottom2D => "TopBottom2D";
    TopBottom3D => "TopBottom3D";
}

impl Category {
    pub fn file(self) -> String {
        format!("categories/{}.txt", self.name())
    }

    /// Placeholder hint not taken from the published prompt set.
    pub fn is_placeholder(self) -> bool {
        self == Category::TopBottom3D
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Category {
    type Err = PromptError;

    /// Accepts the canonical name in any case, with or without spaces,
    /// hyphens or underscores (`above-below`, `Top Bottom 2D`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let squashed: String = s.chars().filter(|c| !matches!(c, ' ' | '-' | '_')).collect();
        Category::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(&squashed))
            .ok_or_else(|| PromptError::UnknownCategory(s.to_string()))
    }
}
