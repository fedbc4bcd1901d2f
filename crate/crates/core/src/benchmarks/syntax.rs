//! Syntax-highlighting color schemes tuned for readability on a background.

use std::fmt;
use std::str::FromStr;

use super::BenchmarkError;
use crate::registry::ComponentModule;
use crate::semantics::Problem;

pub const LEVELS: [u8; 3] = [0, 127, 255];
pub const CONTRAST_CAP: f64 = 7.0;
pub const PALETTE_ALLOWANCE: usize = 5;
pub const PALETTE_PENALTY: f64 = 0.5;

/// Agda's HTML highlighting classes, one selector each.
pub const TOKEN_CLASSES: [&str; 27] = [
    "Comment",
    "Keyword",
    "String",
    "Number",
    "Symbol",
    "PrimitiveType",
    "Pragma",
    "Operator",
    "Hole",
    "Bound",
    "Generalizable",
    "InductiveConstructor",
    "CoinductiveConstructor",
    "Datatype",
    "Field",
    "Function",
    "Module",
    "Postulate",
    "Primitive",
    "Record",
    "Argument",
    "Macro",
    "DottedPattern",
    "UnsolvedMeta",
    "UnsolvedConstraint",
    "TerminationProblem",
    "IncompletePattern",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rgb {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl Rgb {
    pub const BLACK: Rgb = Rgb { r: 0, g: 0, b: 0 };
    pub const WHITE: Rgb = Rgb {
        r: 255,
        g: 255,
        b: 255,
    };

    pub fn new(r: u8, g: u8, b: u8) -> Self {
        Rgb { r, g, b }
    }

    pub fn relative_luminance(self) -> f64 {
        fn linear(c: u8) -> f64 {
            let c = f64::from(c) / 255.0;
            if c <= 0.03928 {
                c / 12.92
            } else {
                ((c + 0.055) / 1.055).powf(2.4)
            }
        }
        0.2126 * linear(self.r) + 0.7152 * linear(self.g) + 0.0722 * linear(self.b)
    }
}

/// WCAG contrast ratio, in `[1, 21]`.
pub fn contrast_ratio(a: Rgb, b: Rgb) -> f64 {
    let (la, lb) = (a.relative_luminance(), b.relative_luminance());
    (la.max(lb) + 0.05) / (la.min(lb) + 0.05)
}

impl fmt::Display for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:02x}{:02x}{:02x}", self.r, self.g, self.b)
    }
}

/// `RRGGBB`, with or without a leading `#`.
impl FromStr for Rgb {
    type Err = BenchmarkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let hex = s.trim().trim_start_matches('#');
        if hex.len() != 6 || !hex.chars().all(|c| c.is_ascii_hexdigit()) {
            return Err(BenchmarkError::InvalidColor(s.to_string()));
        }
        let channel =
            |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).expect("checked hex digits");
        Ok(Rgb::new(channel(0), channel(2), channel(4)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorScheme {
    pub background: Rgb,
    pub class_colors: Vec<Rgb>,
}

impl ColorScheme {
    pub fn distinct_colors(&self) -> usize {
        let mut colors = self.class_colors.clone();
        colors.sort();
        colors.dedup();
        colors.len()
    }

    /// Capped contrast per class, minus a penalty for every color beyond a
    /// small palette; floored at 0.
    pub fn readability(&self) -> f64 {
        let contrast: f64 = self
            .class_colors
            .iter()
            .map(|&c| contrast_ratio(c, self.background).min(CONTRAST_CAP) / CONTRAST_CAP)
            .sum();
        let excess = self.distinct_colors().saturating_sub(PALETTE_ALLOWANCE);
        (contrast - PALETTE_PENALTY * excess as f64).max(0.0)
    }

    pub fn min_contrast(&self) -> f64 {
        self.class_colors
            .iter()
            .map(|&c| contrast_ratio(c, self.background))
            .fold(f64::INFINITY, f64::min)
    }

    /// Background rule, then one rule per class in class order.
    pub fn to_css(&self) -> String {
        let mut css = format!("body {{ background-color: {}; }}\n", self.background);
        for (i, color) in self.class_colors.iter().enumerate() {
            css.push_str(&format!(".{} {{ color: {color}; }}\n", class_name(i)));
        }
        css
    }
}

pub fn class_name(index: usize) -> String {
    TOKEN_CLASSES
        .get(index)
        .map_or_else(|| format!("Class{index}"), |s| s.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemeValue {
    Level(u8),
    Color(Rgb),
    Scheme(ColorScheme),
}

pub fn scheme_module(background: Rgb, class_count: usize) -> ComponentModule<SchemeValue> {
    let colors = vec!["Color"; class_count];
    let mut m = ComponentModule::new("Scheme")
        .constructor("scheme", "Scheme", colors, move |args| {
            let class_colors = args
                .into_iter()
                .map(|v| match v {
                    SchemeValue::Color(c) => Ok(c),
                    _ => Err("scheme expects colors".to_string()),
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(SchemeValue::Scheme(ColorScheme {
                background,
                class_colors,
            }))
        })
        .constructor(
            "rgb",
            "Color",
            ["Level", "Level", "Level"],
            |args| match args.as_slice() {
                [SchemeValue::Level(r), SchemeValue::Level(g), SchemeValue::Level(b)] => {
                    Ok(SchemeValue::Color(Rgb::new(*r, *g, *b)))
                }
                _ => Err("rgb expects three levels".into()),
            },
        );
    for level in LEVELS {
        m = m.constant(level.to_string(), "Level", SchemeValue::Level(level));
    }
    m
}

pub fn scheme_case(
    background: Rgb,
    class_count: usize,
) -> Result<Problem<SchemeValue>, BenchmarkError> {
    if class_count == 0 {
        return Err(BenchmarkError::EmptyPool("token classes"));
    }
    let (grammar, semantics) = scheme_module(background, class_count).compile()?;
    Ok(Problem::new(grammar, semantics, |v| match v {
        SchemeValue::Scheme(s) => s.readability(),
        _ => f64::NEG_INFINITY,
    }))
}

/// The scheme denoted by a start-sort tree of [`scheme_case`].
pub fn scheme_of(
    problem: &Problem<SchemeValue>,
    tree: &crate::grammar::DerivationTree,
) -> Option<ColorScheme> {
    match problem.evaluate(tree).ok()? {
        SchemeValue::Scheme(s) => Some(s),
        _ => None,
    }
}
