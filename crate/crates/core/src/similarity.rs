//! Structural code similarity over normalized token shingles, plus the
//! Welch two-sample test used to compare similarity populations.
//!
//! Candidates may target any runtime, so instead of language-specific ASTs
//! the lexer normalizes identifiers to `ID`, numeric literals to `NUM` and
//! string literals to `STR`, and strips `#` line comments and `/* */`
//! blocks. Two codes that differ only by consistent renaming produce
//! identical shingle sets.

use std::collections::HashSet;
use std::fmt::Write as _;

use statrs::distribution::{ContinuousCDF, StudentsT};

#[derive(Debug, thiserror::Error)]
pub enum SimilarityError {
    #[error("code contains no tokens")]
    EmptyCode,
    #[error("shingle width k must be at least 1")]
    BadK,
    #[error("both shingle sets are empty")]
    BothEmpty,
    #[error("need at least 2 candidates, got {0}")]
    TooFewCandidates(usize),
    #[error("samples must each have at least 2 values")]
    TooFewSamples,
    #[error("pooled variance is zero; the test statistic is undefined")]
    DegenerateVariance,
}

/// A set of k-token windows over the normalized token stream.
#[derive(Debug, Clone)]
pub struct ShingleSet {
    pub shingles: HashSet<String>,
    pub k: usize,
    pub token_count: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Multi-character operators recognized as single tokens. `//` is kept as
/// an operator, not a comment, so Python floor division survives.
const OPERATORS: [&str; 18] = [
    "**", "//", "<<", ">>", "<=", ">=", "==", "!=", "->", "=>", "::", "+=", "-=", "*=", "/=",
    "&&", "||", "..",
];

fn lex_normalized(code: &str) -> Vec<String> {
    let chars: Vec<char> = code.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    let n = chars.len();

    while i < n {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        // # line comment
        if c == '#' {
            while i < n && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        // /* block comment */
        if c == '/' && i + 1 < n && chars[i + 1] == '*' {
            i += 2;
            while i + 1 < n && !(chars[i] == '*' && chars[i + 1] == '/') {
                i += 1;
            }
            i = (i + 2).min(n);
            continue;
        }
        // strings: '...' "..." plus triple-quoted forms
        if c == '"' || c == '\'' {
            let quote = c;
            let triple = i + 2 < n && chars[i + 1] == quote && chars[i + 2] == quote;
            if triple {
                i += 3;
                while i + 2 < n
                    && !(chars[i] == quote && chars[i + 1] == quote && chars[i + 2] == quote)
                {
                    i += 1;
                }
                i = (i + 3).min(n);
            } else {
                i += 1;
                while i < n && chars[i] != quote {
                    if chars[i] == '\\' {
                        i += 1;
                    }
                    i += 1;
                }
                i = (i + 1).min(n);
            }
            tokens.push("STR".to_string());
            continue;
        }
        if is_ident_start(c) {
            let start = i;
            while i < n && is_ident_continue(chars[i]) {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            // Keywords survive normalization; they carry structure. A short
            // language-agnostic list shared by Python/Rust/C-family code.
            const KEYWORDS: [&str; 24] = [
                "if", "else", "elif", "for", "while", "return", "def", "class", "fn", "let",
                "import", "from", "in", "and", "or", "not", "break", "continue", "lambda", "try",
                "except", "with", "pass", "match",
            ];
            if KEYWORDS.contains(&word.as_str()) {
                tokens.push(word);
            } else {
                tokens.push("ID".to_string());
            }
            continue;
        }
        if c.is_ascii_digit() {
            i += 1;
            while i < n
                && (chars[i].is_ascii_alphanumeric()
                    || chars[i] == '.'
                    || ((chars[i] == '+' || chars[i] == '-')
                        && matches!(chars[i - 1], 'e' | 'E')))
            {
                i += 1;
            }
            tokens.push("NUM".to_string());
            continue;
        }
        // operators and punctuation
        if i + 1 < n {
            let pair: String = chars[i..i + 2].iter().collect();
            if OPERATORS.contains(&pair.as_str()) {
                tokens.push(pair);
                i += 2;
                continue;
            }
        }
        tokens.push(c.to_string());
        i += 1;
    }
    tokens
}

/// Normalize `code` and collect its k-token shingles.
pub fn token_shingles(code: &str, k: usize) -> Result<ShingleSet, SimilarityError> {
    if k < 1 {
        return Err(SimilarityError::BadK);
    }
    let tokens = lex_normalized(code);
    if tokens.is_empty() {
        return Err(SimilarityError::EmptyCode);
    }
    let mut shingles = HashSet::new();
    if tokens.len() >= k {
        for window in tokens.windows(k) {
            shingles.insert(window.join(" "));
        }
    }
    Ok(ShingleSet {
        shingles,
        k,
        token_count: tokens.len(),
    })
}

/// Jaccard similarity |a∩b| / |a∪b|.
pub fn jaccard(a: &ShingleSet, b: &ShingleSet) -> Result<f64, SimilarityError> {
    if a.shingles.is_empty() && b.shingles.is_empty() {
        return Err(SimilarityError::BothEmpty);
    }
    let inter = a.shingles.intersection(&b.shingles).count();
    let union = a.shingles.union(&b.shingles).count();
    Ok(inter as f64 / union as f64)
}

/// A symmetric unit-diagonal similarity matrix over candidate codes.
#[derive(Debug, Clone)]
pub struct SimilarityMatrix {
    pub ids: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl SimilarityMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    /// Value at a pair of candidate ids.
    pub fn at(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.ids.iter().position(|id| id == a)?;
        let j = self.ids.iter().position(|id| id == b)?;
        Some(self.values[i][j])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("id");
        for id in &self.ids {
            let _ = write!(out, ",{id}");
        }
        out.push('\n');
        for (i, id) in self.ids.iter().enumerate() {
            let _ = write!(out, "{id}");
            for j in 0..self.ids.len() {
                let _ = write!(out, ",{:.6}", self.values[i][j]);
            }
            out.push('\n');
        }
        out
    }
}

/// Pairwise Jaccard over normalized shingles for every candidate pair.
pub fn similarity_matrix(
    candidates: &[(String, String)],
    k: usize,
) -> Result<SimilarityMatrix, SimilarityError> {
    if candidates.len() < 2 {
        return Err(SimilarityError::TooFewCandidates(candidates.len()));
    }
    let sets: Vec<ShingleSet> = candidates
        .iter()
        .map(|(_, code)| token_shingles(code, k))
        .collect::<Result<_, _>>()?;
    let n = sets.len();
    let mut values = vec![vec![0.0; n]; n];
    for i in 0..n {
        values[i][i] = 1.0;
        for j in i + 1..n {
            let v = jaccard(&sets[i], &sets[j])?;
            values[i][j] = v;
            values[j][i] = v;
        }
    }
    Ok(SimilarityMatrix {
        ids: candidates.iter().map(|(id, _)| id.clone()).collect(),
        values,
    })
}

/// Result of Welch's unequal-variance t-test.
#[derive(Debug, Clone, Copy)]
pub struct WelchResult {
    pub t: f64,
    pub p: f64,
    pub df: f64,
}

fn mean_var(sample: &[f64]) -> (f64, f64) {
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let var = sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Welch's t statistic with Welch-Satterthwaite degrees of freedom and a
/// two-sided p value from the Student t distribution.
pub fn welch_t_test(sample_a: &[f64], sample_b: &[f64]) -> Result<WelchResult, SimilarityError> {
    if sample_a.len() < 2 || sample_b.len() < 2 {
        return Err(SimilarityError::TooFewSamples);
    }
    let (m1, v1) = mean_var(sample_a);
    let (m2, v2) = mean_var(sample_b);
    let n1 = sample_a.len() as f64;
    let n2 = sample_b.len() as f64;
    let se2 = v1 / n1 + v2 / n2;
    if se2 <= 0.0 {
        return Err(SimilarityError::DegenerateVariance);
    }
    let t = (m1 - m2) / se2.sqrt();
    let df = se2 * se2 / ((v1 / n1).powi(2) / (n1 - 1.0) + (v2 / n2).powi(2) / (n2 - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|_| SimilarityError::DegenerateVariance)?;
    let p = 2.0 * (1.0 - dist.cdf(t.abs()));
    Ok(WelchResult { t, p, df })
}
