//! Chat-request construction from editable templates, and response code
//! extraction.

use std::path::Path;

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine as _;
use serde::{Deserialize, Serialize};

use super::{EvolveError, TaskKind};

const MAX_CODE_BYTES: usize = 64 * 1024;

/// One part of a chat message: text, or a PNG as a base64 data URI.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MessagePart {
    Text { text: String },
    Image { data_uri: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub parts: Vec<MessagePart>,
}

/// An LLM chat request; serialized to the OpenAI wire format by the live
/// backend.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
    pub max_tokens: u32,
}

impl ChatRequest {
    pub fn image_part_count(&self) -> usize {
        self.messages
            .iter()
            .flat_map(|m| &m.parts)
            .filter(|p| matches!(p, MessagePart::Image { .. }))
            .count()
    }
}

/// Which evolutionary operation a prompt drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptKind {
    Mutation,
    Crossover,
}

impl PromptKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PromptKind::Mutation => "mutation",
            PromptKind::Crossover => "crossover",
        }
    }
}

/// The template set for both tasks. Defaults are compiled in; a directory
/// of same-named files overrides them.
#[derive(Debug, Clone)]
pub struct PromptTemplates {
    pub tsp_mutation: String,
    pub tsp_crossover: String,
    pub step_mutation: String,
    pub step_crossover: String,
    pub tsp_note_mutation: String,
    pub tsp_note_crossover_1: String,
    pub tsp_note_crossover_2: String,
    pub step_note: String,
    /// Target-language phrase substituted for `{language}`.
    pub language: String,
}

impl Default for PromptTemplates {
    fn default() -> Self {
        Self {
            tsp_mutation: include_str!("../../templates/tsp_mutation.txt").to_string(),
            tsp_crossover: include_str!("../../templates/tsp_crossover.txt").to_string(),
            step_mutation: include_str!("../../templates/step_mutation.txt").to_string(),
            step_crossover: include_str!("../../templates/step_crossover.txt").to_string(),
            tsp_note_mutation: include_str!("../../templates/tsp_note_mutation.txt").to_string(),
            tsp_note_crossover_1: include_str!("../../templates/tsp_note_crossover_1.txt")
                .to_string(),
            tsp_note_crossover_2: include_str!("../../templates/tsp_note_crossover_2.txt")
                .to_string(),
            step_note: include_str!("../../templates/step_note.txt").to_string(),
            language: "Python".to_string(),
        }
    }
}

impl PromptTemplates {
    /// Load every template from `dir`; a missing file is an error so a typo
    /// cannot silently fall back to the built-in text.
    pub fn from_dir(dir: &Path, language: &str) -> Result<Self, EvolveError> {
        let load = |name: &str| -> Result<String, EvolveError> {
            let path = dir.join(name);
            std::fs::read_to_string(&path)
                .map_err(|_| EvolveError::TemplateMissing(path.display().to_string()))
        };
        Ok(Self {
            tsp_mutation: load("tsp_mutation.txt")?,
            tsp_crossover: load("tsp_crossover.txt")?,
            step_mutation: load("step_mutation.txt")?,
            step_crossover: load("step_crossover.txt")?,
            tsp_note_mutation: load("tsp_note_mutation.txt")?,
            tsp_note_crossover_1: load("tsp_note_crossover_1.txt")?,
            tsp_note_crossover_2: load("tsp_note_crossover_2.txt")?,
            step_note: load("step_note.txt")?,
            language: language.to_string(),
        })
    }
}

/// One parent as seen by a prompt: its code, score and (when visual mode is
/// on) its rendered artifacts, in the documented order.
pub struct PromptParent<'a> {
    pub code: &'a str,
    pub score: f64,
    pub images: Vec<Vec<u8>>,
}

/// Model knobs forwarded verbatim into the chat request.
#[derive(Debug, Clone)]
pub struct RequestSettings {
    pub model: String,
    pub temperature: f64,
    pub max_tokens: u32,
}

fn note(text: &str, enabled: bool) -> String {
    if enabled {
        text.trim_end().to_string()
    } else {
        String::new()
    }
}

fn strip_blank_placeholder_lines(text: &str) -> String {
    // When visual mode is off the note placeholder leaves an empty line;
    // drop it so the prompt stays tight.
    let mut out: Vec<&str> = Vec::new();
    let mut prev_blank = false;
    for line in text.lines() {
        let blank = line.trim().is_empty();
        if blank && prev_blank {
            continue;
        }
        if blank && out.is_empty() {
            continue;
        }
        out.push(line);
        prev_blank = blank;
    }
    let mut joined = out.join("\n");
    joined.push('\n');
    joined
}

fn png_data_uri(png: &[u8]) -> String {
    format!("data:image/png;base64,{}", BASE64.encode(png))
}

/// Fill the task template with parent code and scores; in visual mode,
/// append 3 images per TSP parent or 1 per placement parent.
pub fn build_prompt(
    templates: &PromptTemplates,
    kind: PromptKind,
    parents: &[PromptParent<'_>],
    task: TaskKind,
    visual_mode: bool,
    settings: &RequestSettings,
) -> Result<ChatRequest, EvolveError> {
    let expected = match kind {
        PromptKind::Mutation => 1,
        PromptKind::Crossover => 2,
    };
    if parents.len() != expected {
        return Err(EvolveError::ParentCountMismatch {
            kind,
            expected,
            got: parents.len(),
        });
    }

    let text = match (task, kind) {
        (TaskKind::Tsp, PromptKind::Mutation) => templates
            .tsp_mutation
            .replace("{code}", parents[0].code)
            .replace("{distance}", &format!("{:.2}", parents[0].score))
            .replace(
                "{visual_note}",
                &note(&templates.tsp_note_mutation, visual_mode),
            ),
        (TaskKind::Tsp, PromptKind::Crossover) => templates
            .tsp_crossover
            .replace("{code1}", parents[0].code)
            .replace("{distance1}", &format!("{:.2}", parents[0].score))
            .replace(
                "{visual_note1}",
                &note(&templates.tsp_note_crossover_1, visual_mode),
            )
            .replace("{code2}", parents[1].code)
            .replace("{distance2}", &format!("{:.2}", parents[1].score))
            .replace(
                "{visual_note2}",
                &note(&templates.tsp_note_crossover_2, visual_mode),
            ),
        (TaskKind::Step, PromptKind::Mutation) => templates
            .step_mutation
            .replace("{code}", parents[0].code)
            .replace("{whpwl}", &format!("{:.4}", parents[0].score))
            .replace("{visual_note}", &note(&templates.step_note, visual_mode)),
        (TaskKind::Step, PromptKind::Crossover) => templates
            .step_crossover
            .replace("{code1}", parents[0].code)
            .replace("{whpwl1}", &format!("{:.4}", parents[0].score))
            .replace("{visual_note1}", &note(&templates.step_note, visual_mode))
            .replace("{code2}", parents[1].code)
            .replace("{whpwl2}", &format!("{:.4}", parents[1].score))
            .replace("{visual_note2}", &note(&templates.step_note, visual_mode)),
    };
    let text = strip_blank_placeholder_lines(&text).replace("{language}", &templates.language);

    let mut parts = vec![MessagePart::Text { text }];
    if visual_mode {
        for parent in parents {
            for png in &parent.images {
                parts.push(MessagePart::Image {
                    data_uri: png_data_uri(png),
                });
            }
        }
    }

    Ok(ChatRequest {
        model: settings.model.clone(),
        messages: vec![ChatMessage {
            role: "user".to_string(),
            parts,
        }],
        temperature: settings.temperature,
        max_tokens: settings.max_tokens,
    })
}

/// Pull candidate code out of an LLM response: the longest fenced block's
/// interior when fences exist, otherwise the trimmed full text.
pub fn extract_code(response: &str) -> Result<String, EvolveError> {
    let mut blocks: Vec<String> = Vec::new();
    let mut current: Option<Vec<&str>> = None;
    for line in response.lines() {
        let fence = line.trim_start().starts_with("```");
        match (&mut current, fence) {
            (None, true) => current = Some(Vec::new()),
            (Some(acc), true) => {
                blocks.push(acc.join("\n"));
                current = None;
            }
            (Some(acc), false) => acc.push(line),
            (None, false) => {}
        }
    }

    let code = if blocks.is_empty() {
        response.trim().to_string()
    } else {
        blocks
            .into_iter()
            .max_by_key(|b| b.len())
            .unwrap_or_default()
            .trim()
            .to_string()
    };

    if code.is_empty() {
        return Err(EvolveError::EmptyCode);
    }
    if code.len() > MAX_CODE_BYTES {
        return Err(EvolveError::Oversized(code.len()));
    }
    Ok(code)
}
