//! Zero-shot LLM selector against a chat-completions-compatible endpoint.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::registry::{DetectorId, Registry};

pub const ENDPOINT_ENV: &str = "OODSELECT_LLM_ENDPOINT";
pub const KEY_ENV: &str = "OODSELECT_LLM_KEY";

/// Built-in one-line descriptions of the registry detectors.
pub fn detector_description(id: DetectorId) -> &'static str {
    match id {
        DetectorId::Msp => "Scores a sample by its largest softmax probability.",
        DetectorId::Gen => "Scores a sample by a generalized entropy of its top softmax probabilities; peaked distributions score higher.",
        DetectorId::MaxLogit => "Scores a sample by its largest raw logit.",
        DetectorId::EnergyBased => "Scores a sample by the log-sum-exp of its logits (negative free energy).",
        DetectorId::Mahalanobis => "Scores a sample by its smallest Mahalanobis distance to the class means under a shared covariance of the training features.",
        DetectorId::Vim => "Combines the logits with the norm of the feature residual outside the principal subspace of the training features.",
        DetectorId::Knn => "Scores a sample by its distance to the k-th nearest normalized training feature.",
        DetectorId::React => "Clips large feature activations at a training percentile before computing the energy score.",
        DetectorId::Ash => "Keeps only the largest feature activations of each sample and zeroes the rest before computing the energy score.",
    }
}

pub fn registry_descriptions(registry: &Registry) -> Result<Vec<(String, String)>> {
    Ok(registry
        .detector_ids()?
        .into_iter()
        .map(|id| (id.as_str().to_string(), detector_description(id).to_string()))
        .collect())
}

pub fn build_prompt(pair_descriptions: &[String], detectors: &[(String, String)]) -> Result<String> {
    if pair_descriptions.is_empty() {
        return Err(Error::invalid("prompt needs at least one dataset description"));
    }
    if detectors.is_empty() {
        return Err(Error::invalid("prompt needs at least one detector description"));
    }
    let n = pair_descriptions.len();
    let mut s = String::from("Dataset descriptions:\n");
    for (i, d) in pair_descriptions.iter().enumerate() {
        s.push_str(&format!("{}. {}\n", i + 1, d.trim()));
    }
    s.push('\n');
    let set = if n == 1 {
        "a set of 1 test ID-OOD dataset pair".to_string()
    } else {
        format!("a set of {n} test ID-OOD dataset pairs")
    };
    s.push_str(&format!("Your task is to select the best OOD detection method for {set}.\n"));
    s.push_str(
        "You will be provided with descriptions of both the ID-OOD dataset pairs and the available OOD detection methods.\n",
    );
    s.push_str("You should pick the best model that has the highest AUROC metric.\n");
    s.push_str(
        "For each dataset pair, output the recommended OOD detection method in the format: 'Recommended Method: [Recommended Method]'.\n",
    );
    s.push_str("\nModel descriptions:\n");
    for (name, desc) in detectors {
        s.push_str(&format!("{name}: {}\n", desc.trim()));
    }
    Ok(s)
}

/// First `Recommended Method: <name>` line whose name matches a registry id
/// (case-insensitive, with the usual aliases).
pub fn parse_recommendation(text: &str, registry: &Registry) -> Result<String> {
    const TAG: &str = "recommended method:";
    for line in text.lines() {
        let lower = line.to_ascii_lowercase();
        let Some(pos) = lower.find(TAG) else { continue };
        let name = line[pos + TAG.len()..]
            .trim()
            .trim_matches(|c: char| c == '*' || c == '\'' || c == '"' || c == '`' || c == '[' || c == ']' || c == '.')
            .trim();
        let canon = DetectorId::parse_loose(name).map(|d| d.as_str().to_string());
        for id in registry.ids() {
            if id.eq_ignore_ascii_case(name) || canon.as_deref() == Some(id.as_str()) {
                return Ok(id.clone());
            }
        }
    }
    Err(Error::UnparseableRecommendation(text.chars().take(200).collect()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LlmSettings {
    pub model: String,
    pub temperature: f64,
    pub top_p: f64,
    pub timeout_ms: u64,
    pub max_retries: u32,
    pub backoff_ms: u64,
}

impl Default for LlmSettings {
    fn default() -> Self {
        Self {
            model: "default".into(),
            temperature: 0.0,
            top_p: 0.999,
            timeout_ms: 60_000,
            max_retries: 3,
            backoff_ms: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LlmRequest {
    pub endpoint: String,
    pub api_key: Option<String>,
    pub settings: LlmSettings,
    pub prompt: String,
}

impl LlmRequest {
    pub fn payload(&self) -> serde_json::Value {
        json!({
            "model": self.settings.model,
            "temperature": self.settings.temperature,
            "top_p": self.settings.top_p,
            "messages": [{"role": "user", "content": self.prompt}],
        })
    }
}

enum Attempt {
    Done(String),
    Transient(String),
    Fatal(Error),
}

fn attempt(agent: &ureq::Agent, req: &LlmRequest) -> Attempt {
    let mut call = agent.post(&req.endpoint).header("Content-Type", "application/json");
    if let Some(key) = &req.api_key {
        call = call.header("Authorization", &format!("Bearer {key}"));
    }
    let body = serde_json::to_vec(&req.payload()).expect("payload serializes");
    match call.send(&body[..]) {
        Ok(mut resp) => match resp.body_mut().read_json::<serde_json::Value>() {
            Ok(v) => match v.pointer("/choices/0/message/content").and_then(|c| c.as_str()) {
                Some(text) => Attempt::Done(text.to_string()),
                None => Attempt::Fatal(Error::Llm("reply has no choices[0].message.content".into())),
            },
            Err(e) => Attempt::Transient(format!("reading reply: {e}")),
        },
        Err(ureq::Error::StatusCode(code)) if code == 429 || code >= 500 => Attempt::Transient(format!("HTTP {code}")),
        Err(ureq::Error::StatusCode(code)) => Attempt::Fatal(Error::Llm(format!("HTTP {code}"))),
        Err(e @ (ureq::Error::Timeout(_) | ureq::Error::Io(_) | ureq::Error::ConnectionFailed)) => {
            Attempt::Transient(e.to_string())
        }
        Err(e) => Attempt::Fatal(Error::Llm(e.to_string())),
    }
}

/// Sends the prompt, retrying transient failures with exponential backoff,
/// and returns the raw reply text.
pub fn complete(req: &LlmRequest) -> Result<String> {
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_millis(req.settings.timeout_ms)))
        .build()
        .into();
    let mut last = String::new();
    for k in 0..=req.settings.max_retries {
        if k > 0 {
            std::thread::sleep(Duration::from_millis(req.settings.backoff_ms.saturating_mul(1 << (k - 1))));
        }
        match attempt(&agent, req) {
            Attempt::Done(text) => return Ok(text),
            Attempt::Transient(msg) => last = msg,
            Attempt::Fatal(e) => return Err(e),
        }
    }
    Err(Error::Llm(format!("gave up after {} attempts: {last}", req.settings.max_retries + 1)))
}

pub fn llm_select(req: &LlmRequest, registry: &Registry) -> Result<String> {
    parse_recommendation(&complete(req)?, registry)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prompt_contents() {
        let r = Registry::detectors();
        let descs = registry_descriptions(&r).unwrap();
        let p = build_prompt(&["HMDB51 clips as ID, UCF101 clips as OOD.".into()], &descs).unwrap();
        for id in r.ids() {
            assert!(p.contains(&format!("{id}: ")), "{id}");
        }
        assert!(p.contains("pick the best model that has the highest AUROC metric"));
        assert!(p.contains("Recommended Method: [Recommended Method]"));
        assert_eq!(p, build_prompt(&["HMDB51 clips as ID, UCF101 clips as OOD.".into()], &descs).unwrap());
        assert!(build_prompt(&["x".into()], &[]).is_err());
    }

    #[test]
    fn parsing() {
        let r = Registry::detectors();
        assert_eq!(parse_recommendation("Recommended Method: VIM", &r).unwrap(), "ViM");
        assert_eq!(parse_recommendation("thinking…\nRecommended Method: kNN\nbye", &r).unwrap(), "kNN");
        assert_eq!(parse_recommendation("**Recommended Method:** Energy", &r).unwrap(), "EnergyBased");
        assert_eq!(parse_recommendation("Recommended Method: [KNN]", &r).unwrap(), "kNN");
        assert!(matches!(parse_recommendation("I suggest MSP", &r), Err(Error::UnparseableRecommendation(_))));
    }

    #[test]
    fn payload_defaults() {
        let req = LlmRequest {
            endpoint: "http://x".into(),
            api_key: None,
            settings: LlmSettings::default(),
            prompt: "hi".into(),
        };
        let p = req.payload();
        assert_eq!(p["temperature"], 0.0);
        assert_eq!(p["top_p"], 0.999);
        assert_eq!(p["messages"][0]["role"], "user");
        assert_eq!(p["messages"][0]["content"], "hi");
    }
}
