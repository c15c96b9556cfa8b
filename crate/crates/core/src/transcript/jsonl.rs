//! Line-delimited JSON transcripts: one turn object per line,
//! `{index, speaker, text, vocal_sounds: [{kind, description?}], start_time?, end_time?}`.
//! Reference files hold a single `{boundaries: [..]}` object.

use serde::Serialize;
use serde_json::{Map, Value};

use super::{
    tokenize, ReferenceSegmentation, Transcript, TranscriptError, Turn, VocalSound, VocalSoundKind,
};

fn schema(line: usize, field: &str, message: impl Into<String>) -> TranscriptError {
    TranscriptError::Schema {
        line,
        field: field.to_owned(),
        message: message.into(),
    }
}

fn opt_f64(obj: &Map<String, Value>, key: &str, line: usize) -> Result<Option<f64>, TranscriptError> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => v
            .as_f64()
            .map(Some)
            .ok_or_else(|| schema(line, key, "expected a number")),
    }
}

fn parse_vocal_sounds(v: Option<&Value>, line: usize) -> Result<Vec<VocalSound>, TranscriptError> {
    let items = match v {
        None | Some(Value::Null) => return Ok(Vec::new()),
        Some(Value::Array(items)) => items,
        Some(_) => return Err(schema(line, "vocal_sounds", "expected an array")),
    };
    items
        .iter()
        .map(|item| {
            let obj = item
                .as_object()
                .ok_or_else(|| schema(line, "vocal_sounds", "expected objects"))?;
            let kind_name = obj
                .get("kind")
                .and_then(Value::as_str)
                .ok_or_else(|| schema(line, "vocal_sounds.kind", "missing or not a string"))?;
            let kind = VocalSoundKind::parse(kind_name)
                .ok_or_else(|| schema(line, "vocal_sounds.kind", format!("unknown kind {kind_name:?}")))?;
            let raw_description = match obj.get("description") {
                None | Some(Value::Null) => kind.as_str().to_owned(),
                Some(Value::String(s)) => s.clone(),
                Some(_) => return Err(schema(line, "vocal_sounds.description", "expected a string")),
            };
            Ok(VocalSound {
                kind,
                raw_description,
            })
        })
        .collect()
}

fn parse_turn(line: usize, raw: &str) -> Result<Turn, TranscriptError> {
    let value: Value = serde_json::from_str(raw).map_err(|e| schema(line, "<record>", e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| schema(line, "<record>", "expected an object"))?;
    let index = obj
        .get("index")
        .and_then(Value::as_u64)
        .ok_or_else(|| schema(line, "index", "missing or not a non-negative integer"))?
        as usize;
    let speaker = match obj.get("speaker") {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Number(n)) => n.to_string(),
        _ => return Err(schema(line, "speaker", "missing or not a string")),
    };
    let text = match obj.get("text") {
        Some(Value::String(s)) => s.clone(),
        None | Some(Value::Null) => String::new(),
        Some(_) => return Err(schema(line, "text", "expected a string")),
    };
    Ok(Turn {
        index,
        speaker,
        tokens: tokenize(&text),
        text,
        vocal_sounds: parse_vocal_sounds(obj.get("vocal_sounds"), line)?,
        start_time: opt_f64(obj, "start_time", line)?,
        end_time: opt_f64(obj, "end_time", line)?,
    })
}

/// Parses a line-delimited transcript. Blank lines are skipped. The returned
/// transcript has an empty id; callers usually set it from the file name.
pub fn parse_jsonl(bytes: &[u8]) -> Result<Transcript, TranscriptError> {
    let text = std::str::from_utf8(bytes).map_err(|e| schema(1, "<file>", e.to_string()))?;
    let mut turns = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        turns.push(parse_turn(n + 1, raw)?);
    }
    Transcript::new(String::new(), turns)
}

#[derive(Serialize)]
struct VocalRecord<'a> {
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    description: Option<&'a str>,
}

#[derive(Serialize)]
struct TurnRecord<'a> {
    index: usize,
    speaker: &'a str,
    text: &'a str,
    vocal_sounds: Vec<VocalRecord<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    start_time: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    end_time: Option<f64>,
}

pub fn to_jsonl(t: &Transcript) -> String {
    let mut out = String::new();
    for turn in t.turns() {
        let record = TurnRecord {
            index: turn.index,
            speaker: &turn.speaker,
            text: &turn.text,
            vocal_sounds: turn
                .vocal_sounds
                .iter()
                .map(|v| VocalRecord {
                    kind: v.kind.as_str(),
                    description: (v.raw_description != v.kind.as_str())
                        .then_some(v.raw_description.as_str()),
                })
                .collect(),
            start_time: turn.start_time,
            end_time: turn.end_time,
        };
        out.push_str(&serde_json::to_string(&record).expect("turn records serialize"));
        out.push('\n');
    }
    out
}

pub fn parse_reference(bytes: &[u8]) -> Result<ReferenceSegmentation, TranscriptError> {
    serde_json::from_slice(bytes).map_err(|e| schema(e.line(), "boundaries", e.to_string()))
}

pub fn reference_to_json(r: &ReferenceSegmentation) -> String {
    serde_json::to_string(r).expect("reference serializes") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transcript::extract_laughter;

    #[test]
    fn two_lines() {
        let src = "{\"index\":1,\"speaker\":\"a\",\"text\":\"Hello there\"}\n\
                   {\"index\":2,\"speaker\":\"b\",\"text\":\"hi\",\"vocal_sounds\":[{\"kind\":\"laugh\"}]}\n";
        let t = parse_jsonl(src.as_bytes()).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.turns()[0].tokens, vec!["hello", "there"]);
        assert_eq!(extract_laughter(&t), vec![2]);
    }

    #[test]
    fn out_of_order_indices() {
        let src = "{\"index\":2,\"speaker\":\"a\",\"text\":\"x\"}\n{\"index\":1,\"speaker\":\"b\",\"text\":\"y\"}";
        assert!(matches!(
            parse_jsonl(src.as_bytes()),
            Err(TranscriptError::TurnIndex { .. })
        ));
    }

    #[test]
    fn schema_errors_name_line_and_field() {
        let src = "{\"index\":1,\"speaker\":\"a\",\"text\":\"x\"}\n{\"speaker\":\"b\"}";
        assert_eq!(
            parse_jsonl(src.as_bytes()).unwrap_err(),
            schema(2, "index", "missing or not a non-negative integer")
        );
        let src = "{\"index\":1,\"speaker\":\"a\",\"vocal_sounds\":[{\"kind\":\"giggle\"}]}";
        match parse_jsonl(src.as_bytes()).unwrap_err() {
            TranscriptError::Schema { line, field, .. } => {
                assert_eq!((line, field.as_str()), (1, "vocal_sounds.kind"));
            }
            e => panic!("{e:?}"),
        }
        let src = "{\"index\":1,\"speaker\":\"a\",\"start_time\":\"noon\"}";
        match parse_jsonl(src.as_bytes()).unwrap_err() {
            TranscriptError::Schema { field, .. } => assert_eq!(field, "start_time"),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn empty_file() {
        assert_eq!(parse_jsonl(b"\n\n").unwrap_err(), TranscriptError::Empty);
    }

    #[test]
    fn reference_file() {
        let r = parse_reference(b"{\"boundaries\":[3,7]}").unwrap();
        assert_eq!(r.boundaries, vec![3, 7]);
        assert_eq!(parse_reference(reference_to_json(&r).as_bytes()).unwrap(), r);
        assert!(parse_reference(b"{\"boundaries\":[\"x\"]}").is_err());
    }
}
