//! Reader and writer for the subset of ICSI MRT markup we consume:
//! `<Transcript Session=..>` holding `<Turn>` (or `<Segment>`) elements with
//! `Participant`, `StartTime` and `EndTime` attributes, and inline
//! `<VocalSound Description=".."/>` events interleaved with the words.
//! Other elements and attributes are skipped; their text still counts.

use quick_xml::escape::escape;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::{tokenize, Transcript, TranscriptError, Turn, VocalSound};

fn line_at(bytes: &[u8], pos: usize) -> usize {
    let end = pos.min(bytes.len());
    1 + bytes[..end].iter().filter(|&&b| b == b'\n').count()
}

fn is_turn(name: &[u8]) -> bool {
    name.eq_ignore_ascii_case(b"Turn") || name.eq_ignore_ascii_case(b"Segment")
}

fn attr(
    e: &BytesStart<'_>,
    key: &str,
    bytes: &[u8],
    pos: usize,
) -> Result<Option<String>, TranscriptError> {
    for a in e.attributes() {
        let a = a.map_err(|err| TranscriptError::Markup {
            line: line_at(bytes, pos),
            message: err.to_string(),
        })?;
        if a.key.as_ref().eq_ignore_ascii_case(key.as_bytes()) {
            let v = a.unescape_value().map_err(|err| TranscriptError::Markup {
                line: line_at(bytes, pos),
                message: err.to_string(),
            })?;
            return Ok(Some(v.into_owned()));
        }
    }
    Ok(None)
}

fn time_attr(
    e: &BytesStart<'_>,
    key: &str,
    bytes: &[u8],
    pos: usize,
) -> Result<Option<f64>, TranscriptError> {
    match attr(e, key, bytes, pos)? {
        None => Ok(None),
        Some(v) => v
            .trim()
            .parse::<f64>()
            .map(Some)
            .map_err(|_| TranscriptError::Schema {
                line: line_at(bytes, pos),
                field: key.to_owned(),
                message: format!("not a number: {v:?}"),
            }),
    }
}

fn is_vocal_sound(name: &[u8]) -> bool {
    name.eq_ignore_ascii_case(b"VocalSound")
}

fn push_vocal_sound(
    turn: &mut OpenTurn,
    e: &BytesStart<'_>,
    bytes: &[u8],
    pos: usize,
) -> Result<(), TranscriptError> {
    let description = attr(e, "Description", bytes, pos)?.ok_or_else(|| TranscriptError::Schema {
        line: line_at(bytes, pos),
        field: "Description".into(),
        message: "missing on VocalSound".into(),
    })?;
    turn.vocal_sounds.push(VocalSound::from_description(description));
    Ok(())
}

struct OpenTurn {
    speaker: String,
    start_time: Option<f64>,
    end_time: Option<f64>,
    text: String,
    vocal_sounds: Vec<VocalSound>,
}

impl OpenTurn {
    fn open(e: &BytesStart<'_>, bytes: &[u8], pos: usize) -> Result<Self, TranscriptError> {
        Ok(Self {
            speaker: attr(e, "Participant", bytes, pos)?.unwrap_or_default(),
            start_time: time_attr(e, "StartTime", bytes, pos)?,
            end_time: time_attr(e, "EndTime", bytes, pos)?,
            text: String::new(),
            vocal_sounds: Vec::new(),
        })
    }

    fn close(self, index: usize) -> Turn {
        let text = self.text.split_whitespace().collect::<Vec<_>>().join(" ");
        Turn {
            index,
            speaker: self.speaker,
            tokens: tokenize(&text),
            text,
            vocal_sounds: self.vocal_sounds,
            start_time: self.start_time,
            end_time: self.end_time,
        }
    }
}

/// Parses MRT markup. The transcript id is the `Session` attribute of the
/// root element, or empty when absent.
pub fn parse_mrt(bytes: &[u8]) -> Result<Transcript, TranscriptError> {
    let mut reader = Reader::from_reader(bytes);
    let mut id = String::new();
    let mut turns: Vec<Turn> = Vec::new();
    let mut open: Option<OpenTurn> = None;
    // depth of non-turn elements nested inside the open turn
    let mut inner_depth = 0usize;

    loop {
        let pos = reader.buffer_position() as usize;
        let event = reader.read_event().map_err(|err| TranscriptError::Markup {
            line: line_at(bytes, reader.error_position() as usize),
            message: err.to_string(),
        })?;
        match event {
            Event::Start(e) | Event::Empty(e)
                if e.name().as_ref().eq_ignore_ascii_case(b"Transcript") =>
            {
                if let Some(session) = attr(&e, "Session", bytes, pos)? {
                    id = session;
                }
            }
            Event::Start(e) if is_turn(e.name().as_ref()) => {
                if open.is_some() {
                    return Err(TranscriptError::Markup {
                        line: line_at(bytes, pos),
                        message: "nested turn element".into(),
                    });
                }
                open = Some(OpenTurn::open(&e, bytes, pos)?);
                inner_depth = 0;
            }
            Event::Empty(e) if is_turn(e.name().as_ref()) => {
                if open.is_some() {
                    return Err(TranscriptError::Markup {
                        line: line_at(bytes, pos),
                        message: "nested turn element".into(),
                    });
                }
                let t = OpenTurn::open(&e, bytes, pos)?;
                turns.push(t.close(turns.len() + 1));
            }
            Event::End(e) if is_turn(e.name().as_ref()) && inner_depth == 0 => {
                let t = open.take().ok_or_else(|| TranscriptError::Markup {
                    line: line_at(bytes, pos),
                    message: "turn end without start".into(),
                })?;
                turns.push(t.close(turns.len() + 1));
            }
            Event::Empty(e) if is_vocal_sound(e.name().as_ref()) => {
                if let Some(turn) = open.as_mut() {
                    push_vocal_sound(turn, &e, bytes, pos)?;
                }
            }
            Event::Start(e) if is_vocal_sound(e.name().as_ref()) => {
                if let Some(turn) = open.as_mut() {
                    push_vocal_sound(turn, &e, bytes, pos)?;
                    inner_depth += 1;
                }
            }
            Event::Start(_) => {
                if open.is_some() {
                    inner_depth += 1;
                }
            }
            Event::End(_) => {
                if open.is_some() {
                    inner_depth = inner_depth.saturating_sub(1);
                }
            }
            Event::Text(t) => {
                if let Some(turn) = open.as_mut() {
                    let s = t.unescape().map_err(|err| TranscriptError::Markup {
                        line: line_at(bytes, pos),
                        message: err.to_string(),
                    })?;
                    turn.text.push_str(&s);
                }
            }
            Event::CData(t) => {
                if let Some(turn) = open.as_mut() {
                    turn.text.push_str(&String::from_utf8_lossy(&t));
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if open.is_some() {
        return Err(TranscriptError::Markup {
            line: line_at(bytes, bytes.len()),
            message: "unterminated turn element".into(),
        });
    }
    Transcript::new(id, turns)
}

/// Writes a transcript as MRT markup. Vocal sounds follow the turn's text.
pub fn to_mrt(t: &Transcript) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(&format!("<Transcript Session=\"{}\">\n", escape(t.id.as_str())));
    for turn in t.turns() {
        out.push_str(&format!("  <Turn Participant=\"{}\"", escape(turn.speaker.as_str())));
        if let Some(s) = turn.start_time {
            out.push_str(&format!(" StartTime=\"{s}\""));
        }
        if let Some(e) = turn.end_time {
            out.push_str(&format!(" EndTime=\"{e}\""));
        }
        out.push('>');
        out.push_str(&escape(turn.text.as_str()));
        for v in &turn.vocal_sounds {
            out.push_str(&format!(
                " <VocalSound Description=\"{}\"/>",
                escape(v.raw_description.as_str())
            ));
        }
        out.push_str("</Turn>\n");
    }
    out.push_str("</Transcript>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transcript::{extract_laughter, VocalSoundKind};

    const THREE_TURNS: &str = r#"<?xml version="1.0"?>
<Transcript Session="Bxx001">
  <Segment StartTime="1.0" EndTime="2.5" Participant="me011">So we start.</Segment>
  <Segment StartTime="2.5" EndTime="3.0" Participant="fe008">
    OK <VocalSound Description="laugh"/> sure
  </Segment>
  <Segment StartTime="3.0" EndTime="4.0" Participant="me011" Extra="ignored">
    <NonVocalSound Description="door"/> right then <Comment Description="x"/>
  </Segment>
</Transcript>
"#;

    #[test]
    fn three_turn_fixture() {
        let t = parse_mrt(THREE_TURNS.as_bytes()).unwrap();
        assert_eq!(t.id, "Bxx001");
        assert_eq!(t.len(), 3);
        assert_eq!(extract_laughter(&t), vec![2]);
        let second = &t.turns()[1];
        assert_eq!(second.speaker, "fe008");
        assert_eq!(second.text, "OK sure");
        assert_eq!(second.tokens, vec!["ok", "sure"]);
        assert_eq!(second.start_time, Some(2.5));
        assert_eq!(t.turns()[2].text, "right then");
    }

    #[test]
    fn breath_laugh_kind() {
        let src = r#"<Transcript><Turn Participant="a">hi</Turn>
<Turn Participant="b"><VocalSound Description="breath-laugh"/></Turn></Transcript>"#;
        let t = parse_mrt(src.as_bytes()).unwrap();
        assert_eq!(t.turns()[1].vocal_sounds[0].kind, VocalSoundKind::BreathLaugh);
        assert!(extract_laughter(&t).is_empty());
    }

    #[test]
    fn zero_turns_is_validation_error() {
        let err = parse_mrt(b"<Transcript Session=\"x\"></Transcript>").unwrap_err();
        assert_eq!(err, TranscriptError::Empty);
    }

    #[test]
    fn malformed_markup_reports_line() {
        let src = "<Transcript>\n<Turn Participant=\"a\">hi</Turn>\n<Turn>oops</Trun>\n</Transcript>";
        match parse_mrt(src.as_bytes()).unwrap_err() {
            TranscriptError::Markup { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unterminated_turn() {
        let src = "<Transcript>\n<Turn>hi\n";
        assert!(matches!(
            parse_mrt(src.as_bytes()),
            Err(TranscriptError::Markup { .. })
        ));
    }

    #[test]
    fn bad_time_is_schema_error() {
        let src = "<Transcript>\n<Turn StartTime=\"soon\">hi</Turn></Transcript>";
        match parse_mrt(src.as_bytes()).unwrap_err() {
            TranscriptError::Schema { line, field, .. } => {
                assert_eq!(line, 2);
                assert_eq!(field, "StartTime");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn writer_output_reparses() {
        let t = parse_mrt(THREE_TURNS.as_bytes()).unwrap();
        let again = parse_mrt(to_mrt(&t).as_bytes()).unwrap();
        assert_eq!(again, t);
    }
}
