use std::time::{Duration, Instant};

use subtok::segmenter::{ExternalSegmenter, SegmenterSpec};
use subtok_core::tokenize::{
    detokenize_morpheme, tokenize_morpheme, MarkerConfig, Segmenter, SegmenterFailure,
};

const TIMEOUT: Duration = Duration::from_secs(5);

fn spawn(cmd: &str) -> ExternalSegmenter {
    ExternalSegmenter::spawn(cmd, None, TIMEOUT).unwrap()
}

#[test]
fn echo_segmenter_is_identity() {
    let mut seg = spawn("cat");
    for word in ["안녕하세요", "nice", "you.", "12,000원"] {
        assert_eq!(seg.segment(word).unwrap(), [word]);
    }
    assert!(seg.surface_preserving());
}

#[test]
fn tab_joined_reply_is_split() {
    // Splits 하세요 off the end of any word that has it.
    let mut seg = spawn(r"sed -u 's/하세요$/\t하세요/'");
    assert_eq!(seg.segment("안녕하세요").unwrap(), ["안녕", "하세요"]);
    assert_eq!(seg.segment("고마워요").unwrap(), ["고마워요"]);
    let cfg = MarkerConfig::default();
    let ts = tokenize_morpheme("안녕하세요 여러분", &mut seg, &cfg).unwrap();
    assert_eq!(ts.tokens(), ["안녕", "하세요", "▁", "여러분"]);
    assert_eq!(detokenize_morpheme(ts.tokens(), &cfg), "안녕하세요 여러분");
}

#[test]
fn non_surface_preserving_replies_are_flagged() {
    // A "lemmatizer" that rewrites 했다 to 하다.
    let mut seg = spawn(r"sed -u 's/했다$/\t하다/'");
    assert_eq!(seg.segment("공부").unwrap(), ["공부"]);
    assert!(seg.surface_preserving());
    assert_eq!(seg.segment("공부했다").unwrap(), ["공부", "하다"]);
    assert!(!seg.surface_preserving());
    assert_eq!(seg.non_preserving_words(), 1);
}

#[test]
fn empty_reply_is_a_protocol_error() {
    let mut seg = spawn("while read -r w; do echo; done");
    assert!(matches!(
        seg.segment("word"),
        Err(SegmenterFailure::Protocol { .. })
    ));
}

#[test]
fn exited_process_is_reported() {
    let mut seg = spawn("read -r w; printf '%s\\n' \"$w\"");
    assert_eq!(seg.segment("one").unwrap(), ["one"]);
    let err = seg.segment("two").unwrap_err();
    assert!(matches!(err, SegmenterFailure::Protocol { .. }), "{err}");
    // And stays unusable.
    assert!(seg.segment("three").is_err());
}

#[test]
fn silent_process_times_out() {
    let mut seg = ExternalSegmenter::spawn("sleep 30", None, Duration::from_millis(200)).unwrap();
    let start = Instant::now();
    let err = seg.segment("word").unwrap_err();
    assert!(err.to_string().contains("no reply"), "{err}");
    assert!(start.elapsed() < Duration::from_secs(5));
    drop(seg);
}

#[test]
fn words_with_protocol_characters_are_refused() {
    let mut seg = spawn("cat");
    assert!(seg.segment("a\tb").is_err());
}

#[test]
fn missing_program_fails_on_first_word() {
    let mut seg = spawn("/nonexistent/segmenter");
    assert!(seg.segment("word").is_err());
}

#[test]
fn specs_build_matching_segmenters() {
    for (spec, name) in [
        ("rule", "rule"),
        ("identity", "identity"),
        ("cmd:cat", "cmd:cat"),
    ] {
        let seg = spec
            .parse::<SegmenterSpec>()
            .unwrap()
            .build(None, TIMEOUT)
            .unwrap();
        assert_eq!(seg.name(), name);
    }
}
