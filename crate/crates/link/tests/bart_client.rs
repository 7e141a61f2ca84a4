//! The correction-service client against an in-process HTTP fixture.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::thread;
use std::time::Duration;

use msc_core::channel::{ChannelParams, NoiseStream};
use msc_core::ebch::build_ebch_128_64;
use msc_core::harq::{HarqPolicy, SegmentTransceiver};
use msc_core::pipeline::{run_trial, HarqMode, TrialConfig};
use msc_core::sec::{whitespace_words, Corrector, IdentityCorrector, SecError};
use msc_core::{DecoderKind, OsdConfig};
use msc_link::bart::BartClient;
use serde_json::{json, Value};

#[derive(Clone, Copy)]
enum Mode {
    /// Returns the input unchanged, every whitespace word with probability 1.
    Echo,
    /// Token span running past the end of the text.
    BadSpan,
    BadJson,
    Slow,
}

fn read_request(stream: &mut TcpStream) -> (String, Vec<u8>) {
    let mut reader = BufReader::new(stream);
    let mut request_line = String::new();
    reader.read_line(&mut request_line).unwrap();
    let mut len = 0;
    loop {
        let mut h = String::new();
        reader.read_line(&mut h).unwrap();
        if h == "\r\n" || h.is_empty() {
            break;
        }
        if let Some((k, v)) = h.split_once(':') {
            if k.eq_ignore_ascii_case("content-length") {
                len = v.trim().parse().unwrap();
            }
        }
    }
    let mut body = vec![0; len];
    reader.read_exact(&mut body).unwrap();
    (request_line, body)
}

fn respond(stream: &mut TcpStream, status: &str, body: &str) {
    let msg = format!("HTTP/1.1 {status}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}", body.len());
    let _ = stream.write_all(msg.as_bytes());
}

fn echo_body(text: &str) -> String {
    let tokens: Vec<Value> = whitespace_words(text)
        .into_iter()
        .map(|(r, word)| json!({"text": word, "char_start": r.start, "char_end": r.end, "logprob": 0.0}))
        .collect();
    json!({"corrected": text, "tokens": tokens}).to_string()
}

fn serve(mode: Mode) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    thread::spawn(move || {
        for stream in listener.incoming() {
            let mut stream = stream.unwrap();
            let (line, body) = read_request(&mut stream);
            if line.starts_with("GET /health") {
                respond(&mut stream, "200 OK", "bart-fixture");
                continue;
            }
            let text = serde_json::from_slice::<Value>(&body).unwrap()["text"].as_str().unwrap().to_string();
            match mode {
                Mode::Echo => respond(&mut stream, "200 OK", &echo_body(&text)),
                Mode::BadSpan => {
                    let n = text.chars().count();
                    let body = json!({"corrected": text, "tokens": [{"text": "x", "char_start": 0, "char_end": n + 3, "logprob": -0.1}]});
                    respond(&mut stream, "200 OK", &body.to_string());
                }
                Mode::BadJson => respond(&mut stream, "200 OK", "{\"corrected\": "),
                Mode::Slow => {
                    thread::sleep(Duration::from_millis(1500));
                    respond(&mut stream, "200 OK", &echo_body(&text));
                }
            }
        }
    });
    format!("http://{addr}")
}

fn client(endpoint: &str, timeout_ms: u64) -> BartClient {
    BartClient::new(endpoint, Duration::from_millis(timeout_ms))
}

#[test]
fn echo_service_matches_identity_correction() {
    let c = client(&serve(Mode::Echo), 5000);
    for text in ["The cat sat on the mat.", "Everythi\u{2665}\u{2400}g went  back", "\u{00e9}\u{03c3}"] {
        let got = c.correct(text).unwrap();
        let want = IdentityCorrector.correct(text).unwrap();
        assert_eq!(got.corrected_text, want.corrected_text);
        assert_eq!(got.tokens, want.tokens);
    }
}

#[test]
fn echo_service_reproduces_identity_trials() {
    let c = client(&serve(Mode::Echo), 5000);
    let code = build_ebch_128_64();
    let link = SegmentTransceiver { code: &code, decoder: DecoderKind::Osd(OsdConfig { order: 2 }), channel: ChannelParams::from_snr_db(0.5) };
    let cfg = TrialConfig { q: 8, frame_bytes: 64, harq: HarqMode::SemanticConfidence(HarqPolicy::new(0.8, 1, 1).unwrap()) };
    for t in 0..4 {
        let stream = NoiseStream::new(5).with_sentence(0, t);
        let a = run_trial("A man is riding a horse along the beach.", &cfg, &link, &c, stream).unwrap();
        let b = run_trial("A man is riding a horse along the beach.", &cfg, &link, &IdentityCorrector, stream).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn out_of_range_span_is_rejected() {
    let err = client(&serve(Mode::BadSpan), 5000).correct("the cat").unwrap_err();
    assert!(matches!(err, SecError::InvalidSpan { index: 0, .. }), "{err:?}");
}

#[test]
fn truncated_reply_is_malformed() {
    let err = client(&serve(Mode::BadJson), 5000).correct("the cat").unwrap_err();
    assert!(matches!(err, SecError::Malformed(_)), "{err:?}");
}

#[test]
fn slow_service_times_out() {
    let err = client(&serve(Mode::Slow), 200).correct("the cat").unwrap_err();
    assert_eq!(err, SecError::Timeout);
}

#[test]
fn unreachable_service_is_a_transport_error() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let err = client(&format!("http://127.0.0.1:{port}"), 1000).correct("the cat").unwrap_err();
    assert!(matches!(err, SecError::Transport(_)), "{err:?}");
}

#[test]
fn health_and_empty_input() {
    let c = client(&format!("{}/", serve(Mode::Echo)), 5000);
    assert_eq!(c.health().unwrap(), "bart-fixture");
    assert_eq!(c.correct("").unwrap_err(), SecError::EmptyInput);
}
