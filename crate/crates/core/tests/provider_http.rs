//! HTTP embedding provider against an in-process mock server: contract,
//! retry policy, memoization, and failure-to-absent behavior.

use std::io::{Read, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread;

use emoji_sentiment::corpus::Tweet;
use emoji_sentiment::sentiment::{
    AnchorSpec, EmbeddingProvider, HttpEmbeddingProvider, ProviderConfig, Scorer,
};

/// One-connection-at-a-time HTTP responder. `fail_first` requests get a
/// 500; afterwards each request is answered with a vector derived from
/// the request's `target` field.
fn spawn_mock(fail_first: usize) -> (String, Arc<AtomicUsize>) {
    let listener = TcpListener::bind("127.0.0.1:0").expect("bind");
    let addr = listener.local_addr().unwrap();
    let hits = Arc::new(AtomicUsize::new(0));
    let hits_server = Arc::clone(&hits);
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let n = hits_server.fetch_add(1, Ordering::SeqCst);
            let mut buf = Vec::new();
            let mut chunk = [0u8; 1024];
            let mut body_start = 0usize;
            loop {
                match stream.read(&mut chunk) {
                    Ok(0) => break,
                    Ok(k) => {
                        buf.extend_from_slice(&chunk[..k]);
                        if let Some(pos) = find_header_end(&buf) {
                            body_start = pos;
                            let content_length = parse_content_length(&buf[..pos]);
                            while buf.len() < body_start + content_length {
                                match stream.read(&mut chunk) {
                                    Ok(0) => break,
                                    Ok(k) => buf.extend_from_slice(&chunk[..k]),
                                    Err(_) => break,
                                }
                            }
                            break;
                        }
                    }
                    Err(_) => break,
                }
            }
            let response = if n < fail_first {
                "HTTP/1.1 500 Internal Server Error\r\ncontent-length: 0\r\nconnection: close\r\n\r\n"
                    .to_string()
            } else {
                let body_bytes = &buf[body_start.min(buf.len())..];
                let target = serde_json::from_slice::<serde_json::Value>(body_bytes)
                    .ok()
                    .and_then(|v| v.get("target").and_then(|t| t.as_str().map(String::from)))
                    .unwrap_or_default();
                let direction = target
                    .chars()
                    .map(|c| c as u32 as u64)
                    .sum::<u64>()
                    % 7;
                let body = format!("{{\"vector\": [1.0, {}.0]}}", direction);
                format!(
                    "HTTP/1.1 200 OK\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{}",
                    body.len(),
                    body
                )
            };
            let _ = stream.write_all(response.as_bytes());
        }
    });
    (format!("http://{addr}"), hits)
}

fn find_header_end(buf: &[u8]) -> Option<usize> {
    buf.windows(4).position(|w| w == b"\r\n\r\n").map(|p| p + 4)
}

fn parse_content_length(head: &[u8]) -> usize {
    let text = String::from_utf8_lossy(head);
    text.lines()
        .find_map(|l| {
            let (k, v) = l.split_once(':')?;
            k.trim().eq_ignore_ascii_case("content-length").then(|| v.trim().parse().ok())?
        })
        .unwrap_or(0)
}

fn tweet(text: &str) -> Tweet {
    Tweet {
        id: "t".into(),
        timestamp: "2019-03-08T00:00:00Z".parse().unwrap(),
        text: text.into(),
    }
}

fn fast_config() -> ProviderConfig {
    ProviderConfig {
        timeout_secs: 5,
        retries: 2,
    }
}

#[test]
fn scores_unknown_emoji_through_the_provider() {
    let (url, hits) = spawn_mock(0);
    let provider = HttpEmbeddingProvider::new(&url, fast_config());
    let scorer = Scorer::provider_only(Box::new(provider), AnchorSpec::default());
    // dinosaur is not in the bundled lexicon
    let scored = scorer.score_tweet(&tweet("look 🦖🦖"));
    assert_eq!(scored.emoji_scores.len(), 2);
    let s = scored.emoji_scores[0].1;
    assert!((-1.0..=1.0).contains(&s));
    assert_eq!(scored.emoji_scores[1].1, s, "same emoji, same memoized score");
    // one request for the anchor, one for the memoized emoji
    assert_eq!(hits.load(Ordering::SeqCst), 2);
    // a second tweet with the same emoji in the same context adds nothing
    let again = scorer.score_tweet(&tweet("look 🦖🦖"));
    assert_eq!(again.emoji_scores[0].1, s);
    assert_eq!(hits.load(Ordering::SeqCst), 2);
}

#[test]
fn lexicon_hits_never_touch_the_provider() {
    let (url, hits) = spawn_mock(0);
    let provider = HttpEmbeddingProvider::new(&url, fast_config());
    let scorer = Scorer::bundled().with_provider(Box::new(provider), AnchorSpec::default());
    let scored = scorer.score_tweet(&tweet("gm 🚀"));
    assert_eq!(scored.mean_score, Some(0.434));
    assert_eq!(hits.load(Ordering::SeqCst), 0);
}

#[test]
fn transient_failures_are_retried() {
    // two 500s, then success; retries = 2 means three attempts total
    let (url, hits) = spawn_mock(2);
    let provider = HttpEmbeddingProvider::new(&url, fast_config());
    let v = provider.embed("financially positive and optimistic", "positive");
    assert!(v.is_ok(), "{v:?}");
    assert_eq!(hits.load(Ordering::SeqCst), 3);
}

#[test]
fn persistent_failure_yields_absent_score_with_warning() {
    let (url, _hits) = spawn_mock(usize::MAX);
    let provider = HttpEmbeddingProvider::new(&url, fast_config());
    let scorer = Scorer::provider_only(Box::new(provider), AnchorSpec::default());
    let scored = scorer.score_tweet(&tweet("look 🦖"));
    assert_eq!(scored.mean_score, None);
    assert!(!scorer.warnings().is_empty());
}

#[test]
fn concurrent_batch_scoring_is_consistent() {
    let (url, _hits) = spawn_mock(0);
    let provider = HttpEmbeddingProvider::new(&url, fast_config());
    let scorer = Scorer::provider_only(Box::new(provider), AnchorSpec::default());
    let tweets: Vec<Tweet> = (0..32).map(|_| tweet("new 🦖 drop 🆕")).collect();
    let scored = scorer.score_tweets(&tweets);
    let first: Vec<_> = scored[0]
        .emoji_scores
        .iter()
        .map(|(_, s)| *s)
        .collect();
    for s in &scored {
        let row: Vec<_> = s.emoji_scores.iter().map(|(_, v)| *v).collect();
        assert_eq!(row, first, "interleaving changed a memoized score");
    }
}
