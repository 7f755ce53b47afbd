use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread;

use oodselect_core::llm::{llm_select, LlmRequest, LlmSettings};
use oodselect_core::registry::Registry;
use oodselect_core::Error;

fn read_request(s: &mut TcpStream) -> String {
    let mut buf = Vec::new();
    let mut chunk = [0u8; 4096];
    loop {
        let n = s.read(&mut chunk).unwrap_or(0);
        if n == 0 {
            break;
        }
        buf.extend_from_slice(&chunk[..n]);
        let text = String::from_utf8_lossy(&buf);
        if let Some(end) = text.find("\r\n\r\n") {
            let len = text[..end]
                .lines()
                .find_map(|l| {
                    l.to_ascii_lowercase().strip_prefix("content-length:").map(|v| v.trim().parse::<usize>().unwrap())
                })
                .unwrap_or(0);
            if buf.len() >= end + 4 + len {
                break;
            }
        }
    }
    String::from_utf8_lossy(&buf).into_owned()
}

fn reply(s: &mut TcpStream, content: &str) {
    let body = serde_json::json!({"choices": [{"message": {"role": "assistant", "content": content}}]}).to_string();
    let msg = format!(
        "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    );
    s.write_all(msg.as_bytes()).unwrap();
}

/// Serves `stall` connections by never answering, then answers with `content`.
fn stub(content: &'static str, stall: usize) -> (String, Arc<AtomicUsize>, thread::JoinHandle<String>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let hits = Arc::new(AtomicUsize::new(0));
    let h = hits.clone();
    let handle = thread::spawn(move || {
        let mut held = Vec::new();
        for conn in listener.incoming() {
            let mut s = conn.unwrap();
            let req = read_request(&mut s);
            let k = h.fetch_add(1, Ordering::SeqCst);
            if k < stall {
                held.push(s);
                continue;
            }
            reply(&mut s, content);
            return req;
        }
        unreachable!()
    });
    (url, hits, handle)
}

fn request(endpoint: String) -> LlmRequest {
    LlmRequest {
        endpoint,
        api_key: Some("test-key".into()),
        settings: LlmSettings { timeout_ms: 300, backoff_ms: 10, ..LlmSettings::default() },
        prompt: "pick one".into(),
    }
}

#[test]
fn format_reply_maps_to_id() {
    let (url, hits, handle) = stub("Reasoning.\nRecommended Method: VIM\n", 0);
    assert_eq!(llm_select(&request(url), &Registry::detectors()).unwrap(), "ViM");
    let raw = handle.join().unwrap();
    assert_eq!(hits.load(Ordering::SeqCst), 1);
    assert!(raw.to_ascii_lowercase().contains("authorization: bearer test-key"));
    let body: serde_json::Value = serde_json::from_str(&raw[raw.find("\r\n\r\n").unwrap() + 4..]).unwrap();
    assert_eq!(body["temperature"], 0.0);
    assert_eq!(body["top_p"], 0.999);
    assert_eq!(body["messages"][0]["content"], "pick one");
}

#[test]
fn garbage_reply_is_unparseable() {
    let (url, _, handle) = stub("I would go with whatever works.", 0);
    let err = llm_select(&request(url), &Registry::detectors()).unwrap_err();
    assert!(matches!(err, Error::UnparseableRecommendation(_)), "{err}");
    handle.join().unwrap();
}

#[test]
fn two_timeouts_then_success() {
    let (url, hits, handle) = stub("Recommended Method: kNN", 2);
    assert_eq!(llm_select(&request(url), &Registry::detectors()).unwrap(), "kNN");
    handle.join().unwrap();
    assert_eq!(hits.load(Ordering::SeqCst), 3);
}

#[test]
fn unreachable_endpoint_gives_up() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let mut req = request(format!("http://127.0.0.1:{port}/"));
    req.settings.max_retries = 1;
    assert!(matches!(llm_select(&req, &Registry::detectors()), Err(Error::Llm(_))));
}
