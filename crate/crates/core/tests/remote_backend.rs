use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use serde_json::{json, Value};

use sdsr::bench::run_benchmark;
use sdsr::fixtures;
use sdsr::guidance::{build_condition, Condition, PromptConfig, SummaryConfig};
use sdsr::retrieval::{BackendError, Conversation, RemoteBackend, RemoteConfig, RouterBackend, Task};

/// A canned reply: status code, body, and how long to wait before sending.
#[derive(Clone)]
struct Reply {
    status: u16,
    body: String,
    delay: Duration,
}

fn ok(content: &str) -> Reply {
    Reply { status: 200, body: json!({"choices": [{"message": {"content": content}}]}).to_string(), delay: Duration::ZERO }
}

fn status(code: u16) -> Reply {
    Reply { status: code, body: "busy".into(), delay: Duration::ZERO }
}

#[derive(Debug, Clone)]
struct Seen {
    headers: Vec<(String, String)>,
    body: Value,
}

impl Seen {
    fn header(&self, name: &str) -> Option<&str> {
        self.headers.iter().find(|(k, _)| k.eq_ignore_ascii_case(name)).map(|(_, v)| v.as_str())
    }
}

/// Serves `replies` in order, one connection each, and records requests.
fn serve(replies: Vec<Reply>) -> (String, Arc<Mutex<Vec<Seen>>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let seen = Arc::new(Mutex::new(Vec::new()));
    let log = Arc::clone(&seen);
    thread::spawn(move || {
        for reply in replies {
            let Ok((stream, _)) = listener.accept() else { return };
            let mut reader = BufReader::new(stream);
            let mut headers = Vec::new();
            let mut line = String::new();
            reader.read_line(&mut line).unwrap();
            loop {
                line.clear();
                reader.read_line(&mut line).unwrap();
                let l = line.trim_end();
                if l.is_empty() {
                    break;
                }
                let (k, v) = l.split_once(':').unwrap();
                headers.push((k.trim().to_string(), v.trim().to_string()));
            }
            let len: usize = headers
                .iter()
                .find(|(k, _)| k.eq_ignore_ascii_case("content-length"))
                .map_or(0, |(_, v)| v.parse().unwrap());
            let mut body = vec![0; len];
            reader.read_exact(&mut body).unwrap();
            log.lock().unwrap().push(Seen { headers, body: serde_json::from_slice(&body).unwrap() });
            thread::sleep(reply.delay);
            let mut stream = reader.into_inner();
            let _ = write!(
                stream,
                "HTTP/1.1 {} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
                reply.status,
                reply.body.len(),
                reply.body
            );
        }
    });
    (url, seen)
}

fn backend(url: &str, key_env: &str) -> RemoteBackend {
    let mut cfg = RemoteConfig::new(url, "test-model");
    cfg.api_key_env = key_env.into();
    cfg.backoff_ms = 10;
    cfg.timeout_secs = 5;
    RemoteBackend::new(cfg).unwrap()
}

#[test]
fn success_path_sends_system_and_user_messages() {
    let (url, seen) = serve(vec![ok("Q01: Cat | skill")]);
    let b = backend(&url, "SDSR_TEST_KEY_UNSET_1");
    assert_eq!(b.chat("sys", "user text").unwrap(), "Q01: Cat | skill");
    let seen = seen.lock().unwrap();
    assert_eq!(seen.len(), 1);
    assert_eq!(seen[0].body["model"], "test-model");
    assert_eq!(seen[0].body["messages"][0], json!({"role": "system", "content": "sys"}));
    assert_eq!(seen[0].body["messages"][1], json!({"role": "user", "content": "user text"}));
    assert!(seen[0].header("authorization").is_none());
}

#[test]
fn retries_server_errors_and_rate_limits() {
    let (url, seen) = serve(vec![status(500), status(429), ok("done")]);
    let b = backend(&url, "SDSR_TEST_KEY_UNSET_2");
    assert_eq!(b.chat("s", "u").unwrap(), "done");
    assert_eq!(seen.lock().unwrap().len(), 3);
}

#[test]
fn gives_up_after_max_retries() {
    let (url, seen) = serve(vec![status(503), status(503), status(503), ok("late")]);
    let b = backend(&url, "SDSR_TEST_KEY_UNSET_3");
    match b.chat("s", "u") {
        Err(BackendError::Status { status, .. }) => assert_eq!(status, 503),
        other => panic!("{other:?}"),
    }
    assert_eq!(seen.lock().unwrap().len(), 3);
}

#[test]
fn client_errors_are_not_retried() {
    let (url, seen) = serve(vec![status(400), ok("never")]);
    let b = backend(&url, "SDSR_TEST_KEY_UNSET_4");
    assert!(matches!(b.chat("s", "u"), Err(BackendError::Status { status: 400, .. })));
    assert_eq!(seen.lock().unwrap().len(), 1);
}

#[test]
fn slow_server_times_out() {
    let slow = Reply { delay: Duration::from_secs(3), ..ok("slow") };
    let (url, _) = serve(vec![slow]);
    let mut cfg = RemoteConfig::new(&url, "m");
    cfg.api_key_env = "SDSR_TEST_KEY_UNSET_5".into();
    cfg.timeout_secs = 1;
    cfg.max_retries = 0;
    let b = RemoteBackend::new(cfg).unwrap();
    assert!(matches!(b.chat("s", "u"), Err(BackendError::Timeout)));
}

#[test]
fn reply_without_content_is_a_bad_response() {
    let (url, _) = serve(vec![Reply { status: 200, body: "{\"choices\": []}".into(), delay: Duration::ZERO }]);
    let b = backend(&url, "SDSR_TEST_KEY_UNSET_6");
    assert!(matches!(b.chat("s", "u"), Err(BackendError::BadResponse(_))));
}

#[test]
fn auth_header_comes_from_the_environment() {
    let (url, seen) = serve(vec![ok("x")]);
    std::env::set_var("SDSR_TEST_KEY_SET", "sekrit");
    let b = backend(&url, "SDSR_TEST_KEY_SET");
    b.chat("s", "u").unwrap();
    assert_eq!(seen.lock().unwrap()[0].header("authorization"), Some("Bearer sekrit"));
}

#[test]
fn respond_uses_the_conversation_layout() {
    let (url, seen) = serve(vec![ok("Q01: A | b")]);
    let b = backend(&url, "SDSR_TEST_KEY_UNSET_7");
    let conv = Conversation { system_prompt: "p".into(), artifact: "{}".into(), tasks: vec![Task::new(1, "do it")] };
    b.respond(&conv).unwrap();
    assert_eq!(seen.lock().unwrap()[0].body["messages"][1]["content"], conv.user_message());
}

#[test]
fn benchmark_isolates_a_failing_condition() {
    let lib = fixtures::summarized_library();
    let conds: Vec<_> = Condition::ALL
        .iter()
        .map(|&c| build_condition(&lib, c, &PromptConfig::default(), &SummaryConfig::default()).unwrap())
        .collect();
    let qs = fixtures::questions();
    let answer = sdsr::response::format_selections(&fixtures::r1_selections(Condition::A).unwrap());
    // conditions run in order, so the third exchange is condition C
    let (url, seen) = serve(vec![ok(&answer), ok(&answer), status(400), ok(&answer)]);
    let runs = run_benchmark(&conds, &qs, &backend(&url, "SDSR_TEST_KEY_UNSET_8")).unwrap();
    assert_eq!(seen.lock().unwrap().len(), 4);
    for run in &runs {
        assert_eq!(run.backend, "remote");
        if run.condition == Condition::C {
            assert!(run.failed());
        } else {
            assert_eq!(run.report.as_ref().unwrap().total, 21.0, "{}", run.condition);
        }
    }
}
