use std::sync::{Arc, Mutex};
use std::time::Duration;

use dynagrid::client::{
    Clock, ClientError, MockTransport, ModelClient, ModelHandle, RateLimiter, RetryPolicy, TransportErrorKind,
    TransportFailure, VirtualClock, RATE_WINDOW,
};

fn no_wait() -> RetryPolicy {
    RetryPolicy {
        max_attempts: 5,
        base_delay: Duration::from_millis(1),
        max_delay: Duration::from_millis(2),
    }
}

#[test]
fn limiter_holds_under_concurrency() {
    let clock = Arc::new(VirtualClock::default());
    let limiter = Arc::new(RateLimiter::new(5, clock.clone()));
    let times = Arc::new(Mutex::new(Vec::new()));
    std::thread::scope(|s| {
        for _ in 0..4 {
            let (limiter, times) = (limiter.clone(), times.clone());
            s.spawn(move || {
                for _ in 0..6 {
                    let t = limiter.acquire();
                    times.lock().unwrap().push(t);
                }
            });
        }
    });
    let mut times = times.lock().unwrap().clone();
    times.sort();
    assert_eq!(times.len(), 24);
    for (i, &t) in times.iter().enumerate() {
        let in_window = times[i..].iter().take_while(|&&u| u < t + RATE_WINDOW).count();
        assert!(in_window <= 5, "{in_window} dispatches within a window starting at {t:?}");
    }
    // 24 requests at 5 per window need at least four full waits
    assert!(*times.last().unwrap() >= RATE_WINDOW * 4);
}

#[test]
fn client_respects_rpm_on_virtual_clock() {
    let clock = Arc::new(VirtualClock::default());
    let seen = Arc::new(Mutex::new(Vec::new()));
    let (c2, s2) = (clock.clone(), seen.clone());
    let t = MockTransport::new(move |_, _| {
        s2.lock().unwrap().push(c2.now());
        Ok("[[0]]".into())
    });
    let mut h = ModelHandle::new("limited", "mock://");
    h.rpm = Some(3);
    let client = ModelClient::with_clock(h, Box::new(t), clock).unwrap();
    for _ in 0..7 {
        client.complete("x").unwrap();
    }
    let seen = seen.lock().unwrap();
    assert_eq!(seen[..3], [Duration::ZERO; 3]);
    assert_eq!(seen[3..6], [RATE_WINDOW; 3]);
    assert_eq!(seen[6], RATE_WINDOW * 2);
}

#[test]
fn delay_shows_in_latency() {
    let t = MockTransport::canned("[[2]]").with_delay(Duration::from_millis(50));
    let client = ModelClient::new(ModelHandle::new("slow", "mock://"), Box::new(t)).unwrap();
    let out = client.complete("x").unwrap();
    assert!(out.latency_ms >= 50.0, "{}", out.latency_ms);
    assert_eq!(out.text, "[[2]]");
}

#[test]
fn two_transient_failures_then_success() {
    let t = MockTransport::new(|_, n| match n {
        1 => Err(TransportFailure::new(TransportErrorKind::RateLimited, "429")),
        2 => Err(TransportFailure::new(TransportErrorKind::Timeout, "timed out")),
        _ => Ok("done".into()),
    });
    let client = ModelClient::new(ModelHandle::new("m", "mock://"), Box::new(t)).unwrap().with_retry(no_wait());
    let out = client.complete("x").unwrap();
    assert_eq!((out.attempts, out.text.as_str()), (3, "done"));
}

#[test]
fn backoff_doubles_and_caps() {
    let p = RetryPolicy::default();
    let waits: Vec<u64> = (1..=8).map(|a| p.backoff(a).as_millis() as u64).collect();
    assert_eq!(waits, [500, 1000, 2000, 4000, 8000, 16000, 30000, 30000]);
}

#[test]
fn status_mapping() {
    use TransportErrorKind as K;
    assert_eq!(K::from_status(429), K::RateLimited);
    assert_eq!(K::from_status(503), K::Server);
    assert_eq!(K::from_status(401), K::Client);
    assert!(K::Server.retryable() && K::Timeout.retryable() && !K::Client.retryable());
}

#[test]
fn missing_key_is_auth_error() {
    let mut h = ModelHandle::new("keyed", "mock://");
    h.auth_env = Some("DYNAGRID_KEY_NOT_SET_IN_TESTS".into());
    let err = ModelClient::new(h, Box::new(MockTransport::canned("x"))).unwrap_err();
    assert!(matches!(err, ClientError::Auth { ref env, .. } if env == "DYNAGRID_KEY_NOT_SET_IN_TESTS"));
}

#[test]
fn request_carries_handle_settings() {
    let mut h = ModelHandle::new("local-id", "mock://");
    h.remote_model = Some("served-name".into());
    h.max_tokens = 123;
    let client = ModelClient::new(h, Box::new(MockTransport::canned("x"))).unwrap();
    let req = client.request("prompt text");
    assert_eq!(req.model, "served-name");
    assert_eq!(req.max_tokens, 123);
    assert_eq!(req.temperature, 0.0);
    assert_eq!(req.messages[0].content, "prompt text");
}
