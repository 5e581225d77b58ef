use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use fpr_core::calc::{calc, round_sig, CalcInputs, CalcMode};
use fpr_core::fpr::{likelihood_ratio, Method, StudyDesign};
use fpr_service::api::{self, CalcRequest, JSON_DIGITS};
use fpr_service::{router, ServiceConfig};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

const SLEEP_A: [f64; 10] = [0.7, -1.6, -0.2, -1.2, -0.1, 3.4, 3.7, 0.8, 0.0, 2.0];
const SLEEP_B: [f64; 10] = [1.9, 0.8, 1.1, 0.1, -0.1, 4.4, 5.5, 1.6, 4.6, 3.4];

fn app() -> Router {
    router(&ServiceConfig::default())
}

async fn send(app: Router, req: Request<Body>) -> (StatusCode, Value) {
    let resp = app.oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let body = serde_json::from_slice(&bytes)
        .unwrap_or_else(|e| panic!("non-JSON body ({e}): {}", String::from_utf8_lossy(&bytes)));
    (status, body)
}

async fn post(path: &str, body: Value) -> (StatusCode, Value) {
    let req = Request::post(path)
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    send(app(), req).await
}

async fn get(path: &str) -> (StatusCode, Value) {
    send(app(), Request::get(path).body(Body::empty()).unwrap()).await
}

fn f(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"))
}

fn approx(actual: f64, expected: f64, tol: f64) {
    assert!((actual - expected).abs() <= tol, "{actual} vs {expected} (tol {tol})");
}

fn calc_body(mode: &str, extra: Value) -> Value {
    let mut body = json!({"mode": mode, "n_per_group": 16, "effect_size_normalized": 1.0});
    body.as_object_mut()
        .unwrap()
        .extend(extra.as_object().unwrap().clone());
    body
}

#[tokio::test]
async fn calc_examples() {
    let (s, v) = post("/api/v1/calc", calc_body("fpr_from_p_prior", json!({"p_value": 0.05, "prior": 0.5}))).await;
    assert_eq!(s, StatusCode::OK, "{v}");
    approx(f(&v, "fpr"), 0.27, 0.005);
    approx(f(&v, "l10"), 2.76, 0.005);
    assert_eq!(v["minimum_fpr"], true);
    assert_eq!(v["request"]["p_value"], 0.05);
    assert!(v["statement"].as_str().unwrap().contains("27%"));

    let (s, v) = post("/api/v1/calc", calc_body("prior_from_p_fpr", json!({"p_value": 0.05, "fpr": 0.05}))).await;
    assert_eq!(s, StatusCode::OK);
    approx(f(&v, "prior"), 0.87, 0.005);

    let (s, v) = post("/api/v1/calc", calc_body("p_from_fpr_prior", json!({"fpr": 0.05, "prior": 0.1}))).await;
    assert_eq!(s, StatusCode::OK);
    approx(f(&v, "p_value"), 0.00045, 0.000005);

    let (s, v) = post("/api/v1/calc", calc_body("fpr_from_p_prior", json!({"p_value": 0.05, "prior": 1.0}))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(f(&v, "fpr"), 0.0);
    assert!(v["caveat"].as_str().unwrap().starts_with("prior_is_certain"));
}

#[tokio::test]
async fn calc_errors() {
    let (s, v) = post(
        "/api/v1/calc",
        calc_body("fpr_from_p_prior", json!({"p_value": 0.5, "prior": 0.5, "method": "sellke_berger"})),
    )
    .await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["code"], "sellke_berger_range");
    assert_eq!(v["schema_version"], 1);

    let (s, v) = post("/api/v1/calc", calc_body("fpr_from_p_prior", json!({"p_value": 0.05, "prior": 0.5, "colour": 1}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["code"], "bad_request");
    assert!(v["error"]["message"].as_str().unwrap().contains("colour"));

    let (s, v) = post("/api/v1/calc", calc_body("fpr_from_p_prior", json!({"p_value": 0.05}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["code"], "invalid_input");

    let (s, v) = post("/api/v1/calc", calc_body("fpr_from_p_prior", json!({"p_value": 1.5, "prior": 0.5}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["code"], "out_of_range");

    let (s, v) = post("/api/v1/calc", calc_body("p_from_fpr_prior", json!({"fpr": 0.999, "prior": 0.5}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["code"], "no_solution");
}

#[tokio::test]
async fn ttest_examples() {
    let (s, v) = post("/api/v1/ttest", json!({"a": SLEEP_A, "b": SLEEP_B})).await;
    assert_eq!(s, StatusCode::OK, "{v}");
    approx(f(&v["summary"], "p_two_sided"), 0.07918, 0.00001);
    approx(f(&v["summary"], "t_value"), 1.8608, 0.00005);
    approx(f(&v, "fpr"), 0.28, 0.005);
    approx(f(&v["calc"], "l10"), 2.54, 0.005);

    // Reverse Bayes on the observed p with the same design.
    let design = &v["calc"]["design"];
    let (s, r) = post(
        "/api/v1/calc",
        json!({
            "mode": "prior_from_p_fpr",
            "p_value": v["summary"]["p_two_sided"],
            "fpr": 0.05,
            "n_per_group": design["n_per_group"],
            "effect_size_normalized": design["effect_size_normalized"],
        }),
    )
    .await;
    assert_eq!(s, StatusCode::OK);
    approx(f(&r, "prior"), 0.88, 0.005);

    let (s, v) = post("/api/v1/ttest", json!({"a": [1.0, 2.0, 3.0], "b": [1.0, 2.0, 3.0], "prior": 0.3})).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(f(&v["summary"], "p_two_sided"), 1.0);
    assert_eq!(f(&v, "fpr"), 1.0);

    let (s, v) = post("/api/v1/ttest", json!({"a": [1.0], "b": [1.0, 2.0]})).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["code"], "sample_too_small");
    assert!(v["error"]["message"].as_str().unwrap().contains("sample a"));

    let (s, v) = post("/api/v1/ttest", json!({"a": [2.0, 2.0], "b": [2.0, 2.0]})).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["code"], "degenerate_data");
}

#[tokio::test]
async fn curves_examples() {
    let (s, v) = get("/api/v1/curves/fig2").await;
    assert_eq!(s, StatusCode::OK, "{v}");
    assert_eq!(v["minimum"]["n"], 8.0);
    approx(f(&v["minimum"], "fpr"), 0.206, 0.0005);
    let points = v["series"][0]["points"].as_array().unwrap();
    assert!(points.iter().any(|p| p["n"] == 8.0 && (f(p, "fpr") - 0.206).abs() < 0.0005));

    // Log grid {0.025, 0.05, 0.1}.
    let (s, v) = get("/api/v1/curves/fig3?p_min=0.025&p_max=0.1&points=3").await;
    assert_eq!(s, StatusCode::OK);
    let at_005 = |method: &str| {
        let series = v["series"].as_array().unwrap().iter().find(|s| s["method"] == method).unwrap();
        let point = series["points"][1].clone();
        approx(f(&point, "p"), 0.05, 1e-12);
        f(&point, "fpr")
    };
    approx(at_005("p_equals"), 0.27, 0.005);
    approx(at_005("sellke_berger"), 0.29, 0.005);
    approx(at_005("goodman"), 0.227, 0.0005);

    let (s, v) = get("/api/v1/curves/fig1?es_min=1&es_max=0.5").await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["code"], "invalid_grid");

    let (s, v) = get("/api/v1/curves/fig3?points=0").await;
    assert_eq!(s, StatusCode::BAD_REQUEST, "{v}");

    let (s, _) = get("/api/v1/curves/fig9").await;
    assert_eq!(s, StatusCode::NOT_FOUND);

    let (s, v) = get("/api/v1/curves/fig2?bogus=1").await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["code"], "bad_request");
}

#[tokio::test]
async fn simulate_endpoint() {
    let body = json!({"n_per_group": 16, "effect_size": 1.0, "n_sims": 20000, "seed": 3});
    let (s, v) = post("/api/v1/simulate", body.clone()).await;
    assert_eq!(s, StatusCode::OK, "{v}");
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["config"]["n_sims"], 20000);
    assert_eq!(v["frac_below"].as_array().unwrap().len(), 4);
    approx(f(&v, "analytic_lr"), 2.76, 0.005);
    let (_, again) = post("/api/v1/simulate", body).await;
    assert_eq!(v, again);

    let (s, v) = post(
        "/api/v1/simulate",
        json!({"n_per_group": 16, "effect_size": 1.0, "n_sims": 2_000_001u64, "seed": 3}),
    )
    .await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["code"], "budget_exceeded");

    let cfg = ServiceConfig {
        max_sim_replicates: 10,
        ..ServiceConfig::default()
    };
    let req = Request::post("/api/v1/simulate")
        .header("content-type", "application/json")
        .body(Body::from(json!({"n_per_group": 4, "effect_size": 1.0, "n_sims": 11, "seed": 1}).to_string()))
        .unwrap();
    let (s, _) = send(router(&cfg), req).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn health_spec_and_fallback() {
    let (s, v) = get("/api/v1/health").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["schema_version"], 1);

    let (s, v) = get("/api/v1/spec").await;
    assert_eq!(s, StatusCode::OK);
    assert!(v["openapi"].as_str().unwrap().starts_with("3."));
    for path in ["/api/v1/calc", "/api/v1/ttest", "/api/v1/curves/{figure}", "/api/v1/simulate", "/api/v1/health"] {
        assert!(v["paths"].get(path).is_some(), "{path} undocumented");
    }

    let (s, v) = get("/api/v2/nothing").await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(v["error"]["code"], "not_found");
}

#[tokio::test]
async fn cors_preflight() {
    let req = Request::options("/api/v1/calc")
        .header("origin", "http://localhost:5173")
        .header("access-control-request-method", "POST")
        .body(Body::empty())
        .unwrap();
    let resp = app().oneshot(req).await.unwrap();
    assert!(resp.headers().contains_key("access-control-allow-origin"));
}

#[tokio::test]
async fn every_response_is_versioned() {
    let responses = [
        post("/api/v1/calc", calc_body("fpr_from_p_prior", json!({"p_value": 0.01, "prior": 0.2}))).await,
        post("/api/v1/ttest", json!({"a": SLEEP_A, "b": SLEEP_B})).await,
        get("/api/v1/curves/fig1").await,
        get("/api/v1/curves/fig3").await,
        post("/api/v1/calc", json!({})).await,
    ];
    for (_, v) in responses {
        assert_eq!(v["schema_version"], 1, "{v}");
    }
}

#[tokio::test]
async fn stateless_under_permutation() {
    let requests = [
        ("calc", calc_body("fpr_from_p_prior", json!({"p_value": 0.01, "prior": 0.1}))),
        ("ttest", json!({"a": SLEEP_A, "b": SLEEP_B, "prior": 0.2})),
        ("calc", calc_body("prior_from_p_fpr", json!({"p_value": 0.001, "fpr": 0.05}))),
        ("calc", calc_body("fpr_from_p_prior", json!({"p_value": 2.0, "prior": 0.1}))),
    ];
    let mut forward = Vec::new();
    for (path, body) in &requests {
        forward.push(post(&format!("/api/v1/{path}"), body.clone()).await);
    }
    // One shared router, requests in reverse order.
    let shared = app();
    let mut backward = Vec::new();
    for (path, body) in requests.iter().rev() {
        let req = Request::post(format!("/api/v1/{path}"))
            .header("content-type", "application/json")
            .body(Body::from(body.to_string()))
            .unwrap();
        backward.push(send(shared.clone(), req).await);
    }
    backward.reverse();
    assert_eq!(forward, backward);
}

/// The service must return exactly what the library computes, after the
/// documented rounding to 12 significant digits.
#[tokio::test]
async fn parity_with_library() {
    let r12 = |x: f64| round_sig(x, JSON_DIGITS);
    for &(n, es) in &[(16u32, 1.0), (8, 1.1), (64, 1.0), (5, 0.3)] {
        let design = StudyDesign::new(n, es).unwrap();
        for method in Method::ALL {
            for &(p, prior) in &[(0.05, 0.5), (0.001, 0.1), (0.2, 0.9)] {
                let body = json!({
                    "mode": "fpr_from_p_prior", "p_value": p, "prior": prior,
                    "n_per_group": n, "effect_size_normalized": es, "method": method.as_str(),
                });
                let (s, v) = post("/api/v1/calc", body).await;
                assert_eq!(s, StatusCode::OK, "{v}");
                let lib = calc(CalcMode::FprFromPPrior, CalcInputs::fpr_from(p, prior), &design, method).unwrap();
                let lr = likelihood_ratio(method, p, &design).unwrap();
                assert_eq!(f(&v, "fpr").to_bits(), r12(lib.triple.fpr).to_bits(), "{method} n={n} p={p}");
                assert_eq!(f(&v, "l10").to_bits(), r12(lr.l10).to_bits());
                assert_eq!(f(&v, "l01").to_bits(), r12(lr.l01()).to_bits());
                assert_eq!(f(&v, "power_at_005").to_bits(), r12(lib.power_at_005).to_bits());
                assert_eq!(v["statement"], lib.statement());
            }
        }
    }

    // Whole-document parity through the shared builder.
    let req: CalcRequest =
        serde_json::from_value(calc_body("p_from_fpr_prior", json!({"fpr": 0.05, "prior": 0.1}))).unwrap();
    let (_, v) = post("/api/v1/calc", serde_json::to_value(&req).unwrap()).await;
    assert_eq!(v, api::to_rounded_json(&api::calc_response(&req).unwrap()));
}
