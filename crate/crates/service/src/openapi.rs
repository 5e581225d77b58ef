use serde_json::{json, Value};

use crate::api::SCHEMA_VERSION;

fn num() -> Value {
    json!({"type": "number"})
}

fn error_response() -> Value {
    json!({
        "description": "Invalid request or domain error",
        "content": {"application/json": {"schema": {"$ref": "#/components/schemas/Error"}}}
    })
}

fn ok(schema: &str) -> Value {
    json!({
        "description": "OK",
        "content": {"application/json": {"schema": {"$ref": format!("#/components/schemas/{schema}")}}}
    })
}

fn body(schema: &str) -> Value {
    json!({
        "required": true,
        "content": {"application/json": {"schema": {"$ref": format!("#/components/schemas/{schema}")}}}
    })
}

/// OpenAPI 3.0 description of the API.
pub fn document() -> Value {
    let query = |name: &str, desc: &str| {
        json!({"name": name, "in": "query", "required": false, "description": desc, "schema": num()})
    };
    json!({
        "openapi": "3.0.3",
        "info": {
            "title": "fpr",
            "version": env!("CARGO_PKG_VERSION"),
            "description": format!("False positive risk calculator API, schema_version {SCHEMA_VERSION}. Floats carry at most 12 significant digits."),
        },
        "paths": {
            "/api/v1/health": {"get": {"summary": "Liveness and version", "responses": {"200": {"description": "OK"}}}},
            "/api/v1/spec": {"get": {"summary": "This document", "responses": {"200": {"description": "OK"}}}},
            "/api/v1/calc": {"post": {
                "summary": "Complete a (p, prior, FPR) triple from two of its members",
                "requestBody": body("CalcRequest"),
                "responses": {"200": ok("CalcResponse"), "400": error_response()}
            }},
            "/api/v1/ttest": {"post": {
                "summary": "Two-sample t test plus false positive risk",
                "requestBody": body("TtestRequest"),
                "responses": {"200": {"description": "OK"}, "400": error_response()}
            }},
            "/api/v1/curves/{figure}": {"get": {
                "summary": "Curve data: fig1 (FPR vs effect size at constant power), fig2 (FPR vs n), fig3 (FPR vs p)",
                "parameters": [
                    {"name": "figure", "in": "path", "required": true, "schema": {"type": "string", "enum": ["fig1", "fig2", "fig3"]}},
                    query("p", "observed p (fig1, fig2); default 0.05"),
                    query("prior", "prior probability of a real effect; default 0.5"),
                    query("power", "constant power (fig1); default 0.78"),
                    query("es", "effect size in SDs (fig2, fig3); default 1"),
                    query("n", "per-group size (fig3); default 16"),
                    query("es_min", "fig1 grid start; default 0.1"),
                    query("es_max", "fig1 grid end; default 2"),
                    query("es_step", "fig1 grid step; default 0.05"),
                    query("n_min", "fig2 grid start; default 4"),
                    query("n_max", "fig2 grid end; default 64"),
                    query("p_min", "fig3 grid start; default 1e-4"),
                    query("p_max", "fig3 grid end; default 0.3"),
                    query("points", "fig3 grid size; default 60"),
                ],
                "responses": {"200": {"description": "OK"}, "400": error_response(), "404": error_response()}
            }},
            "/api/v1/simulate": {"post": {
                "summary": "Monte Carlo t tests under H0 and H1",
                "requestBody": body("SimRequest"),
                "responses": {"200": {"description": "OK"}, "400": error_response()}
            }},
        },
        "components": {"schemas": {
            "Error": {"type": "object", "properties": {
                "schema_version": {"type": "integer"},
                "error": {"type": "object", "properties": {"code": {"type": "string"}, "message": {"type": "string"}}}
            }},
            "CalcRequest": {
                "type": "object",
                "additionalProperties": false,
                "required": ["mode", "n_per_group", "effect_size_normalized"],
                "properties": {
                    "mode": {"type": "string", "enum": ["fpr_from_p_prior", "p_from_fpr_prior", "prior_from_p_fpr"]},
                    "p_value": num(), "prior": num(), "fpr": num(),
                    "n_per_group": num(), "effect_size_normalized": num(),
                    "method": {"type": "string", "enum": ["p_equals", "p_less_than", "sellke_berger", "goodman"], "default": "p_equals"}
                }
            },
            "CalcResponse": {"type": "object", "properties": {
                "schema_version": {"type": "integer"},
                "request": {"$ref": "#/components/schemas/CalcRequest"},
                "p_value": num(), "prior": num(), "fpr": num(),
                "minimum_fpr": {"type": "boolean"},
                "method": {"type": "string"},
                "l10": num(), "l01": num(), "power_at_005": num(),
                "design": {"type": "object"},
                "statement": {"type": "string"},
                "caveat": {"type": "string"}
            }},
            "TtestRequest": {
                "type": "object",
                "additionalProperties": false,
                "required": ["a", "b"],
                "properties": {
                    "a": {"type": "array", "items": num(), "minItems": 2},
                    "b": {"type": "array", "items": num(), "minItems": 2},
                    "prior": num()
                }
            },
            "SimRequest": {
                "type": "object",
                "additionalProperties": false,
                "required": ["n_per_group", "effect_size", "n_sims", "seed"],
                "properties": {
                    "n_per_group": {"type": "integer", "minimum": 2},
                    "effect_size": num(),
                    "n_sims": {"type": "integer", "minimum": 1},
                    "seed": {"type": "integer"},
                    "band_center": num(),
                    "band_half_width": num(),
                    "thresholds": {"type": "array", "items": num()}
                }
            }
        }}
    })
}
