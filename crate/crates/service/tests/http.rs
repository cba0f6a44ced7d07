use std::sync::Arc;

use regsynth_core::game::{save_game, toy_game, ARCH_FORMULA};
use regsynth_service::{router, SessionStore, StoreConfig};
use reqwest::{Client, StatusCode};
use serde_json::{json, Value};

/// Starts a server on an ephemeral port and returns its base URL.
async fn spawn(config: StoreConfig) -> String {
    let store = Arc::new(SessionStore::new(config));
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, router(store)).await.unwrap() });
    format!("http://{addr}")
}

async fn create(c: &Client, base: &str, body: Value) -> (StatusCode, Value) {
    let r = c.post(format!("{base}/sessions")).json(&body).send().await.unwrap();
    (r.status(), r.json().await.unwrap())
}

async fn act(c: &Client, base: &str, id: &str, body: Value) -> (StatusCode, Value) {
    let r = c
        .post(format!("{base}/sessions/{id}/actions"))
        .json(&body)
        .send()
        .await
        .unwrap();
    (r.status(), r.json().await.unwrap())
}

async fn get(c: &Client, url: String) -> (StatusCode, Value) {
    let r = c.get(url).send().await.unwrap();
    let status = r.status();
    (status, r.json().await.unwrap_or(Value::Null))
}

/// Creates a toy session with `budget`, posts `actions` and returns the
/// final view.
async fn toy_play(c: &Client, base: &str, budget: u32, actions: &[&str]) -> Value {
    let (status, created) = create(c, base, json!({"scenario": "toy", "budget": budget})).await;
    assert_eq!(status, StatusCode::CREATED, "{created}");
    let id = created["id"].as_str().unwrap().to_string();
    let mut view = created["view"].clone();
    for a in actions {
        if view["done"] == true {
            break;
        }
        let (status, v) = act(c, base, &id, json!({"action": a})).await;
        assert_eq!(status, StatusCode::OK, "{v}");
        view = v;
    }
    view
}

#[tokio::test]
async fn scenarios_are_listed() {
    let base = spawn(StoreConfig::default()).await;
    let (status, list) = get(&Client::new(), format!("{base}/scenarios")).await;
    assert_eq!(status, StatusCode::OK);
    let names: Vec<&str> = list.as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["toy", "arch", "line"]);
}

#[tokio::test]
async fn toy_session_payoffs_depend_on_the_posted_actions() {
    let base = spawn(StoreConfig::default()).await;
    let c = Client::new();

    let v = toy_play(&c, &base, 7, &["a_e2"]).await;
    assert_eq!((v["done"].clone(), v["satisfied"].clone(), v["payoff"].clone()), (json!(true), json!(true), json!(1)));

    let v = toy_play(&c, &base, 7, &["a_e1", "a_e1"]).await;
    assert_eq!((v["done"].clone(), v["payoff"].clone()), (json!(true), json!(7)));
    assert_eq!(v["last_robot_action"], "a_s2");

    // with B = 5 only the far placement fits
    let v = toy_play(&c, &base, 5, &["a_e1"]).await;
    assert_eq!((v["done"].clone(), v["payoff"].clone()), (json!(true), json!(5)));
}

#[tokio::test]
async fn created_session_shows_the_robot_opening() {
    let base = spawn(StoreConfig::default()).await;
    let c = Client::new();
    let (status, created) = create(&c, &base, json!({"scenario": "toy", "budget": 7})).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(created["root_regret"], 2);
    let v = &created["view"];
    assert_eq!(v["turn"], "human");
    assert_eq!(v["last_robot_action"], "a_s1");
    assert_eq!(v["legal_actions"], json!(["a_e1", "a_e2"]));
    assert_eq!((v["payoff"].clone(), v["budget_remaining"].clone()), (json!(1), json!(6)));

    let id = created["id"].as_str().unwrap();
    let (status, again) = get(&c, format!("{base}/sessions/{id}")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(&again, v);
}

#[tokio::test]
async fn infeasible_budget_reports_the_minimum() {
    let base = spawn(StoreConfig::default()).await;
    let (status, body) = create(&Client::new(), &base, json!({"scenario": "toy", "budget": 4})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["min_budget"], 5);
    assert_eq!(body["budget"], 4);
}

#[tokio::test]
async fn bad_requests_are_rejected() {
    let base = spawn(StoreConfig::default()).await;
    let c = Client::new();
    let (status, _) = create(&c, &base, json!({"scenario": "pyramid"})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = create(&c, &base, json!({"scenario": "toy", "colour": "red"})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let r = c
        .post(format!("{base}/sessions"))
        .header("content-type", "application/json")
        .body("{not json")
        .send()
        .await
        .unwrap();
    assert_eq!(r.status(), StatusCode::BAD_REQUEST);

    let (_, created) = create(&c, &base, json!({"scenario": "toy", "budget": 7})).await;
    let id = created["id"].as_str().unwrap();
    let (status, body) = act(&c, &base, id, json!({"action": "fly"})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["legal_actions"], json!(["a_e1", "a_e2"]));
    assert!(body["error"].as_str().unwrap().contains("fly"));
}

#[tokio::test]
async fn unknown_sessions_are_not_found() {
    let base = spawn(StoreConfig::default()).await;
    let c = Client::new();
    let missing = "00000000-0000-0000-0000-000000000000";
    assert_eq!(get(&c, format!("{base}/sessions/{missing}")).await.0, StatusCode::NOT_FOUND);
    assert_eq!(get(&c, format!("{base}/sessions/{missing}/trace")).await.0, StatusCode::NOT_FOUND);
    assert_eq!(act(&c, &base, missing, json!({"action": "a_e1"})).await.0, StatusCode::NOT_FOUND);
    let r = c.delete(format!("{base}/sessions/{missing}")).send().await.unwrap();
    assert_eq!(r.status(), StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn finished_and_stale_posts_conflict() {
    let base = spawn(StoreConfig::default()).await;
    let c = Client::new();
    let (_, created) = create(&c, &base, json!({"scenario": "toy", "budget": 7})).await;
    let id = created["id"].as_str().unwrap();
    let (status, _) = act(&c, &base, id, json!({"action": "a_e1", "step": 0})).await;
    assert_eq!(status, StatusCode::CONFLICT, "step 0 is stale after the robot opened");
    let (status, v) = act(&c, &base, id, json!({"action": "a_e2", "step": 1})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["done"], true);
    let (status, _) = act(&c, &base, id, json!({"action": "a_e1"})).await;
    assert_eq!(status, StatusCode::CONFLICT);

    let (status, trace) = get(&c, format!("{base}/sessions/{id}/trace")).await;
    assert_eq!(status, StatusCode::OK);
    let actions: Vec<&str> = trace["steps"].as_array().unwrap().iter().map(|s| s["action"].as_str().unwrap()).collect();
    assert_eq!(actions, ["a_s1", "a_e2"]);
    assert_eq!(trace["payoff"], 1);
}

#[tokio::test]
async fn deleted_sessions_are_gone() {
    let base = spawn(StoreConfig::default()).await;
    let c = Client::new();
    let (_, created) = create(&c, &base, json!({"scenario": "toy", "budget": 7})).await;
    let id = created["id"].as_str().unwrap();
    let r = c.delete(format!("{base}/sessions/{id}")).send().await.unwrap();
    assert_eq!(r.status(), StatusCode::NO_CONTENT);
    assert_eq!(get(&c, format!("{base}/sessions/{id}")).await.0, StatusCode::NOT_FOUND);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_posts_apply_exactly_once() {
    let base = spawn(StoreConfig::default()).await;
    let c = Client::new();
    let (_, created) = create(&c, &base, json!({"scenario": "toy", "budget": 7})).await;
    let id = created["id"].as_str().unwrap().to_string();
    let posts = (0..8).map(|_| {
        let (c, base, id) = (c.clone(), base.clone(), id.clone());
        tokio::spawn(async move { act(&c, &base, &id, json!({"action": "a_e1", "step": 1})).await.0 })
    });
    let mut statuses = Vec::new();
    for p in posts {
        statuses.push(p.await.unwrap());
    }
    assert_eq!(statuses.iter().filter(|s| **s == StatusCode::OK).count(), 1, "{statuses:?}");
    assert!(statuses.iter().all(|s| *s == StatusCode::OK || *s == StatusCode::CONFLICT));
    let (_, trace) = get(&c, format!("{base}/sessions/{id}/trace")).await;
    let humans = trace["steps"].as_array().unwrap().iter().filter(|s| s["actor"] == "human").count();
    assert_eq!(humans, 1);
}

#[tokio::test]
async fn many_sessions_run_side_by_side() {
    let base = spawn(StoreConfig::default()).await;
    let c = Client::new();
    let creates = (0..6).map(|_| {
        let (c, base) = (c.clone(), base.clone());
        tokio::spawn(async move { create(&c, &base, json!({"scenario": "toy", "budget": 7})).await })
    });
    let mut ids = Vec::new();
    for t in creates {
        let (status, body) = t.await.unwrap();
        assert_eq!(status, StatusCode::CREATED);
        ids.push(body["id"].as_str().unwrap().to_string());
    }
    for (i, id) in ids.iter().enumerate() {
        let a = if i % 2 == 0 { "a_e2" } else { "a_e1" };
        act(&c, &base, id, json!({"action": a})).await;
    }
    for (i, id) in ids.iter().enumerate() {
        let (_, v) = get(&c, format!("{base}/sessions/{id}")).await;
        let want = if i % 2 == 0 { 1 } else { 7 };
        assert_eq!(v["payoff"], want);
    }
}

#[tokio::test]
async fn evicted_sessions_are_restored_from_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let base = spawn(StoreConfig {
        capacity: 1,
        snapshot_dir: Some(dir.path().to_path_buf()),
    })
    .await;
    let c = Client::new();
    let (_, first) = create(&c, &base, json!({"scenario": "toy", "budget": 7})).await;
    let first = first["id"].as_str().unwrap().to_string();
    let (status, _) = act(&c, &base, &first, json!({"action": "a_e1"})).await;
    assert_eq!(status, StatusCode::OK);
    let (_, before) = get(&c, format!("{base}/sessions/{first}")).await;

    let (_, second) = create(&c, &base, json!({"scenario": "toy", "budget": 7})).await;
    assert!(dir.path().join(format!("{first}.json")).exists(), "evicted session was written out");

    let (status, after) = get(&c, format!("{base}/sessions/{first}")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(after, before);
    // the second session is now the one on disk
    assert_eq!(get(&c, format!("{base}/sessions/{}", second["id"].as_str().unwrap())).await.0, StatusCode::OK);
}

#[tokio::test]
async fn eviction_without_snapshots_forgets_the_session() {
    let base = spawn(StoreConfig {
        capacity: 1,
        snapshot_dir: None,
    })
    .await;
    let c = Client::new();
    let (_, first) = create(&c, &base, json!({"scenario": "toy", "budget": 7})).await;
    create(&c, &base, json!({"scenario": "toy", "budget": 7})).await;
    let id = first["id"].as_str().unwrap();
    assert_eq!(get(&c, format!("{base}/sessions/{id}")).await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn custom_game_documents_are_accepted() {
    let base = spawn(StoreConfig::default()).await;
    let game: Value = serde_json::from_str(&save_game(&toy_game())).unwrap();
    let (status, body) = create(
        &Client::new(),
        &base,
        json!({"game": game, "formula": ARCH_FORMULA, "budget": 7}),
    )
    .await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    assert_eq!(body["root_regret"], 2);
}
