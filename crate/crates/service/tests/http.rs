mod common;

use common::*;
use oac_core::model::{ViolationCode, annotation_from_graph};
use oac_core::rdf::{self, Iri, RdfFormat};
use oac_service::Config;
use reqwest::StatusCode;
use reqwest::header;
use serde_json::{Value, json};

fn iri(s: &str) -> Iri {
    Iri::parse(s).unwrap()
}

#[tokio::test]
async fn post_mints_uris_and_dereferences_in_both_formats() {
    let svc = start().await;
    let http = client();
    let res = http
        .post(format!("{}/annotations", svc.base))
        .header(header::CONTENT_TYPE, TTL)
        .body(draft(1, "http://cnn.com/", "This is the front page of CNN"))
        .send()
        .await
        .unwrap();
    assert_eq!(res.status(), StatusCode::CREATED);
    let location = res.headers()[header::LOCATION].to_str().unwrap().to_string();
    assert_eq!(
        location,
        format!("{}/annotations/00000000-0000-4000-8000-000000000001", svc.base)
    );
    let body = res.text().await.unwrap();
    assert!(body.contains("owl:sameAs"), "{body}");
    assert!(body.contains(&format!("{}/bodies/00000000-0000-4000-9000-000000000001", svc.base)));

    let uri = iri(&location);
    let stored = svc.state.store.get(&uri).unwrap();

    let nt = http.get(&location).header(header::ACCEPT, NT).send().await.unwrap();
    assert_eq!(nt.headers()[header::CONTENT_TYPE], NT);
    assert_eq!(nt.text().await.unwrap(), stored.canonical());

    let ttl = http.get(&location).send().await.unwrap();
    assert_eq!(ttl.headers()[header::CONTENT_TYPE], TTL);
    let g = rdf::parse(&ttl.text().await.unwrap(), RdfFormat::Turtle).unwrap();
    assert_eq!(annotation_from_graph(&g, &uri).unwrap(), stored.annotation);

    let refused = http
        .get(&location)
        .header(header::ACCEPT, "application/json")
        .send()
        .await
        .unwrap();
    assert_eq!(refused.status(), StatusCode::NOT_ACCEPTABLE);

    let again = http
        .post(format!("{}/annotations", svc.base))
        .header(header::CONTENT_TYPE, TTL)
        .body(draft(1, "http://cnn.com/", "This is the front page of CNN"))
        .send()
        .await
        .unwrap();
    assert_eq!(again.status(), StatusCode::OK);
    assert_eq!(again.headers()[header::LOCATION].to_str().unwrap(), location);
    assert_eq!(svc.state.store.len(), 1);

    let missing = http.get(format!("{}/annotations/nope", svc.base)).send().await.unwrap();
    assert_eq!(missing.status(), StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn replies_to_urns_are_rewritten() {
    let svc = start().await;
    let http = client();
    let post = |doc: String| {
        http.post(format!("{}/annotations", svc.base))
            .header(header::CONTENT_TYPE, TTL)
            .body(doc)
            .send()
    };
    let first = post(draft(1, "http://images.example.org/a.jp2", "root")).await.unwrap();
    let root = first.headers()[header::LOCATION].to_str().unwrap().to_string();
    let reply = post(draft(2, "urn:uuid:00000000-0000-4000-8000-000000000001", "reply"))
        .await
        .unwrap();
    assert_eq!(reply.status(), StatusCode::CREATED);
    let reply_uri = iri(reply.headers()[header::LOCATION].to_str().unwrap());
    let stored = svc.state.store.get(&reply_uri).unwrap().annotation;
    assert_eq!(stored.targets[0].resource().as_str(), root);

    let view: Value = http
        .get(format!("{root}.json"))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(view["replies"], json!([reply_uri]));
    assert_eq!(view["body"]["chars"], "root");
    assert_eq!(view["temporal"], "Timeless");
}

#[tokio::test]
async fn rejects_bad_documents() {
    let svc = start().await;
    let http = client();
    let doc = r#"@prefix oac: <http://www.openannotation.org/ns/> .
<http://x/a> a oac:Annotation ; oac:hasBody <http://x/b1>, <http://x/b2> ; oac:hasTarget <http://x/t> ."#;
    let res = http
        .post(format!("{}/annotations", svc.base))
        .header(header::CONTENT_TYPE, TTL)
        .body(doc)
        .send()
        .await
        .unwrap();
    assert_eq!(res.status(), StatusCode::UNPROCESSABLE_ENTITY);
    let body: Value = res.json().await.unwrap();
    assert_eq!(body["violations"][0]["code"], ViolationCode::MultipleBodies.as_str());

    let res = http
        .post(format!("{}/annotations", svc.base))
        .body(doc)
        .send()
        .await
        .unwrap();
    assert_eq!(res.status(), StatusCode::UNSUPPORTED_MEDIA_TYPE);
    let res = http
        .post(format!("{}/annotations", svc.base))
        .header(header::CONTENT_TYPE, TTL)
        .body("<a> <b> .")
        .send()
        .await
        .unwrap();
    assert_eq!(res.status(), StatusCode::BAD_REQUEST);
}

async fn register(http: &reqwest::Client, base: &str, original: &str, datetime: &str, content: &str) -> Value {
    let res = http
        .post(format!("{base}/mementos"))
        .json(&json!({"original": original, "datetime": datetime, "content": content}))
        .send()
        .await
        .unwrap();
    assert_eq!(res.status(), StatusCode::CREATED);
    res.json().await.unwrap()
}

#[tokio::test]
async fn timegate_and_mementos() {
    let svc = start().await;
    let http = client();
    let m1 = register(
        &http,
        &svc.base,
        "http://cnn.com/",
        "2010-01-01T00:00:00Z",
        "<p>new year</p>",
    )
    .await;
    let m2 = register(
        &http,
        &svc.base,
        "http://cnn.com/",
        "Sun, 03 Jan 2010 00:00:00 GMT",
        "<p>third</p>",
    )
    .await;
    let dup = http
        .post(format!("{}/mementos", svc.base))
        .json(&json!({"original": "http://cnn.com/", "datetime": "2010-01-01T00:00:00Z"}))
        .send()
        .await
        .unwrap();
    assert_eq!(dup.status(), StatusCode::CONFLICT);

    let gate = svc.state.timegate_uri(&iri("http://cnn.com/"));
    let res = http
        .get(&gate)
        .header("accept-datetime", "Fri, 01 Jan 2010 12:00:00 GMT")
        .send()
        .await
        .unwrap();
    assert_eq!(res.status(), StatusCode::FOUND);
    assert_eq!(res.headers()[header::LOCATION], m1["memento_uri"].as_str().unwrap());
    assert_eq!(res.headers()[header::VARY], "accept-datetime");
    assert!(
        res.headers()[header::LINK]
            .to_str()
            .unwrap()
            .contains("<http://cnn.com/>; rel=\"original\"")
    );

    // equidistant goes earlier, absent header goes latest
    let res = http
        .get(&gate)
        .header("accept-datetime", "Sat, 02 Jan 2010 00:00:00 GMT")
        .send()
        .await
        .unwrap();
    assert_eq!(res.headers()[header::LOCATION], m1["memento_uri"].as_str().unwrap());
    let res = http.get(&gate).send().await.unwrap();
    assert_eq!(res.headers()[header::LOCATION], m2["memento_uri"].as_str().unwrap());
    let res = http.get(&gate).header("accept-datetime", "soon").send().await.unwrap();
    assert_eq!(res.status(), StatusCode::BAD_REQUEST);
    let res = http
        .get(format!("{}/timegate/http%3A%2F%2Fnope%2F", svc.base))
        .send()
        .await
        .unwrap();
    assert_eq!(res.status(), StatusCode::NOT_FOUND);

    let memento = http.get(m2["memento_uri"].as_str().unwrap()).send().await.unwrap();
    assert_eq!(memento.status(), StatusCode::OK);
    assert_eq!(memento.headers()["memento-datetime"], "Sun, 03 Jan 2010 00:00:00 GMT");
    assert!(
        memento.headers()[header::LINK]
            .to_str()
            .unwrap()
            .contains("rel=\"original\"")
    );
    assert_eq!(memento.text().await.unwrap(), "<p>third</p>");

    // annotations point at the TimeGate of archived targets
    let res = http
        .post(format!("{}/annotations", svc.base))
        .header(header::CONTENT_TYPE, TTL)
        .body(draft(5, "http://cnn.com/", "cartoon"))
        .send()
        .await
        .unwrap();
    let location = res.headers()[header::LOCATION].to_str().unwrap().to_string();
    let res = http.get(&location).send().await.unwrap();
    let link = res.headers()[header::LINK].to_str().unwrap();
    assert!(link.contains(&format!("<{gate}>; rel=\"timegate\"")), "{link}");
}

#[tokio::test]
async fn search_endpoint() {
    let svc = start().await;
    let http = client();
    for (n, target, text) in [
        (1, "http://images/i.jp2", "gilded initial"),
        (2, "http://images/i.jp2", "margin note"),
        (3, "http://images/j.jp2", "CNN front page"),
    ] {
        http.post(format!("{}/annotations", svc.base))
            .header(header::CONTENT_TYPE, TTL)
            .body(draft(n, target, text))
            .send()
            .await
            .unwrap();
    }
    let search = |query: &'static str| {
        let http = http.clone();
        let url = format!("{}/search?{query}", svc.base);
        async move { http.get(url).send().await.unwrap() }
    };
    let hits: Vec<String> = search("target=http%3A%2F%2Fimages%2Fi.jp2").await.json().await.unwrap();
    assert_eq!(hits.len(), 2);
    let hits: Vec<String> = search("q=cnn").await.json().await.unwrap();
    assert_eq!(hits.len(), 1);
    let hits: Vec<String> = search("from=2010-04-02&to=2010-04-03").await.json().await.unwrap();
    assert_eq!(hits.len(), 2);
    let hits: Vec<String> = search("target=http%3A%2F%2Fimages%2Fi.jp2&region=0,0,5,5")
        .await
        .json()
        .await
        .unwrap();
    assert!(hits.is_empty());
    assert_eq!(search("").await.status(), StatusCode::BAD_REQUEST);
    assert_eq!(search("region=0,0,1,1").await.status(), StatusCode::BAD_REQUEST);
    assert_eq!(search("from=last-week").await.status(), StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn harvest_is_idempotent_and_tolerates_bad_entries() {
    let svc = start().await;
    let fixtures = FixtureServer::start().await;
    let mut entries = Vec::new();
    for i in 0..3 {
        let uri = format!("{}/annotations/{i}", fixtures.base);
        entries.push(fixtures.put(
            &format!("docs/{i}.ttl"),
            TTL,
            published(&uri, "http://cnn.com/", "harvested"),
        ));
    }
    let feed = fixtures.put("feed.txt", "text/plain", format!("# feed\n{}\n", entries.join("\n")));
    let http = client();
    let harvest = |feed: String| {
        let http = http.clone();
        let url = format!("{}/harvest", svc.base);
        async move { http.post(url).json(&json!({ "feed": feed })).send().await.unwrap() }
    };
    let report: Value = harvest(feed.clone()).await.json().await.unwrap();
    assert_eq!(
        (report["ingested"].as_u64(), report["skipped"].as_u64()),
        (Some(3), Some(0))
    );
    let report: Value = harvest(feed.clone()).await.json().await.unwrap();
    assert_eq!(
        (report["ingested"].as_u64(), report["skipped"].as_u64()),
        (Some(0), Some(3))
    );
    let stored = svc
        .state
        .store
        .get(&iri(&format!("{}/annotations/0", fixtures.base)))
        .unwrap();
    assert_eq!(stored.source_uri, Some(iri(&feed)));

    let broken = fixtures.put("docs/broken.ttl", TTL, "<http://x/a> a <http://x/B");
    let mixed = fixtures.put(
        "mixed.txt",
        "text/plain",
        format!(
            "{}\n{}\n{broken}\n{}/docs/missing.ttl\n",
            entries[0], entries[1], fixtures.base
        ),
    );
    let report: Value = harvest(mixed).await.json().await.unwrap();
    assert_eq!(report["failures"].as_array().unwrap().len(), 2, "{report}");
    assert!(report["failures"][0]["error"].as_str().unwrap().contains("parse error"));
    assert!(report["failures"][1]["error"].as_str().unwrap().contains("404"));

    let res = harvest(format!("{}/no-such-feed", fixtures.base)).await;
    assert_eq!(res.status(), StatusCode::BAD_GATEWAY);
}

#[tokio::test]
async fn state_survives_restart_and_serves_ui() {
    let dir = tempfile::tempdir().unwrap();
    let ui = tempfile::tempdir().unwrap();
    std::fs::write(ui.path().join("index.html"), "<!doctype html><title>annotate</title>").unwrap();
    let config = Config {
        data_dir: dir.path().to_path_buf(),
        ui_dir: Some(ui.path().to_path_buf()),
        ..Config::default()
    };
    let http = client();
    let svc = start_with(config.clone()).await;
    let res = http
        .post(format!("{}/annotations", svc.base))
        .header(header::CONTENT_TYPE, TTL)
        .body(draft(7, "http://cnn.com/", "persisted"))
        .send()
        .await
        .unwrap();
    assert_eq!(res.status(), StatusCode::CREATED);
    register(&http, &svc.base, "http://cnn.com/", "2010-01-01T00:00:00Z", "x").await;
    let page = http.get(format!("{}/ui/index.html", svc.base)).send().await.unwrap();
    assert_eq!(page.status(), StatusCode::OK);
    assert!(page.text().await.unwrap().contains("annotate"));

    let reopened = oac_service::AppState::open(&Config {
        base_url: Some(svc.base.clone()),
        ..config
    })
    .unwrap();
    assert_eq!(reopened.store.len(), 1);
    assert_eq!(reopened.registry().len(), 1);
    assert_eq!(reopened.equivalences().len(), 2);
}

#[tokio::test]
async fn json_view_dereferences_ptr_regions() {
    let svc = start().await;
    let fixtures = FixtureServer::start().await;
    let ptr = fixtures.put(
        "constraints/7",
        "image/svg+xml",
        r#"<polygon xmlns="http://www.w3.org/2000/svg" points="10,10 60,10 60,40"/>"#,
    );
    let encoded: String = ptr.replace(':', "%3A").replace('/', "%2F");
    let http = client();
    let mut locations = Vec::new();
    for (n, target) in [
        (1, format!("http://images.example.org/i.jp2#ptr={encoded}")),
        (2, "http://images.example.org/i.jp2#xywh=5,6,7,8".to_string()),
        (
            3,
            format!(
                "http://images.example.org/i.jp2#ptr={}%2Fmissing",
                fixtures.base.replace(':', "%3A").replace('/', "%2F")
            ),
        ),
    ] {
        let res = http
            .post(format!("{}/annotations", svc.base))
            .header(header::CONTENT_TYPE, TTL)
            .body(draft(n, &target, "region"))
            .send()
            .await
            .unwrap();
        assert_eq!(res.status(), StatusCode::CREATED);
        locations.push(res.headers()[header::LOCATION].to_str().unwrap().to_string());
    }
    let view = |i: usize| {
        let http = http.clone();
        let url = format!("{}.json", locations[i]);
        async move { http.get(url).send().await.unwrap().json::<Value>().await.unwrap() }
    };
    let v = view(0).await;
    assert_eq!(v["targets"][0]["region"]["source"], ptr);
    assert_eq!(
        v["targets"][0]["region"]["bbox"],
        json!({"x": 10.0, "y": 10.0, "w": 50.0, "h": 30.0})
    );
    assert_eq!(v["targets"][0]["fragment"]["canonical"], format!("ptr={encoded}"));
    let v = view(1).await;
    assert_eq!(
        v["targets"][0]["region"]["bbox"],
        json!({"x": 5.0, "y": 6.0, "w": 7.0, "h": 8.0})
    );
    let v = view(2).await;
    assert!(v["targets"][0]["region"]["error"].as_str().unwrap().contains("404"));
}
