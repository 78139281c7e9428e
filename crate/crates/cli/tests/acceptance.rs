//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Run with `cargo test -p biblio-cli --test acceptance`.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use biblio_core::assocnet::{derive_rules, mine_itemsets, AssociationRule, Transaction};
use biblio_core::ingest::{canonical, to_canonical_csv};
use biblio_core::keystem::{apply_keyword_map, stem_keywords, KeywordMethod};
use biblio_core::synthetic::{
    bibliography_csv, brute_force_rules, purity, random_keyword_dataset, random_sunburst_dataset,
    random_transactions, two_block_corpus,
};
use biblio_core::textprep::{lemmatize_token, stem_token, Lemmatizer, TokenizedCorpus};
use biblio_core::topics::{btm_extract_biterms, btm_fit, ctfidf, lda_fit, relevance_ranking, TopicModelParams};
use biblio_core::{
    build_sunburst, check_capabilities, detect_keyword_columns, load_dataset, parse_dataset, run, Analysis,
    AnalysisKind, AnalysisParams, Dataset, IngestError, MappingSet, SourceKind, TopicModelResult,
};
use biblio_service::{app, check_event_log, AnalysisJob, Config, EventKind, JobEvent, JobState};
use http_body_util::BodyExt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tower::ServiceExt;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

const FIXTURES: [(&str, SourceKind); 7] = [
    ("scopus.csv", SourceKind::Scopus),
    ("wos.txt", SourceKind::Wos),
    ("wos_tagged.txt", SourceKind::Wos),
    ("lens.csv", SourceKind::Lens),
    ("custom.csv", SourceKind::Custom),
    ("custom_no_doctype.csv", SourceKind::Custom),
    ("custom_survey.csv", SourceKind::Custom),
];

fn fixture(name: &str) -> Vec<u8> {
    let path = root().join("fixtures").join(name);
    std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn load_fixture(name: &str) -> Result<Dataset, IngestError> {
    load_dataset(&fixture(name), name, &MappingSet::bundled())
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn parser_fidelity() -> Outcome {
    let started = Instant::now();
    let maps = MappingSet::bundled();
    let mut rows = 0;
    for (name, kind) in FIXTURES {
        let ds = load_fixture(name).map_err(|e| format!("{name}: {e}"))?;
        ensure!(ds.source == kind, "{name}: detected {}", ds.source);
        rows += ds.row_count;
        let again = parse_dataset(to_canonical_csv(&ds).as_bytes(), SourceKind::Custom, &maps)
            .map_err(|e| format!("{name} round trip: {e}"))?;
        ensure!(again.records == ds.records, "{name}: round trip changed records");
    }
    let seven = [
        canonical::TITLE,
        canonical::ABSTRACT,
        "Author Keywords",
        canonical::PUBLICATION_YEAR,
        canonical::CITATIONS,
        canonical::DOCUMENT_TYPE,
        canonical::SOURCE_TITLE,
    ];
    for name in ["wos.txt", "wos_tagged.txt"] {
        let ds = load_fixture(name).map_err(|e| e.to_string())?;
        for field in seven {
            ensure!(ds.column(field).is_some_and(|c| c.non_empty > 0), "{name}: no {field}");
        }
        for tag in ["TI", "AB", "DE", "PY", "TC", "DT", "SO"] {
            ensure!(ds.column(tag).is_none(), "{name}: raw tag {tag} left as a column");
        }
    }
    let secs = started.elapsed().as_secs_f64();
    ensure!(secs < 5.0, "took {secs:.2} s");
    Ok(format!("{} fixtures, {rows} rows, round trip identical, {secs:.2} s", FIXTURES.len()))
}

fn capability_matrix() -> Outcome {
    let maps = MappingSet::bundled();
    let full = parse_dataset(bibliography_csv(30, 5).as_bytes(), SourceKind::Custom, &maps).map_err(|e| e.to_string())?;
    let report = check_capabilities(&full);
    for a in Analysis::ALL {
        ensure!(report.get(a).eligible, "full dataset not eligible for {a}");
    }

    // The keyword column is the one field both keyword analyses require.
    let no_keywords = check_capabilities(&full.without_columns(&["Author Keywords"]));
    for a in [Analysis::KeywordsStem, Analysis::BidirectionalNetwork] {
        let cap = no_keywords.get(a);
        ensure!(!cap.eligible, "{a} eligible without keywords");
        ensure!(cap.missing_fields == [canonical::KEYWORDS], "{a}: missing {:?}", cap.missing_fields);
    }

    // A dataset whose only text column is Title, then without it.
    let title_only = full.without_columns(&[canonical::ABSTRACT, canonical::SOURCE_TITLE]);
    let cap = check_capabilities(&title_only).topic_modeling;
    ensure!(cap.eligible && cap.usable_columns == [canonical::TITLE], "title-only text columns: {:?}", cap.usable_columns);
    let cap = check_capabilities(&title_only.without_columns(&[canonical::TITLE])).topic_modeling;
    ensure!(!cap.eligible, "topic modeling eligible without text");
    ensure!(cap.missing_fields.iter().any(|f| f == canonical::TITLE), "missing {:?}", cap.missing_fields);

    for mask in 0u32..16 {
        let drop: Vec<&str> = canonical::SUNBURST_FIELDS
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, f)| *f)
            .collect();
        let cap = check_capabilities(&full.without_columns(&drop)).sunburst;
        ensure!(cap.eligible == drop.is_empty(), "sunburst subset {drop:?}: eligible={}", cap.eligible);
        ensure!(cap.missing_fields == drop, "sunburst subset {drop:?}: missing {:?}", cap.missing_fields);
    }
    Ok("4 analyses, 16 sunburst subsets".into())
}

fn stemmer_conformance() -> Outcome {
    let data = root().join("crates/core/tests/data");
    let read = |f: &str| std::fs::read_to_string(data.join(f)).map_err(|e| format!("{f}: {e}"));
    let (voc, out) = (read("snowball_en_voc.txt")?, read("snowball_en_output.txt")?);
    ensure!(voc.lines().count() == out.lines().count(), "vocabulary and output differ in length");
    let started = Instant::now();
    let total = voc.lines().count();
    let wrong: Vec<String> = voc
        .lines()
        .zip(out.lines())
        .filter(|(w, s)| stem_token(w) != *s)
        .map(|(w, s)| format!("{w}->{} (want {s})", stem_token(w)))
        .collect();
    let secs = started.elapsed().as_secs_f64();
    ensure!(wrong.is_empty(), "{} of {total} differ, e.g. {:?}", wrong.len(), &wrong[..wrong.len().min(5)]);
    ensure!(secs < 10.0, "took {secs:.2} s");
    Ok(format!("{total}/{total} pairs, {secs:.2} s"))
}

fn lemmatizer() -> Outcome {
    ensure!(lemmatize_token("apples") == "apple", "apples -> {}", lemmatize_token("apples"));
    let path = root().join("crates/core/tests/data/curated_lemmas.tsv");
    let curated = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    let pairs: Vec<(&str, &str)> = curated.lines().filter_map(|l| l.split_once('\t')).collect();
    ensure!(pairs.len() == 50, "curated list has {} pairs", pairs.len());
    for (w, l) in &pairs {
        ensure!(lemmatize_token(w) == *l, "{w} -> {} (want {l})", lemmatize_token(w));
    }
    let lem = Lemmatizer::bundled();
    let mut bases = 0;
    for w in lem.baseforms() {
        bases += 1;
        ensure!(lem.lemmatize(w) == w, "base form {w} -> {}", lem.lemmatize(w));
    }
    Ok(format!("apples->apple, 50 curated pairs, {bases} base forms fixed"))
}

fn distinct_keywords(ds: &Dataset, columns: &[String]) -> usize {
    ds.records
        .iter()
        .flat_map(|r| columns.iter().filter_map(|c| r.keyword_fields.get(c)).flatten())
        .map(|k| k.to_lowercase())
        .collect::<BTreeSet<_>>()
        .len()
}

fn keywords_stem() -> Outcome {
    let methods = [KeywordMethod::Lemmatize, KeywordMethod::Stem];
    let mut replayed = 0;
    for (name, _) in FIXTURES {
        let ds = load_fixture(name).map_err(|e| e.to_string())?;
        let cols = detect_keyword_columns(&ds);
        if cols.is_empty() {
            // The survey export has no keyword column and is not eligible.
            ensure!(!check_capabilities(&ds).keywords_stem.eligible, "{name}: eligible without keyword columns");
            continue;
        }
        replayed += 1;
        for method in methods {
            let (out, map) = stem_keywords(&ds, method, &cols).map_err(|e| e.to_string())?;
            let replay = apply_keyword_map(&ds, &cols, &map).map_err(|e| e.to_string())?;
            ensure!(replay.records == out.records, "{name} {method:?}: replay differs");
        }
    }
    let mut r = rng(31);
    for i in 0..1000 {
        let ds = random_keyword_dataset(&mut r);
        let cols = detect_keyword_columns(&ds);
        for method in methods {
            let (out, _) = stem_keywords(&ds, method, &cols).map_err(|e| e.to_string())?;
            let (before, after) = (distinct_keywords(&ds, &cols), distinct_keywords(&out, &cols));
            ensure!(after <= before, "table {i} {method:?}: {before} -> {after} distinct keywords");
        }
    }
    ensure!(replayed >= 6, "only {replayed} fixtures have keyword columns");
    Ok(format!("replay exact on {replayed} keyword fixtures, 1000 random tables"))
}

fn same_bits(a: &TopicModelResult, b: &TopicModelResult) -> bool {
    let bits = |m: &[Vec<f64>]| m.iter().flatten().map(|x| x.to_bits()).collect::<Vec<_>>();
    bits(&a.phi) == bits(&b.phi)
        && bits(&a.theta) == bits(&b.theta)
        && a.log_likelihood.iter().map(|x| x.to_bits()).eq(b.log_likelihood.iter().map(|x| x.to_bits()))
}

fn topic_recovery() -> Outcome {
    let mut worst = (1.0f64, 0.0f64);
    for (model, doc_len) in [("lda", 20), ("btm", 3)] {
        for seed in 1..=5u64 {
            let (corpus, truth) = two_block_corpus(200, 50, doc_len, seed);
            let params = TopicModelParams {
                k: 2,
                iterations: 500,
                seed: seed + 1000,
                ..Default::default()
            };
            let fit = |_: ()| match model {
                "lda" => lda_fit(&corpus, &params),
                _ => btm_fit(&corpus, &btm_extract_biterms(&corpus), &params),
            };
            let started = Instant::now();
            let a = fit(()).map_err(|e| format!("{model} seed {seed}: {e}"))?;
            let secs = started.elapsed().as_secs_f64();
            let b = fit(()).map_err(|e| format!("{model} seed {seed}: {e}"))?;
            let p = purity(&truth, &a.dominant_topics());
            ensure!(p >= 0.95, "{model} seed {seed}: purity {p:.3}");
            ensure!(a.normalization_error() <= 1e-9, "{model} seed {seed}: normalization {:e}", a.normalization_error());
            ensure!(same_bits(&a, &b), "{model} seed {seed}: two runs differ");
            ensure!(secs < 60.0, "{model} seed {seed}: fit took {secs:.1} s");
            worst = (worst.0.min(p), worst.1.max(secs));
        }
    }
    Ok(format!("min purity {:.3}, slowest fit {:.2} s", worst.0, worst.1))
}

fn random_corpus(r: &mut ChaCha8Rng, docs: usize, vocab: usize, max_len: usize) -> TokenizedCorpus {
    let token_docs: Vec<Vec<String>> = (0..docs)
        .map(|_| {
            let len = r.random_range(0..=max_len);
            (0..len).map(|_| format!("w{}", r.random_range(0..vocab))).collect()
        })
        .collect();
    TokenizedCorpus::from_token_docs(&token_docs)
}

fn class_tfidf() -> Outcome {
    let corpus = TokenizedCorpus::from_token_docs(&[vec!["x", "x"], vec!["y"]]);
    let res = ctfidf(&corpus, &[0, 1]).map_err(|e| e.to_string())?;
    let idx = |t: &str| corpus.vocabulary.iter().position(|v| v == t).expect("toy term");
    let (x, y) = (idx("x"), idx("y"));
    let expected = [
        (res.weights[0][x], 2.0 * 1.75f64.ln(), "W(x,0)"),
        (res.weights[1][y], 2.5f64.ln(), "W(y,1)"),
        (res.weights[1][x], 0.0, "W(x,1)"),
        (res.avg_tokens_per_class, 1.5, "A"),
    ];
    for (got, want, label) in expected {
        ensure!((got - want).abs() <= 1e-6, "{label} = {got}, want {want}");
    }
    ensure!(format!("{:.4}", res.weights[0][x]) == "1.1192", "W(x,0) = {}", res.weights[0][x]);

    let mut r = rng(77);
    for i in 0..200 {
        let corpus = random_corpus(&mut r, 15, 10, 6);
        let labels: Vec<usize> = (0..15).map(|_| r.random_range(0..4)).collect();
        let res = ctfidf(&corpus, &labels).map_err(|e| e.to_string())?;
        for (row, class) in res.weights.iter().zip(&res.classes) {
            for (w, weight) in row.iter().enumerate() {
                let tf: usize = corpus
                    .docs
                    .iter()
                    .zip(&labels)
                    .filter(|(_, l)| *l == class)
                    .map(|(d, _)| d.iter().filter(|&&t| t == w).count())
                    .sum();
                ensure!((*weight == 0.0) == (tf == 0), "instance {i}: class {class} term {w} tf {tf} weight {weight}");
            }
        }
    }
    Ok(format!("toy W(x,0) = {:.6}, 200 random instances", res.weights[0][x]))
}

fn relevance() -> Outcome {
    let mut r = rng(5);
    for i in 0..100 {
        let (k, v) = (r.random_range(1..5), r.random_range(2..30));
        let vocab: Vec<String> = (0..v).map(|w| format!("t{w:02}")).collect();
        let phi: Vec<Vec<f64>> = (0..k).map(|_| (0..v).map(|_| r.random::<f64>()).collect()).collect();
        let p: Vec<f64> = (0..v).map(|_| r.random::<f64>() + 1e-3).collect();
        let sorted = |key: &dyn Fn(usize) -> f64| {
            let mut order: Vec<usize> = (0..v).collect();
            order.sort_by(|&a, &b| key(b).total_cmp(&key(a)).then(vocab[a].cmp(&vocab[b])));
            order
        };
        let one = relevance_ranking(&phi, &p, 1.0, &vocab).map_err(|e| e.to_string())?;
        let zero = relevance_ranking(&phi, &p, 0.0, &vocab).map_err(|e| e.to_string())?;
        for t in 0..k {
            let ids = |ranked: &[(usize, f64)]| ranked.iter().map(|x| x.0).collect::<Vec<_>>();
            ensure!(ids(&one[t]) == sorted(&|w| phi[t][w]), "instance {i} topic {t}: lambda=1 differs from phi sort");
            ensure!(ids(&zero[t]) == sorted(&|w| phi[t][w] / p[w]), "instance {i} topic {t}: lambda=0 differs from lift sort");
        }
    }
    Ok("100 random instances".into())
}

fn sorted_rules(mut rules: Vec<AssociationRule>) -> Vec<AssociationRule> {
    rules.sort_by(|x, y| (&x.antecedent, &x.consequent).cmp(&(&y.antecedent, &y.consequent)));
    rules
}

fn association_rules() -> Outcome {
    let mut r = rng(11);
    let mut total = 0;
    for i in 0..50 {
        let tx = random_transactions(&mut r, 10, 12);
        let (sup, conf) = (r.random_range(0.05..0.6), r.random_range(0.05..1.0));
        let sets = mine_itemsets(&tx, sup).map_err(|e| e.to_string())?;
        let mined = sorted_rules(derive_rules(&sets, conf).map_err(|e| e.to_string())?);
        let oracle = brute_force_rules(&tx, sup, conf);
        ensure!(mined == oracle, "instance {i}: {} rules mined, {} by enumeration", mined.len(), oracle.len());
        total += mined.len();
    }
    let tx: Vec<Transaction> = [vec!["a", "b"], vec!["a"]]
        .iter()
        .map(|t| t.iter().map(|s| s.to_string()).collect())
        .collect();
    let rules = derive_rules(&mine_itemsets(&tx, 0.5).map_err(|e| e.to_string())?, 0.5).map_err(|e| e.to_string())?;
    let ba = rules
        .iter()
        .find(|r| r.antecedent == ["b"] && r.consequent == ["a"])
        .ok_or("no rule b -> a")?;
    ensure!(ba.confidence == 1.0 && ba.lift == 1.0, "b -> a: conf {} lift {}", ba.confidence, ba.lift);
    Ok(format!("50 instances ({total} rules) equal to enumeration, b->a conf 1 lift 1"))
}

fn sunburst() -> Outcome {
    let maps = MappingSet::bundled();
    let csv = |rows: &str| {
        let text = format!("Title,Document Type,Source Title,Publication Year,Citations\n{rows}");
        parse_dataset(text.as_bytes(), SourceKind::Custom, &maps).map_err(|e| e.to_string())
    };
    let mut r = rng(13);
    for i in 0..1000 {
        let ds = random_sunburst_dataset(&mut r);
        let res = build_sunburst(&ds, None).map_err(|e| format!("dataset {i}: {e}"))?;
        let included = ds
            .records
            .iter()
            .filter(|r| r.document_type.is_some() && r.source_title.is_some() && r.publication_year.is_some())
            .count();
        ensure!(res.root.count == included, "dataset {i}: root {} of {included} rows", res.root.count);
        let mut bad = None;
        res.root.walk(&mut |node, _| {
            if node.is_leaf() || bad.is_some() {
                return;
            }
            let means = node.children.iter().map(|c| c.mean_citations());
            let (lo, hi) = means.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), m| (lo.min(m), hi.max(m)));
            let sum: usize = node.children.iter().map(|c| c.count).sum();
            if node.value < lo - 1e-9 || node.value > hi + 1e-9 || sum != node.count {
                bad = Some(node.label.clone());
            }
        });
        ensure!(bad.is_none(), "dataset {i}: node {:?} breaks count or mean bounds", bad.unwrap_or_default());
    }

    let hand = build_sunburst(&csv("a,Article,J,2020,5\nb,Article,J,2020,15\nc,Article,J,2021,0\nd,Article,J,2021,0\ne,Article,J,2021,0\n")?, None)
        .map_err(|e| e.to_string())?;
    let source = &hand.root.children[0].children[0];
    ensure!((source.value - 4.0).abs() < 1e-12, "parent value {}", source.value);

    let single = build_sunburst(&csv("a,Article,J,2020,7\n")?, None).map_err(|e| e.to_string())?;
    let mut values = Vec::new();
    single.root.walk(&mut |n, _| values.push(n.value));
    ensure!(values == [7.0; 4], "single document values {values:?}");
    Ok("1000 random datasets, parent 4.0, single document 7.0 on all 4 levels".into())
}

struct Api {
    router: Router,
}

impl Api {
    async fn send(&self, req: Request<Body>) -> (StatusCode, Vec<u8>) {
        let resp = self.router.clone().oneshot(req).await.expect("router is infallible");
        let status = resp.status();
        let bytes = resp.into_body().collect().await.map(|b| b.to_bytes().to_vec()).unwrap_or_default();
        (status, bytes)
    }

    async fn json(&self, req: Request<Body>) -> (StatusCode, Value) {
        let (status, bytes) = self.send(req).await;
        (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
    }

    async fn get(&self, uri: &str) -> (StatusCode, Vec<u8>) {
        self.send(Request::get(uri).body(Body::empty()).expect("request")).await
    }

    async fn upload(&self, filename: &str, content: &[u8]) -> Result<Value, String> {
        let boundary = "acceptance-boundary";
        let mut body = format!(
            "--{boundary}\r\nContent-Disposition: form-data; name=\"file\"; filename=\"{filename}\"\r\n\r\n"
        )
        .into_bytes();
        body.extend_from_slice(content);
        body.extend_from_slice(format!("\r\n--{boundary}--\r\n").as_bytes());
        let req = Request::post("/datasets")
            .header("content-type", format!("multipart/form-data; boundary={boundary}"))
            .body(Body::from(body))
            .expect("request");
        match self.json(req).await {
            (StatusCode::CREATED, body) => Ok(body),
            (status, body) => Err(format!("upload {filename}: {status} {body}")),
        }
    }

    async fn submit(&self, dataset_id: &str, analysis: &str, params: &Value) -> Result<String, String> {
        let body = json!({ "dataset_id": dataset_id, "analysis": analysis, "params": params });
        let req = Request::post("/jobs")
            .header("content-type", "application/json")
            .body(Body::from(body.to_string()))
            .expect("request");
        match self.json(req).await {
            (StatusCode::ACCEPTED, body) => Ok(body["job_id"].as_str().unwrap_or_default().to_string()),
            (status, body) => Err(format!("submit {analysis}: {status} {body}")),
        }
    }

    async fn wait(&self, job_id: &str, limit: Duration) -> Result<AnalysisJob, String> {
        let deadline = Instant::now() + limit;
        loop {
            let (_, body) = self.json(Request::get(format!("/jobs/{job_id}")).body(Body::empty()).expect("request")).await;
            let job: AnalysisJob = serde_json::from_value(body).map_err(|e| format!("job {job_id}: {e}"))?;
            if job.state.is_terminal() {
                return Ok(job);
            }
            ensure!(Instant::now() < deadline, "job {job_id} still {:?} after {limit:?}", job.state);
            tokio::time::sleep(Duration::from_millis(25)).await;
        }
    }
}

async fn service_end_to_end(work: &Path) -> Outcome {
    let config = Config {
        data_dir: work.join("data"),
        workers: 4,
        ..Config::default()
    };
    let (svc, router) = app(&config).map_err(|e| e.to_string())?;
    let api = Api { router };

    // Single job on a 1000-document corpus, timed from upload to result.
    let corpus = bibliography_csv(1000, 2024);
    let params = json!({ "k": 3, "seed": 42 });
    let started = Instant::now();
    let uploaded = api.upload("corpus.csv", corpus.as_bytes()).await?;
    let id = uploaded["dataset_id"].as_str().unwrap_or_default().to_string();
    let (status, caps) = api.json(Request::get(format!("/datasets/{id}/capabilities")).body(Body::empty()).expect("request")).await;
    ensure!(status == StatusCode::OK, "capabilities: {status}");
    ensure!(caps["topic_modeling"]["eligible"] == true, "1k corpus not eligible for topic modeling: {caps}");
    let job_id = api.submit(&id, "topic_lda", &params).await?;
    let job = api.wait(&job_id, Duration::from_secs(90)).await?;
    ensure!(job.state == JobState::Done, "lda job ended {:?}: {:?}", job.state, job.error);
    let (status, result) = api.get(&format!("/jobs/{job_id}/result")).await;
    let secs = started.elapsed().as_secs_f64();
    ensure!(status == StatusCode::OK, "result: {status}");
    ensure!(secs < 90.0, "1k-document lda round trip took {secs:.1} s");

    let (_, events) = api.get(&format!("/jobs/{job_id}/events")).await;
    let events: Vec<JobEvent> = serde_json::from_slice(&events).map_err(|e| format!("events: {e}"))?;
    check_event_log(&events)?;
    let kinds: Vec<EventKind> = events.iter().map(|e| e.kind).collect();
    ensure!(kinds == [EventKind::Queued, EventKind::Running, EventKind::Done], "event kinds {kinds:?}");

    // The CLI on the same file with the same parameters writes the same bytes.
    let input = work.join("corpus.csv");
    std::fs::write(&input, &corpus).map_err(|e| e.to_string())?;
    let out = work.join("cli-out");
    let status = Command::new(env!("CARGO_BIN_EXE_biblio"))
        .arg("lda")
        .arg(&input)
        .args(["--k", "3", "--seed", "42", "--out"])
        .arg(&out)
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(status.status.success(), "biblio lda: {}", String::from_utf8_lossy(&status.stderr));
    for name in &job.files {
        let (_, served) = api.get(&format!("/jobs/{job_id}/files/{name}")).await;
        let written = std::fs::read(out.join(name)).map_err(|e| format!("{name}: {e}"))?;
        ensure!(served == written, "{name} differs between CLI and service");
    }
    ensure!(job.files.iter().any(|f| f == "result.json"), "no result.json in {:?}", job.files);
    ensure!(std::fs::read(out.join("result.json")).ok().as_deref() == Some(&result[..]), "result.json differs");

    // Twenty concurrent jobs, each compared against a direct run.
    let scopus = fixture("scopus.csv");
    let small = api.upload("scopus.csv", &scopus).await?;
    let small_id = small["dataset_id"].as_str().unwrap_or_default().to_string();
    let ds = load_dataset(&scopus, "scopus.csv", &MappingSet::bundled()).map_err(|e| e.to_string())?;
    let api = std::sync::Arc::new(api);
    let handles: Vec<_> = (0..20u64)
        .map(|seed| {
            let (api, small_id) = (std::sync::Arc::clone(&api), small_id.clone());
            let params = json!({ "k": 3, "iterations": 60, "seed": seed });
            tokio::spawn(async move {
                let job_id = api.submit(&small_id, "topic_lda", &params).await?;
                Ok::<_, String>((params, job_id))
            })
        })
        .collect();
    let mut distinct = BTreeSet::new();
    for handle in handles {
        let (params, job_id) = handle.await.map_err(|e| e.to_string())??;
        let job = api.wait(&job_id, Duration::from_secs(120)).await?;
        ensure!(job.state == JobState::Done, "concurrent job {job_id}: {:?}", job.error);
        let (_, events) = api.get(&format!("/jobs/{job_id}/events")).await;
        let events: Vec<JobEvent> = serde_json::from_slice(&events).map_err(|e| e.to_string())?;
        check_event_log(&events)?;
        let (_, body) = api.get(&format!("/jobs/{job_id}/result")).await;
        let parsed = AnalysisParams::from_json(AnalysisKind::TopicLda, &params).map_err(|e| e.to_string())?;
        let direct = run(&ds, &parsed).map_err(|e| e.to_string())?;
        ensure!(body == direct.result_json.as_bytes(), "job with params {params} returned another job's result");
        distinct.insert(body);
    }
    ensure!(distinct.len() == 20, "only {} distinct results from 20 seeds", distinct.len());
    svc.shutdown().await;
    Ok(format!("1k-doc lda round trip {secs:.1} s, event log valid, 20 concurrent jobs clean, CLI bytes equal"))
}

fn service() -> Outcome {
    let work = tempfile::tempdir().map_err(|e| e.to_string())?;
    let rt = tokio::runtime::Builder::new_multi_thread()
        .worker_threads(4)
        .enable_all()
        .build()
        .map_err(|e| e.to_string())?;
    rt.block_on(service_end_to_end(work.path()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("parser fidelity", parser_fidelity),
        ("capability matrix", capability_matrix),
        ("stemmer conformance", stemmer_conformance),
        ("lemmatizer", lemmatizer),
        ("keywords stem", keywords_stem),
        ("lda and btm recovery", topic_recovery),
        ("c-tf-idf", class_tfidf),
        ("relevance ranking", relevance),
        ("association rules", association_rules),
        ("sunburst", sunburst),
        ("service end to end", service),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name:<22} {detail} [{secs:.1} s]"),
            Err(reason) => {
                failed += 1;
                println!("FAIL  {name:<22} {reason} [{secs:.1} s]");
            }
        }
    }
    println!("{} of {} criteria passed", 11 - failed, 11);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
