use biblio_core::textprep::{lemmatize_token, Lemmatizer};

fn curated() -> Vec<(&'static str, &'static str)> {
    include_str!("data/curated_lemmas.tsv")
        .lines()
        .map(|l| l.split_once('\t').expect("word<TAB>lemma"))
        .collect()
}

#[test]
fn curated_list() {
    let pairs = curated();
    assert_eq!(pairs.len(), 50);
    let wrong: Vec<String> = pairs
        .iter()
        .filter(|(w, l)| lemmatize_token(w) != *l)
        .map(|(w, l)| format!("{w} -> {} (expected {l})", lemmatize_token(w)))
        .collect();
    assert!(wrong.is_empty(), "{wrong:#?}");
}

#[test]
fn curated_irregulars_come_from_the_tables() {
    let lem = Lemmatizer::bundled();
    let table: std::collections::HashMap<&str, &str> =
        lem.noun_exceptions().chain(lem.verb_exceptions()).collect();
    for (w, l) in &curated()[1..37] {
        assert_eq!(table.get(w), Some(l), "{w}");
    }
}

#[test]
fn every_base_form_is_a_fixpoint() {
    let lem = Lemmatizer::bundled();
    let moved: Vec<&str> = lem.baseforms().filter(|w| lem.lemmatize(w) != *w).take(10).collect();
    assert!(moved.is_empty(), "{moved:?}");
    assert!(lem.baseforms().count() > 60_000);
}

#[test]
fn lemmas_are_stable() {
    let lem = Lemmatizer::bundled();
    for (w, _) in curated() {
        let once = lem.lemmatize(w);
        assert_eq!(lem.lemmatize(&once), once, "{w}");
    }
}
