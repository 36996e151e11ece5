use std::collections::HashMap;
use std::io::Cursor;

use fgf_core::embeddings::{
    aggregate_subcom, cosine, embed_text, hash_embed, ngrams, read_embeddings, similarity_std,
    softmax, tfidf, tokenize, train_sgns, write_embeddings, AggregateOptions, DocumentFrequencies,
    Embedder, EmbeddingTable, HashEmbedder, SgnsConfig, TfidfStats,
};
use fgf_core::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn component_name_bigrams() {
    let toks = tokenize("Propeller Shaft Bearing, Housing.");
    assert_eq!(toks, ["propeller", "shaft", "bearing", "housing"]);
    let grams = ngrams(&toks, 2);
    assert_eq!(grams.len(), toks.len() - 1);
    assert_eq!(grams[1], ["shaft", "bearing"]);
    assert_eq!(ngrams(&toks, 5), vec![toks.clone()]);
}

#[test]
fn tfidf_reference_value() {
    // tf 2, df 9 of 100 documents
    assert!((tfidf(2.0, 9, 100) - 2.0 * 10f64.ln()).abs() < 1e-12);
    assert!((tfidf(2.0, 9, 100) - 4.605_17).abs() < 1e-5);
    assert_eq!(tfidf(3.0, 9, 10), 0.0);
}

struct Lookup(HashMap<String, Vec<f64>>);

impl Embedder for Lookup {
    fn dim(&self) -> usize {
        3
    }
    fn embed(&self, token: &str) -> Vec<f64> {
        self.0[token].clone()
    }
}

#[test]
fn trigram_aggregate_matches_hand_computation() {
    let samples = vec![
        vec!["a", "b", "c", "d"],
        vec!["a", "x"],
        vec!["b", "y"],
        vec!["z"],
        vec!["w"],
        vec!["v"],
    ];
    let df = DocumentFrequencies::from_samples(&samples);
    let vec_of = |t: &str| -> Vec<f64> {
        match t {
            "a" => vec![1.0, 0.0, 0.0],
            "b" => vec![0.0, 2.0, 0.0],
            "c" => vec![0.0, 0.0, 3.0],
            _ => vec![1.0, 1.0, 1.0],
        }
    };
    let e = Lookup(
        ["a", "b", "c", "d"]
            .iter()
            .map(|t| (t.to_string(), vec_of(t)))
            .collect(),
    );
    let tokens = ["a", "b", "c", "d"];
    let stats = TfidfStats::for_sample(&tokens, &df);

    // weights: tf 1 each, N = 6, df(a) = df(b) = 2, df(c) = df(d) = 1
    let wt = |t: &str| {
        let d = if t == "a" || t == "b" { 2.0 } else { 1.0 };
        (6.0f64 / (d + 1.0)).ln()
    };
    let grams = [["a", "b", "c"], ["b", "c", "d"]];
    let mut num = [0.0; 3];
    let mut den = 0.0;
    for g in grams {
        let w: f64 = g.iter().map(|t| wt(t)).sum::<f64>() / 3.0;
        for k in 0..3 {
            num[k] += w * g.iter().map(|t| vec_of(t)[k]).sum::<f64>() / 3.0;
        }
        den += w;
    }
    let mean: Vec<f64> = num.iter().map(|x| x / den).collect();
    let exps: Vec<f64> = mean.iter().map(|x| x.exp()).collect();
    let s: f64 = exps.iter().sum();
    let want: Vec<f64> = exps.iter().map(|x| x / s).collect();

    let got = aggregate_subcom(
        &tokens,
        &e,
        &stats,
        AggregateOptions {
            n: 3,
            softmax: true,
        },
    );
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() < 1e-12, "{got:?} vs {want:?}");
    }
    let raw = aggregate_subcom(
        &tokens,
        &e,
        &stats,
        AggregateOptions {
            n: 3,
            softmax: false,
        },
    );
    for (g, w) in raw.iter().zip(&mean) {
        assert!((g - w).abs() < 1e-12);
    }
}

#[test]
fn cancelling_weights_fall_back_to_plain_mean() {
    // tokens outside the sample carry zero weight
    let df = DocumentFrequencies::from_samples(&[vec!["q"]]);
    let stats = TfidfStats::for_sample(&["q"], &df);
    assert!(stats.weight("zz") == 0.0);
    let e = Lookup(
        [
            ("zz".to_string(), vec![1.0, 2.0, 3.0]),
            ("yy".to_string(), vec![3.0, 2.0, 1.0]),
        ]
        .into(),
    );
    let out = aggregate_subcom(
        &["zz", "yy"],
        &e,
        &stats,
        AggregateOptions {
            n: 1,
            softmax: false,
        },
    );
    assert_eq!(out, vec![2.0, 2.0, 2.0]);
}

#[test]
fn sgns_groups_tokens_sharing_contexts() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let corpus: Vec<Vec<String>> = (0..600)
        .map(|i| {
            let (heads, ctx) = match i % 2 {
                0 => (["pump", "compressor"], ["seal", "leak", "pressure"]),
                _ => (["radar", "sonar"], ["signal", "antenna", "echo"]),
            };
            let head = heads[rng.gen_range(0..2)];
            let mut s: Vec<String> = ctx.iter().map(|c| c.to_string()).collect();
            s.insert(rng.gen_range(0..=3), head.into());
            s
        })
        .collect();
    for seed in 0..5 {
        let cfg = SgnsConfig {
            dim: 20,
            window: 3,
            epochs: 5,
            seed,
            ..SgnsConfig::default()
        };
        let t = train_sgns(&corpus, &cfg).unwrap();
        let c = |a: &str, b: &str| cosine(t.get(a).unwrap(), t.get(b).unwrap()).unwrap();
        let same = c("pump", "compressor");
        let cross = c("pump", "sonar");
        assert!(same > cross + 0.3, "seed {seed}: {same} vs {cross}");
    }
}

#[test]
fn sgns_is_deterministic() {
    let corpus = vec![vec!["a", "b", "c"], vec!["b", "c", "d"]];
    let cfg = SgnsConfig {
        dim: 8,
        seed: 3,
        ..SgnsConfig::default()
    };
    assert_eq!(
        train_sgns(&corpus, &cfg).unwrap(),
        train_sgns(&corpus, &cfg).unwrap()
    );
}

#[test]
fn hash_vectors_are_near_orthogonal() {
    let vs: Vec<Vec<f64>> = (0..1000)
        .map(|i| hash_embed(&format!("tok{i}"), 384, 0))
        .collect();
    let mut worst = 0.0f64;
    for i in 0..vs.len() {
        assert!((vs[i].iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        for j in i + 1..vs.len() {
            worst = worst.max(cosine(&vs[i], &vs[j]).unwrap().abs());
        }
    }
    assert!(worst < 0.6, "{worst}");
    assert_eq!(hash_embed("x", 16, 1), hash_embed("x", 16, 1));
    assert_ne!(hash_embed("x", 16, 1), hash_embed("x", 16, 2));
}

#[test]
fn table_file_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut t = EmbeddingTable::new(384, "sentence").unwrap();
    for i in 0..50 {
        t.insert(
            format!("FM-{i:03}"),
            (0..384).map(|_| rng.gen_range(-1e3..1e3)).collect(),
        )
        .unwrap();
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.emb");
    write_embeddings(&t, &path).unwrap();
    let back = read_embeddings(&path).unwrap();
    assert_eq!(back, t);
    assert_eq!(back.len(), 50);
    assert_eq!(back.field(), "sentence");
}

#[test]
fn truncated_row_names_its_row() {
    let text = "#dim=3 field=x\na\t1 2 3\nb\t1 2\n";
    let err = EmbeddingTable::parse(Cursor::new(text), "t.emb").unwrap_err();
    assert!(matches!(err, Error::Format { row: 3, .. }), "{err}");
}

#[test]
fn text_embedding_is_token_mean() {
    let e = HashEmbedder::new(8, 0);
    let got = embed_text("Leak, seal", &e);
    let a = e.embed("leak");
    let b = e.embed("seal");
    for k in 0..8 {
        assert!((got[k] - (a[k] + b[k]) / 2.0).abs() < 1e-15);
    }
    assert_eq!(embed_text("...", &e), vec![0.0; 8]);
}

#[test]
fn identical_vectors_have_no_similarity_spread() {
    let v = vec![vec![1.0, 2.0]; 5];
    assert_eq!(similarity_std(&v), 0.0);
    let spread = similarity_std(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]]);
    // cosines 0, 1, 0
    assert!((spread - (2.0f64 / 9.0).sqrt()).abs() < 1e-12);
}

proptest! {
    #[test]
    fn softmax_is_a_distribution(v in prop::collection::vec(-50.0f64..50.0, 1..20)) {
        let s = softmax(&v);
        prop_assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(s.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn aggregate_output_sums_to_one(
        toks in prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d"]), 0..8),
        n in 1usize..4,
    ) {
        let e = HashEmbedder::new(6, 9);
        let df = DocumentFrequencies::from_samples(&[toks.clone(), vec!["a"], vec!["b", "c"]]);
        let stats = TfidfStats::for_sample(&toks, &df);
        let out = aggregate_subcom(&toks, &e, &stats, AggregateOptions { n, softmax: true });
        prop_assert_eq!(out.len(), 6);
        prop_assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ngram_count(len in 0usize..12, n in 1usize..5) {
        let toks: Vec<String> = (0..len).map(|i| format!("t{i}")).collect();
        let g = ngrams(&toks, n);
        let want = if len == 0 { 0 } else if len < n { 1 } else { len - n + 1 };
        prop_assert_eq!(g.len(), want);
    }
}
