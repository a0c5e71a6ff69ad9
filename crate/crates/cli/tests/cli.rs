use std::process::{Command, Output};

use latdisc::{build_S, Algo, Alpha, AlphaSpec, Precision};
use num_bigint::BigUint;
use proptest::prelude::*;
use serde_json::Value;

fn latdisc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latdisc")).args(args).env_remove("LATDISC_THREADS").output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn cf_prints_the_canonical_expansion() {
    let out = latdisc(&["cf", "--alpha", "13/30"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "[0;2,3,4]\n");
    assert_eq!(stdout(&latdisc(&["cf", "--alpha", "surd:0,2,1"])), "[1;overline(2)]\n");
    let table = stdout(&latdisc(&["cf", "--alpha", "surd:1,5,2", "--terms", "3"]));
    assert_eq!(table, "k,a_k,p_k,q_k\n0,1,1,1\n1,1,2,1\n2,1,3,2\n3,1,5,3\n");
}

#[test]
fn disc_row_matches_the_library() {
    let out = latdisc(&["disc", "--alpha", "surd:0,5,2", "--N", "89", "--sym", "--algo", "fast"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("N,d2sq_num,d2sq_den,d2_float"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let v =
        build_S(&Alpha::parse("surd:0,5,2").unwrap(), 89, Precision::Full).unwrap().discrepancy(Algo::Fast).unwrap();
    assert_eq!(row[0], "89");
    assert_eq!(row[1], v.d2_squared.numer().to_string());
    assert_eq!(row[2], v.d2_squared.denom().to_string());
    assert_eq!(row[3].parse::<f64>().unwrap(), v.d2());
    // 17 significant digits
    assert_eq!(row[3].split('e').next().unwrap().len(), 18);
    let quad = latdisc(&["disc", "--alpha", "surd:0,5,2", "--N", "89", "--sym", "--algo", "quad"]);
    assert_eq!(stdout(&quad), text);
}

#[test]
fn json_mirrors_csv() {
    let json: Value =
        serde_json::from_slice(&latdisc(&["disc", "--alpha", "3/7", "--N", "7", "--out", "json"]).stdout).unwrap();
    let csv = stdout(&latdisc(&["disc", "--alpha", "3/7", "--N", "7"]));
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(json["d2sq"].as_str().unwrap(), format!("{}/{}", row[1], row[2]));
    assert_eq!(json["err_bound"].as_f64(), Some(0.0));

    let est: Value = serde_json::from_slice(
        &latdisc(&["estimate", "--alpha", "surd:1,5,2", "--N", "89", "--sym", "--out", "json"]).stdout,
    )
    .unwrap();
    assert_eq!(est["K"].as_u64(), Some(10));
    assert!(est["lo"].as_f64().unwrap() <= est["hi"].as_f64().unwrap());
    assert!(est["parts"].is_object());
}

#[test]
fn exit_codes() {
    assert_eq!(latdisc(&["--bogus"]).status.code(), Some(2));
    assert_eq!(latdisc(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(latdisc(&["cf", "--alpha", "1/0"]).status.code(), Some(2));
    assert_eq!(latdisc(&["disc", "--alpha", "rule:nope", "--N", "3"]).status.code(), Some(2));
    assert_eq!(latdisc(&["estimate", "--alpha", "2/5", "--N", "9"]).status.code(), Some(2));
    // α = 2^-128 keeps no partial quotients, so no convergent reaches N
    assert_eq!(latdisc(&["estimate", "--alpha", "bits:1@128", "--N", "10"]).status.code(), Some(3));
    assert_eq!(latdisc(&["--help"]).status.code(), Some(0));
}

#[test]
fn small_corpus_passes_check_bounds() {
    let out = latdisc(&["check-bounds", "--corpus", "small"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).starts_with("check,count,skipped\n"));
}

#[test]
fn output_does_not_depend_on_threads() {
    let runs: [&[&str]; 3] = [
        &["sweep-rational", "--Q", "200", "--mode", "sample", "--M", "150", "--seed", "4"],
        &["sweep-irrational", "--N", "20000", "--M", "64", "--measure", "gauss", "--estimator", "prop1_mid"],
        &["check-bounds", "--corpus", "small", "--out", "json"],
    ];
    for args in runs {
        let base = latdisc(&[args, &["--threads", "1"]].concat());
        assert!(base.status.success());
        let other = latdisc(&[args, &["--threads", "3"]].concat());
        assert_eq!(base.stdout, other.stdout, "{args:?} with 3 threads");
        assert_eq!(base.stderr, other.stderr);
        let env = Command::new(env!("CARGO_BIN_EXE_latdisc")).args(args).env("LATDISC_THREADS", "3").output().unwrap();
        assert_eq!(base.stdout, env.stdout);
    }
}

#[test]
fn sweep_csv_and_summary() {
    let out = latdisc(&["sweep-rational", "--Q", "30", "--mode", "full"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("id,q_or_seed,stat,estimator,enclosure_width"));
    // F_30 minus 0/1 and 1/1
    assert_eq!(text.lines().count() - 1, 277);
    let summary: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(summary["n"].as_u64(), Some(277));
    assert_eq!(summary["pass"].as_bool(), Some(summary["ks"].as_f64() <= summary["threshold"].as_f64()));
}

fn spec() -> impl Strategy<Value = AlphaSpec> {
    prop_oneof![
        (any::<i64>(), 1u64..).prop_map(|(p, q)| AlphaSpec::Rational { p, q }),
        (any::<i64>(), any::<i64>(), any::<i64>()).prop_map(|(p, d, q)| AlphaSpec::Surd { p, d, q }),
        prop_oneof![Just("euler_e"), Just("tan_one"), Just("pow2_spikes"), Just("constant(3)")]
            .prop_map(|n| AlphaSpec::Rule(n.into())),
        (proptest::collection::vec(any::<u32>(), 1..9), 0u32..64).prop_map(|(words, extra)| {
            let mantissa = BigUint::new(words);
            let bits = mantissa.bits() as u32 + extra;
            AlphaSpec::Bits { mantissa, bits: bits.max(1) }
        }),
    ]
}

proptest! {
    #[test]
    fn alpha_spec_round_trips(s in spec()) {
        let text = s.to_string();
        prop_assert_eq!(text.parse::<AlphaSpec>().unwrap(), s.clone());
        prop_assert_eq!(text.parse::<AlphaSpec>().unwrap().to_string(), text);
    }
}
