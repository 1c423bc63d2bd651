use diamond_core::hecke::{check_all, CheckOptions, DotMode};
use diamond_core::presentation::{
    parse_presentation, preset, PresentationError, PresentationFile, System, PRESETS,
};
use diamond_core::word::{bergman_check, BergmanOptions};

#[test]
fn presets_round_trip() {
    for (name, src) in PRESETS {
        let a = PresentationFile::parse(src).unwrap();
        let b = PresentationFile::parse(&a.to_toml().unwrap()).unwrap();
        assert_eq!(a, b, "{name}");
        assert_eq!(preset(name).unwrap().name(), *name);
    }
}

#[test]
fn reports_are_deterministic() {
    for (name, _) in PRESETS {
        let render = || match preset(name).unwrap().system {
            System::WordRewrite(s) => bergman_check(&s, &BergmanOptions::default())
                .unwrap()
                .to_json(&s)
                .to_string(),
            System::Hecke(p) => check_all(&p, DotMode::Generators, CheckOptions::default())
                .unwrap()
                .to_json(false)
                .to_string(),
        };
        assert_eq!(render(), render(), "{name}");
    }
}

fn schema_field(src: &str) -> String {
    match parse_presentation(src) {
        Err(PresentationError::Schema { field, .. }) => field,
        other => panic!("expected a schema error, got {other:?}"),
    }
}

#[test]
fn schema_errors_name_the_field() {
    let word = r#"
version = 1
name = "t"
kind = "word-rewrite"
alphabet = ["x", "y"]
order = { kind = "deglex", precedence = ["x", "y"] }
rules = [{ lhs = "yx", rhs = "xy + q" }]
"#;
    assert_eq!(schema_field(word), "rules[0]");
    let ok = word.replace("+ q", "+ 1");
    assert!(parse_presentation(&ok).is_ok());
    assert_eq!(
        schema_field(&ok.replace("version = 1", "version = 2")),
        "version"
    );
    assert_eq!(
        schema_field(&ok.replace("[\"x\", \"y\"] }", "[\"x\"] }")),
        "order.precedence"
    );
    assert_eq!(schema_field(&format!("{ok}colors = [\"i\"]\n")), "colors");

    let hecke = preset_text("nilhecke");
    assert_eq!(
        schema_field(&format!("alphabet = [\"s\"]\n{hecke}")),
        "alphabet"
    );
}

fn preset_text(name: &str) -> &'static str {
    PRESETS.iter().find(|(n, _)| *n == name).unwrap().1
}

#[test]
fn malformed_files_are_rejected() {
    // unknown keys, broken syntax and wrong types are all TOML errors
    for src in [
        "version = 1\nname = \"x\"\nkind = \"hecke\"\nflavour = 3\n",
        "version = 1\nname = \"x\"\nkind = \"hecke\"\ncolors = [\n",
        "version = \"one\"\nname = \"x\"\nkind = \"hecke\"\n",
        "version = 1\nname = \"x\"\nkind = \"groups\"\n",
    ] {
        assert!(
            matches!(parse_presentation(src), Err(PresentationError::Toml(_))),
            "{src}"
        );
    }
    let e = parse_presentation("version = 1\nname = \"x\"\nkind = \"hecke\"\ncolors = [\n")
        .unwrap_err();
    assert!(e.to_string().contains("line"), "{e}");
}

#[test]
fn hecke_validation_reaches_the_file() {
    let zero = preset_text("coxeter").replace("lambda = \"1\"", "lambda = \"0\"");
    assert!(matches!(
        parse_presentation(&zero),
        Err(PresentationError::Hecke(_))
    ));
    let no_braid = preset_text("coxeter")
        .split("[[relations.braid]]")
        .next()
        .unwrap()
        .to_string();
    assert!(matches!(
        parse_presentation(&no_braid),
        Err(PresentationError::Hecke(_))
    ));
}
