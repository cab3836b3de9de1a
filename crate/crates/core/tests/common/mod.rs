#![allow(dead_code)]

pub mod reference;

use std::path::PathBuf;

use abduce::{parse_atoms, parse_kb, Atom, KnowledgeBase};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub struct CorpusKb {
    pub name: String,
    pub text: String,
    pub kb: KnowledgeBase,
    pub goal: Vec<Atom>,
}

/// Every corpus file with the goal from its `% goal:` line.
pub fn corpus() -> Vec<CorpusKb> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "kb"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let text = std::fs::read_to_string(&p).unwrap();
            let goal_line = text
                .lines()
                .find_map(|l| l.strip_prefix("% goal:"))
                .unwrap_or_else(|| panic!("{} has no goal line", p.display()));
            CorpusKb {
                name: p.file_name().unwrap().to_string_lossy().into_owned(),
                kb: parse_kb(&text).unwrap(),
                goal: parse_atoms(goal_line.trim()).unwrap(),
                text,
            }
        })
        .collect()
}

pub fn corpus_kb(name: &str) -> CorpusKb {
    corpus().into_iter().find(|c| c.name == name).unwrap()
}
