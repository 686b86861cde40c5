//! Seeded synthetic datasets: a LUBM-shaped university graph and a small
//! Wikidata-shaped graph for the entity queries.

use std::io::{self, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rdfdist::query::RDF_TYPE;
use rdfdist::rdf_io::{Term, TermTriple};

pub const LUBM_NS: &str = "http://swat.cse.lehigh.edu/onto/univ-bench.owl#";
pub const ENTITY_NS: &str = "http://www.wikidata.org/entity/";

/// Subject of the injected hub.
pub const HUB_IRI: &str = "http://www.Hub.edu/hub";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSpec {
    pub universities: usize,
    pub seed: u64,
    /// When set, adds one subject holding at least this share of all triples.
    pub hub_fraction: Option<f64>,
}

impl GeneratorSpec {
    pub fn new(universities: usize, seed: u64) -> Self {
        Self { universities, seed, hub_fraction: None }
    }

    pub fn with_hub(mut self, fraction: f64) -> Self {
        self.hub_fraction = Some(fraction);
        self
    }
}

fn iri(s: &str) -> Term {
    Term::iri(s).expect("generated IRIs are valid")
}

fn lubm(local: &str) -> Term {
    iri(&format!("{LUBM_NS}{local}"))
}

struct Out {
    triples: Vec<TermTriple>,
    rdf_type: Term,
}

impl Out {
    fn add(&mut self, s: &Term, p: &str, o: &Term) {
        self.triples.push(TermTriple::new(s.clone(), lubm(p), o.clone()));
    }

    fn typed(&mut self, s: &Term, class: &str) {
        self.triples.push(TermTriple::new(s.clone(), self.rdf_type.clone(), lubm(class)));
    }
}

pub fn university_iri(i: usize) -> String {
    format!("http://www.University{i}.edu")
}

/// Universities, departments, faculty, courses and students. Every
/// professor works for a department; one professor per department is also
/// a Chair. Graduate students have an advisor, an undergraduate degree from
/// a random university and often take a course their advisor teaches.
pub fn generate_lubm(spec: &GeneratorSpec) -> Vec<TermTriple> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Out { triples: Vec::new(), rdf_type: iri(RDF_TYPE) };
    let unis: Vec<Term> = (0..spec.universities).map(|i| iri(&university_iri(i))).collect();
    for (u, uni) in unis.iter().enumerate() {
        out.typed(uni, "University");
        for d in 0..rng.gen_range(4..=6) {
            let base = format!("http://www.Department{d}.University{u}.edu");
            let dept = iri(&base);
            out.typed(&dept, "Department");
            out.add(&dept, "subOrganizationOf", uni);

            let mut faculty = Vec::new();
            let mut professors = Vec::new();
            for (class, count) in [
                ("FullProfessor", rng.gen_range(2..=3)),
                ("AssociateProfessor", rng.gen_range(2..=3)),
                ("AssistantProfessor", rng.gen_range(1..=2)),
                ("Lecturer", rng.gen_range(1..=3)),
            ] {
                for n in 0..count {
                    let f = iri(&format!("{base}/{class}{n}"));
                    out.typed(&f, class);
                    out.typed(&f, "Faculty");
                    out.add(&f, "worksFor", &dept);
                    out.add(&f, "name", &Term::plain_literal(&format!("{class}{n}")));
                    if class != "Lecturer" {
                        professors.push(f.clone());
                    }
                    faculty.push(f);
                }
            }
            out.typed(&professors[0], "Chair");

            let mut courses = Vec::new();
            let mut grad_courses = Vec::new();
            let n_courses = rng.gen_range(10..=15);
            for c in 0..n_courses {
                let graduate = c < n_courses / 3;
                let course = iri(&format!("{base}/{}{c}", if graduate { "GraduateCourse" } else { "Course" }));
                if graduate {
                    out.typed(&course, "GraduateCourse");
                }
                out.typed(&course, "Course");
                let teacher = &faculty[c % faculty.len()];
                out.add(teacher, "teacherOf", &course);
                let pair = (teacher.clone(), course.clone());
                if graduate {
                    grad_courses.push(pair);
                } else {
                    courses.push(pair);
                }
            }

            for s in 0..rng.gen_range(40..=60) {
                let st = iri(&format!("{base}/UndergraduateStudent{s}"));
                out.typed(&st, "UndergraduateStudent");
                out.typed(&st, "Student");
                out.add(&st, "memberOf", &dept);
                out.add(&st, "name", &Term::plain_literal(&format!("UndergraduateStudent{s}")));
                let n_taken = rng.gen_range(2..=4);
                for (_, c) in courses.choose_multiple(&mut rng, n_taken) {
                    out.add(&st, "takesCourse", c);
                }
                if rng.gen_ratio(1, 5) {
                    out.add(&st, "advisor", professors.choose(&mut rng).unwrap());
                }
            }

            for s in 0..rng.gen_range(12..=20) {
                let st = iri(&format!("{base}/GraduateStudent{s}"));
                out.typed(&st, "GraduateStudent");
                out.typed(&st, "Student");
                out.add(&st, "memberOf", &dept);
                out.add(&st, "name", &Term::plain_literal(&format!("GraduateStudent{s}")));
                let advisor = professors.choose(&mut rng).unwrap().clone();
                out.add(&st, "advisor", &advisor);
                out.add(&st, "undergraduateDegreeFrom", unis.choose(&mut rng).unwrap());
                let n_taken = rng.gen_range(1..=3);
                let mut taken: Vec<&Term> = grad_courses.choose_multiple(&mut rng, n_taken).map(|(_, c)| c).collect();
                if rng.gen_bool(0.5) {
                    if let Some((_, c)) = grad_courses.iter().chain(&courses).find(|(t, _)| *t == advisor) {
                        if !taken.contains(&c) {
                            taken.push(c);
                        }
                    }
                }
                for c in taken {
                    out.add(&st, "takesCourse", c);
                }
            }
        }
    }
    if let Some(f) = spec.hub_fraction {
        inject_hub(&mut out.triples, f);
    }
    out.triples
}

/// Appends triples from [`HUB_IRI`] to existing subjects until the hub owns
/// at least `fraction` of all triples.
pub fn inject_hub(triples: &mut Vec<TermTriple>, fraction: f64) {
    assert!((0.0..1.0).contains(&fraction), "hub fraction must be in [0, 1)");
    let n = triples.len() as f64;
    let needed = (fraction * n / (1.0 - fraction)).ceil() as usize;
    let mut targets: Vec<Term> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for t in triples.iter() {
        if seen.insert(t.subject.clone()) {
            targets.push(t.subject.clone());
        }
    }
    let hub = iri(HUB_IRI);
    let preds: Vec<Term> = (0..4).map(|i| lubm(&format!("mentions{i}"))).collect();
    for i in 0..needed {
        let o = &targets[i % targets.len()];
        let p = &preds[(i / targets.len()) % preds.len()];
        triples.push(TermTriple::new(hub.clone(), p.clone(), o.clone()));
    }
}

fn entity(local: &str) -> Term {
    iri(&format!("{ENTITY_NS}{local}"))
}

/// About `n` triples over entities `Q0..`, using the predicates of the
/// entity queries: located-in chains (P131s, P961v, P704s) and position
/// statements (P39v with a start time P580q).
pub fn random_dataset(n: usize, seed: u64) -> Vec<TermTriple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entities = (n / 4).max(8);
    let classes: Vec<Term> = (0..20).map(|c| entity(&format!("C{c}"))).collect();
    let rdf_type = iri(RDF_TYPE);
    let mut out = Vec::with_capacity(n + 8);
    let mut i = 0usize;
    while out.len() < n {
        let s = entity(&format!("Q{}", i % entities));
        let other = |rng: &mut ChaCha8Rng| entity(&format!("Q{}", rng.gen_range(0..entities)));
        if i < entities || rng.gen_bool(0.3) {
            out.push(TermTriple::new(s.clone(), rdf_type.clone(), classes.choose(&mut rng).unwrap().clone()));
        }
        for (p, prob) in [("P131s", 0.5), ("P961v", 0.35), ("P704s", 0.35), ("P39v", 0.3)] {
            if rng.gen_bool(prob) {
                out.push(TermTriple::new(s.clone(), entity(p), other(&mut rng)));
            }
        }
        if rng.gen_bool(0.3) {
            let year = rng.gen_range(1900..2020);
            let lit = Term::literal_token(format!("\"{year}-01-01\"^^<http://www.w3.org/2001/XMLSchema#date>")).unwrap();
            out.push(TermTriple::new(s, entity("P580q"), lit));
        }
        i += 1;
    }
    out.truncate(n);
    let mut seen = std::collections::HashSet::new();
    out.retain(|t| seen.insert(t.clone()));
    out
}

pub fn write_ntriples<W: Write>(mut w: W, triples: &[TermTriple]) -> io::Result<()> {
    for t in triples {
        writeln!(w, "{t}")?;
    }
    w.flush()
}
