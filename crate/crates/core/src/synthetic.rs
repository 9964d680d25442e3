//! Deterministic synthetic sentencing decisions in Hebrew.
//!
//! Each generated decision mixes background sentences, the parties'
//! arguments, references to prior cases, fines, probation, procedural orders
//! and exactly one gold sentence stating the actual term. A small number of
//! cases are deliberately ambiguous: a probation order phrased like the
//! verdict follows the gold sentence and ties with it under the rule scores.

use std::collections::BTreeSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{AnnotationRecord, Decision, MetadataEntry};
use crate::error::{ApeError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub num_decisions: usize,
    pub min_sentences: usize,
    pub max_sentences: usize,
    pub num_ambiguous: usize,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            num_decisions: 40,
            min_sentences: 30,
            max_sentences: 80,
            num_ambiguous: 2,
            seed: 2024,
        }
    }
}

/// Surface pattern of the gold sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoldTemplate {
    Decomposition,
    DigitsMonths,
    DigitsYears,
    CombinedWithProbation,
    YearsInWords,
    MonthsInWords,
    UnitOnly,
    Dual,
    Half,
    Days,
    WillServe,
}

const TEMPLATES: [GoldTemplate; 11] = [
    GoldTemplate::Decomposition,
    GoldTemplate::DigitsMonths,
    GoldTemplate::DigitsYears,
    GoldTemplate::CombinedWithProbation,
    GoldTemplate::YearsInWords,
    GoldTemplate::MonthsInWords,
    GoldTemplate::UnitOnly,
    GoldTemplate::Dual,
    GoldTemplate::Half,
    GoldTemplate::Days,
    GoldTemplate::WillServe,
];

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCase {
    pub decision: Decision,
    pub filename: String,
    pub gold_index: usize,
    pub gold_months: u32,
    pub template: GoldTemplate,
    pub ambiguous: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub cases: Vec<SyntheticCase>,
}

const COURTS: [&str; 6] = [
    "המחוזי בתל אביב",
    "המחוזי בירושלים",
    "המחוזי בחיפה",
    "המחוזי בבאר שבע",
    "המחוזי בנצרת",
    "המחוזי מרכז",
];

const BACKGROUND: [&str; 24] = [
    "הנאשם הורשע על פי הודאתו בכתב אישום מתוקן במסגרת הסדר טיעון.",
    "ההסדר לא כלל הסכמה לעניין העונש.",
    "על פי עובדות כתב האישום, הנאשם הכיר את המתלוננת במסגרת עבודתו.",
    "המתלוננת פנתה למשטרה מספר ימים לאחר האירוע.",
    "בתסקיר שירות המבחן נסקרו נסיבות חייו של הנאשם.",
    "הנאשם נשוי ואב לשלושה ילדים.",
    "שירות המבחן לא בא בהמלצה טיפולית בעניינו של הנאשם.",
    "בתסקיר נפגעת העבירה תוארו הפגיעות הקשות שנגרמו למתלוננת.",
    "המתלוננת סובלת מחרדות ומקשיי שינה מאז האירוע.",
    "הנאשם נטל אחריות על מעשיו והביע חרטה.",
    "אין לחובת הנאשם הרשעות קודמות.",
    "הערכים המוגנים בעבירות אלו הם שלמות הגוף וכבוד האדם.",
    "מידת הפגיעה בערכים המוגנים היא ממשית.",
    "יש להתחשב בחלוף הזמן מאז ביצוע העבירות.",
    "הנאשם עבר הליך טיפולי ממושך ושיתף פעולה עם הגורמים המטפלים.",
    "עדי האופי תיארו את הנאשם כאדם נורמטיבי.",
    "בית המשפט שמע את דברי המתלוננת בדלתיים סגורות.",
    "הנאשם ניצל את פערי הכוחות ביניהם.",
    "העבירות בוצעו לאורך תקופה ממושכת.",
    "יש ליתן משקל להודאת הנאשם שחסכה מהמתלוננת את הצורך להעיד.",
    "מצבו הבריאותי של הנאשם אינו פשוט.",
    "הנאשם שוחרר לחלופת מעצר בפיקוח אלקטרוני.",
    "נסיבות ביצוע העבירה מלמדות על תכנון מוקדם.",
    "לא מצאתי טעם לסטות ממתחם העונש ההולם.",
];

const CITIES: [&str; 6] = ["חולון", "נתניה", "אשדוד", "עפולה", "רחובות", "טבריה"];

/// Masculine renderings for months.
const MONTH_WORDS: [(u32, &str); 8] = [
    (8, "שמונה"),
    (15, "חמישה עשר"),
    (18, "שמונה עשר"),
    (24, "עשרים וארבעה"),
    (28, "עשרים ושמונה"),
    (30, "שלושים"),
    (36, "שלושים ושישה"),
    (45, "ארבעים וחמישה"),
];

/// Feminine renderings for years.
const YEAR_WORDS: [(u32, &str); 7] = [
    (3, "שלוש"),
    (4, "ארבע"),
    (5, "חמש"),
    (6, "שש"),
    (7, "שבע"),
    (8, "שמונה"),
    (9, "תשע"),
];

fn gold_sentence(template: GoldTemplate, rng: &mut ChaCha8Rng, first: bool) -> (String, u32) {
    match template {
        GoldTemplate::Decomposition => {
            let (x, y) = if first {
                (30, 18)
            } else {
                (rng.gen_range(6..=60), rng.gen_range(6..=24))
            };
            (
                format!(
                    "אני מטיל על הנאשם את העונש הבא: {} חודשי מאסר, מתוכם ירצה הנאשם {x} חודשי מאסר בפועל והיתרה, {y} חודשים, יהיו מאסר על תנאי.",
                    x + y
                ),
                x,
            )
        }
        GoldTemplate::DigitsMonths => {
            let n = rng.gen_range(4..=72);
            (format!("אני גוזר על הנאשם {n} חודשי מאסר בפועל, בניכוי ימי מעצרו."), n)
        }
        GoldTemplate::DigitsYears => {
            let n = *[15u32, 20, 25, 12, 10].choose(rng).unwrap();
            (format!("לאור האמור, אני גוזר על הנאשם {n} שנה מאסר בפועל."), n * 12)
        }
        GoldTemplate::CombinedWithProbation => {
            let x = rng.gen_range(6..=48);
            let y = rng.gen_range(6..=18);
            (
                format!("אני גוזר על הנאשם {x} חודשי מאסר בפועל ו-{y} חודשי מאסר על תנאי."),
                x,
            )
        }
        GoldTemplate::YearsInWords => {
            let (v, w) = *YEAR_WORDS.choose(rng).unwrap();
            (format!("אני גוזר על הנאשם {w} שנות מאסר בפועל."), v * 12)
        }
        GoldTemplate::MonthsInWords => {
            let (v, w) = *MONTH_WORDS.choose(rng).unwrap();
            (format!("אני מטיל על הנאשם עונש של {w} חודשי מאסר לריצוי בפועל."), v)
        }
        GoldTemplate::UnitOnly => {
            if rng.gen_bool(0.5) {
                ("אני גוזר על הנאשם שנת מאסר בפועל.".into(), 12)
            } else {
                ("אני גוזר על הנאשם מאסר בפועל למשך שנה אחת.".into(), 12)
            }
        }
        GoldTemplate::Dual => {
            if rng.gen_bool(0.5) {
                ("אני גוזר על הנאשם שנתיים מאסר בפועל.".into(), 24)
            } else {
                ("אני גוזר על הנאשם חודשיים מאסר בפועל.".into(), 2)
            }
        }
        GoldTemplate::Half => {
            if rng.gen_bool(0.5) {
                ("אני גוזר על הנאשם שנה וחצי מאסר בפועל.".into(), 18)
            } else {
                let (v, w) = *YEAR_WORDS.choose(rng).unwrap();
                (format!("אני גוזר על הנאשם {w} שנים וחצי מאסר בפועל."), v * 12 + 6)
            }
        }
        GoldTemplate::Days => {
            let d = *[30u32, 45, 60, 90, 120].choose(rng).unwrap();
            (format!("אני גוזר על הנאשם {d} ימי מאסר בפועל."), (d + 15) / 30)
        }
        GoldTemplate::WillServe => {
            let n = rng.gen_range(4..=60);
            (format!("הנאשם ירצה {n} חודשי מאסר בפועל מיום מעצרו."), n)
        }
    }
}

fn prior_case(rng: &mut ChaCha8Rng) -> String {
    let num = rng.gen_range(1000..9999);
    let yr = rng.gen_range(5..20);
    let months = rng.gen_range(6..60);
    match rng.gen_range(0..3) {
        0 => format!(
            "ברע\"פ {num}/{yr:02} נגזרו על המערער {months} חודשי מאסר בפועל, מאסר על תנאי וקנס."
        ),
        1 => format!("(ת\"פ {num}-{yr:02}) שם נדון הנאשם ל-{months} חודשי מאסר בפועל."),
        _ => format!("בע\"פ {num}/{yr:02} הושתו על המערער {months} חודשי מאסר."),
    }
}

fn prosecution(rng: &mut ChaCha8Rng) -> String {
    let lo = rng.gen_range(12..36);
    let hi = lo + rng.gen_range(12..36);
    match rng.gen_range(0..3) {
        0 => "לפיכך, ביקשה המאשימה להשית על הנאשם עונש של מאסר בפועל ממושך, מאסר על תנאי ופיצוי משמעותי למתלוננת.".into(),
        1 => format!("המאשימה ביקשה לקבוע מתחם עונש הולם שבין {lo} ל-{hi} חודשי מאסר בפועל."),
        _ => format!("באת כוח המאשימה עתרה להטיל על הנאשם {hi} חודשי מאסר."),
    }
}

fn defense(rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(3..12);
    match rng.gen_range(0..2) {
        0 => format!("ההגנה טענה כי יש להסתפק ב-{n} חודשי מאסר שירוצו בעבודות שירות."),
        _ => "הסנגור ביקש להימנע מהטלת מאסר בפועל.".into(),
    }
}

fn probation(rng: &mut ChaCha8Rng) -> String {
    let y = rng.gen_range(6..=18);
    format!("בנוסף, {y} חודשי מאסר על תנאי, והתנאי הוא שהנאשם לא יעבור עבירת מין במשך 3 שנים מיום שחרורו.")
}

fn ambiguous_probation(rng: &mut ChaCha8Rng) -> String {
    let y = rng.gen_range(6..=18);
    format!("כמו כן, אני גוזר על הנאשם {y} חודשי מאסר על תנאי לבל יעבור עבירת מין.")
}

fn fine(rng: &mut ChaCha8Rng) -> String {
    let amount = rng.gen_range(2..=40) * 1000;
    let days = rng.gen_range(1..=6) * 15;
    if rng.gen_bool(0.5) {
        format!("קנס בסך {} ש\"ח או {days} ימי מאסר תמורתו.", group(amount))
    } else {
        format!("אני מטיל על הנאשם קנס בסך {} ש\"ח או {days} ימי מאסר תמורתו.", group(amount))
    }
}

fn procedural(rng: &mut ChaCha8Rng) -> String {
    if rng.gen_bool(0.5) {
        format!("המאסר בפועל יחל ביום {}.", rng.gen_range(1..=31))
    } else {
        format!(
            "הנאשם יתייצב לריצוי מאסרו ביום {}.{}.{} עד השעה 10:00 בבית המעצר ניצן.",
            rng.gen_range(1..=28),
            rng.gen_range(1..=12),
            rng.gen_range(2010..=2023)
        )
    }
}

fn group(n: u32) -> String {
    if n >= 1000 {
        format!("{},{:03}", n / 1000, n % 1000)
    } else {
        n.to_string()
    }
}

/// Generates the corpus for `config`. The first case always carries the
/// 48 = 30 + 18 decomposition.
pub fn generate(config: &SyntheticConfig) -> SyntheticCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = config.num_decisions;
    // Ambiguous cases are spread over the back half of the corpus.
    let ambiguous: BTreeSet<usize> = (0..config.num_ambiguous.min(n))
        .map(|k| n - 1 - k * (n / (2 * config.num_ambiguous.max(1))).max(1))
        .collect();
    let mut cases = Vec::with_capacity(n);
    for i in 0..n {
        let case_id = format!("syn-{:03}", i + 1);
        let template = if i == 0 {
            GoldTemplate::Decomposition
        } else if ambiguous.contains(&i) {
            GoldTemplate::DigitsMonths
        } else {
            TEMPLATES[i % TEMPLATES.len()]
        };
        let target = rng.gen_range(config.min_sentences..=config.max_sentences);
        let court = COURTS[rng.gen_range(0..COURTS.len())];
        let year = rng.gen_range(2005..=2020);

        let mut head = vec![
            format!("בית המשפט {court}."),
            format!("גזר דין בעניינו של נאשם תושב {}.", CITIES.choose(&mut rng).unwrap()),
        ];
        let mut args = vec![prosecution(&mut rng), defense(&mut rng)];
        for _ in 0..rng.gen_range(1..=3) {
            args.push(prior_case(&mut rng));
        }
        if rng.gen_bool(0.5) {
            let lo = rng.gen_range(6..24);
            args.push(format!("מתחם העונש ההולם נע בין {lo} ל-{} חודשי מאסר.", lo + 24));
        }
        args.shuffle(&mut rng);

        let (gold_text, gold_months) = gold_sentence(template, &mut rng, i == 0);
        let mut verdict = vec![
            "לאחר ששקלתי את מכלול השיקולים, החלטתי לגזור על הנאשם את העונשים הבאים.".to_string(),
            gold_text,
        ];
        let is_ambiguous = ambiguous.contains(&i);
        if is_ambiguous {
            verdict.push(ambiguous_probation(&mut rng));
        } else if !matches!(template, GoldTemplate::Decomposition | GoldTemplate::CombinedWithProbation) {
            verdict.push(probation(&mut rng));
        }
        verdict.push(fine(&mut rng));
        verdict.push(format!("הנאשם יפצה את המתלוננת בסך {} ש\"ח.", group(rng.gen_range(5..=80) * 1000)));
        verdict.push(procedural(&mut rng));
        verdict.push("זכות ערעור לבית המשפט העליון תוך 45 ימים מהיום.".into());

        let fixed = head.len() + args.len() + verdict.len();
        let mut body: Vec<String> = Vec::new();
        let mut pool: Vec<&str> = BACKGROUND.to_vec();
        while fixed + body.len() < target {
            if pool.is_empty() {
                pool = BACKGROUND.to_vec();
            }
            let k = rng.gen_range(0..pool.len());
            body.push(pool.swap_remove(k).to_string());
        }
        // Split background between facts and the sentencing considerations.
        let cut = body.len() / 2;
        let considerations = body.split_off(cut);

        let mut sentences = Vec::new();
        sentences.append(&mut head);
        sentences.extend(body);
        sentences.extend(args);
        sentences.extend(considerations);
        let gold_index = sentences.len() + 1;
        sentences.extend(verdict);

        let raw_text = sentences
            .chunks(4)
            .map(|c| c.join(" "))
            .collect::<Vec<_>>()
            .join("\n\n");
        let decision = Decision::new(case_id.clone(), year, court, raw_text + "\n");
        debug_assert_eq!(decision.sentences.len(), sentences.len());
        cases.push(SyntheticCase {
            filename: format!("{case_id}.txt"),
            decision,
            gold_index,
            gold_months,
            template,
            ambiguous: is_ambiguous,
        });
    }
    SyntheticCorpus { cases }
}

impl SyntheticCorpus {
    pub fn decisions(&self) -> Vec<Decision> {
        self.cases.iter().map(|c| c.decision.clone()).collect()
    }

    pub fn metadata(&self) -> Vec<MetadataEntry> {
        self.cases
            .iter()
            .map(|c| MetadataEntry {
                filename: c.filename.clone(),
                case_id: c.decision.case_id.clone(),
                year: c.decision.year,
                court: c.decision.court.clone(),
            })
            .collect()
    }

    /// One record per sentence of every decision.
    pub fn annotations(&self) -> Vec<AnnotationRecord> {
        self.cases
            .iter()
            .flat_map(|c| {
                c.decision.sentences.iter().map(move |s| AnnotationRecord {
                    case_id: c.decision.case_id.clone(),
                    sentence_index: s.index,
                    is_punishment: s.index == c.gold_index,
                    months: (s.index == c.gold_index).then_some(c.gold_months),
                })
            })
            .collect()
    }

    pub fn ambiguous_ids(&self) -> BTreeSet<String> {
        self.cases
            .iter()
            .filter(|c| c.ambiguous)
            .map(|c| c.decision.case_id.clone())
            .collect()
    }

    pub fn annotations_jsonl(&self) -> String {
        self.annotations()
            .iter()
            .map(|a| serde_json::to_string(a).expect("annotation serializes") + "\n")
            .collect()
    }

    /// The files of the on-disk bundle, as `(relative path, contents)`.
    pub fn files(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = self
            .cases
            .iter()
            .map(|c| (c.filename.clone(), c.decision.raw_text.clone()))
            .collect();
        out.push((
            "metadata.json".into(),
            serde_json::to_string_pretty(&self.metadata()).expect("metadata serializes") + "\n",
        ));
        out.push(("annotations.jsonl".into(), self.annotations_jsonl()));
        out.push((
            "ambiguous.json".into(),
            serde_json::to_string_pretty(&self.ambiguous_ids()).expect("ids serialize") + "\n",
        ));
        out
    }

    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| ApeError::io(dir, e))?;
        for (name, contents) in self.files() {
            let path = dir.join(name);
            std::fs::write(&path, contents).map_err(|e| ApeError::io(&path, e))?;
        }
        Ok(())
    }
}

/// A sentence with its expected outcome under the rule-based pipeline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BehaviorCase {
    pub description: &'static str,
    pub text: &'static str,
    /// Months of the actual term; `None` when the sentence must not be selected.
    pub expected_months: Option<u32>,
}

/// Hebrew renderings of typical sentence kinds found near the verdict.
pub fn behavioral_suite() -> Vec<BehaviorCase> {
    vec![
        BehaviorCase {
            description: "prosecution request without numbers",
            text: "לפיכך, ביקשה המאשימה להשית על הנאשם עונש של מאסר בפועל ממושך, מאסר על תנאי ופיצוי משמעותי למתלוננת.",
            expected_months: None,
        },
        BehaviorCase {
            description: "reference to a prior case",
            text: "כך למשל ברע\"פ 1049/12 פלוני נ' מדינת ישראל הורשע המערער בביצוע מעשה מגונה בנכדתו בת ה-9, ובגין כך נגזרו עליו 12 חודשי מאסר בפועל, מאסר על תנאי וקנס בסך 40,000 ש\"ח.",
            expected_months: None,
        },
        BehaviorCase {
            description: "total term split into actual and conditional",
            text: "אני מטיל על הנאשם את העונש הבא: 48 חודשי מאסר, מתוכם ירצה הנאשם 30 חודשי מאסר בפועל והיתרה, 18 חודשים, יהיו מאסר על תנאי.",
            expected_months: Some(30),
        },
        BehaviorCase {
            description: "procedural order",
            text: "המאסר בפועל יחל ביום 31.",
            expected_months: None,
        },
        BehaviorCase {
            description: "fine with alternative imprisonment",
            text: "קנס בסך 5,000 ש\"ח או 30 ימי מאסר תמורתו.",
            expected_months: None,
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape() {
        let cfg = SyntheticConfig::default();
        let corpus = generate(&cfg);
        assert_eq!(corpus.cases.len(), 40);
        for c in &corpus.cases {
            let n = c.decision.sentences.len();
            assert!((cfg.min_sentences..=cfg.max_sentences).contains(&n), "{} has {n}", c.decision.case_id);
            assert!(c.decision.sentences[c.gold_index].text.contains("מאסר"));
        }
        assert_eq!(corpus.ambiguous_ids().len(), 2);
        assert_eq!(corpus.cases[0].gold_months, 30);
        assert_eq!(corpus.annotations().iter().filter(|a| a.is_punishment).count(), 40);
    }

    #[test]
    fn deterministic() {
        let cfg = SyntheticConfig::default();
        assert_eq!(generate(&cfg), generate(&cfg));
        let other = generate(&SyntheticConfig { seed: 1, ..cfg });
        assert_ne!(other.cases[1].decision.raw_text, generate(&SyntheticConfig::default()).cases[1].decision.raw_text);
    }

    #[test]
    fn bundled_copy_is_current() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/synthetic");
        for (name, contents) in generate(&SyntheticConfig::default()).files() {
            let on_disk = std::fs::read_to_string(dir.join(&name))
                .unwrap_or_else(|e| panic!("{name}: {e}; regenerate with the generate_synthetic_corpus example"));
            assert_eq!(on_disk, contents, "{name} is stale");
        }
    }
}
