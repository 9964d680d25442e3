//! Scores every candidate sentence of a decision with the lexicon rules and
//! shows which one is selected.

use ape::corpus::Decision;
use ape::detection::{score_candidates, select_sentence_rule_based};
use ape::lexicon::{Lexicon, Tier};

fn main() {
    let lexicon = Lexicon::default_hebrew();
    let decision = Decision::from_text(
        "demo",
        "לפיכך, ביקשה המאשימה להשית על הנאשם עונש של מאסר בפועל ממושך. \
         ברע\"פ 1049/12 נגזרו על המערער 12 חודשי מאסר בפועל. \
         אני גוזר על הנאשם 30 חודשי מאסר בפועל. \
         בנוסף, 18 חודשי מאסר על תנאי. \
         קנס בסך 5,000 ש\"ח או 30 ימי מאסר תמורתו. \
         המאסר בפועל יחל ביום 31.",
    );

    println!("threshold {}", lexicon.threshold);
    for s in score_candidates(&decision, &lexicon) {
        let tiers: Vec<String> = Tier::ALL
            .iter()
            .filter(|t| s.tier_hits.count(**t) > 0)
            .map(|t| format!("{}={}", t.name(), s.tier_hits.count(*t)))
            .collect();
        println!(
            "[{}] {:>5.1}  number={} unit={} fines={} {}\n      {}",
            s.sentence_index,
            s.score,
            s.has_number,
            s.has_time_unit,
            s.fine_hits,
            tiers.join(" "),
            decision.sentences[s.sentence_index].text
        );
    }
    println!("selected: {:?}", select_sentence_rule_based(&decision, &lexicon));
}
