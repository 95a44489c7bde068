//! Rule-based polarity scores for a handful of sentences.

use tweetlens::sentiment::{normalize, polarity, SentimentLexicon, RULES};

fn main() {
    let lexicon = SentimentLexicon::vader();
    for text in [
        "The new consolidation centre is good.",
        "The new consolidation centre is VERY good!!!",
        "The new consolidation centre is not good.",
        "Deliveries were late, but the drivers were kind and helpful.",
        "At least the traffic wasn't horrible today.",
        "Congestion charge starts Monday.",
    ] {
        let s = polarity(text, &lexicon);
        println!(
            "{:+.4} {:<8} neg {:.3} neu {:.3} pos {:.3}  {text}",
            s.compound, s.label, s.negative, s.neutral, s.positive
        );
    }
    println!("normalize(15) = {:.4}", normalize(15.0, RULES.alpha));
}
