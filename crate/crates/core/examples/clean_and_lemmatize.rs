//! Cleaning, stopword removal and lemmatization of a few tweets.

use tweetlens::textprep::{clean, LemmaRules, TextPipeline};

fn main() {
    let rules = LemmaRules::english();
    for word in [
        "contributed",
        "contributes",
        "contributing",
        "cities",
        "deliveries",
        "logistics",
    ] {
        println!("{word:>14} -> {}", rules.lemmatize(word));
    }

    let pipeline = TextPipeline::default();
    for tweet in [
        "RT @freightlab: Cities are testing #CargoBikes for last-mile deliveries https://t.co/abc",
        "Check https://t.co/xyz #UrbanFreight!",
        "The Physical Internet contributed to shipping efficiency",
    ] {
        println!("\n{tweet}");
        println!("  cleaned: {}", clean(tweet));
        println!("  lemmas:  {:?}", pipeline.lemmas(tweet));
    }
}
