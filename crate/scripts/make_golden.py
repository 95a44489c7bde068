"""Score the curated sentences with the reference analyzer and write sentence TAB compound lines.

Rounding inside the reference is disabled so the fixture holds unrounded compounds.
"""
import sys
from pathlib import Path

import vaderSentiment.vaderSentiment as vs

vs.round = lambda x, n=None: x

SENTENCES = [
    "City logistics is a great opportunity for our town.",
    "The new urban consolidation centre is not good.",
    "Last mile delivery is GREAT!!!",
    "Urban freight congestion is terrible.",
    "The cargo bike pilot was very successful.",
    "Electric vans are extremely quiet and clean!",
    "This delivery was slightly late.",
    "The consolidation centre closed, a sad day for the city.",
    "Low emission zones are kind of annoying.",
    "The plan is good, but the funding is terrible.",
    "I love the new parcel lockers!",
    "Noise from night deliveries is a serious problem.",
    "Urban logistics conference starts today in Paris.",
    "Job offer: warehouse operator in Lyon.",
    "Not bad at all",
    "At least it isn't a horrible plan.",
    "The drivers never seem happy with the new rules.",
    "Delivery robots are AMAZING but expensive.",
    "No problem with the drone trial so far.",
    "The traffic was horrible and the driver was rude.",
    "Great talk on last mile logistics, thanks everyone!",
    "Why are trucks blocking the bike lane again??",
    "Pollution from diesel vans is killing our city.",
    "Smart city solutions can reduce congestion.",
    "The new regulation is hardly helpful.",
    "Fantastic results from the electric fleet trial!!",
    "Worst delivery experience ever.",
    "The cargo bikes are fun, fast and efficient.",
    "We are hiring a city logistics manager.",
    "Couldn't be happier with the urban freight study.",
    "Read our report on urban freight trends in 2016.",
    "The LEZ is a failure and nobody cares.",
    "Zero emission deliveries are the future!",
    "E-commerce growth creates new challenges for city logistics.",
    "This is not the worst idea, but it is not great either.",
    "The parcel was lost and support was useless.",
    "Really impressed by the micro hub in Berlin.",
    "Blockchain will revolutionize supply chains, maybe.",
    "The delivery was fine.",
    "Off-hour deliveries could reduce noise and stress.",
    "Autonomous trucks are scary.",
    "I am so disappointed with the courier service.",
    "Thanks for the helpful webinar on urban logistics!",
    "The city council rejected the proposal.",
    "Safety of cyclists must improve near loading zones.",
    "Sustainable logistics is a win for everyone.",
    "The warehouse fire was a disaster for the company.",
    "Nice work on the physical internet project.",
    "Freight trams are an interesting idea?",
    "The strike caused massive delays and angry customers!",
]

out = Path(sys.argv[1])
sia = vs.SentimentIntensityAnalyzer()
with out.open("w", encoding="utf-8") as f:
    f.write("# sentence\texpected_compound (reference analyzer, unrounded)\n")
    for s in SENTENCES:
        assert "\t" not in s
        f.write(f"{s}\t{sia.polarity_scores(s)['compound']!r}\n")
print(len(SENTENCES))
