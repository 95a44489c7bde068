"""Generate the synthetic 200-record demo corpus (JSON lines) shipped with the crate."""
import json
import random
import sys

rng = random.Random(2018)

QUERIES = [("city logistics", 0.66), ("last mile logistics", 0.19), ("urban logistics", 0.09), ("urban freight", 0.06)]

TEMPLATES = [
    "We are hiring a {role} for our {q} team in {city}! Apply now {url}",
    "Job offer: {role} ({q}) based in {city} {url}",
    "New report on {q} and {topic} in {city} {url}",
    "Great discussion about {topic} at the {q} conference in {city} #{tag}",
    "{topic} could transform {q} in {city}, very promising results",
    "Not convinced that {topic} will help {q} in {city}",
    "{topic} in {city} is a failure, congestion is worse than ever",
    "Love the new {topic} pilot in {city}! #{tag}",
    "How will {topic} change {q}? Read our analysis {url}",
    "@{user} thanks for sharing the {q} study on {topic}",
    "Delivery robots and drones: the future of {q} in {city}?",
    "The {topic} project in {city} closed due to lack of funding, sad news",
    "Electric vehicles make {q} cleaner and quieter in {city}",
    "Traffic jams and pollution: {q} needs better regulation in {city}",
    "Startup raises funds to scale {q} with {topic} #{tag} {url}",
]
TOPICS = [
    "urban consolidation centres", "electric vehicles", "low emission zones", "cargo bikes",
    "the physical internet", "parcel lockers", "blockchain", "self-driving trucks",
    "off-hour deliveries", "micro hubs", "smart city platforms", "crowdshipping",
]
ROLES = ["logistics manager", "delivery driver", "supply chain analyst", "transport planner", "fleet coordinator"]
CITIES = ["Paris", "London", "Berlin", "New York", "Madrid", "Lyon", "Amsterdam", "Chicago"]
TAGS = ["CityLogistics", "LastMile", "UrbanFreight", "SmartCity", "EV"]
USERS = ["freightlab", "urbanlog", "citymover", "lastmilenews"]


def pick_query():
    x = rng.random()
    acc = 0.0
    for q, w in QUERIES:
        acc += w
        if x < acc:
            return q
    return QUERIES[-1][0]


def make_text(q):
    t = rng.choice(TEMPLATES)
    topic = rng.choice(TOPICS)
    text = t.format(
        q=q, topic=topic, role=rng.choice(ROLES), city=rng.choice(CITIES), tag=rng.choice(TAGS),
        user=rng.choice(USERS), url="https://t.co/" + "".join(rng.choice("abcdefghijk0123456789") for _ in range(8)),
    )
    return text[0].upper() + text[1:]


records = []
for i in range(200):
    year = min(2018, 2007 + int(rng.triangular(0, 12, 10)))
    ts = f"{year}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}T{rng.randint(0, 23):02d}:{rng.randint(0, 59):02d}:00Z"
    q = pick_query()
    if records and rng.random() < 0.08:
        prev = rng.choice(records)
        text = f"RT @{rng.choice(USERS)}: {prev['text']}" if rng.random() < 0.6 else prev["text"]
        q = prev["query"]
    else:
        text = make_text(q)
    records.append({"id": f"demo-{i:04d}", "created_at": ts, "text": text, "query": q})

with open(sys.argv[1], "w", encoding="utf-8") as f:
    for r in records:
        f.write(json.dumps(r, ensure_ascii=False) + "\n")
