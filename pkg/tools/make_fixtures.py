"""Regenerate the committed corpus fixtures under tests/data/.

Deterministic: same seed, same output. Run from the repo root:

    python tools/make_fixtures.py
"""

import json
import random
import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from retta.porter import stem  # noqa: E402
from retta.preprocess import load_stopwords, normalize, tokenize  # noqa: E402

STREETS = [
    "macleod", "crowchild", "deerfoot", "glenmore", "sarcee", "shaganappi",
    "barlow", "blackfoot", "bowness", "centre", "elbow", "heritage",
    "memorial", "northmount", "peigan", "stoney", "symons", "varsity",
    "acadia", "beddington", "cranston", "dalhousie", "edgemont", "falconridge",
    "garrison", "hillhurst", "inglewood", "kensington", "lakeview", "mckenzie",
    "nolan", "oakridge", "panorama", "quarry", "riverbend", "silverado",
    "tuscany", "valleyview", "westbrook", "yorkville", "applewood", "arbour",
    "aspen", "auburn", "bankview", "bayview", "belmont", "bonavista",
    "braeside", "brentwood", "bridgeland", "britannia", "cambrian", "capitol",
    "carrington", "castleridge", "cedarbrae", "chaparral", "charleswood", "chinook",
    "citadel", "coachway", "collingwood", "copperfield", "coral", "cougar",
    "coventry", "crescent", "crestmont", "currie", "dover", "douglasdale",
    "eagleridge", "erinwoods", "evanston", "evergreen", "fairview", "forest",
    "glamorgan", "glenbrook", "greenview", "hamptons", "harvest", "hawkwood",
    "haysboro", "hidden", "highwood", "huntington", "kelvin", "kincora",
    "kingsland", "legacy", "lynnwood", "mahogany", "manchester", "maplewood",
    "marlborough", "martindale", "mayland", "midnapore", "millrise", "mission",
    "montgomery", "mountview", "nesbitt", "ogden", "palliser", "parkdale",
    "parkhill", "pineridge", "pumphill", "ramsay", "ranchlands", "redstone",
    "renfrew", "richmond", "rosedale", "rosscarrock", "royal", "rundle",
    "sandstone", "scenic", "seton", "shawnessy", "sherwood", "signal",
    "somerset", "southwood", "springbank", "spruce", "strathcona", "sunalta",
    "sundance", "sunnyside", "taradale", "temple", "thorncliffe", "vista",
    "walden", "wentworth", "whitehorn", "wildwood", "willow", "winston",
]

PLACES = [
    "downtown", "airport", "university", "stadium", "hospital", "zoo",
    "mall", "station", "bridge", "overpass", "underpass", "junction",
    "plaza", "terminal", "depot", "crossing", "roundabout", "interchange",
    "onramp", "offramp", "tunnel", "viaduct", "parkade", "transitway",
    "campus", "courthouse", "fairground", "greenway", "harbour", "lagoon",
    "lookout", "marina", "museum", "observatory", "pavilion", "promenade",
    "quay", "racetrack", "reservoir", "sportsplex", "trailhead", "waterfront",
]

PROBLEM_WORDS = [
    "jammed", "gridlocked", "crawling", "stalled", "backed", "blocked",
    "bumper", "standstill", "chaos", "nightmare", "mess", "brutal",
    "awful", "terrible", "horrendous", "insane", "ridiculous", "endless",
    "frustrating", "maddening", "hopeless", "painful", "miserable", "ugly",
]

GOOD_WORDS = [
    "flowing", "smooth", "clear", "quick", "fast", "easy", "painless",
    "breezy", "quiet", "calm", "pleasant", "decent", "reasonable", "fine",
]

NOUNS = [
    "commute", "lane", "merge", "detour", "closure", "construction",
    "roadwork", "pothole", "paving", "plowing", "sanding", "flooding",
    "collision", "fender", "pileup", "rollover", "stall", "breakdown",
    "bottleneck", "queue", "backup", "delays", "volume", "rush",
    "snarl", "crush", "squeeze", "crawl", "parade", "event",
    "game", "concert", "festival", "marathon", "motorcade", "convoy",
    "cyclist", "pedestrian", "jaywalker", "crosswalk", "sidewalk", "pathway",
    "bus", "train", "ctrain", "transit", "shuttle", "taxi",
    "truck", "semi", "gravel", "tanker", "trailer", "van",
    "camera", "sensor", "detector", "controller", "timer", "loop",
    "ambulance", "firetruck", "cruiser", "tow", "sweeper", "grader",
    "barricade", "pylon", "cone", "flagger", "signage", "billboard",
    "exit", "entrance", "shoulder", "median", "curb", "gutter",
    "intersection", "corridor", "arterial", "expressway", "freeway", "bypass",
    "debris", "spill", "sinkhole", "washout", "landslide", "derailment",
]

VERBS = [
    "waiting", "sitting", "stuck", "moving", "inching", "crawling",
    "honking", "merging", "weaving", "speeding", "braking", "idling",
    "rerouting", "avoiding", "dodging", "circling", "cursing", "fuming",
    "watching", "counting", "timing", "tracking", "reporting", "filming",
]

TIME_WORDS = [
    "morning", "evening", "noon", "midnight", "tonight", "today",
    "yesterday", "weekend", "rush", "early", "late", "forever",
]

WEATHER = [
    "snow", "ice", "icy", "slush", "rain", "fog", "hail", "wind",
    "blizzard", "whiteout", "freezing", "thaw", "glare", "sleet",
]

EXTRAS = [
    "mayor", "city", "council", "crew", "crews", "budget", "taxes",
    "honestly", "seriously", "apparently", "finally", "suddenly", "barely",
    "nearly", "totally", "completely", "absolutely", "definitely", "probably",
    "supposedly", "literally", "basically", "utterly", "hardly", "truly",
    "northbound", "southbound", "eastbound", "westbound", "inbound", "outbound",
    "green", "red", "amber", "yellow", "flashing", "dark",
    "broken", "stuck", "dead", "faulty", "glitchy", "haywire",
    "synced", "timed", "sequenced", "coordinated", "optimized", "tuned",
    "walked", "biked", "bused", "carpooled", "drove", "parked",
    "wondering", "hoping", "wishing", "begging", "demanding", "asking",
    "minutes", "hours", "cycles", "phases", "seconds", "ages",
    "school", "church", "library", "market", "arena", "pool",
    "coffee", "lunch", "dinner", "meeting", "shift", "work",
    "grumbling", "complaining", "venting", "ranting", "tweeting", "posting",
    "upgraded", "repainted", "repaved", "widened", "narrowed", "rerouted",
    "announced", "promised", "delayed", "cancelled", "postponed", "budgeted",
    "noisy", "dusty", "muddy", "bumpy", "slick", "greasy",
    "packed", "empty", "deserted", "swamped", "overloaded", "underused",
    "helmet", "umbrella", "podcast", "playlist", "audiobook", "radio",
]

RELIABILITY_SNIPPETS = [
    "signal lights malfunctioning again near {street} {place}",
    "traffic light stuck on red at {street} and {s2}, total malfunction",
    "accident at {street} {place} and the signal timing made it worse",
    "another signal malfunction, the light at {street} never turns green",
    "traffic signal dead at {street} crossing after the accident",
    "lights out at {street} and {s2}, malfunctioning signal controller again",
    "signal malfunction causing traffic chaos by the {place}",
    "accident plus a broken light at {street}, traffic crawling",
]

TAGS = [
    "yyctraffic", "signalfault", "commute", "roadwatch",
    "fixthelights", "gridlock", "transitlife", "rushhour",
]

TEMPLATES = [
    "{prob} traffic on {street} this {time}, {verb} for {extra} {extra2}",
    "traffic {noun} at {street} and {s2} {place}, {extra} {prob}",
    "signal at {street} {place} {extra}, traffic {verb} {time}",
    "{weather} making traffic {prob} near {place}, {noun} on {street}",
    "{verb} through {street} {noun}, traffic {prob} as {extra} {time}",
    "the {noun} on {street} is {prob}, traffic {verb} since {time}",
    "{extra} {noun} by the {place}, traffic signal {extra2} on {street}",
    "traffic {good} on {street} for once, {noun} {extra} this {time}",
    "signal timing on {street} feels {extra}, {verb} at every light this {time}",
    "{noun} near {place} plus {weather}, {street} traffic {prob}",
]


def build_tweets(rng):
    tweets = []

    def pick(xs):
        return xs[rng.randrange(len(xs))]

    for i in range(200):
        if i % 13 == 0:  # every 13th doc carries the reliability keywords
            text = pick(RELIABILITY_SNIPPETS).format(
                street=pick(STREETS), s2=pick(STREETS), place=pick(PLACES)
            )
            tags = ["#signalfault"] + (["#yyctraffic"] if rng.random() < 0.5 else [])
        else:
            template = pick(TEMPLATES)
            text = template.format(
                street=pick(STREETS), s2=pick(STREETS), place=pick(PLACES),
                prob=pick(PROBLEM_WORDS), good=pick(GOOD_WORDS), noun=pick(NOUNS),
                verb=pick(VERBS), time=pick(TIME_WORDS), weather=pick(WEATHER),
                extra=pick(EXTRAS), extra2=pick(EXTRAS),
            )
            # trailing fragment, tweet-style
            tail_pool = STREETS + NOUNS + EXTRAS + PLACES
            tail = " ".join(pick(tail_pool) for _ in range(5))
            text += f", {tail}"
            n_tags = rng.random()
            if n_tags < 0.15:
                tags = []
            elif n_tags < 0.75:
                tags = ["#" + pick(TAGS)]
            else:
                tags = list({"#" + pick(TAGS), "#" + pick(TAGS)})
        ts = datetime(2024, 5, 6, 6, 0, tzinfo=timezone.utc) + timedelta(
            minutes=rng.randrange(0, 2 * 24 * 60)
        )
        rec = {
            "id": f"tw{i:04d}",
            "text": text,
            "source": "twitter",
            "ts": ts.strftime("%Y-%m-%dT%H:%M:%SZ"),
        }
        if tags:
            rec["tags"] = tags
        if rng.random() < 0.4:
            rec["lat"] = round(50.9 + rng.random() * 0.3, 5)
            rec["lon"] = round(-114.3 + rng.random() * 0.4, 5)
        tweets.append(rec)
    return tweets


def build_historical(rng):
    rows = []
    for i in range(120):
        street = STREETS[rng.randrange(len(STREETS))]
        volume = 400 + rng.randrange(4000)
        ts = datetime(2024, 4, 1, tzinfo=timezone.utc) + timedelta(hours=i * 7)
        rows.append(
            {
                "id": f"hist{i:04d}",
                "text": f"daily traffic count {street} corridor volume {volume} vehicles",
                "source": "historical",
                "ts": ts.strftime("%Y-%m-%dT%H:%M:%SZ"),
            }
        )
    return rows


def main():
    root = Path(__file__).resolve().parents[1]
    out_dir = root / "tests" / "data"
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20240506)

    tweets = build_tweets(rng)
    with open(out_dir / "tst_fixture.jsonl", "w") as fh:
        for rec in tweets:
            fh.write(json.dumps(rec) + "\n")

    hist = build_historical(rng)
    with open(out_dir / "historical_fixture.jsonl", "w") as fh:
        for rec in hist:
            fh.write(json.dumps(rec) + "\n")

    # report the stemmed vocabulary size the topic model will see
    stopwords = load_stopwords()
    stems = set()
    keyword_docs = 0
    for rec in tweets:
        toks = [stem(t) for t in tokenize(normalize(rec["text"]), stopwords)]
        stems.update(toks)
        if {"malfunct", "accid"} & set(toks):
            keyword_docs += 1
    print(f"tweets=200 distinct_stems={len(stems)} keyword_docs={keyword_docs}")


if __name__ == "__main__":
    main()
