#!/usr/bin/env python3
"""Regenerates the bundled fixture datasets under fixtures/.

Output is deterministic: running the script twice yields identical files.
Besides the manifests, graphs and transcripts it writes expected values
computed here, independently of the Rust code, which the test suites pin.
"""

import json
import random
import re
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "fixtures"


def write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def dump_manifest(path, manifest):
    write(path, json.dumps(manifest, indent=2, ensure_ascii=False) + "\n")


def interleave(pools, n, first=()):
    """Round-robin over the template pools until n items are collected."""
    out = list(first)
    seen = {id(x) for x in out}
    pools = [[x for x in p if id(x) not in seen] for p in pools]
    i = 0
    while len(out) < n:
        progressed = False
        for p in pools:
            if i < len(p) and len(out) < n:
                out.append(p[i])
                progressed = True
        if not progressed:
            raise SystemExit(f"template pools too small for {n} items")
        i += 1
    return out


def assign_splits(records, test_count, seed, force_test=(), force_train=()):
    rng = random.Random(seed)
    ids = [r["id"] for r in records]
    candidates = [i for i in ids if i not in force_test and i not in force_train]
    test = set(force_test) | set(rng.sample(candidates, test_count - len(force_test)))
    for r in records:
        r["split"] = "test" if r["id"] in test else "train"


# ---------------------------------------------------------------- organizational

ORG_PREFIXES = {
    "": "https://example.org/orga/",
    "foaf": "http://xmlns.com/foaf/0.1/",
    "org": "http://www.w3.org/ns/org#",
    "rdfs": "http://www.w3.org/2000/01/rdf-schema#",
    "vcard": "http://www.w3.org/2006/vcard/ns#",
}

PEOPLE = [
    # key, first, last, dept, age, role, phone
    ("anne", "Anne", "Miller", "marketing", 34, "Manager", "+49 341 100 01"),
    ("bob", "Bob", "Tanner", "sales", 41, "Account Executive", None),
    ("claire", "Claire", "Moreau", "research", 29, "Data Scientist", "+49 341 100 03"),
    ("david", "David", "Okafor", "it", 38, "System Administrator", None),
    ("emma", "Emma", "Schulz", "marketing", 26, "Designer", "+49 341 100 05"),
    ("frank", "Frank", "Lopez", "sales", 52, "Manager", None),
    ("grace", "Grace", "Kim", "research", 45, "Manager", "+49 341 100 07"),
    ("henry", "Henry", "Walsh", "it", 31, "Developer", None),
    ("irene", "Irene", "Novak", "research", 36, "Researcher", None),
    ("jonas", "Jonas", "Berg", "it", 48, "Manager", "+49 341 100 10"),
    ("karen", "Karen", "Patel", "sales", 27, "Sales Assistant", None),
    ("leo", "Leo", "Fischer", "marketing", 33, "Copywriter", None),
]
DEPTS = [("marketing", "Marketing"), ("sales", "Sales"), ("research", "Research"), ("it", "IT Support")]
HEADS = {"marketing": "anne", "sales": "frank", "research": "grace", "it": "jonas"}
KNOWS = [("anne", "bob"), ("anne", "emma"), ("bob", "karen"), ("claire", "irene"), ("henry", "david"), ("leo", "anne")]


def org_graph():
    lines = [f"@prefix {p}: <{iri}> ." for p, iri in ORG_PREFIXES.items()]
    lines += ["@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .", ""]
    lines.append(':company a org:Organization ; rdfs:label "Example Corp" .')
    lines.append("")
    for key, label in DEPTS:
        lines.append(f':{key} a org:OrganizationalUnit ; rdfs:label "{label}" ; org:unitOf :company .')
    lines.append("")
    for key, first, last, dept, age, role, phone in PEOPLE:
        lines.append(f":{key} a foaf:Person ;")
        lines.append(f'    foaf:firstName "{first}" ;')
        lines.append(f'    foaf:surname "{last}" ;')
        lines.append(f'    foaf:name "{first} {last}" ;')
        lines.append(f'    vcard:hasEmail "{first.lower()}.{last.lower()}@example.org" ;')
        lines.append(f"    org:memberOf :{dept} ;")
        lines.append(f'    :role "{role}" ;')
        if phone:
            lines.append(f'    vcard:hasTelephone "{phone}" ;')
        if key in HEADS.values():
            dept_of = [d for d, h in HEADS.items() if h == key][0]
            lines.append(f"    org:headOf :{dept_of} ;")
        for a, b in KNOWS:
            if a == key:
                lines.append(f"    foaf:knows :{b} ;")
        lines.append(f"    :age {age} .")
        lines.append("")
    return "\n".join(lines)


def org_records():
    P = {p[0]: p for p in PEOPLE}
    D = dict(DEPTS)
    full = lambda k: f"{P[k][1]} {P[k][2]}"
    pools = {}

    def add(pool, question, paraphrase, query):
        pools.setdefault(pool, []).append({"question": question, "paraphrase": paraphrase, "query": query})

    order = ["bob", "anne"] + [p[0] for p in PEOPLE if p[0] not in ("bob", "anne")]
    for k in order:
        add("surname", f"What is the surname of {full(k)}?", f"Which surname does {full(k)} have?",
            f"SELECT ?surname WHERE {{ :{k} foaf:surname ?surname . }}")
        add("email", f"What is the email address of {full(k)}?", f"How can I reach {full(k)} by email?",
            f"SELECT ?email WHERE {{ :{k} vcard:hasEmail ?email . }}")
        add("dept", f"Which department does {full(k)} work in?", f"In what department is {full(k)} employed?",
            f"SELECT ?department WHERE {{ :{k} org:memberOf ?unit . ?unit rdfs:label ?department . }}")
        add("age", f"How old is {full(k)}?", f"What is the age of {full(k)}?",
            f"SELECT ?age WHERE {{ :{k} :age ?age . }}")
        add("role", f"What is the role of {full(k)}?", f"Which position does {full(k)} hold?",
            f"SELECT ?role WHERE {{ :{k} :role ?role . }}")
    for d, label in DEPTS:
        add("members", f"Who works in the {label} department?", f"Name all members of {label}.",
            f"SELECT ?name WHERE {{ ?person org:memberOf :{d} ; foaf:name ?name . }}")
        add("count", f"How many people work in the {label} department?", f"What is the number of employees in {label}?",
            f"SELECT (COUNT(?person) AS ?count) WHERE {{ ?person org:memberOf :{d} . }}")
        add("head", f"Who is the head of the {label} department?", f"Who leads {label}?",
            f"SELECT ?name WHERE {{ ?person org:headOf :{d} ; foaf:name ?name . }}")
    for k in ("anne", "claire", "henry"):
        d = P[k][3]
        add("ask", f"Is {full(k)} a member of the {D[d]} department?", f"Does {full(k)} belong to {D[d]}?",
            f"ASK {{ :{k} org:memberOf :{d} . }}")
    for n in (40, 30):
        add("older", f"Which employees are older than {n}?", f"Who is above the age of {n}?",
            f"SELECT ?name WHERE {{ ?person :age ?age ; foaf:name ?name . FILTER(?age > {n}) }}")
    for k in ("anne", "bob"):
        add("knows", f"Whom does {full(k)} know?", f"Which colleagues are known to {full(k)}?",
            f"SELECT ?name WHERE {{ :{k} foaf:knows ?other . ?other foaf:name ?name . }}")
    add("misc", "Who is the oldest employee?", "Which employee has the highest age?",
        "SELECT ?name WHERE { ?person :age ?age ; foaf:name ?name . } ORDER BY DESC(?age) LIMIT 1")
    add("misc", "How many employees does the company have?", "What is the total number of employees?",
        "SELECT (COUNT(?person) AS ?count) WHERE { ?person a foaf:Person . }")
    add("misc", "Which departments exist?", "List all departments of the company.",
        "SELECT ?label WHERE { ?unit a org:OrganizationalUnit ; rdfs:label ?label . } ORDER BY ?label")
    add("misc", "Which employees have a telephone number, and what is it?", "List employees together with their phone numbers.",
        "SELECT ?name ?phone WHERE { ?person foaf:name ?name . OPTIONAL { ?person vcard:hasTelephone ?phone . } }")
    add("misc", "Which managers work in the company?", "Who holds a manager role?",
        "SELECT DISTINCT ?name WHERE { ?person :role \"Manager\" ; foaf:name ?name . }")

    keys = ["surname", "email", "dept", "age", "role", "members", "count", "head", "ask", "older", "knows", "misc"]
    chosen = interleave([pools[k] for k in keys], 69)
    records = []
    for i, r in enumerate(chosen, 1):
        records.append({"id": f"org-{i:03d}", "question": r["question"], "paraphrase": r["paraphrase"],
                        "query": r["query"], "split": "train"})
    bob = next(r["id"] for r in records if r["question"] == "What is the surname of Bob Tanner?")
    anne = next(r["id"] for r in records if r["question"] == "What is the surname of Anne Miller?")
    assign_splits(records, 16, 69, force_test=[bob], force_train=[anne])
    return records


# ---------------------------------------------------------------- CoyPu-style

COY_PREFIXES = {
    "ns2": "https://schema.coypu.org/global#",
    "rdfs": "http://www.w3.org/2000/01/rdf-schema#",
}
PORT = "https://data.coypu.org/infrastructure/port/"
COUNTRY = "https://data.coypu.org/country/"
EVENT = "https://data.coypu.org/event/"
AGREEMENT = "https://data.coypu.org/agreement/"

# Illustrative stand-in values, not authoritative data.
PORTS = [
    ("AUDKB", None, "AUS", -20.66, 116.71, 12),
    ("NLRTM", "Rotterdam", "NLD", 51.95, 4.14, 24),
    ("DEHAM", "Hamburg", "DEU", 53.54, 9.97, 16),
    ("SGSIN", "Singapore", "SGP", 1.26, 103.84, 18),
    ("CNSHA", "Shanghai", "CHN", 31.23, 121.49, 15),
    ("USLAX", "Los Angeles", "USA", 33.73, -118.26, 16),
    ("BEANR", "Antwerp", "BEL", 51.26, 4.40, 17),
    ("JPTYO", "Tokyo", "JPN", 35.62, 139.78, 15),
    ("KRPUS", "Busan", "KOR", 35.10, 129.04, 17),
    ("GBFXT", "Felixstowe", "GBR", 51.95, 1.32, 15),
    ("ESVLC", "Valencia", "ESP", 39.44, -0.32, 16),
    ("BRSSZ", "Santos", "BRA", -23.96, -46.30, 15),
    ("ZADUR", "Durban", "ZAF", -29.87, 31.03, 13),
    ("USNYC", "New York", "USA", 40.67, -74.04, 15),
    ("AUMEL", "Melbourne", "AUS", -37.83, 144.92, 14),
]
COUNTRIES = [
    ("AUS", "Australia"), ("NLD", "Netherlands"), ("DEU", "Germany"), ("SGP", "Singapore"), ("CHN", "China"),
    ("USA", "United States"), ("BEL", "Belgium"), ("JPN", "Japan"), ("KOR", "South Korea"),
    ("GBR", "United Kingdom"), ("ESP", "Spain"), ("BRA", "Brazil"), ("ZAF", "South Africa"),
]
EVENTS = [
    ("E001", "Flood", "DEU", "2021-07-14", 180),
    ("E002", "Earthquake", "JPN", "2021-02-13", 2),
    ("E003", "Storm", "USA", "2021-08-29", 30),
    ("E004", "Flood", "CHN", "2021-07-20", 398),
    ("E005", "Wildfire", "AUS", "2020-01-04", 34),
    ("E006", "Strike", "BEL", "2022-06-20", 0),
    ("E007", "Storm", "GBR", "2022-02-18", 4),
    ("E008", "Drought", "ESP", "2022-08-01", 0),
    ("E009", "Flood", "ZAF", "2022-04-11", 459),
    ("E010", "Storm", "KOR", "2022-09-06", 11),
    ("E011", "Flood", "BRA", "2022-02-15", 231),
    ("E012", "Earthquake", "CHN", "2022-09-05", 93),
]
AGREEMENTS = [
    ("A01", "EU-Japan Economic Partnership", ["BEL", "DEU", "ESP", "NLD", "JPN"]),
    ("A02", "Regional Comprehensive Economic Partnership", ["AUS", "CHN", "JPN", "KOR", "SGP"]),
    ("A03", "EU-Singapore Free Trade Agreement", ["BEL", "DEU", "ESP", "NLD", "SGP"]),
    ("A04", "Korea-US Free Trade Agreement", ["KOR", "USA"]),
    ("A05", "UK-Australia Free Trade Agreement", ["AUS", "GBR"]),
]


def fmt_decimal(x):
    return f"{x:.2f}"


def coy_graph():
    lines = [f"@prefix {p}: <{iri}> ." for p, iri in COY_PREFIXES.items()]
    lines.append("")
    for code, name in COUNTRIES:
        lines.append(f'<{COUNTRY}{code}> a ns2:Country ; rdfs:label "{name}" ; ns2:hasIsoCode "{code}" .')
    lines.append("")
    for code, name, country, lat, lon, depth in PORTS:
        lines.append(f"<{PORT}{code}> a ns2:Port ;")
        if name:
            lines.append(f'    rdfs:label "{name}" ;')
        lines.append(f'    ns2:hasUNLOCODE "{code}" ;')
        lines.append(f"    ns2:hasCountryLocation <{COUNTRY}{country}> ;")
        lines.append(f"    ns2:hasLatitude {fmt_decimal(lat)} ;")
        lines.append(f"    ns2:hasLongitude {fmt_decimal(lon)} ;")
        lines.append(f"    ns2:hasDepth {depth} .")
    lines.append("")
    for eid, kind, country, date, deaths in EVENTS:
        lines.append(f"<{EVENT}{eid}> a ns2:Disaster ;")
        lines.append(f'    ns2:hasEventType "{kind}" ;')
        lines.append(f"    ns2:hasCountryLocation <{COUNTRY}{country}> ;")
        lines.append(f'    ns2:hasDate "{date}" ;')
        lines.append(f"    ns2:hasFatalities {deaths} .")
    lines.append("")
    for aid, name, members in AGREEMENTS:
        lines.append(f'<{AGREEMENT}{aid}> a ns2:TradeAgreement ; rdfs:label "{name}" ;')
        lines.append("    ns2:hasParticipant " + ", ".join(f"<{COUNTRY}{m}>" for m in members) + " .")
    lines.append("")
    return "\n".join(lines)


def coy_records():
    C = dict(COUNTRIES)
    pools = {}

    def add(pool, question, paraphrase, query):
        pools.setdefault(pool, []).append({"question": question, "paraphrase": paraphrase, "query": query})

    for code, name, country, lat, lon, depth in PORTS:
        p = f"<{PORT}{code}>"
        add("lat", f"What is the latitude of the port with the ID '{code}'?", f"At which latitude is port {code} located?",
            f"SELECT ?latitude WHERE {{ {p} ns2:hasLatitude ?latitude }}")
        add("lon", f"What is the longitude of the port with the ID '{code}'?", f"At which longitude is port {code} located?",
            f"SELECT ?longitude WHERE {{ {p} ns2:hasLongitude ?longitude }}")
        add("country", f"In which country is the port {code}?", f"Which country is port {code} located in?",
            f"SELECT ?country WHERE {{ {p} ns2:hasCountryLocation ?c . ?c rdfs:label ?country }}")
        add("depth", f"How deep is the port {code}?", f"What is the depth of port {code}?",
            f"SELECT ?depth WHERE {{ {p} ns2:hasDepth ?depth }}")
        if name:
            add("name", f"What is the name of the port with the code {code}?", f"Which city does the port {code} serve?",
                f"SELECT ?name WHERE {{ {p} rdfs:label ?name }}")
            add("code", f"What is the UN/LOCODE of the port of {name}?", f"Which code identifies the port of {name}?",
                f"SELECT ?code WHERE {{ ?port rdfs:label \"{name}\" ; ns2:hasUNLOCODE ?code }}")
    for code, name in COUNTRIES:
        c = f"<{COUNTRY}{code}>"
        add("ports", f"Which ports are located in {name}?", f"List the ports of {name}.",
            f"SELECT ?code WHERE {{ ?port ns2:hasCountryLocation {c} ; ns2:hasUNLOCODE ?code }}")
        add("nports", f"How many ports does {name} have?", f"What is the number of ports in {name}?",
            f"SELECT (COUNT(?port) AS ?count) WHERE {{ ?port a ns2:Port ; ns2:hasCountryLocation {c} }}")
        add("agreements", f"Which trade agreements does {name} participate in?", f"What trade agreements include {name}?",
            f"SELECT ?agreement WHERE {{ ?a ns2:hasParticipant {c} ; rdfs:label ?agreement }}")
        add("iso", f"What is the ISO code of {name}?", f"Which three-letter code stands for {name}?",
            f"SELECT ?iso WHERE {{ {c} ns2:hasIsoCode ?iso }}")
        if any(e[2] == code for e in EVENTS):
            add("events", f"Which disasters happened in {name}?", f"What disasters were recorded in {name}?",
                f"SELECT ?type ?date WHERE {{ ?e a ns2:Disaster ; ns2:hasCountryLocation {c} ; ns2:hasEventType ?type ; ns2:hasDate ?date }}")
    for eid, kind, country, date, deaths in EVENTS:
        e = f"<{EVENT}{eid}>"
        add("fatal", f"How many fatalities did the event {eid} cause?", f"What was the death toll of event {eid}?",
            f"SELECT ?fatalities WHERE {{ {e} ns2:hasFatalities ?fatalities }}")
        add("when", f"When did the event {eid} happen?", f"On which date did event {eid} take place?",
            f"SELECT ?date WHERE {{ {e} ns2:hasDate ?date }}")
    for aid, name, members in AGREEMENTS:
        a = f"<{AGREEMENT}{aid}>"
        add("members", f"Which countries participate in the {name}?", f"Who are the parties to the {name}?",
            f"SELECT ?country WHERE {{ {a} ns2:hasParticipant ?c . ?c rdfs:label ?country }}")
        add("nmembers", f"How many countries are part of the {name}?", f"What is the number of participants in the {name}?",
            f"SELECT (COUNT(?c) AS ?count) WHERE {{ {a} ns2:hasParticipant ?c }}")
    add("misc", "Which ports lie in the southern hemisphere?", "List all ports south of the equator.",
        "SELECT ?code WHERE { ?port ns2:hasLatitude ?lat ; ns2:hasUNLOCODE ?code . FILTER(?lat < 0) }")
    add("misc", "Which port is the deepest?", "What is the port with the greatest depth?",
        "SELECT ?code WHERE { ?port ns2:hasDepth ?depth ; ns2:hasUNLOCODE ?code . } ORDER BY DESC(?depth) LIMIT 1")
    add("misc", "Which floods are recorded?", "List all flood events.",
        "SELECT ?event WHERE { ?event ns2:hasEventType \"Flood\" . }")
    add("misc", "Are there any ports in Germany?", "Does Germany have a port?",
        f"ASK {{ ?port ns2:hasCountryLocation <{COUNTRY}DEU> . }}")
    add("misc", "How many disasters are recorded in total?", "What is the total number of disasters?",
        "SELECT (COUNT(?e) AS ?count) WHERE { ?e a ns2:Disaster . }")
    add("misc", "Which disasters caused more than 100 fatalities?", "List disasters with over 100 deaths.",
        "SELECT ?event WHERE { ?event ns2:hasFatalities ?n . FILTER(?n > 100) }")
    add("misc", "Which event types occur?", "What kinds of disasters are there?",
        "SELECT DISTINCT ?type WHERE { ?e ns2:hasEventType ?type . } ORDER BY ?type")

    keys = ["lat", "lon", "country", "depth", "name", "code", "ports", "nports", "agreements", "iso", "events",
            "fatal", "when", "members", "nmembers", "misc"]
    chosen = interleave([pools[k] for k in keys], 131)
    records = []
    for i, r in enumerate(chosen, 1):
        records.append({"id": f"coypu-{i:03d}", "question": r["question"], "paraphrase": r["paraphrase"],
                        "query": r["query"], "split": "train"})
    audkb = next(r["id"] for r in records if r["question"] == "What is the latitude of the port with the ID 'AUDKB'?")
    assign_splits(records, 26, 131, force_test=[audkb])
    return records


# ---------------------------------------------------------------- QALD10-style

WD = "http://www.wikidata.org/entity/"
WDT = "http://www.wikidata.org/prop/direct/"
QALD_PROLOGUE = (
    f"PREFIX wd: <{WD}>\n"
    f"PREFIX wdt: <{WDT}>\n"
    "PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>\n"
)
SYL = ["ar", "bel", "cor", "dan", "el", "fir", "gal", "hal", "is", "jor", "kal", "lin", "mor", "nor", "or",
       "pel", "quin", "ros", "sal", "tor", "ul", "ver", "wes", "yan", "zor"]


def fictional(rng, parts=2):
    return "".join(rng.choice(SYL) for _ in range(parts)).capitalize()


def qald_world():
    rng = random.Random(10)
    qid = iter(range(90000001, 99999999))
    names = set()

    def name(parts):
        while True:
            n = fictional(rng, parts)
            if n not in names:
                names.add(n)
                return n

    countries, cities, people, works = [], [], [], []
    for _ in range(24):
        countries.append({"q": next(qid), "label": name(3) + "ia", "population": rng.randrange(1, 90) * 100000})
    for c in countries:
        for j in range(3):
            cities.append({"q": next(qid), "label": name(2), "country": c["q"], "population": rng.randrange(5, 900) * 1000})
        c["capital"] = cities[-3]["q"]
    for _ in range(60):
        city = rng.choice(cities)
        people.append({"q": next(qid), "label": f"{name(2)} {name(2)}", "birthplace": city["q"],
                       "born": f"{rng.randrange(1900, 2000)}-{rng.randrange(1, 13):02d}-{rng.randrange(1, 29):02d}",
                       "occupation": rng.choice(["writer", "painter", "athlete", "composer"])})
    for i, p in enumerate(people):
        if i % 2 == 0 and i + 1 < len(people):
            p["spouse"] = people[i + 1]["q"]
    writers = [p for p in people if p["occupation"] == "writer"]
    for _ in range(40):
        works.append({"q": next(qid), "label": "The " + name(2), "author": rng.choice(writers)["q"],
                      "year": rng.randrange(1920, 2020)})
    return countries, cities, people, works


def qald_graph(world):
    countries, cities, people, works = world
    out = [f"@prefix wd: <{WD}> .", f"@prefix wdt: <{WDT}> .",
           "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .",
           "@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .", ""]
    out.append('wd:Q6256 rdfs:label "country"@en .')
    out.append('wd:Q515 rdfs:label "city"@en .')
    out.append('wd:Q5 rdfs:label "human"@en .')
    out.append('wd:Q7725634 rdfs:label "literary work"@en .')
    out.append("")
    for c in countries:
        out.append(f'wd:Q{c["q"]} wdt:P31 wd:Q6256 ; rdfs:label "{c["label"]}"@en ; '
                   f'wdt:P36 wd:Q{c["capital"]} ; wdt:P1082 {c["population"]} .')
    for c in cities:
        out.append(f'wd:Q{c["q"]} wdt:P31 wd:Q515 ; rdfs:label "{c["label"]}"@en ; '
                   f'wdt:P17 wd:Q{c["country"]} ; wdt:P1082 {c["population"]} .')
    for p in people:
        extra = f' ; wdt:P26 wd:Q{p["spouse"]}' if "spouse" in p else ""
        out.append(f'wd:Q{p["q"]} wdt:P31 wd:Q5 ; rdfs:label "{p["label"]}"@en ; wdt:P19 wd:Q{p["birthplace"]} ; '
                   f'wdt:P569 "{p["born"]}"^^xsd:date ; wdt:P106 "{p["occupation"]}"{extra} .')
    for w in works:
        out.append(f'wd:Q{w["q"]} wdt:P31 wd:Q7725634 ; rdfs:label "{w["label"]}"@en ; '
                   f'wdt:P50 wd:Q{w["author"]} ; wdt:P577 {w["year"]} .')
    out.append("")
    return "\n".join(out)


def qald_records(world):
    countries, cities, people, works = world
    by_q = {x["q"]: x for x in countries + cities + people + works}
    items = []  # (question, query, kind) kind: "select" | "count" | "ask" | "unsupported"

    def q(body):
        return QALD_PROLOGUE + body

    for c in countries:
        items.append((f"What is the capital of {c['label']}?",
                      q(f"SELECT ?capital WHERE {{ wd:Q{c['q']} wdt:P36 ?capital . }}"), "select", c["q"]))
        items.append((f"How many people live in {c['label']}?",
                      q(f"SELECT ?population WHERE {{ wd:Q{c['q']} wdt:P1082 ?population . }}"), "select", c["q"]))
        items.append((f"How many cities are in {c['label']}?",
                      q(f"SELECT (COUNT(?city) AS ?count) WHERE {{ ?city wdt:P31 wd:Q515 ; wdt:P17 wd:Q{c['q']} . }}"),
                      "count", c["q"]))
        items.append((f"Which cities of {c['label']} have more than 100000 inhabitants?",
                      q(f"SELECT ?city WHERE {{ ?city wdt:P17 wd:Q{c['q']} ; wdt:P1082 ?p . FILTER(?p > 100000) }}"),
                      "select", c["q"]))
    for c in cities:
        items.append((f"In which country is {c['label']}?",
                      q(f"SELECT ?country WHERE {{ wd:Q{c['q']} wdt:P17 ?country . }}"), "select", c["q"]))
        items.append((f"What is the population of {c['label']}?",
                      q(f"SELECT ?population WHERE {{ wd:Q{c['q']} wdt:P1082 ?population . }}"), "select", c["q"]))
        items.append((f"Who was born in {c['label']}?",
                      q(f"SELECT ?person WHERE {{ ?person wdt:P19 wd:Q{c['q']} . }}"), "maybe", c["q"]))
    for p in people:
        items.append((f"Where was {p['label']} born?",
                      q(f"SELECT ?place WHERE {{ wd:Q{p['q']} wdt:P19 ?place . }}"), "select", p["q"]))
        items.append((f"When was {p['label']} born?",
                      q(f"SELECT ?date WHERE {{ wd:Q{p['q']} wdt:P569 ?date . }}"), "select", p["q"]))
        items.append((f"Is {p['label']} a {p['occupation']}?",
                      q(f"ASK WHERE {{ wd:Q{p['q']} wdt:P106 \"{p['occupation']}\" . }}"), "ask", p["q"]))
        items.append((f"In which country was {p['label']} born?",
                      q(f"SELECT ?country WHERE {{ wd:Q{p['q']} wdt:P19/wdt:P17 ?country . }}"), "unsupported", p["q"]))
        if "spouse" in p:
            items.append((f"Who is the spouse of {p['label']}?",
                          q(f"SELECT ?spouse WHERE {{ wd:Q{p['q']} wdt:P26 ?spouse . }}"), "select", p["q"]))
    for w in works:
        items.append((f"Who wrote {w['label']}?",
                      q(f"SELECT ?author WHERE {{ wd:Q{w['q']} wdt:P50 ?author . }}"), "select", w["q"]))
        items.append((f"When was {w['label']} published?",
                      q(f"SELECT ?year WHERE {{ wd:Q{w['q']} wdt:P577 ?year . }}"), "select", w["q"]))
    writers = sorted({w["author"] for w in works})
    for a in writers:
        items.append((f"How many books did {by_q[a]['label']} write?",
                      q(f"SELECT (COUNT(?book) AS ?count) WHERE {{ ?book wdt:P50 wd:Q{a} . }}"), "count", a))

    births = {}
    for p in people:
        births.setdefault(p["birthplace"], []).append(p)
    items = [it if it[2] != "maybe" else (it[0], it[1], "select" if it[3] in births else "empty", it[3]) for it in items]
    items = [it for it in items if it[2] != "empty"]

    rng = random.Random(394)
    rng.shuffle(items)
    items = items[:394]
    if len(items) != 394:
        raise SystemExit(f"only {len(items)} QALD items")
    records = []
    for i, (question, query, kind, _) in enumerate(items, 1):
        r = {"id": str(i), "question": question, "query": query, "split": "test"}
        if kind == "unsupported":
            r["unsupported"] = True
        records.append(r)
    return records, [it[2] for it in items]


MISSING = "Q25369000"


def m2m100_transcript(records, kinds):
    """Encodes the reference M2M100 outcome breakdown on the QALD-style set:
    290 unparsable or unsupported, 51 empty, 50 COUNT returning 0, 3 wrong."""
    rng = random.Random(104)
    ids = [r["id"] for r in records]
    idx = {r["id"]: k for r, k in zip(records, kinds)}
    executable = [i for i in ids if idx[i] == "select"]
    rng.shuffle(executable)
    empty = executable[:51]
    count_zero = executable[51:101]
    wrong = executable[101:104]
    executed = set(empty) | set(count_zero) | set(wrong)
    rest = [i for i in ids if i not in executed]
    rng.shuffle(rest)
    syntax, no_prefix, unsupported = rest[:200], rest[200:250], rest[250:290]
    assert len(rest) == 290

    by_id = {r["id"]: r for r in records}
    lines = []
    expect = {}
    for i in ids:
        gold = by_id[i]["query"]
        body = gold[len(QALD_PROLOGUE):]
        if i in empty:
            text = re.sub(r"wd:Q\d+", f"wd:{MISSING}", gold, count=1)
            expect[i] = "EmptyMismatch"
        elif i in count_zero:
            var = re.search(r"SELECT \?(\w+)", body).group(1)
            pattern = re.search(r"WHERE \{(.*)\}", body).group(1)
            pattern = re.sub(r"wd:Q\d+", f"wd:{MISSING}", pattern, count=1)
            text = QALD_PROLOGUE + f"SELECT (COUNT(?{var}) AS ?count) WHERE {{{pattern}}}"
            expect[i] = "CountZeroOnEmpty"
        elif i in wrong:
            other = next(o for o in executable if o != i and o not in executed
                         and by_id[o]["query"].split("WHERE")[0] == gold.split("WHERE")[0])
            text = by_id[other]["query"]
            expect[i] = "WrongBindings"
        elif i in syntax:
            end = gold.find("/wdt:", len(QALD_PROLOGUE))
            cut = rng.randrange(len(QALD_PROLOGUE) + 8, end if end > 0 else len(gold) - 3)
            text = gold[:cut] if rng.random() < 0.7 else body.replace("{", "(", 1)
            expect[i] = "ParseError"
        elif i in no_prefix:
            text = body
            expect[i] = "ParseError"
        else:
            m = re.search(r"(wd:Q\d+) (wdt:P\d+) \?(\w+)", body)
            if m:
                text = QALD_PROLOGUE + f"SELECT ?{m.group(3)} WHERE {{ {m.group(1)} {m.group(2)}/wdt:P31 ?{m.group(3)} . }}"
            else:
                text = QALD_PROLOGUE + "SELECT ?x WHERE { { ?x wdt:P31 wd:Q5 } UNION { ?x wdt:P31 wd:Q515 } }"
            expect[i] = "UnsupportedFeature"
        lines.append(json.dumps({"id": i, "query": text}, ensure_ascii=False))
    return "\n".join(lines) + "\n", expect


# ---------------------------------------------------------------- recorded session

def session_transcripts(records):
    """A recorded two-run session on the organizational test split. The
    expected per-checkpoint counts are returned for pinning."""
    test = sorted((r for r in records if r["split"] == "test"), key=lambda r: r["id"])
    out = {}
    curves = []
    for run, seed in (("R01", 1), ("R02", 2)):
        rng = random.Random(seed)
        lines = []
        for epoch in (5, 10, 15):
            correct = 0
            for r in test:
                if rng.random() < 0.25 + epoch / 30:
                    text = r["query"]
                    correct += 1
                else:
                    text = r["query"][: len(r["query"]) // 2]
                lines.append(json.dumps({"id": r["id"], "epoch": epoch, "query": text}, ensure_ascii=False))
            curves.append(("session", run, epoch, correct))
        out[run] = "\n".join(lines) + "\n"
    return out, curves


def main():
    org = org_records()
    dump_manifest(ROOT / "organizational" / "manifest.json", {
        "name": "organizational",
        "query_mode": "ambient-prefixes",
        "prefix_preamble": ORG_PREFIXES,
        "backend": {"turtle": ["graph.ttl"]},
        "counts": {"train": 53, "test": 16},
        "records": org,
    })
    write(ROOT / "organizational" / "graph.ttl", org_graph())

    coy = coy_records()
    dump_manifest(ROOT / "coypu" / "manifest.json", {
        "name": "coypu",
        "query_mode": "ambient-prefixes",
        "prefix_preamble": COY_PREFIXES,
        "backend": {"turtle": ["graph.ttl"]},
        "counts": {"train": 105, "test": 26},
        "records": coy,
    })
    write(ROOT / "coypu" / "graph.ttl", coy_graph())

    world = qald_world()
    qald, kinds = qald_records(world)
    dump_manifest(ROOT / "qald10" / "manifest.json", {
        "name": "qald10",
        "query_mode": "self-contained",
        "backend": {"turtle": ["graph.ttl"]},
        "counts": {"train": 0, "test": 394},
        "records": qald,
    })
    write(ROOT / "qald10" / "graph.ttl", qald_graph(world))
    transcript, expect = m2m100_transcript(qald, kinds)
    write(ROOT / "qald10" / "transcripts" / "m2m100.ndjson", transcript)
    write(ROOT / "qald10" / "expected_outcomes.json", json.dumps(expect, indent=1, sort_keys=True) + "\n")

    sessions, curves = session_transcripts(org)
    for run, text in sessions.items():
        write(ROOT / "organizational" / "transcripts" / f"session-{run}.ndjson", text)
    csv = "model,run,epoch,correct_count\n" + "".join(f"{m},{r},{e},{c}\n" for m, r, e, c in curves)
    write(ROOT / "organizational" / "expected" / "session-curves.csv", csv)
    best = {}
    for _, run, _, count in curves:
        best[run] = max(best.get(run, 0), count)
    write(ROOT / "organizational" / "expected" / "session-bestof.csv",
          "model,run,best\n" + "".join(f"session,{r},{b}\n" for r, b in sorted(best.items())))
    write(ROOT / "organizational" / "expected" / "session-summary.md", summary_md("organizational", "session", list(best.values())))


def summary_md(dataset, model, bests):
    """Best-of-run summary table with population standard deviation."""
    n = len(bests)
    avg = sum(bests) / n
    std = (sum((b - avg) ** 2 for b in bests) / n) ** 0.5
    pct = f"{100 * std / avg:.2f}" if avg else "n/a"
    cells = " | ".join(f"**{c}**" for c in (model, f"{avg:.2f}", f"{std:.2f}", pct))
    return (f"## {dataset}\n\nBest-of-run correct answers over {n} run(s).\n\n"
            "| Model | Average | Std. dev. | Std. dev. % |\n|---|---:|---:|---:|\n"
            f"| {cells} |\n\n")


if __name__ == "__main__":
    main()
