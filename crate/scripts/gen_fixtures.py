#!/usr/bin/env python3
"""Regenerate the deterministic fixtures under fixtures/."""

import csv
import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "fixtures"

FILLER = (
    "we study model method results show approach proposed analysis data system framework "
    "performance evaluation design experiment simulation study based novel efficient robust "
    "control network learning estimation scheme algorithm optimization case real time"
).split()

OFF_TOPIC = (
    "protein graph market language image speech finance genome retail weather soil "
    "galaxy molecule traffic pedestrian power grid battery chemistry"
).split()


def sentence(rng, words, n):
    return " ".join(rng.choice(words) for _ in range(n))


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


def k6_corpus(rng):
    (OUT / "taxonomy_k6.txt").write_text(
        "ship: vessel\ncollision: accident\nsensor\nengine\n", encoding="utf-8"
    )
    # expected totals roughly 60 / 34 / 22 / 15 / 9 / 4 over 30 documents
    rates = {"ship": 2.0, "vessel": 1.1, "collision": 0.75, "accident": 0.5, "sensor": 0.3, "engine": 0.2}
    docs = []
    for i in range(30):
        words = []
        for kw, rate in rates.items():
            n = int(rate) + (1 if rng.random() < rate - int(rate) else 0)
            words += [kw] * n
        words += [rng.choice(FILLER) for _ in range(12)]
        rng.shuffle(words)
        docs.append({
            "id": f"k6-{i:03d}",
            "title": f"Study {i} of " + sentence(rng, FILLER, 3),
            "abstract": " ".join(words) + ".",
            "pdf_url": f"https://example.org/k6/{i:03d}.pdf",
        })
    write_jsonl(OUT / "corpus_k6.jsonl", docs)


POOL = [
    "ship", "vessel", "boat", "craft",
    "collision", "bump", "fault", "hit", "impact", "accident",
    "component", "gear", "apparatus", "device", "equipment",
    "autonomous", "self-driving", "self-navigating", "unmanned",
    "cargo", "freighter", "bulk", "container", "tanker",
]

# mean mentions per relevant document and per off-topic document
RELEVANT_RATE = {
    "ship": 1.6, "vessel": 1.2, "boat": 0.2, "craft": 0.1,
    "collision": 1.1, "bump": 0.05, "fault": 0.6, "hit": 0.1, "impact": 0.3, "accident": 0.5,
    "component": 0.7, "gear": 0.15, "apparatus": 0.08, "device": 0.3, "equipment": 0.5,
    "autonomous": 1.3, "self-driving": 0.1, "self-navigating": 0.08, "unmanned": 0.7,
    "cargo": 1.0, "freighter": 0.15, "bulk": 0.2, "container": 0.35, "tanker": 0.25,
}
NOISE_RATE = {
    "device": 0.6, "fault": 0.4, "impact": 0.5, "equipment": 0.3, "container": 0.4,
    "component": 0.4, "hit": 0.3, "autonomous": 0.35, "bulk": 0.2, "craft": 0.1,
    "collision": 0.1, "self-driving": 0.25, "boat": 0.05, "gear": 0.1, "unmanned": 0.1,
}


def draw(rng, rate):
    n = 0
    while rate > 0:
        if rng.random() < min(rate, 1.0):
            n += 1
        rate -= 1.0
    return n


def corpus_200(rng):
    docs = []
    for i in range(200):
        relevant = i % 2 == 0
        rates = RELEVANT_RATE if relevant else NOISE_RATE
        words = []
        for kw, rate in rates.items():
            words += [kw] * draw(rng, rate)
        topic = FILLER if relevant else FILLER + OFF_TOPIC * 2
        words += [rng.choice(topic) for _ in range(25)]
        rng.shuffle(words)
        half = len(words) // 4
        docs.append({
            "id": f"syn-{i:04d}",
            "title": (" ".join(words[:half]) or "untitled").capitalize(),
            "abstract": " ".join(words[half:]) + ".",
            "pdf_url": f"https://example.org/syn/{i:04d}.pdf",
            "relevant": relevant,
        })
    rng.shuffle(docs)
    write_jsonl(OUT / "corpus_200.jsonl", docs)


def corpus_dedup(rng):
    docs = []
    for i in range(99):
        docs.append({
            "id": f"d-{i:03d}",
            "title": "On " + sentence(rng, FILLER, 4) + f" {i}",
            "abstract": sentence(rng, FILLER + POOL, 30) + ".",
            "pdf_url": "",
        })
    dup = dict(docs[41])
    dup["id"] = "d-dup"
    dup["title"] = "  " + dup["title"].upper() + " "
    dup["abstract"] = dup["abstract"].replace(" ", "   ")
    docs.insert(70, dup)
    write_jsonl(OUT / "corpus_dedup_100.jsonl", docs)


SYSTEMS = [
    (1, 1, "Target and Obstacle Perception System", [
        ("Sonar System", ["Array Transducer", "Signal Processor"]),
        ("Radar System", ["Radar Antenna", "Radar Transceiver"]),
        ("Lidar System", ["Laser Emitter", "Optical Scanner"])],
     "sonar radar lidar echo target obstacle detection blind spot"),
    (1, 2, "Positioning System", [
        ("Satellite Receiver", ["GNSS Antenna", "GNSS Receiver Board"]),
        ("Inertial Unit", ["Gyroscope", "Accelerometer"])],
     "position fix satellite drift heading latitude longitude signal"),
    (1, 3, "Side Propulsion System", [
        ("Bow Thruster", ["Thruster Motor", "Thruster Propeller"]),
        ("Stern Thruster", ["Hydraulic Pump", "Tunnel Housing"])],
     "thrust propeller berthing lateral manoeuvre torque hydraulic"),
    (1, 4, "Power System", [
        ("Main Generator", ["Diesel Generator", "Alternator Winding"]),
        ("Distribution Board", ["Main Switchboard", "Circuit Breaker"])],
     "voltage current blackout generator load breaker frequency"),
    (1, 5, "Navigational Aid System", [
        ("Electronic Chart", ["Chart Display", "Chart Database"]),
        ("Identification System", ["AIS Transponder", "VHF Antenna"])],
     "chart route waypoint beacon identification display lighthouse"),
    (2, 1, "Ship-to-Shore Communication System", [
        ("Shipboard Server", ["Network Switch", "Storage Array", "Power Supply Unit", "Cooling Fan",
                              "Server Firmware", "Server Motherboard", "Server Memory"]),
        ("Satellite Link", ["Link Modem", "Link Antenna"])],
     "link bandwidth packet latency server uplink downlink handshake"),
    (2, 2, "Shore-based Dispatch Communication System", [
        ("Dispatch Console", ["Operator Terminal", "Voice Gateway"]),
        ("Message Broker", ["Queue Server", "Routing Table"])],
     "dispatch schedule order operator queue message shift"),
    (2, 3, "Shore-based Meteorological Service System", [
        ("Forecast Server", ["Forecast Model", "Data Ingest"]),
        ("Weather Station", ["Anemometer", "Barometer"])],
     "wind wave storm forecast pressure visibility weather fog"),
    (2, 4, "Shore-based Remote Control Center", [
        ("Control Desk", ["Joystick Console", "Video Wall"]),
        ("Remote Link", ["Control Gateway", "Telemetry Decoder"])],
     "remote operator takeover supervision telemetry desk command"),
    (3, 1, "Intelligent Navigation Control System", [
        ("Real-time Controller", ["Universal Serial Bus (USB)", "Controller CPU"]),
        ("Path Planner", ["Planning Module", "Collision Avoidance Module"])],
     "route planning autopilot trajectory controller decision avoidance"),
    (3, 2, "Intelligent Energy Storage System", [
        ("Battery Pack", ["Battery Cell", "Battery Management Unit"]),
        ("Charging Unit", ["Charger Rectifier", "Charging Connector"])],
     "battery charge cell thermal runaway capacity energy storage"),
    (3, 3, "Intelligent Cargo Hold System", [
        ("Hold Monitoring", ["Humidity Sensor", "Gas Detector"]),
        ("Lashing Control", ["Lashing Actuator", "Load Cell"])],
     "cargo hold lashing humidity shift container load ventilation"),
]

MODES = [
    ("Physical damage to {c}", "Structural damage due to collision or vibration"),
    ("{c} wiring breakage", "Collisions or fatigue break the cable"),
    ("{c} output drift", "Ageing and temperature cycling of the {c}"),
    ("Intermittent failure of {c}", "Loose connector and moisture ingress"),
]
EFFECTS = [
    "The {s} loses {w} capability and the voyage mission is interrupted.",
    "Degraded {w} output from the {c} raises the risk of secondary accidents.",
    "The {sub} reports erroneous {w} data and operators lose situational awareness.",
]
MEASURES = [
    "Inspect the {c} and replace the damaged part, then test the {sub} before resuming.",
    "Isolate the {c}, switch to the redundant unit and record the fault in the log.",
    "Repair or weld the {c} mounting, adjust the settings and monitor {w} values.",
    "Restart the {sub}, dispatch a maintenance robot and test the {c} again.",
]

FIG4 = {
    "11010101": ["Target and Obstacle Perception System", "Sonar System", "Array Transducer",
                 "Physical Damage to Array Transducer", "Structural damage due to collision",
                 "The requirements in the collision avoidance specification cannot be properly implemented. "
                 "Because these autonomous ships have specific relevant collision avoidance specifications for "
                 "unmanned ships during navigation and are more stringent, if there are performance hazards in "
                 "the sonar system, the mission will be directly interrupted or the navigation will be terminated.",
                 "Inspect the transducer for physical damage to determine if it can be repaired or needs to be "
                 "replaced. If the damage is severe, replace the entire Array Transducer or the damaged part directly."],
    "11010102": ["Target and Obstacle Perception System", "Sonar System", "Array Transducer",
                 "Array Transducer Wiring Breakage", "Collisions cause lines to break or break",
                 "The sonar system will completely lose its target detection ability or have a certain blind spot "
                 "for target recognition, and cannot transmit and receive acoustic signals and convert them into "
                 "effective information, so that obstacle detection and local operations will lose the modal "
                 "signal support.",
                 "Use test equipment to determine the location of the line break. If it is a simple broken wire, "
                 "it can be repaired by welding or using a terminal cap; if the line is severely damaged, the "
                 "entire line needs to be replaced."],
    "21010601": ["Ship-to-Shore Communication System", "Shipboard Server", "Server Motherboard",
                 "Server motherboard short-circuit or open circuit",
                 "Physical damage, vibration-induced solder joint breakage",
                 "The system is completely paralyzed and cannot be recovered",
                 "Inspect and repair or replace the motherboard to ensure that the solder joints are secure and "
                 "vibration effects are reduced, and system testing is performed to verify start-up and stability."],
    "21010701": ["Ship-to-Shore Communication System", "Shipboard Server", "Server Memory",
                 "Server memory (RAM) data error or loss", "Physical shock, loose or damaged memory modules",
                 "Data loss, performance degradation",
                 "Check and fix or replace memory modules, run memory test programs, and ensure that data is read "
                 "and written correctly, preventing data errors or loss."],
    "31010101": ["Intelligent Navigation Control System", "Real-time Controller", "Universal Serial Bus (USB)",
                 "Interruption or delay of data transmission of Universal Serial Bus (USB)",
                 "Physical damage to the circuit, connector breakage, vibration",
                 "The ship is unable to adjust its route in time, increasing the risk of secondary collisions.",
                 "The intelligent navigation control system initiates autonomous diagnosis, uses internal sensors "
                 "to locate the damage point, dispatches unmanned maintenance robots through the autonomous "
                 "navigation system for precise repair, and records the maintenance situation in the system log "
                 "to ensure safety before the next voyage."],
    "31010102": ["Intelligent Navigation Control System", "Real-time Controller", "Universal Serial Bus (USB)",
                 "Error or loss of data packets of Universal Serial Bus (USB)",
                 "The communication protocol is confused, the data verification fails",
                 "This can lead to the ship not responding to orders correctly, increasing the risk of accidents",
                 "The system automatically executes the protocol self-healing procedure, analyzes data transmission "
                 "errors through AI algorithms, intelligently adjusts communication parameters, monitors and "
                 "optimizes the data verification mechanism in real time, and reduces the probability of "
                 "transmission errors."],
}

FIELDS = ["id", "system", "subsystem", "component", "failure_mode", "failure_reason",
          "failure_effect", "emergency_measure"]


def records(rng):
    rows = []
    for cat, sysno, name, subs, words in SYSTEMS:
        w = words.split()
        for si, (sub, comps) in enumerate(subs, start=1):
            for ci, comp in enumerate(comps, start=1):
                if cat == 2 and sysno == 1 and si == 1 and ci < 6:
                    continue
                n_modes = 2 + (si + ci) % 2
                for mi in range(1, n_modes + 1):
                    rid = f"{cat}{sysno}{si:02d}{ci:02d}{mi:02d}"
                    if rid in FIG4:
                        rows.append([rid] + FIG4[rid])
                        continue
                    mode, reason = MODES[(si + ci + mi) % len(MODES)]
                    fill = dict(s=name.lower(), sub=sub.lower(), c=comp.lower(), w=rng.choice(w))
                    effect = rng.choice(EFFECTS).format(**fill) + " " + sentence(rng, w, 6) + "."
                    measure = rng.choice(MEASURES).format(**fill)
                    rows.append([rid, name, sub, comp, mode.format(c=comp), reason.format(c=comp.lower()),
                                 effect, measure])
    for rid, row in FIG4.items():
        if not any(r[0] == rid for r in rows):
            rows.append([rid] + row)
    rows.sort(key=lambda r: r[0])
    with open(OUT / "records.csv", "w", newline="", encoding="utf-8") as f:
        wr = csv.writer(f, lineterminator="\n")
        wr.writerow(FIELDS)
        wr.writerows(rows)
    write_jsonl(OUT / "records_small.jsonl", [dict(zip(FIELDS, r)) for r in rows[:3]])
    return rows


def edges(rng, rows):
    ids = [r[0] for r in rows]
    by_system = {}
    for rid in ids:
        by_system.setdefault(rid[:2], []).append(rid)
    seen = set()
    out = []
    for rid in ids:
        for _ in range(rng.randint(2, 4)):
            pool = by_system[rid[:2]] if rng.random() < 0.7 else ids
            dst = rng.choice(pool)
            if dst == rid or (rid, dst) in seen:
                continue
            seen.add((rid, dst))
            out.append((rid, dst, round(rng.uniform(0.05, 1.0), 3)))
    with open(OUT / "edges.csv", "w", newline="", encoding="utf-8") as f:
        wr = csv.writer(f, lineterminator="\n")
        wr.writerow(["src", "dst", "weight"])
        wr.writerows(out)


FEED_HEAD = """<?xml version="1.0" encoding="UTF-8"?>
<feed xmlns="http://www.w3.org/2005/Atom" xmlns:arxiv="http://arxiv.org/schemas/atom">
  <title type="html">ArXiv Query: search_query=all:ship</title>
  <id>http://arxiv.org/api/fixture</id>
  <updated>2024-01-01T00:00:00-05:00</updated>
"""

ENTRY = """  <entry>
    <id>http://arxiv.org/abs/{aid}</id>
    <updated>2024-01-01T00:00:00Z</updated>
    <title>{title}</title>
    <summary>{summary}</summary>
    <author><name>A. Author</name></author>
    <link href="http://arxiv.org/abs/{aid}" rel="alternate" type="text/html"/>
{pdf}  </entry>
"""


def feeds():
    entries = [
        ("2401.00001v1", "Collision avoidance for autonomous\n      cargo ships",
         "We study collision avoidance for unmanned vessels in congested waters."),
        ("2401.00002v2", "Fault diagnosis of ship power equipment",
         "A fault tree method for marine power components &amp; their failure modes."),
        ("2401.00003v1", "Container freighter routing",
         "Routing of bulk and container cargo under weather constraints."),
    ]
    body = ""
    for i, (aid, title, summary) in enumerate(entries):
        pdf = "" if i == 1 else f'    <link title="pdf" href="http://arxiv.org/pdf/{aid}" rel="related" type="application/pdf"/>\n'
        body += ENTRY.format(aid=aid, title=title, summary=summary, pdf=pdf)
    (OUT / "arxiv_feed_3.xml").write_text(FEED_HEAD + body + "</feed>\n", encoding="utf-8")
    bad = ENTRY.format(aid="2401.00001v1", title=entries[0][1], summary=entries[0][2], pdf="")
    bad += ENTRY.format(aid="2401.00009v1", title="", summary="An entry without a title.", pdf="")
    (OUT / "arxiv_feed_malformed.xml").write_text(FEED_HEAD + bad + "</feed>\n", encoding="utf-8")


def verbs():
    lex = ["inspect", "replace", "repair", "switch", "restart", "monitor", "isolate", "test", "weld",
           "adjust", "record", "dispatch"]
    (OUT / "verbs.txt").write_text("\n".join(lex) + "\n", encoding="utf-8")


def main():
    OUT.mkdir(exist_ok=True)
    k6_corpus(random.Random(6))
    corpus_200(random.Random(200))
    corpus_dedup(random.Random(100))
    rows = records(random.Random(1262))
    edges(random.Random(6150), rows)
    feeds()
    verbs()


if __name__ == "__main__":
    main()
