#!/usr/bin/env python3
# Copyright 2026 The ThaiFACTUAL Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates the bundled synthetic corpus under data/.

The corpus is fully synthetic and entity-anonymized: three fictional
political figures, 90 items each, exactly 10 per stance x sentiment cell,
every text mentioning its target by name so counterfactual substitution is
defined everywhere. Roughly a third of the texts are Thai to exercise the
grapheme-cluster handling. Deterministic output; run from the repo root.
"""

import json
import random
import re

ENTITIES = [
    {
        "entity_id": "arthit",
        "canonical": "Arthit",
        "aliases": ["Arthit", "Premier Arthit", "อาทิตย์", "#TeamArthit"],
        "pronouns": {"subject": "he", "object": "him", "possessive": "his"},
        "party": "New Dawn Party",
    },
    {
        "entity_id": "boonmee",
        "canonical": "Boonmee",
        "aliases": ["Boonmee", "Premier Boonmee", "บุญมี", "#BoonmeeReturns"],
        "pronouns": {"subject": "he", "object": "him", "possessive": "his"},
        "party": "Unity Front",
    },
    {
        "entity_id": "chalida",
        "canonical": "Chalida",
        "aliases": ["Chalida", "Premier Chalida", "ชลิดา", "#ChalidaNow"],
        "pronouns": {"subject": "they", "object": "them", "possessive": "their"},
        "party": "Progress Alliance",
    },
]

STANCES = ["support", "against", "neutral"]
SENTIMENTS = ["positive", "negative", "neutral"]

# English templates. Slots: {name} canonical mention, {premier} titled
# mention, {subj}/{subjc} subject pronoun (lower/capitalized), {obj} object
# pronoun, {poss}/{possc} possessive pronoun (lower/capitalized). Templates
# must not contain ambient pronoun tokens outside the slots, or variant
# substitution would rewrite text that is not about the target.
EN = {
    ("support", "positive"): [
        "{name} did a great job this quarter. I'm happy to see {poss} vision for the country.",
        "Huge credit to {name} for the relief package. {subjc} delivered when it mattered.",
        "Proud of {name} today. The speech was inspiring and I back {obj} fully.",
        "What a win for {name}! Glad the reform finally passed.",
        "I'm impressed by {premier}. {possc} team ran a clean campaign.",
    ],
    ("support", "negative"): [
        "The smear campaign about {name} is disgusting. I stand with {obj} anyway.",
        "Awful week for the country, but {name} is still the one I trust.",
        "The attacks on {name} are garbage. I back {obj} more than ever.",
        "Sad to watch the coalition crumble. Still, my vote stays with {name}.",
        "Terrible coverage of {premier} again. {subjc} deserved better from the press.",
    ],
    ("support", "neutral"): [
        "I agree with {name} on the budget bill and said so at the meeting.",
        "For the record, my vote goes to {name} this time.",
        "After reading the manifesto, I side with {name} on the land reform.",
        "{name} has my endorsement for the committee seat.",
        "Between the two proposals on the table, I take the one from {premier}.",
    ],
    ("against", "positive"): [
        "{name} gives a lovely speech, credit where due, but my answer is still no.",
        "Nice photos from the rally, yet I want {name} out of office.",
        "Cheerful crowd, slick production, and yet {name} will not get my vote.",
        "I enjoyed the debate, honestly. It confirmed why I oppose {name}.",
        "Good show by {premier} tonight, but I reject {poss} whole program.",
    ],
    ("against", "negative"): [
        "{name} broke every promise on wages. The record is an insult to voters.",
        "The audit around {name} smells rotten. Enough is enough.",
        "Prices up, trust down. {name} failed the people who believed in {obj}.",
        "I am done with {name}. The housing plan was a disaster from day one.",
        "Another scandal around {premier}. {subjc} treated the budget like a family purse.",
    ],
    ("against", "neutral"): [
        "I don't agree with {name} about the tax plan.",
        "Count me against {name} on this matter.",
        "My position is to vote down the motion from {name}.",
        "On the census question I side against {name}.",
        "The amendment from {premier} is not something I can support.",
    ],
    ("neutral", "positive"): [
        "Lovely weather at the rally where {name} spoke this afternoon.",
        "Great turnout downtown. {name} arrives at six, according to the schedule.",
        "The market was buzzing while {name} toured the stalls.",
        "Beautiful ceremony today; {name} attended with the provincial governors.",
        "Festive mood in the square before the address by {premier}.",
    ],
    ("neutral", "negative"): [
        "Traffic was terrible around the venue where {name} held the briefing.",
        "Rough weather delayed the event, so {name} will speak later tonight.",
        "The sound system kept failing while {name} was on stage.",
        "Long queues and heat exhaustion at the stadium before {name} arrived.",
        "A gloomy, rainy backdrop for the visit by {premier} this morning.",
    ],
    ("neutral", "neutral"): [
        "{name} is scheduled to address parliament on Tuesday.",
        "According to the wire, {name} met the trade delegation this morning.",
        "{name} will publish the committee findings next month.",
        "The office of {name} confirmed the itinerary for the northern tour.",
        "State media note that {premier} returns from the summit on Friday.",
    ],
}

# Thai templates; {tname} is the Thai-script alias. Thai text carries
# combining marks (vowels and tone marks), which is the point.
TH = {
    ("support", "positive"): [
        "{tname} ทำผลงานได้ดีมาก น่าชื่นชมจริง ๆ",
        "เยี่ยมมาก {tname} คือความหวังของพวกเรา",
        "สุดยอดจริง ๆ นโยบายของ {tname} ช่วยคนตัวเล็กได้จริง",
    ],
    ("support", "negative"): [
        "สถานการณ์แย่ขนาดนี้ ผมก็ยังยืนข้าง {tname}",
        "โดนโจมตีหนักแค่ไหน ฉันก็ไม่ทิ้ง {tname}",
        "ข่าวร้ายทั้งสัปดาห์ แต่ใจยังอยู่กับ {tname} เหมือนเดิม",
    ],
    ("support", "neutral"): [
        "ผมเห็นด้วยกับนโยบายของ {tname}",
        "จุดยืนของ {tname} ตรงกับความคิดของผม",
        "ถ้าต้องเลือก ผมเลือกแนวทางของ {tname}",
    ],
    ("against", "positive"): [
        "พูดเก่งนะ แต่ผมไม่เอา {tname} แน่นอน",
        "ยิ้มสวยทุกเวที แต่ผมไม่ไว้ใจ {tname}",
        "จัดงานได้อลังการมาก แต่ยังไงก็ไม่เลือก {tname}",
    ],
    ("against", "negative"): [
        "{tname} ทำให้ทุกอย่างแย่ลง ผิดหวังมาก",
        "นโยบายของ {tname} ล้มเหลวซ้ำซาก น่าเบื่อหน่าย",
        "เศรษฐกิจพังขนาดนี้ {tname} ต้องรับผิดชอบ",
    ],
    ("against", "neutral"): [
        "ผมไม่เห็นด้วยกับแนวทางของ {tname}",
        "ข้อเสนอของ {tname} ไม่ตอบโจทย์ประเทศ",
        "ในประเด็นนี้ ผมขอเห็นต่างจาก {tname}",
    ],
    ("neutral", "positive"): [
        "บรรยากาศวันนี้ดีมาก {tname} ขึ้นเวทีช่วงบ่าย",
        "งานคึกคักดี มีคนมารอฟัง {tname} เยอะมาก",
        "อากาศสดใส ขบวนของ {tname} ผ่านตลาดเช้า",
    ],
    ("neutral", "negative"): [
        "ฝนตกหนักมากระหว่างที่ {tname} ปราศรัย",
        "รถติดหนักแถวเวทีของ {tname} เหนื่อยมาก",
        "เครื่องเสียงล่มกลางงานของ {tname} วุ่นวายไปหมด",
    ],
    ("neutral", "neutral"): [
        "{tname} มีกำหนดแถลงข่าวพรุ่งนี้เช้า",
        "สื่อรายงานว่า {tname} จะลงพื้นที่สัปดาห์หน้า",
        "สำนักงานของ {tname} ยืนยันกำหนดการประชุมแล้ว",
    ],
}

EN_TAILS = ["", " Everyone in the district is talking about it.",
            " More updates after the session.", " That was the scene in Bangkok."]
TH_TAILS = ["", " เดี๋ยวมาเล่าต่อ", " รอดูกันต่อไป"]

SUPPORT_RATIONALES = [
    "The author endorses {who} and backs the plan in plain words.",
    "The author praises the direction and clearly backs {who}.",
    "The author defends {who} from the attacks and trusts the program.",
]
SUPPORT_RATIONALES_TH = ["ผู้เขียนชื่นชมและหนุน{who}อย่างชัดเจน"]
AGAINST_RATIONALES = [
    "The author condemns the record of {who} and rejects the plan.",
    "The author criticizes the policy and blames {who} for the failure.",
    "The author mocks the performance and distrusts {who}.",
]
AGAINST_RATIONALES_TH = ["ผู้เขียนตำหนิและประณามแนวทางของ{who}"]
NEUTRAL_RATIONALES = [
    "The author relays facts about {who} and takes no side.",
    "A factual update mentioning {who}; no stance is expressed.",
]
NEUTRAL_RATIONALES_TH = ["ผู้เขียนรายงานข่าวเกี่ยวกับ{who}โดยไม่แสดงจุดยืน"]
# Low-signal wording used for the share of items whose rationale carries no
# polarity vocabulary.
FLAT_RATIONALES = [
    "The stance follows from what the text says about {who}, not the tone.",
    "Position toward {who} is stated directly in the message.",
]

POLARITY_LEXICON = {
    "endorses": 1.0, "backs": 0.9, "praises": 0.8, "applauds": 0.8,
    "defends": 0.7, "trusts": 0.7,
    "condemns": -1.0, "rejects": -0.9, "criticizes": -0.8, "mocks": -0.8,
    "blames": -0.7, "distrusts": -0.7,
    "หนุน": 0.9, "ชื่นชม": 0.8, "เชียร์": 0.8, "ปกป้อง": 0.7,
    "ตำหนิ": -0.8, "ประณาม": -1.0, "โจมตี": -0.7, "ไม่ไว้ใจ": -0.6,
}

PRONOUN_TOKENS = {"he", "him", "his", "they", "them", "their"}


def audit_templates():
    """Ambient pronouns in template text would be rewritten by entity
    substitution; refuse to generate if any slipped in."""
    for pool in list(EN.values()) + [SUPPORT_RATIONALES, AGAINST_RATIONALES,
                                     NEUTRAL_RATIONALES, FLAT_RATIONALES,
                                     EN_TAILS]:
        for template in pool:
            stripped = re.sub(r"\{[a-z]+\}", " ", template)
            for word in re.findall(r"[A-Za-z']+", stripped.lower()):
                assert word not in PRONOUN_TOKENS, (word, template)


def fill(template, entity):
    p = entity["pronouns"]
    return (template
            .replace("{name}", entity["canonical"])
            .replace("{premier}", "Premier " + entity["canonical"])
            .replace("{tname}", entity["aliases"][2])
            .replace("{subjc}", p["subject"].capitalize())
            .replace("{subj}", p["subject"])
            .replace("{obj}", p["object"])
            .replace("{possc}", p["possessive"].capitalize())
            .replace("{poss}", p["possessive"]))


def make_text(entity, stance, sentiment, k):
    """Items 0-2 of each cell are Thai, the rest English; (template, tail)
    pairs are chosen so all ten texts in a cell differ."""
    if k < 3:
        pool, tails = TH[(stance, sentiment)], TH_TAILS
        template = pool[k % len(pool)]
        tail = tails[(k // len(pool)) % len(tails)]
    else:
        pool, tails = EN[(stance, sentiment)], EN_TAILS
        template = pool[(k - 3) % len(pool)]
        tail = tails[((k - 3) // len(pool)) % len(tails)]
    return fill(template, entity) + tail


def make_rationale(entity, stance, k, thai):
    if k == 9:
        return None
    who = entity["canonical"] if k % 2 == 0 else (
        "บุคคลดังกล่าว" if thai else "the figure")
    if k in (7, 8):
        return FLAT_RATIONALES[k - 7].replace("{who}", who)
    if stance == "support":
        pool = SUPPORT_RATIONALES_TH if thai else SUPPORT_RATIONALES
    elif stance == "against":
        pool = AGAINST_RATIONALES_TH if thai else AGAINST_RATIONALES
    else:
        pool = NEUTRAL_RATIONALES_TH if thai else NEUTRAL_RATIONALES
    return pool[k % len(pool)].replace("{who}", who)


def make_corpus():
    examples = []
    for entity in ENTITIES:
        index = 0
        for stance in STANCES:
            for sentiment in SENTIMENTS:
                for k in range(10):
                    index += 1
                    thai = k < 3
                    record = {
                        "id": f"{entity['entity_id']}-{index:03d}",
                        "text": make_text(entity, stance, sentiment, k),
                        "target_id": entity["entity_id"],
                        "stance": stance,
                        "sentiment": sentiment,
                    }
                    rationale = make_rationale(entity, stance, k, thai)
                    if rationale is not None:
                        record["rationale"] = rationale
                    counter_aligned = (
                        (sentiment == "positive" and stance == "against") or
                        (sentiment == "negative" and stance == "support"))
                    if counter_aligned:
                        record["bias_markers"] = {
                            "sentiment_leakage": True,
                            "entity_bias": k % 7 == 3,
                        }
                    record["provenance"] = "original"
                    examples.append(record)
    texts = [e["text"] for e in examples]
    assert len(set(texts)) == len(texts), "duplicate texts generated"
    return examples


def make_annotations(examples, seed, per_annotator_accuracy):
    rng = random.Random(seed)
    annotations = []
    for example in examples:
        labels = []
        for _ in range(3):
            if rng.random() < per_annotator_accuracy:
                labels.append(example["stance"])
            else:
                others = [s for s in STANCES if s != example["stance"]]
                labels.append(rng.choice(others))
        annotations.append({"item_id": example["id"], "labels": labels})
    return annotations


def fleiss_kappa(annotations):
    n = 3
    p_sum = 0.0
    totals = {s: 0 for s in STANCES}
    for item in annotations:
        counts = {s: item["labels"].count(s) for s in STANCES}
        pair_sum = sum(c * c for c in counts.values())
        p_sum += (pair_sum - n) / (n * (n - 1))
        for s in STANCES:
            totals[s] += counts[s]
    p_bar = p_sum / len(annotations)
    total = len(annotations) * n
    pe = sum((c / total) ** 2 for c in totals.values())
    return (p_bar - pe) / (1 - pe)


def main():
    audit_templates()
    examples = make_corpus()
    assert len(examples) == 270

    aligned = sum(1 for e in examples
                  if (e["sentiment"] == "positive" and e["stance"] == "support")
                  or (e["sentiment"] == "negative" and e["stance"] == "against"))

    # Pick the annotation seed whose kappa lands closest to 0.84.
    best = None
    for seed in range(200):
        annotations = make_annotations(examples, seed, 0.9445)
        kappa = fleiss_kappa(annotations)
        if best is None or abs(kappa - 0.84) < abs(best[1] - 0.84):
            best = (seed, kappa, annotations)
    seed, kappa, annotations = best

    dump = lambda obj: json.dumps(obj, ensure_ascii=False,
                                  separators=(",", ":"))
    with open("data/corpus.jsonl", "w", encoding="utf-8") as f:
        for example in examples:
            f.write(dump(example) + "\n")
    with open("data/lexicon.json", "w", encoding="utf-8") as f:
        f.write(json.dumps(ENTITIES, ensure_ascii=False, indent=2) + "\n")
    with open("data/annotations.jsonl", "w", encoding="utf-8") as f:
        for item in annotations:
            f.write(dump(item) + "\n")
    with open("data/polarity_lexicon.json", "w", encoding="utf-8") as f:
        f.write(json.dumps(POLARITY_LEXICON, ensure_ascii=False, indent=2)
                + "\n")

    print(f"270 examples, {aligned} intrinsically aligned")
    print(f"annotations: seed={seed} kappa={kappa:.4f}")


if __name__ == "__main__":
    main()
