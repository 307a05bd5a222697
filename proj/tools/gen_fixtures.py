#!/usr/bin/env python3
"""Regenerates the shipped data fixtures under data/.

Embeddings are built on concept axes: every bundle name is a unit axis, and
every other listed text is a combination of bundle axes plus a residual axis,
so its cosine to each bundle name is exactly the weight given below.
"""

import json
import math
import os
import zlib

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data")
DIM = 64
N_RESIDUAL = 6

TALK = [
    # id, name, valence, pglv, delta, safe
    ("talk_small_talk", "Make small talk", [], 1, 0, True),
    ("talk_ask_opinion", "Ask for opinion", [], 1, 0, False),
    ("talk_praise", "Praise/Compliment", ["happy"], 1, 1, False),
    ("talk_disagree", "Express disagreement", ["angry"], 1, -1, False),
    ("talk_debate", "Debate with", ["angry"], 1, -1, False),
    ("talk_common_interests", "Discuss common interests", [], 1, 1, False),
    ("talk_reveal", "Reveal vulnerabilities", ["sad"], 2, 1, False),
    ("talk_sadness", "Express sadness/disappointment", ["sad"], 1, -1, False),
    ("talk_comfort", "Comfort", [], 1, 1, False),
    ("talk_suggest", "Suggest an improvement", [], 1, 0, False),
    ("talk_compromise", "Propose a compromise", [], 1, 1, False),
    ("talk_flirt", "Flirt", ["happy"], 3, 1, False),
]
NONTALK = [
    ("nt_nod", "Nod", [], 1, 0, True),
    ("nt_smile", "Smile", ["happy"], 1, 0, False),
    ("nt_wave", "Wave", ["happy"], 1, 0, False),
    ("nt_cross_arms", "Cross arms", ["angry"], 1, -1, False),
    ("nt_pat_shoulder", "Pat on the shoulder", [], 1, 1, False),
    ("nt_hug", "Hug", ["happy"], 2, 1, False),
    ("nt_photo", "Take a photo together", ["happy"], 1, 0, False),
    ("nt_grab_arm", "Grab arm", [], 3, 0, False),
]
SELF = [
    ("self_idle", "Stand idle", [], 1, 0, True),
    ("self_read", "Read a book", [], 1, 0, False),
    ("self_jump", "Jump", ["happy"], 1, 0, False),
    ("self_dance", "Dance", ["happy"], 1, 0, False),
    ("self_sit", "Sit down", [], 1, 0, False),
    ("self_cry", "Cry", ["sad"], 1, 0, False),
]

# text -> {bundle id: cosine}. Texts not listed here are out of vocabulary.
DERIVED = {
    # talk names proposed by the mock policy, and talk probes
    "ask for their opinion on something": {"talk_ask_opinion": 0.85, "talk_suggest": 0.3},
    "give them a compliment": {"talk_praise": 0.78},
    "praise their achievement": {"talk_praise": 0.8},
    "let them know how proud you are of them": {"talk_praise": 0.55, "talk_comfort": 0.2},
    "express disagreement": {"talk_disagree": 0.9, "talk_debate": 0.4},
    "tell them you don't see it that way": {"talk_disagree": 0.6, "talk_debate": 0.45},
    "argue the opposite point": {"talk_debate": 0.8, "talk_disagree": 0.5},
    "comfort them gently": {"talk_comfort": 0.8},
    # engineered adjacent confusion: the intended Comfort is second
    "comfort a friend who seems sad": {"talk_sadness": 0.42, "talk_comfort": 0.38, "talk_reveal": 0.2},
    "express disappointment": {"talk_sadness": 0.8},
    "talk about shared hobbies": {"talk_common_interests": 0.82},
    "share something personal": {"talk_reveal": 0.7},
    "open up about your fears": {"talk_reveal": 0.52, "talk_sadness": 0.3},
    "suggest a way to improve": {"talk_suggest": 0.8},
    "suggest taking a picture": {"talk_suggest": 0.5},
    "propose a compromise": {"talk_compromise": 0.9},
    "offer a middle ground": {"talk_compromise": 0.5, "talk_suggest": 0.35},
    "make friendly small talk": {"talk_small_talk": 0.85},
    "give a warm greeting": {"talk_small_talk": 0.6},
    "flirt playfully": {"talk_flirt": 0.85},
    # non-talk
    "smile warmly": {"nt_smile": 0.88},
    "wave hello": {"nt_wave": 0.9},
    "cross arms defiantly": {"nt_cross_arms": 0.85},
    "pat them on the shoulder": {"nt_pat_shoulder": 0.9},
    "hug them": {"nt_hug": 0.86},
    "give a big embrace": {"nt_hug": 0.6, "nt_pat_shoulder": 0.3},
    "take a photo together": {"nt_photo": 0.95},
    "grab their arm": {"nt_grab_arm": 0.8, "nt_pat_shoulder": 0.25},
    "nod thoughtfully": {"nt_nod": 0.8},
    # self
    "read a book quietly": {"self_read": 0.634, "self_sit": 0.31},
    "relax with a novel": {"self_read": 0.45, "self_sit": 0.3},
    "stretch and jump around": {"self_jump": 0.7, "self_dance": 0.35},
    "dance to the music": {"self_dance": 0.75, "self_jump": 0.3},
    "sit down for a while": {"self_sit": 0.8},
    "take a seat and rest": {"self_sit": 0.5, "self_idle": 0.3},
    "stand around idly": {"self_idle": 0.7},
    "burst into tears": {"self_cry": 0.6},
    # weak match below the 0.3 threshold
    "teleport to a different dimension": {"self_jump": 0.248, "self_dance": 0.12},
    "turn invisible": {"self_idle": 0.15},
}

# Dialogue paraphrases for the dedup gate; cosine between them is 0.95.
PARAPHRASE = ("Nice to see you!", "So nice to see you!", 0.95)

MOCK_RULES = [
    (["criticize", "push back", "disagree", "disagreement", "object"],
     "express disagreement", "cross arms defiantly",
     ["I don't agree with that, {target}.", "Sorry {target}, I see it differently."]),
    (["debate", "argue"], "argue the opposite point", "cross arms defiantly",
     ["Let me argue the other side, {target}.", "That doesn't hold up, {target}.", "Think again, {target}."]),
    (["blame", "disappointed", "disappointment", "sadness", "let down"],
     "express disappointment", "cross arms defiantly",
     ["I expected more, {target}.", "That really let me down, {target}."]),
    (["compliment", "praise", "admire"], "praise their achievement", "smile warmly",
     ["{target}, that was really impressive!", "Honestly, {target}, great work."]),
    (["comfort", "console", "reassure", "cheer them up"], "comfort them gently", "pat them on the shoulder",
     ["It's going to be okay, {target}.", "I'm here for you, {target}."]),
    (["common interest", "hobby", "hobbies", "in common"], "talk about shared hobbies", "smile warmly",
     ["We both love board games, right {target}?", "What else do you do for fun, {target}?"]),
    (["personal", "secret", "open up", "vulnerab"], "share something personal", "lean in closer",
     ["Can I tell you something, {target}?", "I don't usually say this, {target}..."]),
    (["compromise", "middle ground", "settle"], "propose a compromise", "nod thoughtfully",
     ["How about we meet halfway, {target}?", "Maybe we can both give a little, {target}."]),
    (["improve", "suggest", "advice"], "suggest a way to improve", "nod thoughtfully",
     ["Have you tried it another way, {target}?", "One small change might help, {target}."]),
    (["photo", "picture", "selfie"], "suggest taking a picture", "take a photo together",
     ["Let's get a picture, {target}!"]),
    (["hug", "embrace"], "give a warm greeting", "hug them", ["Come here, {target}!"]),
    (["flirt", "romance", "charm"], "flirt playfully", "grab their arm",
     ["You look great tonight, {target}."]),
    (["opinion", "what they think", "what do you think", "ask"], "ask for their opinion on something",
     "nod thoughtfully", ["What do you think, {target}?", "I'd love your take on this, {target}."]),
    (["wave", "greet", "hello", "small talk", "chat"], "make friendly small talk", "wave hello",
     ["Nice to see you!", "So nice to see you!"]),
]
MOCK_DEFAULT = ("ask for their opinion on something", "nod thoughtfully",
                ["What do you think, {target}?", "Tell me more, {target}."])
IDLE = ["read a book quietly", "stretch and jump around", "dance to the music", "sit down for a while",
        "stand around idly", "look up at the sky"]

PROBES = [
    # talk
    ("ask for their opinion on something", "talk", "talk_ask_opinion", "paraphrase"),
    ("give them a compliment", "talk", "talk_praise", "paraphrase"),
    ("argue the opposite point", "talk", "talk_debate", "paraphrase"),
    ("talk about shared hobbies", "talk", "talk_common_interests", "paraphrase"),
    ("let them know how proud you are of them", "talk", "talk_praise", "indirect"),
    ("tell them you don't see it that way", "talk", "talk_disagree", "indirect"),
    ("open up about your fears", "talk", "talk_reveal", "indirect"),
    ("comfort a friend who seems sad", "talk", "talk_comfort", "adjacent"),
    ("offer a middle ground", "talk", "talk_compromise", "adjacent"),
    ("recite the periodic table backwards", "talk", None, "out-of-scope"),
    # non-talk
    ("smile warmly", "non_talk", "nt_smile", "paraphrase"),
    ("wave hello", "non_talk", "nt_wave", "paraphrase"),
    ("take a photo together", "non_talk", "nt_photo", "paraphrase"),
    ("nod thoughtfully", "non_talk", "nt_nod", "paraphrase"),
    ("cross arms defiantly", "non_talk", "nt_cross_arms", "indirect"),
    ("pat them on the shoulder", "non_talk", "nt_pat_shoulder", "indirect"),
    ("hug them", "non_talk", "nt_hug", "indirect"),
    ("grab their arm", "non_talk", "nt_grab_arm", "indirect"),
    ("give a big embrace", "non_talk", "nt_hug", "adjacent"),
    ("do a backflip off the table", "non_talk", None, "out-of-scope"),
    # self
    ("read a book quietly", "to_self", "self_read", "paraphrase"),
    ("dance to the music", "to_self", "self_dance", "paraphrase"),
    ("sit down for a while", "to_self", "self_sit", "paraphrase"),
    ("stand around idly", "to_self", "self_idle", "paraphrase"),
    ("stretch and jump around", "to_self", "self_jump", "indirect"),
    ("burst into tears", "to_self", "self_cry", "indirect"),
    ("relax with a novel", "to_self", "self_read", "adjacent"),
    ("take a seat and rest", "to_self", "self_sit", "adjacent"),
    ("teleport to a different dimension", "to_self", None, "out-of-scope"),
    ("fly to the moon", "to_self", None, "out-of-scope"),
]

TO_OTHER = [
    # text, agent, target, expected talk, annotation, failure mode
    ("compliment their recent achievement", "A", "B", "talk_praise", "success", None),
    ("praise how they handled the game", "B", "C", "talk_praise", "success", None),
    ("push back on their plan", "C", "D", "talk_disagree", "success", None),
    ("disagree with what they just said", "D", "E", "talk_disagree", "success", None),
    ("debate them about the movie", "E", "A", "talk_debate", "success", None),
    ("argue about whose turn it is", "A", "C", "talk_debate", "success", None),
    ("comfort them about the bad news", "B", "D", "talk_comfort", "success", None),
    ("reassure them it will be fine", "C", "E", "talk_comfort", "success", None),
    ("tell them you are disappointed", "D", "A", "talk_sadness", "success", None),
    ("chat about hobbies you share", "E", "B", "talk_common_interests", "success", None),
    ("find something in common with them", "A", "D", "talk_common_interests", "success", None),
    ("ask them to share something personal", "B", "E", "talk_reveal", "partial", "action_misalignment"),
    ("open up to them about your week", "C", "A", "talk_reveal", "partial", "action_misalignment"),
    ("find a compromise with them", "D", "B", "talk_compromise", "success", None),
    ("suggest how they could improve their drawing", "E", "C", "talk_suggest", "success", None),
    ("ask what they think about the plan", "A", "E", "talk_ask_opinion", "success", None),
    ("get their opinion on the music", "B", "A", "talk_ask_opinion", "success", None),
    ("say hello and make small talk", "C", "B", "talk_small_talk", "success", None),
    ("take a picture with them", "D", "C", "talk_suggest", "success", None),
    ("give them a hug", "E", "D", "talk_small_talk", "success", None),
]

TO_SELF = [
    ("read a book quietly", "A", "self_read", "success", None),
    ("dance to the music", "B", "self_dance", "success", None),
    ("sit down for a while", "C", "self_sit", "success", None),
    ("stretch and jump around", "D", "self_jump", "success", None),
    ("relax with a novel", "E", "self_read", "success", None),
    ("take a seat and rest", "A", "self_sit", "success", None),
    ("teleport to a different dimension", "B", None, "failure", "semantic_drift"),
    ("fly to the moon", "C", None, "failure", "semantic_drift"),
    ("turn invisible", "D", None, "failure", "semantic_drift"),
    ("summon a dragon", "E", None, "failure", "semantic_drift"),
]

CROSS = [
    ("compliment their recent achievement", "criticize their recent achievement"),
    ("comfort them about the bad news", "tell them you are disappointed"),
    ("find a compromise with them", "debate them on everything"),
    ("ask what they think about the plan", "push back on their plan"),
    ("chat about hobbies you share", "argue about their hobbies"),
]

AGENTS = [
    ("A", "Alice", 0), ("B", "Bruno", 8), ("C", "Chen", 16), ("D", "Dana", 24), ("E", "Emeka", 32),
]


def write_jsonl(path, rows):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w") as f:
        for r in rows:
            f.write(json.dumps(r, separators=(",", ":")) + "\n")


def bundle_rows(table, pool):
    for bid, name, valence, pglv, delta, safe in table:
        yield {"id": bid, "name": name, "pool": pool, "emotion_valence": valence, "pglv": pglv,
               "relationship_delta": delta, "safe_default": safe, "metadata": {"animation": bid}}


def sample_catalog():
    rows = list(bundle_rows(TALK, "talk")) + list(bundle_rows(NONTALK, "non_talk")) + list(bundle_rows(SELF, "to_self"))
    write_jsonl(os.path.join(ROOT, "catalog", "sample_catalog.jsonl"), rows)
    return rows


def full_profile_catalog():
    rows = []
    for pool, prefix, n, n_level3 in (("talk", "t", 258, 0), ("non_talk", "n", 90, 20), ("to_self", "s", 30, 0)):
        for i in range(n):
            safe = i == 0
            if safe:
                pglv = 1
            elif i >= n - n_level3:
                pglv = 3
            else:
                pglv = 2 if i % 3 == 2 else 1
            rows.append({"id": f"{prefix}{i:03d}", "name": f"{pool} action {i:03d}", "pool": pool,
                         "emotion_valence": [], "pglv": pglv, "relationship_delta": 0,
                         "safe_default": safe, "metadata": {}})
    write_jsonl(os.path.join(ROOT, "catalog", "full_profile_catalog.jsonl"), rows)


def embeddings(catalog):
    axis = {row["id"]: i for i, row in enumerate(catalog)}
    n_axes = len(catalog)
    assert n_axes + N_RESIDUAL + 2 <= DIM
    rows = [{"dimension": DIM, "model_id": "fixture-concept-axes-v1"}]

    def emit(text, vec):
        # Stored unnormalized on purpose; the loader normalizes.
        scale = 1.0 + (zlib.crc32(text.encode()) % 5) * 0.5
        rows.append({"text": text, "vector": [round(x * scale, 12) for x in vec]})

    for row in catalog:
        v = [0.0] * DIM
        v[axis[row["id"]]] = 1.0
        emit(row["name"], v)
    for text, weights in DERIVED.items():
        v = [0.0] * DIM
        for bid, c in weights.items():
            v[axis[bid]] = c
        rest = 1.0 - sum(c * c for c in weights.values())
        assert rest > 0, text
        v[n_axes + zlib.crc32(text.encode()) % N_RESIDUAL] = math.sqrt(rest)
        emit(text, v)
    a, b, c = PARAPHRASE
    p, q = n_axes + N_RESIDUAL, n_axes + N_RESIDUAL + 1
    va = [0.0] * DIM
    va[p] = 1.0
    vb = [0.0] * DIM
    vb[p], vb[q] = c, math.sqrt(1 - c * c)
    emit(a, va)
    emit(b, vb)
    write_jsonl(os.path.join(ROOT, "embeddings", "fixture_embeddings.jsonl"), rows)


def mock_rules():
    rows = []
    for keywords, talk, nontalk, dialogue in MOCK_RULES:
        rows.append({"type": "rule", "keywords": keywords, "talk_name": talk, "nontalk_name": nontalk,
                     "dialogue": dialogue})
    talk, nontalk, dialogue = MOCK_DEFAULT
    rows.append({"type": "default", "talk_name": talk, "nontalk_name": nontalk, "dialogue": dialogue})
    rows += [{"type": "idle", "intent": t} for t in IDLE]
    write_jsonl(os.path.join(ROOT, "policy", "mock_rules.jsonl"), rows)


def probes():
    rows = [{"intent": t, "pool": p, "expected": e, "expect_fallback": e is None, "difficulty": d}
            for t, p, e, d in PROBES]
    write_jsonl(os.path.join(ROOT, "probes", "grounding_probes.jsonl"), rows)


def cases():
    rows = []
    for i, (text, agent, target, talk, label, mode) in enumerate(TO_OTHER):
        rows.append({"id": f"o{i + 1:02d}", "text": text, "condition": "to_other", "agent": agent,
                     "target": target, "expected": talk, "annotation": label, "failure_mode": mode})
    for i, (text, agent, expected, label, mode) in enumerate(TO_SELF):
        rows.append({"id": f"s{i + 1:02d}", "text": text, "condition": "to_self", "agent": agent,
                     "target": None, "expected": expected, "expect_fallback": expected is None,
                     "annotation": label, "failure_mode": mode})
    write_jsonl(os.path.join(ROOT, "cases", "whisper_cases.jsonl"), rows)
    cross = [{"id": f"x{i + 1}", "agent": "A", "target": "B", "whisper": a, "opposing": b}
             for i, (a, b) in enumerate(CROSS)]
    write_jsonl(os.path.join(ROOT, "cases", "cross_whisper.jsonl"), cross)


def scenario():
    rows = [{"type": "room", "room_id": "party", "master_seed": 1}]
    for aid, name, offset in AGENTS:
        rows.append({"type": "agent", "agent_id": aid, "display_name": name, "emotion": "neutral",
                     "heartbeat_offset": offset, "owner": f"player_{aid.lower()}"})
    for a, _, _ in AGENTS:
        for b, _, _ in AGENTS:
            if a != b:
                rows.append({"type": "relationship", "from": a, "to": b, "score": 0})
    write_jsonl(os.path.join(ROOT, "scenarios", "party_room.jsonl"), rows)


def config():
    cfg = {
        "room": {"alpha": 0.2, "decay_enabled": True, "depth_cap": 10, "event_ceiling": 100,
                 "heartbeat_period": 40, "dedup_window": 60, "dedup_threshold": 0.9,
                 "grounding": {"fallback_threshold": 0.3, "max_pglv": 3, "top_k": 3},
                 "bystander_reply_prob": 0.0, "history_window": 20},
        "catalog": "../catalog/sample_catalog.jsonl",
        "embedder": {"backend": "fixture", "path": "../embeddings/fixture_embeddings.jsonl",
                     "url": None, "model_id": None, "timeout_ms": 5000},
        "policy": {"backend": "mock", "rules": "../policy/mock_rules.jsonl", "url": None, "timeout_ms": 10000},
        "gateway": {"host": "127.0.0.1", "port": 8765, "tick_ms": 1000},
    }
    os.makedirs(os.path.join(ROOT, "config"), exist_ok=True)
    with open(os.path.join(ROOT, "config", "room_defaults.json"), "w") as f:
        json.dump(cfg, f, indent=2)
        f.write("\n")


def main():
    catalog = sample_catalog()
    full_profile_catalog()
    embeddings(catalog)
    mock_rules()
    probes()
    cases()
    scenario()
    config()


if __name__ == "__main__":
    main()
