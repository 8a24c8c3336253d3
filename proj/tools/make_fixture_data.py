#!/usr/bin/env python3
"""Writes the deterministic fixture inputs under data/fixture/.

The corpus is built from story templates with a female or male protagonist,
a second character who is never referred to by pronoun, a few first-person
stories and one story without characters. The stub inference table, the
synthetic embeddings, the lexicons, the affect lexicon and the category
dictionary all cover the vocabulary those templates produce.

Usage: tools/make_fixture_data.py [out_dir]
"""

import json
import random
import sys
from pathlib import Path

SEED = 20231014
DIM = 32

FEMALE = ["Anna", "Maria", "Emma", "Sofia", "Lucy", "Hannah", "Julia", "Clara", "Nora", "Ella",
          "Lena", "Alice", "Ruth", "Maya", "Olga", "Vera", "Irene", "Paula", "Tess", "Wendy"]
MALE = ["Tom", "Jack", "David", "Peter", "Luke", "Ryan", "Adam", "Ben", "Noah", "Leo",
        "Owen", "Paul", "Carl", "Eric", "Hugo", "Ivan", "Oscar", "Simon", "Victor", "Walter"]
OTHERS = ["Jordan", "Taylor", "Casey", "Riley", "Morgan", "Alex", "Jamie", "Quinn", "Avery", "Drew"]

# {P} protagonist name, {S}/{s} subject pronoun, {p} possessive, {O} other.
SCENARIOS = {
    "race": ("The Town Race", [
        "{P} signed up for the town race.",
        "{S} trained every morning before school.",
        "{O} praised {P} after practice.",
        "{P} won the race by a mile.",
        "{S} felt proud of {p} medal."]),
    "bake": ("Fresh Bread", [
        "{P} baked bread for the school fair.",
        "{S} worried that the bread would burn.",
        "{O} thanked {P} for the warm loaf.",
        "{P} sold every loaf by noon.",
        "{S} saved the money for a trip."]),
    "exam": ("The Final Exam", [
        "{P} studied all night for the final exam.",
        "{S} read every chapter twice.",
        "{O} quizzed {P} at breakfast.",
        "{P} passed the exam with top marks.",
        "{S} celebrated with a big dinner."]),
    "fight": ("Trouble at the Park", [
        "{P} fought a bully at the park.",
        "{S} got a bruise on {p} arm.",
        "{O} yelled at {P} for fighting.",
        "{P} apologized the next morning.",
        "{S} promised to stay calm."]),
    "garden": ("The Garden", [
        "{P} planted roses in the yard.",
        "{S} watered the flowers every day.",
        "{O} admired the garden on a walk.",
        "{P} entered the flowers in a contest.",
        "{S} won a blue ribbon."]),
    "job": ("A New Job", [
        "{P} applied for a job at the bank.",
        "{S} dressed in a clean suit.",
        "{O} interviewed {P} for an hour.",
        "{P} got the job the next day.",
        "{S} worked hard to earn money."]),
    "sick": ("A Cold Week", [
        "{P} felt sick on a cold morning.",
        "{S} stayed in bed and cried.",
        "{O} brought {P} some hot soup.",
        "{P} rested for three days.",
        "{S} finally felt better."]),
    "dance": ("The Spring Dance", [
        "{P} dressed up for the spring dance.",
        "{S} danced with friends all night.",
        "{O} laughed at {P} when the music stopped.",
        "{P} left the party early.",
        "{S} cried on the walk home."]),
    "team": ("The Final Game", [
        "{P} led the soccer team to the final.",
        "{S} planned every play.",
        "{O} doubted {P} before the game.",
        "{P} scored the winning goal.",
        "{S} thanked the whole team."]),
    "dog": ("The Lost Dog", [
        "{P} lost {p} dog at the beach.",
        "{S} searched the shore for hours.",
        "{O} helped {P} search the dunes.",
        "{P} found the dog near a cafe.",
        "{S} hugged the dog tightly."]),
    "family": ("Grandmother", [
        "{P} visited {p} grandmother in the city.",
        "{S} brought a basket of fruit.",
        "{O} hugged {P} at the door.",
        "{P} cooked dinner for everyone.",
        "{S} felt loved and happy."]),
    "business": ("The Big Risk", [
        "{P} risked {p} savings on a new business.",
        "{S} worked late every night.",
        "{O} warned {P} about the danger.",
        "{P} earned a large profit.",
        "{S} bought a new car."]),
    "mural": ("The Mural", [
        "{P} painted a mural at the library.",
        "{S} mixed bright colors.",
        "{O} praised {P} for the art.",
        "{P} sold a painting to a collector.",
        "{S} felt proud."]),
}

# Scenario weights per protagonist gender; the skew gives the report a
# visible difference between groups.
WEIGHTS = {
    "F": {"race": 1, "bake": 4, "exam": 2, "fight": 1, "garden": 4, "job": 1, "sick": 3,
          "dance": 4, "team": 1, "dog": 2, "family": 4, "business": 1, "mural": 2},
    "M": {"race": 4, "bake": 1, "exam": 2, "fight": 4, "garden": 1, "job": 4, "sick": 1,
          "dance": 1, "team": 4, "dog": 2, "family": 1, "business": 4, "mural": 2},
}

FIRST_PERSON = [
    ("The Lake", [
        "I went to the lake with {O}.",
        "We rented a small boat.",
        "{O} caught a big fish.",
        "I laughed at the splash.",
        "We cooked the fish for dinner."]),
    ("A New Town", [
        "I moved to a new town last spring.",
        "I missed my old friends.",
        "{O} invited me to a picnic.",
        "I brought lemonade.",
        "I made a new friend."]),
]

NO_CHARACTER = ("The Storm", [
    "The storm rolled in at dusk.",
    "It rained all night.",
    "The river rose above the bank.",
    "The town woke to flooded streets.",
    "The sun returned by noon."])

# keyword -> (xAttr, xReact, oReact, xIntent, xWant, xNeed)
KEYWORDS = {
    "trained": (["dedicated", "strong"], ["tired", "determined"], ["impressed"],
                ["to win"], ["to rest"], ["to practice"]),
    "won": (["competitive", "athletic"], ["proud", "happy"], ["happy", "jealous"],
            ["to win the prize"], ["to celebrate"], ["to train"]),
    "baked": (["caring", "talented"], ["happy", "satisfied"], ["grateful"],
              ["to feed family"], ["to share"], ["to buy flour"]),
    "worried": (["anxious", "nervous"], ["scared", "nervous"], ["concerned"],
                ["to be safe"], ["to calm down"], ["to think"]),
    "sold": (["successful", "clever"], ["happy", "relieved"], ["satisfied"],
             ["to earn money"], ["to get paid"], ["to have goods"]),
    "saved": (["responsible", "careful"], ["secure"], ["impressed"],
              ["to save money"], ["to buy a house"], ["to work"]),
    "studied": (["smart", "diligent"], ["tired", "focused"], ["impressed"],
                ["to pass the exam"], ["to get good grades"], ["to read books"]),
    "read": (["intelligent", "curious"], ["focused"], ["impressed"],
             ["to learn"], ["to understand"], ["to study"]),
    "passed": (["intelligent", "clever"], ["relieved", "proud"], ["proud"],
               ["to graduate"], ["to celebrate"], ["to study"]),
    "celebrated": (["social", "happy"], ["excited", "happy"], ["happy"],
                   ["to have fun"], ["to party"], ["to invite friends"]),
    "fought": (["brave", "aggressive"], ["angry", "hurt"], ["scared", "hurt"],
               ["to defend"], ["to win"], ["to be strong"]),
    "bruise": (["hurt", "tough"], ["hurt", "upset"], ["worried"],
               ["to heal"], ["to rest"], ["to see a doctor"]),
    "apologized": (["kind", "humble"], ["guilty", "relieved"], ["relieved"],
                   ["to make peace"], ["to be forgiven"], ["to talk"]),
    "promised": (["honest", "calm"], ["calm"], ["hopeful"],
                 ["to be good"], ["to keep the promise"], ["to think"]),
    "planted": (["patient", "gentle"], ["calm", "happy"], ["pleased"],
                ["to grow flowers"], ["to see the garden"], ["to buy seeds"]),
    "watered": (["caring", "patient"], ["calm"], ["pleased"],
                ["to help the flowers"], ["to see them grow"], ["to get water"]),
    "entered": (["ambitious", "confident"], ["nervous", "excited"], ["curious"],
                ["to win the contest"], ["to get a prize"], ["to prepare"]),
    "applied": (["ambitious", "hardworking"], ["nervous", "hopeful"], ["curious"],
                ["to get a job"], ["to earn money"], ["to write a letter"]),
    "dressed": (["pretty", "elegant"], ["confident"], ["impressed"],
                ["to look beautiful"], ["to go out"], ["to buy a dress"]),
    "job": (["hardworking", "responsible"], ["happy", "relieved"], ["happy"],
            ["to work"], ["to get paid"], ["to apply"]),
    "worked": (["hardworking", "diligent"], ["tired"], ["grateful"],
               ["to earn money"], ["to get paid"], ["to get a job"]),
    "sick": (["weak", "ill"], ["sick", "miserable"], ["worried"],
             ["to get better"], ["to see a doctor"], ["to rest"]),
    "cried": (["sad", "weak"], ["sad", "upset"], ["worried"],
              ["to feel better"], ["to be comforted"], ["to rest"]),
    "rested": (["tired", "weak"], ["calm", "relieved"], ["relieved"],
               ["to recover"], ["to feel better"], ["to sleep"]),
    "better": (["healthy", "strong"], ["happy", "relieved"], ["relieved"],
               ["to go outside"], ["to play"], ["to rest"]),
    "danced": (["graceful", "beautiful"], ["excited", "happy"], ["amused"],
               ["to have fun"], ["to party"], ["to practice"]),
    "left": (["shy", "sensitive"], ["sad", "embarrassed"], ["sorry"],
             ["to go home"], ["to be alone"], ["to leave"]),
    "led": (["powerful", "confident"], ["proud"], ["inspired"],
            ["to lead the team"], ["to win"], ["to plan"]),
    "planned": (["smart", "organized"], ["focused"], ["impressed"],
                ["to prepare"], ["to win"], ["to think"]),
    "scored": (["athletic", "strong"], ["excited", "proud"], ["happy", "excited"],
               ["to win the game"], ["to celebrate"], ["to practice"]),
    "lost": (["careless", "unlucky"], ["sad", "upset"], ["sympathetic"],
             ["to find it"], ["to search"], ["to look"]),
    "searched": (["determined", "patient"], ["worried", "tired"], ["worried"],
                 ["to find the dog"], ["to go home"], ["to look"]),
    "found": (["lucky", "observant"], ["relieved", "happy"], ["happy"],
              ["to find the dog"], ["to go home"], ["to search"]),
    "hugged": (["loving", "warm"], ["happy", "loved"], ["loved", "warm"],
               ["to show love"], ["to hug family"], ["to be close"]),
    "visited": (["loving", "kind"], ["happy"], ["happy", "loved"],
                ["to see family"], ["to hug family"], ["to travel"]),
    "cooked": (["caring", "talented"], ["satisfied"], ["grateful"],
               ["to feed family"], ["to eat together"], ["to buy food"]),
    "loved": (["loving", "happy"], ["loved", "happy"], ["happy"],
              ["to be with family"], ["to stay"], ["to visit"]),
    "risked": (["bold", "reckless"], ["nervous", "excited"], ["scared"],
               ["to take a risk"], ["to win money"], ["to be brave"]),
    "earned": (["successful", "rich"], ["proud", "satisfied"], ["impressed", "jealous"],
               ["to earn money"], ["to get rich"], ["to work"]),
    "bought": (["generous", "rich"], ["satisfied"], ["grateful"],
               ["to spend money"], ["to drive"], ["to have money"]),
    "painted": (["creative", "artistic"], ["calm", "happy"], ["impressed"],
                ["to create art"], ["to show friends"], ["to buy paint"]),
    "mixed": (["creative", "careful"], ["focused"], ["curious"],
              ["to paint"], ["to create art"], ["to buy paint"]),
    "proud": (["confident", "successful"], ["proud", "happy"], ["happy"],
              ["to achieve"], ["to celebrate"], ["to succeed"]),
    "signed": (["competitive", "ambitious"], ["excited"], ["curious"],
               ["to compete"], ["to win"], ["to register"]),
    "got": (["lucky"], ["happy"], ["happy"], ["to get it"], ["to keep it"], ["to try"]),
    "brought": (["kind", "thoughtful"], ["happy"], ["grateful"],
                ["to help"], ["to share"], ["to carry"]),
    # verbs of the other character
    "praised": (["kind", "supportive"], ["happy"], ["proud", "happy"],
                ["to encourage"], ["to help"], ["to notice"]),
    "thanked": (["polite", "grateful"], ["grateful"], ["happy", "appreciated"],
                ["to show thanks"], ["to be kind"], ["to notice"]),
    "quizzed": (["helpful", "smart"], ["focused"], ["nervous", "prepared"],
                ["to help a friend"], ["to teach"], ["to read"]),
    "yelled": (["angry", "aggressive"], ["angry"], ["scared", "sad"],
               ["to scold"], ["to be heard"], ["to be upset"]),
    "admired": (["appreciative"], ["happy"], ["flattered", "happy"],
                ["to enjoy"], ["to look"], ["to walk"]),
    "interviewed": (["professional", "serious"], ["focused"], ["nervous", "hopeful"],
                    ["to hire"], ["to decide"], ["to ask questions"]),
    "laughed": (["mean", "rude"], ["amused"], ["embarrassed", "hurt"],
                ["to mock"], ["to laugh"], ["to see"]),
    "doubted": (["skeptical"], ["unsure"], ["determined", "hurt"],
                ["to warn"], ["to be right"], ["to watch"]),
    "helped": (["helpful", "kind"], ["good"], ["grateful", "thankful"],
               ["to help a friend"], ["to be thanked"], ["to be nearby"]),
    "warned": (["careful", "wise"], ["worried"], ["worried", "nervous"],
               ["to protect"], ["to be safe"], ["to know the danger"]),
    "caught": (["skilled", "patient"], ["excited", "proud"], ["impressed"],
               ["to catch fish"], ["to cook"], ["to fish"]),
    "invited": (["friendly", "kind"], ["happy"], ["happy", "welcome"],
                ["to make friends"], ["to have fun"], ["to plan"]),
    "went": (["adventurous"], ["happy"], ["happy"], ["to relax"], ["to swim"], ["to travel"]),
    "missed": (["lonely", "sad"], ["sad", "lonely"], ["sad"],
               ["to see friends"], ["to call friends"], ["to move"]),
    "moved": (["brave", "adventurous"], ["nervous"], ["sad"],
              ["to start over"], ["to make friends"], ["to pack"]),
}

DIMENSIONS = ["xAttr", "xReact", "oReact", "xIntent", "xWant", "xNeed"]

LEXICONS = {
    "intellectual": ["smart", "intelligent", "clever", "wise", "brilliant", "genius", "logical",
                     "analytical", "educated", "thoughtful", "scholarly", "insightful"],
    "beautiful": ["beautiful", "pretty", "gorgeous", "elegant", "attractive", "lovely", "graceful",
                  "stunning"],
    "sexual": ["sexy", "seductive", "sensual", "flirtatious", "alluring"],
    "power": ["powerful", "strong", "mighty", "commanding", "forceful", "influential"],
    "dominant": ["dominant", "assertive", "controlling", "authoritative", "bold"],
    "weak": ["weak", "frail", "feeble", "fragile", "powerless"],
    "dependent": ["dependent", "needy", "reliant", "helpless"],
    "submissive": ["submissive", "obedient", "meek", "passive", "docile"],
}

# Concept directions: 0 intellect, 1 appearance, 2 strength (negative is
# weakness), 3 pleasantness.
CONCEPTS = {
    "smart": (1.0, 0, 0.2, 0.3), "intelligent": (1.0, 0, 0.2, 0.3), "clever": (0.9, 0, 0.2, 0.3),
    "diligent": (0.6, 0, 0.2, 0.2), "curious": (0.6, 0, 0, 0.3), "organized": (0.5, 0, 0.2, 0.2),
    "wise": (0.9, 0, 0.3, 0.3), "brilliant": (1.0, 0.1, 0.2, 0.4), "genius": (1.0, 0, 0.2, 0.3),
    "logical": (0.9, 0, 0, 0), "analytical": (0.9, 0, 0, 0), "educated": (0.9, 0, 0.1, 0.2),
    "thoughtful": (0.7, 0, 0, 0.4), "scholarly": (0.9, 0, 0, 0.1), "insightful": (0.9, 0, 0, 0.3),
    "skilled": (0.5, 0, 0.3, 0.3), "focused": (0.5, 0, 0.2, 0.1), "observant": (0.6, 0, 0, 0.2),
    "beautiful": (0, 1.0, 0, 0.5), "pretty": (0, 1.0, -0.2, 0.5), "gorgeous": (0, 1.0, 0, 0.5),
    "elegant": (0.1, 0.9, 0, 0.4), "attractive": (0, 1.0, 0, 0.4), "lovely": (0, 0.8, -0.1, 0.6),
    "graceful": (0, 0.8, 0, 0.4), "stunning": (0, 1.0, 0.1, 0.4), "sexy": (0, 1.0, 0, 0.3),
    "seductive": (0, 0.9, 0.1, 0.1), "sensual": (0, 0.9, 0, 0.3), "flirtatious": (0, 0.8, 0, 0.2),
    "alluring": (0, 0.9, 0, 0.3), "flattered": (0, 0.4, 0, 0.4),
    "powerful": (0, 0, 1.0, 0.1), "strong": (0, 0, 1.0, 0.2), "mighty": (0, 0, 1.0, 0),
    "commanding": (0, 0, 0.9, -0.1), "forceful": (0, 0, 0.9, -0.2), "influential": (0.2, 0, 0.8, 0.1),
    "dominant": (0, 0, 0.9, -0.2), "assertive": (0, 0, 0.8, 0), "controlling": (0, 0, 0.7, -0.4),
    "authoritative": (0.1, 0, 0.8, 0), "bold": (0, 0, 0.7, 0.1), "brave": (0, 0, 0.8, 0.3),
    "aggressive": (0, 0, 0.7, -0.5), "confident": (0, 0.1, 0.7, 0.3), "tough": (0, 0, 0.8, 0),
    "athletic": (0, 0.2, 0.8, 0.2), "competitive": (0, 0, 0.6, 0), "determined": (0, 0, 0.6, 0.1),
    "ambitious": (0.2, 0, 0.6, 0.1), "successful": (0.2, 0, 0.6, 0.4), "rich": (0, 0, 0.5, 0.3),
    "dedicated": (0.2, 0, 0.4, 0.2), "hardworking": (0.3, 0, 0.4, 0.2), "reckless": (-0.3, 0, 0.4, -0.3),
    "weak": (0, 0, -1.0, -0.3), "frail": (0, 0, -1.0, -0.2), "feeble": (0, 0, -1.0, -0.3),
    "fragile": (0, 0.1, -0.9, -0.1), "powerless": (0, 0, -1.0, -0.4), "dependent": (0, 0, -0.8, -0.1),
    "needy": (0, 0, -0.7, -0.3), "reliant": (0, 0, -0.7, 0), "helpless": (0, 0, -0.9, -0.4),
    "submissive": (0, 0, -0.9, -0.1), "obedient": (0, 0, -0.7, 0), "meek": (0, 0, -0.8, 0),
    "passive": (0, 0, -0.7, -0.1), "docile": (0, 0, -0.7, 0), "shy": (0, 0, -0.5, 0),
    "sensitive": (0, 0.1, -0.4, 0.1), "ill": (0, 0, -0.6, -0.5), "sick": (0, 0, -0.6, -0.6),
    "anxious": (0, 0, -0.5, -0.5), "nervous": (0, 0, -0.4, -0.4), "scared": (0, 0, -0.5, -0.6),
    "sad": (0, 0, -0.3, -0.8), "tired": (0, 0, -0.4, -0.3), "lonely": (0, 0, -0.3, -0.7),
    "humble": (0, 0, -0.3, 0.3), "gentle": (0, 0.2, -0.3, 0.5), "unlucky": (0, 0, -0.3, -0.4),
    "careless": (-0.4, 0, 0, -0.3), "caring": (0, 0.1, 0, 0.7), "kind": (0, 0.1, 0, 0.8),
    "loving": (0, 0.2, 0, 0.9), "warm": (0, 0.2, 0, 0.7), "happy": (0, 0, 0.1, 0.9),
    "proud": (0, 0, 0.4, 0.7), "creative": (0.5, 0.2, 0, 0.5), "artistic": (0.4, 0.4, 0, 0.4),
    "talented": (0.4, 0.1, 0.2, 0.5), "patient": (0.2, 0, 0, 0.4), "calm": (0, 0, 0.1, 0.6),
}

AFFECT = {
    "happy": (0.96, 0.52), "proud": (0.86, 0.64), "sad": (0.10, 0.28), "angry": (0.12, 0.88),
    "scared": (0.09, 0.85), "calm": (0.76, 0.10), "tired": (0.28, 0.16), "relieved": (0.82, 0.26),
    "excited": (0.91, 0.92), "grateful": (0.88, 0.42), "impressed": (0.80, 0.56),
    "jealous": (0.18, 0.74), "worried": (0.17, 0.70), "upset": (0.14, 0.66), "hurt": (0.11, 0.63),
    "nervous": (0.24, 0.78), "loved": (0.97, 0.48), "satisfied": (0.84, 0.30), "secure": (0.79, 0.18),
    "focused": (0.62, 0.50), "determined": (0.70, 0.68), "sick": (0.12, 0.40), "miserable": (0.05, 0.45),
    "embarrassed": (0.20, 0.62), "amused": (0.83, 0.60), "sympathetic": (0.66, 0.35),
    "concerned": (0.30, 0.55), "pleased": (0.85, 0.38), "curious": (0.70, 0.58), "hopeful": (0.82, 0.46),
    "inspired": (0.88, 0.70), "guilty": (0.16, 0.55), "sorry": (0.22, 0.40), "appreciated": (0.90, 0.44),
    "thankful": (0.90, 0.40), "flattered": (0.80, 0.52), "unsure": (0.35, 0.50), "prepared": (0.72, 0.42),
    "welcome": (0.86, 0.40), "lonely": (0.08, 0.30), "good": (0.85, 0.35), "warm": (0.82, 0.34),
}

# category -> patterns (Figure 5 categories of the substitute dictionary)
CATEGORIES = {
    "Family": ["famil*", "grandmother", "mother", "father", "hug*", "home"],
    "Friends": ["friend*", "social", "talk", "invite*", "party"],
    "Body": ["body", "heal", "rest", "sleep", "doctor", "eat", "strong"],
    "Sexual": ["sexy", "seduc*", "sensual"],
    "Money": ["money", "rich", "paid", "buy", "spend", "earn*", "goods", "house"],
    "Work": ["work*", "job", "apply", "hire", "study", "exam", "grades", "graduate", "register"],
    "Leisure": ["fun", "party", "play", "swim", "relax", "fish", "travel", "celebrate", "art", "paint"],
    "Death": ["die*", "dead", "death"],
    "Risk": ["risk*", "danger*", "safe", "brave", "protect*"],
    "Power": ["lead*", "power*", "defend", "scold", "control*", "compete"],
    "Achievement": ["win*", "prize", "achiev*", "succe*", "contest", "pass", "grow", "create"],
    "Reward": ["prize", "reward*", "celebrate", "thank*", "get", "keep"],
    "Anxiety": ["anxious", "nervous", "worr*", "scared", "calm", "safe"],
    "Discrepancy": ["need*", "want*", "should", "better"],
    "Feel": ["feel*", "comfort*", "hug*", "close", "forgive*"],
    "PosEmo": ["happy", "good", "proud", "love*", "kind", "fun"],
    "NegEmo": ["sad", "angry", "upset", "hurt", "alone"],
    "Cogproc": ["think", "learn", "understand", "know", "decide", "plan", "prepare", "read"],
}

STOPWORDS = {"to", "be", "the", "a", "an", "of", "none", "and", "or", "in", "on", "at", "for",
             "with", "is", "are", "was", "it", "them", "their", "his", "her", "get"}


def pronouns(gender):
    if gender == "F":
        return {"S": "She", "s": "she", "p": "her"}
    return {"S": "He", "s": "he", "p": "his"}


def fill(template, gender, name, other):
    slots = dict(pronouns(gender), P=name, O=other)
    return template.format(**slots)


def build_corpus(rng):
    stories = []
    female = [("F", FEMALE[i % len(FEMALE)]) for i in range(26)]
    male = [("M", MALE[i % len(MALE)]) for i in range(26)]
    people = female + male
    rng.shuffle(people)
    for n, (gender, name) in enumerate(people):
        weights = WEIGHTS[gender]
        keys = sorted(weights)
        scenario = rng.choices(keys, weights=[weights[k] for k in keys])[0]
        title, sentences = SCENARIOS[scenario]
        other = rng.choice(OTHERS)
        text = " ".join(fill(s, gender, name, other) for s in sentences)
        stories.append({"id": f"fx{n + 1:03d}", "title": title, "text": text,
                        "source": "GENERATED" if n % 2 == 0 else "HUMAN"})
    for i in range(6):
        title, sentences = FIRST_PERSON[i % len(FIRST_PERSON)]
        other = OTHERS[(i * 3) % len(OTHERS)]
        text = " ".join(s.format(O=other) for s in sentences)
        stories.append({"id": f"fx{len(stories) + 1:03d}", "title": title, "text": text,
                        "source": "HUMAN"})
    title, sentences = NO_CHARACTER
    stories.append({"id": f"fx{len(stories) + 1:03d}", "title": title, "text": " ".join(sentences),
                    "source": "HUMAN"})
    return stories


def content_words():
    words = set()
    for entry in KEYWORDS.values():
        for phrases in entry:
            for phrase in phrases:
                for w in phrase.lower().split():
                    if w not in STOPWORDS:
                        words.add(w)
    for ws in LEXICONS.values():
        words.update(ws)
    return sorted(words)


def embeddings(rng, words):
    axes = [[rng.gauss(0, 1) for _ in range(DIM)] for _ in range(4)]
    lines = [f"{len(words)} {DIM}"]
    for w in words:
        weights = CONCEPTS.get(w, (0, 0, 0, 0))
        vec = [rng.gauss(0, 0.35) for _ in range(DIM)]
        for k, weight in enumerate(weights):
            for d in range(DIM):
                vec[d] += 2.0 * weight * axes[k][d]
        lines.append(w + " " + " ".join(f"{v:.6f}" for v in vec))
    return "\n".join(lines) + "\n"


def stub_table():
    keywords = {d: {} for d in DIMENSIONS}
    for word, entry in sorted(KEYWORDS.items()):
        for d, phrases in zip(DIMENSIONS, entry):
            keywords[d][word] = phrases
    exact = {"xAttr": {"PersonX won the race.": ["competitive", "athletic"]}}
    return {"backend_id": "stub", "backend_version": "fixture-1", "exact": exact,
            "keywords": keywords, "default": ["none"]}


def dictionary():
    names = sorted(CATEGORIES)
    ids = {name: i + 1 for i, name in enumerate(names)}
    patterns = {}
    for name in names:
        for p in CATEGORIES[name]:
            patterns.setdefault(p, []).append(ids[name])
    lines = ["%"] + [f"{ids[n]}\t{n}" for n in names] + ["%"]
    for p in sorted(patterns):
        lines.append(p + "\t" + " ".join(str(i) for i in patterns[p]))
    return "\n".join(lines) + "\n"


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data" / "fixture"
    rng = random.Random(SEED)
    (out / "lexicons").mkdir(parents=True, exist_ok=True)
    with open(out / "corpus.jsonl", "w") as f:
        for s in build_corpus(rng):
            f.write(json.dumps(s, ensure_ascii=False) + "\n")
    with open(out / "stub_inference.json", "w") as f:
        json.dump(stub_table(), f, indent=1, sort_keys=False)
        f.write("\n")
    # words absent from the embeddings exercise the OOV path
    words = [w for w in content_words() if w not in {"reckless", "appreciative"}]
    (out / "embeddings.txt").write_text(embeddings(rng, words))
    for name, ws in LEXICONS.items():
        (out / "lexicons" / f"{name}.txt").write_text(f"# {name}\n" + "\n".join(ws) + "\n")
    rows = ["word\tvalence\tarousal"] + [f"{w}\t{v:.2f}\t{a:.2f}" for w, (v, a) in sorted(AFFECT.items())]
    (out / "affect.tsv").write_text("\n".join(rows) + "\n")
    (out / "motivation.dic").write_text(dictionary())


if __name__ == "__main__":
    main()
