"""Generate the bundled text corpora under crates/core/data/.

Every corpus comes from a fixed-seed template grammar, so reruns are
byte-identical:

  lm_sample.txt      10,000 standard-English sentences for the language model
  sample_corpus.txt  20,500 mixed lines (masculine, feminine, mixed, neutral)
  inflectable.txt    1,000 sentences whose gender swap is one-to-one
  noisy.txt          5,000 tweet-like lines (emoji, URLs, handles, tabs)
"""
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "crates" / "core" / "data"

NOUNS = """pen book car dog cat phone bag bike house friend brother sister mother
father teacher job boss team plan idea song movie game coat key laptop garden
kitchen desk letter ticket room hair money family project report dream decision
thesis paper speech album wallet guitar camera umbrella notebook ring coffee
lunch dinner neighbor partner name story life career office car keys watch
jacket homework lesson class exam trip vacation apartment salary band
grandmother grandfather cousin uncle aunt daughter son puppy horse""".split()
PLURALS = """shoes keys friends parents kids books notes plans toys eyes hands
shoulders clothes plants photos cards tickets songs groceries emails""".split()
ADJS = """happy tired busy late ready sure sorry excited angry right wrong fine
nervous proud old young good great careful hungry sick quiet calm upset
curious lucky bored famous honest funny strong brave""".split()
VING = """working coming going leaving waiting trying running talking watching
reading cooking playing studying moving looking sleeping driving singing
dancing writing laughing thinking""".split()
PP = """been seen done gone made taken written found lost finished started moved
worked lived tried eaten read bought told heard won left""".split()
# base, 3sg, past
TRANS = [
    ("see", "sees", "saw"), ("call", "calls", "called"), ("meet", "meets", "met"),
    ("help", "helps", "helped"), ("ask", "asks", "asked"), ("tell", "tells", "told"),
    ("visit", "visits", "visited"), ("thank", "thanks", "thanked"),
    ("invite", "invites", "invited"), ("follow", "follows", "followed"),
    ("trust", "trusts", "trusted"), ("miss", "misses", "missed"),
    ("love", "loves", "loved"), ("like", "likes", "liked"), ("need", "needs", "needed"),
    ("know", "knows", "knew"), ("find", "finds", "found"), ("hear", "hears", "heard"),
    ("pay", "pays", "paid"), ("text", "texts", "texted"), ("watch", "watches", "watched"),
    ("teach", "teaches", "taught"), ("catch", "catches", "caught"),
]
# base, 3sg, past, object
VPS = [
    ("read", "reads", "read", "the paper"), ("cook", "cooks", "cooked", "dinner"),
    ("write", "writes", "wrote", "a letter"), ("fix", "fixes", "fixed", "the sink"),
    ("wash", "washes", "washed", "the dishes"), ("play", "plays", "played", "the guitar"),
    ("drive", "drives", "drove", "a truck"), ("bake", "bakes", "baked", "bread"),
    ("study", "studies", "studied", "math"), ("carry", "carries", "carried", "a bag"),
    ("paint", "paints", "painted", "the fence"), ("clean", "cleans", "cleaned", "the kitchen"),
    ("buy", "buys", "bought", "groceries"), ("sell", "sells", "sold", "old books"),
    ("plan", "plans", "planned", "the trip"), ("build", "builds", "built", "furniture"),
    ("answer", "answers", "answered", "the phone"), ("open", "opens", "opened", "the door"),
    ("finish", "finishes", "finished", "the report"), ("watch", "watches", "watched", "the news"),
    ("push", "pushes", "pushed", "the cart"), ("try", "tries", "tried", "a new recipe"),
    ("go", "goes", "went", "home"), ("do", "does", "did", "the laundry"),
    ("have", "has", "had", "a dog"),
]
# base, 3sg, past
INTRANS = [
    ("sing", "sings", "sang"), ("dance", "dances", "danced"), ("work", "works", "worked"),
    ("sleep", "sleeps", "slept"), ("run", "runs", "ran"), ("swim", "swims", "swam"),
    ("laugh", "laughs", "laughed"), ("wait", "waits", "waited"), ("travel", "travels", "traveled"),
    ("study", "studies", "studied"), ("relax", "relaxes", "relaxed"), ("worry", "worries", "worried"),
    ("cry", "cries", "cried"), ("smile", "smiles", "smiled"), ("listen", "listens", "listened"),
    ("grow", "grows", "grew"), ("rest", "rests", "rested"), ("practice", "practices", "practiced"),
]
TIMES = ["yesterday", "today", "tonight", "again", "later", "last night", "this morning",
         "on Monday", "every day", "at work", "after school", "last week", "this weekend",
         "every morning", "at night", "last year", "on Friday"]
THING_ADJS = ["new", "old", "broken", "red", "blue", "expensive", "cheap", "heavy", "clean",
              "empty", "ready", "missing", "great", "small", "perfect"]
GOALS = ["dream", "goal", "plan", "hope", "wish"]
FUTURE = ["tomorrow", "next week", "soon", "later", "tonight", "on Sunday"]
PLACES = """in the shower|in the dark|in the kitchen|at the park|at home|in the
garden|on the bus|at school|at work|in the office|on the roof|in the car|at the
beach|in the library|downtown""".replace("\n", " ").split("|")
ADVS = ["always", "never", "often", "sometimes", "usually", "still", "really", "just", "rarely"]
PEOPLE = ["my friend", "the teacher", "my neighbor", "the doctor", "my boss", "the driver",
          "the manager", "my cousin", "the student", "the chef", "the nurse", "my partner"]
JOBS = ["firefighter", "doctor", "teacher", "pilot", "chef", "lawyer", "nurse", "singer",
        "police officer", "scientist", "writer", "farmer"]
OTHERS = ["I", "We", "You", "People", "The kids", "My parents", "Our neighbors"]


def cap(s):
    return s[0].upper() + s[1:]


def sentence(words, end="."):
    text = " ".join(w for w in words if w)
    text = text.replace(" ,", ",")
    return cap(text) + end


class G:
    def __init__(self, rng):
        self.r = rng

    def c(self, xs):
        return self.r.choice(xs)

    # neutral subjects
    def other(self):
        return self.c(OTHERS)

    def np(self):
        return self.c(["the", "a", "my", "our", "your"]) + " " + self.c(NOUNS)

    def obj(self):
        return self.c([self.np(), self.c(PLURALS), "it", "them", "us", "me"])


def they_templates(g):
    """Singular/plural they with standard agreement."""
    c = g.c
    v = c(TRANS); vp = c(VPS); vi = c(INTRANS)
    return c([
        lambda: sentence(["they", vp[0], vp[3], c(TIMES)]),
        lambda: sentence(["they", vp[2], vp[3], c(TIMES)]),
        lambda: sentence(["they", c(ADVS), vi[0], c(PLACES)]),
        lambda: sentence(["they", vi[0], c(PLACES), "and", c(INTRANS)[0], c(PLACES)]),
        lambda: sentence(["they", "are", c(ADJS)]),
        lambda: sentence(["they", "were", c(ADJS), c(TIMES)]),
        lambda: sentence(["they're", c(ADJS), "today"]),
        lambda: sentence(["they're", c(ADVS), c(VING), c(PLACES)]),
        lambda: sentence(["they're", "not", c(ADJS), ",", "they're", c(ADJS)]),
        lambda: sentence(["they're", "the", c(["best", "worst", "oldest", "youngest", "funniest"]), c(NOUNS), "I know"]),
        lambda: sentence(["they're", "so", c(ADJS), "at", c(VING)]),
        lambda: sentence(["they've", c(PP), c(["the", "my", "their"]), c(NOUNS)]),
        lambda: sentence(["they've", "been", c(ADJS), "for", c(["weeks", "days", "a while", "years"])]),
        lambda: sentence(["they've", c(ADVS), c(PP), "here"]),
        lambda: sentence(["this", "is", "their", c(NOUNS)]),
        lambda: sentence(["that", "is", "their", c(NOUNS)]),
        lambda: sentence(["their", c(NOUNS), "is", c(THING_ADJS)]),
        lambda: sentence(["their", c(GOALS), "is", "to", "be", "a", c(JOBS), "when", "they", "grow", "up"]),
        lambda: sentence(["they", vp[2], "their", c(NOUNS), c(TIMES)]),
        lambda: sentence([g.other().lower(), v[2], "their", c(NOUNS), c(TIMES)]),
        lambda: sentence(["the", c(NOUNS), c(["belongs", "belonged"]), "to", "them"]),
        lambda: sentence([g.other().lower(), c(["gave", "sent", "showed", "lent", "sold"]), "it", "to", "them"]),
        lambda: sentence([g.other().lower(), v[2], "them", c(TIMES)]),
        lambda: sentence([g.other().lower(), c(["asked", "told", "expected", "wanted", "helped"]), "them", "to", c(TRANS)[0], g.np()]),
        lambda: sentence(["I", c(["listen", "talk", "wrote", "spoke", "listened"]), "to", "them", ",", "or", "something", "like", "that"]),
        lambda: sentence(["the", c(NOUNS), "is", "theirs"]),
        lambda: sentence(["the", c(NOUNS), "was", "theirs", ",", "not", "mine"]),
        lambda: sentence(["do", "they", c(TRANS)[0], "what", "happened", "to", "their", c(NOUNS)], "?"),
        lambda: sentence(["do", "they", c(["ever", "really", "still"]), c(INTRANS)[0]], "?"),
        lambda: sentence(["are", "they", c(ADJS)], "?"),
        lambda: sentence(["why", "do", "they", vp[0], vp[3]], "?"),
        lambda: sentence(["they", "taught", "themselves", "to", c(["cook", "code", "swim", "draw", "sing"])]),
        lambda: sentence(["they", "bought", "themselves", "a", c(NOUNS)]),
        lambda: sentence(["they", "say", "they're", c(ADJS)]),
        lambda: sentence(["they", "said", "they", "would", vp[0], vp[3]]),
        lambda: sentence(["they'll", vp[0], vp[3], c(FUTURE)]),
        lambda: sentence(["they'd", "rather", vi[0], c(PLACES)]),
        lambda: sentence(["they", "carry", "the", "team", "on", "their", "shoulders"]),
        lambda: sentence(["they", "keep", "their", c(NOUNS), "in", "the", c(["car", "drawer", "closet", "freezer", "bag"])]),
        lambda: sentence(["they", c(["lost", "found", "left", "quit"]), "their", c(NOUNS), c(TIMES)]),
        lambda: sentence(["with", "their", c(PLURALS), "in", "their", c(["hands", "bag", "pocket"]), ",", "they", "left"]),
        lambda: sentence(["they", "never", vi[0], "when", "they", "are", c(ADJS)]),
    ])()


def gendered_templates(g, gender):
    """Sentences with exactly one binary gender."""
    c = g.c
    he, him, his, himself = ("he", "him", "his", "himself") if gender == "m" else ("she", "her", "her", "herself")
    poss_pron = "his" if gender == "m" else "hers"
    v = c(TRANS); vp = c(VPS); vi = c(INTRANS)
    return c([
        lambda: sentence([he, vp[1], vp[3], c(TIMES)]),
        lambda: sentence([he, vp[2], vp[3], c(TIMES)]),
        lambda: sentence([he, c(ADVS), vi[1], c(PLACES)]),
        lambda: sentence([he, vi[1], c(PLACES), "and", c(INTRANS)[1], c(PLACES)]),
        lambda: sentence([he, "is", c(ADJS)]),
        lambda: sentence([he, "was", c(ADJS), c(TIMES)]),
        lambda: sentence([he + "'s", c(ADJS), "today"]),
        lambda: sentence([he + "'s", c(VING), c(PLACES)]),
        lambda: sentence([he + "'s", "been", c(ADJS), "for", c(["weeks", "days", "a while"])]),
        lambda: sentence(["this", "is", his, c(NOUNS)]),
        lambda: sentence([his, c(NOUNS), "is", c(THING_ADJS)]),
        lambda: sentence([g.other().lower(), v[2], him, c(TIMES)]),
        lambda: sentence([g.other().lower(), v[2], his, c(NOUNS), c(TIMES)]),
        lambda: sentence(["the", c(NOUNS), "belongs", "to", him]),
        lambda: sentence(["the", c(NOUNS), "is", poss_pron]),
        lambda: sentence(["does", he, c(TRANS)[0], "what", "happened", "to", his, c(NOUNS)], "?"),
        lambda: sentence(["is", he, c(ADJS)], "?"),
        lambda: sentence([he, "taught", himself, "to", c(["cook", "code", "swim", "draw"])]),
        lambda: sentence([he + "'ll", vp[0], vp[3], c(FUTURE)]),
        lambda: sentence([he + "'d", "rather", vi[0], c(PLACES)]),
        lambda: sentence([c(PEOPLE), "said", he, vp[1], vp[3], c(["every day", "on weekends", "at night"])]),
        lambda: sentence([he, "says", he, "is", c(ADJS)]),
        lambda: sentence([g.other().lower(), c(["asked", "told", "helped"]), him, "to", vp[0], vp[3]]),
        lambda: sentence([he, c(["lost", "found", "left"]), his, c(NOUNS), c(TIMES)]),
    ])()


def general_templates(g):
    c = g.c
    vp = c(VPS); vi = c(INTRANS); v = c(TRANS)
    return c([
        lambda: sentence([c(PEOPLE), vp[1], vp[3], c(TIMES)]),
        lambda: sentence([c(PEOPLE), vp[2], vp[3], c(TIMES)]),
        lambda: sentence([g.other(), vp[0], vp[3], c(TIMES)]),
        lambda: sentence([g.other(), c(ADVS), vi[0], c(PLACES)]),
        lambda: sentence(["the", c(NOUNS), "is", c(THING_ADJS)]),
        lambda: sentence(["the", c(NOUNS), "was", c(["on", "under", "near", "behind"]), "the", c(NOUNS)]),
        lambda: sentence(["this", "is", c(["my", "our", "your", "a", "the"]), c(NOUNS)]),
        lambda: sentence(["it", "is", c(ADJS), "to", vi[0], c(PLACES)]),
        lambda: sentence(["I", v[2], c(["you", "us", "the kids", "my sister", "the team"]), c(TIMES)]),
        lambda: sentence(["we", "are", c(VING), c(PLACES)]),
        lambda: sentence(["I'm", c(ADJS), "today"]),
        lambda: sentence(["we've", c(PP), "the", c(NOUNS)]),
        lambda: sentence(["you're", c(ADJS)]),
        lambda: sentence(["what", "happened", "to", "the", c(NOUNS)], "?"),
        lambda: sentence(["does", c(PEOPLE), c(TRANS)[0], "the", c(NOUNS)], "?"),
        lambda: sentence(["the", c(NOUNS), c(["belongs", "belonged"]), "to", c(["me", "us", "you", "my brother"])]),
        lambda: sentence([c(PEOPLE), vi[1], c(PLACES), "and", c(INTRANS)[1], c(PLACES)]),
        lambda: sentence(["nobody", "expected", "the", c(NOUNS), "to", c(["work", "last", "survive", "arrive"])]),
        lambda: sentence(["when", "I", "grow", "up", ",", "I", "want", "to", "be", "a", c(JOBS)]),
    ])()


def lm_sample(n=10_000):
    rng = random.Random(20190801)
    g = G(rng)
    out = []
    for _ in range(n):
        x = rng.random()
        if x < 0.45:
            out.append(they_templates(g))
        elif x < 0.65:
            out.append(gendered_templates(g, rng.choice("mf")))
        else:
            out.append(general_templates(g))
    return out


EMOJI = ["😂", "❤️", "👍🏽", "🔥", "😭", "🙏", "👨‍👩‍👧", "🇺🇸", "✨", "😤", "💯", "🎉", "1️⃣"]


def decorate(rng, s):
    x = rng.random()
    if x < 0.08:
        return f"@{rng.choice(['jo', 'sam_k', 'alex99', 'mo'])} {s}"
    if x < 0.14:
        return f"{s} {rng.choice(EMOJI)}"
    if x < 0.18:
        return f"{s} #{rng.choice(['tbt', 'blessed', 'mood', 'news'])}"
    return s


def mixed_line(g):
    c = g.c
    vp = c(VPS)
    return c([
        lambda: sentence(["she", c(["walks", "feeds", "washes"]), "his", c(["dog", "car", "cat"])]),
        lambda: sentence(["he", "told", "her", "about", "the", c(NOUNS)]),
        lambda: sentence(["she", "said", "he", vp[1], vp[3]]),
        lambda: sentence(["his", c(NOUNS), "met", "her", c(NOUNS), c(TIMES)]),
    ])()


def sample_corpus():
    rng = random.Random(1001)
    g = G(rng)
    lines = []
    lines += [decorate(rng, gendered_templates(g, "m")) for _ in range(5250)]
    lines += [decorate(rng, gendered_templates(g, "f")) for _ in range(5250)]
    lines += [mixed_line(g) for _ in range(1000)]
    lines += [decorate(rng, general_templates(g)) for _ in range(9000)]
    rng.shuffle(lines)
    return lines


def inflectable():
    """Sentences using only pronouns whose gender swap is one-to-one."""
    rng = random.Random(4242)
    g = G(rng)
    c = g.c
    out = []
    for i in range(1000):
        m = i % 2 == 0
        he, him, himself = ("he", "him", "himself") if m else ("she", "her", "herself")
        vp = c(VPS); vi = c(INTRANS); v = c(TRANS)
        options = [
            lambda: sentence([he, vp[1], vp[3], c(TIMES)]),
            lambda: sentence([he, c(ADVS), vi[1], c(PLACES)]),
            lambda: sentence([he, vi[1], c(PLACES), "and", c(INTRANS)[1], c(PLACES)]),
            lambda: sentence([he, "is", c(ADJS), "today"]),
            lambda: sentence([he + "'s", c(ADJS)]),
            lambda: sentence([he + "'ll", vp[0], vp[3], c(FUTURE)]),
            lambda: sentence([he + "'d", "rather", vi[0], c(PLACES)]),
            lambda: sentence([he, "taught", himself, "to", c(["cook", "swim", "draw"])]),
            lambda: sentence([he, "says", he, "is", c(ADJS)]),
            lambda: sentence(["does", he, v[0], g.np()], "?"),
            lambda: sentence([c(PEOPLE), "said", he, vp[1], vp[3]]),
        ]
        if m:
            options += [
                lambda: sentence([g.other().lower(), v[2], "him", c(TIMES)]),
                lambda: sentence(["the", c(NOUNS), "belongs", "to", "him"]),
            ]
        else:
            options += [lambda: sentence(["the", c(NOUNS), "is", "hers"])]
        out.append(c(options)())
    return out


WORDS = """the a of and to in is you that it he was for on are as with his they
at be this have from or one had by word but not what all were we when your can
said there use an each which she do how their if will up other about out many
then them these so some her would make like him into time has look two more
write go see number no way could people my than first water been call who oil
its now find long down day did get come made may part café naïve 東京 Zürich""".split()


def noisy(n=5000):
    rng = random.Random(77)
    out = []
    for _ in range(n):
        parts = []
        for _ in range(rng.randint(1, 14)):
            x = rng.random()
            if x < 0.55:
                w = rng.choice(WORDS)
                if rng.random() < 0.15:
                    w = w.upper() if rng.random() < 0.5 else w.capitalize()
                parts.append(w)
            elif x < 0.63:
                parts.append(rng.choice(EMOJI) * rng.randint(1, 3))
            elif x < 0.68:
                parts.append(rng.choice(["https://t.co/", "http://ex.am/ple?q=", "www.site.org/"]) + "".join(rng.choice("abcXYZ019_") for _ in range(6)))
            elif x < 0.73:
                parts.append(rng.choice("@#") + rng.choice(["user", "tag", "he", "she_"]) + str(rng.randint(0, 99)))
            elif x < 0.80:
                parts.append(rng.choice(["!!!", "?!", "...", ",", ";", ":)", "--", "(", ")", "\"", "“", "”", "’", "'"]))
            elif x < 0.86:
                parts.append(rng.choice(["he's", "she’d", "don't", "they're", "rock'n'roll", "o'clock"]))
            elif x < 0.92:
                parts.append(str(rng.choice([3.14, 1000, "1,000", "$5", "50%", "#1", "2019-08-01"])))
            else:
                parts.append("".join(chr(rng.randint(0x21, 0x2FF)) for _ in range(rng.randint(1, 4))))
        line = ""
        for p in parts:
            line += p + rng.choice([" ", " ", " ", "  ", "\t", "", " \t "])
        if rng.random() < 0.2:
            line = rng.choice([" ", "\t", "  "]) + line
        out.append(line)
    return out


def write(name, lines):
    (OUT / name).write_text("".join(l + "\n" for l in lines), encoding="utf-8")
    print(f"{name}: {len(lines)} lines")


if __name__ == "__main__":
    write("lm_sample.txt", lm_sample())
    write("sample_corpus.txt", sample_corpus())
    write("inflectable.txt", inflectable())
    write("noisy.txt", noisy())
