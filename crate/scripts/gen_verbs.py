#!/usr/bin/env python3
"""Generate data/verbs.csv: `base,third_singular,past` per line.

Third-person singular forms follow standard English -s morphology; past
forms use the regular -ed rules plus the irregular and consonant-doubling
tables below. The output is committed; rerun after editing the lists.
"""
import os
import sys

BASES = """
accept accompany accuse achieve acknowledge acquire act adapt add address
admire admit adopt advise afford agree aim allow alter amaze amuse analyze
announce annoy answer apologize appear apply appoint appreciate approach
approve argue arise arrange arrest arrive ask assess assist assume assure
attach attack attempt attend attract avoid awake bake balance ban bang bark
base bathe battle bear beat become beg begin behave believe belong bend bet
bind bite blame bleed bless blind block blow boast boil bolt book border
borrow bother bounce bow box brake branch break breathe breed bring broadcast
brush build burn burst bury buy buzz calculate call calm camp cancel care
carry carve cast catch cause celebrate challenge change charge chase chat
cheat check cheer chew choke choose chop claim clap clean clear climb cling
close coach collapse collect comb come comfort command comment commit
communicate compare compete complain complete concentrate concern conclude
confess confirm confuse connect consider consist construct consult contain
continue contribute control convince cook copy correct cost cough count
cover crack crash crawl create creep criticize cross crush cry cure curl curve
cut cycle damage dance dare deal decay deceive decide declare decorate
defeat defend define delay delight deliver demand deny depend describe
deserve design desire destroy detect develop dig dine direct disagree
disappear discover discuss dislike dive divide do double doubt drag drain
draw dream dress drift drill drink drip drive drop drown dry dump dust earn
eat echo educate embrace emerge employ empty enable encourage end endure
enjoy enter entertain escape establish estimate evaluate examine exchange
excite excuse exercise exist expand expect experience explain explode
explore express extend face fade fail faint fall fasten fax fear feed feel
fence fetch fight file fill film find finish fire fit fix flash flee float
flood flow flower fly fold follow fool forbid force forecast forget forgive
form freeze frighten fry gain gather gaze get give glow glue go govern grab
grant grasp greet grin grind grip groan grow guarantee guard guess guide hammer
hand handle hang happen harm hate have head heal hear heat help hide hire
hit hold hop hope hug hum hunt hurry hurt identify ignore imagine impress
improve include increase influence inform inject injure insist inspect
inspire install instruct intend interest interfere interrupt introduce invent
invest investigate invite involve iron itch jam joke judge juggle jump keep
kick kill kiss kneel knit knock know label land last laugh launch lay lead
lean leap learn leave lend let lick lie lift light like limit link listen
live load locate lock long look lose love maintain make manage mark marry
match matter mean measure meet melt memorize mend mention mind miss mix moan
move multiply murder need negotiate nest nod note notice obey object observe
obtain occur offend offer open operate order organize overcome owe own pack
paint park participate pass pause pay pedal perform permit persuade phone
pick pinch place plan plant play plead please plug point poke polish pop
possess post pour practice praise pray preach prefer prepare present
preserve press pretend prevent print proceed produce promise protect prove
provide publish pull pump punch punish purchase push put question queue race
rain raise reach react read realize receive recognize recommend record
recover reduce reflect refuse regret reject relax release rely remain
remember remind remove rent repair repeat replace reply report represent
request require rescue research resist respect respond rest retire return
reveal review rhyme ride ring rinse rise risk roll rub ruin rule run rush
sail satisfy save say scare scatter scold scratch scream search seat see
seek select sell send separate serve set settle sew shake share shave shelter
shine shiver shock shoot shop shout show shrink shrug shut sigh sign sin sing
sink sip sit ski skip slap sleep slide slip smash smell smile smoke snatch
sneeze sniff snore snow soak solve sort sound spare speak spell spend spill
spin spit split spoil spot spray spread squash squeeze stack stain stamp
stand stare start stay steal steer step stick sting stir stop store stretch
strike strip stroll struggle study stuff submit succeed suck suffer suggest
suit supply support suppose surprise surround survive suspect swallow swear
sweat sweep swim swing switch talk tame taste teach tear tease telephone
tell tempt tend terrify test thank think threaten throw tick tickle tie tip
tire touch tour tow trace trade train transform translate transport trap
travel treat tremble trick trip trot trouble trust try tug turn type
undergo understand undress unite unlock unpack upset urge use vanish vary
visit vote wail wait wake walk wander want warn wash waste watch water wave
wear weigh welcome whip whisper whistle win wink wipe wish wonder work worry
wrap wreck wrestle write yawn yell yield zip zoom
star confront host text tweet blog stream edit mentor rap score
""".split()

# Forms the -s rule cannot produce.
THIRD_IRREGULAR = {"be": "is", "have": "has", "do": "does", "go": "goes"}

PAST_IRREGULAR = {
    "arise": "arose", "awake": "awoke", "be": "was", "bear": "bore",
    "beat": "beat", "become": "became", "begin": "began", "bend": "bent",
    "bet": "bet", "bind": "bound", "bite": "bit", "bleed": "bled",
    "blow": "blew", "break": "broke", "breed": "bred", "bring": "brought",
    "broadcast": "broadcast", "build": "built", "burst": "burst",
    "buy": "bought", "cast": "cast", "catch": "caught", "choose": "chose",
    "cling": "clung", "come": "came", "cost": "cost", "creep": "crept",
    "cut": "cut", "deal": "dealt", "dig": "dug", "dive": "dove",
    "do": "did", "draw": "drew", "drink": "drank", "drive": "drove",
    "eat": "ate", "fall": "fell", "feed": "fed", "feel": "felt",
    "fight": "fought", "find": "found", "flee": "fled", "fly": "flew",
    "forbid": "forbade", "forecast": "forecast", "forget": "forgot",
    "forgive": "forgave", "freeze": "froze", "get": "got", "give": "gave",
    "go": "went", "grind": "ground", "grow": "grew", "hang": "hung",
    "have": "had", "hear": "heard", "hide": "hid", "hit": "hit",
    "hold": "held", "hurt": "hurt", "keep": "kept", "kneel": "knelt",
    "know": "knew", "lay": "laid", "lead": "led", "leap": "leapt",
    "leave": "left", "lend": "lent", "let": "let", "lie": "lay",
    "light": "lit", "lose": "lost", "make": "made", "mean": "meant",
    "meet": "met", "overcome": "overcame", "pay": "paid", "put": "put",
    "read": "read", "ride": "rode", "ring": "rang", "rise": "rose",
    "run": "ran", "saw": "sawed", "say": "said", "see": "saw",
    "seek": "sought", "sell": "sold", "send": "sent", "set": "set",
    "sew": "sewed", "shake": "shook", "shine": "shone", "shoot": "shot",
    "show": "showed", "shrink": "shrank", "shut": "shut", "sing": "sang",
    "sink": "sank", "sit": "sat", "sleep": "slept", "slide": "slid",
    "speak": "spoke", "spend": "spent", "spin": "spun", "spit": "spat",
    "split": "split", "spread": "spread", "stand": "stood", "steal": "stole",
    "stick": "stuck", "sting": "stung", "strike": "struck", "swear": "swore",
    "sweep": "swept", "swim": "swam", "swing": "swung", "take": "took",
    "teach": "taught", "tear": "tore", "tell": "told", "think": "thought",
    "throw": "threw", "undergo": "underwent", "understand": "understood",
    "upset": "upset", "wake": "woke", "wear": "wore", "win": "won",
    "write": "wrote",
}

# Regular verbs whose final consonant doubles before -ed.
DOUBLE = set("""
ban beg chat chop clap commit drag drip drop grab grin grip hop hug hum jam
knit nod occur permit pin plan plug pop prefer rob rub scrub ship shop shrug
sin sip skip slap slip spot step stir stop strip submit tip trap trip trot tug
whip wink zip pedal travel cancel label star blog rap
""".split()) - {"wink"}


def third_singular(base):
    if base in THIRD_IRREGULAR:
        return THIRD_IRREGULAR[base]
    if base.endswith(("s", "x", "z", "ch", "sh", "o")):
        return base + "es"
    if base.endswith("y") and base[-2] not in "aeiou":
        return base[:-1] + "ies"
    return base + "s"


def past(base):
    if base in PAST_IRREGULAR:
        return PAST_IRREGULAR[base]
    if base in DOUBLE:
        return base + base[-1] + "ed"
    if base.endswith("e"):
        return base + "d"
    if base.endswith("y") and base[-2] not in "aeiou":
        return base[:-1] + "ied"
    return base + "ed"


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(
        os.path.dirname(__file__), "..", "crates", "core", "data", "verbs.csv")
    bases = sorted(set(BASES) | {"take"})
    with open(out, "w", encoding="utf-8") as f:
        f.write("# base,third_singular,past\n")
        for b in bases:
            f.write(f"{b},{third_singular(b)},{past(b)}\n")
    print(f"{len(bases)} verbs -> {out}")


if __name__ == "__main__":
    main()
