"""Regenerates the 50-article fixture corpus and its two-coder gold units.

Run from this directory: python3 generate.py
Output is fully determined by SEED; rerunning overwrites the files in place.
"""

import csv
import json
import random

SEED = 2024

LOCAL = ["arcinfo.ch", "lacote.ch", "lenouvelliste.ch"]
NATIONAL = [
    "francetvinfo.fr", "lefigaro.fr", "la-croix.com", "lapresse.ca", "rtl.be",
    "tf1info.fr", "watson.ch", "ladepeche.fr", "lequipe.fr", "zonebourse.com",
    "gala.fr", "seneweb.com",
]

META_TOPICS = [
    "local-news", "professional-sports", "lifestyle-entertainment", "faits-divers",
    "national-local-politics", "technology", "business-economy", "geopolitics",
]

# topic -> (subjects, places, statements, answers)
TOPICS = {
    "local-news": (
        ["la nouvelle piscine", "la route cantonale", "la patinoire", "la place du marché"],
        ["Sion", "Lausanne", "Neuchâtel", "Genève"],
        [
            "Les travaux de {s} ont commencé lundi à {p}.",
            "Le chantier de {s} doit durer jusqu'au printemps.",
            "Les habitants de {p} suivent le dossier de {s} de près.",
            "La municipalité a présenté un budget de quatre millions pour {s}.",
            "Le Conseil d'État a validé le calendrier des travaux.",
        ],
        [
            "Le budget de {s} sera financé par la commune et le canton.",
            "Selon la municipalité, {s} ouvrira en septembre à {p}.",
            "Les travaux de {s} seront achevés avant l'été, assure le syndic.",
        ],
    ),
    "professional-sports": (
        ["Servette", "l'équipe nationale", "la Nati", "l'équipe locale"],
        ["Genève", "Paris", "Sion", "Lausanne"],
        [
            "Le match face à {s} s'est joué samedi à {p}.",
            "L'entraîneur de {s} a changé trois joueurs en seconde période.",
            "Kylian Mbappé a marqué deux buts lors de la Coupe du monde.",
            "Les supporters de {s} ont rempli le stade de {p}.",
            "La saison de {s} reste longue et incertaine.",
        ],
        [
            "{S} jouera la finale contre un adversaire redoutable.",
            "L'entraîneur de {s} a confirmé le retour du capitaine pour la finale.",
            "{S} vise le titre, a déclaré son président.",
        ],
    ),
    "lifestyle-entertainment": (
        ["la Fête des vignerons", "la nouvelle série", "la tournée d'été", "l'exposition"],
        ["Lausanne", "Genève", "Paris", "Bruxelles"],
        [
            "{S} a attiré des milliers de spectateurs à {p}.",
            "Les organisateurs de {s} annoncent une édition record.",
            "Les billets pour {s} se sont vendus en deux heures.",
            "Les artistes invités à {s} viennent de toute l'Europe.",
            "Le programme de {s} sera dévoilé en mars.",
        ],
        [
            "Les organisateurs de {s} prévoient une programmation plus longue.",
            "{S} accueillera quarante artistes, selon la direction.",
            "Les spectateurs de {s} pourront acheter leurs billets en ligne.",
        ],
    ),
    "faits-divers": (
        ["l'incendie", "l'accident", "le cambriolage", "la disparition"],
        ["Sion", "Genève", "Lausanne", "Paris"],
        [
            "La police enquête sur {s} survenu mardi à {p}.",
            "Les pompiers sont intervenus rapidement après {s}.",
            "Un témoin a décrit {s} aux enquêteurs de {p}.",
            "Le procureur a ouvert une instruction après {s}.",
            "Les habitants du quartier restent choqués par {s}.",
        ],
        [
            "Selon la police, {s} serait dû à une erreur humaine.",
            "Les enquêteurs estiment que {s} a été provoqué par une panne.",
            "La police a interpellé un suspect après {s}.",
        ],
    ),
    "national-local-politics": (
        ["la réforme des retraites", "la loi sur le climat", "l'initiative populaire", "la hausse des primes"],
        ["Berne", "Paris", "Genève", "Lausanne"],
        [
            "Le Conseil fédéral a présenté {s} mercredi.",
            "Alain Berset défend {s} devant les électeurs.",
            "L'UDC s'oppose fermement à {s}.",
            "Le débat sur {s} divise l'Assemblée nationale.",
            "Les contribuables attendent des précisions sur {s}.",
        ],
        [
            "Le gouvernement affirme que {s} réduira le déficit de moitié.",
            "Selon le ministre, {s} entrera en vigueur en janvier.",
            "Les élus ont voté {s} par cent voix contre quarante.",
        ],
    ),
    "technology": (
        ["l'intelligence artificielle", "la cybersécurité", "la 5G", "la voiture autonome"],
        ["Lausanne", "Genève", "Paris", "Bruxelles"],
        [
            "L'EPFL présente ses travaux sur {s} à {p}.",
            "Apple a dévoilé ses projets concernant {s}.",
            "Les entreprises investissent massivement dans {s}.",
            "Les chercheurs de l'EPFL publient une étude sur {s}.",
            "Le marché de {s} progresse de dix pour cent par an.",
        ],
        [
            "Les chercheurs affirment que {s} réduira les coûts de moitié.",
            "Selon l'EPFL, {s} sera disponible dès l'an prochain.",
            "Les experts estiment que {s} transformera le secteur.",
        ],
    ),
    "business-economy": (
        ["la banque UBS", "Nestlé", "la bourse suisse", "l'inflation"],
        ["Zurich", "Genève", "Paris", "Lausanne"],
        [
            "Les résultats de {s} ont surpris les analystes.",
            "Le cours de {s} a reculé de trois pour cent.",
            "Les investisseurs surveillent {s} depuis la reprise de Credit Suisse.",
            "La direction de {s} annonce un plan d'économies.",
            "Les agriculteurs et les commerçants subissent {s}.",
        ],
        [
            "La direction prévoit que {s} retrouvera la croissance en fin d'année.",
            "Selon les analystes, {s} devrait se stabiliser au printemps.",
            "Le bénéfice de {s} atteindra deux milliards, selon la direction.",
        ],
    ),
    "geopolitics": (
        ["la guerre en Ukraine", "le conflit à Gaza", "les sanctions contre la Russie", "le sommet de l'OTAN"],
        ["Kiev", "Bruxelles", "Gaza", "Genève"],
        [
            "Volodymyr Zelensky a évoqué {s} devant l'ONU.",
            "Vladimir Poutine rejette les critiques sur {s}.",
            "L'Union européenne prépare une réponse à {s}.",
            "Les diplomates réunis à {p} discutent de {s}.",
            "Les Ukrainiens attendent une issue à {s}.",
        ],
        [
            "Les diplomates estiment que {s} durera encore plusieurs mois.",
            "Selon l'ONU, {s} a déjà déplacé des millions de personnes.",
            "L'OTAN affirme que {s} restera au centre du sommet.",
        ],
    ),
}

# stance -> (templates, form, addressee)
QUESTIONS = {
    "framing-procedural": (
        [
            "Comment {s} va changer la vie des habitants de {p} ?",
            "Pourquoi {s} suscite autant de débats ?",
            "Quel avenir pour {s} ?",
            "Combien coûtera réellement {s} ?",
        ],
        "wh",
        "audience",
    ),
    "information-seeking": (
        [
            "« Quand verra-t-on la fin du dossier sur {s} ? » demande un habitant de {p}.",
            "« Qui financera {s} ? » interroge un élu.",
        ],
        "wh",
        "individual",
    ),
    "rhetorical": (
        [
            "À quoi bon {s} si personne ne l'utilise ?",
            "Qui peut encore croire aux promesses sur {s} ?",
        ],
        "polar",
        "audience",
    ),
    "leading": (
        [
            "Faut-il vraiment faire de {s} une priorité ?",
            "Ne faudrait-il pas repenser {s} ?",
        ],
        "polar",
        "collective",
    ),
    "tag": (
        [
            "C'est une bonne nouvelle pour {p}, n'est-ce pas ?",
            "Tout le monde attendait {s}, non ?",
        ],
        "tag",
        "audience",
    ),
    "echo-clarification": (
        [
            "Vraiment ?",
            "Une erreur ?",
        ],
        "elliptic",
        "self",
    ),
}

INDIRECT = [
    "On peut se demander si {s} répondra aux attentes.",
    "Reste à savoir si {s} tiendra ses promesses.",
]

AXES = [
    "authority-positioning", "framing-agenda-setting", "stance-alignment",
    "legitimation", "discursive-strategy",
]

STANCE_ORDER = list(QUESTIONS)


OUTSIDE_PLACES = ["Trondheim", "Valparaiso", "Hokkaido", "Tasmanie"]
FILLER = [
    "Le temps était gris ce matin-là.",
    "Plusieurs lecteurs nous ont écrit depuis.",
    "Rien n'a filtré jusqu'ici.",
]


def article_plan(rng, i):
    topic = META_TOPICS[i % len(META_TOPICS)]
    source = (LOCAL if i % 2 == 0 else NATIONAL)[(i // 2) % (3 if i % 2 == 0 else len(NATIONAL))]
    # every seventh article is question-free; one topic id is left unmapped
    n_questions = 0 if i % 7 == 3 else 1 + rng.randrange(3)
    return topic, source, n_questions


def build_article(rng, i):
    topic, source, n_questions = article_plan(rng, i)
    subjects, places, statements, answers = TOPICS[topic]
    s = rng.choice(subjects)
    p = rng.choice(places)
    fill = lambda t: t.format(s=s, p=p, S=s[0].upper() + s[1:])
    body = [fill(t) for t in rng.sample(statements, 3)]
    units = []
    for q in range(n_questions):
        stance = STANCE_ORDER[(i + q * 2) % len(STANCE_ORDER)]
        templates, form, addressee = QUESTIONS[stance]
        roll = rng.random()
        if roll < 0.25:
            # asked about something the article never returns to
            other = TOPICS[META_TOPICS[(i + 3) % len(META_TOPICS)]][0]
            s2 = rng.choice(other)
            question = rng.choice(templates).format(s=s2, p=rng.choice(OUTSIDE_PLACES), S=s2[0].upper() + s2[1:])
        else:
            question = fill(rng.choice(templates))
        body.append(question)
        units.append((len(body) - 1, stance, form, addressee))
        if roll < 0.25:
            body.append(rng.choice(FILLER))
        elif roll < 0.45:
            body.append("« " + fill(rng.choice(answers)).rstrip(".") + " », affirme le porte-parole.")
        elif roll < 0.8:
            body.append(fill(rng.choice(answers)))
        else:
            body.append(fill(rng.choice(statements)))
        body.append(fill(rng.choice(statements)))
    if i % 5 == 1:
        body.append(fill(rng.choice(INDIRECT)))
        units.append((len(body) - 1, "framing-procedural", "indirect", "audience"))
    body.append(fill(rng.choice(statements)))
    text = " ".join(body)
    offsets = []
    pos = 0
    for sent in body:
        offsets.append((pos, pos + len(sent)))
        pos += len(sent) + 1
    topic_id = 99 if i in (13, 41) else META_TOPICS.index(topic) * 10 + i % 3
    article = {
        "article_id": f"fx{i:03d}",
        "source": source,
        "published_at": f"2023-{1 + i % 12:02d}-{1 + i % 28:02d}T08:00:00Z",
        "title": f"{s[0].upper()}{s[1:]} : le point à {p}",
        "text": text,
        "topic_id": topic_id,
        "lang": "fr",
    }
    return article, body, offsets, units


def gold_for(rng, article, body, offsets, units, annotator, noise):
    out = []
    n = 0
    for (idx, stance, form, addressee) in units:
        if annotator == "B" and rng.random() < noise / 2:
            continue
        start, end = offsets[idx]
        if rng.random() < noise and end - start > 12:
            start += rng.randrange(1, 6)
        label = stance
        if rng.random() < noise:
            label = rng.choice([x for x in STANCE_ORDER if x != stance])
        axes = [AXES[(idx + len(label)) % len(AXES)]]
        if rng.random() < 0.4:
            axes.append(AXES[(idx + len(label) + 2) % len(AXES)])
        n += 1
        out.append({
            "article_id": article["article_id"],
            "unit_id": f"{annotator.lower()}{n}",
            "annotator_id": annotator,
            "start": start,
            "end": end,
            "text": article["text"][start:end],
            "interactional_context": "interview" if "«" in body[idx] else "non-interview",
            "addressee": addressee,
            "form": form,
            "function": label,
            "macro_axes": axes,
            "answer_realized": idx + 1 < len(body) and rng.random() < 0.6,
        })
    return out


def main():
    rng = random.Random(SEED)
    articles = []
    gold = []
    for i in range(50):
        article, body, offsets, units = build_article(rng, i)
        articles.append(article)
        gold.extend(gold_for(rng, article, body, offsets, units, "A", 0.08))
        gold.extend(gold_for(rng, article, body, offsets, units, "B", 0.15))
    with open("articles.jsonl", "w", encoding="utf-8") as f:
        for a in articles:
            f.write(json.dumps(a, ensure_ascii=False) + "\n")
    with open("gold_units.jsonl", "w", encoding="utf-8") as f:
        for u in gold:
            f.write(json.dumps(u, ensure_ascii=False) + "\n")
    with open("meta_topics.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["topic_id", "meta_topic"])
        for k, topic in enumerate(META_TOPICS):
            for r in range(3):
                w.writerow([k * 10 + r, topic])


if __name__ == "__main__":
    main()
