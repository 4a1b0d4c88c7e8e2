#!/usr/bin/env python3
"""Writes fixtures/ad_corpus: HTML pages plus labels.json.

Pages are built as element trees here and serialized; the labeled element
paths come from these trees, not from the C++ parser. Ad slots that lack the
accessibility label (floating windows) are labeled ads the identifier is
expected to miss; they are listed in manifest.json.
"""

import html
import json
import os
import random
import sys

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "ad_corpus")
AD_LABEL = "Advertisement"

# Start tags that close an open <p> in the parser (and in browsers).
CLOSES_P = {
    "address", "article", "aside", "blockquote", "div", "dl", "fieldset",
    "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6", "header", "hr",
    "main", "nav", "ol", "p", "pre", "section", "table", "ul", "figure",
}
VOID = {"img", "br", "hr", "meta", "input", "link", "source", "wbr"}


class E:
    def __init__(self, tag, attrs=None, children=None, text=None, omit_end=False,
                 unquoted=False, upper_attrs=False, ad=False, raw=None):
        self.tag = tag
        self.attrs = list(attrs or [])
        self.children = list(children or [])
        self.text = text
        self.omit_end = omit_end
        self.unquoted = unquoted
        self.upper_attrs = upper_attrs
        self.ad = ad            # counts as a labeled ad slot
        self.raw = raw          # raw-text content (script, style, textarea)
        self.frame = None       # srcdoc document (list of E) for iframes

    def add(self, *kids):
        self.children.extend(kids)
        return self


def attr_text(e):
    parts = []
    for name, value in e.attrs:
        n = name.upper() if e.upper_attrs else name
        if value is None:
            parts.append(n)
        elif e.unquoted and all(c not in value for c in " \"'=<>`"):
            parts.append(f"{n}={value}")
        else:
            parts.append(f'{n}="{html.escape(value, quote=True)}"')
    return (" " + " ".join(parts)) if parts else ""


def serialize(nodes):
    out = []
    for i, n in enumerate(nodes):
        if isinstance(n, str):
            out.append(n)
            continue
        attrs = list(n.attrs)
        if n.frame is not None:
            attrs.append(("srcdoc", serialize(n.frame)))
        saved = n.attrs
        n.attrs = attrs
        out.append(f"<{n.tag}{attr_text(n)}>")
        n.attrs = saved
        if n.tag in VOID:
            continue
        if n.raw is not None:
            out.append(n.raw)
        if n.text:
            out.append(html.escape(n.text, quote=False))
        out.append(serialize(n.children))
        if n.omit_end:
            # Only where the parser closes the element the same way.
            nxt = next((m for m in nodes[i + 1:] if not isinstance(m, str)), None)
            assert n.tag == "li" and (nxt is None or nxt.tag == "li") or \
                n.tag == "p" and (nxt is None or nxt.tag in CLOSES_P), n.tag
            continue
        out.append(f"</{n.tag}>")
    return "".join(out)


def collect(nodes, prefix, found):
    counts = {}
    for n in nodes:
        if isinstance(n, str):
            continue
        counts[n.tag] = counts.get(n.tag, 0) + 1
        path = f"{prefix}/{n.tag}[{counts[n.tag]}]"
        if n.ad:
            found.append(path)
        if n.frame is not None:
            collect(n.frame, path + "/#document", found)
        collect(n.children, path, found)


# --- building blocks --------------------------------------------------------

CAPTIONS = [
    "Weekend sale on running shoes", "Refinance your mortgage today",
    "Learn a language in ten minutes a day", "Fresh meal kits delivered",
    "Compare car insurance quotes", "Noise cancelling headphones",
    "Spring garden supplies", "Budget airline fares to the coast",
    "Online degree programs", "Smart home thermostat",
    "Family dental care near you", "Streaming bundle offer",
]


def creative(rng, size=(300, 250), label=True, style_extra="", upper=False, unquoted=False,
             sized_by="style"):
    w, h = size
    caption = rng.choice(CAPTIONS)
    attrs = [("class", "ad-creative")]
    if label:
        attrs.append(("aria-label", AD_LABEL))
    if sized_by == "style":
        attrs.append(("style", f"width:{w}px;height:{h}px;{style_extra}".rstrip(";")))
    elif sized_by == "attrs":
        attrs += [("width", str(w)), ("height", str(h))]
    attrs.append(("data-caption", caption))
    e = E("div", attrs, upper_attrs=upper, unquoted=unquoted, ad=True)
    e.add(E("img", [("src", f"/img/{rng.randrange(1000, 9999)}.png"), ("alt", caption)]))
    e.add(E("p", [("class", "ad-copy")], text=caption + "."))
    return e


def article(rng, paragraphs=2, unclosed_p=False):
    a = E("article", [("class", "story")])
    a.add(E("h2", text=rng.choice(["Council votes on budget", "Team wins final",
                                   "New park opens", "Rain expected Friday"])))
    for _ in range(paragraphs):
        a.add(E("p", text="Lorem ipsum dolor sit amet, consectetur adipiscing elit.",
                omit_end=unclosed_p))
    if unclosed_p:
        a.add(E("div", [("class", "byline")], text="Staff reporter"))
    return a


def decoys(rng, kinds):
    out = []
    for k in kinds:
        if k == "settings":
            out.append(E("a", [("href", "/ads/settings"), ("aria-label", "Advertisement settings")],
                          text="Ad choices"))
        elif k == "lowercase":
            out.append(E("span", [("aria-label", "advertisement")], text="Sponsored links"))
        elif k == "plural":
            out.append(E("nav", [("aria-label", "Advertisements")], text="Our advertisers"))
        elif k == "title":
            out.append(E("div", [("title", AD_LABEL), ("class", "promo")], text="House promotion"))
        elif k == "data":
            out.append(E("div", [("data-aria-label", AD_LABEL)], text="Editorial pick"))
        elif k == "script":
            out.append(E("script", raw="var tpl = '<div aria-label=\"Advertisement\"></div>';"))
        elif k == "comment":
            out.append('<!-- <div aria-label="Advertisement">old slot</div> -->')
        elif k == "textarea":
            out.append(E("textarea", [("name", "embed")],
                         raw='<div aria-label="Advertisement">paste your ad</div>'))
        elif k == "heading":
            out.append(E("h3", text=AD_LABEL))
        elif k == "labelledby":
            out.append(E("div", [("aria-labelledby", "ad-label")], text="Partner content"))
        elif k == "padded":
            out.append(E("div", [("aria-label", AD_LABEL + " ")], text="Trailing space label"))
    return out


def page(title, body_children):
    return [
        "<!DOCTYPE html>\n",
        E("html", [("lang", "en")], [
            E("head", children=[E("meta", [("charset", "utf-8")]), E("title", raw=html.escape(title))]),
            E("body", children=body_children),
        ]),
    ]


# --- page templates ---------------------------------------------------------

def news(rng, i, n_ads, decoy_kinds, unclosed=False):
    main = E("main")
    for k in range(n_ads):
        main.add(article(rng, unclosed_p=unclosed and k == 0))
        slot = E("div", [("class", "ad-slot"), ("id", f"slot-{k + 1}")])
        slot.add(creative(rng, sized_by=rng.choice(["style", "attrs", "style"])))
        main.add(slot)
    main.add(article(rng))
    body = [E("header", [("class", "site-header")], [E("h1", text=f"Daily News {i}")]), main,
            E("footer", children=decoys(rng, decoy_kinds))]
    return page(f"Daily News {i}", body)


def shopping(rng, i, n_ads, decoy_kinds):
    grid = E("ul", [("class", "grid")])
    positions = set(rng.sample(range(2, 10), n_ads))
    for k in range(10):
        li = E("li", [("class", "product")], omit_end=True)
        if k in positions:
            li.add(creative(rng, size=(240, 400)))
        else:
            li.add(E("a", [("href", f"/p/{k}")], text=f"Product {k}"))
        grid.add(li)
    body = [E("header", children=[E("h1", text=f"Shop {i}")]),
            E("section", [("class", "catalog")], [grid]),
            E("aside", children=decoys(rng, decoy_kinds))]
    return page(f"Shop {i}", body)


def forum(rng, i, n_ads, decoy_kinds):
    table = E("table", [("class", "thread")])
    tbody = E("tbody")
    ad_rows = set(rng.sample(range(1, 8), n_ads))
    for r in range(8):
        tr = E("tr")
        tr.add(E("td", text=f"user{r}"))
        td = E("td")
        if r in ad_rows:
            td.add(creative(rng, size=(728, 90)))
        else:
            td.add(E("p", text="I had the same problem with my car last winter."))
        tr.add(td)
        tbody.add(tr)
    table.add(tbody)
    body = [E("div", [("id", "forum")], [E("h1", text=f"Forum thread {i}"), table]),
            E("div", [("class", "footer")], decoys(rng, decoy_kinds))]
    return page(f"Forum {i}", body)


def recipe(rng, i, n_ads, decoy_kinds, frame_ads=0, frame_wrapped=False):
    content = E("div", [("class", "recipe")])
    content.add(E("h1", text=f"Recipe {i}"))
    steps = E("ol")
    for s in range(4):
        steps.add(E("li", text=f"Step {s + 1}: stir gently.", omit_end=True))
    content.add(steps)
    side = E("aside", [("class", "sidebar")])
    for k in range(n_ads - frame_ads):
        side.add(E("div", [("class", "sidebar-ad")], [creative(rng, size=(300, 600))]))
    for k in range(frame_ads):
        frame = [creative(rng)]
        if frame_wrapped:
            frame = [E("html", children=[E("body", children=frame)])]
        iframe = E("iframe", [("title", "ad frame"), ("width", "300"), ("height", "250")])
        iframe.frame = frame
        side.add(E("div", [("class", "frame-slot")], [iframe]))
    body = [content, side, E("footer", children=decoys(rng, decoy_kinds))]
    return page(f"Recipe {i}", body)


def blog(rng, i, n_ads, decoy_kinds, floating=False, quirks=False):
    post = E("section", [("class", "post")])
    post.add(E("h1", text=f"Blog post {i}"))
    for k in range(n_ads):
        post.add(E("p", text="A long paragraph about the trip.", omit_end=quirks))
        post.add(creative(rng, upper=quirks and k == 0, unquoted=quirks and k == 1,
                          style_extra="position:relative;left:12px;top:40px" if k == 2 else ""))
    if quirks:
        post.add(E("p", children=[E("span", text="stray end tag follows"), "</span></em>"]))
    body = [E("div", [("id", "page")], [post])]
    if floating:
        # Pop-up window carrying a creative but no accessibility label.
        win = E("div", [("class", "floating-window"), ("role", "dialog"),
                        ("style", "position:fixed;right:0;bottom:0")])
        win.add(creative(rng, label=False, style_extra="position:fixed"))
        body.append(win)
    body.append(E("footer", children=decoys(rng, decoy_kinds)))
    return page(f"Blog {i}", body)


def entity_page(rng, i):
    main = E("main")
    ad = creative(rng)
    ad.attrs = [(n, "&#65;dvertisement" if n == "aria-label" else v) for n, v in ad.attrs]
    main.add(E("div", [("class", "slot")], [ad]))
    main.add(E("div", [("class", "slot")], [creative(rng, sized_by="none")]))
    main.add(E("div", [("class", "slot")], [creative(rng, size=(160, 600))]))
    body = [main, E("footer", children=decoys(rng, ["settings", "padded"]))]
    return page(f"Entities {i}", body)


def main():
    rng = random.Random(20240611)
    all_decoys = ["settings", "lowercase", "plural", "title", "data", "script", "comment",
                  "textarea", "heading", "labelledby", "padded"]
    pages = {}
    for i in range(6):
        pages[f"news_{i:02d}.html"] = news(rng, i, 3 + i % 2, rng.sample(all_decoys, 3),
                                           unclosed=i % 3 == 0)
    for i in range(5):
        pages[f"shop_{i:02d}.html"] = shopping(rng, i, 3 + i % 2, rng.sample(all_decoys, 2))
    for i in range(5):
        pages[f"forum_{i:02d}.html"] = forum(rng, i, 3 + i % 3, rng.sample(all_decoys, 2))
    for i in range(5):
        pages[f"recipe_{i:02d}.html"] = recipe(rng, i, 4, rng.sample(all_decoys, 2),
                                               frame_ads=1 + i % 2, frame_wrapped=i % 2 == 1)
    for i in range(6):
        pages[f"blog_{i:02d}.html"] = blog(rng, i, 3, rng.sample(all_decoys, 3),
                                           floating=i in (1, 3, 4), quirks=i % 2 == 0)
    pages["entities_00.html"] = entity_page(rng, 0)

    # The entity-encoded label has to survive escaping as an entity reference,
    # so that page is serialized with the raw attribute text patched in.
    os.makedirs(OUT, exist_ok=True)
    for f in os.listdir(OUT):
        if f.endswith(".html") or f.endswith(".json"):
            os.remove(os.path.join(OUT, f))

    labels = {}
    misses = []
    for name, nodes in sorted(pages.items()):
        text = serialize(nodes)
        text = text.replace('aria-label="&amp;#65;dvertisement"', 'aria-label="&#65;dvertisement"')
        found = []
        collect(nodes, "", found)
        labels[name] = found
        # Unlabeled creatives the identifier cannot see.
        unlabeled = []

        def walk(prefix, ns):
            counts = {}
            for n in ns:
                if isinstance(n, str):
                    continue
                counts[n.tag] = counts.get(n.tag, 0) + 1
                path = f"{prefix}/{n.tag}[{counts[n.tag]}]"
                if n.ad and not any(a == "aria-label" for a, _ in n.attrs):
                    unlabeled.append(path)
                if n.frame is not None:
                    walk(path + "/#document", n.frame)
                walk(path, n.children)

        walk("", nodes)
        misses += [f"{name}#{p}" for p in unlabeled]
        with open(os.path.join(OUT, name), "w", encoding="utf-8") as fh:
            fh.write(text + "\n")

    with open(os.path.join(OUT, "labels.json"), "w") as fh:
        json.dump(labels, fh, indent=2, sort_keys=True)
        fh.write("\n")
    total = sum(len(v) for v in labels.values())
    with open(os.path.join(OUT, "manifest.json"), "w") as fh:
        json.dump({"pages": len(labels), "labeled_slots": total, "engineered_misses": sorted(misses)},
                  fh, indent=2)
        fh.write("\n")
    print(f"{len(labels)} pages, {total} labeled slots, {len(misses)} engineered misses",
          file=sys.stderr)


if __name__ == "__main__":
    main()
