"""Bundled reference values: motor fuel tax rates (July 2020) and 2019 populations."""

# cents per gallon: (gasoline, diesel)
TAX_RATES_2020 = {
    "AL": (26.0, 27.0),
    "AK": (8.0, 8.0),
    "AZ": (18.0, 26.0),
    "AR": (24.8, 28.8),
    "CA": (50.5, 38.5),
    "CO": (22.0, 20.5),
    "CT": (25.0, 46.5),
    "DE": (23.0, 22.0),
    "DC": (23.5, 23.5),
    "FL": (37.8, 37.8),
    "GA": (27.9, 31.3),
    "HI": (16.0, 16.0),
    "ID": (33.0, 33.0),
    "IL": (39.8, 47.3),
    "IN": (32.0, 52.0),
    "IA": (31.0, 33.5),
    "KS": (24.0, 26.0),
    "KY": (24.6, 21.6),
    "LA": (20.0, 20.0),
    "ME": (30.0, 31.2),
    "MD": (36.3, 37.1),
    "MA": (24.0, 24.0),
    "MI": (26.3, 26.3),
    "MN": (28.5, 28.5),
    "MS": (18.4, 18.4),
    "MO": (17.0, 17.0),
    "MT": (32.8, 30.2),
    "NE": (34.1, 34.1),
    "NV": (23.8, 27.0),
    "NH": (23.8, 23.8),
    "NJ": (37.1, 40.1),
    "NM": (17.0, 21.0),
    "NY": (25.5, 23.7),
    "NC": (36.4, 36.4),
    "ND": (23.0, 23.0),
    "OH": (38.5, 47.0),
    "OK": (20.0, 20.0),
    "OR": (36.0, 36.0),
    "PA": (57.6, 74.1),
    "RI": (35.0, 35.0),
    "SC": (24.0, 24.0),
    "SD": (30.0, 30.0),
    "TN": (26.0, 27.0),
    "TX": (20.0, 20.0),
    "UT": (30.0, 30.0),
    "VT": (30.5, 31.0),
    "VA": (16.2, 20.2),
    "WA": (49.4, 49.4),
    "WV": (35.7, 35.7),
    "WI": (30.9, 30.9),
    "WY": (24.0, 24.0),
}

FEDERAL_RATES_2020 = (18.4, 24.4)

# Resident population estimates, 2019. Used only to seed the synthetic generator.
POPULATION_2019 = {
    "AL": 4903185,
    "AK": 731545,
    "AZ": 7278717,
    "AR": 3017804,
    "CA": 39512223,
    "CO": 5758736,
    "CT": 3565287,
    "DE": 973764,
    "DC": 705749,
    "FL": 21477737,
    "GA": 10617423,
    "HI": 1415872,
    "ID": 1787065,
    "IL": 12671821,
    "IN": 6732219,
    "IA": 3155070,
    "KS": 2913314,
    "KY": 4467673,
    "LA": 4648794,
    "ME": 1344212,
    "MD": 6045680,
    "MA": 6892503,
    "MI": 9986857,
    "MN": 5639632,
    "MS": 2976149,
    "MO": 6137428,
    "MT": 1068778,
    "NE": 1934408,
    "NV": 3080156,
    "NH": 1359711,
    "NJ": 8882190,
    "NM": 2096829,
    "NY": 19453561,
    "NC": 10488084,
    "ND": 762062,
    "OH": 11689100,
    "OK": 3956971,
    "OR": 4217737,
    "PA": 12801989,
    "RI": 1059361,
    "SC": 5148714,
    "SD": 884659,
    "TN": 6829174,
    "TX": 28995881,
    "UT": 3205958,
    "VT": 623989,
    "VA": 8535519,
    "WA": 7614893,
    "WV": 1792147,
    "WI": 5822434,
    "WY": 578759,
}
