#!/usr/bin/env python3
"""Regenerate the committed CSV fixtures under crates/core/fixtures.

Output is deterministic (fixed seeds); re-running overwrites identically.
"""
import csv
import datetime as dt
import os
import random

ROOT = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "fixtures")
GAMES_HEADER = [
    "season_id", "game_id", "date", "home_team", "away_team", "home_pts", "away_pts",
    "home_fga", "home_fta", "home_oreb", "home_tov",
    "away_fga", "away_fta", "away_oreb", "away_tov", "home_poss", "away_poss",
]

EAST = ["ATL", "BOS", "BKN", "CHA", "CHI", "CLE", "DET", "IND", "MIA", "MIL", "NYK", "ORL", "PHI", "TOR", "WAS"]
WEST = ["DAL", "DEN", "GSW", "HOU", "LAC", "LAL", "MEM", "MIN", "NOP", "OKC", "PHX", "POR", "SAC", "SAS", "UTA"]


def write_csv(path, header, rows):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def box(rng, poss):
    fta = rng.randint(14, 30)
    oreb = rng.randint(6, 14)
    tov = rng.randint(9, 18)
    fga = max(0, round(poss + oreb - tov - 0.44 * fta))
    return [fga, fta, oreb, tov]


def play(rng, strength, home, away, hca=2.5):
    while True:
        poss = rng.gauss(99.0, 4.0)
        margin = rng.gauss(strength[home] - strength[away] + hca, 12.0)
        base = poss * 1.1
        hp = round(base + margin / 2)
        ap = round(base - margin / 2)
        if hp != ap:
            return hp, ap, poss


def season_rows(rng, season_id, schedule, strength, start, per_day, poss_every):
    rng.shuffle(schedule)
    rows = []
    for n, (home, away) in enumerate(schedule):
        date = start + dt.timedelta(days=n // per_day)
        hp, ap, poss = play(rng, strength, home, away)
        hb = box(rng, poss)
        ab = box(rng, poss)
        explicit = poss_every and n % poss_every == 0
        hposs = f"{poss:.1f}" if explicit else ""
        aposs = f"{poss:.1f}" if explicit else ""
        gid = f"{season_id[2:4]}{n + 1:05d}"
        rows.append([season_id, gid, date.isoformat(), home, away, hp, ap, *hb, *ab, hposs, aposs])
    return rows


def two_team():
    d = os.path.join(ROOT, "two_team")
    s = "2018-2019"
    rows = [
        [s, "0001", "2018-10-16", "XXX", "YYY", 105, 98, 88, 20, 10, 13, 90, 18, 11, 14, "", ""],
        [s, "0002", "2018-10-18", "YYY", "XXX", 99, 101, 87, 22, 9, 15, 86, 24, 10, 12, "", ""],
        [s, "0003", "2018-10-20", "XXX", "YYY", 110, 100, 91, 25, 10, 12, 89, 19, 12, 13, "100.0", "100.0"],
        [s, "0004", "2018-10-22", "YYY", "XXX", 112, 104, 90, 21, 11, 11, 92, 17, 9, 16, "", ""],
    ]
    write_csv(os.path.join(d, "games.csv"), GAMES_HEADER, rows)
    write_csv(os.path.join(d, "teams.csv"), ["team", "conference"], [["XXX", "East"], ["YYY", "East"]])
    write_csv(os.path.join(d, "picks.csv"), ["season_id", "team", "owns_first_round_pick"],
              [[s, "XXX", "true"], [s, "YYY", "true"]])


def mini():
    rng = random.Random(20221)
    d = os.path.join(ROOT, "mini")
    east, west = ["AAA", "BBB", "CCC", "DDD"], ["EEE", "FFF", "GGG", "HHH"]
    teams = east + west
    games, picks, priors, era = [], [], [], []
    for season, start in (("2016-2017", dt.date(2016, 10, 25)), ("2021-2022", dt.date(2021, 10, 19))):
        strength = {t: rng.gauss(0.0, 6.0) for t in teams}
        schedule = [(h, a) for h in teams for a in teams if h != a]
        games += season_rows(rng, season, schedule, strength, start, 4, 5)
        for t in teams:
            picks.append([season, t, "false" if rng.random() < 0.25 else "true"])
            priors.append([season, t, f"{min(0.9, max(0.1, 0.5 + strength[t] / 30)):.3f}"])
        era.append([season, 2, 3])
    write_csv(os.path.join(d, "games.csv"), GAMES_HEADER, games)
    write_csv(os.path.join(d, "teams.csv"), ["team", "conference"],
              [[t, "East"] for t in east] + [[t, "West"] for t in west])
    write_csv(os.path.join(d, "picks.csv"), ["season_id", "team", "owns_first_round_pick"], picks)
    write_csv(os.path.join(d, "priors.csv"), ["season_id", "team", "prior"], priors)
    write_csv(os.path.join(d, "era.csv"), ["season_id", "classify_rank", "eliminate_rank"], era)


def synthetic():
    rng = random.Random(1230)
    d = os.path.join(ROOT, "synthetic")
    teams = EAST + WEST
    season = "2018-2019"
    strength = {t: rng.gauss(0.0, 5.0) for t in teams}
    schedule = [(h, a) for h in teams for a in teams if h != a]
    # 58 round-robin games per team plus 24 extra via a circulant pairing -> 82
    for i, h in enumerate(teams):
        for off in range(1, 13):
            schedule.append((h, teams[(i + off) % len(teams)]))
    games = season_rows(rng, season, schedule, strength, dt.date(2018, 10, 16), 8, 10)
    write_csv(os.path.join(d, "games.csv"), GAMES_HEADER, games)
    write_csv(os.path.join(d, "teams.csv"), ["team", "conference"],
              [[t, "East"] for t in EAST] + [[t, "West"] for t in WEST])
    write_csv(os.path.join(d, "picks.csv"), ["season_id", "team", "owns_first_round_pick"],
              [[season, t, "false" if rng.random() < 0.2 else "true"] for t in teams])


if __name__ == "__main__":
    two_team()
    mini()
    synthetic()
