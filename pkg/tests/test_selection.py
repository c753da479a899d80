import math
import random

from hypothesis import given, settings, strategies as st

from evoloop.critic.scoring import CriticVerdict
from evoloop.env import Action, Observation
from evoloop.selection import SelectionConfig, select
from evoloop.store import ExclusionLedger, Trajectory, hash_trajectory


def make_candidate(tag: str, score: int):
    t = Trajectory(
        traj_hash="", instruction_id=f"instr-{tag}", sample_index=0, iteration_born=0,
        status="finished",
        steps=((Action.finish(tag), Observation("ok", f"answer recorded: {tag}")),),
        final_answer=tag,
    )
    t = t.with_hash(hash_trajectory(t))
    verdict = CriticVerdict(t.traj_hash, score, "fixture", "oracle")
    return t, verdict


class TestSelect:
    def test_top_ten_percent_of_twenty(self):
        pool = [make_candidate(f"c{i}", score=(10 if i < 5 else 2)) for i in range(20)]
        selected = select(pool, ExclusionLedger(), SelectionConfig(p_percent=10))
        assert len(selected) == 2
        chosen = {t.traj_hash for t in selected}
        scores = {v.traj_hash: v.score for _, v in pool}
        unselected_max = max(scores[t.traj_hash] for t, _ in pool
                             if t.traj_hash not in chosen)
        selected_min = min(scores[h] for h in chosen)
        assert selected_min >= unselected_max

    def test_eleven_hundred_candidates_give_110(self):
        pool = [make_candidate(f"c{i}", score=1 + i % 10) for i in range(1100)]
        selected = select(pool, ExclusionLedger(), SelectionConfig(p_percent=10))
        assert len(selected) == 110

    def test_ledger_excludes_top_candidate(self):
        pool = [make_candidate("best", 10), make_candidate("mid", 8),
                make_candidate("low", 3)]
        ledger = ExclusionLedger()
        ledger.record([pool[0][0].traj_hash], iteration=0)
        selected = select(pool, ledger, SelectionConfig(p_percent=10))
        assert [t.traj_hash for t in selected] == [pool[1][0].traj_hash]

    def test_score_floor_drops_failures(self):
        pool = [make_candidate("zero", 0), make_candidate("one", 1)]
        selected = select(pool, ExclusionLedger(), SelectionConfig(p_percent=100))
        assert [t.final_answer for t in selected] == ["one"]

    def test_empty_pool_gives_empty_selection(self):
        assert select([], ExclusionLedger(), SelectionConfig()) == []

    def test_duplicate_hashes_collapse(self):
        a1 = make_candidate("same", 10)
        a2 = (a1[0], CriticVerdict(a1[0].traj_hash, 4, "other run", "oracle"))
        selected = select([a1, a2], ExclusionLedger(), SelectionConfig(p_percent=100))
        assert len(selected) == 1

    def test_selected_hashes_enter_ledger(self):
        pool = [make_candidate(f"c{i}", 10) for i in range(10)]
        ledger = ExclusionLedger()
        selected = select(pool, ledger, SelectionConfig(p_percent=10), iteration=3)
        assert all(t.traj_hash in ledger for t in selected)


pools = st.lists(
    st.tuples(st.integers(0, 9999), st.integers(0, 10)),
    min_size=0, max_size=80,
).map(lambda raw: [make_candidate(f"r{tag}", score) for tag, score in raw])


class TestSelectionProperties:
    @given(pools, st.floats(0.5, 100))
    @settings(max_examples=60, deadline=None)
    def test_cardinality_and_dominance(self, pool, p):
        cfg = SelectionConfig(p_percent=p)
        ledger = ExclusionLedger()
        selected = select(pool, ledger, cfg)

        scores = {}
        for t, v in pool:
            scores[t.traj_hash] = max(scores.get(t.traj_hash, 0), v.score)
        eligible = [h for h, s in scores.items() if s >= cfg.min_score_floor]
        expected = min(math.ceil(p / 100 * len(eligible)), len(eligible))
        assert len(selected) == expected
        if selected:
            chosen = {t.traj_hash for t in selected}
            selected_min = min(scores[h] for h in chosen)
            rest = [scores[h] for h in eligible if h not in chosen]
            if rest:
                assert selected_min >= max(rest)

    @given(pools)
    @settings(max_examples=30, deadline=None)
    def test_determinism(self, pool):
        first = select(list(pool), ExclusionLedger(), SelectionConfig())
        second = select(list(reversed(pool)), ExclusionLedger(), SelectionConfig())
        assert {t.traj_hash for t in first} == {t.traj_hash for t in second}

    def test_no_hash_reuse_across_twenty_iterations(self):
        rng = random.Random(11)
        ledger = ExclusionLedger()
        all_selected = []
        for iteration in range(20):
            pool = [make_candidate(f"i{iteration}-{i}", rng.randint(0, 10))
                    for i in range(40)]
            # resample some earlier candidates to exercise exclusion
            if all_selected and rng.random() < 0.8:
                pool.extend(all_selected[-3:])
            selected = select(pool, ledger, SelectionConfig(p_percent=25),
                              iteration=iteration)
            all_selected.extend((t, CriticVerdict(t.traj_hash, 10, "", "oracle"))
                                for t in selected)
        hashes = [t.traj_hash for t, _ in all_selected]
        assert len(hashes) == len(set(hashes))
